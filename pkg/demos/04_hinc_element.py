"""The H(inc)-conforming element: DOF counts, unisolvence and a mutation check.

Run with ``python3 demos/04_hinc_element.py`` (about half a minute).
"""
# %% Build the element on the reference tetrahedron
from elascomplex.elements import build_element, check_unisolvence, dof_matrix, trace_determination_check

el = build_element("hinc", 6)
print("shape space dimension:", el.shape.dim)
print("DOFs per entity type:", el.entity_counts())
print("face DOF blocks on face (0, 1, 2):", el.family_counts((0, 1, 2)))

# %% The DOF matrix is square and nonsingular
m = dof_matrix(el)
r = check_unisolvence(el, m)
print(f"rank {r.rank} of {r.dim}: unisolvent = {r.passed}")

# %% Face DOFs determine both traces on that face
for face in ((0, 1, 2), (1, 2, 3)):
    d = trace_determination_check(el, face, m)
    print(f"face {face}: {d.constrained} constrained DOFs, kernel {d.kernel_dim}, traces determined = {d.passed}")

# %% Dropping a face block leaves a kernel of the same size
bad = build_element("hinc", 6, drop=[("face_tr2_xx", (0, 1, 2))])
r = check_unisolvence(bad)
print(f"without face_tr2_xx on (0, 1, 2): {r.ndofs} DOFs, kernel dimension {r.kernel_dim}")
print("every DOF vanishes on the witness:", all(v == 0 for v in bad.evaluate(r.kernel_vector)))
