"""Face traces of the inc operator, Green's identity and bubble spaces.

Run with ``python3 demos/03_traces_and_bubbles.py``.
"""
# %% Traces on the faces of a random rational tetrahedron
import random

from elascomplex.exactpoly import random_sym, random_tet, random_vec
from elascomplex.facetrace import (
    TRACE_IDENTITIES, bubble_basis, greens_inc_residual, tet_faces, tr1, tr2, trace_commutation_check,
    verify_bubble_complex,
)

rng = random.Random(1)
K = random_tet(rng)
print("tetrahedron:", K.vertices)
f = tet_faces(K)[0]
t = random_sym(rng, 2)
print("outward normal of face 0:", f.n)
print("tr1 is tangential:", f.P @ tr1(t, f) @ f.P == tr1(t, f))
print("tr2 is symmetric:", tr2(t, f).T == tr2(t, f))

# %% Green's identity holds exactly
s, t = random_sym(rng, 3), random_sym(rng, 3)
print("Green residual:", greens_inc_residual(s, t, K))

# %% Trace identities, one random input each
for which in TRACE_IDENTITIES:
    inp = random_vec(rng, 3) if which.startswith("def") else random_sym(rng, 3)
    print(f"{which:10s} residual {trace_commutation_check(which, inp, f, edge=1)}")

# %% Bubble spaces: tr1 = 0, and tr1 = tr2 = 0
for k in (4, 5):
    print(f"k={k}: dim B^t = {bubble_basis('tt', k).dim}, dim B = {bubble_basis('incFull', k).dim}")
r = verify_bubble_complex("elasticity", 5)
print("elasticity bubble complex at k=5:", r.notes["dims"], "exact" if r.passed else "not exact")
