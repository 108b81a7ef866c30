"""Global finite element spaces and the discrete elasticity complex on a mesh.

Run with ``python3 demos/05_mesh_complex.py`` (under a minute).
"""
# %% Two tetrahedra sharing a face
from elascomplex.meshassembly import builtin_mesh, dimension_formula, parse_mesh, verify_discrete_complex

m = builtin_mesh("twotet")
print("counts:", m.counts, "Euler characteristic:", m.euler)
for space in ("V", "inc", "div", "Q"):
    print(f"dim {space:3s} at k=6: {dimension_formula(space, 6, m.counts)}")

# %% Meshes can also be given as text
mesh = parse_mesh("""
v 0 0 0
v 1 0 0
v 0 1 0
v 0 0 1/2
t 0 1 2 3
""")
print("parsed vertices:", [tuple(str(c) for c in v) for v in mesh.vertices])

# %% Exactness of RM -> V_h -> Sigma_inc -> Sigma_div -> Q_h -> 0
r = verify_discrete_complex(m, 6)
print("dims:", r.notes["dims"], "ranks:", r.notes["ranks"])
for s in r.slots:
    print(f"    {s.name:10s} rank in {s.rank_in:4d} kernel out {s.nullity_out:4d} ok={s.passed}")
print("exact:", r.passed)
