"""Exactness of the polynomial complexes, checked by exact rank-nullity.

Run with ``python3 demos/02_polynomial_complexes.py``.
"""
# %% Three-dimensional complexes on the reference tetrahedron
from elascomplex.polyspaces import COMPLEXES, DECOMPOSITIONS, verify_complex, verify_decomposition

k = 4
for name in COMPLEXES:
    r = verify_complex(name, k)
    print(f"{name:18s} k={k} exact={r.passed}")
    for s in r.slots:
        print(f"    {s.name:12s} dim {s.dim:4d}  rank in {s.rank_in:4d}  kernel out {s.nullity_out:4d}")

# %% The rank of inc follows a closed form
for k in range(3, 6):
    r = verify_complex("polyElasticity", k)
    print(f"k={k}: rank inc = {r.notes['rank_inc']}, formula {r.notes['rank_inc_formula']}")

# %% Direct-sum decompositions: ranks of the parts add up to the total
for name in DECOMPOSITIONS:
    d = verify_decomposition(name, 4)
    print(f"{name:22s} total {d.total:4d} parts {d.parts} stacked rank {d.stacked_rank} -> {d.passed}")
