"""Exact polynomial fields and the differential operators of linear elasticity.

Run with ``python3 demos/01_exact_polynomials.py``.
"""
# %% Polynomials with rational coefficients
from fractions import Fraction

from elascomplex.exactpoly import (
    REFERENCE_TET, MatPoly, Polynomial, SymMatPoly, VecPoly, curl, def_, div, dot_right, inc, integrate_simplex,
    nabla_cross, position, rigid_motion, trace, vskw,
)

x, y, z = (Polynomial.var(i) for i in range(3))
p = x * x * y + Fraction(1, 3) * z
print("p =", p)
print("dp/dx =", p.derive(0))
print("integral of p over the reference tet =", integrate_simplex(p, REFERENCE_TET))

# %% The symmetric gradient kills rigid motions
v = rigid_motion((1, 2, 3), (0, -1, 0))
print("rigid motion:", v)
print("def v is zero:", def_(v).is_zero())

# %% inc annihilates symmetric gradients and maps into divergence-free fields
u = VecPoly((x ** 3, x * y * z, z * z * y))
print("inc(def u) == 0:", inc(def_(u)).is_zero())
t = SymMatPoly([[z * z, 0, 0], [0, 0, 0], [0, 0, 0]])
print("inc(z^2 e1 e1^T) =", inc(t))
X = position()
xx = SymMatPoly([[X[i] * X[j] for j in range(3)] for i in range(3)])
print("inc(x x^T) =", inc(xx), "(twice the identity)")

# %% A commutation identity for a general matrix field
tau = MatPoly([[x * y, z, 0], [y * y, 1, x], [0, x * z, y]])
lhs = curl(dot_right(tau, X)) - dot_right(nabla_cross(tau), X)
print("curl(tau x) - (curl tau) x == 2 vskw tau:", lhs == vskw(tau) * 2)
print("tr(curl tau) == -div(2 vskw tau):", trace(nabla_cross(tau)) == -div(vskw(tau) * 2))
