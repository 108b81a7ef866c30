"""Independent symbolic oracles built on sympy with index-notation formulas.

Nothing here calls the package's operators; values are converted in and out
through plain coefficient dictionaries.
"""
from fractions import Fraction

import sympy as sp
from sympy import LeviCivita

X = sp.symbols("x y z")


def to_sympy(p):
    return sum((sp.Rational(Fraction(c).numerator, Fraction(c).denominator) * sp.Mul(*[v ** a for v, a in zip(X, e)])
                for e, c in p.terms.items()), sp.Integer(0))


def mat(m):
    return sp.Matrix(3, 3, lambda i, j: to_sympy(m[i, j]))


def vec(v):
    return sp.Matrix([to_sympy(c) for c in v])


def same(a, b) -> bool:
    """Compare a package object with a sympy expression/matrix."""
    if isinstance(b, sp.MatrixBase):
        if b.shape == (3, 3):
            return all(sp.expand(to_sympy(a[i, j]) - b[i, j]) == 0 for i in range(3) for j in range(3))
        return all(sp.expand(to_sympy(a[i]) - b[i]) == 0 for i in range(3))
    return sp.expand(to_sympy(a) - b) == 0


def eps(i, j, k):
    return LeviCivita(i, j, k)


def inc_index(t):
    """(inc t)_ij = -eps_ikl eps_jmn d_k d_m t_ln."""
    out = sp.zeros(3, 3)
    for i in range(3):
        for j in range(3):
            s = 0
            for k in range(3):
                for l in range(3):
                    for m in range(3):
                        for n in range(3):
                            e = eps(i, k, l) * eps(j, m, n)
                            if e:
                                s -= e * sp.diff(t[l, n], X[k], X[m])
            out[i, j] = sp.expand(s)
    return out


def curl_index(v):
    return sp.Matrix([sum(eps(i, j, k) * sp.diff(v[k], X[j]) for j in range(3) for k in range(3))
                      for i in range(3)])


def tr1_index(t, n):
    """(n x t x n)_ij = eps_iab eps_jcd n_a n_d t_bc."""
    return sp.Matrix(3, 3, lambda i, j: sp.expand(sum(
        eps(i, a, b) * eps(j, c, d) * n[a] * n[d] * t[b, c]
        for a in range(3) for b in range(3) for c in range(3) for d in range(3))))


def simplex_integral(expr, vertices):
    """Integral over a simplex by iterated integration in affine coordinates.

    For segments and triangles the mean value is returned."""
    v = [sp.Matrix([sp.Rational(Fraction(c).numerator, Fraction(c).denominator) for c in p]) for p in vertices]
    d = len(v) - 1
    s = sp.symbols("s0:%d" % d)
    x = v[0] + sum((s[i] * (v[i + 1] - v[0]) for i in range(d)), sp.zeros(3, 1))
    f = expr.subs({X[0]: x[0], X[1]: x[1], X[2]: x[2]}, simultaneous=True)
    # iterated limits: s_{d-1} in [0, 1 - s_0 - ... - s_{d-2}]
    for i in reversed(range(d)):
        f = sp.integrate(f, (s[i], 0, 1 - sum(s[:i])))
    if d == 3:
        jac = sp.Matrix.hstack(*[v[i + 1] - v[0] for i in range(3)]).det()
        return Fraction(str(sp.nsimplify(abs(jac) * f)))
    return Fraction(str(sp.factorial(d) * f))
