from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from strategies import mat_polys, points, polynomials, sym_polys, vec_polys
from elascomplex.exactpoly import (
    REFERENCE_TET, MatPoly, Polynomial, Simplex, SymMatPoly, VecPoly, cross, curl, cross_nabla, def_,
    derive, div, div_row, dot_right, grad, inc, inc_via_curl, integrate_simplex, koszul_dot_x,
    koszul_sym_vx, koszul_x_cross, mskw, nabla_cross, pi_RM, position, rigid_motion, skw, sym, trace,
    vskw,
)

x, y, z = (Polynomial.var(i) for i in range(3))
ZERO = Polynomial()


def mat_with(entries):
    m = [[ZERO] * 3 for _ in range(3)]
    for (i, j), v in entries.items():
        m[i][j] = v
    return MatPoly(m)


def test_polynomial_basics():
    p = x * x * y
    assert derive(p, 1) == 2 * x * y
    assert derive(Polynomial.const(5), 2).is_zero()
    assert derive(x + y + z, 3) == 1
    assert p(2, 3, 0) == 12
    with pytest.raises(ValueError):
        derive(p, 4)


def test_polynomial_stores_no_zero_terms():
    p = x - x + 0 * y
    assert p.terms == {}
    assert Polynomial({(1, 0, 0): 0, (0, 1, 0): 2}).terms == {(0, 1, 0): 2}
    with pytest.raises(ValueError):
        Polynomial({(1, 0): 1}, 3)


def test_grad_examples():
    g = grad(VecPoly((x, 0, 0)))
    assert g == mat_with({(0, 0): Polynomial.const(1)})
    g = grad(VecPoly((y, -x, 0)))
    assert g == mat_with({(0, 1): Polynomial.const(-1), (1, 0): Polynomial.const(1)})
    # oracle: (grad v)_ij = d_i v_j
    g = grad(VecPoly((z * z, 0, 0)))
    assert oracle.same(g, sp.Matrix(3, 3, lambda i, j: sp.diff(oracle.X[2] ** 2 if j == 0 else 0, oracle.X[i])))


def test_def_examples():
    assert def_(rigid_motion((1, 2, 3), (0, 0, 0))).is_zero()
    assert def_(VecPoly((x, 0, 0))) == mat_with({(0, 0): Polynomial.const(1)})
    assert def_(VecPoly((0, x * x, 0))) == mat_with({(0, 1): x, (1, 0): x})


def test_inc_examples():
    v = VecPoly((x ** 3, x * y * z, z * z * y))
    assert inc(def_(v)).is_zero()
    t = SymMatPoly(mat_with({(0, 0): z * z}))
    expected = mat_with({(1, 1): Polynomial.const(-2)})
    assert inc(t) == expected
    assert inc_via_curl(t) == expected
    assert oracle.same(inc(t), oracle.inc_index(oracle.mat(t)))


def test_inc_of_xxT_is_twice_identity():
    # x x^T is not a symmetric gradient; both routes and the index oracle give 2I
    X = position()
    t = SymMatPoly([[X[i] * X[j] for j in range(3)] for i in range(3)])
    assert inc(t) == MatPoly.identity(2)
    assert oracle.same(inc(t), oracle.inc_index(oracle.mat(t)))


def test_div_row_examples():
    assert div_row(MatPoly.identity() * x) == VecPoly((1, 0, 0))
    q = VecPoly((1, 0, 0))
    assert div_row(sym(MatPoly.from_cols([position() * q[j] for j in range(3)]).T)) == VecPoly((2, 0, 0))


def test_mskw_vskw():
    assert mskw(VecPoly((1, 0, 0))) == MatPoly([[0, 0, 0], [0, 0, -1], [0, 1, 0]])
    assert vskw(SymMatPoly([[x, y, 0], [y, z, 0], [0, 0, 1]])).is_zero()
    w = VecPoly((x, y * y, z ** 3))
    assert vskw(mskw(w)) == w


def test_koszul_examples():
    o = (0, 0, 0)
    X = position()
    assert koszul_x_cross(koszul_sym_vx(X, o), o).is_zero()
    assert koszul_dot_x(MatPoly.identity(), o) == X
    t = SymMatPoly([[x, y * z, 1], [y * z, z, x], [1, x, y]])
    assert koszul_dot_x(koszul_x_cross(t, o), o).is_zero()


def test_pi_rm_examples():
    c = (Fraction(1, 4),) * 3
    v = rigid_motion((1, -2, 3), (4, 5, 6), c)
    assert pi_RM(v, c) == v
    assert pi_RM(VecPoly((x * x, y * y, z * z)), (0, 0, 0)).is_zero()
    t = SymMatPoly([[x, y, 1], [y, z * x, 0], [1, 0, y]])
    assert pi_RM(koszul_dot_x(t, c), c).is_zero()


def test_integration_examples():
    assert integrate_simplex(Polynomial.const(1), REFERENCE_TET) == Fraction(1, 6)
    assert integrate_simplex(x, REFERENCE_TET) == Fraction(1, 24)
    assert integrate_simplex(x, Simplex(((0, 0, 0), (1, 0, 0)))) == Fraction(1, 2)
    with pytest.raises(ValueError):
        Simplex(((0, 0, 0), (1, 0, 0), (2, 0, 0)))


@settings(max_examples=15, deadline=None)
@given(polynomials(max_degree=4), st.sampled_from([
    REFERENCE_TET,
    Simplex(((1, 0, 2), (Fraction(1, 2), 3, 1), (0, -1, 1), (2, 2, 0))),
    Simplex(((1, 2, 0), (0, Fraction(1, 3), 1), (2, 1, 1))),
    Simplex(((0, 1, 1), (3, -1, Fraction(1, 2)))),
]))
def test_integration_matches_iterated_integral(p, s):
    assert integrate_simplex(p, s) == oracle.simplex_integral(oracle.to_sympy(p), s.vertices)


@settings(max_examples=30, deadline=None)
@given(vec_polys(max_degree=4))
def test_grad_splits_into_def_and_curl(u):
    # with (i, j) = d_i u_j the identity holds for the transpose
    assert grad(u).T == def_(u) + mskw(curl(u)) * Fraction(1, 2)


@settings(max_examples=30, deadline=None)
@given(mat_polys(max_degree=3), vec_polys(max_degree=3))
def test_bgg_identities(t, u):
    X = position()
    w = vskw(t) * 2
    # curl(t x) - (curl t) x = 2 vskw t with the column-wise curl
    assert curl(dot_right(t, X)) - dot_right(nabla_cross(t), X) == w
    assert trace(nabla_cross(t)) == -div(w)
    # row-wise cross with x
    tcx = MatPoly.from_rows(cross(t.row(i), X) for i in range(3))
    assert trace(tcx) == -sum((w[i] * X[i] for i in range(3)), Polynomial())
    assert vskw(grad(u)) * 2 == -curl(u)


@settings(max_examples=25, deadline=None)
@given(vec_polys(max_degree=4), sym_polys(max_degree=4))
def test_complex_properties(v, t):
    assert inc(def_(v)).is_zero()
    assert div_row(inc(t)).is_zero()
    assert inc(t) == inc_via_curl(t)


@settings(max_examples=20, deadline=None)
@given(sym_polys(max_degree=3))
def test_inc_matches_index_oracle(t):
    assert oracle.same(inc(t), oracle.inc_index(oracle.mat(t)))


@settings(max_examples=25, deadline=None)
@given(polynomials(3), polynomials(3), st.fractions(-3, 3, max_denominator=5))
def test_integration_linear_and_positive(p, q, a):
    K = REFERENCE_TET
    assert integrate_simplex(p + q * a, K) == integrate_simplex(p, K) + a * integrate_simplex(q, K)
    if not p.is_zero():
        assert integrate_simplex(p * p, K) > 0


@given(polynomials(3), polynomials(3), points)
def test_evaluation_is_a_ring_map(p, q, pt):
    assert (p * q)(pt) == p(pt) * q(pt)
    assert (p - q)(pt) == p(pt) - q(pt)


def test_sym_and_skw_split():
    m = MatPoly([[x, y, z], [1, x * y, 0], [z, 2, y]])
    assert sym(m) + skw(m) == m
    assert cross_nabla(m) == -MatPoly.from_rows(curl(m.row(i)) for i in range(3))


def test_polynomial_repr():
    assert repr(x * x * y - 3 * z - 1) == "x^2*y - 3*z - 1"
    assert repr(-x + Fraction(1, 2)) == "-x + 1/2"
    assert repr(Polynomial()) == "0"
