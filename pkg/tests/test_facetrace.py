import random

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from strategies import polynomials, sym_polys, vec_polys
from elascomplex import facetrace
from elascomplex.exactpoly import (
    REFERENCE_TET, MatPoly, Polynomial, Simplex, SymMatPoly, VecPoly, def_, dot, dot_right, outer, random_sym, random_tet, restrict,
    rigid_motion,
)
from elascomplex.facetrace import (
    TRACE_IDENTITIES, EdgeFrame, FaceFrame, N_tensors, bubble_basis, greens_divdiv_residual, greens_inc_residual,
    tet_faces, tr1, tr2, tr2_forms, trace_commutation_check, verify_bubble_complex,
)
from elascomplex import linalg

x, y, z = (Polynomial.var(i) for i in range(3))
RANDOM_TET = random_tet(random.Random(7))
# a slanted face whose normal (-3, -4, 0) has rational length 5
SLANTED = FaceFrame(((0, 0, 0), (4, -3, 0), (0, 0, 1)), (-3, -4, 0))


def vanishes_on(obj, s):
    entries = [obj] if isinstance(obj, Polynomial) else list(obj.comps) if isinstance(obj, VecPoly) else \
        [e for row in obj.entries for e in row]
    return all(restrict(p, s).is_zero() for p in entries)


def bottom_face():
    return next(f for f in tet_faces(REFERENCE_TET) if all(v[2] == 0 for v in f.vertices))


def test_tet_faces_are_outward_and_valid():
    for K in (REFERENCE_TET, RANDOM_TET):
        for i, f in enumerate(tet_faces(K)):
            assert f.check()
            opp = K.vertices[i]
            a = f.vertices[0]
            assert sum(n * (o - p) for n, o, p in zip(f.n, opp, a)) < 0
    assert bottom_face().n == (0, 0, -1)


def test_flipped_frame_reverses_edges():
    f = bottom_face()
    g = f.flipped()
    assert g.n == (0, 0, 1)
    assert set(g.edges) == {(e, s) for s, e in f.edges}
    assert f.sign(0, f.edges[0][1]) == 1 and f.sign(0, f.edges[0][0]) == -1
    with pytest.raises(ValueError):
        FaceFrame(f.vertices, (1, 0, 0))


def test_edge_frame_rule():
    e = EdgeFrame((0, 0, 0), (1, 0, 0))
    assert e.n1 == (0, 0, 1) and e.n2 == (0, -1, 0)
    e = EdgeFrame((0, 0, 0), (0, 2, 1))
    assert e.n1 == (0, 1, -2)
    with pytest.raises(ValueError):
        EdgeFrame((1, 1, 1), (1, 1, 1))


def test_tr1_examples():
    f = bottom_face()
    n = VecPoly(f.n)
    assert tr1(SymMatPoly(outer(n, n)), f).is_zero()
    got = tr1(MatPoly.identity(), SLANTED)
    assert got == SLANTED.P * (-SLANTED.nn)
    assert oracle.same(got, oracle.tr1_index(sp.eye(3), [sp.Integer(c) for c in SLANTED.n]))


def test_tr1_kills_N_tensors_on_every_face():
    lam = REFERENCE_TET.barycentric()
    for (i, j), N in N_tensors(REFERENCE_TET).items():
        t = N * (lam[i] * lam[j])
        for f in tet_faces(REFERENCE_TET):
            assert vanishes_on(tr1(t, f), f.simplex)


def test_N_tensors_independent():
    Ns = list(N_tensors(RANDOM_TET).values())
    rows = [[N[i, j].terms.get((0, 0, 0), 0) for i in range(3) for j in range(i, 3)] for N in Ns]
    assert linalg.bareiss_rank(rows) == 6


def test_tr2_examples():
    f = bottom_face()
    assert tr2(SymMatPoly(MatPoly.identity() * 3), f).is_zero()
    t = SymMatPoly([[z * z, 0, 0], [0, 0, 0], [0, 0, 0]])
    assert vanishes_on(tr2(t, f), f.simplex)
    assert vanishes_on(tr2(def_(VecPoly((x * x, y * y, z * z))), f), f.simplex)


@settings(max_examples=20, deadline=None)
@given(sym_polys(max_degree=3))
def test_trace_parity_and_tangency(t):
    f = SLANTED
    g = f.flipped()
    P = f.P
    assert tr1(t, g) == tr1(t, f)
    assert tr2(t, g) == -tr2(t, f)
    for a in (tr1(t, f), tr2(t, f)):
        assert P @ a @ P == a
    t1 = tr1(t, f)
    assert oracle.same(t1, oracle.tr1_index(oracle.mat(t), [sp.Integer(c) for c in f.n]))


@settings(max_examples=20, deadline=None)
@given(sym_polys(max_degree=3))
def test_tr2_forms_agree(t):
    for f in (SLANTED, tet_faces(RANDOM_TET)[2]):
        forms = tr2_forms(t, f)
        assert all(v == forms["primary"] for v in forms.values())
        assert forms["primary"].T == forms["primary"]


@settings(max_examples=20, deadline=None)
@given(sym_polys(max_degree=4), sym_polys(max_degree=4), st.sampled_from([REFERENCE_TET, RANDOM_TET]))
def test_inc_green_identity(s, t, K):
    assert greens_inc_residual(s, t, K) == 0


def test_inc_green_examples():
    rng = random.Random(3)
    s = random_sym(rng, 3)
    assert greens_inc_residual(s, s) == 0
    assert greens_inc_residual(random_sym(rng, 2), def_(VecPoly((x ** 3, x * y * z, y * y))), RANDOM_TET) == 0


def test_inc_green_detects_a_wrong_trace(monkeypatch):
    # non-vacuity: perturbing the second trace must break the identity
    rng = random.Random(5)
    s, t = random_sym(rng, 3), random_sym(rng, 3)
    real = facetrace.tr2
    monkeypatch.setattr(facetrace, "tr2", lambda a, f: real(a, f) * 2)
    assert greens_inc_residual(s, t) != 0


def _tangential(t, f):
    return SymMatPoly(f.P @ t @ f.P)


@settings(max_examples=20, deadline=None)
@given(sym_polys(max_degree=3), polynomials(max_degree=3))
def test_divdiv_green_identity(t, v):
    for f in (FaceFrame.of(Simplex(((0, 0, 0), (1, 0, 0), (0, 1, 0)))), SLANTED):
        assert greens_divdiv_residual(_tangential(t, f), v, f) == 0


def test_divdiv_green_examples():
    f = FaceFrame.of(Simplex(((0, 0, 0), (1, 0, 0), (0, 1, 0))))
    t = _tangential(SymMatPoly(MatPoly.identity() * 2), f)
    assert greens_divdiv_residual(t, x + 3 * y) == 0
    with pytest.raises(ValueError):
        greens_divdiv_residual(t, x, FaceFrame(((0, 0, 0), (1, 0, 0), (0, 1, 1)), (0, -1, 1)))


@pytest.mark.parametrize("which", TRACE_IDENTITIES)
@pytest.mark.parametrize("unrestricted", [False, True])
def test_trace_identities_random(which, unrestricted):
    rng = random.Random(11)
    faces = tet_faces(RANDOM_TET) + [SLANTED]
    for _ in range(6):
        f = rng.choice(faces)
        inp = VecPoly(random_sym(rng, 4)[0, i] for i in range(3)) if which.startswith("def") else random_sym(rng, 4)
        assert trace_commutation_check(which, inp, f, edge=rng.randrange(3),
                                       restrict_to_entity=not unrestricted) == 0


@settings(max_examples=15, deadline=None)
@given(vec_polys(max_degree=3), sym_polys(max_degree=3))
def test_trace_identities_property(v, t):
    f = tet_faces(REFERENCE_TET)[0]
    assert trace_commutation_check("defTr1", v, f) == 0
    assert trace_commutation_check("defTr2", v, f) == 0
    assert trace_commutation_check("incTr1", t, f) == 0
    assert trace_commutation_check("edgeTr2", t, f, edge=1) == 0


def test_trace_identity_examples():
    f = tet_faces(REFERENCE_TET)[1]
    rm = rigid_motion((1, 2, 3), (4, 5, 6))
    assert trace_commutation_check("defTr1", rm, f) == 0
    assert tr1(def_(rm), f).is_zero()
    # a tensor with zero tangential-tangential component along the edge
    N = VecPoly(f.n_e(0))
    t = SymMatPoly(outer(N, N) * x)
    assert trace_commutation_check("edgeTT", t, f, edge=0) == 0
    # t_e . t . t_e = 0 here, so the normal-normal value of tr1 on the edge vanishes
    assert vanishes_on(dot(N, dot_right(tr1(t, f), N)), Simplex(f.edges[0]))
    with pytest.raises(ValueError):
        trace_commutation_check("nope", t, f)


@pytest.mark.parametrize("k", [4, 5])
def test_tangential_bubble_dims(k):
    tt = bubble_basis("tt", k)
    assert tt.dim == k * (k * k - 1)
    assert tt.cross_check["explicit_rank"] == tt.dim and tt.cross_check["explicit_in_kernel"]
    full = bubble_basis("incFull", k)
    assert full.dim == k ** 3 - 6 * k * k + 11 * k
    assert full.cross_check["vanishes_on_edges"]


def test_bubbles_vanish_on_faces():
    b = bubble_basis("incFull", 4, RANDOM_TET)
    for f in tet_faces(RANDOM_TET):
        for e in b.basis:
            assert vanishes_on(tr1(e, f), f.simplex) and vanishes_on(tr2(e, f), f.simplex)


def test_normal_bubble_dims():
    assert bubble_basis("divNormal", 4).dim == 60
    assert bubble_basis("divNormal", 2).dim == 6


def test_bubble_errors():
    with pytest.raises(ValueError):
        bubble_basis("tt", 3)
    with pytest.raises(ValueError):
        bubble_basis("other", 4)
    with pytest.raises(ValueError):
        verify_bubble_complex("hessian2D", 4)


def test_elasticity_bubble_complex_k4():
    r = verify_bubble_complex("elasticity", 4)
    assert r.passed
    assert r.notes["dims"] == [12, 12, 6, 6]


@pytest.mark.parametrize("name, k", [("divdiv2D", 3), ("divdiv2D", 5), ("hessian2D", 5), ("hessian2D", 6)])
def test_planar_bubble_complexes(name, k):
    r = verify_bubble_complex(name, k)
    assert r.passed, r.as_dict()
