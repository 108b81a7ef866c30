import dataclasses
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elascomplex import linalg
from elascomplex.elements import build_element, default_frames
from elascomplex.meshassembly import (
    BUILTIN_MESHES, ConformityError, SparseRationalMatrix, build_global_space, builtin_mesh, dimension_formula,
    global_operator, load_mesh, parse_mesh, verify_discrete_complex,
)


@pytest.mark.parametrize("name, counts", [
    ("reftet", {"V": 4, "E": 6, "F": 4, "T": 1}),
    ("twotet", {"V": 5, "E": 9, "F": 7, "T": 2}),
    ("cube6", {"V": 8, "E": 19, "F": 18, "T": 6}),
])
def test_builtin_counts(name, counts):
    m = builtin_mesh(name)
    assert m.counts == counts
    assert m.euler == 1


def test_global_edge_frame_rule():
    m = builtin_mesh("reftet")
    e = m.edge_frames[(0, 1)]
    assert e.t == (1, 0, 0)
    assert e.n1 == (0, 0, 1) and e.n2 == (0, -1, 0)
    # an edge along the x axis falls through to the second axis
    e = m.edge_frames[(0, 2)]
    assert e.n1 == (0, 0, -1)


def test_shared_face_orientation():
    m = builtin_mesh("twotet")
    face = (1, 2, 3)
    assert m.cells_of[face] == [0, 1]
    f0, f1 = (m.induced_face_frame(c, face) for c in (0, 1))
    assert f0.n == tuple(-c for c in f1.n)
    assert set(f0.edges) == {(b, a) for a, b in f1.edges}
    g = m.face_normals[face]
    assert g in (f0.n, f1.n)


def test_parse_and_load(tmp_path):
    text = "# one cell\nv 0 0 0\nv 1/2 0 0\nv 0 1 0\nv 0 0 1\nt 3 2 1 0\n"
    m = parse_mesh(text)
    assert m.vertices[1] == (Fraction(1, 2), 0, 0)
    assert m.tets == ((0, 1, 2, 3),)
    p = tmp_path / "mesh.txt"
    p.write_text(text)
    assert load_mesh(str(p)) == m
    assert load_mesh(text) == m
    assert load_mesh("reftet") == parse_mesh(BUILTIN_MESHES["reftet"])


@pytest.mark.parametrize("text", [
    "v 0 0\nt 0 1 2 3",
    "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nt 0 1 2 9",
    "v 0 0 0\nv 1 0 0\nv 2 0 0\nv 0 0 1\nt 0 1 2 3",
    "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nv 5 5 5\nt 0 1 2 3",
    "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nv 1 1 1/3\nt 0 1 2 3\nt 0 1 2 4",
    "v 0 0 0\nv 1/0 0 0",
    "",
])
def test_parse_errors(text):
    with pytest.raises(ValueError):
        parse_mesh(text)


def test_unknown_builtin():
    with pytest.raises(ValueError):
        builtin_mesh("torus")


@pytest.mark.parametrize("k", [6, 7, 8])
def test_formulas_single_tet(k):
    # on one cell the spaces are full polynomial spaces
    dims = (3 * comb(k + 4, 3), 6 * comb(k + 3, 3), 6 * comb(k + 1, 3), 3 * comb(k, 3))
    counts = builtin_mesh("reftet").counts
    assert tuple(dimension_formula(s, k, counts) for s in ("V", "inc", "div", "Q")) == dims
    v, i, d, q = dims
    assert 6 - v + i - d + q == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(6, 12), st.integers(1, 40), st.integers(1, 40), st.integers(1, 40), st.integers(1, 40))
def test_formula_alternating_sum_is_euler_weighted(k, V, E, F, T):
    c = {"V": V, "E": E, "F": F, "T": T}
    alt = -dimension_formula("V", k, c) + dimension_formula("inc", k, c) - dimension_formula("div", k, c) \
        + dimension_formula("Q", k, c)
    # each entity type contributes a multiple of its count; only vertices survive with weight -6
    assert alt == -6 * (V - E + F - T)


def test_single_tet_values_k6():
    assert tuple(dimension_formula(s, 6, builtin_mesh("reftet").counts) for s in ("V", "inc", "div", "Q")) \
        == (360, 504, 210, 60)


def test_twotet_inc_formula():
    assert dimension_formula("inc", 6, builtin_mesh("twotet").counts) == 30 * 5 + 45 * 9 + 12 * 7 + 66 * 2 == 771


def test_sparse_matrix_ops():
    a = SparseRationalMatrix(2, 2, {(0, 0): Fraction(1, 2), (1, 0): Fraction(1, 3)})
    b = SparseRationalMatrix(2, 1, {(0, 0): Fraction(2)})
    assert (a @ b).entries == {(0, 0): 1, (1, 0): Fraction(2, 3)}
    assert a.rank == 1 == linalg.rank(a.to_fmpq())
    assert SparseRationalMatrix(2, 2, {}).rank == 0
    with pytest.raises(ValueError):
        b @ a


def test_single_tet_complex():
    m = builtin_mesh("reftet")
    r = verify_discrete_complex(m, 6)
    assert r.passed
    assert r.notes["dims"] == {"V": 360, "inc": 504, "div": 210, "Q": 60}
    assert r.notes["alternating_sum"] == 0
    assert r.slots[0].nullity_out == 6
    assert r.notes["ranks"]["div"] == 60


def test_wrong_pairing_rejected():
    m = builtin_mesh("reftet")
    q = build_global_space(m, "Q", 6)
    with pytest.raises(ValueError):
        global_operator(m, "def", q, q)
    with pytest.raises(ValueError):
        build_global_space(m, "W", 6)
    with pytest.raises(ValueError):
        verify_discrete_complex(m, 5)


def test_mismatched_frames_raise_conformity_error():
    # cell 1 reads its shared edge and face DOFs in frames of a different vertex order
    m = builtin_mesh("twotet")
    V = build_global_space(m, "V", 6)
    cell = m.cell(1)
    bad = build_element("neilan", 6, cell, default_frames(cell, order=(3, 2, 1, 0)))
    V_bad = dataclasses.replace(V, elements=[V.elements[0], bad])
    S = build_global_space(m, "inc", 6)
    global_operator(m, "def", V, S)
    with pytest.raises(ConformityError):
        global_operator(m, "def", V_bad, S)
