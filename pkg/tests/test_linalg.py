from fractions import Fraction

import flint
from hypothesis import given, settings
from hypothesis import strategies as st

from elascomplex import linalg

entries = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@st.composite
def matrices(draw, max_rows=7, max_cols=7):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    # low-rank products show up often enough to exercise deficient cases
    if draw(st.booleans()):
        inner = draw(st.integers(1, min(r, c)))
        a = [[draw(entries) for _ in range(inner)] for _ in range(r)]
        b = [[draw(entries) for _ in range(c)] for _ in range(inner)]
        return [[sum((a[i][t] * b[t][j] for t in range(inner)), Fraction(0)) for j in range(c)]
                for i in range(r)]
    return [[draw(entries) for _ in range(c)] for _ in range(r)]


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_bareiss_rank_agrees_with_flint(rows):
    assert linalg.bareiss_rank(rows) == linalg.rank(linalg.to_fmpq(rows))


@settings(max_examples=40, deadline=None)
@given(matrices())
def test_nullspace_is_annihilated_and_complete(rows):
    m = linalg.to_fmpq(rows)
    ns = linalg.nullspace(m)
    assert len(ns) == m.ncols() - linalg.rank(m)
    for v in ns:
        assert all(sum((rows[i][j] * v[j] for j in range(len(v))), Fraction(0)) == 0
                   for i in range(len(rows)))


@settings(max_examples=40, deadline=None)
@given(matrices())
def test_pivot_columns_span_column_space(rows):
    m = linalg.to_fmpq(rows)
    piv = linalg.pivot_columns(m)
    assert len(piv) == linalg.rank(m)
    sub = [[row[j] for j in piv] for row in rows]
    assert linalg.bareiss_rank(sub) == len(piv)


def test_round_trip_and_inverse():
    rows = [[Fraction(1, 2), 3], [Fraction(-2, 3), 1]]
    m = linalg.to_fmpq(rows)
    assert linalg.from_fmpq(m) == rows
    assert linalg.from_fmpq(linalg.matmul(m, linalg.inverse(m))) == [[1, 0], [0, 1]]
    assert linalg.is_zero(flint.fmpq_mat(2, 3))
    assert linalg.rank([[0, 0], [0, 0]]) == 0


def test_stack_columns():
    a = linalg.to_fmpq([[1], [0]])
    b = linalg.to_fmpq([[2, 0], [0, 0]])
    s = linalg.stack_columns(a, b)
    assert (s.nrows(), s.ncols()) == (2, 3)
    assert linalg.rank(s) == 1
