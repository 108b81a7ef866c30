"""Exact linear algebra over the rationals.

python-flint does the heavy lifting.  ``bareiss_rank`` is an independent
pure-Python fraction-free elimination used to cross-check flint in tests.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import flint

__all__ = [
    "to_fmpq", "from_fmpq", "rank", "rref", "nullspace", "pivot_columns",
    "column_basis", "inverse", "solve", "matmul", "bareiss_rank", "is_zero",
    "stack_columns", "integer_rank",
]


def to_fmpq(rows: Sequence[Sequence], ncols: int | None = None) -> flint.fmpq_mat:
    """Build an ``fmpq_mat`` from a list of rows of ints or Fractions."""
    if isinstance(rows, flint.fmpq_mat):
        return rows
    if isinstance(rows, flint.fmpz_mat):
        return flint.fmpq_mat(rows)
    nrows = len(rows)
    if ncols is None:
        ncols = len(rows[0]) if nrows else 0
    m = flint.fmpq_mat(nrows, ncols)
    for i, row in enumerate(rows):
        for j, v in enumerate(row):
            if v:
                if isinstance(v, Fraction):
                    m[i, j] = flint.fmpq(v.numerator, v.denominator)
                else:
                    m[i, j] = v
    return m


def from_fmpq(m: flint.fmpq_mat) -> list[list[Fraction]]:
    out = []
    for i in range(m.nrows()):
        out.append([Fraction(int(m[i, j].p), int(m[i, j].q)) for j in range(m.ncols())])
    return out


def _fmpq_to_fraction(q) -> Fraction:
    return Fraction(int(q.p), int(q.q))


def integer_rank(m: flint.fmpq_mat) -> int:
    """Rank computed after clearing row denominators (fraction-free in flint)."""
    if m.nrows() == 0 or m.ncols() == 0:
        return 0
    num, _den = m.numer_denom()
    return num.rank()


def rank(m) -> int:
    m = to_fmpq(m)
    if m.nrows() == 0 or m.ncols() == 0:
        return 0
    return integer_rank(m)


def rref(m) -> tuple[flint.fmpq_mat, int]:
    m = to_fmpq(m)
    if m.nrows() == 0 or m.ncols() == 0:
        return m, 0
    return m.rref()


def pivot_columns(m) -> list[int]:
    r, rk = rref(m)
    piv = []
    j = 0
    for i in range(rk):
        while r[i, j] == 0:
            j += 1
        piv.append(j)
        j += 1
    return piv


def column_basis(m) -> list[int]:
    """Indices of a maximal independent set of columns, the leftmost ones."""
    return pivot_columns(m)


def nullspace(m) -> list[list[Fraction]]:
    """Basis of the right kernel as a list of vectors."""
    m = to_fmpq(m)
    n = m.ncols()
    if m.nrows() == 0:
        return [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    r, rk = m.rref()
    piv = []
    j = 0
    for i in range(rk):
        while r[i, j] == 0:
            j += 1
        piv.append(j)
        j += 1
    free = [c for c in range(n) if c not in set(piv)]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for i, p in enumerate(piv):
            v[p] = -_fmpq_to_fraction(r[i, f])
        basis.append(v)
    return basis


def inverse(m) -> flint.fmpq_mat:
    return to_fmpq(m).inv()


def solve(a, b) -> flint.fmpq_mat:
    return to_fmpq(a).solve(to_fmpq(b))


def matmul(a, b) -> flint.fmpq_mat:
    return to_fmpq(a) * to_fmpq(b)


def is_zero(m) -> bool:
    m = to_fmpq(m)
    return all(m[i, j] == 0 for i in range(m.nrows()) for j in range(m.ncols()))


def stack_columns(*mats) -> flint.fmpq_mat:
    """Concatenate matrices with equal row counts side by side."""
    mats = [to_fmpq(x) for x in mats]
    nrows = mats[0].nrows()
    ncols = sum(x.ncols() for x in mats)
    out = flint.fmpq_mat(nrows, ncols)
    off = 0
    for x in mats:
        if x.nrows() != nrows:
            raise ValueError("row counts differ")
        for i in range(nrows):
            for j in range(x.ncols()):
                v = x[i, j]
                if v != 0:
                    out[i, off + j] = v
        off += x.ncols()
    return out


def bareiss_rank(rows: Sequence[Sequence]) -> int:
    """Rank by fraction-free Gaussian elimination on integer-scaled rows."""
    mat = []
    for row in rows:
        row = [Fraction(v) for v in row]
        den = 1
        for v in row:
            den = den * v.denominator // _gcd(den, v.denominator)
        mat.append([int(v * den) for v in row])
    if not mat:
        return 0
    nrows, ncols = len(mat), len(mat[0])
    r = 0
    prev = 1
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if mat[i][c] != 0), None)
        if p is None:
            continue
        mat[r], mat[p] = mat[p], mat[r]
        piv = mat[r][c]
        for i in range(r + 1, nrows):
            a = mat[i][c]
            mat[i] = [(piv * mat[i][j] - a * mat[r][j]) // prev if j > c else 0 for j in range(ncols)]
        prev = piv
        r += 1
        if r == nrows:
            break
    return r


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a
