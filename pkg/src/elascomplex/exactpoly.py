"""Exact rational polynomials in three variables and the tensor calculus on them.

Row and column conventions follow the solid-mechanics notation: a vector on
the left of a matrix acts column-wise (``b x A``, ``b . A``), a vector on the
right acts row-wise (``A x b``, ``A . b``).  ``nabla`` is a column vector, so
``nabla_cross(A)`` curls each column and ``cross_nabla(A)`` curls each row
with the sign convention ``A x nabla := -(nabla x A^T)^T``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Iterable, Sequence

__all__ = [
    "Polynomial", "VecPoly", "MatPoly", "SymMatPoly", "Simplex",
    "derive", "gradient", "hessian", "grad", "def_", "curl", "div",
    "nabla_cross", "cross_nabla", "curl_rows", "inc", "inc_via_curl",
    "div_row", "div_col", "sym", "skw", "trace", "transpose", "mskw", "vskw",
    "dot", "cross", "outer", "frobenius", "dot_right", "dot_left",
    "cross_left", "cross_right", "ddir", "position", "koszul_dot_x",
    "koszul_x_cross", "koszul_sym_vx", "pi_RM", "rigid_motion",
    "integrate_simplex", "restrict", "monomials", "random_polynomial",
    "random_vec", "random_sym", "random_tet", "REFERENCE_TET", "REFERENCE_TRIANGLE",
]


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


class Polynomial:
    """Sparse polynomial with exact coefficients, keyed by exponent tuples."""

    __slots__ = ("nvars", "terms")

    def __init__(self, terms: dict | None = None, nvars: int = 3):
        if nvars not in (1, 2, 3):
            raise ValueError(f"unsupported number of variables: {nvars}")
        self.nvars = nvars
        clean = {}
        if terms:
            for e, c in terms.items():
                e = tuple(e)
                if len(e) != nvars or any(a < 0 for a in e):
                    raise ValueError(f"bad exponent {e} for {nvars} variables")
                if c:
                    clean[e] = c
        self.terms = clean

    @classmethod
    def _raw(cls, terms: dict, nvars: int) -> "Polynomial":
        p = cls.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        return p

    @classmethod
    def const(cls, c, nvars: int = 3) -> "Polynomial":
        return cls._raw({(0,) * nvars: c} if c else {}, nvars)

    @classmethod
    def var(cls, i: int, nvars: int = 3) -> "Polynomial":
        e = [0] * nvars
        e[i] = 1
        return cls._raw({tuple(e): 1}, nvars)

    @classmethod
    def monomial(cls, exps: Sequence[int], c=1) -> "Polynomial":
        return cls._raw({tuple(exps): c} if c else {}, len(exps))

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return Polynomial.const(other, self.nvars)

    def __add__(self, other):
        other = self._lift(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            s = t.get(e, 0) + c
            if s:
                t[e] = s
            else:
                t.pop(e, None)
        return Polynomial._raw(t, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({e: -c for e, c in self.terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            if not other:
                return Polynomial._raw({}, self.nvars)
            return Polynomial._raw({e: c * other for e, c in self.terms.items()}, self.nvars)
        other = self._lift(other)
        t: dict = {}
        n = self.nvars
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(e1[i] + e2[i] for i in range(n))
                t[e] = t.get(e, 0) + c1 * c2
        return Polynomial._raw({e: c for e, c in t.items() if c}, n)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (Fraction(1) / _q(other))

    def __pow__(self, n: int):
        out = Polynomial.const(1, self.nvars)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == ({(0,) * self.nvars: other} if other else {})
        return NotImplemented

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def derive(self, i: int) -> "Polynomial":
        """Partial derivative in variable ``i`` (0-based)."""
        t = {}
        for e, c in self.terms.items():
            a = e[i]
            if a:
                e2 = e[:i] + (a - 1,) + e[i + 1:]
                t[e2] = c * a
        return Polynomial._raw(t, self.nvars)

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (tuple, list)):
            point = point[0]
        if len(point) != self.nvars:
            raise ValueError("point dimension mismatch")
        pt = [_q(x) for x in point]
        total = Fraction(0)
        for e, c in self.terms.items():
            v = Fraction(c)
            for x, a in zip(pt, e):
                if a:
                    v *= x ** a
            total += v
        return total

    evaluate = __call__

    def coefficient(self, exps) -> Fraction:
        return Fraction(self.terms.get(tuple(exps), 0))

    def __repr__(self):
        if not self.terms:
            return "0"
        names = "xyz" if self.nvars == 3 else ("uw" if self.nvars == 2 else "s")
        out = ""
        for e in sorted(self.terms, key=lambda e: (-sum(e), tuple(-a for a in e))):
            c = self.terms[e]
            mono = "*".join(f"{names[i]}^{a}" if a > 1 else names[i] for i, a in enumerate(e) if a)
            a = abs(c)
            term = f"{a}" if not mono else (mono if a == 1 else f"{a}*{mono}")
            if not out:
                out = term if c > 0 else f"-{term}"
            else:
                out += f" + {term}" if c > 0 else f" - {term}"
        return out


def as_poly(x, nvars: int = 3) -> Polynomial:
    return x if isinstance(x, Polynomial) else Polynomial.const(_q(x) if x else 0, nvars)


def derive(p: Polynomial, axis: int) -> Polynomial:
    """Partial derivative along ``axis`` in 1..nvars."""
    if not 1 <= axis <= p.nvars:
        raise ValueError(f"axis {axis} out of range for {p.nvars} variables")
    return p.derive(axis - 1)


def monomials(degree: int, nvars: int = 3) -> list[tuple[int, ...]]:
    """Exponents of total degree <= degree, graded lexicographic order."""
    out = []
    for d in range(degree + 1):
        level = [e for e in product(range(d + 1), repeat=nvars) if sum(e) == d]
        level.sort(reverse=True)
        out.extend(level)
    return out


class VecPoly:
    """Column vector of three polynomials."""

    __slots__ = ("comps",)

    def __init__(self, comps: Iterable):
        comps = tuple(as_poly(c) for c in comps)
        if len(comps) != 3:
            raise ValueError("VecPoly needs exactly 3 components")
        if len({c.nvars for c in comps}) != 1:
            raise ValueError("components must share the variable count")
        self.comps = comps

    @classmethod
    def zero(cls) -> "VecPoly":
        return cls((0, 0, 0))

    def __getitem__(self, i):
        return self.comps[i]

    def __iter__(self):
        return iter(self.comps)

    def __add__(self, other):
        other = _vec(other)
        return VecPoly(a + b for a, b in zip(self.comps, other.comps))

    __radd__ = __add__

    def __sub__(self, other):
        other = _vec(other)
        return VecPoly(a - b for a, b in zip(self.comps, other.comps))

    def __neg__(self):
        return VecPoly(-a for a in self.comps)

    def __mul__(self, s):
        return VecPoly(a * s for a in self.comps)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (VecPoly, tuple, list)):
            return self.comps == _vec(other).comps
        return NotImplemented

    def __hash__(self):
        return hash(self.comps)

    def is_zero(self) -> bool:
        return not any(self.comps)

    def __call__(self, *point):
        return tuple(c(*point) for c in self.comps)

    @property
    def degree(self) -> int:
        return max(c.degree for c in self.comps)

    def __repr__(self):
        return f"VecPoly({', '.join(map(repr, self.comps))})"


class MatPoly:
    """3x3 matrix of polynomials, ``entries[i][j]`` is row i, column j."""

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[Iterable]):
        rows = tuple(tuple(as_poly(x) for x in r) for r in entries)
        if len(rows) != 3 or any(len(r) != 3 for r in rows):
            raise ValueError("MatPoly needs 3x3 entries")
        if len({x.nvars for r in rows for x in r}) != 1:
            raise ValueError("entries must share the variable count")
        self.entries = rows

    @classmethod
    def zero(cls):
        return cls([[0] * 3 for _ in range(3)])

    @classmethod
    def identity(cls, scale=1):
        return cls([[scale if i == j else 0 for j in range(3)] for i in range(3)])

    def __getitem__(self, ij):
        if isinstance(ij, tuple):
            return self.entries[ij[0]][ij[1]]
        return self.entries[ij]

    def row(self, i) -> VecPoly:
        return VecPoly(self.entries[i])

    def col(self, j) -> VecPoly:
        return VecPoly(self.entries[i][j] for i in range(3))

    @classmethod
    def from_cols(cls, cols):
        cols = [_vec(c) for c in cols]
        return MatPoly([[cols[j][i] for j in range(3)] for i in range(3)])

    @classmethod
    def from_rows(cls, rows):
        return MatPoly([_vec(r).comps for r in rows])

    @property
    def T(self):
        return MatPoly([[self.entries[j][i] for j in range(3)] for i in range(3)])

    def _zip(self, other, f):
        other = _mat(other)
        return MatPoly([[f(self.entries[i][j], other.entries[i][j]) for j in range(3)] for i in range(3)])

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return MatPoly([[-x for x in r] for r in self.entries])

    def __mul__(self, s):
        return MatPoly([[x * s for x in r] for r in self.entries])

    __rmul__ = __mul__

    def __matmul__(self, other):
        other = _mat(other)
        return MatPoly([[sum((self.entries[i][l] * other.entries[l][j] for l in range(3)), as_poly(0, self.nvars))
                         for j in range(3)] for i in range(3)])

    def __rmatmul__(self, other):
        return _mat(other) @ self

    def __eq__(self, other):
        if isinstance(other, MatPoly):
            return self.entries == other.entries
        if isinstance(other, (tuple, list)):
            return self.entries == _mat(other).entries
        return NotImplemented

    def __hash__(self):
        return hash(self.entries)

    @property
    def nvars(self):
        return self.entries[0][0].nvars

    def is_zero(self) -> bool:
        return not any(x for r in self.entries for x in r)

    def is_symmetric(self) -> bool:
        e = self.entries
        return e[0][1] == e[1][0] and e[0][2] == e[2][0] and e[1][2] == e[2][1]

    def __call__(self, *point):
        return tuple(tuple(x(*point) for x in r) for r in self.entries)

    @property
    def degree(self) -> int:
        return max(x.degree for r in self.entries for x in r)

    def __repr__(self):
        return "MatPoly(" + "; ".join(", ".join(map(repr, r)) for r in self.entries) + ")"


class SymMatPoly(MatPoly):
    """Symmetric 3x3 polynomial matrix; symmetry is checked on construction."""

    __slots__ = ()

    def __init__(self, entries):
        if isinstance(entries, MatPoly):
            entries = entries.entries
        super().__init__(entries)
        if not self.is_symmetric():
            raise ValueError("matrix is not symmetric")


def _vec(v) -> VecPoly:
    return v if isinstance(v, VecPoly) else VecPoly(v)


def _mat(m) -> MatPoly:
    return m if isinstance(m, MatPoly) else MatPoly(m)


# ---------------------------------------------------------------- vector algebra

def dot(u, v) -> Polynomial:
    u, v = _vec(u), _vec(v)
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def cross(u, v) -> VecPoly:
    u, v = _vec(u), _vec(v)
    return VecPoly((u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]))


def outer(u, v) -> MatPoly:
    u, v = _vec(u), _vec(v)
    return MatPoly([[u[i] * v[j] for j in range(3)] for i in range(3)])


def frobenius(a, b) -> Polynomial:
    a, b = _mat(a), _mat(b)
    out = as_poly(0, a.nvars)
    for i in range(3):
        for j in range(3):
            if a.entries[i][j] and b.entries[i][j]:
                out = out + a.entries[i][j] * b.entries[i][j]
    return out


def transpose(m) -> MatPoly:
    return _mat(m).T


def sym(m) -> SymMatPoly:
    m = _mat(m)
    return SymMatPoly((m + m.T) * Fraction(1, 2))


def skw(m) -> MatPoly:
    m = _mat(m)
    return (m - m.T) * Fraction(1, 2)


def trace(m) -> Polynomial:
    m = _mat(m)
    return m[0, 0] + m[1, 1] + m[2, 2]


def mskw(w) -> MatPoly:
    w = _vec(w)
    z = as_poly(0, w[0].nvars)
    return MatPoly([[z, -w[2], w[1]], [w[2], z, -w[0]], [-w[1], w[0], z]])


def vskw(m) -> VecPoly:
    s = skw(m)
    return VecPoly((s[2, 1], s[0, 2], s[1, 0]))


def dot_right(a, b) -> VecPoly:
    """``A . b``: row-wise dot product, i.e. the matrix-vector product."""
    a, b = _mat(a), _vec(b)
    return VecPoly(dot(a.row(i), b) for i in range(3))


def dot_left(b, a) -> VecPoly:
    """``b . A``: column-wise dot product, the row vector ``b^T A``."""
    a, b = _mat(a), _vec(b)
    return VecPoly(dot(b, a.col(j)) for j in range(3))


def cross_left(b, a) -> MatPoly:
    """``b x A``: cross ``b`` with every column of ``A``."""
    a, b = _mat(a), _vec(b)
    return MatPoly.from_cols(cross(b, a.col(j)) for j in range(3))


def cross_right(a, b) -> MatPoly:
    """``A x b``: cross every row of ``A`` with ``b``."""
    a, b = _mat(a), _vec(b)
    return MatPoly.from_rows(cross(a.row(i), b) for i in range(3))


# ---------------------------------------------------------------- differential operators

def gradient(p: Polynomial) -> VecPoly:
    return VecPoly(p.derive(i) for i in range(3))


def hessian(p: Polynomial) -> SymMatPoly:
    g = [p.derive(i) for i in range(3)]
    return SymMatPoly([[g[i].derive(j) for j in range(3)] for i in range(3)])


def ddir(f, d):
    """Directional derivative ``(d . nabla) f`` for scalar, vector or matrix ``f``."""
    d = [_q(x) for x in d]
    if isinstance(f, Polynomial):
        out = as_poly(0, f.nvars)
        for i in range(3):
            if d[i]:
                out = out + f.derive(i) * d[i]
        return out
    if isinstance(f, MatPoly):
        return MatPoly([[ddir(x, d) for x in r] for r in f.entries])
    return VecPoly(ddir(x, d) for x in _vec(f))


def grad(v) -> MatPoly:
    """``nabla v``: entry (i, j) is ``d_i v_j``."""
    v = _vec(v)
    return MatPoly([[v[j].derive(i) for j in range(3)] for i in range(3)])


def def_(v) -> SymMatPoly:
    """Symmetric gradient."""
    g = grad(v)
    return SymMatPoly((g + g.T) * Fraction(1, 2))


def curl(v) -> VecPoly:
    v = _vec(v)
    return VecPoly((v[2].derive(1) - v[1].derive(2),
                    v[0].derive(2) - v[2].derive(0),
                    v[1].derive(0) - v[0].derive(1)))


def div(v) -> Polynomial:
    v = _vec(v)
    return v[0].derive(0) + v[1].derive(1) + v[2].derive(2)


def nabla_cross(a) -> MatPoly:
    """Column-wise curl ``nabla x A``."""
    a = _mat(a)
    return MatPoly.from_cols(curl(a.col(j)) for j in range(3))


def cross_nabla(a) -> MatPoly:
    """Row-wise ``A x nabla := -(nabla x A^T)^T``."""
    a = _mat(a)
    return -MatPoly.from_rows(curl(a.row(i)) for i in range(3))


def curl_rows(a) -> MatPoly:
    """Letter curl ``(nabla x A^T)^T``: curl applied to every row."""
    a = _mat(a)
    return MatPoly.from_rows(curl(a.row(i)) for i in range(3))


def inc(t) -> SymMatPoly:
    """Incompatibility ``nabla x t x nabla``."""
    r = cross_nabla(nabla_cross(t))
    if not r.is_symmetric():
        raise ArithmeticError("inc produced a non-symmetric result")
    return SymMatPoly(r)


def inc_via_curl(t) -> MatPoly:
    """``-curl((curl t)^T)`` computed with the row-wise curl only."""
    return -curl_rows(curl_rows(t).T)


def div_row(m) -> VecPoly:
    """``A . nabla``: divergence of every row."""
    m = _mat(m)
    return VecPoly(div(m.row(i)) for i in range(3))


def div_col(m) -> VecPoly:
    """``nabla . A``: divergence of every column."""
    m = _mat(m)
    return VecPoly(div(m.col(j)) for j in range(3))


# ---------------------------------------------------------------- Koszul operators

def position(c=(0, 0, 0)) -> VecPoly:
    return VecPoly(Polynomial.var(i) - _q(c[i]) for i in range(3))


def koszul_dot_x(t, c=(0, 0, 0)) -> VecPoly:
    return dot_right(t, position(c))


def koszul_x_cross(t, c=(0, 0, 0)) -> SymMatPoly:
    x = position(c)
    r = cross_right(cross_left(x, t), x)
    if not r.is_symmetric():
        raise ArithmeticError("x cross t cross x is not symmetric")
    return SymMatPoly(r)


def koszul_sym_vx(v, c=(0, 0, 0)) -> SymMatPoly:
    return sym(outer(v, position(c)))


def rigid_motion(a, b, c=(0, 0, 0)) -> VecPoly:
    """``a x (x - c) + b``."""
    return cross(tuple(_q(t) for t in a), position(c)) + VecPoly(tuple(_q(t) for t in b))


def pi_RM(v, c=(0, 0, 0)) -> VecPoly:
    """Projection onto rigid motions: value and half the curl at ``c``."""
    v = _vec(v)
    c = tuple(_q(t) for t in c)
    b = v(c)
    a = tuple(x / 2 for x in curl(v)(c))
    return rigid_motion(a, b, c)


# ---------------------------------------------------------------- simplices and integration

Point = tuple


def _point(p) -> Point:
    p = tuple(_q(x) for x in p)
    if len(p) != 3:
        raise ValueError("points live in R^3")
    return p


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _vcross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _vdot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _det3(a, b, c):
    return _vdot(a, _vcross(b, c))


@dataclass(frozen=True)
class Simplex:
    """Segment, triangle or tetrahedron with rational vertices in R^3."""

    vertices: tuple
    center: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        verts = tuple(_point(v) for v in self.vertices)
        if not 2 <= len(verts) <= 4:
            raise ValueError("a simplex has 2, 3 or 4 vertices")
        object.__setattr__(self, "vertices", verts)
        n = len(verts)
        c = self.center
        c = tuple(sum(v[i] for v in verts) / n for i in range(3)) if c is None else _point(c)
        object.__setattr__(self, "center", c)
        if self.measure_squared == 0:
            raise ValueError("degenerate simplex")

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    @property
    def edges(self):
        v0 = self.vertices[0]
        return tuple(_sub(v, v0) for v in self.vertices[1:])

    @property
    def gram_det(self) -> Fraction:
        e = self.edges
        g = [[_vdot(a, b) for b in e] for a in e]
        if len(e) == 1:
            return g[0][0]
        if len(e) == 2:
            return g[0][0] * g[1][1] - g[0][1] * g[1][0]
        return _det3(*e) ** 2

    @property
    def measure_squared(self) -> Fraction:
        """Squared length, area or volume."""
        return self.gram_det / factorial(self.dim) ** 2

    @property
    def signed_volume6(self) -> Fraction:
        if self.dim != 3:
            raise ValueError("signed volume only for tetrahedra")
        return _det3(*self.edges)

    def barycentric(self) -> list[Polynomial]:
        """Barycentric coordinates as affine polynomials in (x, y, z).

        For a triangle or segment the coordinates are extended so that they are
        constant along directions orthogonal to the simplex.
        """
        e = self.edges
        d = len(e)
        # solve G a = E^T (x - v0): the extension is constant in orthogonal directions
        g = [[_vdot(a, b) for b in e] for a in e]
        inv = _inverse(g)
        x = position(self.vertices[0])
        proj = [dot(a, x) for a in e]
        lam = [sum((proj[j] * inv[i][j] for j in range(d)), as_poly(0)) for i in range(d)]
        return [1 - sum(lam, as_poly(0))] + lam

    def sub(self, idx) -> "Simplex":
        return Simplex(tuple(self.vertices[i] for i in idx))


def _inverse(g):
    n = len(g)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(g)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


REFERENCE_TET = Simplex(((0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)))
REFERENCE_TRIANGLE = Simplex(((0, 0, 0), (1, 0, 0), (0, 1, 0)))


@lru_cache(maxsize=None)
def _affine_power(s: Simplex, axis: int, n: int) -> Polynomial:
    d = s.dim
    if n == 0:
        return Polynomial.const(1, d)
    if n == 1:
        t = {(0,) * d: s.vertices[0][axis]}
        for i, e in enumerate(s.edges):
            if e[axis]:
                k = [0] * d
                k[i] = 1
                t[tuple(k)] = e[axis]
        return Polynomial(t, d)
    h = n // 2
    return _affine_power(s, axis, h) * _affine_power(s, axis, n - h)


@lru_cache(maxsize=None)
def _restrict_monomial(exps: tuple, s: Simplex) -> Polynomial:
    out = Polynomial.const(1, s.dim)
    for axis, a in enumerate(exps):
        if a:
            out = out * _affine_power(s, axis, a)
    return out


def restrict(p: Polynomial, s: Simplex) -> Polynomial:
    """Pull ``p`` back to the reference simplex: p(v0 + sum_i t_i (v_i - v0))."""
    if p.nvars != 3:
        raise ValueError("restriction expects a polynomial in (x, y, z)")
    out: dict = {}
    for e, c in p.terms.items():
        for e2, c2 in _restrict_monomial(e, s).terms.items():
            out[e2] = out.get(e2, 0) + c * c2
    return Polynomial({k: v for k, v in out.items() if v}, s.dim)


@lru_cache(maxsize=None)
def _ref_integral(exps: tuple) -> Fraction:
    num = 1
    for a in exps:
        num *= factorial(a)
    return Fraction(num, factorial(sum(exps) + len(exps)))


def integrate_reference(q: Polynomial) -> Fraction:
    """Integral over the reference simplex of dimension ``q.nvars``."""
    return sum((c * _ref_integral(e) for e, c in q.terms.items()), Fraction(0))


@lru_cache(maxsize=None)
def _monomial_value(exps: tuple, s: Simplex) -> Fraction:
    return _scale(s) * integrate_reference(_restrict_monomial(exps, s))


@lru_cache(maxsize=None)
def _scale(s: Simplex) -> Fraction:
    if s.dim == 3:
        return abs(s.signed_volume6)
    return Fraction(factorial(s.dim))


def integrate_simplex(p: Polynomial, s: Simplex) -> Fraction:
    """Exact integral over a tetrahedron; for segments and triangles the mean value.

    Lengths and areas are square roots of rationals in general, so the lower
    dimensional integrals are returned divided by the measure of ``s``
    (``s.measure_squared`` recovers it where needed).
    """
    if p.nvars != 3:
        raise ValueError("integrand must be a polynomial in (x, y, z)")
    return sum((c * _monomial_value(e, s) for e, c in p.terms.items()), Fraction(0))


# ---------------------------------------------------------------- random inputs

def random_polynomial(rng: random.Random, degree: int, nvars: int = 3, density: float = 0.6,
                      bound: int = 5) -> Polynomial:
    terms = {}
    for e in monomials(degree, nvars):
        if rng.random() < density:
            terms[e] = Fraction(rng.randint(-bound, bound), rng.randint(1, 3))
    return Polynomial(terms, nvars)


def random_vec(rng: random.Random, degree: int, **kw) -> VecPoly:
    return VecPoly(random_polynomial(rng, degree, **kw) for _ in range(3))


def random_sym(rng: random.Random, degree: int, **kw) -> SymMatPoly:
    e = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(i, 3):
            e[i][j] = e[j][i] = random_polynomial(rng, degree, **kw)
    return SymMatPoly(e)


def random_tet(rng: random.Random, bound: int = 3) -> Simplex:
    """Tetrahedron with small random rational vertices and nonzero volume."""
    while True:
        verts = [tuple(Fraction(rng.randint(-bound * 2, bound * 2), rng.randint(1, 2)) for _ in range(3))
                 for _ in range(4)]
        e = [tuple(a - b for a, b in zip(v, verts[0])) for v in verts[1:]]
        if _det3(*e) != 0:
            return Simplex(tuple(verts))
