"""Face and edge frames, the two traces of the inc operator, Green's
identities, trace and edge identities, and bubble spaces.

Frames are rational and unnormalized.  Every identity below is homogeneous
in the lengths of the frame vectors, so each check rescales both sides by
the same power of ``|n|`` and ``|t|`` and compares exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations
from math import isqrt

import flint

from . import linalg
from .exactpoly import (
    REFERENCE_TET, REFERENCE_TRIANGLE, MatPoly, Polynomial, Simplex, SymMatPoly, VecPoly, as_poly, cross,
    cross_left, cross_nabla, cross_right, ddir, def_, div, div_row, dot, dot_left, dot_right, frobenius, grad,
    gradient, inc, integrate_simplex, nabla_cross, outer, restrict, sym, transpose,
)
from .polyspaces import (
    ExactnessReport, FacePlane, OperatorMatrix, SlotReport, SpaceBasis, SpaceSpec, build_basis,
    flatten, operator_matrix, rm_basis,
)

__all__ = [
    "FaceFrame", "EdgeFrame", "BubbleBasis", "tet_faces", "tr1", "tr2", "tr2_forms",
    "greens_inc_residual", "greens_divdiv_residual", "trace_commutation_check",
    "bubble_basis", "verify_bubble_complex", "N_tensors", "TRACE_IDENTITIES", "BUBBLE_KINDS",
]


def _v(p):
    return tuple(Fraction(x) for x in p)


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _neg(a):
    return tuple(-x for x in a)


def _proj(n):
    nn = _dot(n, n)
    return MatPoly([[Fraction(int(i == j)) - n[i] * n[j] / nn for j in range(3)] for i in range(3)])


@dataclass(frozen=True)
class EdgeFrame:
    """Edge from ``start`` to ``end`` with tangent ``t = end - start`` and normals.

    The normals follow the global rule: ``n1 = t x a`` with ``a`` the first
    coordinate axis not parallel to ``t``, and ``n2 = t x n1``.
    """

    start: tuple
    end: tuple

    def __post_init__(self):
        object.__setattr__(self, "start", _v(self.start))
        object.__setattr__(self, "end", _v(self.end))
        if self.start == self.end:
            raise ValueError("degenerate edge")

    @property
    def t(self):
        return _sub(self.end, self.start)

    @cached_property
    def n1(self):
        t = self.t
        for i in range(3):
            a = tuple(Fraction(int(i == j)) for j in range(3))
            c = _cross(t, a)
            if any(c):
                return c
        raise AssertionError("unreachable")

    @cached_property
    def n2(self):
        return _cross(self.t, self.n1)

    @property
    def simplex(self) -> Simplex:
        return Simplex((self.start, self.end))


@dataclass(frozen=True)
class FaceFrame:
    """Triangle with normal ``n``; edges oriented counterclockwise about ``n``.

    ``edges`` lists ``(start, end)`` vertex pairs; ``t_{F,e} = end - start``
    and ``n_{F,e} = t_{F,e} x n`` points out of the triangle.
    """

    vertices: tuple
    n: tuple

    def __post_init__(self):
        verts = tuple(_v(p) for p in self.vertices)
        n = _v(self.n)
        a, b, c = verts
        nat = _cross(_sub(b, a), _sub(c, a))
        if _dot(nat, n) == 0 or any(_cross(nat, n)):
            raise ValueError("normal is not perpendicular to the triangle")
        if _dot(nat, n) < 0:
            verts = (a, c, b)
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "n", n)

    @classmethod
    def of(cls, triangle: Simplex, n=None) -> "FaceFrame":
        a, b, c = triangle.vertices
        if n is None:
            n = _cross(_sub(b, a), _sub(c, a))
        return cls(triangle.vertices, n)

    def flipped(self) -> "FaceFrame":
        return FaceFrame(self.vertices, _neg(self.n))

    @property
    def simplex(self) -> Simplex:
        return Simplex(self.vertices)

    @cached_property
    def P(self) -> MatPoly:
        return _proj(self.n)

    @property
    def nn(self) -> Fraction:
        return _dot(self.n, self.n)

    @cached_property
    def edges(self) -> tuple:
        a, b, c = self.vertices
        return ((a, b), (b, c), (c, a))

    def t_e(self, i):
        s, e = self.edges[i]
        return _sub(e, s)

    def n_e(self, i):
        return _cross(self.t_e(i), self.n)

    def sign(self, i, vertex) -> int:
        """+1 if ``vertex`` is the end point of edge ``i``, -1 if it is the start."""
        s, e = self.edges[i]
        vertex = _v(vertex)
        if vertex == e:
            return 1
        if vertex == s:
            return -1
        raise ValueError("vertex not on edge")

    def check(self) -> bool:
        """Frame invariants: P^2 = P, P n = 0, t_e . n = 0, n_e points outward."""
        P = self.P
        ok = (P @ P) == P and all(x.is_zero() for x in dot_right(P, VecPoly(self.n)))
        cen = self.simplex.center
        for i in range(3):
            ok &= _dot(self.t_e(i), self.n) == 0
            s, _ = self.edges[i]
            ok &= _dot(self.n_e(i), _sub(cen, s)) < 0
        return bool(ok)


def tet_faces(K: Simplex) -> list[FaceFrame]:
    """Faces ``F_i`` opposite vertex ``i`` with outward normals."""
    out = []
    for i in range(4):
        idx = [j for j in range(4) if j != i]
        a, b, c = (K.vertices[j] for j in idx)
        n = _cross(_sub(b, a), _sub(c, a))
        if _dot(n, _sub(K.vertices[i], a)) > 0:
            n = _neg(n)
        out.append(FaceFrame((a, b, c), n))
    return out


# ---------------------------------------------------------------- traces

def tr1(t, f) -> MatPoly:
    """``n x t x n``."""
    n = f.n if isinstance(f, FaceFrame) else _v(f)
    return cross_right(cross_left(n, t), n)


def _tr2_parts(t, n):
    P = _proj(n)
    w = dot_right(P, dot_left(n, t))  # the row vector n . t Pi
    return P, w


def tr2(t, f) -> MatPoly:
    """``Pi (t x nabla) x n + nabla_F (n . t Pi)``."""
    n = f.n if isinstance(f, FaceFrame) else _v(f)
    P, w = _tr2_parts(t, n)
    return P @ cross_right(cross_nabla(t), n) + P @ grad(w)


def tr2_forms(t, f) -> dict:
    """The equivalent expressions of the second trace, for cross-checking."""
    n = f.n if isinstance(f, FaceFrame) else _v(f)
    P, w = _tr2_parts(t, n)
    nabla_F_w = P @ grad(w)
    curl_part = cross_left(n, nabla_cross(t)) @ P
    Ptn = dot_right(P, dot_right(t, n))
    return {
        "primary": tr2(t, n),
        "def_form": sym(nabla_F_w) * 2 - P @ ddir(t, n) @ P,
        "sym_form": sym(curl_part + nabla_F_w),
        "column_form": curl_part + transpose(P @ grad(Ptn)),
    }


# ---------------------------------------------------------------- Green's identities

def _mean(p: Polynomial, s: Simplex) -> Fraction:
    return integrate_simplex(p, s)


def _vdotp(a: VecPoly, b: VecPoly) -> Polynomial:
    return dot(a, b)


def greens_inc_residual(s, t, K: Simplex = REFERENCE_TET) -> Fraction:
    """LHS - RHS of the symmetric Green's identity for inc on the tetrahedron ``K``.

    Face terms are means over the face divided by ``2|n|^2``; edge terms are
    means over the edge divided by ``|n|^2``.  Both equal the corresponding
    integrals with unit vectors.
    """
    lhs = integrate_simplex(frobenius(inc(s), t), K) - integrate_simplex(frobenius(s, inc(t)), K)
    rhs = Fraction(0)
    for f in tet_faces(K):
        F = f.simplex
        nn = f.nn
        face = _mean(frobenius(tr1(s, f), tr2(t, f)) - frobenius(tr2(s, f), tr1(t, f)), F)
        rhs += face / (2 * nn)
        n = f.n
        ns_n = cross(dot_left(n, s), VecPoly(n))
        nt_n = cross(dot_left(n, t), VecPoly(n))
        for i, (a, b) in enumerate(f.edges):
            te = f.t_e(i)
            e = Simplex((a, b))
            term = dot(ns_n, dot_left(te, t)) - dot(dot_left(te, s), nt_n)
            rhs += _mean(term, e) / nn
    return lhs - rhs


def _is_square(q: Fraction) -> Fraction | None:
    q = Fraction(q)
    a, b = isqrt(q.numerator), isqrt(q.denominator)
    if a * a == q.numerator and b * b == q.denominator:
        return Fraction(a, b)
    return None


def greens_divdiv_residual(t, v: Polynomial, f: FaceFrame | None = None) -> Fraction:
    """LHS - RHS of the 2D div div Green's identity on the face of ``f``.

    ``t`` is a tangential symmetric field and ``v`` a scalar, both given as
    polynomials in (x, y, z).  Edge terms are scaled by ``|t_e|^2`` so that
    only ``|n|`` must be rational; faces with irrational ``|n|`` are rejected.
    """
    if f is None:
        f = FaceFrame.of(REFERENCE_TRIANGLE)
    nlen = _is_square(f.nn)
    if nlen is None:
        raise ValueError("face normal has irrational length")
    n = tuple(x / nlen for x in f.n)
    P = f.P
    F = f.simplex
    area = nlen / 2
    divdiv = _divdiv(t, P)
    lhs = _mean(divdiv * v, F) * area
    hess_v = P @ MatPoly([[gradient(v)[i].derive(j) for j in range(3)] for i in range(3)]) @ P
    rhs = _mean(frobenius(t, hess_v), F) * area
    div_t = _div_F(t, P)
    for i, (a, b) in enumerate(f.edges):
        T = f.t_e(i)
        ne = _cross(T, n)  # |ne| = |T|
        TT = _dot(T, T)
        tn = dot(VecPoly(T), dot_right(t, VecPoly(ne)))
        for vert in (a, b):
            rhs -= f.sign(i, vert) * tn(vert) * v(vert) / TT
        e = Simplex((a, b))
        nn_term = dot(VecPoly(ne), dot_right(t, VecPoly(ne))) * ddir(v, ne)
        flux = ddir(tn, T) + dot(VecPoly(ne), div_t) * TT
        rhs -= (_mean(nn_term, e) - _mean(flux * v, e)) / TT
    return lhs - rhs


def _div_F(t, P) -> VecPoly:
    return div_row(t @ P)


def _divdiv(t, P) -> Polynomial:
    return div(dot_right(P, _div_F(t, P)))


# ---------------------------------------------------------------- trace identities

TRACE_IDENTITIES = ("defTr1", "defTr2", "incTr1", "incTr2", "edgeTT", "edgeDivDiv", "edgeTr2")


def _residual_size(obj, s: Simplex | None) -> Fraction:
    """Sum of absolute coefficients, after restriction to ``s`` when given."""
    if isinstance(obj, Polynomial):
        comps = [obj]
    elif isinstance(obj, VecPoly):
        comps = list(obj.comps)
    else:
        comps = [x for r in obj.entries for x in r]
    total = Fraction(0)
    for p in comps:
        q = restrict(p, s) if s is not None else p
        total += sum((abs(Fraction(c)) for c in q.terms.values()), Fraction(0))
    return total


def trace_commutation_check(which: str, inp, frame: FaceFrame, edge: int = 0,
                            restrict_to_entity: bool = True) -> Fraction:
    """Residual of a trace identity; zero means the identity holds exactly.

    ``inp`` is a vector field for ``defTr1``/``defTr2`` and a symmetric
    tensor field otherwise.  Edge identities use edge ``edge`` of the face.
    """
    f = frame
    n = f.n
    nv = VecPoly(n)
    P = f.P
    if which == "defTr1":
        v = inp
        lhs = tr1(def_(v), f)
        # sym curl_F (v x n) with the same unnormalized n
        vxn = cross(v, nv)
        rhs = sym(transpose(cross_left(n, grad(vxn))))
        res, ent = lhs - rhs, f.simplex
    elif which == "defTr2":
        v = inp
        lhs = tr2(def_(v), f)
        vn = dot(v, nv)
        hess = MatPoly([[gradient(vn)[i].derive(j) for j in range(3)] for i in range(3)])
        res, ent = lhs - P @ hess @ P, f.simplex
    elif which == "incTr1":
        t = inp
        lhs = dot(nv, dot_right(inc(t), nv))
        res, ent = lhs - _divdiv(tr1(t, f), P), f.simplex
    elif which == "incTr2":
        t = inp
        lhs = cross(dot_left(nv, inc(t)), nv)
        tr = tr2(t, f)
        # (n x nabla) . A, column-wise
        rhs = []
        for j in range(3):
            acc = as_poly(0)
            for i in range(3):
                a, b = (i + 1) % 3, (i + 2) % 3
                d = tr[i, j]
                acc = acc + d.derive(b) * n[a] - d.derive(a) * n[b]
            rhs.append(acc)
        res, ent = lhs - VecPoly(rhs), f.simplex
    else:
        t = inp
        T = f.t_e(edge)
        ne = _cross(T, n)
        Tv, nev = VecPoly(T), VecPoly(ne)
        NN, TT = f.nn, _dot(T, T)
        s, e = f.edges[edge]
        ent = Simplex((s, e))
        if which == "edgeTT":
            lhs = dot(nev, dot_right(tr1(t, f), nev))
            rhs = dot(Tv, dot_right(t, Tv)) * (-NN * NN)
            res = lhs - rhs
        elif which == "edgeDivDiv":
            a = tr1(t, f)
            l1 = ddir(dot(Tv, dot_right(a, nev)), T)
            l2 = dot(nev, _div_F(a, P))
            r1 = ddir(dot(nev, dot_right(t, Tv)), T)
            r2 = -dot(nv, dot_right(nabla_cross(t), Tv))
            res = (l1 + l2 * TT) - (r1 + r2 * TT) * NN
        elif which == "edgeTr2":
            lhs = dot_right(tr2(t, f), Tv)
            r1 = dot_right(cross_left(n, nabla_cross(t)), Tv)
            r2 = ddir(dot_right(P, dot_right(t, nv)), T)
            res = lhs - (r1 + r2)
        else:
            raise ValueError(f"unknown identity {which!r}")
    return _residual_size(res, ent if restrict_to_entity else None)


# ---------------------------------------------------------------- bubbles

BUBBLE_KINDS = ("tt", "incFull", "divNormal", "divdiv2D", "hessian2D")


@dataclass
class BubbleBasis:
    kind: str
    k: int
    basis: SpaceBasis
    ambient: SpaceBasis
    coords: flint.fmpq_mat  # columns: coordinates in ``ambient``
    cross_check: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.basis.dim


def _restricted_rows(images, s: Simplex, rows: list):
    """Append coefficient rows of ``images`` restricted to ``s``."""
    block = {}
    for j, obj in enumerate(images):
        for (comp, e), c in flatten_restricted(obj, s).items():
            block.setdefault((comp, e), {})[j] = c
    for key in sorted(block):
        rows.append(block[key])


def flatten_restricted(obj, s: Simplex) -> dict:
    out = {}
    if isinstance(obj, Polynomial):
        comps = [obj]
    elif isinstance(obj, VecPoly):
        comps = list(obj.comps)
    else:
        comps = [x for r in obj.entries for x in r]
    for i, p in enumerate(comps):
        if p:
            for e, c in restrict(p, s).terms.items():
                out[(i, e)] = c
    return out


def _sparse_to_fmpq(rows: list, ncols: int) -> flint.fmpq_mat:
    m = flint.fmpq_mat(len(rows), ncols)
    for i, r in enumerate(rows):
        for j, c in r.items():
            c = Fraction(c)
            m[i, j] = flint.fmpq(c.numerator, c.denominator)
    return m


def constraint_kernel(ambient: SpaceBasis, constraints) -> tuple[flint.fmpq_mat, int]:
    """Kernel of stacked linear constraints; ``constraints`` yields
    ``(function, simplex or None)`` pairs meaning function(element) vanishes on simplex
    (or identically when None, or at a point when simplex is a 1-vertex tuple)."""
    rows: list = []
    for fn, s in constraints:
        images = [fn(e) for e in ambient.elements]
        if isinstance(s, tuple):  # point evaluation
            block = {}
            for j, obj in enumerate(images):
                for key, val in _point_values(obj, s).items():
                    if val:
                        block.setdefault(key, {})[j] = val
            rows.extend(block[k] for k in sorted(block))
        else:
            _restricted_rows(images, s, rows)
    m = _sparse_to_fmpq(rows, ambient.dim)
    ker = linalg.nullspace(m)
    out = flint.fmpq_mat(ambient.dim, len(ker))
    for j, v in enumerate(ker):
        for i, c in enumerate(v):
            if c:
                out[i, j] = flint.fmpq(c.numerator, c.denominator)
    return out, len(ker)


def _point_values(obj, pt) -> dict:
    if isinstance(obj, Polynomial):
        return {0: obj(pt)}
    if isinstance(obj, VecPoly):
        return {i: c(pt) for i, c in enumerate(obj.comps)}
    return {3 * i + j: obj.entries[i][j](pt) for i in range(3) for j in range(3)}


def _basis_from_coords(ambient: SpaceBasis, coords: flint.fmpq_mat, label: str) -> SpaceBasis:
    elems = [ambient.combine([coords[i, j] for i in range(coords.nrows())]) for j in range(coords.ncols())]
    return SpaceBasis(elems, label=label, check=False)


def N_tensors(K: Simplex) -> dict:
    """``N_{ij} = sym(n_k n_l^T)`` with ``{k, l}`` the complement of ``{i, j}``."""
    faces = tet_faces(K)
    out = {}
    for i, j in combinations(range(4), 2):
        k, l = (m for m in range(4) if m not in (i, j))
        out[(i, j)] = sym(outer(VecPoly(faces[k].n), VecPoly(faces[l].n)))
    return out


def _tt_explicit(k: int, K: Simplex) -> list:
    lam = K.barycentric()
    monos = build_basis(SpaceSpec(k - 2, K, "scalar")).elements
    out = []
    for (i, j), Nij in N_tensors(K).items():
        b = lam[i] * lam[j]
        out += [Nij * (b * m) for m in monos]
    return out


def _div_normal_explicit(k: int, K: Simplex) -> list:
    lam = K.barycentric()
    monos = build_basis(SpaceSpec(k - 2, K, "scalar")).elements
    out = []
    for i, j in combinations(range(4), 2):
        t = VecPoly(_sub(K.vertices[j], K.vertices[i]))
        T = outer(t, t)
        b = lam[i] * lam[j]
        out += [SymMatPoly(T * (b * m)) for m in monos]
    return out


def _face_edges(f: FaceFrame):
    return [Simplex(e) for e in f.edges]


def bubble_basis(kind: str, k: int, K: Simplex | None = None) -> BubbleBasis:
    """Bubble space of the given kind; raises on a dimension mismatch."""
    if kind not in BUBBLE_KINDS:
        raise ValueError(f"unknown bubble kind {kind!r}")
    planar = kind in ("divdiv2D", "hessian2D")
    if K is None:
        K = REFERENCE_TRIANGLE if planar else REFERENCE_TET
    return _bubble_basis(kind, k, K)


@lru_cache(maxsize=None)
def _bubble_basis(kind: str, k: int, K: Simplex) -> BubbleBasis:
    if kind == "divNormal":
        if k < 2:
            raise ValueError("divNormal bubbles need k >= 2")
        amb = build_basis(SpaceSpec(k, K, "sym3"))
        expl = _div_normal_explicit(k, K)
        coords = amb.coordinates(expl)
        rk = linalg.rank(coords)
        if rk != len(expl):
            raise AssertionError("divNormal construction is not independent")
        faces = tet_faces(K)
        _, kdim = constraint_kernel(amb, [(lambda e, f=f: dot_right(e, VecPoly(f.n)), f.simplex)
                                          for f in faces])
        vanish = all(flatten_restricted(dot_right(e, VecPoly(f.n)), f.simplex) == {}
                     for e in expl for f in faces)
        if kdim != rk or not vanish:
            raise AssertionError("divNormal bubble disagrees with the kernel of the normal trace")
        basis = SpaceBasis(expl, label=f"Bn_{k}", check=False)
        return BubbleBasis(kind, k, basis, amb, coords, {"kernel_dim": kdim, "explicit_dim": rk})
    if kind in ("tt", "incFull"):
        if k < 4:
            raise ValueError("tangential bubbles need k >= 4")
        amb = build_basis(SpaceSpec(k, K, "sym3"))
        faces = tet_faces(K)
        cons = [(lambda e, f=f: tr1(e, f), f.simplex) for f in faces]
        if kind == "incFull":
            cons += [(lambda e, f=f: tr2(e, f), f.simplex) for f in faces]
        coords, dim = constraint_kernel(amb, cons)
        expected = k * (k * k - 1) if kind == "tt" else k ** 3 - 6 * k * k + 11 * k
        if dim != expected:
            raise AssertionError(f"{kind} bubble dimension {dim} != {expected}")
        basis = _basis_from_coords(amb, coords, f"{kind}_{k}")
        check = {"dim_formula": expected}
        if kind == "tt":
            expl = _tt_explicit(k, K)
            ec = amb.coordinates(expl)
            check["explicit_rank"] = linalg.rank(ec)
            check["explicit_in_kernel"] = linalg.rank(linalg.stack_columns(coords, ec)) == dim
        else:
            check["vanishes_on_edges"] = all(
                flatten_restricted(e, Simplex((K.vertices[a], K.vertices[b]))) == {}
                for e in basis for a, b in combinations(range(4), 2))
        return BubbleBasis(kind, k, basis, amb, coords, check)
    f = FaceFrame.of(K)
    if kind == "divdiv2D":
        if k < 2:
            raise ValueError("div div bubbles need k >= 2")
        amb = build_basis(SpaceSpec(k, K, "sym2"))
        cons = []
        P = f.P
        for i in range(3):
            T = f.t_e(i)
            ne = _cross(T, f.n)
            Tv, nev = VecPoly(T), VecPoly(ne)
            e = Simplex(f.edges[i])
            cons.append((lambda t, nev=nev: dot(nev, dot_right(t, nev)), e))
            cons.append((lambda t, Tv=Tv, nev=nev, T=T: ddir(dot(Tv, dot_right(t, nev)), T)
                         + dot(nev, _div_F(t, P)) * _dot(T, T), e))
        for vert in K.vertices:
            cons.append((lambda t: t, vert))
        coords, dim = constraint_kernel(amb, cons)
        return BubbleBasis(kind, k, _basis_from_coords(amb, coords, f"Bdd_{k}"), amb, coords)
    if kind == "hessian2D":
        if k < 1:
            raise ValueError("rot bubbles need k >= 1")
        amb = build_basis(SpaceSpec(k, K, "sym2"))
        cons = []
        for i in range(3):
            Tv = VecPoly(f.t_e(i))
            cons.append((lambda t, Tv=Tv: dot_right(t, Tv), Simplex(f.edges[i])))
        coords, dim = constraint_kernel(amb, cons)
        return BubbleBasis(kind, k, _basis_from_coords(amb, coords, f"Brot_{k}"), amb, coords)
    raise ValueError(kind)


def _bubble_scalar(K: Simplex) -> Polynomial:
    out = as_poly(1)
    for lam in K.barycentric():
        out = out * lam
    return out


def _contained(images_coords: flint.fmpq_mat, sub_coords: flint.fmpq_mat) -> bool:
    return linalg.rank(linalg.stack_columns(sub_coords, images_coords)) == linalg.rank(sub_coords)


def verify_bubble_complex(name: str, k: int, K: Simplex | None = None) -> ExactnessReport:
    """Exactness of a bubble complex, with the quotient slot as a rank condition."""
    if name == "elasticity":
        if k < 4:
            raise ValueError("the elasticity bubble complex needs k >= 4")
        K = K or REFERENCE_TET
        bK = _bubble_scalar(K)
        src_elems = [e * bK for e in build_basis(SpaceSpec(k - 3, K, "vec3")).elements]
        src = SpaceBasis(src_elems, label="bK P(k-3;R3)", check=False)
        B = bubble_basis("incFull", k, K)
        Bn = bubble_basis("divNormal", k - 2, K)
        tgt = build_basis(SpaceSpec(k - 3, K, "vec3"))
        d = operator_matrix("def", src, B.ambient)
        i = operator_matrix("inc", B.basis, Bn.ambient)
        dv = operator_matrix("divsym", Bn.basis, tgt)
        rm = tgt.coordinates(rm_basis(K.center).elements)
        rank_d, rank_i, rank_dv = d.rank, i.rank, dv.rank
        rep = ExactnessReport("elasticity bubble", k)
        contained = _contained(d.entries, B.coords) and _contained(i.entries, Bn.coords)
        comp = _composes_to_zero(src, def_, inc) and _composes_to_zero(B.basis, inc, div_row)
        rep.compositions_zero = contained and comp
        dims = [src.dim, B.dim, Bn.dim, tgt.dim - 6]
        rep.slots = [
            SlotReport("bK P(k-3;R3)", dims[0], 0, dims[0] - rank_d, rank_d == dims[0]),
            SlotReport("B", dims[1], rank_d, dims[1] - rank_i, rank_d == dims[1] - rank_i),
            SlotReport("Bn(k-2)", dims[2], rank_i, dims[2] - rank_dv, rank_i == dims[2] - rank_dv),
            SlotReport("P(k-3;R3)/RM", dims[3], rank_dv, dims[3],
                       rank_dv == dims[3] and linalg.rank(linalg.stack_columns(dv.entries, rm)) == tgt.dim),
        ]
        rep.notes = {"dims": dims}
        return rep
    if name == "divdiv2D":
        if k < 3:
            raise ValueError("the div div bubble complex needs k >= 3")
        K = K or REFERENCE_TRIANGLE
        plane = FacePlane(K)
        bF = _bubble_scalar(K)
        src_elems = [e * bF for e in build_basis(SpaceSpec(k - 2, K, "vec2")).elements]
        src = SpaceBasis(src_elems, label="bF P(k-2;R2)", check=False)
        B = bubble_basis("divdiv2D", k, K)
        tgt = build_basis(SpaceSpec(k - 2, K, "scalar"))
        sc = operator_matrix("sym_curl_F", src, B.ambient, plane=plane)
        dd = operator_matrix("divdiv_F", B.basis, tgt, plane=plane)
        p1 = tgt.coordinates(build_basis(SpaceSpec(1, K, "scalar")).elements)
        comp = _composes_to_zero(src, plane.sym_curl_F, plane.divdiv_F)
        return _two_step_report("divdiv bubble", k, src, B, tgt, sc, dd, p1, 3, comp)
    if name == "hessian2D":
        if k < 5:
            raise ValueError("the hessian bubble complex needs k >= 5")
        K = K or REFERENCE_TRIANGLE
        plane = FacePlane(K)
        bF2 = _bubble_scalar(K) ** 2
        src_elems = [e * bF2 for e in build_basis(SpaceSpec(k - 5, K, "scalar")).elements]
        src = SpaceBasis(src_elems, label="bF^2 P(k-5)", check=False)
        B = bubble_basis("hessian2D", k - 1, K)
        tgt = build_basis(SpaceSpec(k - 2, K, "vec2"))
        hs = operator_matrix("hess_F", src, B.ambient, plane=plane)
        rt = operator_matrix("rot_F", B.basis, tgt, plane=plane)
        rmp = tgt.coordinates([VecPoly(plane.t1), VecPoly(plane.t2), plane.x_face])
        comp = _composes_to_zero(src, plane.hess_F, plane.rot_F)
        return _two_step_report("hessian bubble", k, src, B, tgt, hs, rt, rmp, 3, comp)
    raise ValueError(f"unknown bubble complex {name!r}")


def _composes_to_zero(src: SpaceBasis, first, second) -> bool:
    return all(_is_zero_obj(second(first(e))) for e in src)


def _is_zero_obj(obj) -> bool:
    return not flatten(obj)


def _two_step_report(name, k, src, B: BubbleBasis, tgt, first: OperatorMatrix, second: OperatorMatrix,
                     complement, cdim, comp: bool) -> ExactnessReport:
    rep = ExactnessReport(name, k)
    rep.compositions_zero = _contained(first.entries, B.coords) and comp
    r1, r2 = first.rank, second.rank
    q = tgt.dim - cdim
    rep.slots = [
        SlotReport(src.label, src.dim, 0, src.dim - r1, r1 == src.dim),
        SlotReport(B.basis.label, B.dim, r1, B.dim - r2, r1 == B.dim - r2),
        SlotReport("quotient", q, r2, q,
                   r2 == q and linalg.rank(linalg.stack_columns(second.entries, complement)) == tgt.dim),
    ]
    rep.notes = {"dims": [src.dim, B.dim, q]}
    return rep
