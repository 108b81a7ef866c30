"""Finite elements of the discrete elasticity complex as explicit DOF lists.

Three families are built on a tetrahedron: the smooth H^1 element for
vectors (``neilan``, shape space P_{k+1}), the symmetric H(div) element
(``huzhang``, P_{k-2}) and the H(inc) element (``hinc``, P_k).  ``dgvector``
is the discontinuous P_{k-3} vector space used as the last space of the
complex.  All use the same integer ``k``.

DOFs use unnormalized frames: edges run from the lower to the higher vertex
index with normals from ``EdgeFrame``; faces use the plane of their vertices
in increasing index order.  Moments are mean values over the entity.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import comb
from typing import Callable, Sequence

import flint

from . import linalg
from .exactpoly import (
    REFERENCE_TET, Polynomial, Simplex, SymMatPoly, VecPoly, _monomial_value, as_poly,
    dot, dot_right, koszul_sym_vx, monomials, nabla_cross, outer, sym, inc,
)
from .facetrace import EdgeFrame, flatten_restricted, tr1, tr2
from .polyspaces import FacePlane, SpaceBasis, SpaceSpec, build_basis, span_basis

__all__ = [
    "FAMILIES", "DofFunctional", "DofGroup", "Element", "EntityFrames", "UnisolvenceReport",
    "default_frames", "build_element", "apply_dof", "dof_matrix", "check_unisolvence",
    "trace_determination_check", "edge_trace_determination_check", "hinc_entity_counts",
]

FAMILIES = ("neilan", "huzhang", "hinc", "dgvector")
SYM_PAIRS = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))
DOF_KINDS = ("pointValue", "pointGradient", "pointHessian", "pointIncValue",
             "edgeMoment", "faceMoment", "volumeMoment")


@dataclass(frozen=True)
class DofFunctional:
    kind: str
    entity: tuple   # local vertex indices
    family: str     # name of the DOF block, e.g. "edge_inc_nt"
    index: int      # position inside the block on this entity


@dataclass(frozen=True)
class EntityFrames:
    """Edge frames keyed by local ``(i, j)``, ``i < j``, and face planes keyed by
    local sorted triples.  The frame geometry must be the global one."""

    edges: dict
    faces: dict


def default_frames(K: Simplex, order: Sequence[int] | None = None) -> EntityFrames:
    """Frames following the global rules for vertex ids ``order`` (default 0..3)."""
    order = list(range(4)) if order is None else list(order)
    x = K.vertices
    edges, faces = {}, {}
    for i, j in combinations(range(4), 2):
        a, b = (i, j) if order[i] < order[j] else (j, i)
        edges[(i, j)] = EdgeFrame(x[a], x[b])
    for tri in combinations(range(4), 3):
        srt = sorted(tri, key=lambda v: order[v])
        faces[tri] = FacePlane(Simplex(tuple(x[v] for v in srt)))
    return EntityFrames(edges, faces)


class _Fields:
    """Derived fields of one shape function, computed on demand."""

    def __init__(self, shape):
        self.shape = shape

    @cached_property
    def sym_comps(self):
        return [self.shape[i, j] for i, j in SYM_PAIRS]

    @cached_property
    def vec_comps(self):
        return list(self.shape.comps)

    @cached_property
    def inc(self):
        return inc(self.shape)

    @cached_property
    def nabla_cross(self):
        return nabla_cross(self.shape)

    @cached_property
    def inc_comps(self):
        return [self.inc[i, j] for i, j in SYM_PAIRS]

    def comps(self) -> list:
        return self.vec_comps if isinstance(self.shape, VecPoly) else self.sym_comps


@dataclass
class DofGroup:
    """A block of DOFs on one entity sharing a field and a test space.

    Point groups evaluate each field component at ``point``.  Moment groups
    take the mean over ``simplex`` of ``sum_i field_i * test_i`` for every
    test; tests are sparse lists of ``(component, Polynomial)``.
    """

    family: str
    kind: str
    entity: tuple
    field: Callable
    point: tuple | None = None
    ncomps: int = 0
    simplex: Simplex | None = None
    tests: list = field(default_factory=list)
    _weights: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return self.ncomps if self.point is not None else len(self.tests)

    def _weight(self, a: int, slot: int, exps: tuple) -> Fraction:
        key = (a, slot, exps)
        w = self._weights.get(key)
        if w is None:
            _, t = self.tests[a][slot]
            s = self.simplex
            w = Fraction(0)
            for e2, c2 in t.terms.items():
                w += c2 * _monomial_value(tuple(x + y for x, y in zip(exps, e2)), s)
            if s.dim == 3:
                w /= abs(s.signed_volume6)
            self._weights[key] = w
        return w

    def evaluate(self, fields: _Fields) -> list[Fraction]:
        comps = self.field(fields)
        if self.point is not None:
            return [Fraction(c(self.point)) if c else Fraction(0) for c in comps]
        out = []
        for a, test in enumerate(self.tests):
            v = Fraction(0)
            for slot, (i, _) in enumerate(test):
                p = comps[i]
                if p:
                    for e, c in p.terms.items():
                        v += c * self._weight(a, slot, e)
            out.append(v)
        return out


def _unit_tests(ncomps: int, polys: Sequence[Polynomial]) -> list:
    return [[(i, p)] for i in range(ncomps) for p in polys]


def _tensor_tests(objs) -> list:
    """Tests from matrix or vector fields: components in row-major order."""
    out = []
    for q in objs:
        if isinstance(q, VecPoly):
            out.append([(i, c) for i, c in enumerate(q.comps) if c])
        else:
            out.append([(3 * i + j, q[i, j]) for i in range(3) for j in range(3) if q[i, j]])
    return out


def _mat9(m) -> list:
    return [m[i, j] for i in range(3) for j in range(3)]


def _edge_powers(ef: EdgeFrame, deg: int) -> list[Polynomial]:
    s = ef.simplex.barycentric()[1]
    out, p = [], as_poly(1)
    for _ in range(deg + 1):
        out.append(p)
        p = p * s
    return out


def _derivative_comps(comps: list, order: int) -> list:
    out = []
    if order == 1:
        for a in range(3):
            out += [c.derive(a) if c else c for c in comps]
    else:
        for a in range(3):
            for b in range(a, 3):
                out += [c.derive(a).derive(b) if c else c for c in comps]
    return out


@dataclass
class Element:
    family: str
    k: int
    K: Simplex
    shape: SpaceBasis
    groups: list[DofGroup]
    frames: EntityFrames

    @cached_property
    def dofs(self) -> list[DofFunctional]:
        out = []
        for g in self.groups:
            out += [DofFunctional(g.kind, g.entity, g.family, i) for i in range(g.size)]
        return out

    @property
    def ndofs(self) -> int:
        return sum(g.size for g in self.groups)

    def evaluate(self, p) -> list[Fraction]:
        """All DOF values of ``p`` in element order."""
        f = _Fields(p)
        out = []
        for g in self.groups:
            out += g.evaluate(f)
        return out

    def entity_counts(self) -> dict:
        counts = Counter()
        for g in self.groups:
            counts[_entity_kind(g.entity)] += g.size
        return {k: counts.get(k, 0) for k in ("vertex", "edge", "face", "volume")}

    def family_counts(self, entity: tuple | None = None) -> dict:
        counts: dict = {}
        for g in self.groups:
            if entity is None or g.entity == entity:
                counts[g.family] = counts.get(g.family, 0) + g.size
        return counts

    def rows_on(self, entities) -> list[int]:
        """Indices of DOFs attached to any of ``entities``."""
        entities = set(entities)
        out, i = [], 0
        for g in self.groups:
            if g.entity in entities:
                out += range(i, i + g.size)
            i += g.size
        return out

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "k": self.k,
            "shape_dim": self.shape.dim,
            "ndofs": self.ndofs,
            "entity_counts": self.entity_counts(),
            "families": self.family_counts(),
            "dof_kinds": dict(sorted(Counter(d.kind for d in self.dofs).items())),
        }


def _entity_kind(entity: tuple) -> str:
    return ("vertex", "edge", "face", "volume")[len(entity) - 1]


def _vertex_groups(family: str, comps_of, orders, K, names) -> list[DofGroup]:
    out = []
    for v in range(4):
        for order, (name, kind) in zip(orders, names):
            def fn(f, order=order):
                c = comps_of(f)
                return c if order == 0 else _derivative_comps(c, order)
            n = len(comps_of(_Fields(_probe(family))))
            n = n if order == 0 else n * (3 if order == 1 else 6)
            out.append(DofGroup(name, kind, (v,), fn, point=K.vertices[v], ncomps=n))
    return out


def _probe(family):
    if family == "neilan":
        return VecPoly((0, 0, 0))
    return SymMatPoly([[0] * 3] * 3)


def hinc_entity_counts(k: int) -> dict:
    """Per-entity DOF counts of the H(inc) element from the closed-form tally."""
    return {
        "vertex": 4 * 30,
        "edge_each": 14 * (k - 3) + 3,
        "face_each": 3 * (k - 3) * (k - 4) - 6,
        "volume": k ** 3 - 6 * k * k + 11 * k,
    }


def build_element(family: str, k: int, K: Simplex = REFERENCE_TET, frames: EntityFrames | None = None,
                  drop: Sequence = ()) -> Element:
    """Element of ``family`` with integer parameter ``k`` on ``K``.

    ``drop`` lists ``(block name, entity or None)`` pairs to leave out; it
    exists to test that the unisolvence check detects missing DOFs.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if k < 6:
        raise ValueError(f"{family} needs k >= 6")
    if K.dim != 3:
        raise ValueError("elements live on tetrahedra")
    frames = frames or default_frames(K)
    builder = {"neilan": _neilan, "huzhang": _huzhang, "hinc": _hinc, "dgvector": _dgvector}[family]
    shape, groups = builder(k, K, frames)
    drop = list(drop)
    if drop:
        groups = [g for g in groups
                  if not any(g.family == name and (ent is None or tuple(ent) == g.entity) for name, ent in drop)]
    el = Element(family, k, K, shape, groups, frames)
    return el


def _edge_groups(frames, specs) -> list[DofGroup]:
    """``specs``: (name, field(fields, EdgeFrame) -> comps, ncomps, test degree)."""
    out = []
    for (i, j), ef in sorted(frames.edges.items()):
        for name, fn, ncomps, deg in specs:
            if deg < 0:
                continue
            tests = _unit_tests(ncomps, _edge_powers(ef, deg))
            out.append(DofGroup(name, "edgeMoment", (i, j), lambda f, fn=fn, ef=ef: fn(f, ef),
                                simplex=ef.simplex, tests=tests))
    return out


def _face_monomials(plane: FacePlane, deg: int) -> list[Polynomial]:
    return [plane.monomial(e) for e in monomials(deg, 2)] if deg >= 0 else []


def _volume_monomials(deg: int) -> list[Polynomial]:
    return [Polynomial.monomial(e) for e in monomials(deg, 3)] if deg >= 0 else []


def _neilan(k, K, frames):
    shape = build_basis(SpaceSpec(k + 1, K, "vec3"))
    vc = lambda f: f.vec_comps
    groups = _vertex_groups("neilan", vc, (0, 1, 2), K, (("vertex_value", "pointValue"),
                                                        ("vertex_gradient", "pointGradient"),
                                                        ("vertex_hessian", "pointHessian")))
    groups += _edge_groups(frames, [
        ("edge_value", lambda f, ef: f.vec_comps, 3, k - 5),
    ])
    for idx in (1, 2):
        groups += _edge_groups(frames, [
            (f"edge_normal_derivative_{idx}",
             lambda f, ef, idx=idx: [_ddir(c, ef.n1 if idx == 1 else ef.n2) for c in f.vec_comps], 3, k - 4),
        ])
    groups = _sort_groups(groups)
    for tri, plane in sorted(frames.faces.items()):
        tests = _unit_tests(3, _face_monomials(plane, k - 5))
        groups.append(DofGroup("face_value", "faceMoment", tri, vc, simplex=plane.triangle, tests=tests))
    groups.append(DofGroup("volume", "volumeMoment", (0, 1, 2, 3), vc, simplex=K,
                           tests=_unit_tests(3, _volume_monomials(k - 3))))
    return shape, groups


def _sort_groups(groups):
    """Entity-major order: vertices, then edges, faces, volume; stable within an entity."""
    return sorted(groups, key=lambda g: (len(g.entity), g.entity))


def _ddir(p, d):
    if not p:
        return p
    out = as_poly(0)
    for i in range(3):
        if d[i]:
            out = out + p.derive(i) * d[i]
    return out


def _quad(f_mat, u, w) -> Polynomial:
    return dot(VecPoly(u), dot_right(f_mat, VecPoly(w)))


def _huzhang(k, K, frames):
    shape = build_basis(SpaceSpec(k - 2, K, "sym3"))
    sc = lambda f: f.sym_comps
    groups = _vertex_groups("huzhang", sc, (0,), K, (("vertex_value", "pointValue"),))
    nn = lambda f, ef: [_quad(f.shape, ef.n1, ef.n1), _quad(f.shape, ef.n1, ef.n2),
                        _quad(f.shape, ef.n2, ef.n2)]
    nt = lambda f, ef: [_quad(f.shape, ef.n1, ef.t), _quad(f.shape, ef.n2, ef.t)]
    groups += _edge_groups(frames, [("edge_nn", nn, 3, k - 4), ("edge_nt", nt, 2, k - 4)])
    groups = _sort_groups(groups)
    for tri, plane in sorted(frames.faces.items()):
        tests = _unit_tests(3, _face_monomials(plane, k - 5))
        fn = lambda f, n=plane.n: list(dot_right(f.shape, VecPoly(n)).comps)
        groups.append(DofGroup("face_normal", "faceMoment", tri, fn, simplex=plane.triangle, tests=tests))
    groups.append(DofGroup("volume", "volumeMoment", (0, 1, 2, 3), sc, simplex=K,
                           tests=_unit_tests(6, _volume_monomials(k - 4))))
    return shape, groups


def _dgvector(k, K, frames):
    shape = build_basis(SpaceSpec(k - 3, K, "vec3"))
    groups = [DofGroup("volume", "volumeMoment", (0, 1, 2, 3), lambda f: f.vec_comps, simplex=K,
                       tests=_unit_tests(3, _volume_monomials(k - 3)))]
    return shape, groups


def hinc_face_tests(plane: FacePlane, k: int) -> dict:
    """The four face test spaces of the H(inc) element as tangential 3x3 fields."""
    scal = _face_monomials(plane, k - 5)
    vecs = [VecPoly(tuple(m * t[i] for i in range(3))) for t in plane.tangent_vectors() for m in scal]
    xf, xp = plane.x_face, plane.x_perp
    spaces = {
        "face_tr1_hess": span_basis([plane.hess_F(m) for m in scal], "hess_F"),
        "face_tr1_xperp": span_basis([sym(outer(xp, v)) for v in vecs], "sym(x_perp v)"),
        "face_tr2_symcurl": span_basis([plane.sym_curl_F(v) for v in vecs], "sym curl_F"),
        "face_tr2_xx": span_basis([SymMatPoly(outer(xf, xf) * m) for m in scal], "x x^T"),
    }
    c = comb(k - 3, 2)
    expected = {"face_tr1_hess": c - 3, "face_tr1_xperp": 2 * c, "face_tr2_symcurl": 2 * c - 3,
                "face_tr2_xx": c}
    for name, sp in spaces.items():
        if sp.dim != expected[name]:
            raise AssertionError(f"{name} has dimension {sp.dim}, expected {expected[name]}")
    return spaces


def hinc_volume_tests(k: int, K: Simplex) -> SpaceBasis:
    """``inc P_{k-4}(S)`` together with ``sym(P_{k-3}(R^3) x^T)``, checked to be a direct sum."""
    inc_part = span_basis([inc(e) for e in build_basis(SpaceSpec(k - 4, K, "sym3"))], "inc")
    vx = [koszul_sym_vx(v, K.center) for v in build_basis(SpaceSpec(k - 3, K, "vec3"))]
    expected = k ** 3 - 6 * k * k + 11 * k
    total = SpaceBasis(list(inc_part) + vx, label="volume tests", check=False)
    if linalg.rank(total.flat_matrix()) != total.dim or total.dim != expected:
        raise AssertionError("volume test spaces are not a direct sum of the expected dimension")
    return total


def _hinc(k, K, frames):
    shape = build_basis(SpaceSpec(k, K, "sym3"))
    sc = lambda f: f.sym_comps
    groups = _vertex_groups("hinc", sc, (0, 1), K, (("vertex_value", "pointValue"),
                                                     ("vertex_gradient", "pointGradient")))
    for v in range(4):
        groups.append(DofGroup("vertex_inc", "pointIncValue", (v,), lambda f: f.inc_comps,
                               point=K.vertices[v], ncomps=6))
    curl_t = lambda f, ef: list(dot_right(f.nabla_cross, VecPoly(ef.t)).comps)
    inc_nn = lambda f, ef: [_quad(f.inc, ef.n1, ef.n1), _quad(f.inc, ef.n1, ef.n2), _quad(f.inc, ef.n2, ef.n2)]
    inc_nt = lambda f, ef: [_quad(f.inc, ef.n1, ef.t), _quad(f.inc, ef.n2, ef.t)]
    groups += _edge_groups(frames, [
        ("edge_value", lambda f, ef: f.sym_comps, 6, k - 4),
        ("edge_curl_t", curl_t, 3, k - 3),
        ("edge_inc_nn", inc_nn, 3, k - 4),
        ("edge_inc_nt", inc_nt, 2, k - 4),
    ])
    groups = _sort_groups(groups)
    for tri, plane in sorted(frames.faces.items()):
        tests = hinc_face_tests(plane, k)
        n = plane.n
        t1 = lambda f, n=n: _mat9(tr1(f.shape, n))
        t2 = lambda f, n=n: _mat9(tr2(f.shape, n))
        for name, fn in (("face_tr1_hess", t1), ("face_tr1_xperp", t1),
                         ("face_tr2_symcurl", t2), ("face_tr2_xx", t2)):
            sp = tests[name]
            if sp.dim:
                groups.append(DofGroup(name, "faceMoment", tri, fn, simplex=plane.triangle,
                                       tests=_tensor_tests(sp.elements)))
    vol = hinc_volume_tests(k, K)
    groups.append(DofGroup("volume", "volumeMoment", (0, 1, 2, 3), lambda f: _mat9(f.shape),
                           simplex=K, tests=_tensor_tests(vol.elements)))
    return shape, groups


# ---------------------------------------------------------------- evaluation and checks

def apply_dof(el: Element, d: DofFunctional | int, p) -> Fraction:
    """Value of one DOF on ``p``."""
    idx = d if isinstance(d, int) else el.dofs.index(d)
    start = 0
    for g in el.groups:
        if idx < start + g.size:
            return g.evaluate(_Fields(p))[idx - start]
        start += g.size
    raise IndexError("DOF index out of range")


def dof_matrix(el: Element) -> flint.fmpq_mat:
    """Entry (i, j) is DOF i applied to shape function j."""
    m = flint.fmpq_mat(el.ndofs, el.shape.dim)
    for j, p in enumerate(el.shape):
        for i, v in enumerate(el.evaluate(p)):
            if v:
                m[i, j] = flint.fmpq(v.numerator, v.denominator)
    return m


@dataclass
class UnisolvenceReport:
    family: str
    k: int
    ndofs: int
    dim: int
    rank: int
    entity_counts: dict
    kernel_dim: int
    kernel_vector: object = None

    @property
    def passed(self) -> bool:
        return self.ndofs == self.dim and self.rank == self.dim

    def as_dict(self) -> dict:
        return {"family": self.family, "k": self.k, "ndofs": self.ndofs, "dim": self.dim,
                "rank": self.rank, "kernel_dim": self.kernel_dim, "entity_counts": self.entity_counts,
                "passed": self.passed}


def check_unisolvence(el: Element, matrix: flint.fmpq_mat | None = None) -> UnisolvenceReport:
    """Rank of the DOF matrix; on deficiency a nonzero shape function killed by every DOF."""
    m = dof_matrix(el) if matrix is None else matrix
    rk = linalg.rank(m)
    kdim = el.shape.dim - rk
    witness = None
    if kdim:
        ker = linalg.nullspace(m)
        witness = el.shape.combine(ker[0])
    return UnisolvenceReport(el.family, el.k, el.ndofs, el.shape.dim, rk, el.entity_counts(), kdim, witness)


def _kernel_matrix(rows: flint.fmpq_mat) -> flint.fmpq_mat:
    ker = linalg.nullspace(rows)
    out = flint.fmpq_mat(rows.ncols(), len(ker))
    for j, v in enumerate(ker):
        for i, c in enumerate(v):
            if c:
                out[i, j] = flint.fmpq(c.numerator, c.denominator)
    return out


def _select_rows(m: flint.fmpq_mat, rows: list[int]) -> flint.fmpq_mat:
    out = flint.fmpq_mat(len(rows), m.ncols())
    for a, r in enumerate(rows):
        for j in range(m.ncols()):
            v = m[r, j]
            if v != 0:
                out[a, j] = v
    return out


def _trace_matrix(shapes, fn, s: Simplex) -> flint.fmpq_mat:
    flats = [flatten_restricted(fn(p), s) for p in shapes]
    keys = sorted({k for f in flats for k in f})
    idx = {k: i for i, k in enumerate(keys)}
    m = flint.fmpq_mat(len(keys), len(flats))
    for j, f in enumerate(flats):
        for key, c in f.items():
            c = Fraction(c)
            m[idx[key], j] = flint.fmpq(c.numerator, c.denominator)
    return m


@dataclass
class DeterminationReport:
    entity: tuple
    constrained: int
    kernel_dim: int
    passed: bool
    counterexample: object = None

    def as_dict(self) -> dict:
        return {"entity": list(self.entity), "constrained": self.constrained,
                "kernel_dim": self.kernel_dim, "passed": self.passed}


def _determination(el, rows, traces, s, entity, matrix) -> DeterminationReport:
    m = dof_matrix(el) if matrix is None else matrix
    ker = _kernel_matrix(_select_rows(m, rows))
    ok, witness = True, None
    for fn in traces:
        t = _trace_matrix(el.shape.elements, fn, s)
        if t.nrows() == 0:
            continue
        prod = t * ker
        if not linalg.is_zero(prod):
            ok = False
            for j in range(prod.ncols()):
                if any(prod[i, j] != 0 for i in range(prod.nrows())):
                    witness = el.shape.combine([ker[i, j] for i in range(ker.nrows())])
                    break
            break
    return DeterminationReport(entity, len(rows), ker.ncols(), ok, witness)


def trace_determination_check(el: Element, face: tuple, matrix: flint.fmpq_mat | None = None
                              ) -> DeterminationReport:
    """Shape functions whose vertex, edge and face DOFs on ``face`` vanish have
    zero ``tr1`` and ``tr2`` on that face."""
    if el.family != "hinc":
        raise ValueError("trace determination applies to the H(inc) element")
    face = tuple(sorted(face))
    ents = [(v,) for v in face] + list(combinations(face, 2)) + [face]
    rows = el.rows_on(ents)
    plane = el.frames.faces[face]
    n = plane.n
    return _determination(el, rows, [lambda p: tr1(p, n), lambda p: tr2(p, n)], plane.triangle, face, matrix)


def edge_trace_determination_check(el: Element, edge: tuple, matrix: flint.fmpq_mat | None = None
                                   ) -> DeterminationReport:
    """Vanishing vertex DOFs and value/curl edge moments force ``tau|_e = 0``
    and ``(curl tau) t|_e = 0``."""
    if el.family != "hinc":
        raise ValueError("edge determination applies to the H(inc) element")
    edge = tuple(sorted(edge))
    ef = el.frames.edges[edge]
    rows = []
    start = 0
    for g in el.groups:
        on_vertex = len(g.entity) == 1 and g.entity[0] in edge and g.family != "vertex_inc"
        on_edge = g.entity == edge and g.family in ("edge_value", "edge_curl_t")
        if on_vertex or on_edge:
            rows += range(start, start + g.size)
        start += g.size
    t = VecPoly(ef.t)
    return _determination(el, rows, [lambda p: p, lambda p: dot_right(nabla_cross(p), t)],
                          ef.simplex, edge, matrix)
