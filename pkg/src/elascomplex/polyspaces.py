"""Bases of polynomial tensor spaces, exact operator matrices, and the
rank-nullity checks for the polynomial complexes and space decompositions.

Three dimensional spaces use the global monomials ``x^a y^b z^c`` times a
constant tensor basis.  Two dimensional spaces live on a plane in R^3: face
coordinates ``(u, w)`` are affine functions of ``(x, y, z)`` that are
constant along the plane normal, so face polynomials are ordinary
polynomials in three variables and every surface operator is a projected
three dimensional one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb
from typing import Callable, Sequence

import flint

from . import linalg
from .exactpoly import (
    REFERENCE_TET, REFERENCE_TRIANGLE, MatPoly, Polynomial, Simplex, SymMatPoly, VecPoly,
    as_poly, cross, cross_left, curl, def_, div, div_row, dot, dot_right, gradient, hessian,
    inc, koszul_dot_x, koszul_sym_vx, koszul_x_cross, monomials, outer, pi_RM, position,
    rigid_motion, sym, transpose,
)

__all__ = [
    "FacePlane", "SpaceSpec", "SpaceBasis", "OperatorMatrix", "SlotReport", "ExactnessReport",
    "DecompositionReport", "build_basis", "operator_matrix", "image_basis", "verify_complex",
    "verify_decomposition", "radial_kernel_check", "flatten", "sym_basis", "SYM_INDEX",
    "OPERATORS", "COMPLEXES", "DECOMPOSITIONS", "rm_basis", "dim_formula",
]

# symmetric component order (11, 22, 33, 23, 13, 12)
SYM_INDEX = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))


def _e(i):
    return tuple(Fraction(int(i == j)) for j in range(3))


def sym_basis() -> list[tuple]:
    """Constant symmetric basis tensors as nested tuples, in ``SYM_INDEX`` order."""
    out = []
    for i, j in SYM_INDEX:
        m = [[Fraction(0)] * 3 for _ in range(3)]
        m[i][j] = m[j][i] = Fraction(1)
        out.append(tuple(tuple(r) for r in m))
    return out


def _vsub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _vcross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _vdot(a, b):
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class FacePlane:
    """A triangle in R^3 with rational orthogonal frame ``(t1, t2, n)``.

    ``n = (b - a) x (c - a)``, ``t1 = b - a`` and ``t2 = n x t1`` for vertices
    ``(a, b, c)`` in the given order; the coordinate origin is ``center``
    (face barycenter unless given).
    """

    triangle: Simplex

    def __post_init__(self):
        if self.triangle.dim != 2:
            raise ValueError("a face plane needs a triangle")

    @cached_property
    def n(self):
        a, b, c = self.triangle.vertices
        return _vcross(_vsub(b, a), _vsub(c, a))

    @cached_property
    def t1(self):
        a, b, _ = self.triangle.vertices
        return _vsub(b, a)

    @cached_property
    def t2(self):
        return _vcross(self.n, self.t1)

    @property
    def center(self):
        return self.triangle.center

    @cached_property
    def projection(self) -> tuple:
        """``I - n n^T / (n . n)``."""
        n = self.n
        nn = _vdot(n, n)
        return tuple(tuple(Fraction(int(i == j)) - n[i] * n[j] / nn for j in range(3)) for i in range(3))

    @cached_property
    def coordinates(self) -> tuple[Polynomial, Polynomial]:
        x = position(self.center)
        u = dot(x, self.t1) * (Fraction(1) / _vdot(self.t1, self.t1))
        w = dot(x, self.t2) * (Fraction(1) / _vdot(self.t2, self.t2))
        return u, w

    @cached_property
    def x_face(self) -> VecPoly:
        """Tangential position ``Pi (x - c)``, constant along the normal."""
        u, w = self.coordinates
        return VecPoly(u * self.t1[i] + w * self.t2[i] for i in range(3))

    @cached_property
    def x_perp(self) -> VecPoly:
        return cross(self.n, self.x_face)

    def monomial(self, exps) -> Polynomial:
        return _face_monomial(self, tuple(exps))

    def tangent_vectors(self):
        return (self.t1, self.t2)

    def tangent_sym(self) -> list[tuple]:
        t1, t2 = self.t1, self.t2
        a = tuple(tuple(t1[i] * t1[j] for j in range(3)) for i in range(3))
        b = tuple(tuple(t2[i] * t2[j] for j in range(3)) for i in range(3))
        c = tuple(tuple(t1[i] * t2[j] + t2[i] * t1[j] for j in range(3)) for i in range(3))
        return [a, b, c]

    # surface operators on normal-constant fields --------------------------------
    def _P(self):
        return MatPoly(self.projection)

    def grad_F(self, p: Polynomial) -> VecPoly:
        return dot_right(self._P(), gradient(p))

    def hess_F(self, p: Polynomial) -> SymMatPoly:
        P = self._P()
        return SymMatPoly(P @ hessian(p) @ P)

    def curl_F(self, v) -> MatPoly:
        """``(n x nabla v)^T``."""
        from .exactpoly import grad
        return transpose(cross_left(self.n, grad(v)))

    def sym_curl_F(self, v) -> SymMatPoly:
        return sym(self.curl_F(v))

    def div_F(self, t) -> VecPoly:
        """Row-wise surface divergence ``t . nabla_F``."""
        t = t if isinstance(t, MatPoly) else MatPoly(t)
        return div_row(t @ self._P())

    def divdiv_F(self, t) -> Polynomial:
        P = self._P()
        return div(dot_right(P, self.div_F(t)))

    def rot_F(self, t) -> VecPoly:
        """Row-wise ``t . (n x nabla)``."""
        t = t if isinstance(t, MatPoly) else MatPoly(t)
        n = self.n
        out = []
        for i in range(3):
            row = t.row(i)
            # (n x nabla)_j = eps_{jab} n_a d_b
            acc = as_poly(0)
            for j in range(3):
                a, b = (j + 1) % 3, (j + 2) % 3
                acc = acc + row[j].derive(b) * n[a] - row[j].derive(a) * n[b]
            out.append(acc)
        return VecPoly(out)

    def rot_F_vec(self, v) -> Polynomial:
        return dot(self.n, curl(v))


@lru_cache(maxsize=None)
def _face_power(plane: FacePlane, which: int, k: int) -> Polynomial:
    if k == 0:
        return Polynomial.const(1)
    if k == 1:
        return plane.coordinates[which]
    h = k // 2
    return _face_power(plane, which, h) * _face_power(plane, which, k - h)


@lru_cache(maxsize=None)
def _face_monomial(plane: FacePlane, exps: tuple) -> Polynomial:
    return _face_power(plane, 0, exps[0]) * _face_power(plane, 1, exps[1])


# ---------------------------------------------------------------- flattening

def flatten(obj) -> dict:
    """Map a scalar/vector/matrix polynomial to ``{(component, exps): coeff}``."""
    out = {}
    if isinstance(obj, Polynomial):
        for e, c in obj.terms.items():
            out[(0, e)] = c
    elif isinstance(obj, VecPoly):
        for i, p in enumerate(obj.comps):
            for e, c in p.terms.items():
                out[(i, e)] = c
    elif isinstance(obj, MatPoly):
        for i in range(3):
            for j in range(3):
                for e, c in obj.entries[i][j].terms.items():
                    out[(3 * i + j, e)] = c
    else:
        raise TypeError(f"cannot flatten {type(obj).__name__}")
    return out


# ---------------------------------------------------------------- spaces

COMPONENTS = {"scalar": 1, "vec3": 3, "sym3": 6, "mat3": 9, "vec2": 2, "sym2": 3}


@dataclass(frozen=True)
class SpaceSpec:
    degree: int
    domain: Simplex = REFERENCE_TET
    codomain: str = "scalar"

    def __post_init__(self):
        if self.codomain not in COMPONENTS:
            raise ValueError(f"unknown codomain {self.codomain!r}")
        if self.domain.dim not in (2, 3):
            raise ValueError("domain must be a triangle or a tetrahedron")
        if self.domain.dim == 3 and self.codomain in ("vec2", "sym2"):
            raise ValueError("planar codomains need a triangle domain")

    @property
    def dim(self) -> int:
        if self.degree < 0:
            return 0
        d = self.domain.dim
        return COMPONENTS[self.codomain] * comb(self.degree + d, d)

    @property
    def plane(self) -> FacePlane | None:
        return FacePlane(self.domain) if self.domain.dim == 2 else None


class SpaceBasis:
    """Ordered, linearly independent list of polynomial fields."""

    def __init__(self, elements: Sequence, spec: SpaceSpec | None = None, label: str = "",
                 check: bool = True):
        self.spec = spec
        self.label = label or (f"P{spec.degree}({spec.codomain})" if spec else "span")
        self.elements = list(elements)
        self._flat = [flatten(e) for e in self.elements]
        if check and self.elements and linalg.rank(self.flat_matrix()) != len(self.elements):
            raise ValueError(f"elements of {self.label} are linearly dependent")

    def __len__(self):
        return len(self.elements)

    @property
    def dim(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    @cached_property
    def keys(self) -> list:
        ks = set()
        for f in self._flat:
            ks.update(f)
        return sorted(ks)

    @cached_property
    def _key_index(self) -> dict:
        return {k: i for i, k in enumerate(self.keys)}

    def flat_matrix(self, keys=None) -> flint.fmpq_mat:
        keys = self.keys if keys is None else keys
        idx = {k: i for i, k in enumerate(keys)}
        m = flint.fmpq_mat(len(keys), len(self.elements))
        for j, f in enumerate(self._flat):
            for k, c in f.items():
                m[idx[k], j] = _fq(c)
        return m

    @cached_property
    def _solver(self):
        """Pivot rows of the flat matrix and the inverse of that square block."""
        if not self.elements:
            return [], flint.fmpq_mat(0, 0)
        m = self.flat_matrix()
        rows = linalg.pivot_columns(m.transpose())
        block = flint.fmpq_mat(len(rows), len(self.elements))
        for a, r in enumerate(rows):
            for j in range(len(self.elements)):
                block[a, j] = m[r, j]
        return rows, block.inv()

    def coordinates(self, objs: Sequence) -> flint.fmpq_mat:
        """Coordinates (one column per object); raises if an object is outside the span."""
        flats = [o if isinstance(o, dict) else flatten(o) for o in objs]
        n = len(self.elements)
        out = flint.fmpq_mat(n, len(flats))
        if not flats:
            return out
        idx = self._key_index
        for f in flats:
            for k in f:
                if k not in idx:
                    raise ValueError(f"image not contained in {self.label}: stray term {k}")
        if n == 0:
            if any(flats):
                raise ValueError(f"image not contained in {self.label}")
            return out
        rows, inv = self._solver
        rhs = flint.fmpq_mat(len(rows), len(flats))
        keys = self.keys
        for j, f in enumerate(flats):
            for a, r in enumerate(rows):
                c = f.get(keys[r])
                if c:
                    rhs[a, j] = _fq(c)
        coords = inv * rhs
        full = flint.fmpq_mat(len(keys), len(flats))
        for j, f in enumerate(flats):
            for k, c in f.items():
                full[idx[k], j] = _fq(c)
        if self.flat_matrix() * coords != full:
            raise ValueError(f"image not contained in {self.label}: nonzero residual")
        return coords

    def combine(self, coeffs) -> object:
        """Linear combination of the elements."""
        total = None
        for c, e in zip(coeffs, self.elements):
            c = Fraction(c) if not hasattr(c, "p") else Fraction(int(c.p), int(c.q))
            if c:
                total = e * c if total is None else total + e * c
        if total is None:
            return self.elements[0] * 0
        return total


def _fq(c):
    if isinstance(c, Fraction):
        return flint.fmpq(c.numerator, c.denominator)
    return flint.fmpq(c)


@lru_cache(maxsize=None)
def build_basis(spec: SpaceSpec) -> SpaceBasis:
    """Monomial-tensor basis of ``spec`` in canonical (component-major) order."""
    if spec.degree < 0:
        return SpaceBasis([], spec, check=False)
    if spec.domain.dim == 3:
        monos = [Polynomial.monomial(e) for e in monomials(spec.degree, 3)]
    else:
        plane = spec.plane
        monos = [plane.monomial(e) for e in monomials(spec.degree, 2)]
    cod = spec.codomain
    elems = []
    if cod == "scalar":
        elems = monos
    elif cod == "vec3":
        for i in range(3):
            elems += [VecPoly(tuple(m if j == i else 0 for j in range(3))) for m in monos]
    elif cod == "sym3":
        for s in sym_basis():
            elems += [SymMatPoly([[m * s[i][j] for j in range(3)] for i in range(3)]) for m in monos]
    elif cod == "mat3":
        for i in range(3):
            for j in range(3):
                elems += [MatPoly([[m if (a, b) == (i, j) else 0 for b in range(3)] for a in range(3)])
                          for m in monos]
    elif cod == "vec2":
        for t in spec.plane.tangent_vectors():
            elems += [VecPoly(tuple(m * t[i] for i in range(3))) for m in monos]
    elif cod == "sym2":
        for s in spec.plane.tangent_sym():
            elems += [SymMatPoly([[m * s[i][j] for j in range(3)] for i in range(3)]) for m in monos]
    basis = SpaceBasis(elems, spec, check=spec.domain.dim == 2)
    if basis.dim != spec.dim:
        raise AssertionError("basis size disagrees with the dimension formula")
    return basis


def rm_basis(center=(0, 0, 0)) -> SpaceBasis:
    """Rigid motions: three translations then three rotations about ``center``."""
    elems = [rigid_motion((0, 0, 0), _e(i), center) for i in range(3)]
    elems += [rigid_motion(_e(i), (0, 0, 0), center) for i in range(3)]
    return SpaceBasis(elems, label="RM")


def dim_formula(k: int, codomain: str, d: int = 3) -> int:
    return 0 if k < 0 else COMPONENTS[codomain] * comb(k + d, d)


# ---------------------------------------------------------------- operators

@dataclass
class OperatorMatrix:
    name: str
    source: SpaceBasis
    target: SpaceBasis
    entries: flint.fmpq_mat

    @cached_property
    def rank(self) -> int:
        return linalg.rank(self.entries)

    @property
    def nullity(self) -> int:
        return self.source.dim - self.rank

    @property
    def shape(self):
        return (self.entries.nrows(), self.entries.ncols())

    def kernel(self) -> list[list[Fraction]]:
        return linalg.nullspace(self.entries)

    def __matmul__(self, other: "OperatorMatrix") -> flint.fmpq_mat:
        return self.entries * other.entries


def _op_table(center, plane: FacePlane | None) -> dict[str, Callable]:
    ops = {
        "grad": gradient,
        "curl": curl,
        "div": div,
        "def": def_,
        "inc": inc,
        "divsym": div_row,
        "koszul_sym_vx": lambda v: koszul_sym_vx(v, center),
        "koszul_x_cross": lambda t: koszul_x_cross(t, center),
        "koszul_dot_x": lambda t: koszul_dot_x(t, center),
        "pi_RM": lambda v: pi_RM(v, center),
        "radial": None,
        "identity": lambda f: f,
    }
    if plane is not None:
        xf, xp = plane.x_face, plane.x_perp
        ops.update({
            "hess_F": plane.hess_F,
            "sym_curl_F": plane.sym_curl_F,
            "divdiv_F": plane.divdiv_F,
            "rot_F": plane.rot_F,
            "div_F": plane.div_F,
            "dot_xperp": lambda t: dot_right(t, xp),
            "xx_scalar": lambda p: SymMatPoly(outer(xf, xf) * p),
            "x_t_x": lambda t: dot(xf, dot_right(t, xf)),
            "sym_xperp_v": lambda v: sym(outer(xp, v)),
        })
    return ops


OPERATORS = ("grad", "curl", "div", "def", "inc", "divsym", "koszul_sym_vx", "koszul_x_cross",
             "koszul_dot_x", "pi_RM", "identity", "hess_F", "sym_curl_F", "divdiv_F", "rot_F",
             "div_F", "dot_xperp", "xx_scalar", "x_t_x", "sym_xperp_v")


def operator_matrix(op, source: SpaceBasis, target: SpaceBasis, center=None, plane=None,
                    name: str | None = None) -> OperatorMatrix:
    """Exact matrix of ``op`` (a name or a callable) from ``source`` to ``target``.

    Column j holds the coordinates of ``op(source[j])`` in ``target``; a
    nonzero expansion residual raises ``ValueError``.
    """
    dom = source.spec.domain if source.spec else REFERENCE_TET
    if center is None:
        center = dom.center
    if plane is None and source.spec is not None and source.spec.domain.dim == 2:
        plane = source.spec.plane
    if isinstance(op, str):
        table = _op_table(center, plane)
        if op not in table or table[op] is None:
            raise ValueError(f"unknown operator {op!r}")
        fn, label = table[op], op
    else:
        fn, label = op, getattr(op, "__name__", "op")
    images = [fn(e) for e in source.elements]
    return OperatorMatrix(name or label, source, target, target.coordinates(images))


def image_basis(om: OperatorMatrix, label: str = "") -> SpaceBasis:
    """Column-space basis of an operator: images of the pivot source elements."""
    piv = linalg.pivot_columns(om.entries)
    elems = [om.target.combine([om.entries[i, j] for i in range(om.entries.nrows())]) for j in piv]
    return SpaceBasis(elems, label=label or f"{om.name}({om.source.label})", check=False)


def span_basis(objs: Sequence, label: str) -> SpaceBasis:
    """Independent subset (leftmost) of ``objs``."""
    if not objs:
        return SpaceBasis([], label=label, check=False)
    tmp = SpaceBasis(objs, label=label, check=False)
    piv = linalg.pivot_columns(tmp.flat_matrix())
    return SpaceBasis([objs[j] for j in piv], label=label, check=False)


# ---------------------------------------------------------------- reports

@dataclass
class SlotReport:
    name: str
    dim: int
    rank_in: int
    nullity_out: int
    passed: bool

    def as_dict(self):
        return {"slot": self.name, "dim": self.dim, "rank_in": self.rank_in,
                "nullity_out": self.nullity_out, "pass": self.passed}


@dataclass
class ExactnessReport:
    name: str
    k: int
    slots: list[SlotReport] = field(default_factory=list)
    compositions_zero: bool = True
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.compositions_zero and all(s.passed for s in self.slots)

    @property
    def failing_slot(self) -> str | None:
        if not self.compositions_zero:
            return "composition"
        return next((s.name for s in self.slots if not s.passed), None)

    def as_dict(self):
        return {"complex": self.name, "k": self.k, "pass": self.passed,
                "compositions_zero": self.compositions_zero,
                "slots": [s.as_dict() for s in self.slots], **self.notes}


def chain_report(name: str, k: int, spaces: Sequence[str], maps: Sequence[OperatorMatrix],
                 head_kernel: int, tail_cokernel: int = 0, notes=None) -> ExactnessReport:
    """Rank-nullity check of ``V0 -> V1 -> ... -> Vn``.

    ``head_kernel`` is the expected kernel dimension of the first map and
    ``tail_cokernel`` the expected codimension of the image of the last one.
    """
    rep = ExactnessReport(name, k, notes=dict(notes or {}))
    for a, b in zip(maps, maps[1:]):
        if not linalg.is_zero(b @ a):
            rep.compositions_zero = False
    dims = [maps[0].source.dim] + [m.target.dim for m in maps]
    ranks = [m.rank for m in maps]
    rep.slots.append(SlotReport(spaces[0], dims[0], dims[0] - head_kernel, dims[0] - ranks[0],
                                dims[0] - ranks[0] == head_kernel))
    for i in range(1, len(dims)):
        rank_in = ranks[i - 1]
        if i < len(maps):
            null_out = dims[i] - ranks[i]
            ok = rank_in == null_out
        else:
            null_out = dims[i] - tail_cokernel
            ok = rank_in == null_out
        rep.slots.append(SlotReport(spaces[i], dims[i], rank_in, null_out, ok))
    return rep


def _basis(k, codomain, domain):
    return build_basis(SpaceSpec(k, domain, codomain))


MIN_DEGREE = {"polyDeRham": 1, "polyElasticity": 3, "koszulElasticity": 3, "divdiv2D": 2,
              "hessian2D": 1}
COMPLEXES = tuple(MIN_DEGREE)


def verify_complex(name: str, k: int, domain: Simplex | None = None, center=None) -> ExactnessReport:
    """Exactness of a named polynomial complex at degree ``k`` by rank-nullity."""
    if name not in MIN_DEGREE:
        raise ValueError(f"unknown complex {name!r}")
    if k < MIN_DEGREE[name]:
        raise ValueError(f"{name} needs k >= {MIN_DEGREE[name]}, got {k}")
    if domain is None:
        domain = REFERENCE_TRIANGLE if name in ("divdiv2D", "hessian2D") else REFERENCE_TET
    c = domain.center if center is None else center
    B = lambda deg, cod: _basis(deg, cod, domain)  # noqa: E731
    if name == "polyDeRham":
        s = [B(k + 1, "scalar"), B(k, "vec3"), B(k - 1, "vec3"), B(k - 2, "scalar")]
        maps = [operator_matrix("grad", s[0], s[1]), operator_matrix("curl", s[1], s[2]),
                operator_matrix("div", s[2], s[3])]
        return chain_report(name, k, ["P(k+1)", "P(k;R3)", "P(k-1;R3)", "P(k-2)"], maps, 1)
    if name == "polyElasticity":
        s = [B(k + 1, "vec3"), B(k, "sym3"), B(k - 2, "sym3"), B(k - 3, "vec3")]
        maps = [operator_matrix("def", s[0], s[1]), operator_matrix("inc", s[1], s[2]),
                operator_matrix("divsym", s[2], s[3])]
        rm = rm_basis(c)
        rm_in_kernel = all(def_(v).is_zero() for v in rm)
        rep = chain_report(name, k, ["P(k+1;R3)", "P(k;S)", "P(k-2;S)", "P(k-3;R3)"], maps, 6,
                           notes={"rank_inc": maps[1].rank,
                                  "rank_inc_formula": (k + 4) * (k * k - k) // 2})
        rep.compositions_zero &= rm_in_kernel
        return rep
    if name == "koszulElasticity":
        s = [B(k - 3, "vec3"), B(k - 2, "sym3"), B(k, "sym3"), B(k + 1, "vec3"), rm_basis(c)]
        maps = [operator_matrix("koszul_sym_vx", s[0], s[1], center=c),
                operator_matrix("koszul_x_cross", s[1], s[2], center=c),
                operator_matrix("koszul_dot_x", s[2], s[3], center=c),
                operator_matrix("pi_RM", s[3], s[4], center=c)]
        return chain_report(name, k, ["P(k-3;R3)", "P(k-2;S)", "P(k;S)", "P(k+1;R3)", "RM"], maps, 0,
                            notes={"dim_tau_dot_x": maps[2].rank,
                                   "dim_tau_dot_x_formula": (k + 4) * (k + 3) * (k + 2) // 2 - 6})
    plane = FacePlane(domain)
    if name == "divdiv2D":
        s = [B(k + 1, "vec2"), B(k, "sym2"), B(k - 2, "scalar")]
        maps = [operator_matrix("sym_curl_F", s[0], s[1], plane=plane),
                operator_matrix("divdiv_F", s[1], s[2], plane=plane)]
        rep = chain_report(name, k, ["P(k+1;R2)", "P(k;S)", "P(k-2)"], maps, 3)
        rt = [VecPoly(plane.t1), VecPoly(plane.t2), plane.x_face]
        rep.compositions_zero &= all(plane.sym_curl_F(v).is_zero() for v in rt)
        return rep
    s = [B(k + 2, "scalar"), B(k, "sym2"), B(k - 1, "vec2")]
    maps = [operator_matrix("hess_F", s[0], s[1], plane=plane),
            operator_matrix("rot_F", s[1], s[2], plane=plane)]
    rep = chain_report(name, k, ["P(k+2)", "P(k;S)", "P(k-1;R2)"], maps, 3)
    u, w = plane.coordinates
    rep.compositions_zero &= all(plane.hess_F(p).is_zero() for p in (as_poly(1), u, w))
    return rep


# ---------------------------------------------------------------- decompositions

@dataclass
class DecompositionReport:
    name: str
    k: int
    total: int
    parts: dict
    stacked_rank: int

    @property
    def passed(self) -> bool:
        return sum(self.parts.values()) == self.total == self.stacked_rank

    @property
    def failing_part(self) -> str | None:
        if self.passed:
            return None
        if sum(self.parts.values()) != self.total:
            return "dimension count"
        return "intersection"

    def as_dict(self):
        return {"decomposition": self.name, "k": self.k, "total": self.total, "parts": self.parts,
                "stacked_rank": self.stacked_rank, "pass": self.passed}


def _decomp(name, k, total: SpaceBasis, parts: dict) -> DecompositionReport:
    """``parts`` maps a label to an OperatorMatrix into ``total`` (or a coordinate matrix)."""
    mats = {}
    for label, m in parts.items():
        mats[label] = m.entries if isinstance(m, OperatorMatrix) else m
    dims = {label: linalg.rank(m) for label, m in mats.items()}
    stacked = linalg.rank(linalg.stack_columns(*mats.values()))
    return DecompositionReport(name, k, total.dim, dims, stacked)


DECOMPOSITIONS = ("P_vec_RM", "P_sym_defKoszul", "P_sym_incSym", "divdiv2D_vec", "divdiv2D_sym",
                  "divdiv2D_bijection", "hessian2D_scalar", "hessian2D_sym", "hessian2D_bijection")


def verify_decomposition(name: str, k: int, domain: Simplex | None = None, center=None):
    """Direct-sum decomposition checked by ranks of the parts and of their union."""
    if name not in DECOMPOSITIONS:
        raise ValueError(f"unknown decomposition {name!r}")
    if k < 2:
        raise ValueError("decompositions need k >= 2")
    planar = name.startswith(("divdiv2D", "hessian2D"))
    if domain is None:
        domain = REFERENCE_TRIANGLE if planar else REFERENCE_TET
    c = domain.center if center is None else center
    B = lambda deg, cod: _basis(deg, cod, domain)  # noqa: E731
    if name == "P_vec_RM":
        tot = B(k + 1, "vec3")
        rm = rm_basis(c)
        return _decomp(name, k, tot, {
            "P(k;S).x": operator_matrix("koszul_dot_x", B(k, "sym3"), tot, center=c),
            "RM": operator_matrix("identity", rm, tot)})
    if name == "P_sym_defKoszul":
        tot = B(k, "sym3")
        return _decomp(name, k, tot, {
            "def P(k+1;R3)": operator_matrix("def", B(k + 1, "vec3"), tot),
            "x x P(k-2;S) x x": operator_matrix("koszul_x_cross", B(k - 2, "sym3"), tot, center=c)})
    if name == "P_sym_incSym":
        tot = B(k - 2, "sym3")
        return _decomp(name, k, tot, {
            "inc P(k;S)": operator_matrix("inc", B(k, "sym3"), tot),
            "sym(P(k-3;R3) x^T)": operator_matrix("koszul_sym_vx", B(k - 3, "vec3"), tot, center=c)})
    plane = FacePlane(domain)
    if name == "divdiv2D_vec":
        tot = B(k + 2, "vec2")
        rt = SpaceBasis([VecPoly(plane.t1), VecPoly(plane.t2), plane.x_face], label="RT")
        return _decomp(name, k, tot, {
            "P(k+1;S).xperp": operator_matrix("dot_xperp", B(k + 1, "sym2"), tot, plane=plane),
            "RT": operator_matrix("identity", rt, tot)})
    if name == "divdiv2D_sym":
        tot = B(k, "sym2")
        return _decomp(name, k, tot, {
            "symcurl P(k+1;R2)": operator_matrix("sym_curl_F", B(k + 1, "vec2"), tot, plane=plane),
            "P(k-2) x x^T": operator_matrix("xx_scalar", B(k - 2, "scalar"), tot, plane=plane)})
    if name == "divdiv2D_bijection":
        src = B(k - 2, "scalar")
        xx = operator_matrix("xx_scalar", src, B(k, "sym2"), plane=plane)
        img = image_basis(xx, "P(k-2) x x^T")
        dd = operator_matrix("divdiv_F", img, src, plane=plane)
        return DecompositionReport(name, k, src.dim, {"P(k-2) x x^T": img.dim}, dd.rank)
    if name == "hessian2D_scalar":
        tot = B(k + 2, "scalar")
        p1 = B(1, "scalar")
        return _decomp(name, k, tot, {
            "x.P(k;S).x": operator_matrix("x_t_x", B(k, "sym2"), tot, plane=plane),
            "P1": operator_matrix("identity", p1, tot)})
    if name == "hessian2D_sym":
        tot = B(k, "sym2")
        return _decomp(name, k, tot, {
            "hess P(k+2)": operator_matrix("hess_F", B(k + 2, "scalar"), tot, plane=plane),
            "sym(xperp P(k-1;R2))": operator_matrix("sym_xperp_v", B(k - 1, "vec2"), tot, plane=plane)})
    src = B(k - 1, "vec2")
    sx = operator_matrix("sym_xperp_v", src, B(k, "sym2"), plane=plane)
    img = image_basis(sx, "sym(xperp P(k-1;R2))")
    rot = operator_matrix("rot_F", img, src, plane=plane)
    return DecompositionReport(name, k, src.dim, {"sym(xperp P(k-1;R2))": img.dim}, rot.rank)


def radial_kernel_check(k: int, ell, center=(0, 0, 0)) -> bool:
    """True iff ``ell + (x - c) . grad`` is injective on P_k."""
    ell = Fraction(ell)
    if ell <= 0:
        raise ValueError("ell must be positive")
    basis = build_basis(SpaceSpec(k, REFERENCE_TET, "scalar"))
    x = position(center)
    om = operator_matrix(lambda p: p * ell + dot(x, gradient(p)), basis, basis, name="radial")
    return om.rank == basis.dim
