"""Tetrahedral meshes with global frames, global finite element spaces and the
discrete elasticity complex V_h -> Sigma_h^inc -> Sigma_h^div -> Q_h.

Global operators are assembled by interpolation: on each cell
``M_K = D_target(K) * Op * D_source(K)^{-1}``, and every target DOF on a shared
entity must receive the same value from every adjacent cell.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations, permutations

import flint

from . import linalg
from .elements import Element, build_element, default_frames, dof_matrix
from .exactpoly import Simplex
from .facetrace import EdgeFrame, FaceFrame
from .polyspaces import ExactnessReport, SlotReport, operator_matrix

__all__ = [
    "TetMesh", "GlobalSpace", "SparseRationalMatrix", "ConformityError", "BUILTIN_MESHES",
    "load_mesh", "builtin_mesh", "parse_mesh", "assign_global_frames", "build_global_space",
    "global_operator", "verify_discrete_complex", "dimension_formula", "SPACE_FAMILIES",
]

SPACE_FAMILIES = {"V": "neilan", "inc": "hinc", "div": "huzhang", "Q": "dgvector"}


class ConformityError(ArithmeticError):
    """Adjacent cells disagree on a shared DOF."""


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


@dataclass(frozen=True)
class TetMesh:
    vertices: tuple
    tets: tuple  # sorted 4-tuples of vertex ids
    edge_frames: dict = field(default_factory=dict, compare=False, repr=False)
    face_normals: dict = field(default_factory=dict, compare=False, repr=False)

    @cached_property
    def edges(self) -> list[tuple]:
        return sorted({e for t in self.tets for e in combinations(t, 2)})

    @cached_property
    def faces(self) -> list[tuple]:
        return sorted({f for t in self.tets for f in combinations(t, 3)})

    @cached_property
    def cells_of(self) -> dict:
        """Entity (sorted vertex-id tuple) -> indices of cells containing it."""
        out: dict = {}
        for c, t in enumerate(self.tets):
            for r in range(1, 5):
                for ent in combinations(t, r):
                    out.setdefault(ent, []).append(c)
        return out

    @property
    def counts(self) -> dict:
        return {"V": len(self.vertices), "E": len(self.edges), "F": len(self.faces), "T": len(self.tets)}

    @property
    def euler(self) -> int:
        c = self.counts
        return c["V"] - c["E"] + c["F"] - c["T"]

    def cell(self, c: int) -> Simplex:
        return Simplex(tuple(self.vertices[i] for i in self.tets[c]))

    def induced_face_frame(self, c: int, face: tuple) -> FaceFrame:
        """Face of cell ``c`` with the outward normal and induced edge orientation."""
        tet = self.tets[c]
        opp = next(v for v in tet if v not in face)
        a, b, cc = (self.vertices[i] for i in face)
        n = _cross(_sub(b, a), _sub(cc, a))
        if _dot(n, _sub(self.vertices[opp], a)) > 0:
            n = tuple(-x for x in n)
        return FaceFrame((a, b, cc), n)


def assign_global_frames(m: TetMesh) -> TetMesh:
    """Edge frames from the lower to the higher vertex id; face normals
    ``(x_b - x_a) x (x_c - x_a)`` for ids ``a < b < c``."""
    x = m.vertices
    edges = {(a, b): EdgeFrame(x[a], x[b]) for a, b in m.edges}
    normals = {(a, b, c): _cross(_sub(x[b], x[a]), _sub(x[c], x[a])) for a, b, c in m.faces}
    return dataclasses.replace(m, edge_frames=edges, face_normals=normals)


def _check_mesh(m: TetMesh) -> None:
    nv = len(m.vertices)
    used = set()
    for t in m.tets:
        if len(set(t)) != 4 or any(not 0 <= i < nv for i in t):
            raise ValueError(f"invalid tetrahedron {t}")
        used.update(t)
        a, b, c, d = (m.vertices[i] for i in t)
        if _dot(_cross(_sub(b, a), _sub(c, a)), _sub(d, a)) == 0:
            raise ValueError(f"degenerate tetrahedron {t}")
    if used != set(range(nv)):
        raise ValueError("mesh has unused vertices")
    for f in m.faces:
        cells = m.cells_of[f]
        if len(cells) > 2:
            raise ValueError(f"face {f} is shared by more than two cells")
        if len(cells) == 2:
            a, b, c = (m.vertices[i] for i in f)
            n = _cross(_sub(b, a), _sub(c, a))
            sides = []
            for cell in cells:
                opp = next(v for v in m.tets[cell] if v not in f)
                sides.append(_dot(n, _sub(m.vertices[opp], a)) > 0)
            if sides[0] == sides[1]:
                raise ValueError(f"cells sharing face {f} overlap")


def parse_mesh(text: str) -> TetMesh:
    """Parse ``v x y z`` and ``t i j k l`` lines (0-based ids, rationals as p/q)."""
    verts, tets = [], []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "v" and len(parts) == 4:
                verts.append(tuple(Fraction(p) for p in parts[1:]))
            elif parts[0] == "t" and len(parts) == 5:
                tets.append(tuple(sorted(int(p) for p in parts[1:])))
            else:
                raise ValueError
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"line {lineno}: cannot parse {line!r}") from None
    if not tets:
        raise ValueError("mesh has no tetrahedra")
    m = TetMesh(tuple(verts), tuple(tets))
    _check_mesh(m)
    return assign_global_frames(m)


def _kuhn_cube() -> str:
    lines = [f"v {x} {y} {z}" for z in (0, 1) for y in (0, 1) for x in (0, 1)]
    idx = lambda p: p[0] + 2 * p[1] + 4 * p[2]
    for perm in permutations(range(3)):
        p = [0, 0, 0]
        ids = [idx(p)]
        for axis in perm:
            p[axis] = 1
            ids.append(idx(p))
        lines.append("t " + " ".join(map(str, ids)))
    return "\n".join(lines)


BUILTIN_MESHES = {
    "reftet": "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nt 0 1 2 3",
    "twotet": "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\nv 1 1 1\nt 0 1 2 3\nt 1 2 3 4",
    "cube6": _kuhn_cube(),
}


def builtin_mesh(name: str) -> TetMesh:
    if name not in BUILTIN_MESHES:
        raise ValueError(f"unknown mesh {name!r}; built-in meshes are {sorted(BUILTIN_MESHES)}")
    return parse_mesh(BUILTIN_MESHES[name])


def load_mesh(source: str) -> TetMesh:
    """A built-in mesh name, a path to a mesh file, or mesh text."""
    if source in BUILTIN_MESHES:
        return builtin_mesh(source)
    if "\n" not in source and not source.lstrip().startswith(("v ", "t ")):
        with open(source) as fh:
            return parse_mesh(fh.read())
    return parse_mesh(source)


# ---------------------------------------------------------------- global spaces

def dimension_formula(space: str, k: int, counts: dict) -> int:
    V, E, F, T = counts["V"], counts["E"], counts["F"], counts["T"]
    if space == "V":
        return 30 * V + (9 * k - 30) * E + 3 * (k - 3) * (k - 4) // 2 * F + k * (k - 1) * (k - 2) // 2 * T
    if space == "inc":
        return 30 * V + (14 * k - 39) * E + (3 * k * k - 21 * k + 30) * F + (k ** 3 - 6 * k * k + 11 * k) * T
    if space == "div":
        return 6 * V + (5 * k - 15) * E + 3 * (k - 3) * (k - 4) // 2 * F + (k - 1) * (k - 2) * (k - 3) * T
    if space == "Q":
        return k * (k - 1) * (k - 2) // 2 * T
    raise ValueError(f"unknown space {space!r}")


@dataclass
class GlobalSpace:
    space: str
    family: str
    k: int
    mesh: TetMesh
    elements: list[Element]
    local_to_global: list[list[int]]
    entity_dofs: dict  # global entity -> list of global DOF ids
    ndofs: int

    @cached_property
    def dof_matrices(self) -> list[flint.fmpq_mat]:
        return [dof_matrix(e) for e in self.elements]

    @cached_property
    def inverse_dof_matrices(self) -> list[flint.fmpq_mat]:
        return [linalg.inverse(d) for d in self.dof_matrices]

    @property
    def dim(self) -> int:
        return self.ndofs

    def dof_entity(self) -> list[tuple]:
        out = [None] * self.ndofs
        for ent, ids in self.entity_dofs.items():
            for g in ids:
                out[g] = ent
        return out


def _cell_frames(m: TetMesh, c: int):
    tet = m.tets[c]
    fr = default_frames(m.cell(c), order=tet)
    # the mesh frames are authoritative; the default rules must reproduce them
    for (i, j), ef in fr.edges.items():
        g = tuple(sorted((tet[i], tet[j])))
        if m.edge_frames and (m.edge_frames[g].start, m.edge_frames[g].end) != (ef.start, ef.end):
            raise AssertionError("cell edge frame differs from the global frame")
    for tri, plane in fr.faces.items():
        g = tuple(sorted(tet[v] for v in tri))
        if m.face_normals and tuple(m.face_normals[g]) != tuple(plane.n):
            raise AssertionError("cell face normal differs from the global normal")
    return fr


def build_global_space(m: TetMesh, space: str, k: int) -> GlobalSpace:
    """Global space ``V``, ``inc``, ``div`` or ``Q`` with entity-major DOF numbering."""
    if space not in SPACE_FAMILIES:
        raise ValueError(f"unknown space {space!r}")
    family = SPACE_FAMILIES[space]
    if not m.edge_frames:
        m = assign_global_frames(m)
    elements = [build_element(family, k, m.cell(c), _cell_frames(m, c)) for c in range(len(m.tets))]
    # per-entity block sizes, identical on every cell
    sizes: dict = {}
    for c, el in enumerate(elements):
        tet = m.tets[c]
        local: dict = {}
        for g in el.groups:
            ent = tuple(sorted(tet[v] for v in g.entity))
            local[ent] = local.get(ent, 0) + g.size
        for ent, n in local.items():
            if sizes.setdefault(ent, n) != n:
                raise AssertionError(f"cells disagree on the number of DOFs on {ent}")
    order = sorted(sizes, key=lambda e: (len(e), e))
    entity_dofs, n = {}, 0
    for ent in order:
        entity_dofs[ent] = list(range(n, n + sizes[ent]))
        n += sizes[ent]
    l2g = []
    for c, el in enumerate(elements):
        tet = m.tets[c]
        used: dict = {}
        row = []
        for g in el.groups:
            ent = tuple(sorted(tet[v] for v in g.entity))
            off = used.get(ent, 0)
            row += entity_dofs[ent][off:off + g.size]
            used[ent] = off + g.size
        l2g.append(row)
    expected = dimension_formula(space, k, m.counts)
    if n != expected:
        raise AssertionError(f"dim {space} = {n}, formula gives {expected}")
    return GlobalSpace(space, family, k, m, elements, l2g, entity_dofs, n)


@dataclass
class SparseRationalMatrix:
    nrows: int
    ncols: int
    entries: dict  # (i, j) -> Fraction, nonzero only

    def to_fmpq(self) -> flint.fmpq_mat:
        m = flint.fmpq_mat(self.nrows, self.ncols)
        for (i, j), v in self.entries.items():
            m[i, j] = flint.fmpq(v.numerator, v.denominator)
        return m

    def to_fmpz_rows(self) -> flint.fmpz_mat:
        """Each row scaled to integers; same rank."""
        rows: dict = {}
        for (i, j), v in self.entries.items():
            rows.setdefault(i, {})[j] = v
        m = flint.fmpz_mat(self.nrows, self.ncols)
        for i, r in rows.items():
            den = 1
            for v in r.values():
                den = den * v.denominator // _gcd(den, v.denominator)
            for j, v in r.items():
                m[i, j] = int(v * den)
        return m

    @cached_property
    def rank(self) -> int:
        if not self.entries:
            return 0
        return self.to_fmpz_rows().rank()

    def __matmul__(self, other: "SparseRationalMatrix") -> "SparseRationalMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        by_row: dict = {}
        for (i, j), v in other.entries.items():
            by_row.setdefault(i, []).append((j, v))
        out: dict = {}
        for (i, j), v in self.entries.items():
            for jj, w in by_row.get(j, ()):
                out[(i, jj)] = out.get((i, jj), 0) + v * w
        return SparseRationalMatrix(self.nrows, other.ncols, {k: v for k, v in out.items() if v})

    def is_zero(self) -> bool:
        return not self.entries


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


OPERATOR_NAMES = {"def": "def", "inc": "inc", "div": "divsym"}
PAIRINGS = {"def": ("V", "inc"), "inc": ("inc", "div"), "div": ("div", "Q")}


def global_operator(m: TetMesh, op: str, source: GlobalSpace, target: GlobalSpace) -> SparseRationalMatrix:
    """Matrix of ``op`` from ``source`` to ``target`` in global DOF coordinates.

    Raises ``ConformityError`` when two cells sharing a target DOF give
    different values for the image of a global basis function.
    """
    if op not in PAIRINGS or PAIRINGS[op] != (source.space, target.space):
        raise ValueError(f"{op} does not map {source.space} to {target.space}")
    local_op = operator_matrix(OPERATOR_NAMES[op], source.elements[0].shape, target.elements[0].shape).entries
    ent_of = target.dof_entity()
    values: dict = {}  # target dof -> {cell: {source dof: value}}
    for c in range(len(m.tets)):
        mk = target.dof_matrices[c] * local_op * source.inverse_dof_matrices[c]
        tg, sg = target.local_to_global[c], source.local_to_global[c]
        for a in range(mk.nrows()):
            row = {}
            for b in range(mk.ncols()):
                v = mk[a, b]
                if v != 0:
                    row[sg[b]] = Fraction(int(v.p), int(v.q))
            values.setdefault(tg[a], {})[c] = row
    entries = {}
    for g, per_cell in values.items():
        cells = m.cells_of[ent_of[g]]
        rows = [per_cell[c] for c in cells]
        first = rows[0]
        for c, r in zip(cells[1:], rows[1:]):
            if r != first:
                j = next(iter(set(r) ^ set(first) or {x for x in r if r[x] != first[x]}))
                raise ConformityError(
                    f"{op}: target DOF {g} on {ent_of[g]} differs between cells {cells[0]} and {c} "
                    f"for source DOF {j}")
        for j, v in first.items():
            entries[(g, j)] = v
    return SparseRationalMatrix(target.ndofs, source.ndofs, entries)


def verify_discrete_complex(m: TetMesh, k: int, spaces: dict | None = None) -> ExactnessReport:
    """Rank-nullity at every slot of RM -> V_h -> Sigma_inc -> Sigma_div -> Q_h -> 0."""
    if k < 6:
        raise ValueError("the discrete complex needs k >= 6")
    spaces = spaces or {s: build_global_space(m, s, k) for s in ("V", "inc", "div", "Q")}
    D = global_operator(m, "def", spaces["V"], spaces["inc"])
    I = global_operator(m, "inc", spaces["inc"], spaces["div"])
    Dv = global_operator(m, "div", spaces["div"], spaces["Q"])
    dims = {s: spaces[s].ndofs for s in spaces}
    rd, ri, rv = D.rank, I.rank, Dv.rank
    rep = ExactnessReport(f"discrete elasticity complex ({len(m.tets)} cells)", k)
    rep.compositions_zero = (I @ D).is_zero() and (Dv @ I).is_zero()
    rep.slots = [
        SlotReport("V_h", dims["V"], 6, dims["V"] - rd, dims["V"] - rd == 6),
        SlotReport("Sigma_inc", dims["inc"], rd, dims["inc"] - ri, rd == dims["inc"] - ri),
        SlotReport("Sigma_div", dims["div"], ri, dims["div"] - rv, ri == dims["div"] - rv),
        SlotReport("Q_h", dims["Q"], rv, 0, rv == dims["Q"]),
    ]
    alt = 6 - dims["V"] + dims["inc"] - dims["div"] + dims["Q"]
    formulas = {s: dimension_formula(s, k, m.counts) for s in dims}
    rep.notes = {"dims": dims, "formulas": formulas, "alternating_sum": alt, "counts": m.counts,
                 "ranks": {"def": rd, "inc": ri, "div": rv}}
    if alt != 0 or formulas != dims:
        rep.slots.append(SlotReport("dimension count", alt, 0, 0, False))
    return rep
