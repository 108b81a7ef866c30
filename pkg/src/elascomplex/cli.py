"""Command-line driver for the verification suites.

Every subcommand prints a table to stdout and, with ``--out``, writes a JSON
report.  The exit code is 0 when every check passes, 1 when one fails and 2 on
invalid arguments.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

SCHEMA = "elascomplex-report/1"
MESH_NAMES = ("reftet", "twotet", "cube6")
ELEMENT_FAMILIES = ("neilan", "huzhang", "hinc")


@dataclass
class Check:
    name: str
    expected: object
    actual: object
    passed: bool

    def as_dict(self) -> dict:
        return {"name": self.name, "expected": _jsonable(self.expected), "actual": _jsonable(self.actual),
                "pass": self.passed}


@dataclass
class Report:
    suite: str
    params: dict
    checks: list[Check] = field(default_factory=list)

    def add(self, name: str, expected, actual, passed: bool | None = None) -> None:
        self.checks.append(Check(name, expected, actual, expected == actual if passed is None else passed))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {"suite": self.suite, "params": _jsonable(self.params), "pass": self.passed,
                "checks": [c.as_dict() for c in self.checks]}


def _jsonable(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _exactness(rep, report: Report, label: str | None = None) -> None:
    report.add(label or rep.name, "exact", "exact" if rep.passed else f"fails at {rep.failing_slot}",
               rep.passed)


# ---------------------------------------------------------------- suites

def suite_complexes(k: int, planar_only: bool = False) -> Report:
    from .polyspaces import verify_complex, verify_decomposition
    rep = Report("complexes", {"k": k, "2d": planar_only})
    names = ["divdiv2D", "hessian2D"] if planar_only else \
        ["polyDeRham", "polyElasticity", "koszulElasticity", "divdiv2D", "hessian2D"]
    for name in names:
        r = verify_complex(name, k)
        _exactness(r, rep)
        if name == "polyElasticity":
            rep.add("rank inc on P(k;S)", r.notes["rank_inc_formula"], r.notes["rank_inc"])
        if name == "koszulElasticity":
            rep.add("dim P(k;S).x", r.notes["dim_tau_dot_x_formula"], r.notes["dim_tau_dot_x"])
    decomps = ["divdiv2D_vec", "divdiv2D_sym", "divdiv2D_bijection", "hessian2D_scalar", "hessian2D_sym",
               "hessian2D_bijection"]
    if not planar_only:
        decomps = ["P_vec_RM", "P_sym_defKoszul", "P_sym_incSym"] + decomps
    for name in decomps:
        d = verify_decomposition(name, k)
        rep.add(f"decomposition {name}", d.total, d.stacked_rank, d.passed)
    return rep


def suite_traces(degree: int, samples: int = 5, seed: int = 0) -> Report:
    from .exactpoly import (REFERENCE_TET, SymMatPoly, random_polynomial, random_sym, random_tet,
                            random_vec)
    from .facetrace import (TRACE_IDENTITIES, greens_divdiv_residual, greens_inc_residual,
                            tet_faces, tr2_forms)
    rep = Report("traces", {"degree": degree, "samples": samples, "seed": seed})
    rng = random.Random(seed)
    tets = {"reference": REFERENCE_TET, "random": random_tet(rng)}
    for label, K in tets.items():
        worst = max(abs(greens_inc_residual(random_sym(rng, degree), random_sym(rng, degree), K))
                    for _ in range(samples))
        rep.add(f"inc Green identity residual ({label} tet)", Fraction(0), Fraction(worst))
    worst = Fraction(0)
    for _ in range(samples):
        t = random_sym(rng, degree)
        t2 = SymMatPoly([[t[i, j] if i < 2 and j < 2 else 0 for j in range(3)] for i in range(3)])
        worst = max(worst, abs(greens_divdiv_residual(t2, random_polynomial(rng, degree))))
    rep.add("div div Green identity residual (reference triangle)", Fraction(0), worst)
    faces = tet_faces(tets["random"])
    forms_ok = True
    for _ in range(samples):
        t = random_sym(rng, degree)
        f = faces[rng.randrange(4)]
        forms = tr2_forms(t, f)
        forms_ok &= all((v - forms["primary"]).is_zero() for v in forms.values())
    rep.add("tr2 formulas agree", True, forms_ok)
    for which in TRACE_IDENTITIES:
        worst = Fraction(0)
        for _ in range(samples):
            f = faces[rng.randrange(4)]
            inp = random_vec(rng, degree) if which.startswith("def") else random_sym(rng, degree)
            worst = max(worst, trace_check(which, inp, f, rng.randrange(3)))
        rep.add(f"trace identity {which} residual", Fraction(0), worst)
    return rep


def trace_check(which, inp, f, edge):
    from .facetrace import trace_commutation_check
    return trace_commutation_check(which, inp, f, edge=edge)


def suite_bubbles(k: int) -> Report:
    from .facetrace import bubble_basis, verify_bubble_complex
    rep = Report("bubbles", {"k": k})
    rep.add("dim B^t (tr1 bubbles)", k * (k * k - 1), bubble_basis("tt", k).dim)
    b = bubble_basis("incFull", k)
    rep.add("dim B (tr1 and tr2 bubbles)", k ** 3 - 6 * k * k + 11 * k, b.dim)
    rep.add("B vanishes on edges", True, b.cross_check["vanishes_on_edges"])
    rep.add("dim B^n (degree k-2)", 6 * comb(k - 1, 3), bubble_basis("divNormal", k - 2).dim)
    for name in ("elasticity", "divdiv2D", "hessian2D"):
        if name == "hessian2D" and k < 5:
            continue
        r = verify_bubble_complex(name, k)
        _exactness(r, rep, f"{name} bubble complex")
    return rep


def suite_unisolvence(family: str, k: int, tet: str = "ref", seed: int = 0) -> Report:
    from .elements import (build_element, check_unisolvence, dof_matrix, hinc_entity_counts,
                           trace_determination_check)
    from .exactpoly import REFERENCE_TET, random_tet
    rep = Report("unisolvence", {"family": family, "k": k, "tet": tet, "seed": seed})
    K = REFERENCE_TET if tet == "ref" else random_tet(random.Random(seed))
    if tet != "ref":
        rep.params["vertices"] = [list(v) for v in K.vertices]
    el = build_element(family, k, K)
    m = dof_matrix(el)
    u = check_unisolvence(el, m)
    rep.add("number of DOFs", el.shape.dim, u.ndofs)
    rep.add("rank of DOF matrix", u.dim, u.rank)
    if family == "hinc":
        tally = hinc_entity_counts(k)
        counts = u.entity_counts
        rep.add("vertex DOFs", tally["vertex"], counts["vertex"])
        rep.add("edge DOFs per edge", tally["edge_each"], counts["edge"] // 6)
        rep.add("face DOFs per face", tally["face_each"], counts["face"] // 4)
        rep.add("volume DOFs", tally["volume"], counts["volume"])
        for face in ((1, 2, 3), (0, 2, 3), (0, 1, 3), (0, 1, 2)):
            d = trace_determination_check(el, face, m)
            rep.add(f"face {face} DOFs determine tr1 and tr2", True, d.passed)
    return rep


def suite_assemble(mesh: str, k: int) -> Report:
    from .meshassembly import dimension_formula, load_mesh, verify_discrete_complex
    m = load_mesh(mesh)
    rep = Report("assemble", {"mesh": mesh, "k": k, "counts": m.counts})
    r = verify_discrete_complex(m, k)
    for space, dim in r.notes["dims"].items():
        rep.add(f"dim {space}", dimension_formula(space, k, m.counts), dim)
    rep.add("alternating sum", 0, r.notes["alternating_sum"])
    rep.add("nullity of def", 6, r.slots[0].nullity_out)
    _exactness(r, rep, "discrete elasticity complex")
    return rep


def _run(job):
    fn, args = job
    return fn(*args)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("ELASCOMPLEX_THREADS", "1")))
    except ValueError:
        return 1


def run_jobs(jobs: list) -> list[Report]:
    """Run ``(function, args)`` jobs, in parallel up to ELASCOMPLEX_THREADS; keeps job order."""
    n = min(_threads(), len(jobs))
    if n <= 1:
        return [_run(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(_run, jobs))


# ---------------------------------------------------------------- argument handling

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="elascomplex",
                                description="Exact verification of the finite element elasticity complex")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", help="write the JSON report to this path")
        return sp

    sp = common(sub.add_parser("complexes", help="polynomial complexes and decompositions"))
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--2d", dest="planar", action="store_true", help="only the two-dimensional complexes")
    sp = common(sub.add_parser("traces", help="Green's identities and trace identities"))
    sp.add_argument("--degree", type=int, required=True)
    sp.add_argument("--samples", type=int, default=5)
    sp.add_argument("--seed", type=int, default=0)
    sp = common(sub.add_parser("bubbles", help="bubble spaces and bubble complexes"))
    sp.add_argument("--k", type=int, required=True)
    sp = common(sub.add_parser("unisolvence", help="DOF unisolvence of one element"))
    sp.add_argument("--family", choices=ELEMENT_FAMILIES, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--tet", choices=("ref", "random"), default="ref")
    sp.add_argument("--seed", type=int, default=0)
    sp = common(sub.add_parser("assemble", help="global spaces and the discrete complex on a mesh"))
    sp.add_argument("--mesh", required=True, help="built-in name (reftet, twotet, cube6) or mesh file")
    sp.add_argument("--k", type=int, required=True)
    sp = common(sub.add_parser("all", help="every suite"))
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--mesh", default="reftet")
    return p


def _validate(p: argparse.ArgumentParser, a) -> None:
    if a.command == "complexes" and a.k < 3:
        p.error("complexes need --k >= 3")
    if a.command == "traces" and not (0 <= a.degree <= 6 and a.samples >= 1):
        p.error("traces need 0 <= --degree <= 6 and --samples >= 1")
    if a.command == "bubbles" and a.k < 4:
        p.error("bubbles need --k >= 4")
    if a.command in ("unisolvence", "assemble", "all") and a.k < 6:
        p.error(f"{a.command} needs --k >= 6")
    if a.command in ("assemble", "all") and a.mesh not in MESH_NAMES and not os.path.exists(a.mesh):
        p.error(f"unknown mesh {a.mesh!r}")


def _jobs(a) -> list:
    if a.command == "complexes":
        return [(suite_complexes, (a.k, a.planar))]
    if a.command == "traces":
        return [(suite_traces, (a.degree, a.samples, a.seed))]
    if a.command == "bubbles":
        return [(suite_bubbles, (a.k,))]
    if a.command == "unisolvence":
        return [(suite_unisolvence, (a.family, a.k, a.tet, a.seed))]
    if a.command == "assemble":
        return [(suite_assemble, (a.mesh, a.k))]
    # fixed order: by suite name
    return [(suite_assemble, (a.mesh, a.k)), (suite_bubbles, (a.k,)), (suite_complexes, (a.k, False)),
            (suite_traces, (min(a.k, 4), 5, 0))] + \
        [(suite_unisolvence, (f, a.k, "ref", 0)) for f in ELEMENT_FAMILIES]


def _print(reports: list[Report], elapsed: float) -> None:
    for r in reports:
        params = " ".join(f"{k}={v}" for k, v in r.params.items() if k != "vertices")
        print(f"== {r.suite} ({params})")
        for c in r.checks:
            status = "PASS" if c.passed else "FAIL"
            print(f"  {status}  {c.name}: expected {_jsonable(c.expected)}, got {_jsonable(c.actual)}")
    total = sum(len(r.checks) for r in reports)
    failed = sum(not c.passed for r in reports for c in r.checks)
    print(f"{total - failed}/{total} checks passed in {elapsed:.1f}s")


def main(argv: list[str] | None = None) -> int:
    p = _parser()
    a = p.parse_args(argv)
    _validate(p, a)
    t0 = time.perf_counter()
    try:
        reports = run_jobs(_jobs(a))
    except (ValueError, OSError) as exc:
        print(f"elascomplex: error: {exc}", file=sys.stderr)
        return 2
    _print(reports, time.perf_counter() - t0)
    ok = all(r.passed for r in reports)
    if a.out:
        doc = {"schema": SCHEMA, "command": a.command, "pass": ok, "reports": [r.as_dict() for r in reports]}
        with open(a.out, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
