"""Acceptance criteria 1-11, all at exact tolerance.

Each test records one PASS/FAIL line; the lines are repeated in the pytest
terminal summary.
"""
import random
import time
from math import comb

from acceptance_log import record

from elascomplex.elements import (
    build_element, check_unisolvence, dof_matrix, hinc_entity_counts, trace_determination_check,
)
from elascomplex.exactpoly import (
    REFERENCE_TET, REFERENCE_TRIANGLE, SymMatPoly, random_polynomial, random_sym, random_tet, random_vec,
)
from elascomplex.facetrace import (
    TRACE_IDENTITIES, FaceFrame, bubble_basis, greens_divdiv_residual, greens_inc_residual, tet_faces,
    trace_commutation_check, verify_bubble_complex,
)
from elascomplex.meshassembly import builtin_mesh, dimension_formula, verify_discrete_complex
from elascomplex.polyspaces import verify_complex, verify_decomposition

FACES = ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))
FACE_FAMILIES = ("face_tr1_hess", "face_tr1_xperp", "face_tr2_symcurl", "face_tr2_xx")


def _timed(fn, *args):
    t0 = time.perf_counter()
    out = fn(*args)
    return out, time.perf_counter() - t0


def test_criterion_01_polynomial_elasticity():
    ok, notes, slowest = True, [], 0.0
    for k in range(3, 7):
        r, dt = _timed(verify_complex, "polyElasticity", k)
        expected = (k + 4) * (k * k - k) // 2
        ok &= r.passed and r.compositions_zero and r.notes["rank_inc"] == expected
        notes.append(f"k={k} rank inc {r.notes['rank_inc']}/{expected}")
        slowest = max(slowest, dt)
    ok &= slowest <= 300
    record(1, ok, "; ".join(notes) + f"; slowest {slowest:.1f}s")
    assert ok


def test_criterion_02_koszul_elasticity():
    ok, notes, slowest = True, [], 0.0
    for k in range(3, 7):
        r, dt = _timed(verify_complex, "koszulElasticity", k)
        expected = (k + 4) * (k + 3) * (k + 2) // 2 - 6
        ok &= r.passed and r.notes["dim_tau_dot_x"] == expected
        notes.append(f"k={k} dim P(k;S).x {r.notes['dim_tau_dot_x']}/{expected}")
        slowest = max(slowest, dt)
    ok &= slowest <= 300
    record(2, ok, "; ".join(notes) + f"; slowest {slowest:.1f}s")
    assert ok


def test_criterion_03_decompositions():
    ok, failed = True, []
    for k in range(4, 7):
        for name in ("P_vec_RM", "P_sym_defKoszul", "P_sym_incSym"):
            d = verify_decomposition(name, k)
            if not d.passed:
                ok = False
                failed.append(f"{name}(k={k})")
    record(3, ok, "9 stacked-rank checks for k=4..6" + (f"; failed {failed}" if failed else ""))
    assert ok


def test_criterion_04_planar_complexes():
    t0 = time.perf_counter()
    ok, failed = True, []
    decomps = ("divdiv2D_vec", "divdiv2D_sym", "divdiv2D_bijection", "hessian2D_scalar", "hessian2D_sym",
               "hessian2D_bijection")
    for k in range(3, 7):
        for name in ("divdiv2D", "hessian2D"):
            if not verify_complex(name, k, domain=REFERENCE_TRIANGLE).passed:
                ok, failed = False, failed + [f"{name}(k={k})"]
        for name in decomps:
            if not verify_decomposition(name, k, domain=REFERENCE_TRIANGLE).passed:
                ok, failed = False, failed + [f"{name}(k={k})"]
    dt = time.perf_counter() - t0
    ok &= dt <= 60
    record(4, ok, f"2 complexes and 6 decompositions for k=3..6 in {dt:.1f}s"
           + (f"; failed {failed}" if failed else ""))
    assert ok


def test_criterion_05_greens_identities():
    rng = random.Random(2024)
    tets = {"reference": REFERENCE_TET, "random": random_tet(rng)}
    worst = {}
    for label, K in tets.items():
        worst[label] = max(abs(greens_inc_residual(random_sym(rng, 4), random_sym(rng, 4), K))
                           for _ in range(20))
    tri = FaceFrame.of(REFERENCE_TRIANGLE)
    dd = 0
    for _ in range(20):
        t = random_sym(rng, 4)
        t2 = SymMatPoly([[t[i, j] if i < 2 and j < 2 else 0 for j in range(3)] for i in range(3)])
        dd = max(dd, abs(greens_divdiv_residual(t2, random_polynomial(rng, 4), tri)))
    ok = worst["reference"] == 0 and worst["random"] == 0 and dd == 0
    record(5, ok, f"inc residuals ref {worst['reference']}, random {worst['random']}; div div residual {dd} "
                  f"(20 pairs each, degree 4)")
    assert ok


def test_criterion_06_trace_identities():
    rng = random.Random(6)
    faces = tet_faces(REFERENCE_TET) + tet_faces(random_tet(rng))
    worst = {}
    for which in TRACE_IDENTITIES:
        w = 0
        for _ in range(20):
            inp = random_vec(rng, 4) if which.startswith("def") else random_sym(rng, 4)
            w = max(w, trace_commutation_check(which, inp, rng.choice(faces), edge=rng.randrange(3)))
        worst[which] = w
    ok = all(v == 0 for v in worst.values())
    record(6, ok, "max residuals " + ", ".join(f"{k} {v}" for k, v in worst.items()))
    assert ok


def test_criterion_07_bubbles():
    t0 = time.perf_counter()
    k = 6
    dims = {"B^t": bubble_basis("tt", k).dim, "B": bubble_basis("incFull", k).dim,
            "B^n(4)": bubble_basis("divNormal", k - 2).dim}
    expected = {"B^t": k * (k * k - 1), "B": k ** 3 - 6 * k * k + 11 * k, "B^n(4)": 6 * comb(k - 1, 3)}
    exact = {name: verify_bubble_complex(name, k).passed for name in ("elasticity", "divdiv2D", "hessian2D")}
    dt = time.perf_counter() - t0
    ok = dims == expected == {"B^t": 210, "B": 66, "B^n(4)": 60} and all(exact.values()) and dt <= 600
    record(7, ok, f"dims {dims}; exact {exact}; {dt:.1f}s")
    assert ok


def _unisolvence_case(family, K):
    t0 = time.perf_counter()
    el = build_element(family, 6, K)
    m = dof_matrix(el)
    r = check_unisolvence(el, m)
    return el, m, r, time.perf_counter() - t0


def test_criterion_08_unisolvence():
    tets = [("ref", REFERENCE_TET)] + [(f"seed {s}", random_tet(random.Random(s))) for s in (11, 12, 13)]
    sizes = {"hinc": 504, "huzhang": 210, "neilan": 360}
    ok, slowest, notes = True, 0.0, []
    tally = hinc_entity_counts(6)
    for family, n in sizes.items():
        for label, K in tets:
            el, _, r, dt = _unisolvence_case(family, K)
            slowest = max(slowest, dt)
            good = r.passed and r.rank == n == r.ndofs
            if family == "hinc":
                c = r.entity_counts
                good &= (c["vertex"], c["edge"] // 6, c["face"] // 4, c["volume"]) == (120, 45, 12, 66)
                good &= (tally["vertex"], tally["edge_each"], tally["face_each"], tally["volume"]) == \
                    (120, 45, 12, 66)
            if not good:
                notes.append(f"{family} on {label} rank {r.rank}/{n}")
            ok &= good
    ok &= slowest <= 600
    record(8, ok, f"hinc 504, huzhang 210, neilan 360 on 4 tets; counts 120/45/12/66; slowest {slowest:.1f}s"
           + (f"; failed {notes}" if notes else ""))
    assert ok


def test_criterion_09_trace_determination():
    ok, notes = True, []
    for label, K in (("ref", REFERENCE_TET), ("seed 11", random_tet(random.Random(11)))):
        el = build_element("hinc", 6, K)
        m = dof_matrix(el)
        for f in FACES:
            d = trace_determination_check(el, f, m)
            ok &= d.passed
            if not d.passed:
                notes.append(f"{label} face {f}")
    record(9, ok, "tr1 and tr2 vanish on the boundary-DOF kernel of every face (reference and random tet)"
           + (f"; failed {notes}" if notes else ""))
    assert ok


def test_criterion_10_discrete_complex():
    ok, notes = True, []
    for name in ("reftet", "twotet", "cube6"):
        m = builtin_mesh(name)
        r, dt = _timed(verify_discrete_complex, m, 6)
        dims = r.notes["dims"]
        formulas = {s: dimension_formula(s, 6, m.counts) for s in dims}
        good = r.passed and dims == formulas and r.slots[0].nullity_out == 6 and r.notes["alternating_sum"] == 0
        if name == "reftet":
            good &= dims == {"V": 360, "inc": 504, "div": 210, "Q": 60}
        good &= dt <= 1800
        ok &= good
        notes.append(f"{name} dims {tuple(dims.values())} {'exact' if r.passed else 'NOT exact'} {dt:.0f}s")
    record(10, ok, "; ".join(notes))
    assert ok


def test_criterion_11_mutation():
    ok, notes = True, []
    full = build_element("hinc", 6)
    for f in FACES:
        for fam in FACE_FAMILIES:
            dropped = full.family_counts(f).get(fam, 0)
            r = check_unisolvence(build_element("hinc", 6, drop=[(fam, f)]))
            good = r.kernel_dim == dropped and (dropped == 0) == r.passed
            ok &= good
            if not good:
                notes.append(f"{fam} on {f}: kernel {r.kernel_dim}, dropped {dropped}")
    # the Hessian face family is empty at k=6, so it is also dropped at k=7
    full7 = build_element("hinc", 7)
    n7 = full7.family_counts((0, 1, 2))["face_tr1_hess"]
    r7 = check_unisolvence(build_element("hinc", 7, drop=[("face_tr1_hess", (0, 1, 2))]))
    good7 = n7 == 3 and r7.kernel_dim == 3 and not r7.passed
    ok &= good7
    record(11, ok, "k=6: every face family on every face gives kernel = dropped count (6/3/3, Hessian family "
                   f"empty); k=7 Hessian family: dropped {n7}, kernel {r7.kernel_dim}"
           + (f"; failed {notes}" if notes else ""))
    assert ok
