"""End-to-end acceptance criteria, one test each, at their stated tolerances.

Each test records a one-line PASS/FAIL summary (shown at the end of the pytest
run) before asserting.  The whole module takes roughly 13 minutes on one core.
"""

import math
import time
from collections import defaultdict

import numpy as np
import pytest

from torsionlab.bounds import heat_kernel_constant
from torsionlab.constants import bessel_zero
from torsionlab.discretization import rasterize
from torsionlab.experiments import (
    StudyConfig,
    default_corpus,
    richardson,
    run_bound_suite,
    run_perturbation_study,
    run_punched_study,
    run_table,
    solve_at,
)
from torsionlab.bounds import check_capacity_bracket, check_log_bracket, log_bracket
from torsionlab.geometry import PunchedBoxSpec, ball, box, punched_box, rectangle
from torsionlab.spectrum import mu1_mixed
from torsionlab.torsion import solve_torsion
from torsionlab.wos import wos_torsional_rigidity

pytestmark = pytest.mark.slow

J01, J11 = bessel_zero(0), bessel_zero(1)
CORPORA = ("convex", "punched", "3d")
_suite_cache: dict[float, list[dict]] = {}


def suite(scale: float = 1.0) -> list[dict]:
    """Every report on the full corpus (identity checks included) at one scale."""
    if scale not in _suite_cache:
        reports = []
        for kind in CORPORA:
            reps, errors = run_bound_suite(kind, scale=scale)
            assert not errors, errors
            reports += reps
        _suite_cache[scale] = reports
    return _suite_cache[scale]


def by_domain(reports):
    out = defaultdict(list)
    for r in reports:
        out[r["notes"].split("]")[0].lstrip("[")].append(r)
    return out


def first(reps, prefix):
    hits = [r for r in reps if r["name"].startswith(prefix)]
    assert hits, prefix
    return hits[0]


def planar_convex_names():
    return [e.name for e in default_corpus("convex")]


# 1 -------------------------------------------------------------------------------


def test_criterion_1_shape_table(acceptance):
    t0 = time.perf_counter()
    rows = {r["shape"]: r for r in run_table(StudyConfig("table", ladder=[2.0**-6, 2.0**-7]))}
    elapsed = time.perf_counter() - t0
    targets = {"disc": (J01**2 / 8, 0.01), "equilateral_triangle": (math.pi**2 / 15, 0.01), "half_disc": ((0.25 - 2 / math.pi**2) * J11**2, 0.015)}
    checks, parts = [], []
    for name, (exact, tol) in targets.items():
        F = rows[name]["F"]
        err = abs(F - exact) / exact
        checks.append(err <= tol)
        parts.append(f"{name} F={F:.5f} vs {exact:.5f} ({err:.2%} <= {tol:.1%})")
    checks.append(elapsed < 300)
    ok = all(checks)
    acceptance(1, ok, "; ".join(parts) + f"; runtime {elapsed:.0f}s < 300s")
    assert ok


# 2 -------------------------------------------------------------------------------


def test_criterion_2_polya_and_the4(acceptance):
    doms = by_domain(suite())
    assert len(doms) == 12
    bad = []
    for name, reps in doms.items():
        pol = first(reps, "polya")
        the4 = first(reps, "the4: ")
        the4e = [r for r in reps if r["name"].startswith("the4 (m=2")]
        if not (pol["margin"] > 0 and the4["margin"] > 0 and all(r["margin"] > 0 for r in the4e)):
            bad.append(f"{name}: nonpositive margin")
        if not the4["margin"] < pol["margin"]:
            bad.append(f"{name}: the4 margin not below polya margin")
    worst = min((first(r, "the4: ")["margin"], n) for n, r in doms.items())
    acceptance(2, not bad, f"{len(doms)} domains; smallest the4 margin {worst[0]:.4f} ({worst[1]})" + (f"; {bad}" if bad else ""))
    assert not bad


# 3 -------------------------------------------------------------------------------


def test_criterion_3_convex_sandwich(acceptance):
    doms = by_domain(suite())
    bad, lows, highs = [], [], []
    for name in planar_convex_names():
        reps = doms[name]
        F = first(reps, "polya")["lhs"]
        lows.append(F)
        if not (math.pi**2 / 48 <= F <= 1 - 1 / 11560):
            bad.append(f"{name}: F={F:.5f} outside sandwich")
        for prefix in ("k4", "k5", "c6", "a3", "convex (m=2)"):
            r = first(reps, prefix)
            if not r["pass"]:
                bad.append(f"{name}: {prefix} fails")
        highs.append(F)
    acceptance(3, not bad, f"{len(lows)} planar convex domains; F in [{min(lows):.4f}, {max(highs):.4f}] within [{math.pi**2 / 48:.4f}, {1 - 1 / 11560:.6f}]; k4, k5, c6 pass" + (f"; {bad}" if bad else ""))
    assert not bad


# 4 -------------------------------------------------------------------------------


def test_criterion_4_the3_and_thin_rectangles(acceptance):
    doms = by_domain(suite())
    bad = [n for n in planar_convex_names() if not first(doms[n], "a2")["pass"]]
    Fs = {}
    ladder = [2.0**-5, 2.0**-6]
    for a in (5, 10, 20):
        dom = rectangle(1.0, float(a))
        sols = [solve_at(dom, h, float(a)) for h in ladder]
        Fs[a] = richardson(ladder, [s.F for s in sols], 2.0).extrapolated
    trend = Fs[5] < Fs[10] < Fs[20] < math.pi**2 / 12 and Fs[20] > 0.80
    ok = not bad and trend
    acceptance(4, ok, "a2 on convex corpus " + ("pass" if not bad else f"fails on {bad}") + "; F(5:1,10:1,20:1) = " + ", ".join(f"{Fs[a]:.4f}" for a in (5, 10, 20)) + f" -> pi^2/12={math.pi**2 / 12:.4f}")
    assert ok


# 5 -------------------------------------------------------------------------------


def test_criterion_5_mixed_brackets(acceptance):
    parts, ok = [], True
    for d in (0.01, 0.02, 0.05):
        r = mu1_mixed(1.0, d)
        lo, hi = log_bracket(1.0, d)
        inside = lo <= r.mu1 <= hi and check_log_bracket(r.mu1, 1.0, d).passed
        ok &= inside
        parts.append(f"delta={d}: {lo:.4g} <= {r.mu1:.4f} <= {hi:.4g}")
    k3 = heat_kernel_constant(3)
    r3 = mu1_mixed(1.0, 0.01, m=3)
    cap = check_capacity_bracket(r3.mu1, 1.0, 0.01, 3)
    ok &= 0.0101 <= k3 <= 0.0102 and cap.passed and r3.mu1 >= cap.lhs
    parts.append(f"m=3: k3={k3:.6f}, {cap.lhs:.4g} <= mu1={r3.mu1:.4f}")
    acceptance(5, ok, "; ".join(parts))
    assert ok


# 6 -------------------------------------------------------------------------------


def test_criterion_6_punched_study(acceptance):
    rows = run_punched_study(1.0, [1, 2, 4, 8], 2)
    assert all(r["error"] is None for r in rows), rows
    F = [r["F"] for r in rows]
    F_square = box(1.0, 1.0).exact.F
    increasing = all(b > a for a, b in zip(F, F[1:]))
    above_e42 = all(r["pass"] for r in rows)
    gain = F[-1] > F_square + 0.05
    ok = increasing and above_e42 and gain
    acceptance(
        6,
        ok,
        "F(N=1,2,4,8) = "
        + ", ".join(f"{x:.4f}" for x in F)
        + f"; strictly increasing: {increasing}; F >= e42 bound: {above_e42}; F(8) > F(square)+0.05 = {F_square + 0.05:.4f}: {gain}",
    )
    assert increasing, f"F not strictly increasing in N: {F}"
    assert above_e42 and gain


# 7 -------------------------------------------------------------------------------


def test_criterion_7_perturbation(acceptance):
    rows, fit = run_perturbation_study("square", (0.0, 0.0), [2.0**-k for k in (4, 5, 6, 7)])
    assert all(r["error"] is None for r in rows)
    el = [r["rel_err_lambda"] for r in rows]
    et = [r["rel_err_T"] for r in rows]
    dec = all(b < a for a, b in zip(el, el[1:])) and all(b < a for a, b in zip(et, et[1:]))
    signs = all(r["lambda1"] > r["lambda1_base"] and r["T"] < r["T_base"] for r in rows)
    fit_ok = fit.rel_err_lambda <= 0.15 and fit.rel_err_T <= 0.15
    ok = dec and signs and fit_ok
    acceptance(
        7,
        ok,
        f"rel err lambda {el[0]:.3f}->{el[-1]:.3f}, T {et[0]:.3f}->{et[-1]:.3f} (strictly decreasing: {dec}); "
        f"fitted slopes {fit.slope_lambda:.3f} vs {fit.target_lambda:.3f} ({fit.rel_err_lambda:.1%}), "
        f"{fit.slope_T:.4f} vs {fit.target_T:.4f} ({fit.rel_err_T:.1%})",
    )
    assert ok


# 8 -------------------------------------------------------------------------------


def _grid_T(domain, ladder, p):
    return richardson(ladder, [solve_torsion(rasterize(domain, h)).T for h in ladder], p).extrapolated


def test_criterion_8_wos_oracle(acceptance):
    cases = [
        ("disc", ball(1.0, 2), [2.0**-6, 2.0**-7], 1.0),
        ("square", box(1.0, 1.0), [2.0**-6, 2.0**-7], 2.0),
        ("punched(1,4,0.05)", punched_box(PunchedBoxSpec(1.0, 4, 0.05)), [2.0**-8, 2.0**-9], 1.0),
    ]
    ok, parts = True, []
    for i, (name, dom, ladder, p) in enumerate(cases):
        est = wos_torsional_rigidity(dom, 100_000, seed=1000 + i)
        grid = _grid_T(dom, ladder, p)
        allowed = max(3 * est.stderr, 0.02 * grid)
        agree = abs(est.mean - grid) <= allowed
        ok &= agree
        parts.append(f"{name} WoS {est.mean:.6f}+-{est.stderr:.1e} vs grid {grid:.6f}")
    again = wos_torsional_rigidity(cases[0][1], 100_000, seed=1000)
    first_est = wos_torsional_rigidity(cases[0][1], 100_000, seed=1000)
    det = again == first_est
    ok &= det
    acceptance(8, ok, "; ".join(parts) + f"; seed-deterministic: {det}")
    assert ok


# 9 -------------------------------------------------------------------------------

IDENTITY_PREFIXES = ("layer-cake", "e23", "e20", "a9", "a15")


def test_criterion_9_identities_and_scaling(acceptance):
    base = suite(1.0)
    doms = by_domain(base)
    bad = []
    for name, reps in doms.items():
        for prefix in IDENTITY_PREFIXES:
            hits = [r for r in reps if r["name"].startswith(prefix)]
            if not hits:
                bad.append(f"{name}: no {prefix} report")
            bad += [f"{name}: {r['name']} fails" for r in hits if not r["pass"]]

    def verdicts(reports):
        return [(r["notes"].split("]")[0], r["name"], r["pass"]) for r in reports]

    scaled = {a: suite(a) for a in (0.5, 3.0)}
    invariant = all(verdicts(s) == verdicts(base) for s in scaled.values())
    ok = not bad and invariant
    n_id = sum(r["name"].startswith(IDENTITY_PREFIXES) for r in base)
    acceptance(9, ok, f"{n_id} identity reports on {len(doms)} domains all pass: {not bad}; {len(base)} verdicts identical at scale 0.5 and 3: {invariant}" + (f"; {bad[:5]}" if bad else ""))
    assert ok
