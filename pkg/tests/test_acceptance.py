"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line.

Run standalone (``python tests/test_acceptance.py``) or under pytest, where the
lines are repeated in the terminal summary.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest

import oracles
from lorentz_lab import gallery
from lorentz_lab.classes import (certify_bp, certify_rp, check_mean_value_decreasing,
                                 check_restricted_weak_type)
from lorentz_lab.config import RunConfig
from lorentz_lab.constructions import (PreconditionError, WqWeight, build_wq, lambda1_equivalent_norm,
                                       v_for_unit_indicator, verify_wq_identity)
from lorentz_lab.embeddings import (check_gamma1_equivalence, check_sandwich, fit_loglog,
                                    log_tail_gamma_alpha_partial, log_tail_lambda1_partial)
from lorentz_lab.norms import gamma_alpha_norm, gamma_norm, gamma_weak_norm, lambda_norm, lambda_weak_norm
from lorentz_lab.realfun import StepFunction, rearrange
from lorentz_lab.weights import (Characteristic, Constant, Dilated, Exponential, LogPoly, Power, Shifted,
                                 ShiftedPower, limit_at_infinity)

# pinned tolerances
WQ_TOL = 1e-6
CONSTANT_RTOL = 0.05
RWT_FACTOR = 2.0
BASELINE_RTOL = 0.01
CHAIN_SLACK = 1e-9
SUBADD_SLACK = 1e-12
MEAN_VALUE_TOL = 1e-12
CAUCHY_TOL = 1e-3
LOGLOG_R2 = 0.99
GALLERY_SECONDS = 60.0

RESULTS: dict[int, str] = {}


def report(n: int, ok: bool, detail: str):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def family_weights():
    return [Constant(1.0), Characteristic(0, 1), Power(-0.5), Power(0.5), LogPoly([1, -1], 0.0, 0, 1),
            LogPoly([0, 2, 1], 0.0, 0, math.exp(-2)), Exponential(), ShiftedPower(-2.0),
            Constant(1.0) + Power(-0.5), Power(1.0)]


def random_family_weight(rng):
    kind = int(rng.integers(0, 6))
    c = float(10 ** rng.uniform(-1, 1))
    if kind == 0:
        return Power(float(rng.uniform(-0.9, 2.5)))
    if kind == 1:
        return Characteristic(0, c)
    if kind == 2:
        return Dilated(LogPoly([1, -1], 0.0, 0, 1), c)
    if kind == 3:
        return Constant(1.0) + Power(float(rng.uniform(-0.9, -0.1)))
    if kind == 4:
        return Exponential(rate=c)
    return Power(float(rng.uniform(-0.5, 1.0)), 0.0, c)


def random_step(rng, monotone=False):
    n = int(rng.integers(1, 9))
    bps = np.sort(np.exp(rng.uniform(-4.0, 4.0, n)))
    vals = rng.uniform(0.1, 10.0, n)
    f = StepFunction(bps, np.sort(vals)[::-1] if monotone else vals)
    return rearrange(f)


# --------------------------------------------------------------------------

def test_criterion_01_wq_exactness():
    cfg = RunConfig(grid_min=1e-3, grid_max=1e3)
    start = time.perf_counter()
    worst = 0.0
    for w in (Exponential(), ShiftedPower(-2.0)):
        for q in (1.0, 2.0, 3.0):
            rep = verify_wq_identity(w, WqWeight(w, q), q, cfg)
            worst = max(worst, abs(rep.c1 - 1), abs(rep.c2 - 1))
    secs = time.perf_counter() - start
    report(1, worst <= WQ_TOL and secs < 5.0, f"max |c - 1| = {worst:.2e} (tol {WQ_TOL:g}), {secs:.2f} s")


def test_criterion_02_power_weight_oracle():
    cases = [(g, 1.0) for g in (-0.75, -0.5, -0.25, 0.0, 0.5)]
    cases += [(g, 2.0) for g in (-0.5, 0.0, 0.5, 1.0, 1.5)]
    cases += [(g, 3.0) for g in (0.0, 1.0, 1.5, 2.0, 2.5)]
    start = time.perf_counter()
    bad = []
    for gamma, p in cases:
        w = Power(gamma)
        bp, rp = certify_bp(w, p), certify_rp(w, p)
        if bp.is_member != (gamma < p - 1) or rp.is_member != (gamma <= p - 1):
            bad.append((gamma, p, bp.verdict, rp.verdict))
            continue
        expected = oracles.bp_ratio_power(gamma, p)
        if expected is not None and abs(bp.constant / expected - 1) > CONSTANT_RTOL:
            bad.append((gamma, p, "B_p constant", bp.constant, expected))
        if rp.is_member and abs(rp.constant - 1) > CONSTANT_RTOL:
            bad.append((gamma, p, "R_p constant", rp.constant))
    secs = time.perf_counter() - start
    report(2, not bad and secs < 5.0 and len(cases) == 15,
           f"{len(cases) - len(bad)}/{len(cases)} combinations match, {secs:.2f} s {bad or ''}")


def test_criterion_03_r1_not_b1():
    cfg = RunConfig(grid_min=1e-5)
    weights = {"chi_(0,1)": Characteristic(0, 1), "(1-log t)chi_(0,1)": LogPoly([1, -1], 0.0, 0, 1),
               "log t(log t+2)chi_(0,e^-2)": LogPoly([0, 2, 1], 0.0, 0, math.exp(-2))}
    notes, ok = [], True
    for name, w in weights.items():
        rp, bp = certify_rp(w, 1.0, cfg), certify_bp(w, 1.0, cfg)
        good = rp.is_member and 1.0 <= rp.constant <= 1.01 and bp.verdict == "not_member"
        if name == "chi_(0,1)":
            # the ratio reached on the base grid (first history entry) already exceeds 10
            good = good and bp.history[0] > 10 and bp.witness["ratio"] > 10
        ok = ok and good
        notes.append(f"{name}: R_1 C={rp.constant:.4g}, B_1 {bp.verdict} at ratio {bp.history[0]:.3g}")
    report(3, ok, "; ".join(notes))


def test_criterion_04_restricted_weak_type_cross_oracle():
    rng = np.random.default_rng(2024)
    agree, ratio_ok, total, worst = 0, 0, 0, 1.0
    for _ in range(20):
        w = random_family_weight(rng)
        for p in (1.0, 2.0):
            a, b = certify_rp(w, p), check_restricted_weak_type(w, p)
            total += 1
            if a.verdict == b.verdict:
                agree += 1
                if a.is_member:
                    r = b.constant / a.constant
                    worst = max(worst, r, 1 / r)
                    ratio_ok += r <= RWT_FACTOR and 1 / r <= RWT_FACTOR
                else:
                    ratio_ok += 1
    report(4, agree == total and ratio_ok == total,
           f"verdicts agree {agree}/{total}, worst constant factor {worst:.3g} (limit {RWT_FACTOR:g})")


def test_criterion_05_explicit_pair_baseline():
    cfg = RunConfig(grid_min=1e-3, grid_max=1e3)
    verdict = check_gamma1_equivalence(Characteristic(0, 1), v_for_unit_indicator(), cfg)
    b1, b2 = oracles.GAMMA1_EQUIVALENCE_BASELINE
    ok = verdict.holds and verdict.constants is not None
    if ok:
        c1, c2 = verdict.constants
        ok = math.isfinite(c2) and abs(c1 / b1 - 1) <= BASELINE_RTOL and abs(c2 / b2 - 1) <= BASELINE_RTOL
    report(5, ok, f"{verdict.status}, constants {verdict.constants} vs frozen ({b1:.6g}, {b2:.6g})")


def test_criterion_06_norm_ordering():
    rng = np.random.default_rng(6)
    weights = family_weights()
    violations, checks = 0, 0
    for _ in range(100):
        f = random_step(rng, monotone=True)
        for w in weights:
            for p in (1.0, 2.0):
                alpha, beta = np.sort(rng.uniform(0.0, p, 2))
                vals = [lambda_weak_norm(f, w, p), lambda_norm(f, w, p), gamma_alpha_norm(f, w, p, beta),
                        gamma_alpha_norm(f, w, p, alpha), gamma_norm(f, w, p)]
                chain = [math.inf if v.diverged else v.value for v in vals]
                for lo, hi in zip(chain, chain[1:]):
                    checks += 1
                    violations += lo > hi * (1 + CHAIN_SLACK)
                q = float(rng.uniform(0.5, 6.0))
                weak = gamma_weak_norm(f, w, p)
                strong = gamma_norm(f, w, p, q)
                checks += 1
                lhs = math.inf if weak.diverged else weak.value
                rhs = math.inf if strong.diverged else (q / p) ** (1 / q) * strong.value
                violations += lhs > rhs * (1 + CHAIN_SLACK)
    report(6, violations == 0, f"{violations} violations in {checks} inequalities")


def test_criterion_07_subadditivity_and_mean_values():
    rng = np.random.default_rng(7)
    t = np.geomspace(1e-4, 1e4, 801)
    worst_sub = -math.inf
    for _ in range(100):
        n = int(rng.integers(1, 9))
        h1 = StepFunction(np.sort(np.exp(rng.uniform(-4, 4, n))), rng.uniform(0, 10, n))
        h2 = StepFunction(np.sort(np.exp(rng.uniform(-4, 4, n))), rng.uniform(0, 10, n))
        lhs = rearrange(h1 + h2).maximal(t)
        rhs = rearrange(h1).maximal(t) + rearrange(h2).maximal(t)
        worst_sub = max(worst_sub, float(np.max((lhs - rhs) / rhs)))
    cfg = RunConfig(grid_min=1e-4, grid_max=1e4, per_decade=32)
    worst_mv = 0.0
    for _ in range(50):
        g = random_step(rng, monotone=True)
        mu = random_family_weight(rng)
        worst_mv = max(worst_mv, check_mean_value_decreasing(g, mu, cfg).max_increase)
    ok = worst_sub <= SUBADD_SLACK and worst_mv <= MEAN_VALUE_TOL
    report(7, ok, f"max relative excess of (f+g)** over f**+g** = {worst_sub:.2e}; "
                  f"max mean-value increase = {worst_mv:.2e}")


def test_criterion_08_log_tail_counterexample():
    alpha = 0.5
    decades = np.array([10.0 ** k for k in range(1, 7)])
    lam = log_tail_lambda1_partial(alpha, decades)
    diffs = np.abs(np.diff(lam))
    doubling = float(np.diff(log_tail_lambda1_partial(alpha, [1e6, 2e6]))[0])
    limit_gap = abs(float(lam[-1]) - oracles.LOG_TAIL_LAMBDA1_TOTAL)
    cauchy = diffs[-1] < CAUCHY_TOL

    T = np.array([10.0 ** k for k in range(4, 17, 2)])
    gam = log_tail_gamma_alpha_partial(alpha, T)
    slope, _, r2 = fit_loglog(T, gam)
    growth = bool(np.all(np.diff(gam) > 0)) and slope > 0 and r2 >= LOGLOG_R2
    report(8, cauchy and growth,
           f"Lambda^1 step 10^5->10^6 = {diffs[-1]:.2e}, 10^6->2*10^6 = {doubling:.2e} "
           f"(tol {CAUCHY_TOL:g}; gap to the limit 2 is {limit_gap:.3f} = 1/log T); "
           f"Gamma^1_alpha monotone, slope {slope:.3f} in log log T, R^2 = {r2:.5f}")


def test_criterion_09_sandwich_failure_and_case_split():
    cfg = RunConfig(grid_min=1e-3, grid_max=1e3, per_decade=32)
    failures, total = 0, 0
    for w in (Constant(1.0), Constant(1.0) + Power(-0.5)):
        lim = limit_at_infinity(w)
        try:
            build_wq(w, 2.0, cfg)
            refused = False
        except PreconditionError:
            refused = True
        candidates = [WqWeight(w, 2.0), build_wq(Shifted(w, lim), 2.0, cfg).wq, Constant(1.0),
                      Exponential(), Power(-0.5)]
        for v in candidates:
            total += 1
            failures += not check_sandwich(w, v, 2.0, cfg).holds
        failures -= not refused
    split = {name: lambda1_equivalent_norm(w, cfg) for name, w in
             (("1", Constant(1.0)), ("chi", Characteristic(0, 1)), ("1+t^-1/2", Constant(1.0) + Power(-0.5)))}
    split_ok = (split["1"].case == "ii" and split["chi"].case == "i" and split["chi"].check.holds
                and split["1+t^-1/2"].case == "iii")
    report(9, failures == total and split_ok,
           f"sandwich fails {failures}/{total}; cases " + ", ".join(f"{k}: {v.case}" for k, v in split.items()))


def test_criterion_10_gallery():
    start = time.perf_counter()
    summary = gallery.run_all()
    secs = time.perf_counter() - start
    adjudication = gallery.run("power-indicator-b1-convention").to_dict()["steps"][0]["report"]["members"]
    ok = summary.passed and secs < GALLERY_SECONDS and len(adjudication) == 1
    passed = sum(r.passed for r in summary.reports)
    report(10, ok, f"{passed}/{len(summary.reports)} scenarios pass in {secs:.1f} s; "
                   f"B_1 convention members {adjudication}")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
