from __future__ import annotations

import math

import numpy as np
import pytest

import oracles
from lorentz_lab.classes import (certify_bp, certify_quasi_decreasing_mean, certify_rp,
                                 check_mean_value_decreasing, check_restricted_weak_type)
from lorentz_lab.config import RunConfig
from lorentz_lab.realfun import DecreasingStep
from lorentz_lab.weights import Characteristic, Constant, Dilated, LogPoly, Power

CFG = RunConfig(grid_min=1e-4, grid_max=1e4, per_decade=32)
POWER_CASES = [(g, p) for p in (1.0, 2.0) for g in (-0.5, 0.0, 0.5, 1.0, 1.5) if g <= p + 0.5]


@pytest.mark.parametrize("gamma,p", POWER_CASES)
def test_power_weight_rule(gamma, p):
    w = Power(gamma)
    bp = certify_bp(w, p, CFG)
    rp = certify_rp(w, p, CFG)
    assert bp.is_member == (gamma < p - 1)
    assert rp.is_member == (gamma <= p - 1)
    expected = oracles.bp_ratio_power(gamma, p)
    if expected is not None:
        assert bp.constant == pytest.approx(expected, rel=0.05)
    if rp.is_member:
        assert rp.constant == pytest.approx(1.0, rel=0.05)


def test_indicator_dichotomy():
    w = Characteristic(0, 1)
    rp = certify_rp(w, 1.0)
    assert rp.is_member and 1.0 <= rp.constant <= 1.01
    bp = certify_bp(w, 1.0, RunConfig(grid_min=1e-5))
    assert bp.verdict == "not_member"
    assert bp.witness["ratio"] > 10
    r = bp.witness["r"]
    assert bp.witness["ratio"] == pytest.approx(oracles.bp_ratio_char01(r), rel=1e-6)


@pytest.mark.parametrize("w", [Characteristic(0, 1), LogPoly([1, -1], 0.0, 0, 1), Power(-0.5), Power(1.0)],
                         ids=["char01", "logweight", "t^-1/2", "t"])
@pytest.mark.parametrize("c", [0.1, 10.0])
def test_dilation_invariance(w, c):
    for cert in (certify_bp, certify_rp):
        a, b = cert(w, 1.0, CFG), cert(Dilated(w, c), 1.0, CFG)
        assert a.verdict == b.verdict
        if a.is_member:
            assert b.constant == pytest.approx(a.constant, rel=0.05)


@pytest.mark.parametrize("w", [Power(-0.5), Power(-0.2), Constant(1.0) + Power(-0.5), Characteristic(0, 1),
                               LogPoly([1, -1], 0.0, 0, 1)])
def test_bp_inside_rp(w):
    if certify_bp(w, 1.0, CFG).is_member:
        assert certify_rp(w, 1.0, CFG).is_member


@pytest.mark.parametrize("w,p", [(Characteristic(0, 1), 1.0), (Power(0.5), 1.0), (Power(1.0), 2.0),
                                 (LogPoly([1, -1], 0.0, 0, 1), 1.0), (Power(1.5), 2.0)])
def test_restricted_weak_type_agrees_with_rp(w, p):
    a, b = certify_rp(w, p, CFG), check_restricted_weak_type(w, p, CFG)
    assert a.verdict == b.verdict
    if a.is_member:
        assert 0.5 <= b.constant / a.constant <= 2.0


def test_restricted_weak_type_indicator_constant():
    cert = check_restricted_weak_type(Characteristic(0, 1), 1.0, CFG)
    assert cert.is_member and cert.constant == pytest.approx(1.0, rel=0.01)


def test_quasi_decreasing_primitive():
    assert certify_quasi_decreasing_mean(Power(1.0), CFG).verdict == "not_member"
    assert certify_quasi_decreasing_mean(Power(-0.5), CFG).is_member


def test_b1_exponent_convention():
    grow = certify_bp(Power(0.5, 0.0, 1.0), 1.0, RunConfig(grid_min=1e-5))
    decay = certify_bp(Power(-0.5, 0.0, 1.0), 1.0, RunConfig(grid_min=1e-5))
    assert grow.verdict == "not_member"
    assert decay.is_member and decay.constant == pytest.approx(1.0, rel=0.05)
    assert grow.witness["ratio"] == pytest.approx(oracles.bp_ratio_increasing_root(grow.witness["r"]), rel=1e-6)


def test_mean_value_monotone_for_decreasing_g():
    rng = np.random.default_rng(7)
    for _ in range(10):
        n = int(rng.integers(1, 6))
        g = DecreasingStep(np.sort(rng.uniform(0.01, 10, n)), np.sort(rng.uniform(0.1, 5, n))[::-1])
        mu = Power(float(rng.uniform(-0.9, 2.0)))
        rep = check_mean_value_decreasing(g, mu, CFG)
        assert rep.monotone and rep.max_increase <= 1e-12


def test_mean_value_detects_increase():
    g = lambda t: np.minimum(np.asarray(t), 1.0)  # noqa: E731
    rep = check_mean_value_decreasing(g, Constant(1.0), RunConfig(grid_min=1e-2, grid_max=1e2, per_decade=8))
    assert not rep.monotone


def test_certificate_serialises():
    d = certify_rp(Characteristic(0, 1), 1.0, CFG).to_dict()
    assert d["class"] and d["constant_label"] == "observed constant"
    assert math.isfinite(d["constant"])
