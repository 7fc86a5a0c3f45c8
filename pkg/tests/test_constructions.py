from __future__ import annotations

import math

import numpy as np
import pytest

import oracles
from lorentz_lab.config import RunConfig
from lorentz_lab.constructions import (ConstructionError, PreconditionError, WqWeight, build_wq,
                                       cumulative_primitive_and_tail, lambda1_equivalent_norm,
                                       smoothing_depth, v_for_unit_indicator, verify_wq_identity)
from lorentz_lab.weights import (Characteristic, Constant, Exponential, LogPoly, Power, ShiftedPower, Tabulated,
                                 smooth)

EXACT_CFG = RunConfig(grid_min=1e-3, grid_max=1e3, per_decade=32)


@pytest.mark.parametrize("w", [Exponential(), ShiftedPower(-2.0)], ids=["exp", "(1+t)^-2"])
@pytest.mark.parametrize("q", [1.0, 2.0, 3.0])
def test_wq_identity_is_exact_for_c1_weights(w, q):
    res = build_wq(w, q, EXACT_CFG)
    assert res.depth == 0
    rep = res.verification
    assert abs(rep.c1 - 1) <= 1e-6 and abs(rep.c2 - 1) <= 1e-6


def test_w2_formula_for_exponential():
    t = np.geomspace(1e-3, 50, 40)
    assert np.allclose(WqWeight(Exponential(), 2.0)(t), oracles.w2_exponential(t), rtol=1e-9, atol=1e-300)


@pytest.mark.parametrize("q", [1.0, 2.0, 3.0])
def test_smoothed_indicator_is_nonnegative_with_bounded_distortion(q):
    res = build_wq(Characteristic(0, 1), q, EXACT_CFG)
    assert res.depth == 2 and res.clamped == 0
    t = np.geomspace(1e-4, 1e4, 400)
    assert np.all(np.asarray(res.wq(t)) >= 0)
    rep = res.verification
    assert rep.passed and rep.c2 / rep.c1 <= 4.0 ** (2 * q)


def test_smoothing_depth_by_regularity():
    assert smoothing_depth(Exponential()) == 0
    assert smoothing_depth(Tabulated([0.1, 1.0, 10.0], [3.0, 2.0, 1.0])) == 1
    assert smoothing_depth(Characteristic(0, 1)) == 2


def test_explicit_v_matches_closed_form():
    v = v_for_unit_indicator()
    # densities: sample off the joints at 1/4, 1/2, 1
    t = np.concatenate((np.linspace(0.2013, 1.1, 181), [0.375]))
    assert np.allclose(v(t), oracles.v_unit_indicator(t), rtol=1e-13, atol=1e-13)
    assert float(v(0.375)) == pytest.approx(0.375 ** -2 * math.log(1.5), rel=1e-14)


def test_explicit_v_is_minus_t_times_twice_averaged_derivative():
    t = np.linspace(0.01, 1.5, 300)
    t = t[np.all(np.abs(t[:, None] - np.array([0.25, 0.5, 1.0])) > 1e-9, axis=1)]
    phi2 = smooth(Characteristic(0, 1), 2)
    assert np.allclose(-t * phi2.derivative(t), v_for_unit_indicator()(t), atol=1e-12)


def test_cumulative_primitive_and_tail_exact_path():
    w = Power(-0.5)
    r = np.array([0.5, 1.0, 4.0])
    head, tail, diverged = cumulative_primitive_and_tail(w, r, 2.0)[:3]
    assert np.allclose(head, 2 * np.sqrt(r))
    assert np.allclose(tail, (2 / 3) * r ** -1.5)
    assert not np.any(diverged)


def test_preconditions():
    with pytest.raises(PreconditionError):
        build_wq(Constant(1.0), 2.0)
    with pytest.raises(PreconditionError):
        build_wq(Power(0.5), 2.0)
    with pytest.raises(PreconditionError):
        build_wq(Exponential(), 0.5)


def test_verify_flags_wrong_candidate():
    rep = verify_wq_identity(Exponential(), Exponential(), 2.0, EXACT_CFG)
    assert not rep.passed or rep.c2 / rep.c1 > 1.5


def test_case_split():
    assert lambda1_equivalent_norm(Characteristic(0, 1)).case == "i"
    assert lambda1_equivalent_norm(Constant(1.0)).case == "ii"
    third = lambda1_equivalent_norm(Constant(1.0) + Power(-0.5))
    assert third.case == "iii" and third.intersect_l1
    assert third.check.holds
    assert lambda1_equivalent_norm(Power(0.5)).case == "inconclusive"


def test_construction_error_is_runtime_error():
    assert issubclass(ConstructionError, RuntimeError)
    assert issubclass(PreconditionError, ValueError)


def test_log_weight_wq_identity():
    res = build_wq(LogPoly([1, -1], 0.0, 0, 1), 2.0, EXACT_CFG)
    assert res.verification.passed
