from __future__ import annotations

import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from lorentz_lab.config import RunConfig  # noqa: E402
from lorentz_lab.realfun import DecreasingStep, StepFunction  # noqa: E402

settings.register_profile("lab", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("lab")


@pytest.fixture
def cfg():
    return RunConfig()


@pytest.fixture
def small_cfg():
    return RunConfig(grid_min=1e-3, grid_max=1e3, per_decade=32)


positive = st.floats(min_value=0.05, max_value=20.0, allow_nan=False)
lengths = st.lists(st.floats(min_value=0.01, max_value=5.0), min_size=1, max_size=8)


@st.composite
def step_functions(draw):
    lens = draw(lengths)
    vals = draw(st.lists(st.floats(min_value=0.0, max_value=10.0), min_size=len(lens), max_size=len(lens)))
    return StepFunction(np.cumsum(lens), vals)


@st.composite
def decreasing_steps(draw):
    lens = draw(lengths)
    vals = draw(st.lists(positive, min_size=len(lens), max_size=len(lens)))
    return DecreasingStep(np.cumsum(lens), sorted(vals, reverse=True))


def random_decreasing_step(rng, n_max=8):
    n = int(rng.integers(1, n_max + 1))
    bp = np.cumsum(rng.uniform(0.01, 5.0, n))
    vals = np.sort(rng.uniform(0.05, 10.0, n))[::-1]
    return DecreasingStep(bp, vals)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
