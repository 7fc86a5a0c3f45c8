"""Hardy operator S, its adjoint S*, and the maximal transform f** = S f*."""

from __future__ import annotations

import math

import numpy as np

from .realfun import DecreasingProfile, QuadResult, StepFunction, integrate
from .weights import Weight


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise ValueError("t must be positive")
    return t


def hardy(f, t):
    """S f(t) = (1/t) int_0^t f.  Exact for step functions, profiles and weights."""
    t = _check_t(t)
    if isinstance(f, (StepFunction, DecreasingProfile)):
        return f.primitive(t) / t
    if isinstance(f, Weight):
        return f.W(t) / t
    vals = [integrate(f, 0.0, float(x)).value / float(x) for x in np.atleast_1d(t)]
    return np.array(vals).reshape(t.shape) if t.ndim else vals[0]


def _step_adjoint(f: StepFunction, t: float) -> float:
    if not f.breakpoints.size:
        return 0.0
    starts = np.maximum(f.starts, t)
    ends = f.breakpoints
    mask = ends > starts
    return float(np.sum(f.values[mask] * np.log(ends[mask] / starts[mask])))


def adjoint_hardy(f, t: float) -> QuadResult:
    """S* f(t) = int_t^inf f(s)/s ds, with a divergence flag."""
    t = float(_check_t(t))
    if isinstance(f, StepFunction):
        return QuadResult(_step_adjoint(f, t), 0.0, False, int(f.breakpoints.size))
    if isinstance(f, Weight):
        val = float(f.tail_integral(t, 1.0))
        if math.isinf(val):
            part = integrate(lambda s: f(s) / s, t, math.inf, points=f.breakpoints)
            return QuadResult(part.value, part.abs_error, True, part.pieces_used)
        return QuadResult(val, 0.0, False, 1)
    pts = getattr(f, "breakpoints", ())
    return integrate(lambda s: f(s) / s, t, math.inf, points=tuple(pts))


class MaximalTransform:
    """f** for a decreasing profile, computed from the exact primitive."""

    def __init__(self, source: DecreasingProfile):
        self.source = source

    def __call__(self, t):
        t = _check_t(t)
        return self.source.primitive(t) / t


def maximal(f_star: DecreasingProfile, t):
    return MaximalTransform(f_star)(t)


def hardy_char_levelset(r: float, level: float, w: Weight) -> float:
    """w-measure of {t : S chi_(0,r)(t) > level}; that set is (0, r/level) for level < 1."""
    if r <= 0 or level <= 0:
        raise ValueError("need r > 0 and level > 0")
    if level >= 1:
        return 0.0
    return float(w.W(r / level))
