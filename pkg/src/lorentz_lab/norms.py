"""Lorentz and Gamma functionals of a decreasing profile against a weight.

All integrals go through the exact primitive of ``f*`` (so ``f**`` is exact) and
the weight's own primitive.  On the initial stretch where ``f*`` is constant,
``f* = f**`` and the integrands collapse to closed forms in ``W``; only the
remainder is integrated numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .config import log_grid
from .realfun import AnalyticDecay, DecreasingProfile, DecreasingStep, QuadResult, integrate
from .weights import Constant, Weight

SUP_PER_DECADE = 512


@dataclass(frozen=True)
class NormParams:
    p: float
    q: float = math.inf
    alpha: float = 0.0

    def __post_init__(self):
        if not (0 < self.p < math.inf):
            raise ValueError("need 0 < p < inf")
        if not (self.q > 0):
            raise ValueError("need q > 0")
        if not (0 <= self.alpha <= self.p):
            raise ValueError("need 0 <= alpha <= p")


@dataclass(frozen=True)
class NormValue:
    value: float
    diverged: bool = False
    error: float = 0.0

    def to_dict(self):
        return {"value": self.value, "diverged": self.diverged, "error": self.error}


def _points(f, w):
    pts = set(float(x) for x in np.atleast_1d(np.asarray(getattr(f, "breakpoints", ()), dtype=float)))
    pts |= set(w.breakpoints)
    return tuple(sorted(x for x in pts if 0 < x < math.inf))


def _is_zero(f) -> bool:
    return isinstance(f, DecreasingStep) and not f.breakpoints.size


def _head(f):
    """(t_c, value) with f* constant equal to value on (0, t_c); t_c may be 0."""
    tc = float(f.cap_end)
    if tc <= 0 or not math.isfinite(tc):
        return 0.0, 0.0
    return tc, float(f(0.5 * tc))


def _rest(g, a, b, pts) -> QuadResult:
    if b <= a:
        return QuadResult(0.0, 0.0, False, 0)
    return integrate(g, a, b, points=pts)


def _root(res: QuadResult, head: float, p: float) -> NormValue:
    total = head + res.value
    return NormValue(max(total, 0.0) ** (1.0 / p), res.diverged, res.abs_error)


def lambda_norm(f: DecreasingProfile, w: Weight, p: float) -> NormValue:
    """(int (f*)^p w)^(1/p)."""
    NormParams(p)
    if _is_zero(f):
        return NormValue(0.0)
    if isinstance(f, DecreasingStep):
        Wb = w.W(np.concatenate(([0.0], f.breakpoints)))
        total = float(np.sum(f.values ** p * np.diff(Wb)))
        return NormValue(total ** (1.0 / p), not math.isfinite(total))
    if isinstance(f, AnalyticDecay) and isinstance(w, Constant):
        total = w.c * f.power(p).total()
        if math.isinf(total):
            part = lambda_integral(f, w, p, 0.0, 2.0**60)
            return NormValue(part.value ** (1.0 / p), True)
        return NormValue(total ** (1.0 / p))
    tc, v0 = _head(f)
    head = v0 ** p * float(w.W(tc)) if tc else 0.0
    res = _rest(lambda t: f(t) ** p * w(t), tc, f.support_end, _points(f, w))
    return _root(res, head, p)


def lambda_integral(f, w, p, a, b) -> QuadResult:
    """int_a^b (f*)^p w, for partial-integral studies."""
    return integrate(lambda t: f(t) ** p * w(t), a, b, points=_points(f, w))


def _gamma_integrand(f, w, p, q):
    expo = q / p - 1.0

    def g(t):
        wt = w(t)
        with np.errstate(all="ignore"):
            val = (f.primitive(t) / t) ** q * w.W(t) ** expo * wt
        return np.where(wt > 0, val, 0.0)
    return g


def gamma_norm(f: DecreasingProfile, w: Weight, p: float, q: float | None = None) -> NormValue:
    """(int (f**)^q W^(q/p - 1) w)^(1/q); ``q`` defaults to ``p``."""
    q = p if q is None else q
    NormParams(p, q)
    if not math.isfinite(q):
        raise ValueError("use gamma_weak_norm for q = inf")
    if _is_zero(f):
        return NormValue(0.0)
    tc, v0 = _head(f)
    # on (0, tc): f** = v0 and int W^(q/p-1) w = (p/q) W^(q/p)
    head = v0 ** q * (p / q) * float(w.W(tc)) ** (q / p) if tc else 0.0
    res = integrate(_gamma_integrand(f, w, p, q), tc, math.inf, points=_points(f, w))
    return _root(res, head, q)


def _alpha_integrand(f, w, p, alpha):
    def g(t):
        fs = f(t)
        with np.errstate(all="ignore"):
            val = fs ** alpha * (f.primitive(t) / t) ** (p - alpha) * w(t)
        return np.where(fs > 0, val, 0.0)
    return g


def gamma_alpha_norm(f: DecreasingProfile, w: Weight, p: float, alpha: float) -> NormValue:
    """(int (f*)^alpha (f**)^(p-alpha) w)^(1/p)."""
    NormParams(p, alpha=alpha)
    if alpha == p:
        return lambda_norm(f, w, p)
    if alpha == 0:
        return gamma_norm(f, w, p, p)
    if _is_zero(f):
        return NormValue(0.0)
    tc, v0 = _head(f)
    head = v0 ** p * float(w.W(tc)) if tc else 0.0
    res = _rest(_alpha_integrand(f, w, p, alpha), tc, f.support_end, _points(f, w))
    return _root(res, head, p)


def gamma_alpha_integral(f, w, p, alpha, a, b) -> QuadResult:
    """int_a^b (f*)^alpha (f**)^(p-alpha) w without the outer root."""
    return integrate(_alpha_integrand(f, w, p, alpha), a, b, points=_points(f, w))


# --------------------------------------------------------------------------
# supremum functionals
# --------------------------------------------------------------------------

def _sup_search(g, pts, per_decade=SUP_PER_DECADE):
    """sup over t > 0 of a nonnegative product; returns (value, argmax, diverged).

    Log grid plus the structural points (and their left neighbours), a bounded
    refinement around the running argmax, and geometric extension at either
    end while the maximum sits on the boundary.
    """
    finite = [x for x in pts if 0 < x < math.inf]
    lo = min([1e-6] + [x / 100 for x in finite])
    hi = max([1e6] + [x * 100 for x in finite])
    diverged = False
    while True:
        grid = log_grid(lo, hi, per_decade)
        extra = np.array(finite + [x * (1 - 1e-13) for x in finite], dtype=float)
        t = np.unique(np.concatenate((grid, extra)))
        vals = np.nan_to_num(np.asarray(g(t), dtype=float), nan=0.0)
        i = int(np.argmax(vals))
        if i == t.size - 1 and vals[i] > 0 and vals[i] > vals[i - 1] * (1 + 1e-12):
            if hi >= 1e290:
                diverged = True
                break
            hi *= 1e6
            continue
        if i == 0 and vals[0] > 0 and vals[0] > vals[1] * (1 + 1e-12):
            if lo <= 1e-290:
                diverged = True
                break
            lo /= 1e6
            continue
        break
    best, arg = float(vals[i]), float(t[i])
    if 0 < i < t.size - 1:
        res = minimize_scalar(lambda x: -float(np.asarray(g(np.array([x])))[0]),
                              bounds=(t[i - 1], t[i + 1]), method="bounded",
                              options={"xatol": 1e-12 * t[i]})
        cand = -float(res.fun)
        if cand > best:
            best, arg = cand, float(res.x)
    if diverged:
        best = math.inf if not math.isfinite(best) else best
    return best, arg, diverged


def lambda_weak_norm(f: DecreasingProfile, w: Weight, p: float) -> NormValue:
    """sup_t f*(t) W(t)^(1/p)."""
    NormParams(p)
    if _is_zero(f):
        return NormValue(0.0)
    if isinstance(f, DecreasingStep):
        # decreasing times increasing: the sup sits at right ends of the pieces
        return NormValue(float(np.max(f.values * w.W(f.breakpoints) ** (1.0 / p))))

    def g(t):
        return f(t) * w.W(t) ** (1.0 / p)
    val, _, div = _sup_search(g, _points(f, w))
    return NormValue(val, div)


def gamma_weak_norm(f: DecreasingProfile, w: Weight, p: float) -> NormValue:
    """sup_t f**(t) W(t)^(1/p)."""
    NormParams(p)
    if _is_zero(f):
        return NormValue(0.0)

    def g(t):
        return f.primitive(t) / t * w.W(t) ** (1.0 / p)
    val, _, div = _sup_search(g, _points(f, w))
    return NormValue(val, div)


SPACES = ("lambda", "lambda_weak", "gamma", "gamma_weak", "gamma_alpha")


def evaluate(space: str, f: DecreasingProfile, w: Weight, p: float, q: float | None = None,
             alpha: float | None = None) -> NormValue:
    if space == "lambda":
        return lambda_norm(f, w, p)
    if space == "lambda_weak":
        return lambda_weak_norm(f, w, p)
    if space == "gamma":
        if q is not None and not math.isfinite(q):
            return gamma_weak_norm(f, w, p)
        return gamma_norm(f, w, p, q)
    if space == "gamma_weak":
        return gamma_weak_norm(f, w, p)
    if space == "gamma_alpha":
        if alpha is None:
            raise ValueError("gamma_alpha needs alpha")
        return gamma_alpha_norm(f, w, p, alpha)
    raise ValueError(f"unknown space {space!r}; expected one of {SPACES}")
