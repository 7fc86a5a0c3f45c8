"""Positive functions on (0, inf): step functions, decreasing profiles, integration.

Step functions are right-continuous with left-closed pieces: the value ``v_i``
holds on ``[t_{i-1}, t_i)`` with ``t_0 = 0`` and the function vanishes beyond
the last breakpoint.  Everything here is immutable.
"""

from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate as _sp_integrate

from .config import SpecError

HORIZON = 2.0**60
DEFAULT_TOL = 1e-9


# --------------------------------------------------------------------------
# integration
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadResult:
    value: float
    abs_error: float
    diverged: bool
    pieces_used: int


@lru_cache(maxsize=None)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def _gl(f, lo, hi, n):
    x, w = _leggauss(n)
    half = 0.5 * (hi - lo)
    return half * float(np.dot(w, f(0.5 * (hi + lo) + half * x)))


def _gl_adaptive(f, lo, hi, rtol, max_intervals=4000):
    """Globally adaptive Gauss-Legendre (24/48 point pairs), vectorised integrand."""

    def est(a, b):
        fine = _gl(f, a, b, 48)
        return fine, abs(fine - _gl(f, a, b, 24))

    v, e = est(lo, hi)
    heap = [(-e, lo, hi, v)]
    total, err = v, e
    n, roundoff = 1, 0
    while err > rtol * abs(total) and err > 1e-300 and n < max_intervals and roundoff < 6:
        neg_e, a, b, v = heapq.heappop(heap)
        m = 0.5 * (a + b)
        if not a < m < b:
            heapq.heappush(heap, (neg_e, a, b, v))
            break
        v1, e1 = est(a, m)
        v2, e2 = est(m, b)
        # area settled but the error estimate did not shrink: rounding noise dominates
        if abs(v1 + v2 - v) <= 1e-5 * abs(v1 + v2) and e1 + e2 >= -0.99 * neg_e:
            roundoff += 1
        total += v1 + v2 - v
        err += e1 + e2 + neg_e
        heapq.heappush(heap, (-e1, a, m, v1))
        heapq.heappush(heap, (-e2, m, b, v2))
        n += 1
    total = sum(item[3] for item in heap)
    err = sum(-item[0] for item in heap)
    return total, err


def _piece(f, lo, hi, rtol):
    if hi <= lo:
        return 0.0, 0.0
    if lo == 0.0:
        # scipy's QAGS copes with integrable endpoint singularities at 0
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            v, e = _sp_integrate.quad(
                lambda x: float(np.asarray(f(np.array([x])))[0]), 0.0, hi,
                epsabs=0.0, epsrel=max(rtol, 1e-13), limit=400)
        return v, e
    if hi / lo > 2.0:
        def g(u):
            t = np.exp(u)
            return f(t) * t
        return _gl_adaptive(g, math.log(lo), math.log(hi), rtol)
    return _gl_adaptive(f, lo, hi, rtol)


def _vectorize(f):
    def g(t):
        with np.errstate(all="ignore"):
            out = np.asarray(f(t), dtype=float)
        if out.shape != np.shape(t):
            out = np.broadcast_to(out, np.shape(t)).astype(float)
        return out
    return g


def integrate(f: Callable, a: float, b: float = math.inf, tol: float = DEFAULT_TOL,
              points: Iterable[float] = (), horizon: float = HORIZON) -> QuadResult:
    """Integrate a vectorised, piecewise-smooth ``f`` over ``[a, b]``.

    Finite stretches are split at ``points``.  An infinite upper limit is probed
    geometrically: pieces ``[H, 2H]`` are added and the tail is extrapolated from
    the ratio of consecutive pieces; the integral is declared divergent when the
    extrapolated partial integrals still move by more than ``tol`` (relative) once
    ``H`` reaches ``horizon``.  In that case ``value`` is the partial integral.
    """
    if not (a >= 0) or not (b > a) or math.isnan(b):
        raise ValueError(f"invalid interval [{a}, {b}]")
    f = _vectorize(f)
    rtol = min(tol, 1e-6) * 1e-3
    pts = sorted({float(p) for p in points if a < p and math.isfinite(p)})
    if math.isfinite(b):
        cuts = [a] + [p for p in pts if p < b] + [b]
    else:
        top = max(a, 1.0, pts[-1] if pts else 0.0)
        if top == a:
            top = max(2.0 * a, 1.0)
        cuts = [a] + [p for p in pts if p < top] + [top]
    total, err, used = 0.0, 0.0, 0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        v, e = _piece(f, lo, hi, rtol)
        total += v
        err += e
        used += 1
    if math.isfinite(b):
        return QuadResult(total, err, False, used)

    h = cuts[-1]
    prev_piece = None
    prev_est = None
    stable = 0
    while h < horizon:
        p, e = _piece(f, h, 2.0 * h, rtol)
        total += p
        err += e
        used += 1
        h *= 2.0
        est = None
        if p == 0.0 and prev_piece == 0.0:
            est = total
        elif prev_piece not in (None, 0.0):
            rho = abs(p / prev_piece)
            if rho < 1.0:
                est = total + p * rho / (1.0 - rho)
        if est is not None and prev_est is not None and abs(est - prev_est) <= tol * abs(est):
            stable += 1
        else:
            stable = 0
        drift = abs(est - prev_est) if est is not None and prev_est is not None else math.inf
        prev_piece, prev_est = p, est
        if stable >= 2:
            return QuadResult(est, err + drift, False, used)
    return QuadResult(total, err, True, used)


# --------------------------------------------------------------------------
# step functions
# --------------------------------------------------------------------------

def _canonical(breakpoints: Sequence[float], values: Sequence[float]):
    bp = np.asarray(breakpoints, dtype=float).ravel()
    vals = np.asarray(values, dtype=float).ravel()
    if bp.shape != vals.shape:
        raise ValueError("breakpoints and values must have equal length")
    if bp.size and (not np.all(np.isfinite(bp)) or bp[0] <= 0 or np.any(np.diff(bp) <= 0)):
        raise ValueError("breakpoints must be finite, positive and strictly increasing")
    if not np.all(np.isfinite(vals)) or np.any(vals < 0):
        raise ValueError("values must be finite and nonnegative")
    # drop trailing zero pieces, then merge equal neighbours
    keep_b, keep_v = [], []
    for t, v in zip(bp, vals):
        if keep_v and keep_v[-1] == v:
            keep_b[-1] = t
        else:
            keep_b.append(float(t))
            keep_v.append(float(v))
    while keep_v and keep_v[-1] == 0.0:
        keep_v.pop()
        keep_b.pop()
    return np.array(keep_b), np.array(keep_v)


class StepFunction:
    """Finite nonnegative step function on (0, inf) in canonical form."""

    def __init__(self, breakpoints: Sequence[float], values: Sequence[float]):
        self.breakpoints, self.values = _canonical(breakpoints, values)
        self.breakpoints.setflags(write=False)
        self.values.setflags(write=False)
        starts = np.concatenate(([0.0], self.breakpoints[:-1]))
        self._areas = np.concatenate(([0.0], np.cumsum(self.values * (self.breakpoints - starts))))

    @property
    def starts(self) -> np.ndarray:
        return np.concatenate(([0.0], self.breakpoints[:-1]))

    @property
    def lengths(self) -> np.ndarray:
        return self.breakpoints - self.starts

    @property
    def support_end(self) -> float:
        return float(self.breakpoints[-1]) if self.breakpoints.size else 0.0

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="right")
        padded = np.concatenate((self.values, [0.0]))
        return padded[idx]

    def primitive(self, t):
        """Exact integral over (0, t)."""
        t = np.asarray(t, dtype=float)
        if not self.breakpoints.size:
            return np.zeros_like(t)
        idx = np.searchsorted(self.breakpoints, t, side="right")
        starts = np.concatenate((self.starts, [self.support_end]))
        padded = np.concatenate((self.values, [0.0]))
        return self._areas[idx] + padded[idx] * (t - starts[idx])

    def total(self) -> float:
        return float(self._areas[-1])

    def measure_greater(self, level: float) -> float:
        """Lebesgue measure of {f > level}."""
        return float(np.sum(self.lengths[self.values > level]))

    def __add__(self, other: "StepFunction") -> "StepFunction":
        bp = np.union1d(self.breakpoints, other.breakpoints)
        left = np.concatenate(([0.0], bp[:-1]))
        return StepFunction(bp, self(left) + other(left))

    def __eq__(self, other):
        return (isinstance(other, StepFunction)
                and np.array_equal(self.breakpoints, other.breakpoints)
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.breakpoints.tobytes(), self.values.tobytes()))

    def __repr__(self):
        return f"{type(self).__name__}({self.breakpoints.tolist()}, {self.values.tolist()})"

    def to_spec(self) -> dict:
        return {"kind": "step", "breakpoints": self.breakpoints.tolist(),
                "values": self.values.tolist()}


# --------------------------------------------------------------------------
# decreasing profiles
# --------------------------------------------------------------------------

class DecreasingProfile:
    """A nonincreasing, right-continuous function on (0, inf) playing the role of f*.

    Subclasses provide ``__call__``, ``primitive`` and the structural hints used
    by the norm evaluators: ``breakpoints`` (kinks and jumps), ``cap_end`` (the
    function is constant on (0, cap_end)) and ``support_end``.
    """

    breakpoints: tuple = ()
    cap_end: float = 0.0
    support_end: float = math.inf

    def __call__(self, t):
        raise NotImplementedError

    def primitive(self, t):
        raise NotImplementedError

    def total(self) -> float:
        raise NotImplementedError

    def maximal(self, t):
        """f**(t) = (1/t) * integral of f over (0, t)."""
        t = np.asarray(t, dtype=float)
        return self.primitive(t) / t

    def scaled(self, c: float) -> "DecreasingProfile":
        return ScaledProfile(c, self)

    def __add__(self, other):
        return ProfileSum([self, other])


class DecreasingStep(StepFunction, DecreasingProfile):
    def __init__(self, breakpoints, values):
        super().__init__(breakpoints, values)
        if np.any(np.diff(self.values) > 0):
            raise ValueError("DecreasingStep values must be nonincreasing")

    @property
    def cap_end(self) -> float:
        return float(self.breakpoints[0]) if self.breakpoints.size else math.inf

    def power(self, p: float) -> "DecreasingStep":
        return DecreasingStep(self.breakpoints, self.values ** p)

    def scaled(self, c: float) -> "DecreasingStep":
        return DecreasingStep(self.breakpoints, c * self.values)

    def __add__(self, other):
        if isinstance(other, DecreasingStep):
            s = StepFunction.__add__(self, other)
            return DecreasingStep(s.breakpoints, s.values)
        return ProfileSum([self, other])

    __hash__ = StepFunction.__hash__


def _kinks(profile) -> tuple:
    bp = profile.breakpoints
    if isinstance(bp, np.ndarray):
        return tuple(bp.tolist())
    return tuple(bp)


class AnalyticDecay(DecreasingProfile):
    """t -> c * t**(-a) * log(t)**(-b) on (t0, end], capped at its value at t0 below."""

    def __init__(self, c: float, a: float = 0.0, b: float = 0.0, t0: float = 0.0,
                 end: float = math.inf):
        if c < 0 or a < 0:
            raise ValueError("need c >= 0 and a >= 0")
        if b != 0 and t0 <= 1.0:
            raise ValueError("a log factor needs t0 > 1")
        if not end > t0:
            raise ValueError("need end > t0")
        if b < 0 and t0 > 0 and a < -b / math.log(t0):
            raise ValueError("profile would not be decreasing past t0")
        if b < 0 and t0 == 0:
            raise ValueError("negative log power needs a cut t0 > 1")
        self.c, self.a, self.b, self.t0, self.end = float(c), float(a), float(b), float(t0), float(end)
        self.cap = self._raw(self.t0) if self.t0 > 0 else math.inf
        self.cap_end = self.t0
        self.support_end = self.end
        self.breakpoints = tuple(x for x in (self.t0, self.end) if 0 < x < math.inf)

    def _raw(self, t):
        t = np.asarray(t, dtype=float)
        out = self.c * t ** (-self.a)
        if self.b:
            out = out * np.log(t) ** (-self.b)
        return out

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(all="ignore"):
            raw = self._raw(np.maximum(t, self.t0) if self.t0 > 0 else t)
        out = np.where(t <= self.t0, self.cap, raw)
        return np.where(t > self.end, 0.0, out)

    def _tail(self, x: float) -> float:
        """Integral of the decay piece over [t0, x] for finite x > t0."""
        lo = self.t0
        if x <= lo:
            return 0.0
        a, b, c = self.a, self.b, self.c
        if b == 0:
            if a == 1:
                return c * math.log(x / lo) if lo > 0 else math.inf
            if lo == 0 and a > 1:
                return math.inf
            return c * (x ** (1 - a) - lo ** (1 - a)) / (1 - a)
        if a == 1:
            u, u0 = math.log(x), math.log(lo)
            if b == 1:
                return c * math.log(u / u0)
            return c * (u ** (1 - b) - u0 ** (1 - b)) / (1 - b)
        return integrate(self._raw, lo, x, points=()).value

    def _tail_total(self) -> float:
        if math.isfinite(self.end):
            return self._tail(self.end)
        a, b, c, lo = self.a, self.b, self.c, self.t0
        if a > 1 or (a == 1 and b > 1):
            if b == 0:
                return c * lo ** (1 - a) / (a - 1)
            if a == 1:
                return c * math.log(lo) ** (1 - b) / (b - 1)
            res = integrate(self._raw, lo, math.inf)
            return math.inf if res.diverged else res.value
        return math.inf

    def primitive(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        flat = np.atleast_1d(t)
        capped = self.cap * np.minimum(flat, self.t0) if self.t0 > 0 else np.zeros_like(flat)
        out = np.array([cp + self._tail(min(x, self.end)) for cp, x in zip(capped, flat)])
        return out[0] if scalar else out

    def total(self) -> float:
        base = self.cap * self.t0 if self.t0 > 0 else 0.0
        return base + self._tail_total()

    def power(self, p: float) -> "AnalyticDecay":
        return AnalyticDecay(self.c ** p, self.a * p, self.b * p, self.t0, self.end)

    def scaled(self, c: float) -> "AnalyticDecay":
        return AnalyticDecay(c * self.c, self.a, self.b, self.t0, self.end)

    def __repr__(self):
        return f"AnalyticDecay(c={self.c}, a={self.a}, b={self.b}, t0={self.t0}, end={self.end})"

    def to_spec(self) -> dict:
        spec = {"kind": "decay", "c": self.c, "a": self.a, "b": self.b, "t0": self.t0}
        if math.isfinite(self.end):
            spec["end"] = self.end
        return spec


class ScaledProfile(DecreasingProfile):
    def __init__(self, c: float, inner: DecreasingProfile):
        if c < 0:
            raise ValueError("scale must be nonnegative")
        self.c, self.inner = float(c), inner
        self.breakpoints = _kinks(inner)
        self.cap_end = inner.cap_end
        self.support_end = inner.support_end

    def __call__(self, t):
        return self.c * self.inner(t)

    def primitive(self, t):
        return self.c * self.inner.primitive(t)

    def total(self):
        return self.c * self.inner.total() if self.c else 0.0

    def to_spec(self):
        return {"kind": "scaled", "c": self.c, "inner": self.inner.to_spec()}


class ProfileSum(DecreasingProfile):
    def __init__(self, terms: Sequence[DecreasingProfile]):
        if not terms:
            raise ValueError("empty sum")
        self.terms = tuple(terms)
        self.breakpoints = tuple(sorted({x for term in self.terms for x in _kinks(term)}))
        self.cap_end = min(term.cap_end for term in self.terms)
        self.support_end = max(term.support_end for term in self.terms)

    def __call__(self, t):
        return sum(term(t) for term in self.terms)

    def primitive(self, t):
        return sum(term.primitive(t) for term in self.terms)

    def total(self):
        return sum(term.total() for term in self.terms)

    def to_spec(self):
        return {"kind": "sum", "terms": [term.to_spec() for term in self.terms]}


def zero_profile() -> DecreasingStep:
    return DecreasingStep([], [])


def rearrange(f: StepFunction) -> DecreasingStep:
    """Decreasing rearrangement: sort (value, length) blocks by value, descending."""
    if isinstance(f, DecreasingStep):
        return f
    order = np.argsort(-f.values, kind="stable")
    vals = f.values[order]
    lens = f.lengths[order]
    mask = vals > 0
    return DecreasingStep(np.cumsum(lens[mask]), vals[mask])


def primitive(f, t):
    """Integral of a profile (or step function) over (0, t)."""
    if not np.all(np.asarray(t) >= 0):
        raise ValueError("t must be nonnegative")
    return f.primitive(t)


# --------------------------------------------------------------------------
# JSON specs
# --------------------------------------------------------------------------

def _num(spec, key, path, default=None):
    if key not in spec:
        if default is not None:
            return default
        raise SpecError(f"{path}.{key}", "missing field")
    val = spec[key]
    if isinstance(val, str) and val in ("inf", "Infinity"):
        return math.inf
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise SpecError(f"{path}.{key}", f"expected a number, got {val!r}")
    return float(val)


def profile_from_spec(spec, path: str = "function") -> DecreasingProfile:
    """Build a decreasing profile; non-monotone step specs are rearranged."""
    if not isinstance(spec, dict):
        raise SpecError(path, "expected a JSON object")
    kind = spec.get("kind")
    try:
        if kind == "step":
            for key in ("breakpoints", "values"):
                if not isinstance(spec.get(key), list):
                    raise SpecError(f"{path}.{key}", "expected a list")
            return rearrange(StepFunction(spec["breakpoints"], spec["values"]))
        if kind == "decay":
            return AnalyticDecay(_num(spec, "c", path), _num(spec, "a", path, 0.0),
                                 _num(spec, "b", path, 0.0), _num(spec, "t0", path, 0.0),
                                 _num(spec, "end", path, math.inf))
        if kind == "scaled":
            return ScaledProfile(_num(spec, "c", path), profile_from_spec(spec.get("inner"), f"{path}.inner"))
        if kind == "sum":
            terms = spec.get("terms")
            if not isinstance(terms, list) or not terms:
                raise SpecError(f"{path}.terms", "expected a nonempty list")
            parts = [profile_from_spec(t, f"{path}.terms[{i}]") for i, t in enumerate(terms)]
            out = parts[0]
            for p in parts[1:]:
                out = out + p
            return out
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(path, str(exc)) from None
    raise SpecError(f"{path}.kind", f"unknown function kind {kind!r}")
