"""Weights on (0, inf) with primitives, tail integrals and the Phi-smoothing.

A weight knows how to evaluate itself, its primitive ``W(t) = int_0^t w``, the
second primitive ``W2(t) = int_0^t W`` and the tail integral
``int_r^inf w(s) s**-p ds``.  Closed forms are used for the elementary families;
everything else falls back to :func:`lorentz_lab.realfun.integrate`.
"""

from __future__ import annotations

import math
from math import factorial
from typing import Sequence

import numpy as np
from scipy import special

from .config import SpecError
from .realfun import integrate

SMOOTHNESS_ORDER = {"c1": 0, "continuous": 1, "general": 2}


def _arr(t):
    return np.asarray(t, dtype=float)


def _elementwise(fn, t):
    t = _arr(t)
    out = np.array([fn(float(x)) for x in np.atleast_1d(t).ravel()], dtype=float)
    return out.reshape(t.shape) if t.ndim else out[0]


class Weight:
    """Base class; subclasses override what they can do in closed form."""

    decreasing: bool = False
    smoothness: str = "general"
    exact_primitive: bool = False
    breakpoints: tuple = ()

    def __call__(self, t):
        raise NotImplementedError

    def W(self, t):
        pts = self.breakpoints
        return _elementwise(lambda x: integrate(self, 0.0, x, points=pts).value if x > 0 else 0.0, t)

    def W2(self, t):
        pts = self.breakpoints
        return _elementwise(lambda x: integrate(self.W, 0.0, x, points=pts).value if x > 0 else 0.0, t)

    def tail_integral(self, r, p: float):
        """int_r^inf w(s) / s**p ds; ``inf`` when the tail diverges."""
        pts = self.breakpoints

        def one(x):
            res = integrate(lambda s: self(s) * s ** (-p), x, math.inf, points=pts)
            return math.inf if res.diverged else res.value
        return _elementwise(one, r)

    def derivative(self, t):
        raise NotImplementedError(f"{type(self).__name__} has no closed-form derivative")

    def derivative_scale(self, t):
        """Magnitude of the terms summed to form w'; sets the size of its rounding error."""
        return np.abs(self.derivative(t))

    def has_derivative(self) -> bool:
        try:
            self.derivative(1.0)
        except NotImplementedError:
            return False
        return True

    def at_infinity(self):
        """Closed-form w(inf) when known, else None."""
        return None

    def at_zero(self):
        return None

    def to_spec(self) -> dict:
        raise NotImplementedError

    def __add__(self, other):
        return WeightSum([self, other])

    def __mul__(self, other):
        return WeightProduct([self, other])


# --------------------------------------------------------------------------
# elementary families
# --------------------------------------------------------------------------

class Power(Weight):
    """c * t**gamma on (a, b)."""

    exact_primitive = True

    def __init__(self, gamma: float, a: float = 0.0, b: float = math.inf, c: float = 1.0):
        if not (0 <= a < b) or c < 0:
            raise ValueError("need 0 <= a < b and c >= 0")
        if a == 0 and gamma <= -1:
            raise ValueError(f"t**{gamma} is not locally integrable at 0")
        self.gamma, self.a, self.b, self.c = float(gamma), float(a), float(b), float(c)
        self.breakpoints = tuple(x for x in (self.a, self.b) if 0 < x < math.inf)
        self.decreasing = self.a == 0 and self.gamma <= 0
        self.smoothness = "c1" if self.a == 0 and self.b == math.inf else "general"

    def __call__(self, t):
        t = _arr(t)
        inside = (t > self.a) & (t < self.b)
        with np.errstate(all="ignore"):
            return np.where(inside, self.c * np.where(inside, t, 1.0) ** self.gamma, 0.0)

    @staticmethod
    def _F(x, e):
        """Antiderivative of x**e (vanishing at 0 when e > -1, at inf when e < -1)."""
        with np.errstate(all="ignore"):
            if e == -1:
                return np.log(x)
            return x ** (e + 1) / (e + 1)

    def W(self, t):
        m = np.clip(_arr(t), self.a, self.b)
        lo = self._F(self.a, self.gamma) if self.a > 0 else 0.0
        return self.c * (self._F(m, self.gamma) - lo)

    def W2(self, t):
        t = _arr(t)
        g, a, c = self.gamma, self.a, self.c
        m = np.clip(t, a, self.b)

        def inner(x):
            # int_a^x (F(s) - F(a)) ds
            if g == -1:
                return x * np.log(x) - x - (a * math.log(a) - a) - math.log(a) * (x - a)
            h = g + 2
            fa = self._F(a, g) if a > 0 else 0.0
            if h == 0:
                second = np.log(x) - math.log(a)
            else:
                second = (x ** h - (a ** h if a > 0 else 0.0)) / h
            return second / (g + 1) - fa * (x - a)

        with np.errstate(all="ignore"):
            base = c * inner(m)
            if self.b < math.inf:
                base = base + self.W(self.b) * np.maximum(t - self.b, 0.0)
        return np.where(t <= a, 0.0, base)

    def tail_integral(self, r, p):
        r = _arr(r)
        e = self.gamma - p
        lo = np.maximum(r, self.a)
        if self.b == math.inf:
            if e >= -1:
                return np.full(r.shape, math.inf) if r.ndim else math.inf
            top = 0.0
        else:
            top = self._F(self.b, e)
        val = self.c * (top - self._F(np.minimum(lo, self.b), e))
        return np.where(lo >= self.b, 0.0, val)

    def derivative(self, t):
        t = _arr(t)
        inside = (t > self.a) & (t < self.b)
        with np.errstate(all="ignore"):
            return np.where(inside, self.c * self.gamma * np.where(inside, t, 1.0) ** (self.gamma - 1), 0.0)

    def at_infinity(self):
        if self.b < math.inf or self.gamma < 0:
            return 0.0
        return self.c if self.gamma == 0 else math.inf

    def at_zero(self):
        if self.a > 0 or self.gamma > 0:
            return 0.0
        return self.c if self.gamma == 0 else math.inf

    def to_spec(self):
        spec = {"kind": "power", "gamma": self.gamma, "a": self.a,
                "b": self.b if math.isfinite(self.b) else "inf"}
        if self.c != 1.0:
            spec["c"] = self.c
        return spec

    def __repr__(self):
        return f"Power(gamma={self.gamma}, a={self.a}, b={self.b}, c={self.c})"


class Characteristic(Power):
    def __init__(self, a: float, b: float, c: float = 1.0):
        super().__init__(0.0, a, b, c)

    def to_spec(self):
        spec = {"kind": "char", "a": self.a, "b": self.b if math.isfinite(self.b) else "inf"}
        if self.c != 1.0:
            spec["c"] = self.c
        return spec

    def __repr__(self):
        return f"Characteristic({self.a}, {self.b})"


class Constant(Weight):
    exact_primitive = True
    decreasing = True
    smoothness = "c1"

    def __init__(self, c: float = 1.0):
        if c < 0:
            raise ValueError("constant weight must be nonnegative")
        self.c = float(c)

    def __call__(self, t):
        return np.full(np.shape(t), self.c) if np.ndim(t) else self.c

    def W(self, t):
        return self.c * _arr(t)

    def W2(self, t):
        return 0.5 * self.c * _arr(t) ** 2

    def tail_integral(self, r, p):
        r = _arr(r)
        if p <= 1 and self.c > 0:
            return np.full(r.shape, math.inf) if r.ndim else math.inf
        if self.c == 0:
            return np.zeros(r.shape) if r.ndim else 0.0
        return self.c * r ** (1 - p) / (p - 1)

    def derivative(self, t):
        return np.zeros(np.shape(t)) if np.ndim(t) else 0.0

    def at_infinity(self):
        return self.c

    def at_zero(self):
        return self.c

    def to_spec(self):
        return {"kind": "const", "c": self.c}

    def __repr__(self):
        return f"Constant({self.c})"


class LogPoly(Weight):
    """t**gamma * sum_k coeffs[k] * log(t)**k on (a, b)."""

    exact_primitive = True

    def __init__(self, coeffs: Sequence[float], gamma: float = 0.0, a: float = 0.0,
                 b: float = math.inf, decreasing: bool | None = None):
        if not (0 <= a < b):
            raise ValueError("need 0 <= a < b")
        if a == 0 and gamma < -1:
            raise ValueError("not locally integrable at 0")
        coeffs = [float(c) for c in coeffs]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if a == 0 and gamma == -1 and any(coeffs):
            raise ValueError("not locally integrable at 0")
        self.coeffs, self.gamma, self.a, self.b = tuple(coeffs), float(gamma), float(a), float(b)
        self.breakpoints = tuple(x for x in (self.a, self.b) if 0 < x < math.inf)
        hi = min(self.b, 1e6) if self.b < math.inf else 1e6
        lo = self.a if self.a > 0 else min(1e-6, hi * 1e-6)
        probe = np.geomspace(lo, hi, 2001)[1:-1]
        vals = self(probe)
        if np.any(vals < -1e-12 * max(1.0, float(np.max(np.abs(vals))))):
            raise ValueError("LogPoly weight takes negative values on its support")
        if decreasing is None:
            decreasing = self.a == 0 and bool(np.all(np.diff(vals) <= 1e-12 * np.abs(vals[:-1]) + 1e-300))
        self.decreasing = decreasing
        if self.a == 0 and self.b == math.inf:
            self.smoothness = "c1"
        else:
            edges = [x for x in (self.a, self.b) if 0 < x < math.inf]
            jump = any(abs(self._raw(np.array([x]))[0]) > 1e-12 for x in edges)
            self.smoothness = "general" if jump else "continuous"

    def _poly(self, L, coeffs=None):
        coeffs = self.coeffs if coeffs is None else coeffs
        out = np.zeros_like(L)
        for c in reversed(coeffs):
            out = out * L + c
        return out

    def _raw(self, t):
        with np.errstate(all="ignore"):
            return t ** self.gamma * self._poly(np.log(t))

    def __call__(self, t):
        t = _arr(t)
        inside = (t > self.a) & (t < self.b)
        safe = np.where(inside, t, 1.0)
        return np.where(inside, self._raw(safe), 0.0)

    @staticmethod
    def _F(x, e, k):
        """Antiderivative of x**e * log(x)**k; zero limit at 0 (e > -1) or inf (e < -1)."""
        with np.errstate(all="ignore"):
            L = np.log(x)
            if e == -1:
                return L ** (k + 1) / (k + 1)
            g = e + 1
            acc = np.zeros_like(L)
            for j in range(k + 1):
                acc = acc + (-1) ** j * (factorial(k) / factorial(k - j)) * L ** (k - j) / g ** (j + 1)
            return x ** g * acc

    def _Fsum(self, x, e):
        x = _arr(x)
        out = np.zeros_like(x)
        for k, c in enumerate(self.coeffs):
            if c:
                out = out + c * self._F(x, e, k)
        return out

    def W(self, t):
        t = _arr(t)
        m = np.clip(t, self.a, self.b)
        safe = np.where(m > 0, m, 1.0)
        lo = self._Fsum(self.a, self.gamma) if self.a > 0 else 0.0
        return np.where(m > 0, self._Fsum(safe, self.gamma) - lo, 0.0)

    def W2(self, t):
        # int_0^t W = t W(t) - int_0^t s w(s) ds
        t = _arr(t)
        m = np.clip(t, self.a, self.b)
        safe = np.where(m > 0, m, 1.0)
        lo = self._Fsum(self.a, self.gamma + 1) if self.a > 0 else 0.0
        first = np.where(m > 0, self._Fsum(safe, self.gamma + 1) - lo, 0.0)
        return t * self.W(t) - first

    def tail_integral(self, r, p):
        r = _arr(r)
        e = self.gamma - p
        lo = np.maximum(r, self.a)
        if self.b == math.inf:
            if e >= -1 and any(self.coeffs):
                return np.full(r.shape, math.inf) if r.ndim else math.inf
            top = 0.0
        else:
            top = self._Fsum(self.b, e)
        val = top - self._Fsum(np.minimum(lo, self.b), e)
        return np.where(lo >= self.b, 0.0, val)

    def derivative(self, t):
        t = _arr(t)
        inside = (t > self.a) & (t < self.b)
        safe = np.where(inside, t, 1.0)
        dcoeffs = [k * c for k, c in enumerate(self.coeffs)][1:] or [0.0]
        with np.errstate(all="ignore"):
            L = np.log(safe)
            val = safe ** (self.gamma - 1) * (self.gamma * self._poly(L) + self._poly(L, dcoeffs))
        return np.where(inside, val, 0.0)

    def at_infinity(self):
        if self.b < math.inf or self.gamma < 0:
            return 0.0
        if self.gamma == 0 and len(self.coeffs) == 1:
            return self.coeffs[0]
        return math.inf

    def at_zero(self):
        if self.a > 0 or self.gamma > 0:
            return 0.0
        if self.gamma == 0 and len(self.coeffs) == 1:
            return self.coeffs[0]
        return math.inf

    def to_spec(self):
        return {"kind": "logpoly", "coeffs": list(self.coeffs), "gamma": self.gamma,
                "a": self.a, "b": self.b if math.isfinite(self.b) else "inf"}

    def __repr__(self):
        return f"LogPoly({list(self.coeffs)}, gamma={self.gamma}, a={self.a}, b={self.b})"


class Exponential(Weight):
    """c * exp(-rate * t)."""

    exact_primitive = True
    decreasing = True
    smoothness = "c1"

    def __init__(self, rate: float = 1.0, c: float = 1.0):
        if rate <= 0 or c < 0:
            raise ValueError("need rate > 0 and c >= 0")
        self.rate, self.c = float(rate), float(c)

    def __call__(self, t):
        return self.c * np.exp(-self.rate * _arr(t))

    def W(self, t):
        return self.c * -np.expm1(-self.rate * _arr(t)) / self.rate

    def W2(self, t):
        t = _arr(t)
        lam = self.rate
        return self.c * (t / lam + np.expm1(-lam * t) / lam**2)

    def tail_integral(self, r, p):
        if p == 0:
            return self(r) / self.rate
        if p == 1:
            return self.c * special.exp1(self.rate * _arr(r))
        return super().tail_integral(r, p)

    def derivative(self, t):
        return -self.rate * self(t)

    def at_infinity(self):
        return 0.0

    def at_zero(self):
        return self.c

    def to_spec(self):
        return {"kind": "exp", "rate": self.rate, "c": self.c}

    def __repr__(self):
        return f"Exponential(rate={self.rate}, c={self.c})"


class ShiftedPower(Weight):
    """c * (1 + t)**gamma."""

    exact_primitive = True
    smoothness = "c1"

    def __init__(self, gamma: float, c: float = 1.0):
        if c < 0:
            raise ValueError("need c >= 0")
        self.gamma, self.c = float(gamma), float(c)
        self.decreasing = self.gamma <= 0

    def __call__(self, t):
        return self.c * (1.0 + _arr(t)) ** self.gamma

    def W(self, t):
        t = _arr(t)
        g = self.gamma + 1
        if g == 0:
            return self.c * np.log1p(t)
        return self.c * np.expm1(g * np.log1p(t)) / g

    def derivative(self, t):
        return self.c * self.gamma * (1.0 + _arr(t)) ** (self.gamma - 1)

    def at_infinity(self):
        if self.gamma < 0:
            return 0.0
        return self.c if self.gamma == 0 else math.inf

    def at_zero(self):
        return self.c

    def to_spec(self):
        return {"kind": "shiftpow", "gamma": self.gamma, "c": self.c}

    def __repr__(self):
        return f"ShiftedPower(gamma={self.gamma}, c={self.c})"


# --------------------------------------------------------------------------
# tabulated weights
# --------------------------------------------------------------------------

def _fit_power(x, y):
    """Least-squares c * x**k through the positive samples; (0, 0) if none."""
    mask = y > 0
    if mask.sum() == 0:
        return 0.0, 0.0
    if mask.sum() == 1:
        return float(y[mask][0]), 0.0
    k, logc = np.polyfit(np.log(x[mask]), np.log(y[mask]), 1)
    return float(np.exp(logc)), float(k)


class Tabulated(Weight):
    """Piecewise-linear interpolation on a grid with power-law extrapolation at both ends.

    The tails ``c * t**k`` are least-squares fits over the first and the last
    decade of the grid; a zero end value switches that extension off.
    """

    exact_primitive = True
    smoothness = "continuous"

    def __init__(self, grid: Sequence[float], values: Sequence[float], decreasing: bool | None = None):
        x = np.asarray(grid, dtype=float)
        y = np.asarray(values, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 2:
            raise ValueError("grid and values must be 1-d of equal length >= 2")
        if x[0] <= 0 or np.any(np.diff(x) <= 0):
            raise ValueError("tabulated grid must be positive and strictly increasing")
        if np.any(y < 0) or not np.all(np.isfinite(y)):
            raise ValueError("tabulated values must be finite and nonnegative")
        self.grid, self.values = x, y
        lo_win = x <= x[0] * 10
        hi_win = x >= x[-1] / 10
        self.lo_c, self.lo_k = _fit_power(x[lo_win], y[lo_win]) if y[0] > 0 else (0.0, 0.0)
        self.hi_c, self.hi_k = _fit_power(x[hi_win], y[hi_win]) if y[-1] > 0 else (0.0, 0.0)
        if self.lo_c > 0 and self.lo_k <= -1:
            raise ValueError("lower extrapolation is not locally integrable")
        # anchor the fits to the end samples so the weight is continuous
        if self.lo_c > 0:
            self.lo_c = y[0] / x[0] ** self.lo_k
        if self.hi_c > 0:
            self.hi_c = y[-1] / x[-1] ** self.hi_k
        self.breakpoints = (float(x[0]), float(x[-1]))
        dx = np.diff(x)
        self._slopes = np.diff(y) / dx
        self._cum = np.concatenate(([0.0], np.cumsum(0.5 * (y[:-1] + y[1:]) * dx)))
        self._W0 = self.lo_c * x[0] ** (self.lo_k + 1) / (self.lo_k + 1) if self.lo_c > 0 else 0.0
        if decreasing is None:
            decreasing = bool(np.all(np.diff(y) <= 0) and self.lo_k <= 0 and self.hi_k <= 0)
        self.decreasing = decreasing

    def __call__(self, t):
        t = _arr(t)
        x, y = self.grid, self.values
        with np.errstate(all="ignore"):
            lo = self.lo_c * t ** self.lo_k
            hi = self.hi_c * t ** self.hi_k
        mid = np.interp(t, x, y)
        return np.where(t < x[0], lo, np.where(t > x[-1], hi, mid))

    def W(self, t):
        t = _arr(t)
        x, y = self.grid, self.values
        with np.errstate(all="ignore"):
            low = self.lo_c * np.minimum(t, x[0]) ** (self.lo_k + 1) / (self.lo_k + 1) if self.lo_c > 0 else np.zeros_like(t)
        tc = np.clip(t, x[0], x[-1])
        i = np.clip(np.searchsorted(x, tc, side="right") - 1, 0, x.size - 2)
        part = self._cum[i] + (tc - x[i]) * (y[i] + 0.5 * self._slopes[i] * (tc - x[i]))
        mid = self._W0 + part
        top = self._W0 + self._cum[-1]
        if self.hi_c > 0:
            k = self.hi_k
            with np.errstate(all="ignore"):
                tt = np.maximum(t, x[-1])
                ext = (self.hi_c * np.log(tt / x[-1]) if k == -1
                       else self.hi_c * (tt ** (k + 1) - x[-1] ** (k + 1)) / (k + 1))
        else:
            ext = 0.0
        return np.where(t < x[0], low, np.where(t > x[-1], top + ext, mid))

    @staticmethod
    def _F(x, e):
        with np.errstate(all="ignore"):
            return np.log(x) if e == -1 else x ** (e + 1) / (e + 1)

    def tail_integral(self, r, p):
        r = _arr(r)
        x, y, s = self.grid, self.values, self._slopes
        alpha = y[:-1] - s * x[:-1]

        def seg(lo, hi, i):
            return alpha[i] * (self._F(hi, -p) - self._F(lo, -p)) + s[i] * (self._F(hi, 1 - p) - self._F(lo, 1 - p))

        idx = np.arange(x.size - 1)
        pieces = seg(x[:-1], x[1:], idx)
        suffix = np.concatenate((np.cumsum(pieces[::-1])[::-1], [0.0]))
        # upper extension
        if self.hi_c > 0:
            e = self.hi_k - p
            upper = math.inf if e >= -1 else -self.hi_c * self._F(x[-1], e)
        else:
            upper = 0.0
        rr = np.atleast_1d(r)
        out = np.empty_like(rr)
        for j, rv in enumerate(rr):
            if rv >= x[-1]:
                if self.hi_c > 0:
                    e = self.hi_k - p
                    out[j] = math.inf if e >= -1 else -self.hi_c * self._F(rv, e)
                else:
                    out[j] = 0.0
            elif rv >= x[0]:
                i = min(int(np.searchsorted(x, rv, side="right")) - 1, x.size - 2)
                out[j] = seg(rv, x[i + 1], i) + suffix[i + 1] + upper
            else:
                e = self.lo_k - p
                if self.lo_c > 0:
                    low = self.lo_c * (self._F(x[0], e) - self._F(rv, e))
                else:
                    low = 0.0
                out[j] = low + suffix[0] + upper
        return out.reshape(r.shape) if r.ndim else float(out[0])

    def derivative(self, t):
        t = _arr(t)
        x = self.grid
        i = np.clip(np.searchsorted(x, t, side="right") - 1, 0, x.size - 2)
        with np.errstate(all="ignore"):
            lo = self.lo_c * self.lo_k * t ** (self.lo_k - 1)
            hi = self.hi_c * self.hi_k * t ** (self.hi_k - 1)
        return np.where(t < x[0], lo, np.where(t > x[-1], hi, self._slopes[i]))

    def at_infinity(self):
        if self.hi_c == 0 or self.hi_k < 0:
            return 0.0
        return self.hi_c if self.hi_k == 0 else math.inf

    def at_zero(self):
        if self.lo_c == 0 or self.lo_k > 0:
            return 0.0
        return self.lo_c if self.lo_k == 0 else math.inf

    def to_spec(self):
        return {"kind": "tabulated", "grid": self.grid.tolist(), "values": self.values.tolist(),
                "extrapolation": {"low": [self.lo_c, self.lo_k], "high": [self.hi_c, self.hi_k]}}

    def __repr__(self):
        return f"Tabulated(n={self.grid.size}, [{self.grid[0]:.3g}, {self.grid[-1]:.3g}])"


# --------------------------------------------------------------------------
# combinators
# --------------------------------------------------------------------------

def _worst(parts):
    return max((p.smoothness for p in parts), key=SMOOTHNESS_ORDER.__getitem__)


class WeightSum(Weight):
    def __init__(self, terms: Sequence[Weight]):
        if not terms:
            raise ValueError("empty sum")
        self.terms = tuple(terms)
        self.breakpoints = tuple(sorted({x for t in self.terms for x in t.breakpoints}))
        self.decreasing = all(t.decreasing for t in self.terms)
        self.smoothness = _worst(self.terms)
        self.exact_primitive = all(t.exact_primitive for t in self.terms)

    def __call__(self, t):
        return sum(term(t) for term in self.terms)

    def W(self, t):
        return sum(term.W(t) for term in self.terms)

    def W2(self, t):
        return sum(term.W2(t) for term in self.terms)

    def tail_integral(self, r, p):
        return sum(term.tail_integral(r, p) for term in self.terms)

    def derivative(self, t):
        return sum(term.derivative(t) for term in self.terms)

    def at_infinity(self):
        vals = [t.at_infinity() for t in self.terms]
        return None if any(v is None for v in vals) else sum(vals)

    def at_zero(self):
        vals = [t.at_zero() for t in self.terms]
        return None if any(v is None for v in vals) else sum(vals)

    def to_spec(self):
        return {"kind": "sum", "terms": [t.to_spec() for t in self.terms]}

    def __repr__(self):
        return " + ".join(map(repr, self.terms))


class WeightProduct(Weight):
    def __init__(self, terms: Sequence[Weight]):
        if not terms:
            raise ValueError("empty product")
        self.terms = tuple(terms)
        self.breakpoints = tuple(sorted({x for t in self.terms for x in t.breakpoints}))
        self.decreasing = all(t.decreasing for t in self.terms)
        self.smoothness = _worst(self.terms)

    def __call__(self, t):
        out = 1.0
        for term in self.terms:
            out = out * term(t)
        return out

    def derivative(self, t):
        vals = [term(t) for term in self.terms]
        ders = [term.derivative(t) for term in self.terms]
        total = 0.0
        for i, d in enumerate(ders):
            prod = d
            for j, v in enumerate(vals):
                if j != i:
                    prod = prod * v
            total = total + prod
        return total

    def at_infinity(self):
        vals = [t.at_infinity() for t in self.terms]
        if any(v is None for v in vals):
            return None
        if any(v == 0 for v in vals):
            return 0.0 if all(math.isfinite(v) for v in vals) else None
        return math.prod(vals)

    def to_spec(self):
        return {"kind": "product", "terms": [t.to_spec() for t in self.terms]}

    def __repr__(self):
        return " * ".join(map(repr, self.terms))


class Shifted(Weight):
    """inner - c, used to strip the limit at infinity off a decreasing weight."""

    def __init__(self, inner: Weight, c: float):
        self.inner, self.c = inner, float(c)
        self.breakpoints = inner.breakpoints
        self.decreasing = inner.decreasing
        self.smoothness = inner.smoothness
        self.exact_primitive = inner.exact_primitive

    def __call__(self, t):
        return np.maximum(self.inner(t) - self.c, 0.0)

    def W(self, t):
        return self.inner.W(t) - self.c * _arr(t)

    def W2(self, t):
        return self.inner.W2(t) - 0.5 * self.c * _arr(t) ** 2

    def tail_integral(self, r, p):
        if p > 1:
            return self.inner.tail_integral(r, p) - self.c * _arr(r) ** (1 - p) / (p - 1)
        return super().tail_integral(r, p)

    def derivative(self, t):
        return self.inner.derivative(t)

    def at_infinity(self):
        v = self.inner.at_infinity()
        return None if v is None else v - self.c

    def at_zero(self):
        v = self.inner.at_zero()
        return None if v is None else v - self.c

    def to_spec(self):
        return {"kind": "shifted", "inner": self.inner.to_spec(), "c": self.c}

    def __repr__(self):
        return f"({self.inner!r} - {self.c})"


class Dilated(Weight):
    """t -> inner(c * t)."""

    def __init__(self, inner: Weight, c: float):
        if c <= 0:
            raise ValueError("dilation factor must be positive")
        self.inner, self.c = inner, float(c)
        self.breakpoints = tuple(x / c for x in inner.breakpoints)
        self.decreasing = inner.decreasing
        self.smoothness = inner.smoothness
        self.exact_primitive = inner.exact_primitive

    def __call__(self, t):
        return self.inner(self.c * _arr(t))

    def W(self, t):
        return self.inner.W(self.c * _arr(t)) / self.c

    def W2(self, t):
        return self.inner.W2(self.c * _arr(t)) / self.c**2

    def tail_integral(self, r, p):
        return self.c ** (p - 1) * self.inner.tail_integral(self.c * _arr(r), p)

    def derivative(self, t):
        return self.c * self.inner.derivative(self.c * _arr(t))

    def at_infinity(self):
        return self.inner.at_infinity()

    def at_zero(self):
        return self.inner.at_zero()

    def to_spec(self):
        return {"kind": "dilated", "inner": self.inner.to_spec(), "c": self.c}

    def __repr__(self):
        return f"{self.inner!r}({self.c}*t)"


class Smoothed(Weight):
    """The weight whose primitive is Phi(t) = (1/t) int_t^{2t} W(s) ds.

    Phi is concave when the inner weight is decreasing and W <= Phi <= 2W.
    """

    exact_primitive = True
    smoothness = "c1"

    def __init__(self, inner: Weight):
        self.inner = inner
        self.decreasing = inner.decreasing
        bps = set(inner.breakpoints)
        bps |= {x / 2 for x in inner.breakpoints}
        self.breakpoints = tuple(sorted(bps))

    @property
    def depth(self) -> int:
        return 1 + (self.inner.depth if isinstance(self.inner, Smoothed) else 0)

    def W(self, t):
        t = _arr(t)
        with np.errstate(all="ignore"):
            out = (self.inner.W2(2 * t) - self.inner.W2(t)) / t
        return np.where(t > 0, out, 0.0)

    def _A(self, t):
        return 2 * self.inner.W(2 * t) - self.inner.W(t)

    def __call__(self, t):
        t = _arr(t)
        with np.errstate(all="ignore"):
            out = (self._A(t) - self.W(t)) / t
        return np.where(t > 0, out, self.at_zero() or 0.0)

    def W2(self, t):
        # int_0^t Phi = int_1^2 W2(t u) / u du
        pts = self.inner.breakpoints

        def one(x):
            if x <= 0:
                return 0.0
            kinks = [b / x for b in pts if 1 < b / x < 2]
            return integrate(lambda u: self.inner.W2(x * u) / u, 1.0, 2.0, points=kinks).value
        return _elementwise(one, t)

    def derivative(self, t):
        t = _arr(t)
        dA = 4 * self.inner(2 * t) - self.inner(t)
        phi = self(t)
        with np.errstate(all="ignore"):
            return dA / t - self._A(t) / t**2 - phi / t + self.W(t) / t**2

    def derivative_scale(self, t):
        t = _arr(t)
        dA = np.abs(4 * self.inner(2 * t)) + np.abs(self.inner(t))
        with np.errstate(all="ignore"):
            return (dA / t + np.abs(self._A(t)) / t**2 + np.abs(self(t)) / t
                    + np.abs(self.W(t)) / t**2)

    def at_infinity(self):
        v = self.inner.at_infinity()
        return None if v is None else 1.5 * v

    def at_zero(self):
        v = self.inner.at_zero()
        return None if v is None else 1.5 * v

    def to_spec(self):
        inner, depth = self.inner, 1
        while isinstance(inner, Smoothed):
            inner, depth = inner.inner, depth + 1
        return {"kind": "smoothed", "inner": inner.to_spec(), "depth": depth}

    def __repr__(self):
        return f"Smoothed({self.inner!r})"


# --------------------------------------------------------------------------
# module-level operations
# --------------------------------------------------------------------------

def W(w: Weight, t):
    """Primitive of ``w`` at ``t >= 0``."""
    if np.any(_arr(t) < 0):
        raise ValueError("t must be nonnegative")
    return w.W(t)


def smooth(w: Weight, depth: int = 1) -> Weight:
    if depth < 1:
        return w
    out = w
    for _ in range(depth):
        out = Smoothed(out)
    return out


def sampled_decreasing(w: Weight, lo: float = 1e-6, hi: float = 1e6, n: int = 1000,
                       rtol: float = 1e-12) -> bool:
    """Check the declared monotonicity on ``n`` log-spaced consecutive pairs."""
    t = np.geomspace(lo, hi, n + 1)
    v = np.asarray(w(t), dtype=float)
    return bool(np.all(v[1:] <= v[:-1] * (1 + rtol) + 1e-300))


def limit_at_infinity(w: Weight, probe_max: float = 1e300):
    """w(inf) for a declared-decreasing weight; ``None`` (inconclusive) otherwise."""
    if not w.decreasing:
        return None
    v = w.at_infinity()
    if v is not None:
        return float(v)
    t = np.geomspace(1.0, probe_max, 301)
    return float(np.min(w(t)))


def limit_at_zero(w: Weight, probe_min: float = 1e-300):
    if not w.decreasing:
        return None
    v = w.at_zero()
    if v is not None:
        return float(v)
    t = np.geomspace(probe_min, 1.0, 301)
    vals = np.asarray(w(t))
    # still growing over the last 30 decades: treat as unbounded
    if vals[0] > vals[30] * (1 + 1e-6):
        return math.inf
    return float(np.max(vals))


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


def _terms(spec, path):
    terms = spec.get("terms")
    if not isinstance(terms, list) or not terms:
        raise SpecError(f"{path}.terms", "expected a nonempty list")
    return [weight_from_spec(t, f"{path}.terms[{i}]") for i, t in enumerate(terms)]


def weight_from_spec(spec, path: str = "weight") -> Weight:
    if not isinstance(spec, dict):
        raise SpecError(path, "expected a JSON object")
    kind = spec.get("kind")
    try:
        if kind == "power":
            return Power(_num(spec, "gamma", path), _num(spec, "a", path, 0.0),
                         _num(spec, "b", path, math.inf), _num(spec, "c", path, 1.0))
        if kind == "char":
            return Characteristic(_num(spec, "a", path), _num(spec, "b", path), _num(spec, "c", path, 1.0))
        if kind == "const":
            return Constant(_num(spec, "c", path))
        if kind == "logpoly":
            coeffs = spec.get("coeffs")
            if not isinstance(coeffs, list) or not coeffs:
                raise SpecError(f"{path}.coeffs", "expected a nonempty list of numbers")
            for i, c in enumerate(coeffs):
                if isinstance(c, bool) or not isinstance(c, (int, float)):
                    raise SpecError(f"{path}.coeffs[{i}]", f"expected a number, got {c!r}")
            return LogPoly(coeffs, _num(spec, "gamma", path, 0.0), _num(spec, "a", path, 0.0),
                           _num(spec, "b", path, math.inf))
        if kind == "exp":
            return Exponential(_num(spec, "rate", path, 1.0), _num(spec, "c", path, 1.0))
        if kind == "shiftpow":
            return ShiftedPower(_num(spec, "gamma", path), _num(spec, "c", path, 1.0))
        if kind == "sum":
            return WeightSum(_terms(spec, path))
        if kind == "product":
            return WeightProduct(_terms(spec, path))
        if kind == "smoothed":
            depth = spec.get("depth", 1)
            if depth not in (1, 2):
                raise SpecError(f"{path}.depth", "depth must be 1 or 2")
            return smooth(weight_from_spec(spec.get("inner"), f"{path}.inner"), depth)
        if kind == "tabulated":
            for key in ("grid", "values"):
                if not isinstance(spec.get(key), list):
                    raise SpecError(f"{path}.{key}", "expected a list")
            return Tabulated(spec["grid"], spec["values"])
        if kind == "dilated":
            return Dilated(weight_from_spec(spec.get("inner"), f"{path}.inner"), _num(spec, "c", path))
        if kind == "wq":
            from .constructions import WqWeight
            return WqWeight(weight_from_spec(spec.get("source"), f"{path}.source"), _num(spec, "q", path))
        if kind == "shifted":
            return Shifted(weight_from_spec(spec.get("inner"), f"{path}.inner"), _num(spec, "c", path))
    except SpecError:
        raise
    except ValueError as exc:
        raise SpecError(path, str(exc)) from None
    raise SpecError(f"{path}.kind", f"unknown weight kind {kind!r}")
