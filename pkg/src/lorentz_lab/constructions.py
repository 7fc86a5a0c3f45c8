"""The weight w_q with W^q(r) ~ int_0^r w_q + r^q int_r^inf w_q(x)/x^q dx, and the
equivalent maximal-function description of Lambda^1(w).

For a C^1 decreasing ``w`` the construction is

    w_q(r) = -r d/dr[W^(q-1) w] + (q-1) W^(q-1) w
           = -r[(q-1) W^(q-2) w^2 + W^(q-1) w'] + (q-1) W^(q-1) w,

for which int_0^r w_q = W^q - r W^(q-1) w and r^q int_r^inf w_q/x^q = r W^(q-1) w,
so the two sides agree exactly.  Non-smooth inputs are first replaced by one or
two rounds of the averaging Phi(t) = (1/t) int_t^{2t} W, which keeps W <= Phi <= 2W.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .realfun import integrate
from .weights import (LogPoly, Shifted, Tabulated, Weight, WeightSum, limit_at_infinity,
                      limit_at_zero, smooth)

CLAMP_REL = 1e-8
CLAMP_MAX_FRACTION = 0.01
# |w_q| below this multiple of its summed terms is cancellation noise
ROUNDING_REL = 64 * np.finfo(float).eps


class PreconditionError(ValueError):
    """The input weight is outside the construction's hypotheses."""


class ConstructionError(RuntimeError):
    """The construction produced values that exact arithmetic rules out."""


class WqWeight(Weight):
    """w_q evaluated pointwise from w, W and w'; primitives go through quadrature."""

    exact_primitive = False
    smoothness = "continuous"

    def __init__(self, source: Weight, q: float):
        if q < 1:
            raise ValueError("need q >= 1")
        self.source, self.q = source, float(q)
        self.breakpoints = tuple(source.breakpoints)

    def terms(self, t):
        """(value, local scale) with the scale summing the absolute terms."""
        t = np.asarray(t, dtype=float)
        q = self.q
        w = np.asarray(self.source(t), dtype=float)
        Wt = np.asarray(self.source.W(t), dtype=float)
        dw = np.asarray(self.source.derivative(t), dtype=float)
        with np.errstate(all="ignore"):
            Wq1 = np.where(Wt > 0, Wt ** (q - 1), 1.0 if q == 1 else 0.0)
            # (q-1) W^(q-2) w^2 written as (q-1) W^(q-1) w (w/W) to stay finite at W = 0
            a = np.where(Wt > 0, (q - 1) * Wq1 * w * (w / np.where(Wt > 0, Wt, 1.0)), 0.0)
            b = Wq1 * dw
            c = (q - 1) * Wq1 * w
        val = -t * (a + b) + c
        # W^(q-1) w is the natural size of w_q; derivative terms cancel near flat stretches
        ds = np.asarray(self.source.derivative_scale(t), dtype=float)
        scale = np.abs(t * a) + t * Wq1 * ds + np.abs(c) + np.abs(Wq1 * w)
        return val, scale

    def __call__(self, t):
        val, scale = self.terms(t)
        return np.where(np.abs(val) <= ROUNDING_REL * scale, 0.0, val)

    def to_spec(self):
        return {"kind": "wq", "source": self.source.to_spec(), "q": self.q}

    def __repr__(self):
        return f"WqWeight({self.source!r}, q={self.q:g})"


@dataclass
class EquivalenceReport:
    c1: float
    c2: float
    grid: dict
    samples: tuple = ()
    passed: bool = False
    witness: dict | None = None

    def to_dict(self, with_samples: bool = False):
        out = {"c1": self.c1, "c2": self.c2, "grid": self.grid, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = self.witness
        if with_samples:
            out["samples"] = [list(s) for s in self.samples]
        return out


@dataclass
class WqResult:
    q: float
    source: Weight
    wq: Weight
    depth: int
    verification: EquivalenceReport
    clamped: int = 0
    points: int = 0

    def to_dict(self):
        return {"q": self.q, "source": self.source.to_spec(), "w_q": self.wq.to_spec(),
                "smoothing_depth": self.depth, "clamped_points": self.clamped,
                "verification": self.verification.to_dict()}


# --------------------------------------------------------------------------
# quadrature along a grid
# --------------------------------------------------------------------------

def _kinks(pts, a, b):
    return tuple(x for x in pts if a < x < b)


def _cell_integrals(g, edges, n=48):
    """Fixed-order Gauss-Legendre on every cell at once; (values, 24-vs-48 discrepancy)."""
    a, b = edges[:-1], edges[1:]
    half, mid = 0.5 * (b - a), 0.5 * (b + a)
    out = []
    for m in (n // 2, n):
        x, wts = np.polynomial.legendre.leggauss(m)
        nodes = mid[:, None] + half[:, None] * x[None, :]
        vals = np.asarray(g(nodes.ravel()), dtype=float).reshape(nodes.shape)
        out.append(half * (vals @ wts))
    return out[1], np.abs(out[1] - out[0])


def cumulative_primitive_and_tail(f: Weight, r: np.ndarray, q: float, tol: float = 1e-11):
    """int_0^r f and int_r^inf f/x^q at every grid point, summed cell by cell.

    Cells are the grid intervals split at the weight's breakpoints.  Returns
    (V, tail, diverged); ``tail`` is ``inf`` when the far end diverges.
    """
    pts = tuple(f.breakpoints)
    if getattr(f, "exact_primitive", False):
        return (np.asarray(f.W(r), dtype=float), np.asarray(f.tail_integral(r, q), dtype=float),
                False)
    extra = [x for x in pts if r[0] < x < r[-1]]
    edges = np.unique(np.concatenate((r, extra)))
    at = np.searchsorted(edges, r)
    head = integrate(f, 0.0, float(r[0]), tol=tol, points=_kinks(pts, 0.0, r[0])).value
    cells, _ = _cell_integrals(f, edges)
    V = head + np.concatenate(([0.0], np.cumsum(cells)))[at]

    def g(x):
        return f(x) / x ** q
    tcells, _ = _cell_integrals(g, edges)
    far = integrate(g, float(r[-1]), math.inf, tol=tol, points=_kinks(pts, r[-1], math.inf))
    if far.diverged:
        return V, np.full_like(r, math.inf), True
    tail = far.value + np.concatenate((np.cumsum(tcells[::-1])[::-1], [0.0]))[at]
    return V, tail, False


def verify_wq_identity(w: Weight, wq: Weight, q: float, cfg: RunConfig | None = None,
                 bounds: tuple[float, float] | None = None) -> EquivalenceReport:
    """c1 <= [int_0^r w_q + r^q int_r^inf w_q/x^q] / W(r)^q <= c2 over the grid."""
    cfg = cfg or RunConfig()
    r = cfg.grid()
    meta = {"min": cfg.grid_min, "max": cfg.grid_max, "points_per_decade": cfg.per_decade}
    Wr = np.asarray(w.W(r), dtype=float)
    V, tail, div = cumulative_primitive_and_tail(wq, r, q)
    if div:
        return EquivalenceReport(0.0, math.inf, meta, (), False,
                                 {"r": float(r[-1]), "reason": "divergent tail of w_q/x^q"})
    keep = Wr > 0
    with np.errstate(all="ignore"):
        ratio = (V[keep] + r[keep] ** q * tail[keep]) / Wr[keep] ** q
    rk = r[keep]
    if not ratio.size:
        return EquivalenceReport(0.0, math.inf, meta, (), False, {"reason": "W vanishes on the grid"})
    i_lo, i_hi = int(np.argmin(ratio)), int(np.argmax(ratio))
    c1, c2 = float(ratio[i_lo]), float(ratio[i_hi])
    ok = 0 < c1 <= c2 < math.inf
    if bounds is not None:
        ok = ok and bounds[0] <= c1 and c2 <= bounds[1]
    wit = None if ok else {"r_min": float(rk[i_lo]), "c1": c1, "r_max": float(rk[i_hi]), "c2": c2}
    return EquivalenceReport(c1, c2, meta, tuple(zip(rk.tolist(), ratio.tolist())), ok, wit)


# --------------------------------------------------------------------------
# construction
# --------------------------------------------------------------------------

def smoothing_depth(w: Weight) -> int:
    if w.smoothness == "c1" and w.has_derivative():
        return 0
    return 1 if w.smoothness == "continuous" else 2


def _materialize(wq: WqWeight, cfg: RunConfig):
    t = cfg.grid()
    val, scale = wq.terms(t)
    bad = val < -CLAMP_REL * scale
    clamped = int(np.count_nonzero(bad))
    if clamped > CLAMP_MAX_FRACTION * t.size:
        i = int(np.argmax(bad))
        raise ConstructionError(f"w_q negative at {clamped} of {t.size} grid points "
                                f"(first at t = {t[i]:.4g}, value {val[i]:.3g})")
    return Tabulated(t, np.maximum(val, 0.0)), clamped


def build_wq(w: Weight, q: float, cfg: RunConfig | None = None,
             bounds: tuple[float, float] | None = None) -> WqResult:
    """w_q for a decreasing w with w(inf) = 0."""
    cfg = cfg or RunConfig()
    if q < 1:
        raise PreconditionError("need q >= 1")
    lim = limit_at_infinity(w)
    if lim is None:
        raise PreconditionError("w must be declared decreasing")
    if lim > 0:
        raise PreconditionError(f"w_q needs w(inf) = 0, found w(inf) = {lim:.6g}")
    depth = smoothing_depth(w)
    if depth == 0:
        wq = WqWeight(w, q)
        val, scale = wq.terms(cfg.grid())
        clamped = int(np.count_nonzero(val < -CLAMP_REL * scale))
        if clamped > CLAMP_MAX_FRACTION * val.size:
            raise ConstructionError(f"w_q negative at {clamped} grid points")
        produced: Weight = wq
    else:
        produced, clamped = _materialize(WqWeight(smooth(w, depth), q), cfg)
    report = verify_wq_identity(w, produced, q, cfg, bounds)
    return WqResult(float(q), w, produced, depth, report, clamped, int(cfg.grid().size))


# --------------------------------------------------------------------------
# equivalent norms on Lambda^1(w)
# --------------------------------------------------------------------------

@dataclass
class EquivalentNorm:
    case: str
    description: str
    v: Weight | None = None
    intersect_l1: bool = False
    construction: WqResult | None = None
    check: object = None
    details: dict = field(default_factory=dict)

    def to_dict(self):
        out = {"case": self.case, "description": self.description,
               "intersect_l1": self.intersect_l1, **self.details}
        if self.v is not None:
            out["v"] = self.v.to_spec()
        if self.construction is not None:
            out["construction"] = self.construction.to_dict()
        if self.check is not None:
            out["check"] = self.check.to_dict()
        return out


def lambda1_equivalent_norm(w: Weight, cfg: RunConfig | None = None) -> EquivalentNorm:
    """Describe Lambda^1(w) for decreasing w by the three-way split on w(inf) and sup w.

    ``i``:   w(inf) = 0, norm ~ Gamma^1(v) with v = w_1.
    ``ii``:  w(inf) > 0 and w bounded, the space is L^1 with norm sup_t t f**(t).
    ``iii``: w(inf) > 0 and w unbounded, Gamma^1(v) intersected with L^1, v built from w - w(inf).
    ``inconclusive``: w not declared decreasing.
    """
    from .embeddings import check_gamma1_equivalence

    cfg = cfg or RunConfig()
    lim = limit_at_infinity(w)
    if lim is None:
        return EquivalentNorm("inconclusive", "weight not declared decreasing")
    if lim == 0:
        res = build_wq(w, 1.0, cfg)
        return EquivalentNorm("i", "Gamma^1(v) with v = w_1", res.wq, False, res,
                              check_gamma1_equivalence(w, res.wq, cfg), {"w_inf": lim})
    top = limit_at_zero(w)
    if top is not None and math.isfinite(top):
        return EquivalentNorm("ii", "L^1, norm sup_t t f**(t)", None, True,
                              details={"w_inf": lim, "w_0": top})
    u = Shifted(w, lim)
    res = build_wq(u, 1.0, cfg)
    return EquivalentNorm("iii", "Gamma^1(v) intersected with L^1, v built from w - w(inf)",
                          res.wq, True, res, check_gamma1_equivalence(u, res.wq, cfg),
                          {"w_inf": lim, "w_0": math.inf})


def v_for_unit_indicator() -> Weight:
    """t^-2 (log(4t) on (1/4, 1/2) and -log t on (1/2, 1)): a bounded, compactly supported v
    whose Gamma^1 norm is equivalent to the Lambda^1 norm for w = chi_(0,1)."""
    return WeightSum([LogPoly([math.log(4.0), 1.0], -2.0, 0.25, 0.5),
                      LogPoly([0.0, -1.0], -2.0, 0.5, 1.0)])
