"""Grid certifiers for the weight classes B_p and R_p.

A verdict is evidence, not proof.  ``member`` needs the observed supremum to be
stable under one grid doubling and one horizon extension; ``not_member`` needs a
divergent tail, a supremum past the blow-up threshold, or a supremum that keeps
growing at every horizon extension; anything else is ``inconclusive``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .config import RunConfig
from .operators import hardy_char_levelset
from .realfun import DecreasingStep
from .weights import Weight, sampled_decreasing

MEMBER, NOT_MEMBER, INCONCLUSIVE = "member", "not_member", "inconclusive"


@dataclass
class Scan:
    constant: float
    witness: dict
    divergent: bool = False
    samples: tuple = ()
    grid: dict = field(default_factory=dict)


@dataclass
class Certificate:
    class_id: str
    p: float
    verdict: str
    constant: float | None
    witness: dict | None
    grid: dict
    monotonicity_declared: bool
    history: list = field(default_factory=list)
    samples: tuple = ()

    @property
    def is_member(self) -> bool:
        return self.verdict == MEMBER

    def to_dict(self) -> dict:
        out = {"class": self.class_id, "p": self.p, "verdict": self.verdict,
               "grid": self.grid, "monotonicity_declared": self.monotonicity_declared,
               "history": self.history}
        if self.constant is not None:
            out["constant"] = self.constant
            out["constant_label"] = "observed constant"
        if self.witness is not None:
            out["witness"] = self.witness
        return out


def _grid_meta(cfg: RunConfig, rounds: int) -> dict:
    return {"min": cfg.grid_min, "max": cfg.grid_max, "points_per_decade": cfg.per_decade,
            "refinement_rounds": rounds}


def _rel(a, b):
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


def _run(class_id: str, p: float, w: Weight, scan: Callable[[RunConfig], Scan],
         cfg: RunConfig) -> Certificate:
    base = scan(cfg)
    declared = bool(w.decreasing)
    if base.divergent:
        return Certificate(class_id, p, NOT_MEMBER, None, base.witness,
                           _grid_meta(cfg, 0), declared, [base.constant], base.samples)
    runs = [(cfg, base), (cfg.doubled(), scan(cfg.doubled()))]
    last = cfg
    for k in range(1, cfg.refinement_rounds + 1):
        nxt = cfg.extended(k)
        if (nxt.grid_min, nxt.grid_max) == (last.grid_min, last.grid_max):
            break
        runs.append((nxt, scan(nxt)))
        last = nxt
    history = [r.constant for _, r in runs]
    top_cfg, top = max(runs, key=lambda item: item[1].constant)
    meta = _grid_meta(last, len(runs) - 1)
    if any(r.divergent for _, r in runs):
        wit = next(r.witness for _, r in runs if r.divergent)
        return Certificate(class_id, p, NOT_MEMBER, None, wit, meta, declared, history, base.samples)
    if top.constant > cfg.blow_up_threshold:
        return Certificate(class_id, p, NOT_MEMBER, None, top.witness, meta, declared, history, base.samples)
    stable_dbl = _rel(runs[1][1].constant, base.constant) < cfg.stability
    ext = [r.constant for _, r in runs[2:]]
    stable_ext = not ext or _rel(ext[0], runs[1][1].constant) < cfg.stability or _rel(ext[0], base.constant) < cfg.stability
    if stable_dbl and stable_ext:
        return Certificate(class_id, p, MEMBER, top.constant, None, meta, declared, history, base.samples)
    chain = [base.constant] + ext
    if len(chain) > 1 and all(b > a * (1 + cfg.stability) for a, b in zip(chain, chain[1:])):
        return Certificate(class_id, p, NOT_MEMBER, None, top.witness, meta, declared, history, base.samples)
    return Certificate(class_id, p, INCONCLUSIVE, top.constant, top.witness, meta, declared, history, base.samples)


# --------------------------------------------------------------------------
# B_p
# --------------------------------------------------------------------------

def _bp_scan(w: Weight, p: float):
    def scan(cfg: RunConfig) -> Scan:
        r = cfg.grid()
        Wr = np.asarray(w.W(r), dtype=float)
        tail = np.asarray(w.tail_integral(r, p), dtype=float)
        if np.all(np.isinf(tail)):
            return Scan(math.inf, {"r": float(r[0]), "ratio": math.inf, "reason": "divergent tail"}, True)
        with np.errstate(all="ignore"):
            ratio = np.where(Wr > 0, r ** p * tail / np.where(Wr > 0, Wr, 1.0),
                             np.where(tail > 0, math.inf, 0.0))
        if np.any(np.isinf(ratio)):
            i = int(np.argmax(np.isinf(ratio)))
            reason = "divergent tail" if np.isinf(tail[i]) else "W(r) = 0 with positive tail"
            return Scan(math.inf, {"r": float(r[i]), "ratio": math.inf, "reason": reason}, True)
        i = int(np.argmax(ratio))
        return Scan(float(ratio[i]), {"r": float(r[i]), "ratio": float(ratio[i])},
                    samples=tuple(zip(r.tolist(), ratio.tolist())))
    return scan


def certify_bp(w: Weight, p: float, cfg: RunConfig | None = None) -> Certificate:
    """int_r^inf w(s)/s^p ds <= (C/r^p) W(r) for all r > 0."""
    if p <= 0:
        raise ValueError("need p > 0")
    return _run("Bp", p, w, _bp_scan(w, p), cfg or RunConfig())


# --------------------------------------------------------------------------
# R_p
# --------------------------------------------------------------------------

def _rp_scan(w: Weight, p: float):
    def scan(cfg: RunConfig) -> Scan:
        r = cfg.grid()
        Wr = np.asarray(w.W(r), dtype=float)
        keep = Wr > 0
        r, Wr = r[keep], Wr[keep]
        if r.size < 2:
            return Scan(0.0, {"reason": "W vanishes on the grid"})
        g = Wr / r ** p
        # max over s >= r of g(s); s = r is allowed, so C >= 1
        suffix = np.maximum.accumulate(g[::-1])[::-1]
        ratio = suffix / g
        i = int(np.argmax(ratio))
        j = i + int(np.argmax(g[i:]))
        return Scan(float(ratio[i]), {"r": float(r[i]), "s": float(r[j]), "ratio": float(ratio[i])},
                    samples=tuple(zip(r.tolist(), g.tolist())))
    return scan


def certify_rp(w: Weight, p: float, cfg: RunConfig | None = None) -> Certificate:
    """W(s)/s^p <= C W(r)/r^p whenever r < s."""
    if p <= 0:
        raise ValueError("need p > 0")
    return _run("Rp", p, w, _rp_scan(w, p), cfg or RunConfig())


def certify_quasi_decreasing_mean(w: Weight, cfg: RunConfig | None = None) -> Certificate:
    """W(t)/t <= C W(s)/s for s <= t; same scan as R_1 under its own label."""
    return _run("QuasiDecreasingPrimitive", 1.0, w, _rp_scan(w, 1.0), cfg or RunConfig())


# --------------------------------------------------------------------------
# restricted weak type, straight from the level sets of S chi_(0,r)
# --------------------------------------------------------------------------

def _rwt_scan(w: Weight, p: float):
    def scan(cfg: RunConfig) -> Scan:
        r = cfg.grid()
        Wr = np.asarray(w.W(r), dtype=float)
        keep = Wr > 0
        r, Wr = r[keep], Wr[keep]
        if r.size < 2:
            return Scan(0.0, {"reason": "W vanishes on the grid"})
        span = math.log10(cfg.grid_max / cfg.grid_min)
        m = int(math.ceil(span * cfg.per_decade))
        # levels offset by half a grid step so s = r/level never lands on the r-grid
        lam = 10.0 ** (-(np.arange(m) + 0.5) / cfg.per_decade)
        s = r[:, None] / lam[None, :]
        valid = s <= cfg.grid_max
        measure = np.asarray(w.W(np.where(valid, s, 1.0)), dtype=float)
        ratio = np.where(valid, lam[None, :] ** p * measure / Wr[:, None], 0.0)
        k = int(np.argmax(ratio))
        i, j = divmod(k, lam.size)
        # spot-check the closed-form level-set route at the optimum
        direct = hardy_char_levelset(float(r[i]), float(lam[j]), w)
        c = float(lam[j] ** p * direct / Wr[i])
        return Scan(c, {"r": float(r[i]), "level": float(lam[j]), "ratio": c})
    return scan


def check_restricted_weak_type(w: Weight, p: float, cfg: RunConfig | None = None) -> Certificate:
    """w({S chi_(0,r) > level}) <= C W(r) / level^p."""
    if p <= 0:
        raise ValueError("need p > 0")
    return _run("RestrictedWeakType", p, w, _rwt_scan(w, p), cfg or RunConfig())


# --------------------------------------------------------------------------
# mean values against a measure
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class MeanValueReport:
    max_increase: float
    monotone: bool
    points: int
    first_point: float

    def to_dict(self):
        return {"max_increase": self.max_increase, "monotone": self.monotone,
                "points": self.points, "first_point": self.first_point}


def _weighted_primitive(g, mu: Weight, t):
    if isinstance(g, DecreasingStep):
        edges = np.concatenate(([0.0], g.breakpoints))
        Mt = np.asarray(mu.W(t), dtype=float)
        Me = np.asarray(mu.W(edges), dtype=float)
        out = np.zeros_like(t)
        for v, a, b, Ma in zip(g.values, edges[:-1], edges[1:], Me[:-1]):
            Mb = np.where(t < b, Mt, Me[np.searchsorted(edges, b)])
            out += v * np.where(t > a, Mb - Ma, 0.0)
        return out
    from .realfun import integrate
    pts = tuple(getattr(g, "breakpoints", ())) + tuple(mu.breakpoints)
    return np.array([integrate(lambda s: g(s) * mu(s), 0.0, x, points=pts).value for x in t])


def check_mean_value_decreasing(g, mu_density: Weight, cfg: RunConfig | None = None,
                                tol: float = 1e-12) -> MeanValueReport:
    """Is t -> (1/mu(0,t)) int_0^t g dmu nonincreasing on the grid?"""
    cfg = cfg or RunConfig()
    t = cfg.grid()
    mass = np.asarray(mu_density.W(t), dtype=float)
    keep = mass > 0
    t, mass = t[keep], mass[keep]
    if t.size < 2:
        return MeanValueReport(0.0, True, int(t.size), math.nan)
    mean = _weighted_primitive(g, mu_density, t) / mass
    scale = max(float(np.max(np.abs(mean))), 1e-300)
    inc = float(max(np.max(np.diff(mean)), 0.0)) / scale
    return MeanValueReport(inc, inc <= tol, int(t.size), float(t[0]))


def declared_monotonicity_holds(w: Weight) -> bool:
    return not w.decreasing or sampled_decreasing(w)
