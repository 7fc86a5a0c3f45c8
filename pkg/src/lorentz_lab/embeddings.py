"""Two-sided functional conditions for embeddings, and witness-family ratio evidence.

``check_sandwich`` and ``check_gamma1_equivalence`` test conditions that are equivalent to an
embedding, so they report ``holds`` or ``fails``.  ``norm_ratio_evidence`` only
samples a family of functions and reports ``evidence``; strictness is never
concluded from sampling alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as sci_integrate
from scipy import stats

from .config import RunConfig
from .constructions import cumulative_primitive_and_tail, verify_wq_identity
from .norms import evaluate
from .realfun import AnalyticDecay, DecreasingProfile, DecreasingStep
from .weights import Weight, limit_at_infinity

HOLDS, FAILS, EVIDENCE = "holds", "fails", "evidence"
DEMONSTRATED, BOUNDED, NOT_DEMONSTRATED = "strictness demonstrated", "boundedness evidence", "not demonstrated"


@dataclass
class EmbeddingVerdict:
    relation: str
    status: str
    constants: tuple | None = None
    witness: dict | None = None
    evidence: dict | None = None
    meta: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def to_dict(self):
        out = {"relation": self.relation, "status": self.status, "meta": self.meta}
        if self.constants is not None:
            out["constants"] = {"c1": self.constants[0], "c2": self.constants[1]}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.evidence is not None:
            out["evidence"] = self.evidence
        return out


def _rel(a, b):
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


def _two_sided(relation: str, scan: Callable[[RunConfig], tuple], cfg: RunConfig) -> EmbeddingVerdict:
    """Holds iff 0 < c1 <= c2 < inf on the base grid and both constants move by less than
    the stability tolerance under one grid doubling and one horizon extension."""
    runs = []
    for label, c in (("base", cfg), ("doubled", cfg.doubled()), ("extended", cfg.extended(1))):
        c1, c2, wit = scan(c)
        runs.append({"grid": label, "min": c.grid_min, "max": c.grid_max,
                     "points_per_decade": c.per_decade, "c1": c1, "c2": c2})
        if wit is not None:
            return EmbeddingVerdict(relation, FAILS, None, {**wit, "grid": label}, meta={"runs": runs})
    c1s = [r["c1"] for r in runs]
    c2s = [r["c2"] for r in runs]
    if not all(0 < a <= b < math.inf for a, b in zip(c1s, c2s)):
        i = next(k for k in range(3) if not 0 < c1s[k] <= c2s[k] < math.inf)
        return EmbeddingVerdict(relation, FAILS, None,
                                {"reason": "degenerate constant", "c1": c1s[i], "c2": c2s[i]},
                                meta={"runs": runs})
    drift = max(max(_rel(c1s[0], x) for x in c1s[1:]), max(_rel(c2s[0], x) for x in c2s[1:]))
    if drift >= cfg.stability:
        k = int(np.argmax([max(_rel(c1s[0], c1s[j]), _rel(c2s[0], c2s[j])) for j in range(3)]))
        return EmbeddingVerdict(relation, FAILS, None,
                                {"reason": "constants drift under refinement",
                                 "drift": drift, "c1": c1s[k], "c2": c2s[k], "grid": runs[k]["grid"]},
                                meta={"runs": runs})
    return EmbeddingVerdict(relation, HOLDS, (min(c1s), max(c2s)), meta={"runs": runs})


def check_sandwich(w: Weight, v: Weight, q: float, cfg: RunConfig | None = None) -> EmbeddingVerdict:
    """W(r)^q ~ V(r) + r^q int_r^inf v(x)/x^q dx with two-sided constants."""
    cfg = cfg or RunConfig()
    if q <= 1:
        raise ValueError("need q > 1")

    def scan(c):
        rep = verify_wq_identity(w, v, q, c)
        if rep.witness is not None and "reason" in rep.witness:
            return rep.c1, rep.c2, rep.witness
        return rep.c1, rep.c2, None
    out = _two_sided("sandwich", scan, cfg)
    out.meta["q"] = q
    out.meta["w_inf"] = limit_at_infinity(w)
    return out


def check_gamma1_equivalence(w: Weight, v: Weight, cfg: RunConfig | None = None) -> EmbeddingVerdict:
    """W(r)/r ~ V(r)/r + int_r^inf v(s)/s ds with two-sided constants."""
    cfg = cfg or RunConfig()

    def scan(c):
        r = c.grid()
        Wr = np.asarray(w.W(r), dtype=float)
        V, tail, div = cumulative_primitive_and_tail(v, r, 1.0)
        if div or np.any(np.isinf(tail)):
            return 0.0, math.inf, {"r": float(r[-1]), "reason": "S*v diverges"}
        rhs = V / r + tail
        lhs = Wr / r
        bad = (rhs <= 0) & (lhs > 0)
        if np.any(bad):
            i = int(np.argmax(bad))
            return 0.0, math.inf, {"r": float(r[i]), "reason": "S(S*v) vanishes where W > 0"}
        keep = lhs > 0
        ratio = lhs[keep] / rhs[keep]
        return float(ratio.min()), float(ratio.max()), None
    return _two_sided("gamma1", scan, cfg)


# --------------------------------------------------------------------------
# witness functions
# --------------------------------------------------------------------------

def truncated_reciprocal(a: float, s: float) -> AnalyticDecay:
    """f* = 1 on [0, a], a/x on (a, s a], 0 beyond."""
    if a <= 0 or s <= 1:
        raise ValueError("need a > 0 and s > 1")
    return AnalyticDecay(c=a, a=1.0, b=0.0, t0=a, end=s * a)


def log_tail_witness(alpha: float) -> AnalyticDecay:
    """f* = 1/e on (0, e], t^-1 log(t)^(-1/alpha) beyond: integrable, but f** decays only like 1/t."""
    if not 0 < alpha < 1:
        raise ValueError("need 0 < alpha < 1")
    return AnalyticDecay(c=1.0, a=1.0, b=1.0 / alpha, t0=math.e)


def log_tail_lambda1_partial(alpha: float, T) -> np.ndarray:
    """int_0^T f* for the log-tail witness, in closed form."""
    f = log_tail_witness(alpha)
    return np.array([float(f.primitive(t)) for t in np.atleast_1d(T)])


def log_tail_gamma_alpha_partial(alpha: float, T) -> np.ndarray:
    """int_e^T (f*)^alpha (f**)^(1-alpha) for the log-tail witness.

    With t = e^u the integrand becomes F(e^u)^(1-alpha) / u where
    F(e^u) = 1 + (1 - u^(1-b)) / (b - 1), b = 1/alpha, so only a smooth integral
    over u in [1, log T] is needed.
    """
    b = 1.0 / alpha

    def g(u):
        F = 1.0 + (1.0 - u ** (1.0 - b)) / (b - 1.0)
        return F ** (1.0 - alpha) / u
    out = []
    for t in np.atleast_1d(T):
        U = math.log(t)
        val, _ = sci_integrate.quad(g, 1.0, U, limit=200, epsabs=0, epsrel=1e-12)
        out.append(val)
    return np.array(out)


def fit_loglog(T, values):
    """Least squares values ~ c log log T + d; returns (c, d, r_squared)."""
    x = np.log(np.log(np.asarray(T, dtype=float)))
    res = stats.linregress(x, np.asarray(values, dtype=float))
    return float(res.slope), float(res.intercept), float(res.rvalue ** 2)


def step_approximant(g: Callable, lo: float, hi: float, per_octave: int = 8) -> DecreasingStep:
    """Decreasing step function equal to g at the left end of each geometric block on (lo, hi],
    and to g(lo) on (0, lo]."""
    edges = np.geomspace(lo, hi, max(2, int(math.ceil(math.log2(hi / lo) * per_octave)) + 1))
    vals = np.asarray(g(edges[:-1]), dtype=float)
    return DecreasingStep(np.concatenate(([lo], edges[1:])), np.concatenate(([vals[0]], vals)))


# --------------------------------------------------------------------------
# ratio evidence over witness families
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class NormSpec:
    space: str
    weight: Weight
    p: float
    q: float | None = None
    alpha: float | None = None

    @property
    def label(self):
        extra = "".join(f",{k}={v:g}" for k, v in (("q", self.q), ("alpha", self.alpha)) if v is not None)
        return f"{self.space}(p={self.p:g}{extra})"

    def __call__(self, f: DecreasingProfile):
        return evaluate(self.space, f, self.weight, self.p, self.q, self.alpha)


@dataclass(frozen=True)
class WitnessFamily:
    name: str
    params: tuple
    build: Callable[[float], DecreasingProfile]


DEFAULT_PARAMS = tuple(float(2 ** k) for k in range(1, 21))


def char_family(params: Sequence[float] = DEFAULT_PARAMS, scale: float = 1.0) -> WitnessFamily:
    """chi_(0, scale/s)."""
    return WitnessFamily(f"char(0,{scale:g}/s)", tuple(params),
                         lambda s: DecreasingStep([scale / s], [1.0]))


def truncated_reciprocal_family(a: float = 1.0, params: Sequence[float] = DEFAULT_PARAMS) -> WitnessFamily:
    return WitnessFamily(f"truncated_reciprocal(a={a:g})", tuple(params), lambda s: truncated_reciprocal(a, s))


def truncation_family(name: str, g: Callable, hi: float,
                      params: Sequence[float] = DEFAULT_PARAMS) -> WitnessFamily:
    """Step approximants of a decreasing g on (1/s, hi], capped at g(1/s) below."""
    return WitnessFamily(name, tuple(params), lambda s: step_approximant(g, 1.0 / s, hi))


def classify_ratios(params, ratios, threshold: float, stability: float = 0.05) -> dict:
    """Log-log regression of the ratio against log(1 + log s), plus the two verdict tests."""
    s = np.asarray(params, dtype=float)
    r = np.asarray(ratios, dtype=float)
    out = {"params": s.tolist(), "ratios": r.tolist(), "sup": float(np.max(r))}
    monotone = bool(np.all(np.diff(r) >= -1e-12 * np.abs(r[:-1])))
    out["monotone"] = monotone
    if np.any(np.isinf(r)):
        out.update(slope=math.inf, r_squared=1.0, crossing_log10_s=None,
                   outcome=DEMONSTRATED, reason="target norm diverges on a family member")
        return out
    x = np.log1p(np.log(s))
    y = np.log(np.maximum(r, 1e-300))
    fit = stats.linregress(x, y)
    slope, r2 = float(fit.slope), float(fit.rvalue ** 2)
    out.update(slope=slope, intercept=float(fit.intercept), r_squared=r2)
    crossing = None
    if slope > 0:
        # log(1 + log s*) = (log threshold - intercept) / slope
        xc = (math.log(threshold) - fit.intercept) / slope
        crossing = math.expm1(xc) / math.log(10) if xc < 700 else math.inf
    out["crossing_log10_s"] = crossing
    half = r[len(r) // 2:]
    spread = float((half.max() - half.min()) / half.max()) if half.max() > 0 else 0.0
    out["last_half_spread"] = spread
    if out["sup"] > threshold or (slope > 0 and r2 >= 0.99 and monotone and crossing is not None):
        out["outcome"] = DEMONSTRATED
    elif spread < stability:
        out["outcome"] = BOUNDED
    else:
        out["outcome"] = NOT_DEMONSTRATED
    return out


def norm_ratio_evidence(source: NormSpec, target: NormSpec, family: WitnessFamily,
                        cfg: RunConfig | None = None) -> EmbeddingVerdict:
    """sup over the family of ||f||_target / ||f||_source."""
    cfg = cfg or RunConfig()
    if not family.params:
        raise ValueError("witness family is empty")
    ratios = []
    for s in family.params:
        f = family.build(s)
        a, b = source(f), target(f)
        if b.diverged or math.isinf(b.value):
            ratios.append(math.inf)
        elif a.diverged or a.value == 0:
            ratios.append(0.0)
        else:
            ratios.append(b.value / a.value)
    ev = classify_ratios(family.params, ratios, cfg.blow_up_threshold, cfg.stability)
    ev["family"] = family.name
    return EmbeddingVerdict(f"{source.label} -> {target.label}", EVIDENCE, evidence=ev,
                            meta={"threshold": cfg.blow_up_threshold})
