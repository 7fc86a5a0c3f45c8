"""Named, reproducible scenarios with expected verdicts.

The registry lives in ``gallery.json`` next to this module.  Each scenario is a
list of steps; a step names an operation, its inputs, and the outcome it must
produce.  Scenarios are independent and deterministic for a fixed config.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import classes, constructions, embeddings, norms
from .config import RunConfig
from .realfun import DecreasingStep, profile_from_spec
from .weights import Power, weight_from_spec

REGISTRY_FILE = "gallery.json"
REL_SLACK = 1e-9


@dataclass
class StepResult:
    op: str
    passed: bool
    checks: list
    report: dict

    def to_dict(self):
        return {"op": self.op, "passed": self.passed, "checks": self.checks, "report": self.report}


@dataclass
class ScenarioReport:
    id: str
    description: str
    tags: list
    passed: bool
    steps: list = field(default_factory=list)
    seconds: float = 0.0

    def to_dict(self):
        # wall time stays out of the dict so reports are byte-reproducible
        return {"id": self.id, "description": self.description, "tags": self.tags,
                "passed": self.passed, "steps": [s.to_dict() for s in self.steps]}


def load_registry() -> list[dict]:
    text = resources.files(__package__).joinpath(REGISTRY_FILE).read_text()
    data = json.loads(text)
    return sorted(data["scenarios"], key=lambda s: s["id"])


def scenario_ids() -> list[str]:
    return [s["id"] for s in load_registry()]


# --------------------------------------------------------------------------
# step helpers
# --------------------------------------------------------------------------

def _check(checks, name, expected, observed, ok):
    checks.append({"check": name, "expected": expected, "observed": observed, "passed": bool(ok)})


def _weight(spec):
    if spec == "explicit-v-unit-indicator":
        return constructions.v_for_unit_indicator()
    return weight_from_spec(spec)


def _close(a, b, rtol):
    return abs(a - b) <= rtol * max(abs(b), 1e-300)


CERTIFIERS = {
    "bp": classes.certify_bp,
    "rp": classes.certify_rp,
    "rwt": classes.check_restricted_weak_type,
}


def certify(class_key: str, w, p: float, cfg: RunConfig):
    if class_key == "qdm":
        return classes.certify_quasi_decreasing_mean(w, cfg)
    try:
        fn = CERTIFIERS[class_key]
    except KeyError:
        raise ValueError(f"unknown class {class_key!r}; expected bp, rp, rwt or qdm") from None
    return fn(w, p, cfg)


def _step_certify(step, cfg):
    c = cfg
    if "grid_min" in step:
        c = RunConfig(**{**cfg.to_dict(), "grid_min": step["grid_min"]})
    cert = certify(step["class"], _weight(step["weight"]), step["p"], c)
    exp, checks = step["expect"], []
    _check(checks, "verdict", exp["verdict"], cert.verdict, cert.verdict == exp["verdict"])
    if "constant_max" in exp:
        ok = cert.constant is not None and cert.constant <= exp["constant_max"]
        _check(checks, "constant_max", exp["constant_max"], cert.constant, ok)
    if "witness_ratio_min" in exp:
        ratio = (cert.witness or {}).get("ratio", 0.0)
        _check(checks, "witness_ratio_min", exp["witness_ratio_min"], ratio, ratio > exp["witness_ratio_min"])
    return checks, cert.to_dict()


def _step_norm(step, cfg):
    w = _weight(step["weight"])
    f = profile_from_spec(step["function"])
    val = norms.evaluate(step["space"], f, w, step["p"], step.get("q"), step.get("alpha"))
    exp, checks = step["expect"], []
    if "diverged" in exp:
        _check(checks, "diverged", exp["diverged"], val.diverged, val.diverged == exp["diverged"])
    if "value" in exp:
        _check(checks, "value", exp["value"], val.value,
               not val.diverged and _close(val.value, exp["value"], exp.get("rtol", 1e-9)))
    return checks, val.to_dict()


def random_decreasing_step(rng: np.random.Generator, max_pieces: int = 8) -> DecreasingStep:
    n = int(rng.integers(1, max_pieces + 1))
    bps = np.sort(np.exp(rng.uniform(-5.0, 5.0, n)))
    vals = np.sort(rng.uniform(0.1, 10.0, n))[::-1]
    return DecreasingStep(bps, vals)


def _step_norm_chain(step, cfg):
    """Gamma^(p,inf) <= Lambda^p <= Gamma^p, and Gamma^(p,inf) <= (q/p)^(1/q) Gamma^(p,q)."""
    w = _weight(step["weight"])
    p, q = step["p"], step["q"]
    rng = np.random.default_rng(step.get("seed", cfg.seed))
    violations, worst = 0, 0.0
    ratios = []
    for _ in range(step["samples"]):
        f = random_decreasing_step(rng)
        gw = norms.gamma_weak_norm(f, w, p).value
        lam = norms.lambda_norm(f, w, p).value
        gam = norms.gamma_norm(f, w, p, p).value
        gq = norms.gamma_norm(f, w, p, q).value
        pairs = [(gw, lam), (lam, gam), (gw, (q / p) ** (1 / q) * gq)]
        for lo, hi in pairs:
            if lo > hi * (1 + REL_SLACK):
                violations += 1
                worst = max(worst, lo / hi - 1)
        ratios.append(lam / gq)
    exp, checks = step["expect"], []
    _check(checks, "violations", exp["violations"], violations, violations == exp["violations"])
    return checks, {"samples": step["samples"], "violations": violations, "worst_excess": worst,
                    "max_lambda_over_gamma_q": float(max(ratios))}


def _family(spec):
    kind = spec["kind"]
    if kind == "char":
        return embeddings.char_family(scale=spec.get("scale", 1.0))
    if kind == "truncated_reciprocal":
        return embeddings.truncated_reciprocal_family(spec.get("a", 1.0))
    raise ValueError(f"unknown witness family {kind!r}")


def _norm_spec(spec, w):
    return embeddings.NormSpec(spec["space"], w, spec["p"], spec.get("q"), spec.get("alpha"))


def _step_evidence(step, cfg):
    w = _weight(step["weight"])
    verdict = embeddings.norm_ratio_evidence(_norm_spec(step["source"], w), _norm_spec(step["target"], w),
                                             _family(step["family"]), cfg)
    exp, checks = step["expect"], []
    got = verdict.evidence["outcome"]
    _check(checks, "outcome", exp["outcome"], got, got == exp["outcome"])
    return checks, verdict.to_dict()


def _step_b1_adjudicate(step, cfg):
    members, certs = [], {}
    for a in step["exponents"]:
        cert = classes.certify_bp(Power(-a, 0.0, 1.0), 1.0, cfg)
        certs[str(a)] = cert.to_dict()
        if cert.is_member:
            members.append(a)
    exp, checks = step["expect"], []
    _check(checks, "members", exp["members"], members, members == exp["members"])
    _check(checks, "exactly one convention", 1, len(members), len(members) == 1)
    return checks, {"members": members, "certificates": certs}


def _step_log_tail(step, cfg):
    alpha = step["alpha"]
    T = np.asarray(step["horizons"], dtype=float)
    lam = embeddings.log_tail_lambda1_partial(alpha, T)
    total = float(embeddings.log_tail_witness(alpha).total())
    gam = embeddings.log_tail_gamma_alpha_partial(alpha, T)
    c, d, r2 = embeddings.fit_loglog(T, gam)
    diffs = np.abs(np.diff(lam))
    exp, checks = step["expect"], []
    _check(checks, "lambda_total", exp["lambda_total"], total, _close(total, exp["lambda_total"], exp["rtol"]))
    _check(checks, "lambda_differences_shrink", True, bool(np.all(np.diff(diffs) < 0)),
           bool(np.all(np.diff(diffs) < 0)))
    mono = bool(np.all(np.diff(gam) > 0))
    _check(checks, "gamma_monotone", exp["gamma_monotone"], mono, mono == exp["gamma_monotone"])
    _check(checks, "gamma_r2_min", exp["gamma_r2_min"], r2, r2 >= exp["gamma_r2_min"] and c > 0)
    return checks, {"horizons": T.tolist(), "lambda_partials": lam.tolist(), "lambda_total": total,
                    "gamma_partials": gam.tolist(), "fit": {"slope": c, "intercept": d, "r_squared": r2}}


def _step_gamma1(step, cfg):
    verdict = embeddings.check_gamma1_equivalence(_weight(step["weight"]), _weight(step["v"]), cfg)
    exp, checks = step["expect"], []
    _check(checks, "status", exp["status"], verdict.status, verdict.status == exp["status"])
    if "baseline" in exp and verdict.constants is not None:
        for key, got in zip(("c1", "c2"), verdict.constants):
            base = exp["baseline"][key]
            _check(checks, f"{key} vs baseline", base, got, _close(got, base, exp["rtol"]))
    return checks, verdict.to_dict()


def _step_wq_identity(step, cfg):
    c = cfg
    if "grid" in step:
        c = RunConfig(**{**cfg.to_dict(), "grid_min": step["grid"][0], "grid_max": step["grid"][1]})
    res = constructions.build_wq(_weight(step["weight"]), step["q"], c)
    rep = res.verification
    exp, checks = step["expect"], []
    _check(checks, "passed", True, rep.passed, rep.passed)
    if "within" in exp:
        tol = exp["within"]
        _check(checks, "within", tol, [rep.c1, rep.c2], abs(rep.c1 - 1) <= tol and abs(rep.c2 - 1) <= tol)
    if "depth" in exp:
        _check(checks, "depth", exp["depth"], res.depth, res.depth == exp["depth"])
    if "ratio_max" in exp:
        _check(checks, "ratio_max", exp["ratio_max"], rep.c2 / rep.c1, rep.c2 / rep.c1 <= exp["ratio_max"])
    if "baseline" in exp:
        for key, got in (("c1", rep.c1), ("c2", rep.c2)):
            base = exp["baseline"][key]
            _check(checks, f"{key} vs baseline", base, got, _close(got, base, exp["rtol"]))
    return checks, res.to_dict()


def _step_sandwich(step, cfg):
    w = _weight(step["weight"])
    v = constructions.build_wq(w, step["q"], cfg).wq if step["v"] == "wq" else _weight(step["v"])
    verdict = embeddings.check_sandwich(w, v, step["q"], cfg)
    exp, checks = step["expect"], []
    _check(checks, "status", exp["status"], verdict.status, verdict.status == exp["status"])
    return checks, verdict.to_dict()


def _step_equiv_norm(step, cfg):
    res = constructions.lambda1_equivalent_norm(_weight(step["weight"]), cfg)
    exp, checks = step["expect"], []
    _check(checks, "case", exp["case"], res.case, res.case == exp["case"])
    if "check" in exp:
        got = res.check.status if res.check is not None else None
        _check(checks, "check", exp["check"], got, got == exp["check"])
    return checks, res.to_dict()


STEPS = {
    "certify": _step_certify,
    "norm": _step_norm,
    "norm_chain": _step_norm_chain,
    "evidence": _step_evidence,
    "b1_adjudicate": _step_b1_adjudicate,
    "log_tail": _step_log_tail,
    "gamma1": _step_gamma1,
    "wq_identity": _step_wq_identity,
    "sandwich": _step_sandwich,
    "equiv_norm": _step_equiv_norm,
}


# --------------------------------------------------------------------------
# public entry points
# --------------------------------------------------------------------------

def run(scenario_id: str, cfg: RunConfig | None = None) -> ScenarioReport:
    cfg = cfg or RunConfig()
    registry = {s["id"]: s for s in load_registry()}
    if scenario_id not in registry:
        raise KeyError(f"unknown scenario {scenario_id!r}")
    sc = registry[scenario_id]
    start = time.perf_counter()
    results = []
    for step in sc["steps"]:
        checks, report = STEPS[step["op"]](step, cfg)
        results.append(StepResult(step["op"], all(c["passed"] for c in checks), checks, report))
    return ScenarioReport(sc["id"], sc["description"], sc.get("tags", []),
                          all(r.passed for r in results), results, time.perf_counter() - start)


@dataclass
class GallerySummary:
    reports: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def rows(self):
        return [(r.id, "pass" if r.passed else "FAIL", f"{r.seconds:.2f}s") for r in self.reports]

    def table(self) -> str:
        rows = self.rows()
        width = max([len(r[0]) for r in rows] + [8])
        lines = [f"{'scenario':<{width}}  result  time"]
        lines += [f"{a:<{width}}  {b:<6}  {c}" for a, b, c in rows]
        lines.append(f"{sum(r.passed for r in self.reports)}/{len(rows)} passed")
        return "\n".join(lines)

    def to_dict(self):
        return {"passed": self.passed, "count": len(self.reports),
                "scenarios": [r.to_dict() for r in self.reports]}


def run_all(tag: str | None = None, cfg: RunConfig | None = None) -> GallerySummary:
    """Run every registered scenario (optionally only those carrying ``tag``), sorted by id."""
    ids = [s["id"] for s in load_registry() if tag is None or tag in s.get("tags", [])]
    return GallerySummary([run(i, cfg) for i in ids])
