"""Command-line front end.

Exit status: 0 on success or a passing verdict, 1 on a failing verdict, 2 on a
usage error or a malformed JSON spec.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import __version__, classes, constructions, embeddings, gallery, norms
from .config import SCHEMA, RunConfig, SpecError
from .realfun import profile_from_spec
from .weights import weight_from_spec

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _json_arg(text: str, path: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(path, f"invalid JSON ({exc.msg} at column {exc.colno})") from None


def _require(args, name):
    val = getattr(args, name)
    if val is None:
        raise UsageError(f"--{name.replace('_', '-')} is required for '{args.command}'")
    return val


def _weight(args, name="weight"):
    return weight_from_spec(_json_arg(_require(args, name), name), name)


def _finite(x):
    """JSON has no infinities; encode them as strings."""
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, dict):
        return {k: _finite(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_finite(v) for v in x]
    return x


# --------------------------------------------------------------------------
# subcommands: each returns (status, result dict, samples for csv, text line)
# --------------------------------------------------------------------------

def cmd_norm(args, cfg):
    w = _weight(args)
    f = profile_from_spec(_json_arg(_require(args, "function"), "function"), "function")
    val = norms.evaluate(args.space, f, w, _require(args, "p"), args.q, args.alpha)
    res = {"space": args.space, "p": args.p, "q": args.q, "alpha": args.alpha, **val.to_dict()}
    text = f"{args.space} norm = {val.value:.12g}" + (" (diverged)" if val.diverged else "")
    return EXIT_OK, res, None, text


def cmd_certify(args, cfg):
    p = 1.0 if args.cls == "qdm" else _require(args, "p")
    cert = gallery.certify(args.cls, _weight(args), p, cfg)
    status = EXIT_OK if cert.is_member else EXIT_FAIL
    text = f"{cert.class_id} p={cert.p:g}: {cert.verdict}"
    if cert.constant is not None:
        text += f", observed constant {cert.constant:.6g}"
    if cert.witness:
        text += f", witness {cert.witness}"
    return status, cert.to_dict(), cert.samples, text


def cmd_construct_wq(args, cfg):
    w = _weight(args)
    q = args.q if args.q is not None else 1.0
    try:
        res = constructions.build_wq(w, q, cfg)
    except (constructions.PreconditionError, constructions.ConstructionError) as exc:
        return EXIT_FAIL, {"error": str(exc)}, None, f"construction refused: {exc}"
    grid = cfg.grid()
    samples = tuple(zip(grid.tolist(), [float(x) for x in res.wq(grid)]))
    rep = res.verification
    text = (f"w_q (q={q:g}, smoothing depth {res.depth}): c1 = {rep.c1:.9g}, c2 = {rep.c2:.9g}, "
            f"{'pass' if rep.passed else 'FAIL'}")
    return (EXIT_OK if rep.passed else EXIT_FAIL), res.to_dict(), samples, text


def cmd_equiv_norm(args, cfg):
    res = constructions.lambda1_equivalent_norm(_weight(args), cfg)
    ok = res.case != "inconclusive" and (res.check is None or res.check.holds)
    text = f"case {res.case}: {res.description}"
    if res.check is not None:
        text += f"; check {res.check.status}"
    return (EXIT_OK if ok else EXIT_FAIL), res.to_dict(), None, text


def cmd_check(args, cfg):
    w = _weight(args)
    if args.relation == "ratio":
        family_spec = _json_arg(_require(args, "family"), "family")
        src = _json_arg(_require(args, "source"), "source")
        tgt = _json_arg(_require(args, "target"), "target")
        try:
            family = gallery._family(family_spec)
            verdict = embeddings.norm_ratio_evidence(gallery._norm_spec(src, w), gallery._norm_spec(tgt, w),
                                                     family, cfg)
        except KeyError as exc:
            raise SpecError("source/target", f"missing field {exc}") from None
        ev = verdict.evidence
        samples = tuple(zip(ev["params"], ev["ratios"]))
        return EXIT_OK, verdict.to_dict(), samples, f"{verdict.relation}: {ev['outcome']} (sup {ev['sup']:.6g})"
    v = _weight(args, "v")
    if args.relation == "sandwich":
        verdict = embeddings.check_sandwich(w, v, _require(args, "q"), cfg)
    else:
        verdict = embeddings.check_gamma1_equivalence(w, v, cfg)
    text = f"{verdict.relation}: {verdict.status}"
    if verdict.constants:
        text += f", constants [{verdict.constants[0]:.6g}, {verdict.constants[1]:.6g}]"
    if verdict.witness:
        text += f", witness {verdict.witness}"
    return (EXIT_OK if verdict.holds else EXIT_FAIL), verdict.to_dict(), None, text


def cmd_gallery(args, cfg):
    if args.scenario:
        try:
            rep = gallery.run(args.scenario, cfg)
        except KeyError:
            raise UsageError(f"unknown scenario {args.scenario!r}; known: {', '.join(gallery.scenario_ids())}")
        return (EXIT_OK if rep.passed else EXIT_FAIL), rep.to_dict(), None, \
            f"{rep.id}: {'pass' if rep.passed else 'FAIL'}"
    summary = gallery.run_all(args.tag, cfg)
    return (EXIT_OK if summary.passed else EXIT_FAIL), summary.to_dict(), None, summary.table()


COMMANDS = {
    "norm": cmd_norm,
    "certify": cmd_certify,
    "construct-wq": cmd_construct_wq,
    "equiv-norm": cmd_equiv_norm,
    "check": cmd_check,
    "gallery": cmd_gallery,
}


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser):
    d = RunConfig()
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--weight", help="weight spec (JSON)")
    p.add_argument("--function", help="decreasing function spec (JSON)")
    p.add_argument("--v", help="second weight spec (JSON)")
    p.add_argument("--grid-min", type=float, default=d.grid_min)
    p.add_argument("--grid-max", type=float, default=d.grid_max)
    p.add_argument("--grid-per-decade", type=int, default=d.per_decade)
    p.add_argument("--tol", type=float, default=d.tol)
    p.add_argument("--threshold", type=float, default=d.blow_up_threshold)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv", "text"), default="json")
    p.add_argument("--seed", type=int, default=d.seed)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lorentz-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="evaluate a Lorentz/Gamma functional")
    p.add_argument("--space", choices=norms.SPACES, required=True)
    _common(p)

    p = sub.add_parser("certify", help="certify a weight class")
    p.add_argument("--class", dest="cls", choices=("bp", "rp", "rwt", "qdm"), required=True)
    _common(p)

    p = sub.add_parser("construct-wq", help="build w_q and verify its two-sided identity")
    _common(p)

    p = sub.add_parser("equiv-norm", help="describe Lambda^1(w) through a maximal-function norm")
    _common(p)

    p = sub.add_parser("check", help="check an embedding condition or collect ratio evidence")
    p.add_argument("--relation", choices=("sandwich", "gamma1", "ratio"), required=True)
    p.add_argument("--source", help="ratio: source norm spec (JSON), e.g. {\"space\":\"lambda\",\"p\":1}")
    p.add_argument("--target", help="ratio: target norm spec (JSON)")
    p.add_argument("--family", help="ratio: witness family (JSON), e.g. {\"kind\":\"char\"}")
    _common(p)

    p = sub.add_parser("gallery", help="run registered scenarios")
    p.add_argument("scenario", nargs="?", help="scenario id; omit to run all")
    p.add_argument("--tag", help="only scenarios carrying this tag")
    _common(p)
    return parser


def _render(fmt, envelope, samples, text) -> str:
    if fmt == "json":
        return json.dumps(_finite(envelope), indent=2, sort_keys=True) + "\n"
    if fmt == "text":
        return text + "\n"
    if not samples:
        raise UsageError(f"'{envelope['command']}' produces no grid scan; use --format json or text")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "value"])
    for t, v in samples:
        writer.writerow([repr(float(t)), repr(float(v))])
    return buf.getvalue()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig(grid_min=args.grid_min, grid_max=args.grid_max, per_decade=args.grid_per_decade,
                        tol=args.tol, blow_up_threshold=args.threshold, seed=args.seed,
                        output=args.format)
        status, result, samples, text = COMMANDS[args.command](args, cfg)
        envelope = {"schema": SCHEMA, "version": __version__, "command": args.command,
                    "config": cfg.to_dict(), "result": result}
        out = _render(args.format, envelope, samples, text)
    except SpecError as exc:
        print(f"error: bad spec at {exc.path}: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return status


if __name__ == "__main__":
    sys.exit(main())
