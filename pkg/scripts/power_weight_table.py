"""Certify t^gamma against B_p and R_p on a (gamma, p) table and compare with the closed-form rule."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from lorentz_lab.classes import certify_bp, certify_rp
from lorentz_lab.weights import Power


def expected_bp_constant(gamma: float, p: float):
    return (gamma + 1) / (p - gamma - 1) if gamma < p - 1 else None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--p", type=float, nargs="+", default=[1.0, 2.0, 3.0])
    parser.add_argument("--gamma-step", type=float, default=0.5)
    args = parser.parse_args(argv)
    print(f"{'p':>4} {'gamma':>6} {'B_p':>11} {'C_B':>9} {'exact':>9} {'R_p':>11} {'C_R':>7}  rule")
    mismatches = 0
    for p in args.p:
        # always include the boundary gamma = p - 1
        grid = np.arange(-0.75, p + 0.5 + 1e-9, args.gamma_step)
        for gamma in sorted({round(float(g), 12) for g in grid} | {p - 1}):
            w = Power(gamma)
            bp, rp = certify_bp(w, p), certify_rp(w, p)
            exact = expected_bp_constant(gamma, p)
            rule = bp.is_member == (gamma < p - 1) and rp.is_member == (gamma <= p - 1)
            mismatches += not rule
            cb = f"{bp.constant:9.4g}" if bp.is_member else f"{'-':>9}"
            ce = f"{exact:9.4g}" if exact is not None else f"{'-':>9}"
            cr = f"{rp.constant:7.4g}" if rp.is_member else f"{'-':>7}"
            print(f"{p:4g} {gamma:6g} {bp.verdict:>11} {cb} {ce} {rp.verdict:>11} {cr}  {'ok' if rule else 'MISMATCH'}")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
