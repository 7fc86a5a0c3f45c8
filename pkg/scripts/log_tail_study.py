"""Partial integrals of the log-tail witness for w = 1: the Lambda^1 side converges, the Gamma^1_alpha side does not."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from lorentz_lab.embeddings import fit_loglog, log_tail_gamma_alpha_partial, log_tail_lambda1_partial


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--alpha", type=float, default=0.5)
    parser.add_argument("--max-exponent", type=int, default=16)
    args = parser.parse_args(argv)
    T = np.array([10.0 ** k for k in range(2, args.max_exponent + 1, 2)])
    lam = log_tail_lambda1_partial(args.alpha, T)
    gam = log_tail_gamma_alpha_partial(args.alpha, T)
    print(f"{'T':>8} {'Lambda^1 partial':>17} {'step':>10} {'Gamma^1_alpha partial':>22}")
    prev = None
    for t, a, g in zip(T, lam, gam):
        step = "" if prev is None else f"{a - prev:10.3e}"
        print(f"{t:8.0e} {a:17.12f} {step:>10} {g:22.10f}")
        prev = a
    slope, intercept, r2 = fit_loglog(T[T >= 1e4], gam[T >= 1e4])
    print(f"Gamma^1_alpha ~ {slope:.4f} log log T + {intercept:.4f}  (R^2 = {r2:.6f})")
    b = 1.0 / args.alpha
    print(f"Lambda^1 limit {1 + 1 / (b - 1):.6f}; the gap at T is log(T)^(1-b)/(b-1)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
