"""Closed-form reference values, frozen before the implementation was exercised.

Every number here comes from an antiderivative worked by hand, never from the
package under test.
"""

from __future__ import annotations

import math

import numpy as np

E = math.e
LOG2 = math.log(2.0)

# ---- integrals -------------------------------------------------------------
INTEGRALS = [
    # (description, f, a, b, value or None when divergent)
    ("indicator of (0,1) over (0,inf)", lambda t: np.where(t < 1, 1.0, 0.0), 0.0, math.inf, 1.0),
    ("t^-2 over (1,inf)", lambda t: t ** -2.0, 1.0, math.inf, 1.0),
    ("t^-1 over (1,inf)", lambda t: 1.0 / t, 1.0, math.inf, None),
    ("t^-1.5 over (1,inf)", lambda t: t ** -1.5, 1.0, math.inf, 2.0),
    ("e^-t over (0,inf)", lambda t: np.exp(-t), 0.0, math.inf, 1.0),
    ("t^-1/2 over (0,1)", lambda t: t ** -0.5, 0.0, 1.0, 2.0),
]

# ---- rearrangements: (breakpoints, values) -> (breakpoints, values) ----------
REARRANGE = [
    (([1, 2], [1, 2]), ([1, 2], [2, 1])),
    (([1, 3], [2, 1]), ([1, 3], [2, 1])),
    (([5, 6], [0, 3]), ([1], [3])),
]

# ---- weight primitives ------------------------------------------------------
# W of chi_(0,1) at 2; W of t^(1/2) at 4; W of (1 - log t) chi_(0,1) at 1
W_CHAR01_AT_2 = 1.0
W_SQRT_AT_4 = 16.0 / 3.0
W_LOGWEIGHT_AT_1 = 2.0

# ---- Hardy operator -----------------------------------------------------------
ADJOINT_CHAR01_AT_HALF = LOG2
LEVELSET_CONST_R1_HALF = 2.0
LEVELSET_CHAR01_R_HALF_QUARTER = 1.0

# ---- norms -------------------------------------------------------------------
GAMMA22_CHAR01_CONST = math.sqrt(2.0)
LAMBDA1_CHAR01_SQRTWEIGHT = 2.0   # int_0^1 t^-1/2


def w2_exponential(r):
    """w_2 for w = e^-t."""
    r = np.asarray(r, dtype=float)
    return r * np.exp(-r) * (1 - 2 * np.exp(-r)) + (1 - np.exp(-r)) * np.exp(-r)


def v_unit_indicator(t):
    """The explicit v for chi_(0,1): t^-2 log(4t) on (1/4,1/2), -t^-2 log t on (1/2,1)."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    a = (t > 0.25) & (t < 0.5)
    b = (t >= 0.5) & (t < 1.0)
    out[a] = np.log(4 * t[a]) / t[a] ** 2
    out[b] = -np.log(t[b]) / t[b] ** 2
    return out


def bp_ratio_power(gamma, p):
    """r^p int_r^inf s^(gamma-p) ds / W(r) for w = t^gamma; None when the tail diverges."""
    if gamma - p >= -1:
        return None
    return (gamma + 1) / (p - gamma - 1)


def bp_ratio_char01(r):
    """B_1 ratio of chi_(0,1) at r < 1: log(1/r)."""
    return -math.log(r)


def bp_ratio_increasing_root(r):
    """B_1 ratio of t^(1/2) chi_(0,1) at r < 1."""
    return 3 * (1 - math.sqrt(r)) / math.sqrt(r)


def bp_ratio_decreasing_root(r):
    """B_1 ratio of t^(-1/2) chi_(0,1) at r < 1."""
    return 1 - math.sqrt(r)


# ---- log-tail witness (w = 1, alpha = 1/2) -------------------------------------
def log_tail_lambda1_partial(T, b=2.0):
    """int_0^T f* with f* = 1/e on (0,e], 1/(t log^b t) beyond."""
    return 1.0 + (1.0 - math.log(T) ** (1.0 - b)) / (b - 1.0)


LOG_TAIL_LAMBDA1_TOTAL = 2.0

# ---- frozen baselines ----------------------------------------------------------
# two-sided constants of W(r)/r against S(S* v)(r) for chi_(0,1) and the explicit v
GAMMA1_EQUIVALENCE_BASELINE = (4.0 / 9.0, 1.0)
# averaging a constant weight once multiplies it by 3/2
SMOOTH_CONST = 1.5
