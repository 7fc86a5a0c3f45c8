"""Weighted Lorentz-space functionals, Hardy-type weight classes, and the w_q construction."""

from .config import SCHEMA, RunConfig, SpecError
from .realfun import DecreasingStep, StepFunction, integrate, profile_from_spec, rearrange
from .weights import weight_from_spec

__version__ = "0.1.0"

__all__ = [
    "SCHEMA",
    "RunConfig",
    "SpecError",
    "DecreasingStep",
    "StepFunction",
    "integrate",
    "profile_from_spec",
    "rearrange",
    "weight_from_spec",
    "__version__",
]
