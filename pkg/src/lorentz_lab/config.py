"""Run configuration shared by certifiers, checkers and the CLI."""

from __future__ import annotations

from dataclasses import asdict, dataclass, replace

import numpy as np

SCHEMA = "lorentz-lab/1"


class SpecError(ValueError):
    """A malformed weight/function JSON spec. ``path`` points at the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


@dataclass(frozen=True)
class RunConfig:
    grid_min: float = 1e-6
    grid_max: float = 1e6
    per_decade: int = 64
    # refinement may push the grid out to these bounds
    ext_min: float = 1e-12
    ext_max: float = 1e12
    tol: float = 1e-9
    blow_up_threshold: float = 1e3
    refinement_rounds: int = 2
    stability: float = 0.05
    seed: int = 0
    output: str = "json"

    def __post_init__(self):
        if not (0 < self.grid_min < self.grid_max):
            raise ValueError("grid_min must be positive and below grid_max")
        if self.per_decade < 1:
            raise ValueError("per_decade must be >= 1")
        if self.tol <= 0 or self.blow_up_threshold <= 0 or self.stability <= 0:
            raise ValueError("tolerances and thresholds must be positive")
        if self.output not in ("json", "csv", "text"):
            raise ValueError(f"unknown output format {self.output!r}")

    def grid(self) -> np.ndarray:
        return log_grid(self.grid_min, self.grid_max, self.per_decade)

    def doubled(self) -> "RunConfig":
        return replace(self, per_decade=2 * self.per_decade)

    def extended(self, rounds: int = 1) -> "RunConfig":
        """Push both grid ends out by three decades per round, capped at the extension bounds."""
        lo = max(self.grid_min / 10.0 ** (3 * rounds), min(self.ext_min, self.grid_min))
        hi = min(self.grid_max * 10.0 ** (3 * rounds), max(self.ext_max, self.grid_max))
        return replace(self, grid_min=lo, grid_max=hi)

    def to_dict(self) -> dict:
        return asdict(self)


def log_grid(lo: float, hi: float, per_decade: int) -> np.ndarray:
    decades = np.log10(hi) - np.log10(lo)
    n = max(int(round(decades * per_decade)), 1) + 1
    return np.logspace(np.log10(lo), np.log10(hi), n)
