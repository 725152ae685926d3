"""Result containers shared by the density routines."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Method(enum.Enum):
    SERIES_IRRATIONAL = "series-irrational"
    SERIES_RATIONAL = "series-rational"
    ASYMPTOTIC = "asymptotic"
    INVERSION = "inversion"


@dataclass(frozen=True)
class DensityResult:
    """Density value of T_0 (units 1/time) with the method used and an
    absolute error estimate."""

    value: float
    method: Method
    err_estimate: float
    t: float = float("nan")

    def __post_init__(self):
        # normalise numpy scalars so results compare and print uniformly
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "err_estimate", float(self.err_estimate))
        object.__setattr__(self, "t", float(self.t))

    def __float__(self):
        return float(self.value)
