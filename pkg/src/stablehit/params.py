"""Stable parameter pair (alpha, rho), its derived constants and the
arithmetic classification of alpha that drives density-method dispatch."""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import ParameterError

# A float alpha closer than this to a convergent m/n with n <= MAX_DENOMINATOR
# is treated as near-rational (series method numerically unsafe).
RESONANCE_DISTANCE = 1e-6
MAX_DENOMINATOR = 64

AlphaLike = Union[float, int, Fraction, str]


class Sign(enum.IntEnum):
    """Sign of the starting point: PLUS is state 1 (X_0 > 0), MINUS is state 2."""

    PLUS = 1
    MINUS = 2

    @classmethod
    def from_value(cls, value) -> "Sign":
        if isinstance(value, Sign):
            return value
        if isinstance(value, str):
            value = value.strip()
            if value in ("+", "+1", "1", "plus", "PLUS"):
                return cls.PLUS
            if value in ("-", "-1", "2", "minus", "MINUS"):
                return cls.MINUS
            raise ParameterError(f"unrecognised sign {value!r}")
        v = float(value)
        if v > 0 and v != 2:
            return cls.PLUS
        if v < 0 or v == 2:
            return cls.MINUS
        raise ParameterError("sign must be +1 or -1")

    @property
    def unit(self) -> int:
        return 1 if self is Sign.PLUS else -1

    @property
    def other(self) -> "Sign":
        return Sign.MINUS if self is Sign.PLUS else Sign.PLUS


class AlphaKind(enum.Enum):
    RATIONAL = "rational"
    IRRATIONAL = "irrational"
    NEAR_RATIONAL = "near_rational"


@dataclass(frozen=True)
class AlphaClass:
    kind: AlphaKind
    m: Optional[int] = None
    n: Optional[int] = None
    distance: Optional[float] = None

    def __post_init__(self):
        if self.kind is not AlphaKind.IRRATIONAL:
            if self.m is None or self.n is None or self.m <= 0 or self.n <= 0:
                raise ParameterError("rational classes need positive m, n")
            if math.gcd(self.m, self.n) != 1:
                raise ParameterError(f"{self.m}/{self.n} is not in lowest terms")
            if not 1 < Fraction(self.m, self.n) < 2:
                raise ParameterError(f"{self.m}/{self.n} is not in (1, 2)")

    @property
    def fraction(self) -> Optional[Fraction]:
        if self.m is None:
            return None
        return Fraction(self.m, self.n)


def parse_alpha(value: AlphaLike) -> tuple[float, Optional[Fraction]]:
    """Return (float value, declared fraction or None).

    Strings of the form ``"m/n"`` and Fraction instances declare an exact
    rational; plain numbers and decimal strings never do.
    """
    if isinstance(value, Fraction):
        return float(value), value
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            try:
                frac = Fraction(text)
            except (ValueError, ZeroDivisionError) as exc:
                raise ParameterError(f"cannot parse alpha {value!r}") from exc
            return float(frac), frac
        try:
            return float(text), None
        except ValueError as exc:
            raise ParameterError(f"cannot parse alpha {value!r}") from exc
    return float(value), None


@dataclass(frozen=True)
class StableParams:
    """Admissible stable parameters.

    ``alpha_fraction`` is set only when the caller declared alpha as an exact
    fraction; it selects the rational density series.
    """

    alpha: float
    rho: float
    alpha_fraction: Optional[Fraction] = None
    # set by swapped() so that rho_hat of the dual is bitwise the original rho
    rho_hat_override: Optional[float] = field(default=None, repr=False)

    @property
    def rho_hat(self) -> float:
        if self.rho_hat_override is not None:
            return self.rho_hat_override
        return 1.0 - self.rho

    @property
    def c_plus(self) -> float:
        return math.gamma(self.alpha + 1) * math.sin(math.pi * self.alpha * self.rho) / math.pi

    @property
    def c_minus(self) -> float:
        return math.gamma(self.alpha + 1) * math.sin(math.pi * self.alpha * self.rho_hat) / math.pi

    @property
    def beta(self) -> float:
        cp, cm = self.c_plus, self.c_minus
        return (cp - cm) / (cp + cm)

    @property
    def scale_c(self) -> float:
        """The constant c of the characteristic exponent, cos(pi alpha (rho - 1/2))."""
        return math.cos(math.pi * self.alpha * (self.rho - 0.5))

    @property
    def is_symmetric(self) -> bool:
        return self.rho == self.rho_hat

    def rho_for(self, sign) -> float:
        """The positivity-type parameter entering formulas for a start of this sign.

        Formulas for a positive start use rho_hat; a negative start swaps in rho.
        """
        return self.rho_hat if Sign.from_value(sign) is Sign.PLUS else self.rho

    def swapped(self) -> "StableParams":
        """Parameters of the dual process -X (rho and rho_hat exchanged)."""
        return StableParams(self.alpha, self.rho_hat, self.alpha_fraction, self.rho)

    def alpha_class(self) -> AlphaClass:
        return classify_alpha(self.alpha, self.alpha_fraction)

    @property
    def alpha_label(self) -> str:
        if self.alpha_fraction is not None:
            return f"{self.alpha_fraction.numerator}/{self.alpha_fraction.denominator}"
        return repr(self.alpha)


def make_params(alpha: AlphaLike, rho: float) -> StableParams:
    """Validate (alpha, rho) against the two-sided admissible set."""
    a, frac = parse_alpha(alpha)
    rho = float(rho)
    if not (math.isfinite(a) and math.isfinite(rho)):
        raise ParameterError("alpha and rho must be finite")
    if not a > 1.0:
        raise ParameterError(f"alpha={a!r} violates alpha > 1")
    if not a < 2.0:
        raise ParameterError(f"alpha={a!r} violates alpha < 2")
    lo, hi = 1.0 - 1.0 / a, 1.0 / a
    if not rho > lo:
        raise ParameterError(f"rho={rho!r} violates rho > 1 - 1/alpha = {lo!r}")
    if not rho < hi:
        raise ParameterError(f"rho={rho!r} violates rho < 1/alpha = {hi!r}")
    if frac is not None:
        frac = Fraction(frac.numerator, frac.denominator)  # normalised
    return StableParams(a, rho, frac)


def convergents(x: float, max_denominator: int = MAX_DENOMINATOR):
    """Continued-fraction convergents of the exact binary value of x."""
    exact = Fraction(x)
    p0, q0, p1, q1 = 0, 1, 1, 0
    rest = exact
    out = []
    while True:
        a = math.floor(rest)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        if q1 > max_denominator:
            break
        out.append(Fraction(p1, q1))
        frac = rest - a
        if frac == 0:
            break
        rest = 1 / frac
    return out


def classify_alpha(alpha: float, declared: Optional[Fraction] = None) -> AlphaClass:
    """Rational only when declared; otherwise irrational unless a
    small-denominator convergent lies within RESONANCE_DISTANCE."""
    if declared is not None:
        declared = Fraction(declared)
        return AlphaClass(AlphaKind.RATIONAL, declared.numerator, declared.denominator)
    best = None
    for conv in convergents(float(alpha)):
        if not 1 < conv < 2:
            continue
        dist = abs(float(Fraction(alpha) - conv))
        if dist < RESONANCE_DISTANCE:
            best = (conv, dist)
            break
    if best is None:
        return AlphaClass(AlphaKind.IRRATIONAL)
    conv, dist = best
    if dist == 0.0:
        warnings.warn(
            f"alpha={alpha!r} equals {conv} exactly but was not declared as a fraction; "
            "treating it as near-rational",
            stacklevel=2,
        )
    return AlphaClass(AlphaKind.NEAR_RATIONAL, conv.numerator, conv.denominator, dist)
