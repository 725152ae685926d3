"""Mellin transform s -> E[T_0^{s-1}] of the hitting time of zero.

For a start at +1 the transform is

    sin(pi/a)/sin(pi rh) * sin(pi rh w)/sin(pi w/a) * Gamma(1+a-a s)/Gamma(2-s),
    w = 1 - a + a s,

with rh = rho_hat; a start at -1 uses rho instead. The ratio of sines has a
removable singularity at w = 0 (s = 1 - 1/alpha) inside the strip.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
from scipy import special

from .errors import DomainError, PoleError, StripError
from .gammaspec import log_cos, log_gamma, log_rgamma, log_sin, sin_ratio
from .map_exponent import matrix_A
from .params import AlphaKind, Sign, StableParams

# |Im s| above which the decay envelope is asserted
ENVELOPE_THRESHOLD = 10.0
# evaluation refuses within this distance of a pole
POLE_GUARD = 1e-6
LOG_OVERFLOW = 700.0


@dataclass(frozen=True)
class MellinValue:
    value: complex
    s: complex
    strip: tuple

    def __complex__(self):
        return complex(self.value)


def strip_of(alpha: float) -> tuple:
    return (-1.0 / alpha, 2.0 - 1.0 / alpha)


def _check_strip(name, alpha, s):
    lo, hi = strip_of(alpha)
    sr = np.real(s)
    bad = (sr <= lo) | (sr >= hi)
    if np.any(bad):
        first = np.ravel(s)[np.argmax(np.ravel(bad))] if np.ndim(s) else s
        raise StripError(name, first, lo, hi)


def log_h(alpha: float, r: float, s):
    """log of the transform, meromorphic continuation, vectorised over s.

    ``r`` is the parameter in place of rho_hat (rho_hat for a positive start).
    """
    s = np.asarray(s, dtype=complex)
    w = 1.0 - alpha + alpha * s
    const = math.log(math.sin(math.pi / alpha)) - math.log(math.sin(math.pi * r))
    ratio = sin_ratio(math.pi * r, math.pi / alpha, w)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = const + np.log(ratio) + log_gamma_safe(1.0 + alpha - alpha * s) + log_rgamma(2.0 - s)
    return out


def log_gamma_safe(z):
    """log Gamma with +inf at poles instead of raising (used off the strip)."""
    z = np.asarray(z, dtype=complex)
    poles = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    zz = np.where(poles, 1.0, z)
    return np.where(poles, np.inf + 0j, special.loggamma(zz))


def h_values(alpha: float, r: float, s):
    """Meromorphic transform values (no strip check), vectorised."""
    lv = log_h(alpha, r, s)
    if np.any(np.real(lv) > LOG_OVERFLOW):
        raise OverflowError("transform value exceeds the representable range")
    return np.exp(lv)


def h_meromorphic(params: StableParams, sign, s):
    """Continuation of the transform to all s away from its poles."""
    return h_values(params.alpha, params.rho_for(sign), s)


def _pole_distance(params, s):
    """Distance from s to the nearest pole of the transform on or near the strip edges."""
    a = params.alpha
    s = np.asarray(s, dtype=complex)
    cands = [-1.0 / a, 2.0 - 1.0 / a, 1.0 + 1.0 / a]
    return np.min([np.abs(s - c) for c in cands], axis=0)


def mellin_T0(params: StableParams, sign, s) -> MellinValue:
    """E_{+-1}[T_0^{s-1}] for -1/alpha < Re s < 2 - 1/alpha."""
    _check_strip("mellin_T0", params.alpha, s)
    if np.any(_pole_distance(params, s) < POLE_GUARD):
        raise PoleError(f"mellin_T0: s={s!r} within {POLE_GUARD} of a pole")
    val = h_meromorphic(params, Sign.from_value(sign), s)
    if np.ndim(val) == 0:
        val = complex(val)
    return MellinValue(val, s, strip_of(params.alpha))


def mellin_values(params: StableParams, sign, s) -> np.ndarray:
    """Array version of mellin_T0 returning plain complex values."""
    _check_strip("mellin_values", params.alpha, s)
    return np.asarray(h_meromorphic(params, Sign.from_value(sign), s))


def mellin_symmetric(alpha: float, s) -> MellinValue:
    """Symmetric-case transform

    sin(pi/a) cos(pi a (s-1)/2) / sin(pi (s - 1 + 1/a)) * Gamma(1+a-a s)/Gamma(2-s).
    """
    _check_strip("mellin_symmetric", alpha, s)
    s_arr = np.asarray(s, dtype=complex)
    x = s_arr - 1.0 + 1.0 / alpha
    small = np.abs(x) < 1e-4
    xs = np.where(small, 1.0, x)
    with np.errstate(divide="ignore", invalid="ignore"):
        trig = np.exp(log_cos(0.5 * np.pi * alpha * (xs - 1.0 / alpha)) - log_sin(np.pi * xs))
    # cos(pi a (x - 1/a)/2) = sin(pi a x / 2): ratio -> a/2 at x = 0
    b = 0.5 * np.pi * alpha
    series = (b / np.pi) * (1.0 - (b * b - np.pi * np.pi) * x * x / 6.0)
    trig = np.where(small, series, trig)
    val = math.sin(math.pi / alpha) * trig * np.exp(log_gamma(1.0 + alpha - alpha * s_arr) + log_rgamma(2.0 - s_arr))
    if val.ndim == 0:
        val = complex(val)
    return MellinValue(val, s, strip_of(alpha))


def positive_stable_mellin(alpha: float, s):
    """E[S^{s-1}] for the positive (1/alpha)-stable law with E exp(-q S) = exp(-q^(1/alpha)).

    Coded from the moment formula E[S^p] = Gamma(1 - alpha p)/Gamma(1 - p).
    """
    p = np.asarray(s, dtype=complex) - 1.0
    out = np.exp(log_gamma(1.0 - alpha * p) - log_gamma(1.0 - p))
    return out if out.ndim else complex(out)


# -- functional equation ----------------------------------------------------


TransformFn = Callable[[Sign, float], complex]


def functional_equation_defect(params: StableParams, s: float, transform: Optional[TransformFn] = None) -> np.ndarray:
    """A(s) [h_1(s); h_2(s)] - [h_1(s+1); h_2(s+1)] for s in (0, 1 - 1/alpha)."""
    a = params.alpha
    if not 0.0 < s < 1.0 - 1.0 / a:
        raise DomainError(f"s={s!r} outside (0, 1 - 1/alpha)")
    if transform is None:
        def transform(sign, x):
            return complex(h_meromorphic(params, sign, x))
    h_s = np.array([transform(Sign.PLUS, s), transform(Sign.MINUS, s)])
    h_s1 = np.array([transform(Sign.PLUS, s + 1.0), transform(Sign.MINUS, s + 1.0)])
    return matrix_A(params, s).entries @ h_s - h_s1


def functional_equation_residual(params: StableParams, s: float, transform: Optional[TransformFn] = None) -> float:
    """Max-norm of the functional-equation defect at real s."""
    return float(np.max(np.abs(functional_equation_defect(params, s, transform))))


# -- poles and decay --------------------------------------------------------


@dataclass(frozen=True)
class Pole:
    family: int
    index: int
    location: float
    exact: Optional[Fraction] = None


@dataclass(frozen=True)
class PoleCatalog:
    family1: tuple
    family2: tuple
    family3: tuple
    double_poles: tuple

    def all_locations(self):
        return sorted({p.location for p in self.family1 + self.family2 + self.family3})


def pole_catalog(params: StableParams, n_max: int) -> PoleCatalog:
    """Poles 1 + n/alpha (n >= 1), n - 1/alpha (n >= 2), -n - 1/alpha (n >= 0).

    For a declared rational alpha = m/n the first two families meet at
    n l + 1 - 1/alpha (l >= 1); those points are listed as double poles.
    """
    if n_max < 2:
        raise DomainError("n_max must be >= 2")
    a = params.alpha
    frac = params.alpha_fraction
    inv = (1 / frac) if frac is not None else None

    def pole(fam, k, exact_val, float_val):
        return Pole(fam, k, float(exact_val) if exact_val is not None else float_val, exact_val)

    f1 = tuple(pole(1, k, (1 + k * inv) if inv else None, 1.0 + k / a) for k in range(1, n_max + 1))
    f2 = tuple(pole(2, k, (k - inv) if inv else None, k - 1.0 / a) for k in range(2, n_max + 1))
    f3 = tuple(pole(3, k, (-k - inv) if inv else None, -k - 1.0 / a) for k in range(0, n_max + 1))
    doubles = ()
    if params.alpha_class().kind is AlphaKind.RATIONAL:
        s2 = {p.exact: p for p in f2}
        doubles = tuple(sorted((p.exact for p in f1 if p.exact in s2)))
    return PoleCatalog(f1, f2, f3, doubles)


@dataclass(frozen=True)
class DecayEnvelope:
    lower: float
    upper: float
    conclusive: bool

    def contains(self, value: float) -> bool:
        if not self.conclusive:
            raise DomainError("envelope is only asserted for |Im s| above the threshold")
        return self.lower < value < self.upper


def decay_envelope(params: StableParams, s: complex) -> DecayEnvelope:
    """(exp(-pi|Im s|), exp(-(pi/2)(alpha-1)|Im s|)) bracketing |h_i(s)|."""
    y = abs(complex(s).imag)
    lower = math.exp(-math.pi * y)
    upper = math.exp(-0.5 * math.pi * (params.alpha - 1.0) * y)
    return DecayEnvelope(lower, upper, y > ENVELOPE_THRESHOLD)


def decay_rate(params: StableParams, sign) -> float:
    """Exact exponential decay rate (pi/2)(1 + alpha - 2 alpha r) of |h(x + iy)| in |y|."""
    r = params.rho_for(sign)
    return 0.5 * math.pi * (1.0 + params.alpha - 2.0 * params.alpha * r)
