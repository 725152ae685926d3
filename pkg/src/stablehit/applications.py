"""Excursion-theoretic consequences of the hitting-time law.

Everything here is deterministic: expectations over the law of T_0 are
quadratures against the analytic density, on a logarithmic grid with
closed-form power-law corrections for the two ends.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .density_series import asymptotic_coefficients, density_many
from .errors import DomainError
from .mellin_inversion import leading_tail_coefficient, survival
from .params import Sign, StableParams

_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)

# log-grid range for quadratures over the hitting time
LOG_T_MIN = -18.0
LOG_T_MAX = 18.0


def _log_nodes(lo, hi, width=0.5):
    npan = max(1, int(math.ceil((hi - lo) / width)))
    edges = np.linspace(lo, hi, npan + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    y = (mid[:, None] + half[:, None] * _GL_X).ravel()
    w = (half[:, None] * _GL_W).ravel()
    return y, w


def h_function(params: StableParams, x: float) -> float:
    """Invariant function -Gamma(1-alpha) sin(pi alpha r)/pi |x|^(alpha-1),
    r = rho_hat for x > 0 and rho for x < 0."""
    if x == 0:
        raise DomainError("h is not defined at 0")
    a = params.alpha
    r = params.rho_hat if x > 0 else params.rho
    return -math.gamma(1.0 - a) * math.sin(math.pi * a * r) / math.pi * abs(x) ** (a - 1.0)


@dataclass(frozen=True)
class ExcursionCoefficient:
    W: float
    alpha: float

    def density(self, t):
        return self.W * np.asarray(t, dtype=float) ** (1.0 / self.alpha - 2.0)

    def tail(self, t):
        a = self.alpha
        return self.W * np.asarray(t, dtype=float) ** (1.0 / a - 1.0) / (1.0 - 1.0 / a)


def excursion_coefficient(params: StableParams) -> ExcursionCoefficient:
    a = params.alpha
    W = (a - 1.0) / math.gamma(1.0 / a) * math.sin(math.pi / a) / math.cos(math.pi * (params.rho - 0.5))
    return ExcursionCoefficient(W, a)


def excursion_length_density(params: StableParams, t: float) -> float:
    """Density of the excursion length under the excursion measure."""
    if not t > 0:
        raise DomainError("t must be positive")
    return float(excursion_coefficient(params).density(t))


def excursion_length_tail(params: StableParams, t: float) -> float:
    """n(zeta > t)."""
    if not t > 0:
        raise DomainError("t must be positive")
    return float(excursion_coefficient(params).tail(t))


def survival_from(params: StableParams, x: float, t: float, tol: float = 1e-10) -> float:
    """P_x(T_0 > t) through the scaling P_x(T_0 > t) = P_{sgn x}(T_0 > |x|^-alpha t)."""
    if x == 0:
        raise DomainError("x must be nonzero")
    return survival(params, Sign.PLUS if x > 0 else Sign.MINUS, abs(x) ** (-params.alpha) * t, tol)


def ratio_Y(params: StableParams, x: float, s: float, tol: float = 1e-10) -> float:
    """P_x(T_0 > s) / (h(x) n(zeta > s)); tends to 1 as s grows."""
    if not s > 0:
        raise DomainError("s must be positive")
    if x == 0:
        raise DomainError("x must be nonzero")
    unit = 1.0 if x > 0 else -1.0
    u = abs(x) ** (-params.alpha) * s
    return survival_from(params, unit, u, tol) / (h_function(params, unit) * excursion_length_tail(params, u))


def ratio_Y_limit_check(params: StableParams, sign) -> float:
    """P / (h(+-1) W): the exact limit of Y(s, +-1); equals 1."""
    sign = Sign.from_value(sign)
    return leading_tail_coefficient(params, sign) / (
        h_function(params, float(sign.unit)) * excursion_coefficient(params).W
    )


def entrance_law_density(params: StableParams, t: float, x: float, tol: float = 1e-10) -> float:
    """Density in x of the excursion entrance law at time t.

    Equal to |x|^-alpha p(sgn(-x), |x|^-alpha t): a positive x is reached
    through the dual start at -1.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    if x == 0:
        raise DomainError("x must be nonzero")
    sign = Sign.MINUS if x > 0 else Sign.PLUS
    u = abs(x) ** (-params.alpha) * t
    return abs(x) ** (-params.alpha) * float(density_many(params, sign, [u], tol)[0])


def _head_weighted(params, sign, u0, power, terms=8):
    """int_0^{u0} u^power p(u) du from the small-time expansion."""
    a = params.alpha
    r = params.rho_for(sign)
    coef = asymptotic_coefficients(a, a * r, r, terms)
    n = np.arange(1, terms + 1)
    e = n + 1.0 / a + power
    parts = coef * u0 ** e / e
    mags = np.abs(parts)
    stop = 1
    while stop < terms and mags[stop] <= mags[stop - 1]:
        stop += 1
    return float(np.sum(parts[:stop]))


def _tail_weighted(params, sign, u1, power):
    """int_{u1}^inf u^power p(u) du from the leading power law."""
    a = params.alpha
    e = 1.0 / a - 1.0 + power
    if e >= 0:
        raise DomainError("weighted tail diverges")
    return -leading_tail_coefficient(params, sign) * u1 ** e / e


def weighted_expectation(params: StableParams, sign, g: Callable, power: float, tol: float = 1e-10) -> float:
    """E_{+-1}[T_0^power g(T_0)] for bounded g; power must lie in (-1/alpha, 1 - 1/alpha)."""
    sign = Sign.from_value(sign)
    y, w = _log_nodes(LOG_T_MIN, LOG_T_MAX)
    u = np.exp(y)
    p = density_many(params, sign, u, tol)
    body = float(np.sum(w * u ** (power + 1.0) * p * g(u)))
    lo, hi = math.exp(LOG_T_MIN), math.exp(LOG_T_MAX)
    g_lo = float(g(np.array([lo]))[0])
    g_hi = float(g(np.array([hi]))[0])
    return body + g_lo * _head_weighted(params, sign, lo, power) + g_hi * _tail_weighted(params, sign, hi, power)


def entrance_integral(params: StableParams, t: float, f: Callable, tol: float = 1e-10) -> float:
    """int f(x) n(X_t in dx) by direct quadrature in x (log grid on each half-line)."""
    if not t > 0:
        raise DomainError("t must be positive")
    a = params.alpha
    ly = math.log(t) / a
    y, w = _log_nodes(ly + LOG_T_MIN / a, ly + LOG_T_MAX / a, width=0.5 / a)
    x = np.exp(y)
    u = x ** (-a) * t
    total = 0.0
    for sign, side in ((Sign.MINUS, 1.0), (Sign.PLUS, -1.0)):
        p = density_many(params, sign, u, tol)
        total += float(np.sum(w * x * x ** (-a) * p * f(side * x)))
    return total


def entrance_integral_substituted(params: StableParams, t: float, f: Callable, tol: float = 1e-10) -> float:
    """Same integral after substituting u = |x|^-alpha t:
    (t^(1/alpha - 1)/alpha) sum_sides E[T_0^(-1/alpha) f(+-(t/T_0)^(1/alpha))]."""
    a = params.alpha
    pref = t ** (1.0 / a - 1.0) / a
    right = weighted_expectation(params, Sign.MINUS, lambda u: f((t / u) ** (1.0 / a)), -1.0 / a, tol)
    left = weighted_expectation(params, Sign.PLUS, lambda u: f(-(t / u) ** (1.0 / a)), -1.0 / a, tol)
    return pref * (right + left)


def entrance_law_mass(params: StableParams, t: float, tol: float = 1e-10) -> float:
    """Total mass of the entrance law at t; equals n(zeta > t)."""
    return entrance_integral(params, t, lambda x: np.ones_like(x), tol)


def conditioned_entrance(params: StableParams, t: float, f: Callable, tol: float = 1e-10) -> float:
    """int h f dn_t written through the hitting time:

    Gamma(-alpha) sin(pi alpha rho)/pi E_1[T^-1 f(-(t/T)^(1/alpha))]
      + Gamma(-alpha) sin(pi alpha rho_hat)/pi E_2[T^-1 f((t/T)^(1/alpha))].
    """
    if not t > 0:
        raise DomainError("t must be positive")
    a = params.alpha
    g = math.gamma(-a) / math.pi
    e1 = weighted_expectation(params, Sign.PLUS, lambda u: f(-(t / u) ** (1.0 / a)), -1.0, tol)
    e2 = weighted_expectation(params, Sign.MINUS, lambda u: f((t / u) ** (1.0 / a)), -1.0, tol)
    return g * math.sin(math.pi * a * params.rho) * e1 + g * math.sin(math.pi * a * params.rho_hat) * e2


def h_weighted_entrance(params: StableParams, t: float, f: Callable, tol: float = 1e-10) -> float:
    """int h(x) f(x) n(X_t in dx) by direct quadrature in x."""
    a = params.alpha
    hp, hm = h_function(params, 1.0), h_function(params, -1.0)

    def g(x):
        return np.where(x > 0, hp, hm) * np.abs(x) ** (a - 1.0) * f(x)

    return entrance_integral(params, t, g, tol)
