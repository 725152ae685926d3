"""Convergent and asymptotic series for the density of T_0.

For irrational alpha the density is a sum over the residues of h(s) t^{-s}
at the simple poles 1 + k/alpha and k + 1 - 1/alpha, truncated at an index
N for which the vertical line Re s = N + 1/2 - 1/alpha stays away from the
first family (membership in the set K(alpha) below). The remainder is the
inversion integral along that line and is bounded by
t^{-c(N)}/(2 pi) int |h(c(N) + iu)| du.

For a declared rational alpha = m/n the two families collide at
n l + 1 - 1/alpha and those double poles contribute the logarithmic terms.

All terms are evaluated in log space with an explicit sign so that gamma
ratios beyond k ~ 170 neither overflow nor underflow early.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import ClassificationError, DomainError, NotInKError, ResonanceError
from .gammaspec import sinpi
from .mellin_inversion import invert_density, invert_density_many
from .mellin_law import log_h
from .params import AlphaKind, Sign, StableParams
from .results import DensityResult, Method

SMALL_T_CROSSOVER = 0.05
RESONANCE_FLOOR = 1e-12
N_MAX = 120
_EPS = np.finfo(float).eps


def norm_dist(x: float) -> float:
    """Distance from x to the nearest integer."""
    return abs(x - math.floor(x + 0.5))


def in_K(alpha: float, N: int) -> bool:
    """Membership test ||(N - 1/2) alpha|| > exp(-((alpha-1)/2)(N-2) ln(N-2))."""
    if N < 3:
        raise DomainError("N must be >= 3")
    threshold = math.exp(-0.5 * (alpha - 1.0) * (N - 2) * math.log(N - 2)) if N > 3 else 1.0
    return norm_dist((N - 0.5) * alpha) > threshold


def K_members(alpha: float, n_max: int) -> list:
    return [N for N in range(3, n_max + 1) if in_K(alpha, N)]


def K_density(alpha: float, n_max: int = 10_000) -> float:
    """Fraction of {1, ..., n_max} that belongs to K(alpha)."""
    N = np.arange(3, n_max + 1, dtype=float)
    x = (N - 0.5) * alpha
    dist = np.abs(x - np.floor(x + 0.5))
    m = N - 2.0
    with np.errstate(divide="ignore", invalid="ignore"):
        thr = np.where(m > 1, np.exp(-0.5 * (alpha - 1.0) * m * np.log(np.where(m > 1, m, 2.0))), 1.0)
    return float(np.count_nonzero(dist > thr)) / n_max


# -- remainder bound ---------------------------------------------------------


@lru_cache(maxsize=256)
def _line_abs_integral(alpha: float, r: float, c: float):
    """log of int_R |h(c + iu)| du (meromorphic h), via adaptive quadrature."""
    grid = np.linspace(0.0, 200.0, 2001)
    logs = np.real(log_h(alpha, r, c + 1j * grid))
    L0 = float(np.max(logs[np.isfinite(logs)]))

    def f(u):
        return math.exp(float(np.real(log_h(alpha, r, c + 1j * u))) - L0)

    rate = 0.5 * math.pi * (alpha - 1.0)
    upper = 40.0 / rate + 40.0
    val = 0.0
    edges = [0.0, 0.05, 0.5, 2.0, 10.0, upper]
    for a, b in zip(edges[:-1], edges[1:]):
        val += integrate.quad(f, a, b, limit=400, epsabs=0.0, epsrel=1e-6)[0]
    return L0 + math.log(2.0 * val)


@dataclass(frozen=True)
class TruncationPlan:
    """Truncation index N, its K(alpha) certificate and the remainder bound at t."""

    N: int
    in_K: bool
    tail_bound: float
    t: float = float("nan")


def make_plan(params: StableParams, sign, t: float, N: int) -> TruncationPlan:
    if N < 3:
        raise DomainError("N must be >= 3")
    c = N + 0.5 - 1.0 / params.alpha
    log_int = _line_abs_integral(params.alpha, params.rho_for(sign), c)
    bound = math.exp(log_int - c * math.log(t) - math.log(2.0 * math.pi))
    return TruncationPlan(N, in_K(params.alpha, N), bound, t)


# -- term evaluation ---------------------------------------------------------


def _sinpi_exact(frac: Fraction) -> float:
    """sin(pi q) for rational q, with the argument reduced exactly mod 2."""
    red = frac - 2 * (frac.numerator // (2 * frac.denominator))
    return sinpi(float(red))


def _check_resonance(vals, what):
    bad = np.abs(vals) < RESONANCE_FLOOR
    if np.any(bad):
        raise ResonanceError(
            f"|{what}| < {RESONANCE_FLOOR:g} at index {int(np.argmax(bad)) + 1}; "
            "alpha looks rational, declare it as a fraction"
        )


def first_family_terms(alpha, r, t, ks, sin_k_over=None, sin_k1_over=None):
    """Series terms attached to the poles 1 + k/alpha (negated residues of h t^{-s})."""
    ks = np.asarray(ks, dtype=float)
    s_num = sinpi(r * (ks + 1.0))
    s_a = sinpi(ks / alpha) if sin_k_over is None else sin_k_over
    s_b = sinpi((ks + 1.0) / alpha) if sin_k1_over is None else sin_k1_over
    _check_resonance(s_b, "sin(pi (k+1)/alpha)")
    pref = math.sin(math.pi / alpha) / (math.pi * math.sin(math.pi * r))
    logmag = special.gammaln(ks / alpha + 1.0) - special.gammaln(ks + 1.0) - (1.0 + ks / alpha) * math.log(t)
    sgn = np.where(ks % 2 == 1, 1.0, -1.0)
    return pref * s_num * s_a / s_b * sgn * np.exp(logmag)


def second_family_terms(alpha, r, t, ks, sin_ak=None):
    """Series terms attached to the poles k + 1 - 1/alpha."""
    ks = np.asarray(ks, dtype=float)
    s_num = sinpi(alpha * r * ks)
    s_den = sinpi(alpha * ks) if sin_ak is None else sin_ak
    _check_resonance(s_den, "sin(pi alpha k)")
    pref = math.sin(math.pi / alpha) ** 2 / (math.pi * math.sin(math.pi * r))
    logmag = (
        special.gammaln(ks - 1.0 / alpha) - special.gammaln(alpha * ks - 1.0)
        + (-ks - 1.0 + 1.0 / alpha) * math.log(t)
    )
    return -pref * s_num / s_den * np.exp(logmag)


def R_term(alpha: float, r: float, m: int, n: int, k: int, t: float) -> float:
    """Logarithmic factor of the k-th double-pole term."""
    x = r * k * m
    c = math.cos(math.pi * x)
    s = sinpi(x)
    base = math.pi * alpha * r * c
    if s == 0.0:
        return base
    bracket = (
        math.pi / math.tan(math.pi / alpha)
        - special.digamma(k * n - 1.0 / alpha)
        + alpha * special.digamma(k * m - 1.0)
        + math.log(t)
    )
    return base - s * bracket


def third_family_terms(alpha, r, m, n, t, ks):
    """Double-pole terms at n k + 1 - 1/alpha."""
    ks = np.asarray(ks, dtype=int)
    pref = math.sin(math.pi / alpha) ** 2 / (math.pi ** 2 * alpha * math.sin(math.pi * r))
    out = np.empty(ks.shape)
    for i, k in enumerate(ks):
        logmag = (
            math.lgamma(k * n - 1.0 / alpha) - math.lgamma(k * m - 1.0)
            + (-k * n - 1.0 + 1.0 / alpha) * math.log(t)
        )
        sgn = -1.0 if (k * m) % 2 else 1.0
        out[i] = -pref * sgn * R_term(alpha, r, m, n, int(k), t) * math.exp(logmag)
    return out


def _first_count(alpha: float, N: int) -> int:
    """Number of k >= 1 with k < alpha (N - 1/2) - 1."""
    bound = alpha * (N - 0.5) - 1.0
    return max(0, int(math.ceil(bound)) - 1)


def irrational_terms(params: StableParams, sign, t: float, N: int):
    """(first-family terms, second-family terms) of the index-N partial sum."""
    a = params.alpha
    r = params.rho_for(sign)
    k1 = np.arange(1, _first_count(a, N) + 1)
    k2 = np.arange(1, N)
    return first_family_terms(a, r, t, k1), second_family_terms(a, r, t, k2)


def _rounding(*arrays) -> float:
    total = sum(float(np.sum(np.abs(x))) for x in arrays)
    count = sum(len(x) for x in arrays)
    return 4.0 * _EPS * total * max(1.0, math.sqrt(count))


def density_irrational(params: StableParams, sign, t: float, plan: TruncationPlan,
                       liouville_unsafe: bool = False) -> DensityResult:
    """Partial sum at index plan.N of the irrational-alpha series.

    With ``liouville_unsafe`` the index need not lie in K(alpha); this is
    the unfiltered series, which converges only when alpha is not a
    Liouville-type number. A float alpha cannot be certified either way,
    so that mode carries no guarantee.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    sign = Sign.from_value(sign)
    kind = params.alpha_class().kind
    if kind is not AlphaKind.IRRATIONAL:
        raise ClassificationError(f"alpha={params.alpha_label} is classified {kind.value}, not irrational")
    if not plan.in_K and not liouville_unsafe:
        raise NotInKError(f"N={plan.N} is not in K(alpha) for alpha={params.alpha!r}")
    if plan.t == plan.t and plan.t != t:
        plan = make_plan(params, sign, t, plan.N)
    f1, f2 = irrational_terms(params, sign, t, plan.N)
    value = float(np.sum(f1) + np.sum(f2))
    return DensityResult(value, Method.SERIES_IRRATIONAL, plan.tail_bound + _rounding(f1, f2), float(t))


def _geometric_tail(terms) -> float:
    mags = np.abs(np.asarray(terms))
    nz = mags[mags > 0]
    if nz.size < 2:
        return float(nz[-1]) if nz.size else 0.0
    q = nz[-1] / nz[-2]
    if q >= 1.0:
        return math.inf
    return float(nz[-1] * q / (1.0 - q))


def rational_terms(params: StableParams, sign, t: float, k_max: int):
    """The three term arrays of the rational-alpha series up to index k_max."""
    frac = params.alpha_class().fraction
    m, n = frac.numerator, frac.denominator
    a = params.alpha
    r = params.rho_for(sign)
    ks = np.arange(1, k_max + 1)
    k1 = ks[(ks + 1) % m != 0]
    k2 = ks[ks % n != 0]
    inv = 1 / frac
    s_k = np.array([_sinpi_exact(int(k) * inv) for k in k1])
    s_k1 = np.array([_sinpi_exact((int(k) + 1) * inv) for k in k1])
    s_ak = np.array([_sinpi_exact(int(k) * frac) for k in k2])
    f1 = first_family_terms(a, r, t, k1, s_k, s_k1)
    f2 = second_family_terms(a, r, t, k2, s_ak)
    f3 = third_family_terms(a, r, m, n, t, ks)
    return f1, f2, f3


def density_rational(params: StableParams, sign, t: float, k_max: int = 60) -> DensityResult:
    """Three-family series for a declared rational alpha = m/n."""
    if not t > 0:
        raise DomainError("t must be positive")
    if k_max < 2:
        raise DomainError("k_max must be >= 2")
    if params.alpha_class().kind is not AlphaKind.RATIONAL:
        raise ClassificationError(f"alpha={params.alpha_label} was not declared as a fraction")
    f1, f2, f3 = rational_terms(params, Sign.from_value(sign), t, k_max)
    value = float(np.sum(f1) + np.sum(f2) + np.sum(f3))
    err = _geometric_tail(f1) + _geometric_tail(f2) + _geometric_tail(f3) + _rounding(f1, f2, f3)
    return DensityResult(value, Method.SERIES_RATIONAL, err, float(t))


# -- small t -----------------------------------------------------------------


def asymptotic_coefficients(alpha: float, alpha_r: float, r: float, terms: int) -> np.ndarray:
    """Coefficients of t^{n - 1 + 1/alpha}, n = 1..terms, in the small-t expansion.

    ``alpha_r`` is the product alpha * r passed separately so that the
    boundary value alpha * r = 1 can be given exactly.
    """
    n = np.arange(1, terms + 1, dtype=float)
    pref = alpha * math.sin(math.pi / alpha) / (math.pi * math.sin(math.pi * r))
    logg = special.gammaln(alpha * n + 1.0) - special.gammaln(n + 1.0 / alpha)
    sgn = np.where(n % 2 == 1, 1.0, -1.0)
    return pref * sinpi(alpha_r * n) * np.exp(logg) * sgn


def _asymptotic(alpha, alpha_r, r, t, c):
    nterms = int(math.ceil(1.0 + c)) - 1
    if nterms < 1:
        nterms = 1
    coef = asymptotic_coefficients(alpha, alpha_r, r, nterms + 1)
    n = np.arange(1, nterms + 2, dtype=float)
    parts = coef * t ** (n - 1.0 + 1.0 / alpha)
    value = float(np.sum(parts[:nterms]))
    nxt = abs(parts[nterms])
    # the next term vanishes identically when sin(pi alpha r (N+1)) = 0
    err = nxt if nxt > 0 else t ** (c + 1.0 / alpha)
    return value, err


def density_asymptotic_small_t(params: StableParams, sign, t: float, c: float = 2.0) -> DensityResult:
    """Truncated small-time expansion sum_{1 <= n < 1 + c}."""
    if not t > 0:
        raise DomainError("t must be positive")
    if not c > 0:
        raise DomainError("c must be positive")
    a = params.alpha
    r = params.rho_for(sign)
    value, err = _asymptotic(a, a * r, r, t, c)
    return DensityResult(value, Method.ASYMPTOTIC, err, float(t))


def density_asymptotic_boundary(alpha: float, t: float, c: float = 2.0) -> DensityResult:
    """Expansion at the spectrally positive boundary alpha * r = 1 (all terms vanish)."""
    value, _ = _asymptotic(alpha, 1.0, 1.0 / alpha, t, c)
    return DensityResult(value, Method.ASYMPTOTIC, 0.0, float(t))


def _best_asymptotic(params, sign, t):
    """Optimally truncated expansion: stop before the terms start to grow."""
    a = params.alpha
    r = params.rho_for(sign)
    coef = asymptotic_coefficients(a, a * r, r, 40)
    n = np.arange(1, 41, dtype=float)
    parts = coef * t ** (n - 1.0 + 1.0 / a)
    mags = np.abs(parts)
    stop = 1
    while stop < 39 and mags[stop] <= mags[stop - 1] * 1.0001 + 0.0:
        stop += 1
    return float(np.sum(parts[:stop])), float(mags[stop])


# -- dispatcher --------------------------------------------------------------


def density(params: StableParams, sign, t: float, tol: float = 1e-10,
            liouville_unsafe: bool = False) -> DensityResult:
    """Density of T_0 under P_{+-1} at t, choosing a method by alpha's class.

    The truncation index for irrational alpha is the smallest member of
    K(alpha) whose remainder bound meets tol relative to the value; this is
    a heuristic rather than an optimal choice. Any failure to certify tol
    falls back to contour inversion.
    """
    if not t > 0:
        raise DomainError("t must be positive")
    if not tol > 0:
        raise DomainError("tol must be positive")
    sign = Sign.from_value(sign)
    cls = params.alpha_class()

    if t < SMALL_T_CROSSOVER:
        value, err = _best_asymptotic(params, sign, t)
        inv = invert_density(params, sign, t, tol=tol)
        if err <= tol * abs(value) and abs(value - inv.value) <= 10.0 * max(tol * abs(inv.value), inv.err_estimate):
            return DensityResult(value, Method.ASYMPTOTIC, err, float(t))
        return inv

    if cls.kind is AlphaKind.RATIONAL:
        k_max = 20
        while k_max <= 320:
            res = density_rational(params, sign, t, k_max)
            if res.err_estimate <= tol * abs(res.value):
                return res
            k_max *= 2
        return invert_density(params, sign, t, tol=tol)

    if cls.kind is AlphaKind.NEAR_RATIONAL:
        warnings.warn(
            f"alpha={params.alpha!r} is within {cls.distance:.1e} of {cls.m}/{cls.n}; "
            "series denominators are ill-conditioned, using contour inversion",
            stacklevel=2,
        )
        return invert_density(params, sign, t, tol=tol)

    for N in range(4, N_MAX + 1):
        if not (liouville_unsafe or in_K(params.alpha, N)):
            continue
        plan = make_plan(params, sign, t, N)
        try:
            res = density_irrational(params, sign, t, plan, liouville_unsafe=liouville_unsafe)
        except ResonanceError:
            # alpha is close to a fraction with a large denominator
            break
        if res.err_estimate <= tol * abs(res.value):
            return res
    return invert_density(params, sign, t, tol=tol)


def density_many(params: StableParams, sign, ts, tol: float = 1e-10) -> np.ndarray:
    """Densities on an arbitrary positive grid, for quadrature.

    Points below SMALL_T_CROSSOVER whose optimally truncated small-time
    expansion meets tol use it; everything else is inverted on one contour.
    """
    sign = Sign.from_value(sign)
    ts = np.asarray(ts, dtype=float)
    out = np.empty(ts.shape)
    flat_t = ts.ravel()
    flat = out.ravel()
    need = np.ones(flat_t.size, dtype=bool)
    for i, t in enumerate(flat_t):
        if t < SMALL_T_CROSSOVER:
            value, err = _best_asymptotic(params, sign, float(t))
            if err <= tol * abs(value):
                flat[i] = value
                need[i] = False
    if np.any(need):
        vals, _, _ = invert_density_many(params, sign, flat_t[need], tol=tol)
        flat[need] = vals
    return flat.reshape(ts.shape)
