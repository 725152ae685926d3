"""Numerical Mellin inversion along vertical lines.

The density is p(t) = (1/2 pi) int h(c + iu) t^{-c-iu} du over the real line;
the survival function combines a log-scale quadrature of p with an exact
tail P(T_0 > T) obtained from the transform h(s+1)/s of the survival
function. Gauss-Legendre panels are graded towards u = 0 when the line
passes close to a pole, and their width is tied to the oscillation scale
2 pi / |ln t| of the factor t^{-iu}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .errors import DomainError, StripError, ToleranceUnreachable
from .mellin_law import h_values, strip_of
from .params import Sign, StableParams
from .results import DensityResult, Method

GL_ORDER = 16
MAX_HALF_WIDTH = 4000.0
# common upper integration limit for the survival function
SURVIVAL_SPLIT = 50.0
# below this the density is integrated from the small-time expansion
HEAD_T = 0.01

_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)


@dataclass(frozen=True)
class ContourSpec:
    c: float
    U: float
    nodes: int


def _pole_gap(alpha: float, c: float) -> float:
    """Distance from the real point c to the nearest pole of h (any family)."""
    a = alpha
    cands = [-1.0 / a, 2.0 - 1.0 / a]
    # families continue beyond the strip edges
    k = max(1, int(math.floor((c - 1.0) * a)))
    cands += [1.0 + j / a for j in range(max(1, k - 2), k + 3)]
    m = int(round(c + 1.0 / a))
    cands += [j - 1.0 / a for j in range(max(2, m - 2), m + 3)]
    return min(abs(c - x) for x in cands)


def check_abscissa(alpha: float, c: float) -> None:
    lo, hi = strip_of(alpha)
    if not lo < c < hi:
        raise StripError("contour abscissa", c, lo, hi)
    if _pole_gap(alpha, c) < 1e-3:
        raise DomainError(f"contour abscissa c={c} is within 1e-3 of a pole")


def truncation_height(alpha: float, tol: float) -> float:
    """U with exp(-(pi/2)(alpha-1)U)/((pi/2)(alpha-1)) below tol."""
    rate = 0.5 * math.pi * (alpha - 1.0)
    U = max(20.0, math.log(1.0 / (tol * rate)) / rate)
    if U > MAX_HALF_WIDTH:
        raise ToleranceUnreachable(f"truncation height {U:.0f} exceeds {MAX_HALF_WIDTH:.0f}")
    return U


def _breakpoints(gap: float, U: float, width: float) -> np.ndarray:
    pts = [0.0]
    step = min(gap / 4.0, width)
    while pts[-1] < U:
        pts.append(min(pts[-1] + step, U))
        step = min(2.0 * step, width)
    return np.array(pts)


def line_nodes(gap: float, U: float, width: float):
    """Symmetric Gauss-Legendre nodes and weights on [-U, U]."""
    bp = _breakpoints(gap, U, width)
    a, b = bp[:-1], bp[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    u = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    return np.concatenate([-u[::-1], u]), np.concatenate([w[::-1], w])


def _panel_width(log_ts: np.ndarray) -> float:
    lmax = float(np.max(np.abs(log_ts))) if log_ts.size else 0.0
    return min(1.0, math.pi / lmax) if lmax > 0 else 1.0


def _line_integral(fvals, u, w, c, log_ts):
    """(1/2 pi) sum w f(u) exp(-(c + iu) ln t) for each t; returns complex array."""
    out = np.empty(log_ts.shape, dtype=complex)
    fw = fvals * w
    for start in range(0, log_ts.size, 64):
        lt = log_ts[start:start + 64]
        phase = np.exp(-1j * np.outer(lt, u))
        out[start:start + 64] = (phase @ fw) * np.exp(-c * lt)
    return out / (2.0 * math.pi)


def invert_density_many(params: StableParams, sign, ts, tol: float = 1e-10, c: float = 1.0):
    """Densities at many t by one shared contour; returns (values, err, ContourSpec)."""
    sign = Sign.from_value(sign)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if np.any(ts <= 0):
        raise DomainError("t must be positive")
    check_abscissa(params.alpha, c)
    log_ts = np.log(ts)
    U = truncation_height(params.alpha, tol)
    gap = _pole_gap(params.alpha, c)
    r = params.rho_for(sign)
    width = _panel_width(log_ts)
    prev = None
    for _ in range(5):
        u, w = line_nodes(gap, U, width)
        vals = _line_integral(h_values(params.alpha, r, c + 1j * u), u, w, c, log_ts)
        if prev is not None:
            diff = np.abs(vals.real - prev.real)
            if np.all(diff <= tol * np.maximum(np.abs(vals.real), 1e-300)):
                break
        prev = vals
        width *= 0.5
        gap *= 0.5
    else:
        diff = np.abs(vals.real - prev.real)
    err = diff + np.abs(vals.imag) + np.exp(-c * log_ts) * tol
    return vals.real, err, ContourSpec(c, U, u.size)


def invert_density(params: StableParams, sign, t: float, tol: float = 1e-10, c: float = 1.0) -> DensityResult:
    """Density of T_0 under P_{+-1} at t by contour inversion."""
    if not t > 0:
        raise DomainError("t must be positive")
    vals, err, _ = invert_density_many(params, sign, [t], tol=tol, c=c)
    return DensityResult(float(vals[0]), Method.INVERSION, float(err[0]), float(t))


def invert_transform(values_fn, c: float, gap: float, alpha: float, t, tol: float = 1e-10):
    """Generic inversion (1/2 pi) int F(c+iu) t^{-c-iu} du for a user transform."""
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    U = truncation_height(alpha, tol)
    u, w = line_nodes(gap, U, _panel_width(np.log(ts)))
    return _line_integral(values_fn(c + 1j * u), u, w, c, np.log(ts))


# -- tail and survival -----------------------------------------------------


def leading_tail_coefficient(params: StableParams, sign) -> float:
    """P in p(t) ~ P t^{1/alpha - 2} as t -> infinity."""
    a = params.alpha
    r = params.rho_for(sign)
    return (
        -math.sin(math.pi / a) ** 2 * math.sin(math.pi * a * r) * math.gamma(1.0 - 1.0 / a)
        / (math.pi * math.sin(math.pi * r) * math.sin(math.pi * a) * math.gamma(a - 1.0))
    )


def tail_probability(params: StableParams, sign, T, tol: float = 1e-12):
    """P(T_0 > T) from the leading power law plus the shifted-contour remainder.

    The survival transform is h(s+1)/s; moving its inversion line from
    (0, 1 - 1/alpha) to Re s = 1/2 crosses only the pole at 1 - 1/alpha,
    whose residue is the closed-form term P T^{1/alpha-1}/(1 - 1/alpha).
    """
    sign = Sign.from_value(sign)
    a = params.alpha
    T = np.atleast_1d(np.asarray(T, dtype=float))
    lead = leading_tail_coefficient(params, sign) * T ** (1.0 / a - 1.0) / (1.0 - 1.0 / a)
    r = params.rho_for(sign)
    gap = min(0.5 - (1.0 - 1.0 / a), 1.0 / a - 0.5)

    def fn(s):
        return h_values(a, r, s + 1.0) / s

    prev = None
    width = _panel_width(np.log(T))
    U = truncation_height(a, tol)
    for _ in range(5):
        u, w = line_nodes(gap, U, width)
        rem = _line_integral(fn(0.5 + 1j * u), u, w, 0.5, np.log(T)).real
        if prev is not None and np.all(np.abs(rem - prev) <= tol):
            break
        prev = rem
        width *= 0.5
        gap *= 0.5
    return lead + rem


def survival_direct(params: StableParams, sign, t, c: float = None, tol: float = 1e-12):
    """P(T_0 > t) by inverting h(s+1)/s on a line inside (0, 1 - 1/alpha)."""
    a = params.alpha
    if c is None:
        c = 0.5 * (1.0 - 1.0 / a)
    if not 0.0 < c < 1.0 - 1.0 / a:
        raise StripError("survival abscissa", c, 0.0, 1.0 - 1.0 / a)
    r = params.rho_for(sign)
    gap = min(c, 1.0 - 1.0 / a - c)
    vals = invert_transform(lambda s: h_values(a, r, s + 1.0) / s, c, gap, a, t, tol)
    return vals.real


def small_t_head_mass(params: StableParams, sign, t: float, terms: int = 3) -> float:
    """int_0^t of the small-time expansion, term by term."""
    from .density_series import asymptotic_coefficients

    a = params.alpha
    coef = asymptotic_coefficients(a, a * params.rho_for(sign), params.rho_for(sign), terms)
    n = np.arange(1, terms + 1)
    expo = n + 1.0 / a
    return float(np.sum(coef * t ** expo / expo))


def _log_gl_nodes(lo: float, hi: float, width: float = 0.5):
    npan = max(1, int(math.ceil((hi - lo) / width)))
    edges = np.linspace(lo, hi, npan + 1)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    x = (0.5 * (a + b))[:, None] + half[:, None] * _GL_X[None, :]
    w = half[:, None] * _GL_W[None, :]
    return x.ravel(), w.ravel()


def _mass_between(params, sign, t0: float, t1: float, tol: float) -> float:
    """int_{t0}^{t1} p(u) du for HEAD_T <= t0 <= t1 <= SURVIVAL_SPLIT."""
    if t1 <= t0:
        return 0.0
    x, w = _log_gl_nodes(math.log(t0), math.log(t1), width=0.25)
    ts = np.exp(x)
    p, _, _ = invert_density_many(params, sign, ts, tol=tol)
    return float(np.sum(w * p * ts))


def survival(params: StableParams, sign, t: float, tol: float = 1e-10) -> float:
    """P(T_0 > t) under P_{+-1}.

    Quadrature of the density on [t, T*] with T* = SURVIVAL_SPLIT common to
    all t, plus the exact tail beyond T*; below HEAD_T the small-time
    expansion is integrated analytically.
    """
    sign = Sign.from_value(sign)
    if t < 0:
        raise DomainError("t must be >= 0")
    if t >= SURVIVAL_SPLIT:
        return float(tail_probability(params, sign, t)[0])
    tail = float(tail_probability(params, sign, SURVIVAL_SPLIT)[0])
    head = 0.0
    start = t
    if t < HEAD_T:
        head = small_t_head_mass(params, sign, HEAD_T) - small_t_head_mass(params, sign, t)
        start = HEAD_T
    return head + _mass_between(params, sign, start, SURVIVAL_SPLIT, tol) + tail


def survival_curve(params: StableParams, sign, ts, tol: float = 1e-10) -> np.ndarray:
    return np.array([survival(params, sign, float(t), tol) for t in np.atleast_1d(ts)])


def quantile(params: StableParams, sign, q: float, tol: float = 1e-10) -> float:
    """t with P(T_0 <= t) = q."""
    if not 0.0 < q < 1.0:
        raise DomainError("q must lie in (0, 1)")
    target = 1.0 - q

    def f(logt):
        return survival_direct(params, sign, math.exp(logt))[0] - target

    lo, hi = -5.0, 5.0
    while f(lo) < 0:
        lo -= 5.0
    while f(hi) > 0:
        hi += 5.0
        if hi > 200:
            raise ToleranceUnreachable("quantile beyond representable range")
    return math.exp(optimize.brentq(f, lo, hi, xtol=1e-12))


def numerical_residue(fn, s0: complex, radius: float, points: int = 256) -> complex:
    """Residue of fn at s0 by the trapezoid rule on a small circle."""
    theta = 2.0 * math.pi * np.arange(points) / points
    z = radius * np.exp(1j * theta)
    return complex(np.mean(fn(s0 + z) * z))
