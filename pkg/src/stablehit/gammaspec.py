"""Complex gamma-type functions used by every closed form in the package.

Everything here works on scalars or numpy arrays. Products and ratios of
gamma functions and of trigonometric functions with complex arguments are
always assembled in log space and exponentiated once, so that e.g.
``sin(x + iy)`` with ``|y|`` in the hundreds never overflows on its own.
"""

from __future__ import annotations

import numpy as np
from scipy import special

from .errors import DomainError, NonFiniteError, PoleError

LOG_2PI_HALF = 0.5 * np.log(2.0 * np.pi)
EULER_GAMMA = float(np.euler_gamma)


def _check_finite(values, what):
    if not np.all(np.isfinite(values)):
        raise NonFiniteError(f"{what} produced a non-finite value")
    return values


def _is_nonpositive_integer(z):
    z = np.asarray(z, dtype=complex)
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def log_gamma(z):
    """Principal branch of log Gamma(z), cut along (-inf, 0].

    Raises PoleError at 0, -1, -2, ...
    """
    zc = np.asarray(z, dtype=complex)
    if np.any(_is_nonpositive_integer(zc)):
        raise PoleError(f"log_gamma: pole of Gamma at {z!r}")
    out = special.loggamma(zc)
    _check_finite(out, "log_gamma")
    return out if out.ndim else complex(out)


def log_rgamma(z):
    """log(1/Gamma(z)) with -inf at the poles of Gamma (zeros of 1/Gamma)."""
    zc = np.asarray(z, dtype=complex)
    poles = _is_nonpositive_integer(zc)
    safe = np.where(poles, 1.0, zc)
    out = -special.loggamma(safe)
    out = np.where(poles, -np.inf + 0j, out)
    return out if out.ndim else complex(out)


def digamma(x):
    """Logarithmic derivative of Gamma for real x > 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise DomainError(f"digamma: argument must be > 0, got {x!r}")
    out = special.digamma(xa)
    _check_finite(out, "digamma")
    return out if out.ndim else float(out)


def gamma_ratio(s, alpha):
    """Gamma(s) / Gamma(alpha*s), computed as exp of a log difference."""
    s = np.asarray(s, dtype=complex)
    out = np.exp(log_gamma(s) - log_gamma(alpha * s))
    _check_finite(out, "gamma_ratio")
    return out if out.ndim else complex(out)


def gamma_ratio_asymptotic(s, alpha):
    """Leading Stirling form sqrt(alpha) * exp(-s((alpha-1) ln s + A)).

    Here A = 1 - alpha + alpha ln(alpha); the relative error is O(1/s)
    for Re s > 0.
    """
    s = np.asarray(s, dtype=complex)
    a_const = 1.0 - alpha + alpha * np.log(alpha)
    out = np.sqrt(alpha) * np.exp(-s * ((alpha - 1.0) * np.log(s) + a_const))
    return out if out.ndim else complex(out)


def stirling_envelope(x, y):
    """sqrt(2 pi) |y|^(x - 1/2) exp(-pi |y| / 2), the large-|y| size of |Gamma(x+iy)|."""
    ay = np.abs(np.asarray(y, dtype=float))
    with np.errstate(divide="ignore"):
        out = np.exp(LOG_2PI_HALF + (np.asarray(x, dtype=float) - 0.5) * np.log(ay) - 0.5 * np.pi * ay)
    return out if np.ndim(out) else float(out)


def sinpi(x):
    """sin(pi x) for real x, exactly zero at the integers."""
    x = np.asarray(x, dtype=float)
    r = np.remainder(x, 2.0)
    out = np.sin(np.pi * r)
    out = np.where(r == np.round(r), 0.0, out)
    return out if out.ndim else float(out)


def cospi(x):
    """cos(pi x) for real x, exactly zero at the half-integers."""
    return sinpi(np.asarray(x, dtype=float) + 0.5)


def log_sin(z):
    """log(sin z) for complex z without forming e^{|Im z|}.

    Only the exponential of the result is meaningful (the imaginary part is
    defined modulo 2 pi). Zeros of sin give -inf.
    """
    z = np.asarray(z, dtype=complex)
    upper = z.imag >= 0
    # sin z = (i/2) e^{-iz} (1 - e^{2iz})       for Im z >= 0
    # sin z = (-i/2) e^{iz} (1 - e^{-2iz})      for Im z < 0
    w = np.where(upper, -1j * z, 1j * z)
    e2 = np.exp(2j * np.where(upper, z, -z))
    pref = np.where(upper, np.log(0.5j), np.log(-0.5j))
    with np.errstate(divide="ignore"):
        out = pref + w + np.log1p(-e2)
    return out if out.ndim else complex(out)


def log_cos(z):
    """log(cos z) for complex z, see log_sin."""
    return log_sin(np.asarray(z, dtype=complex) + 0.5 * np.pi)


def sin_ratio(a, b, z):
    """sin(a z) / sin(b z) for complex z with the removable point z = 0 handled.

    a, b are real. Near z = 0 a two-term Taylor expansion is used.
    """
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-4
    zs = np.where(small, 1.0, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.exp(log_sin(a * zs) - log_sin(b * zs))
    series = (a / b) * (1.0 - (a * a - b * b) * z * z / 6.0)
    out = np.where(small, series, direct)
    return out if out.ndim else complex(out)
