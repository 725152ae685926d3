"""Two-state Markov additive process layer.

Builds matrix exponents F(z) = diag(psi_1, psi_2) + Q o G(z), provides the
explicit exponent of the MAP (-alpha xi, J) underlying a two-sided stable
process, the matrices B(s) = -F(-s)/s and A(s) = B(s)^{-1} of the Mellin
functional equation, the Perron eigenvalue, and the exponents of the
Lamperti transform of the radial part of a symmetric stable process.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate

from .errors import DegenerateError, DomainError, NonFiniteError, PoleError, StripError
from .gammaspec import log_gamma, log_rgamma
from .params import StableParams


@dataclass(frozen=True)
class MatrixExponent2:
    entries: np.ndarray
    argument: complex
    generator: Optional[np.ndarray] = None

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=complex)
        if e.shape != (2, 2):
            raise ValueError("a 2x2 matrix is required")
        if not np.all(np.isfinite(e)):
            raise NonFiniteError("matrix exponent has non-finite entries")
        object.__setattr__(self, "entries", e)

    def __matmul__(self, other):
        other = other.entries if isinstance(other, MatrixExponent2) else other
        return self.entries @ other

    @property
    def det(self) -> complex:
        e = self.entries
        return complex(e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0])

    @property
    def trace(self) -> complex:
        return complex(self.entries[0, 0] + self.entries[1, 1])


@dataclass(frozen=True)
class PerronData:
    kappa: float
    v: np.ndarray
    pi: np.ndarray
    other_eigenvalue: float


def _check_generator(Q) -> np.ndarray:
    Q = np.asarray(Q, dtype=float)
    if Q.shape != (2, 2):
        raise ValueError("generator must be 2x2")
    if Q[0, 1] < 0 or Q[1, 0] < 0:
        raise DomainError("generator off-diagonal rates must be nonnegative")
    if not np.allclose(Q.sum(axis=1), 0.0, atol=1e-12 * max(1.0, np.abs(Q).max())):
        raise DomainError("generator rows must sum to zero (killed chains are not supported)")
    return Q


def build_map_exponent(
    psi: Sequence[Callable[[complex], complex]],
    Q,
    G: Optional[Sequence[Sequence[Optional[Callable[[complex], complex]]]]],
    z: complex,
) -> MatrixExponent2:
    """diag(psi_1(z), psi_2(z)) + Q o G(z).

    ``G`` is a 2x2 nested sequence of callables (diagonal entries are ignored,
    since G_ii = 1); ``None`` means G = 1 everywhere.
    """
    Q = _check_generator(Q)
    z = complex(z)
    out = np.array(Q, dtype=complex)
    for i in range(2):
        try:
            out[i, i] += complex(psi[i](z))
        except (ArithmeticError, ValueError) as exc:
            raise DomainError(f"psi_{i + 1} undefined at z={z}") from exc
    if G is not None:
        for i, j in ((0, 1), (1, 0)):
            g = G[i][j]
            if g is None or Q[i, j] == 0:
                continue
            try:
                out[i, j] = Q[i, j] * complex(g(z))
            except (ArithmeticError, ValueError) as exc:
                raise DomainError(f"G_{i + 1}{j + 1} undefined at z={z}") from exc
    if not np.all(np.isfinite(out)):
        raise DomainError(f"matrix exponent diverges at z={z}")
    return MatrixExponent2(out, z, Q)


# -- the stable MAP ---------------------------------------------------------


def _check_F_strip(params: StableParams, z):
    a = params.alpha
    zr = np.real(z)
    if np.any(zr <= -1.0) or np.any(zr >= 1.0 / a):
        raise StripError("stable_F", np.ravel(z)[0] if np.ndim(z) else z, -1.0, 1.0 / a)


def stable_generator(params: StableParams) -> np.ndarray:
    """Q of the sign chain: q_12 = Gamma(alpha)/(Gamma(a rho_hat)Gamma(1 - a rho_hat)), q_21 likewise with rho."""
    a = params.alpha
    q12 = math.gamma(a) * math.sin(math.pi * a * params.rho_hat) / math.pi
    q21 = math.gamma(a) * math.sin(math.pi * a * params.rho) / math.pi
    return np.array([[-q12, q12], [q21, -q21]])


def stable_F_entries(params: StableParams, z) -> np.ndarray:
    """Vectorised entries of F(z); shape (..., 2, 2)."""
    _check_F_strip(params, z)
    a = params.alpha
    z = np.asarray(z, dtype=complex)
    common = log_gamma(a * (1.0 + z)) + log_gamma(1.0 - a * z)
    out = np.empty(z.shape + (2, 2), dtype=complex)
    for i, r in enumerate((params.rho_hat, params.rho)):
        diag = common + log_rgamma(a * r + a * z) + log_rgamma(1.0 - a * r - a * z)
        off = common + log_rgamma(a * r) + log_rgamma(1.0 - a * r)
        out[..., i, i] = -np.exp(diag)
        out[..., i, 1 - i] = np.exp(off)
    return out


def stable_F(params: StableParams, z: complex) -> MatrixExponent2:
    """Matrix exponent of (-alpha xi, J) for -1 < Re z < 1/alpha."""
    e = stable_F_entries(params, complex(z))
    return MatrixExponent2(e, complex(z), stable_generator(params))


def stable_map_characteristics(params: StableParams, quad: bool = True):
    """(psi, Q, G) of the stable MAP from its jump structure.

    State 1 runs the Lamperti transform of X killed on leaving (0, inf) with
    the killing removed; a sign change from x > 0 lands at -x*Y where Y has
    density alpha (1+y)^(-alpha-1), so G_12(z) = E[Y^(-alpha z)]. With
    ``quad=True`` the jump transforms are evaluated by numerical integration
    of that density rather than by the beta-function closed form.
    """
    a = params.alpha
    Q = stable_generator(params)

    def make_psi(r, q_out):
        def psi(z):
            z = complex(z)
            val = -np.exp(
                log_gamma(a * (1 + z)) + log_gamma(1 - a * z)
                + log_rgamma(a * r + a * z) + log_rgamma(1 - a * r - a * z)
            )
            return complex(val) + q_out
        return psi

    def jump_transform(z):
        z = complex(z)
        if not -1.0 < z.real < 1.0 / a:
            raise DomainError("jump transform diverges")
        if not quad:
            return complex(np.exp(log_gamma(1 - a * z) + log_gamma(a * (1 + z)) - log_gamma(a)))

        # substitute y = u/(1-u) to map (0, inf) to (0, 1)
        def integrand(u, part):
            y = u / (1.0 - u)
            w = complex(np.exp(-a * z * np.log(y))) * a * (1.0 - u) ** (a - 1.0)
            return w.real if part == 0 else w.imag

        re = integrate.quad(integrand, 0.0, 1.0, args=(0,), epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        im = integrate.quad(integrand, 0.0, 1.0, args=(1,), epsabs=1e-14, epsrel=1e-13, limit=200)[0]
        return complex(re, im)

    psi = (make_psi(params.rho_hat, Q[0, 1]), make_psi(params.rho, Q[1, 0]))
    G = ((None, jump_transform), (jump_transform, None))
    return psi, Q, G


# -- functional-equation matrices -------------------------------------------


def _check_real_strip(name, s, lo, hi):
    if not lo < complex(s).real < hi:
        raise StripError(name, s, lo, hi)


def matrix_B(params: StableParams, s: complex) -> MatrixExponent2:
    """B(s) = -F(-s)/s in sine/gamma closed form, Re s in (-1/alpha, 1), s != 0."""
    a, r, rh = params.alpha, params.rho, params.rho_hat
    s = complex(s)
    _check_real_strip("B", s, -1.0 / a, 1.0)
    if abs(s) < 1e-12:
        raise PoleError("B(s) has a pole at s = 0")
    pref = a / np.pi * np.exp(log_gamma(a - a * s) + log_gamma(a * s))
    pi = np.pi
    m = np.array(
        [
            [np.sin(pi * a * (rh - s)), -np.sin(pi * a * rh)],
            [-np.sin(pi * a * r), np.sin(pi * a * (r - s))],
        ],
        dtype=complex,
    )
    return MatrixExponent2(pref * m, s)


def matrix_A(params: StableParams, s: complex) -> MatrixExponent2:
    """A(s) = B(s)^{-1} from its own closed form, Re s in (1 - 2/alpha, 1 - 1/alpha)."""
    a, r, rh = params.alpha, params.rho, params.rho_hat
    s = complex(s)
    _check_real_strip("A", s, 1.0 - 2.0 / a, 1.0 - 1.0 / a)
    pref = -1.0 / (np.pi * a) * np.exp(log_gamma(1 - a + a * s) + log_gamma(1 - a * s))
    pi = np.pi
    m = np.array(
        [
            [np.sin(pi * a * (r - s)), np.sin(pi * a * rh)],
            [np.sin(pi * a * r), np.sin(pi * a * (rh - s))],
        ],
        dtype=complex,
    )
    return MatrixExponent2(pref * m, s)


def det_B(params: StableParams, s: complex) -> complex:
    """-alpha^2 Gamma(a - a s) Gamma(a s) / (Gamma(1 - a + a s) Gamma(1 - a s))."""
    a = params.alpha
    s = complex(s)
    _check_real_strip("det B", s, -1.0 / a, 1.0)
    if abs(s) < 1e-12:
        raise PoleError("det B(s) has a pole at s = 0")
    val = np.exp(log_gamma(a - a * s) + log_gamma(a * s) + log_rgamma(1 - a + a * s) + log_rgamma(1 - a * s))
    return complex(-a * a * val)


def B_and_A(params: StableParams, s: complex):
    """(B(s), A(s)) on the strip where both closed forms apply."""
    return matrix_B(params, s), matrix_A(params, s)


# -- Perron eigenvalue -------------------------------------------------------


def stationary_distribution(Q) -> np.ndarray:
    Q = np.asarray(Q, dtype=float)
    q12, q21 = Q[0, 1], Q[1, 0]
    tot = q12 + q21
    if tot <= 0:
        raise DegenerateError("chain is not irreducible")
    return np.array([q21 / tot, q12 / tot])


def leading_eigenvalue(F: MatrixExponent2, generator=None) -> PerronData:
    """Perron eigenvalue, positive right eigenvector normalised by pi v = 1."""
    e = F.entries
    if np.max(np.abs(e.imag)) > 1e-12 * max(1.0, np.max(np.abs(e))):
        raise DomainError("leading_eigenvalue needs a real matrix (real argument)")
    a, b, c, d = e.real.ravel()
    Q = generator if generator is not None else F.generator
    if Q is None:
        if F.argument != 0:
            raise DomainError("generator required to normalise the eigenvector")
        Q = e.real
    half_tr = 0.5 * (a + d)
    disc = (0.5 * (a - d)) ** 2 + b * c
    if disc < 0:
        raise DegenerateError("complex eigenvalues; off-diagonal entries must be positive")
    root = math.sqrt(disc)
    scale = max(abs(a), abs(d), abs(b), abs(c), 1e-300)
    if root <= 1e-14 * scale:
        raise DegenerateError("eigenvalues coincide")
    det = a * d - b * c
    if half_tr >= 0:
        kappa = half_tr + root
        other = det / kappa if kappa != 0 else half_tr - root
    else:
        other = half_tr - root
        kappa = det / other
    # (F - kappa) v = 0 with v = (b, kappa - a); kappa - a written without cancellation
    gap = 0.5 * (d - a) + root if d >= a else b * c / (0.5 * (a - d) + root)
    v = np.array([b, gap], dtype=float)
    if b <= 0 or gap <= 0:
        raise DegenerateError("no strictly positive Perron vector (reducible exponent)")
    pi = stationary_distribution(Q)
    v = v / float(pi @ v)
    return PerronData(float(kappa), v, pi, float(other))


def stable_kappa(params: StableParams, z: float) -> float:
    return leading_eigenvalue(stable_F(params, float(z))).kappa


# -- symmetric case: Lamperti transform of the radial part -----------------


def sym_char_exponent(alpha: float, theta):
    """Characteristic exponent of the Levy process xi (symmetric radial part).

    Complex theta is accepted where the gamma factors are finite, so that
    psi(z) = -Psi(i alpha z) can be evaluated through this function too.
    """
    theta = np.asarray(theta, dtype=complex)
    zero = theta == 0
    th = np.where(zero, 1.0, theta)
    it2 = 0.5j * th
    val = (2.0 ** alpha) * np.exp(
        log_gamma(alpha / 2 - it2) + log_gamma(0.5 + it2)
        + log_rgamma(-it2) + log_rgamma((1 - alpha) / 2 + it2)
    )
    out = np.where(zero, 0.0 + 0j, val)
    return out if out.ndim else complex(out)


def sym_char_exponent_parts(alpha: float, theta):
    """(Psi^L, Psi^C): the killing-removed hypergeometric part and the
    compound Poisson part whose sum is the characteristic exponent."""
    theta = np.asarray(theta, dtype=float)
    it = 1j * theta
    lev = np.exp(
        log_gamma(alpha - it) + log_gamma(1 + it) - log_gamma(alpha / 2 - it) - log_gamma(1 - alpha / 2 + it)
    ) - math.gamma(alpha) / (math.gamma(alpha / 2) * math.gamma(1 - alpha / 2))
    k = math.gamma(alpha + 1) / (math.gamma(alpha / 2) * math.gamma(1 - alpha / 2))
    cpp = k * (1.0 / alpha - np.exp(log_gamma(1 + it) + log_gamma(alpha - it)) / math.gamma(alpha + 1))
    return lev, cpp


def _check_sym_strip(alpha, z):
    zr = complex(z).real
    if not -1.0 < zr < 1.0 / alpha:
        raise StripError("sym_laplace_exponent", z, -1.0, 1.0 / alpha)


def sym_laplace_exponent(alpha: float, z: complex) -> complex:
    """Laplace exponent psi of -alpha xi: E exp(-z alpha xi_1) = exp(psi(z))."""
    _check_sym_strip(alpha, z)
    z = complex(z)
    if z == 0:
        return 0j
    val = np.exp(
        log_gamma(0.5 - alpha * z / 2) + log_gamma(alpha * (1 + z) / 2)
        + log_rgamma(0.5 - alpha * (1 + z) / 2) + log_rgamma(alpha * z / 2)
    )
    return complex(-(2.0 ** alpha) * val)


def sym_cpp_constant(alpha: float) -> float:
    """k = Gamma(alpha+1)/(Gamma(alpha/2) Gamma(1-alpha/2))."""
    return math.gamma(alpha + 1) / (math.gamma(alpha / 2) * math.gamma(1 - alpha / 2))


def sym_cpp_density(alpha: float, y):
    """Levy density k e^y / (1+e^y)^(alpha+1) of the compound Poisson part."""
    y = np.asarray(y, dtype=float)
    k = sym_cpp_constant(alpha)
    # k exp(y - (alpha+1) log(1+e^y)), written to stay finite for large |y|
    out = k * np.exp(y - (alpha + 1.0) * np.logaddexp(0.0, y))
    return out if out.ndim else float(out)
