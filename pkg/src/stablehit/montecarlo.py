"""Path simulation of the stable process and an empirical hitting-time law.

Zero is not hit exactly on a time grid, so a path is stopped the first
time |X| falls below a barrier eps. Every path is run until it enters the
narrowest requested band (eps/2, or eps/4 when asked for) or reaches the
horizon; entry times into the wider bands are recorded on the way, so all
levels share the same paths. The bias is one-sided (the barrier is met
before zero) and its rate in eps is not known in closed form: the
extrapolated value assumes a rate and is reported as metadata only.

Random numbers come from a counter-based generator: the uniform used for
path i, step j, slot k is a hash of (seed, i, j, k). Results therefore do
not depend on the thread count or on how paths are split into blocks.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numba
import numpy as np

# the bundled TBB is too old for numba; the portable pool avoids a warning
numba.config.THREADING_LAYER = "workqueue"

from .errors import DomainError, ParameterError
from .params import StableParams

THREADS_ENV = "STABLEHIT_THREADS"

@numba.njit(inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


@numba.njit(inline="always")
def _uniform(key, counter):
    """Uniform on (0, 1) from a 64-bit key and counter."""
    z = _mix64(key + counter * np.uint64(0x9E3779B97F4A7C15))
    return (np.float64(z >> np.uint64(11)) + 0.5) * (1.0 / 9007199254740992.0)


@numba.njit(inline="always")
def _path_key(seed, path):
    return _mix64(_mix64(seed) ^ (path + np.uint64(1)) * np.uint64(0xD1B54A32D192ED03))


@numba.njit(inline="always")
def _cms(alpha, shift, scale, u1, u2):
    """Chambers-Mallows-Stuck transform of two uniforms (alpha != 1)."""
    v = math.pi * (u1 - 0.5)
    w = -math.log(u2)
    av = alpha * (v + shift)
    return (
        scale * math.sin(av) / math.cos(v) ** (1.0 / alpha)
        * (math.cos(v - av) / w) ** ((1.0 - alpha) / alpha)
    )


@numba.njit(cache=True)
def _cms_many(alpha, shift, scale, u1, u2, out):
    for i in range(out.size):
        out[i] = _cms(alpha, shift, scale, u1[i], u2[i])


@numba.njit(parallel=True, cache=True)
def _run_paths(seed, first, count, x0, alpha, shift, scale, step_scale, eps, finest, n_steps, hits):
    for p in numba.prange(count):
        key = _path_key(seed, np.uint64(first + p))
        x = x0
        h0 = -1
        h1 = -1
        h2 = -1
        for j in range(1, n_steps + 1):
            c = np.uint64(2 * j)
            x += step_scale * _cms(alpha, shift, scale, _uniform(key, c), _uniform(key, c + np.uint64(1)))
            ax = abs(x)
            if ax < eps:
                if h0 < 0:
                    h0 = j
                if h1 < 0 and ax < 0.5 * eps:
                    h1 = j
                if h2 < 0 and ax < 0.25 * eps:
                    h2 = j
                if ax < finest:
                    break
        hits[p, 0] = h0
        hits[p, 1] = h1
        hits[p, 2] = h2


@numba.njit(parallel=True, cache=True)
def _run_positions(seed, count, x0, alpha, shift, scale, step_scale, eps, n_steps, pos, stopped):
    for p in numba.prange(count):
        key = _path_key(seed, np.uint64(p))
        x = x0
        hit = False
        for j in range(1, n_steps + 1):
            c = np.uint64(2 * j)
            x += step_scale * _cms(alpha, shift, scale, _uniform(key, c), _uniform(key, c + np.uint64(1)))
            if abs(x) < eps:
                hit = True
                break
        pos[p] = x
        stopped[p] = hit


def cms_constants(params: StableParams):
    """(shift, scale) of the CMS transform for the exponent
    c|theta|^alpha (1 - i beta tan(pi alpha/2) sgn theta), scale sigma folded in."""
    a = params.alpha
    tan = math.tan(0.5 * math.pi * a)
    bt = params.beta * tan
    shift = math.atan(bt) / a
    scale = (1.0 + bt * bt) ** (0.5 / a) * params.scale_c ** (1.0 / a)
    return shift, scale


def sample_stable_increment(params: StableParams, dt: float, rng: np.random.Generator, size=None):
    """Draws of X_dt under P_0 (scaling dt^{1/alpha} X_1)."""
    if not dt > 0:
        raise DomainError("dt must be positive")
    n = 1 if size is None else int(np.prod(size))
    u1 = rng.random(n)
    u2 = 1.0 - rng.random(n)
    out = np.empty(n)
    shift, scale = cms_constants(params)
    _cms_many(params.alpha, shift, scale, u1, u2, out)
    out *= dt ** (1.0 / params.alpha)
    if size is None:
        return float(out[0])
    return out.reshape(size)


def _configure_threads():
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            n = int(value)
        except ValueError as exc:
            raise ParameterError(f"{THREADS_ENV} must be an integer") from exc
        numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


@dataclass(frozen=True)
class PathEstimate:
    """Empirical survival P(tau_eps > t) on a time grid.

    ``survival`` belongs to the barrier eps and ``survival_half`` to eps/2.
    ``extrapolated`` is the Richardson combination of those two under an
    assumed bias proportional to eps^(alpha - 1). With the optional eps/4
    level, ``bias_ratio`` is the observed ratio of successive increments,
    to compare with the assumed 2^(1 - alpha); it is None otherwise.
    """

    t: tuple
    survival: tuple
    stderr: tuple
    survival_half: tuple
    stderr_half: tuple
    extrapolated: tuple
    survival_quarter: tuple
    bias_ratio: tuple
    n_paths: int
    eps_barrier: float
    dt: float
    x0: float
    seed: int
    stopping_times: np.ndarray = field(repr=False, compare=False, default=None)
    stopping_times_half: np.ndarray = field(repr=False, compare=False, default=None)
    stopping_times_quarter: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def grid(self):
        return list(zip(self.t, self.survival))

    def to_csv(self, path):
        """Write per-path stopping times (inf when no hit before the horizon)."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            cols = [self.stopping_times, self.stopping_times_half]
            names = ["path", "tau_eps", "tau_eps_half"]
            if self.stopping_times_quarter is not None:
                cols.append(self.stopping_times_quarter)
                names.append("tau_eps_quarter")
            w.writerow(names)
            for i, row in enumerate(zip(*cols)):
                w.writerow([i] + [format(float(v), ".17g") for v in row])


def _empirical(taus, t_grid, n):
    surv = np.array([np.count_nonzero(taus > t) / n for t in t_grid])
    if np.any(np.diff(surv) > 0):
        raise AssertionError("empirical survival is not monotone")
    return surv, np.sqrt(surv * (1.0 - surv) / n)


def estimate_hitting_law(params: StableParams, x0: float, eps: float, dt: float, n_paths: int,
                         t_grid, seed: int = 0, quarter: bool = False) -> PathEstimate:
    """Empirical survival of the eps-barrier stopping time started at x0.

    ``quarter`` adds the eps/4 level (paths then run longer).
    """
    x0 = float(x0)
    if x0 == 0.0:
        raise ParameterError("x0 must be nonzero")
    if not 0.0 < eps < abs(x0) / 10.0:
        raise ParameterError("need 0 < eps < |x0|/10")
    if not dt > 0 or not dt ** (1.0 / params.alpha) < eps / 4.0:
        raise ParameterError("need dt^(1/alpha) < eps/4")
    if n_paths < 1:
        raise ParameterError("n_paths must be positive")
    t_grid = np.sort(np.asarray(t_grid, dtype=float))
    if t_grid.size == 0 or t_grid[0] < 0:
        raise ParameterError("t_grid must be nonempty and nonnegative")
    _configure_threads()
    n_steps = int(math.ceil(t_grid[-1] / dt))
    shift, scale = cms_constants(params)
    hits = np.empty((n_paths, 3), dtype=np.int64)
    _run_paths(np.uint64(seed), 0, n_paths, x0, params.alpha, shift, scale,
               dt ** (1.0 / params.alpha), eps, (0.25 if quarter else 0.5) * eps, n_steps, hits)
    taus = np.where(hits < 0, np.inf, hits * dt)
    s1, e1 = _empirical(taus[:, 0], t_grid, n_paths)
    s2, e2 = _empirical(taus[:, 1], t_grid, n_paths)
    extra = richardson(s1, s2, params.alpha)
    s3 = ratio = tau3 = None
    if quarter:
        tau3 = taus[:, 2]
        s3v, _ = _empirical(tau3, t_grid, n_paths)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = tuple(((s3v - s2) / (s2 - s1)).tolist())
        s3 = tuple(s3v.tolist())
    return PathEstimate(
        tuple(t_grid.tolist()), tuple(s1.tolist()), tuple(e1.tolist()),
        tuple(s2.tolist()), tuple(e2.tolist()), tuple(extra.tolist()), s3, ratio,
        int(n_paths), float(eps), float(dt), x0, int(seed),
        taus[:, 0], taus[:, 1], tau3,
    )


def stopped_positions(params: StableParams, x0: float, eps: float, dt: float, n_paths: int,
                      t: float, seed: int = 0):
    """Positions X at t stopped at the eps-barrier time, and the stopped flags.

    Uses the same random streams as estimate_hitting_law, so a path that
    stops here stops at the same step there.
    """
    x0 = float(x0)
    if x0 == 0.0:
        raise ParameterError("x0 must be nonzero")
    if not 0.0 < eps < abs(x0) / 10.0:
        raise ParameterError("need 0 < eps < |x0|/10")
    if not dt > 0 or not dt ** (1.0 / params.alpha) < eps / 4.0:
        raise ParameterError("need dt^(1/alpha) < eps/4")
    if n_paths < 1 or not t > 0:
        raise ParameterError("need n_paths >= 1 and t > 0")
    _configure_threads()
    shift, scale = cms_constants(params)
    pos = np.empty(n_paths)
    stopped = np.empty(n_paths, dtype=np.bool_)
    _run_positions(np.uint64(seed), n_paths, x0, params.alpha, shift, scale,
                   dt ** (1.0 / params.alpha), eps, int(math.ceil(t / dt)), pos, stopped)
    return pos, stopped


def richardson(s_eps, s_half, alpha: float):
    """Two-level extrapolation assuming a bias proportional to eps^(alpha - 1)."""
    factor = 1.0 / (2.0 ** (alpha - 1.0) - 1.0)
    s_half = np.asarray(s_half, dtype=float)
    return s_half + (s_half - np.asarray(s_eps, dtype=float)) * factor
