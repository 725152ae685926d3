"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` or directly as a script.
Criterion 11 simulates 10^5 paths and takes a few minutes.
"""

import math
import subprocess
import sys
import time
import warnings

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, admissible
from stablehit.density_series import (
    K_density,
    density,
    density_asymptotic_boundary,
    density_asymptotic_small_t,
    irrational_terms,
)
from stablehit.map_exponent import stable_kappa, sym_laplace_exponent
from stablehit.mellin_inversion import invert_density, numerical_residue, survival
from stablehit.mellin_law import (
    functional_equation_residual,
    h_values,
    mellin_symmetric,
    mellin_T0,
    pole_catalog,
    positive_stable_mellin,
)
from stablehit.montecarlo import estimate_hitting_law
from stablehit.params import Sign, make_params
from stablehit.results import Method
from stablehit.applications import (
    conditioned_entrance,
    entrance_law_mass,
    excursion_length_tail,
    h_weighted_entrance,
    ratio_Y,
)

pytestmark = pytest.mark.filterwarnings("ignore:alpha=.*:UserWarning")


def report(number, title, ok, detail, elapsed):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d} {title}: {detail} ({elapsed:.2f}s)"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def random_params(n, seed):
    rng = np.random.default_rng(seed)
    return [admissible(a, u) for a, u in zip(rng.uniform(1.02, 1.98, n), rng.uniform(0.01, 0.99, n))]


def test_01_normalisation():
    cases = random_params(50, 1)
    with Timer() as tm:
        worst = max(abs(complex(mellin_T0(p, sg, 1.0).value) - 1) for p in cases for sg in Sign)
    ok = worst < 1e-12 and tm.elapsed < 1.0
    assert report(1, "normalisation", ok, f"max |M(1)-1| = {worst:.2e}", tm.elapsed)


def test_02_functional_equation():
    worst = 0.0
    with Timer() as tm:
        for a in np.linspace(1.05, 1.95, 20):
            lo, hi = 1 - 1 / a, 1 / a
            for u in np.linspace(0.02, 0.98, 20):
                p = make_params(float(a), float(lo + (hi - lo) * u))
                for j in range(10):
                    s = (1 - 1 / a) * (j + 0.5) / 10
                    worst = max(worst, functional_equation_residual(p, float(s)))
    ok = worst < 1e-10 and tm.elapsed < 5.0
    assert report(2, "functional equation", ok, f"max residual = {worst:.2e} over 4000 points", tm.elapsed)


def test_03_symmetric_reduction():
    worst_m = worst_s = 0.0
    with Timer() as tm:
        for a in (1.2, 1.5, 1.8):
            p = make_params(a, 0.5)
            lo, hi = -1 / a, 2 - 1 / a
            for s in np.linspace(lo + 0.01, hi - 0.01, 50):
                d = complex(mellin_T0(p, Sign.PLUS, s).value) - complex(mellin_symmetric(a, s).value)
                worst_m = max(worst_m, abs(d))
            for s in np.linspace(0.0, 1 - 1 / a, 12)[1:-1]:
                lhs = complex(mellin_symmetric(a, s + 1).value)
                rhs = -s / sym_laplace_exponent(a, -s) * complex(mellin_symmetric(a, s).value)
                worst_s = max(worst_s, abs(lhs - rhs))
    ok = worst_m < 1e-12 and worst_s < 1e-10
    assert report(3, "symmetric reduction", ok,
                  f"max transform diff = {worst_m:.2e}, scalar equation residual = {worst_s:.2e}", tm.elapsed)


def test_04_cramer_roots():
    worst_k = worst_s = 0.0
    with Timer() as tm:
        for a in np.linspace(1.05, 1.95, 20):
            a = float(a)
            p = make_params(a, 0.5 + 0.3 * (1 / a - 0.5))
            worst_k = max(worst_k, abs(stable_kappa(p, 1 / a - 1)))
            worst_s = max(worst_s, abs(sym_laplace_exponent(a, 1 / a - 1)))
    ok = worst_k < 1e-10 and worst_s < 1e-10
    assert report(4, "Cramer roots", ok, f"max |kappa| = {worst_k:.2e}, max |psi| = {worst_s:.2e}", tm.elapsed)


def test_05_dual_method_density():
    worst = 0.0
    methods = set()
    with Timer() as tm:
        for p in (make_params("3/2", 0.55), make_params(math.sqrt(2), 0.55)):
            for sign in Sign:
                for t in (0.5, 1.0, 2.0, 5.0, 10.0):
                    ser = density(p, sign, t, tol=1e-12)
                    methods.add(ser.method)
                    inv = invert_density(p, sign, t, tol=1e-12).value
                    worst = max(worst, abs(ser.value / inv - 1))
    series_only = methods == {Method.SERIES_RATIONAL, Method.SERIES_IRRATIONAL}
    ok = worst < 1e-6 and tm.elapsed < 30.0 and series_only
    assert report(5, "dual-method density", ok, f"max relative diff = {worst:.2e}", tm.elapsed)


def test_06_residue_identity():
    p = make_params(math.sqrt(2), 0.55)
    a, r, t = p.alpha, p.rho_hat, 1.3
    with Timer() as tm:
        f1, f2 = irrational_terms(p, Sign.PLUS, t, 8)
        cat = pole_catalog(p, 30)
        located = sorted(
            [(q.location, v) for q, v in zip(cat.family1, f1)] + [(q.location, v) for q, v in zip(cat.family2, f2)]
        )[:10]
        locs = [float(x) for x in cat.all_locations()]
        worst = 0.0
        for loc, term in located:
            radius = 0.25 * min(0.2, min(abs(x - loc) for x in locs if x != loc))
            res = numerical_residue(lambda s: h_values(a, r, s) * t ** (-s), loc, radius)
            worst = max(worst, abs(term + res.real) / abs(term))
    ok = worst < 1e-9
    assert report(6, "residue identity", ok, f"max relative diff over 10 terms = {worst:.2e}", tm.elapsed)


def test_07_total_mass():
    pairs = [(1.1, 0.5), (1.3, 0.6), ("3/2", 0.55), (math.sqrt(2), 0.4), (1.9, 0.52)]
    worst = 0.0
    with Timer() as tm:
        for a, rho in pairs:
            p = make_params(a, rho)
            for sign in Sign:
                worst = max(worst, abs(survival(p, sign, 0.0) - 1))
    ok = worst < 1e-6
    assert report(7, "total mass", ok, f"max |mass - 1| = {worst:.2e}", tm.elapsed)


def test_08_small_time_expansion():
    p = make_params(1.5, 0.55)
    c = 1.5
    with Timer() as tm:
        scaled = []
        for j in range(4, 11):
            t = 2.0 ** -j
            inv = invert_density(p, Sign.PLUS, t, tol=1e-13).value
            scaled.append(abs(inv - density_asymptotic_small_t(p, Sign.PLUS, t, c=c).value) / t ** (c + 1 / 1.5))
        boundary = max(abs(density_asymptotic_boundary(a, t).value)
                       for a in (1.2, 1.5, 1.8) for t in (1e-4, 1e-2, 0.04))
    bounded = max(scaled) <= 2 * scaled[0]
    ok = bounded and boundary == 0.0
    assert report(8, "small-time expansion", ok,
                  f"scaled remainder in [{min(scaled):.3g}, {max(scaled):.3g}], boundary max = {boundary:.1e}",
                  tm.elapsed)


def test_09_spectrally_positive_boundary():
    # a shift delta of rho_hat moves the transform by about 6 delta / d at
    # distance d from a strip edge, so the grid keeps a margin of 0.1
    worst = near_edge = 0.0
    with Timer() as tm:
        for a in (1.2, 1.5, 1.8):
            p = make_params(a, 1 - (1 / a - 1e-8))
            for margin in (0.1, 0.01):
                for s in np.linspace(-1 / a + margin, 2 - 1 / a - margin, 40):
                    diff = abs(complex(mellin_T0(p, Sign.PLUS, s).value) - positive_stable_mellin(a, s))
                    if margin == 0.1:
                        worst = max(worst, diff)
                    else:
                        near_edge = max(near_edge, diff)
    ok = worst < 1e-6
    assert report(9, "spectrally positive boundary", ok,
                  f"max diff = {worst:.2e} (edge margin 0.1; {near_edge:.1e} at margin 0.01)", tm.elapsed)


def test_10_K_census():
    with Timer() as tm:
        frac = K_density(math.sqrt(2), 10_000)
    ok = frac >= 0.95 and tm.elapsed < 1.0
    assert report(10, "K(alpha) census", ok, f"density = {frac:.4f}", tm.elapsed)


@pytest.mark.slow
def test_11_monte_carlo_concordance():
    p = make_params(1.5, 0.55)
    grid = [0.5, 1.0, 2.0, 4.0]
    with Timer() as tm:
        est = estimate_hitting_law(p, 1.0, 1e-2, 1e-4, 100_000, grid, seed=0)
    exact = np.array([survival(p, Sign.PLUS, t) for t in grid])
    z = (np.array(est.survival) - exact) / np.array(est.stderr)
    z_extra = (np.array(est.extrapolated) - exact) / np.array(est.stderr_half)
    ok = bool(np.all(np.abs(z) < 4)) and tm.elapsed < 300
    detail = ("z-scores " + ", ".join(f"{v:+.1f}" for v in z)
              + "; extrapolated z " + ", ".join(f"{v:+.1f}" for v in z_extra))
    assert report(11, "Monte Carlo concordance", ok, detail, tm.elapsed)


def test_12_applications_round_trip():
    p = make_params(1.5, 0.55)
    one = lambda x: np.ones_like(x)
    with Timer() as tm:
        y_err = max(abs(ratio_Y(p, x, 1e3) - 1) for x in (1.0, -1.0))
        mass_err = max(abs(entrance_law_mass(p, t) - excursion_length_tail(p, t)) / excursion_length_tail(p, t)
                       for t in (0.5, 1.0, 3.0))
        cond = conditioned_entrance(p, 1.0, one)
        cond_err = abs(cond - h_weighted_entrance(p, 1.0, one))
    ok = y_err < 0.05 and mass_err < 1e-4 and cond_err < 1e-4
    assert report(12, "applications round trip", ok,
                  f"|Y-1| = {y_err:.3f}, mass rel err = {mass_err:.1e}, f=1 diff = {cond_err:.1e}", tm.elapsed)


def _cli(*argv):
    return subprocess.run([sys.executable, "-m", "stablehit", *argv], capture_output=True, check=False).stdout


def test_13_determinism():
    with Timer() as tm:
        v = [_cli("validate", "--alpha", "3/2", "--rho", "0.55") for _ in range(2)]
        sim = ["simulate", "--alpha", "1.5", "--rho", "0.55", "--t", "0.5", "1", "--paths", "2000",
               "--eps", "0.05", "--dt", "1e-3", "--seed", "7"]
        s = [_cli(*sim) for _ in range(2)]
    ok = v[0] == v[1] and s[0] == s[1] and len(v[0]) > 0 and len(s[0]) > 0
    assert report(13, "determinism", ok, "validate and seeded simulate byte-identical" if ok else "outputs differ",
                  tm.elapsed)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
