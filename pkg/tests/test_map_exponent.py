import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import params_strategy
from stablehit.errors import DegenerateError, DomainError, PoleError, StripError
from stablehit.map_exponent import (
    MatrixExponent2,
    build_map_exponent,
    det_B,
    leading_eigenvalue,
    matrix_A,
    matrix_B,
    stable_F,
    stable_generator,
    stable_kappa,
    stable_map_characteristics,
    stationary_distribution,
    sym_char_exponent,
    sym_char_exponent_parts,
    sym_cpp_constant,
    sym_cpp_density,
    sym_laplace_exponent,
)
from stablehit.params import make_params


def test_generator_rows_sum_to_zero(p155):
    Q = stable_generator(p155)
    assert np.allclose(Q.sum(axis=1), 0.0, atol=1e-15)
    assert Q[0, 1] == pytest.approx(math.gamma(1.5) * math.sin(math.pi * 1.5 * 0.45) / math.pi)


def test_F_at_zero_is_generator(p155):
    assert np.allclose(stable_F(p155, 0.0).entries, stable_generator(p155), atol=1e-14)


def test_map_assembly_matches_closed_form(p155):
    psi, Q, G = stable_map_characteristics(p155)
    for z in (0.1, -0.2, 0.3):
        built = build_map_exponent(psi, Q, G, z).entries
        assert np.max(np.abs(built - stable_F(p155, z).entries)) < 1e-9


def test_map_rejects_bad_generator():
    with pytest.raises(DomainError):
        build_map_exponent([lambda z: 0, lambda z: 0], np.array([[-1.0, 0.5], [1.0, -1.0]]),
                           [[None, lambda z: 1], [lambda z: 1, None]], 0.0)


def test_F_strip(p155):
    with pytest.raises(StripError):
        stable_F(p155, 1.0)


@settings(max_examples=40)
@given(params_strategy)
def test_cramer_root(p):
    assert abs(stable_kappa(p, 1.0 / p.alpha - 1.0)) < 1e-10
    assert abs(stable_kappa(p, 0.0)) < 1e-12


@settings(max_examples=40)
@given(params_strategy, st.floats(0.05, 0.95))
def test_det_B_closed_form(p, u):
    s = u * (1.0 - 1.0 / p.alpha) + 0.01
    s = min(s, 0.99)
    closed = det_B(p, s)
    direct = np.linalg.det(matrix_B(p, s).entries)
    assert abs(closed - direct) <= 1e-10 * max(1.0, abs(direct))


@settings(max_examples=30)
@given(params_strategy, st.floats(0.1, 0.9))
def test_B_inverts_A(p, u):
    s = (1.0 - 1.0 / p.alpha) * u
    prod = matrix_B(p, s + 1e-3 if s == 0 else s).entries @ matrix_A(p, s).entries
    assert np.max(np.abs(prod - np.eye(2))) < 1e-9


def test_B_pole_at_zero(p155):
    with pytest.raises(PoleError):
        matrix_B(p155, 0.0)


def test_perron_normalisation(p155):
    F = stable_F(p155, 0.2)
    per = leading_eigenvalue(F, stable_generator(p155))
    assert np.allclose(F.entries @ per.v, per.kappa * per.v)
    assert per.pi @ per.v == pytest.approx(1.0)
    assert per.kappa > per.other_eigenvalue


def test_degenerate_eigenvalue():
    with pytest.raises(DegenerateError):
        leading_eigenvalue(MatrixExponent2(np.eye(2), 0.0))


def test_stationary_distribution(p155):
    Q = stable_generator(p155)
    pi = stationary_distribution(Q)
    assert np.allclose(pi @ Q, 0.0, atol=1e-15)
    assert pi.sum() == pytest.approx(1.0)


@pytest.mark.parametrize("alpha", np.linspace(1.05, 1.95, 7))
def test_symmetric_cramer_root(alpha):
    assert abs(sym_laplace_exponent(alpha, 1.0 / alpha - 1.0)) < 1e-10
    assert sym_laplace_exponent(alpha, 0.0) == 0


@pytest.mark.parametrize("alpha", [1.2, 1.5, 1.8])
def test_symmetric_exponent_decomposition(alpha):
    theta = np.array([0.3, -1.1, 2.5])
    whole = sym_char_exponent(alpha, theta)
    lp, cp = sym_char_exponent_parts(alpha, theta)
    assert np.max(np.abs(whole - (lp + cp))) < 1e-12


@pytest.mark.parametrize("alpha", [1.3, 1.7])
def test_laplace_and_characteristic_agree(alpha):
    z = 0.2
    assert abs(sym_laplace_exponent(alpha, z) + sym_char_exponent(alpha, 1j * alpha * z)) < 1e-12


def test_cpp_density_mass():
    from scipy import integrate

    alpha = 1.5
    total = integrate.quad(lambda y: sym_cpp_density(alpha, y), -np.inf, np.inf)[0]
    # the compound Poisson rate is k Gamma(alpha) Gamma(1)/Gamma(alpha+1) = k/alpha
    assert total == pytest.approx(sym_cpp_constant(alpha) / alpha, rel=1e-10)


def test_assembly_trivial_cases():
    psi = [lambda z: 2.0 * z, lambda z: -z]
    Q = np.array([[-1.0, 1.0], [2.0, -2.0]])
    one = lambda z: 1.0
    G = [[one, one], [one, one]]
    m = build_map_exponent(psi, Q, G, 0.5).entries
    assert np.allclose(m, np.diag([1.0, -0.5]) + Q)
    m0 = build_map_exponent(psi, np.zeros((2, 2)), G, 0.5).entries
    assert np.allclose(m0, np.diag([1.0, -0.5]))


def test_F_det_vanishes_at_cramer_point(p155):
    assert abs(stable_F(p155, 1 / 1.5 - 1).det) < 1e-10


def test_symmetric_matrices_are_bisymmetric():
    p = make_params(1.5, 0.5)
    F = stable_F(p, 0.1).entries
    B = matrix_B(p, 0.15).entries
    for m in (F, B):
        assert m[0, 0] == pytest.approx(m[1, 1]) and m[0, 1] == pytest.approx(m[1, 0])


def test_A_times_B_example(p155):
    prod = matrix_A(p155, 0.15).entries @ matrix_B(p155, 0.15).entries
    assert np.max(np.abs(prod - np.eye(2))) < 1e-12


def test_perron_at_zero(p155):
    per = leading_eigenvalue(stable_F(p155, 0.0), stable_generator(p155))
    assert abs(per.kappa) < 1e-14
    assert np.allclose(per.v, [1.0, 1.0])


@settings(max_examples=25)
@given(params_strategy, st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_kappa_midpoint_convexity(p, u, v):
    lo, hi = -0.95 / p.alpha * 0.99 + 0.0, 0.9 / p.alpha - 0.01
    lo = max(lo, -1.0 + 0.05)
    a, b = lo + (hi - lo) * u, lo + (hi - lo) * v
    assert stable_kappa(p, 0.5 * (a + b)) <= 0.5 * (stable_kappa(p, a) + stable_kappa(p, b)) + 1e-12


@settings(max_examples=25)
@given(params_strategy)
def test_kappa_negative_between_roots(p):
    root = 1.0 / p.alpha - 1.0
    for frac in (0.25, 0.5, 0.75):
        assert stable_kappa(p, frac * root) < 0


def test_generator_off_diagonals(p155):
    Q = stable_generator(p155)
    a, rh, r = 1.5, p155.rho_hat, p155.rho
    assert Q[0, 1] == pytest.approx(math.gamma(a) / (math.gamma(a * rh) * math.gamma(1 - a * rh)))
    assert Q[1, 0] == pytest.approx(math.gamma(a) / (math.gamma(a * r) * math.gamma(1 - a * r)))


@settings(max_examples=20)
@given(params_strategy, st.floats(0.05, 0.95))
def test_det_product_is_one(p, u):
    s = (1.0 - 1.0 / p.alpha) * u
    assert abs(matrix_A(p, s).det * matrix_B(p, s).det - 1) < 1e-10


def test_symmetric_exponent_examples():
    assert sym_char_exponent(1.5, 0.0) == 0
    th = np.linspace(-3, 3, 13)
    assert np.allclose(sym_char_exponent(1.5, -th), np.conj(sym_char_exponent(1.5, th)))
    lp, cp = sym_char_exponent_parts(1.5, 1.3)
    assert abs(sym_char_exponent(1.5, 1.3) - lp - cp) < 1e-10


def test_cpp_density_examples():
    k = sym_cpp_constant(1.5)
    assert sym_cpp_density(1.5, 0.0) == pytest.approx(k * 2 ** -2.5)
    y = 40.0
    assert sym_cpp_density(1.5, y) / (k * math.exp(-1.5 * y)) == pytest.approx(1.0, rel=1e-12)
