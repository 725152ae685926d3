import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import params_strategy
from stablehit.applications import (
    conditioned_entrance,
    entrance_integral,
    entrance_integral_substituted,
    entrance_law_density,
    entrance_law_mass,
    excursion_coefficient,
    excursion_length_density,
    excursion_length_tail,
    h_function,
    h_weighted_entrance,
    ratio_Y,
    ratio_Y_limit_check,
    survival_from,
)
from stablehit.errors import DomainError
from stablehit.mellin_inversion import leading_tail_coefficient
from stablehit.montecarlo import estimate_hitting_law, stopped_positions
from stablehit.params import Sign, make_params


@settings(max_examples=50)
@given(params_strategy, st.floats(0.01, 100.0), st.floats(0.1, 10.0), st.sampled_from([1.0, -1.0]))
def test_h_positive_and_homogeneous(p, x, c, side):
    v = h_function(p, side * x)
    assert v > 0
    assert h_function(p, side * c * x) == pytest.approx(c ** (p.alpha - 1) * v, rel=1e-13)


def test_h_symmetric_even():
    p = make_params(1.7, 0.5)
    assert h_function(p, 2.5) == h_function(p, -2.5)
    with pytest.raises(DomainError):
        h_function(p, 0.0)


def test_h_invariance_by_simulation(p155):
    # stopped at the barrier, h(X) is a martingale up to a discretisation term
    pos, stopped = stopped_positions(p155, 1.0, 0.01, 1e-4, 20_000, 0.5, seed=1)
    hp, hm = h_function(p155, 1.0), h_function(p155, -1.0)
    vals = np.where(pos > 0, hp, hm) * np.abs(pos) ** 0.5
    stderr = vals.std() / math.sqrt(vals.size)
    assert abs(vals.mean() - hp) < 4 * stderr
    est = estimate_hitting_law(p155, 1.0, 0.01, 1e-4, 20_000, [0.5], seed=1)
    assert 1 - est.survival[0] == pytest.approx(stopped.mean(), abs=1e-12)


def test_excursion_coefficient_examples():
    a = 1.5
    W = excursion_coefficient(make_params(a, 0.5)).W
    assert W == pytest.approx((a - 1) * math.sin(math.pi / a) / math.gamma(1 / a), rel=1e-14)
    p = make_params(1.5, 0.55)
    ratio = excursion_length_density(p, 2.6) / excursion_length_density(p, 1.3)
    assert ratio == pytest.approx(2 ** (1 / a - 2), rel=1e-14)
    assert excursion_length_tail(p, 3.0) == pytest.approx(
        excursion_coefficient(p).W * 3.0 ** (1 / a - 1) / (1 - 1 / a), rel=1e-14
    )
    with pytest.raises(DomainError):
        excursion_length_density(p, 0.0)


@settings(max_examples=50)
@given(params_strategy)
def test_W_positive(p):
    assert excursion_coefficient(p).W > 0


def test_tail_chain_reproduces_h(p155):
    # P_x(T_0 > t) ~ P x^(alpha-1) t^(1/alpha-1)/(1-1/alpha) against h(x) n(zeta > t)
    x = 1.7
    P = leading_tail_coefficient(p155, Sign.PLUS)
    W = excursion_coefficient(p155).W
    assert abs(P * x ** 0.5 / W - h_function(p155, x)) < 1e-10


@settings(max_examples=50)
@given(params_strategy, st.sampled_from(list(Sign)))
def test_Y_limit_is_one(p, sign):
    assert abs(ratio_Y_limit_check(p, sign) - 1) < 1e-12


def test_Y_examples(p155):
    assert abs(ratio_Y(p155, 1.0, 1e3) - 1) < 0.05
    assert abs(ratio_Y(p155, -1.0, 1e3) - 1) < 0.05
    assert abs(ratio_Y(p155, 2.0, 5.0) - ratio_Y(p155, 1.0, 2 ** -1.5 * 5.0)) < 1e-10
    for s in np.geomspace(1e-2, 1e3, 6):
        for x in (1.0, -1.0, 2.0, -2.0):
            y = ratio_Y(p155, x, s)
            assert 0 < y < np.inf


def test_Y_round_trip(p155):
    for x, s in ((1.0, 0.3), (-2.0, 4.0)):
        back = ratio_Y(p155, x, s) * h_function(p155, x) * excursion_length_tail(p155, s)
        assert abs(back - survival_from(p155, x, s)) < 1e-10


def test_entrance_density_sign_reversal(p155):
    from stablehit.mellin_inversion import invert_density

    t, x = 0.8, 1.3
    expected = x ** -1.5 * invert_density(p155, Sign.MINUS, x ** -1.5 * t).value
    assert entrance_law_density(p155, t, x) == pytest.approx(expected, rel=1e-9)
    sym = make_params(1.5, 0.5)
    assert entrance_law_density(sym, t, x) == pytest.approx(entrance_law_density(sym, t, -x), rel=1e-12)
    for y in np.linspace(-5, 5, 21):
        if y != 0:
            assert entrance_law_density(p155, 1.0, y) >= 0


@pytest.mark.parametrize("t", [0.5, 1.0, 3.0])
def test_entrance_mass(p155, t):
    assert abs(entrance_law_mass(p155, t) / excursion_length_tail(p155, t) - 1) < 1e-4


def test_substitution_identity(p155):
    f = lambda x: np.exp(-x * x)
    assert abs(entrance_integral(p155, 1.0, f) - entrance_integral_substituted(p155, 1.0, f)) < 1e-6


def test_conditioned_unit_function(p155):
    one = lambda x: np.ones_like(x)
    value = conditioned_entrance(p155, 1.0, one)
    assert abs(value - h_weighted_entrance(p155, 1.0, one)) < 1e-4
    assert abs(value - 1) < 1e-4


def test_conditioned_odd_function_symmetric():
    p = make_params(1.6, 0.5)
    f = lambda x: np.tanh(x) * np.exp(-0.1 * x * x)
    assert abs(conditioned_entrance(p, 1.0, f)) < 1e-10
    assert abs(h_weighted_entrance(p, 1.0, f)) < 1e-10


def test_conditioned_matches_direct(p155):
    f = lambda x: np.tanh(x) * np.exp(-0.1 * x * x)
    assert abs(conditioned_entrance(p155, 1.0, f) - h_weighted_entrance(p155, 1.0, f)) < 1e-6


def test_domain_errors(p155):
    with pytest.raises(DomainError):
        ratio_Y(p155, 0.0, 1.0)
    with pytest.raises(DomainError):
        entrance_law_density(p155, 1.0, 0.0)
    with pytest.raises(DomainError):
        conditioned_entrance(p155, 0.0, np.cos)
