import math

import pytest
from hypothesis import strategies as st

from stablehit.params import make_params

# acceptance results collected for the end-of-run summary
ACCEPTANCE_LINES = []


def admissible(draw_alpha, draw_u):
    """Map (alpha, u) in (1,2) x (0,1) onto an admissible (alpha, rho)."""
    lo, hi = 1.0 - 1.0 / draw_alpha, 1.0 / draw_alpha
    return make_params(draw_alpha, lo + (hi - lo) * draw_u)


alphas = st.floats(min_value=1.05, max_value=1.95)
unit_interior = st.floats(min_value=0.02, max_value=0.98)
params_strategy = st.builds(admissible, alphas, unit_interior)


@pytest.fixture
def p155():
    return make_params(1.5, 0.55)


@pytest.fixture
def p_sqrt2():
    return make_params(math.sqrt(2), 0.55)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
