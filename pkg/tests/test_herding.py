import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from creditcycle import cycle_points, default_probabilities
from creditcycle.cycle import default_risk_from_values
from creditcycle.herding import (
    GAMMA_DEFAULT,
    PRIMER_HERDING,
    SINGULAR_CAP,
    HerdingParams,
    SingularityDomainError,
    herding_new_debt,
    herding_regime_quantities,
    singular_derivative_check,
    singular_term,
    singular_term_derivative,
)
from creditcycle.valuation import new_debt_option

from conftest import param_strategy

INST = HerdingParams(1, PRIMER_HERDING["s_star"], PRIMER_HERDING["gamma"])


def printed_instance(s, h=1):
    return 0.2 * s**2.4 + h * (15.43 - s) ** -2.39


def test_printed_instance_value():
    f = herding_new_debt(0.2, 2.4, INST, 15.0)
    assert f == pytest.approx(140.4, abs=0.1)
    assert f == printed_instance(15.0)


def test_singular_term_dominates_near_critical():
    s = 15.43 - 0.01
    sing = singular_term(INST, s)
    assert sing == pytest.approx(0.01**-2.39, rel=1e-12)
    assert sing > 100 * 0.2 * s**2.4


def test_no_herding_switch(points):
    h0 = HerdingParams(0, points.s_star)
    for s in (0.0, 5.0, points.s_star, 2 * points.s_star):
        assert herding_new_debt(points.K, points.beta, h0, s) == new_debt_option(points.K, points.beta, s)
    assert singular_term_derivative(h0, 1.0) == 0.0


def test_domain_errors():
    with pytest.raises(SingularityDomainError):
        herding_new_debt(0.2, 2.4, INST, 15.43)
    with pytest.raises(SingularityDomainError):
        singular_term_derivative(INST, 16.0)
    with pytest.raises(ValueError):
        HerdingParams(2, 15.43)
    with pytest.raises(ValueError):
        HerdingParams(1, 15.43, gamma=0.0)
    with pytest.raises(ValueError):
        singular_derivative_check(HerdingParams(0, 15.43), 10.0)


def test_log_space_guard_caps_value():
    s = 15.43 - 1e-14
    gap = 15.43 - s  # representable gap, not exactly 1e-14
    assert singular_term(INST, s) == pytest.approx(gap**-2.39, rel=1e-12)
    huge = HerdingParams(1, 15.43, gamma=400.0)
    assert singular_term(huge, s) == SINGULAR_CAP
    assert math.isfinite(singular_term(huge, s))


@pytest.mark.parametrize("gap, tol", [(1e-3, 1e-6), (1.0, 0.0)])
def test_derivative_ratio(gap, tol):
    assert singular_derivative_check(INST, 15.43 - gap) == pytest.approx(GAMMA_DEFAULT, abs=tol)


def test_finite_difference_at_tenth():
    s, h = 15.43 - 0.1, 1e-6
    fd = (singular_term(INST, s + h) - singular_term(INST, s - h)) / (2 * h)
    assert singular_term_derivative(INST, s) == pytest.approx(fd, rel=1e-4)


def test_regime_at_critical(primer, points):
    q = herding_regime_quantities(primer, points, points.s_star)
    assert (q.equity, q.leverage, q.default_probability) == (0.0, math.inf, 1.0)


def test_regime_without_herding(primer, points):
    q = herding_regime_quantities(primer, points, points.s_hat, herding=False)
    assert q.default_probability == pytest.approx(160.905 / 239.095, abs=1e-4)
    assert q.default_probability == pytest.approx(0.673, abs=1e-3)
    star = herding_regime_quantities(primer, points, points.s_star, herding=False)
    # distance to default at s*: survival (A - D)/A = 1/beta
    assert 1 - star.default_probability == pytest.approx(1 / points.beta, rel=1e-12)
    with pytest.raises(ValueError):
        herding_regime_quantities(primer, points, 1.1 * points.s_star)


def test_large_beta_limit():
    prev = 0.0
    for b in (2.0, 10.0, 100.0, 1e6):
        dd = default_risk_from_values(160.0, 400.0, 200.0, b).dd_default
        assert prev < dd < 1.0
        prev = dd
    assert prev == pytest.approx(1.0, abs=1e-5)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 0.999))
def test_herding_above_plain_and_increasing(frac):
    s = frac * 15.43
    s2 = s + 1e-3 * (15.43 - s)
    assert herding_new_debt(0.2, 2.4, INST, s) > printed_instance(s, h=0)
    assert herding_new_debt(0.2, 2.4, INST, s2) > herding_new_debt(0.2, 2.4, INST, s)


@settings(max_examples=200, deadline=None)
@given(param_strategy(beta_min=1.05))
def test_no_herding_default_below_one(p):
    risk = default_probabilities(p, cycle_points(p))
    assert risk.dd_default < 1.0 == risk.herding_default


def test_fd_sweep_against_analytic(points):
    h = HerdingParams(1, points.s_star)
    for s in np.linspace(0.5 * points.s_star, points.s_star - 1e-3, 200):
        gap = points.s_star - s
        step = 1e-4 * gap
        fd = (herding_new_debt(points.K, points.beta, h, s + step)
              - herding_new_debt(points.K, points.beta, h, s - step)) / (2 * step)
        exact = points.K * points.beta * s ** (points.beta - 1) + singular_term_derivative(h, s)
        assert exact == pytest.approx(fd, rel=1e-4)
