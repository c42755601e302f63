import math

import numba
import numpy as np
import pytest
from scipy import stats

from creditcycle.rng import normals
from creditcycle.simulation import (
    SimConfig,
    SimPath,
    SimulationError,
    analytic_mean_passage,
    analytic_passage_probability,
    cycle_passage_stats,
    expected_money,
    first_passage,
    hedged_portfolio_experiment,
    passage_times,
    sde_drift_residual,
    simulate_money_path,
    terminal_statistics,
    terminal_values,
)


def test_rng_is_standard_normal():
    z = normals(7, 3, 1, 0, 200_000)
    assert stats.kstest(z, "norm").pvalue > 1e-3
    assert abs(z.mean()) < 5 / math.sqrt(z.size)


def test_rng_streams_differ_and_repeat():
    a = normals(1, 0, 1, 0, 1000)
    assert np.array_equal(a, normals(1, 0, 1, 0, 1000))
    assert abs(np.corrcoef(a, normals(1, 1, 1, 0, 1000))[0, 1]) < 0.15
    assert abs(np.corrcoef(a, normals(2, 0, 1, 0, 1000))[0, 1]) < 0.15
    # counter offsets address the same stream
    assert np.array_equal(a[500:], normals(1, 0, 1, 500, 500))


def test_config_validation():
    for bad in (dict(dt=0.0), dict(horizon=0.0), dict(n_paths=0), dict(scheme="milstein"), dict(seed=-1)):
        with pytest.raises(ValueError):
            SimConfig(**bad)
    assert SimConfig(horizon=1.0, dt=1e-3).n_steps == 1000


def test_zero_volatility_is_deterministic(primer):
    p = primer.replace(sigma=0.0)
    cfg = SimConfig(horizon=10.0, dt=1e-3, n_paths=4)
    path = simulate_money_path(p, cfg, 0)
    assert np.allclose(path.s, p.s0 * np.exp(p.a * path.times), rtol=1e-12)
    euler = simulate_money_path(p, SimConfig(horizon=10.0, dt=1e-3, scheme="euler"), 0)
    assert np.allclose(euler.s, p.s0 * (1 + p.a * 1e-3) ** np.arange(10_001), rtol=1e-12)
    t = passage_times(p, cfg, [12.0])
    assert np.allclose(t[:, 0], math.log(12.0 / p.s0) / p.a, rtol=1e-9)


@pytest.mark.parametrize("scheme", ["exact", "euler"])
def test_same_seed_same_path(primer, scheme):
    cfg = SimConfig(horizon=5.0, dt=1e-3, n_paths=1, seed=11, scheme=scheme)
    a = simulate_money_path(primer, cfg, 3)
    b = simulate_money_path(primer, cfg, 3)
    assert np.array_equal(a.s, b.s)
    c = simulate_money_path(primer, SimConfig(horizon=5.0, dt=1e-3, seed=12, scheme=scheme), 3)
    assert not np.array_equal(a.s, c.s)


def test_thread_count_does_not_change_results(primer):
    cfg = SimConfig(horizon=100.0, dt=1e-3, n_paths=2000, seed=5)
    levels = [12.0, 15.4]
    n = numba.get_num_threads()
    try:
        numba.set_num_threads(1)
        one = passage_times(primer, cfg, levels)
        t_one = terminal_values(primer, cfg)
    finally:
        numba.set_num_threads(n)
    many = passage_times(primer, cfg, levels)
    assert np.array_equal(one, many, equal_nan=True)
    assert np.array_equal(t_one, terminal_values(primer, cfg))


def test_path_terminal_matches_bulk_terminal(primer):
    cfg = SimConfig(horizon=3.0, dt=1e-3, n_paths=5, seed=2)
    bulk = terminal_values(primer, cfg)
    for i in range(5):
        assert simulate_money_path(primer, cfg, i).s[-1] == pytest.approx(bulk[i], rel=1e-12)


def test_pruned_search_matches_full_path(primer):
    # passage from the dyadic search equals the scan of the materialised path
    cfg = SimConfig(horizon=60.0, dt=1e-3, n_paths=40, seed=9)
    levels = np.array([10.0, 12.0, 15.4])
    bulk = passage_times(primer, cfg, levels)
    for i in range(cfg.n_paths):
        path = simulate_money_path(primer, cfg, i)
        for j, lv in enumerate(levels):
            t = first_passage(path, lv)
            if t is None:
                assert math.isnan(bulk[i, j])
            else:
                assert bulk[i, j] == pytest.approx(t, rel=1e-9, abs=1e-12)


def test_first_passage_examples():
    path = SimPath(np.array([0.0, 1.0, 2.0, 3.0]), np.array([1.0, 2.0, 8.0, 4.0]))
    assert first_passage(path, 1.0) == 0.0
    assert first_passage(path, 2.0) == pytest.approx(1.0)
    # log-space interpolation between 2 and 8: 4 sits halfway
    assert first_passage(path, 4.0) == pytest.approx(1.5)
    assert first_passage(path, 9.0) is None
    with pytest.raises(ValueError):
        first_passage(path, 0.0)


def test_levels_below_start_hit_at_zero(primer):
    t = passage_times(primer, SimConfig(horizon=1.0, n_paths=3), [5.0, 9.6])
    assert np.all(t == 0.0)
    with pytest.raises(ValueError):
        passage_times(primer, SimConfig(horizon=1.0, n_paths=3), [-1.0])


def test_passage_columns_sorted(primer):
    cfg = SimConfig(horizon=50.0, n_paths=500, seed=3)
    a = passage_times(primer, cfg, [15.4, 10.0])
    b = passage_times(primer, cfg, [10.0, 15.4])
    assert np.array_equal(a, b, equal_nan=True)


def test_terminal_moments(primer):
    cfg = SimConfig(horizon=10.0, dt=1e-3, n_paths=50_000, seed=1)
    st = terminal_statistics(primer, cfg)
    assert abs(st.mean - st.expected) <= 3 * st.std_error
    assert abs(st.log_var - primer.sigma**2 * 10.0) <= 3 * st.log_var_std_error
    assert abs(st.log_mean - primer.log_drift * 10.0) <= 3 * primer.sigma * math.sqrt(10.0 / cfg.n_paths)
    assert abs(st.log_skew) < 0.05 and abs(st.log_excess_kurtosis) < 0.1


def test_euler_close_to_exact(primer):
    cfg = SimConfig(horizon=5.0, dt=1e-3, n_paths=20_000, seed=4, scheme="euler")
    st = terminal_statistics(primer, cfg)
    assert abs(st.mean - st.expected) <= 3 * st.std_error


def test_euler_failure_raises(primer):
    p = primer.replace(sigma=3.0)
    cfg = SimConfig(horizon=20.0, dt=1.0, n_paths=50, scheme="euler")
    with pytest.raises(SimulationError):
        terminal_values(p, cfg)
    with pytest.raises(SimulationError):
        simulate_money_path(p, cfg, 0)


def test_hit_probability_zero_drift(primer):
    # a = 0: the log drift is negative and hitting is uncertain
    p = primer.replace(a=0.0)
    level, horizon = 12.0, 30.0
    cfg = SimConfig(horizon=horizon, dt=1e-3, n_paths=20_000, seed=8)
    hit = np.mean(~np.isnan(passage_times(p, cfg, [level])[:, 0]))
    exact = analytic_passage_probability(p, level, horizon)
    se = math.sqrt(exact * (1 - exact) / cfg.n_paths)
    # discrete monitoring only lowers the hit rate
    assert exact - 4 * se - 0.01 <= hit <= exact + 4 * se


def test_analytic_passage_helpers(primer):
    assert analytic_mean_passage(primer, 5.0) == 0.0
    assert analytic_mean_passage(primer.replace(a=0.0), 12.0) == math.inf
    assert analytic_passage_probability(primer, 5.0, 1.0) == 1.0
    # the infinite-horizon limit for positive drift is certainty
    assert analytic_passage_probability(primer, 15.0, 1e6) == pytest.approx(1.0)
    # negative drift: (L/s0)^(2 nu / sigma^2)
    p = primer.replace(a=0.0)
    nu = p.log_drift
    assert analytic_passage_probability(p, 12.0, 1e7) == pytest.approx((12.0 / 9.6) ** (2 * nu / p.sigma**2), rel=1e-6)


def test_cycle_passage_stats(primer, points):
    cfg = SimConfig(horizon=300.0, dt=1e-3, n_paths=3000, seed=6)
    ps = cycle_passage_stats(primer, points, cfg)
    assert [lv.name for lv in ps.levels] == ["s_star", "s_tilde"]
    assert ps.ordering_violations == 0
    star = ps.by_name("s_star")
    assert star.analytic_mean_time == pytest.approx(math.log(points.s_star / 9.6) / 0.01375, rel=1e-12)
    assert star.q05_time < star.median_time < star.q95_time
    with pytest.raises(KeyError):
        ps.by_name("s_hat")


def test_expected_money(primer):
    assert expected_money(primer, 0.0) == primer.s0
    assert expected_money(primer, 10.0) == pytest.approx(9.6 * math.exp(0.25))


def test_drift_residual(primer):
    s = np.linspace(0.0, 40.0, 1001)
    assert np.max(np.abs(sde_drift_residual(primer, s))) <= 1e-12 * 40.0


def test_hedging_slopes(primer, points):
    cfg = SimConfig(n_paths=100_000, seed=0)
    res = hedged_portfolio_experiment(primer, points.K, points.beta, points.s_hat, cfg)
    assert res.slope_unhedged == pytest.approx(1.0, abs=0.2)
    assert res.slope_hedged == pytest.approx(2.0, abs=0.2)
    assert all(r < 0.05 for r in res.variance_ratio)


def test_hedging_without_volatility(primer, points):
    res = hedged_portfolio_experiment(primer.replace(sigma=0.0), points.K, points.beta, points.s_hat,
                                      SimConfig(n_paths=1000))
    assert res.var_unhedged == [0.0, 0.0, 0.0]
    assert res.var_hedged == [0.0, 0.0, 0.0]
    assert math.isnan(res.slope_hedged)
