import math

import numpy as np
import pytest

from cvarhedge.errors import DomainError
from cvarhedge.mathcore import norm_quantile
from cvarhedge.mc_oracle import (
    SimConfig,
    conditional_mean_check,
    empirical_cvar,
    empirical_portfolio_gain,
    simulate_normals,
    simulate_terminal,
    within_gate,
    z_score,
)
from cvarhedge.pricing import conditional_stock_mean
from cvarhedge.riskform import Portfolio, cvar_closed_form, portfolio_value0


def test_config_validation():
    with pytest.raises(DomainError):
        SimConfig(n_paths=0)
    with pytest.raises(DomainError):
        SimConfig(chunk=0)
    with pytest.raises(DomainError):
        SimConfig(seed=-1)
    with pytest.raises(DomainError):
        SimConfig(seed=1 << 64)


def test_terminal_moments(market, mc_config):
    s = simulate_terminal(market, mc_config)
    n = s.size
    assert abs(s.mean() - 100 * math.exp(0.1)) <= 4 * s.std(ddof=1) / math.sqrt(n)
    logs = np.log(s / market.S0)
    assert abs(logs.mean() - (market.mu - 0.5 * market.sigma**2)) <= 4 * logs.std(ddof=1) / math.sqrt(n)


def test_terminal_matches_normals(market, mc_config, mc_prices):
    s = simulate_terminal(market, mc_config)
    np.testing.assert_allclose(s, mc_prices, rtol=1e-14)


def test_determinism_across_chunks_and_threads(market):
    cfg = SimConfig(n_paths=200_003, seed=99)
    base = simulate_terminal(market, cfg)
    assert np.array_equal(base, simulate_terminal(market, cfg))
    assert np.array_equal(base, simulate_terminal(market, cfg, workers=4))
    assert np.array_equal(base, simulate_terminal(market, SimConfig(200_003, 99, chunk=777), workers=3))
    assert not np.array_equal(base, simulate_terminal(market, SimConfig(200_003, 100)))


def test_normals_look_normal():
    z = simulate_normals(SimConfig(n_paths=400_000, seed=5))
    assert abs(z.mean()) < 4 / math.sqrt(z.size)
    assert abs(z.var() - 1.0) < 4 * math.sqrt(2 / z.size)
    for p in (0.01, 0.05, 0.5, 0.95):
        frac = float(np.mean(z <= norm_quantile(p)))
        assert abs(frac - p) < 4 * math.sqrt(p * (1 - p) / z.size)


def test_empirical_single_worst_sample():
    gains = np.array([-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0])
    est = empirical_cvar(gains, 1 / gains.size)
    assert est.cvar_hat == pytest.approx(10.0, abs=1e-12)
    # upper quantile at alpha = 1/N is the second order statistic
    assert est.var_hat == pytest.approx(5.0)
    assert est.cvar_hat >= est.var_hat


def test_empirical_alpha_one_is_negative_mean():
    gains = np.random.default_rng(0).normal(3.0, 2.0, 1000)
    est = empirical_cvar(gains, 1.0)
    assert est.cvar_hat == pytest.approx(-gains.mean(), rel=1e-12)


def test_empirical_atom_correction_five_atoms():
    # atoms -4, -1, 0, 2, 5 with probabilities 0.1, 0.15, 0.25, 0.3, 0.2;
    # alpha = 0.2 splits the -1 atom. Exact CVaR by enumeration:
    # -(0.1 * -4 + 0.1 * -1) / 0.2 = 2.5
    atoms = [(-4.0, 10), (-1.0, 15), (0.0, 25), (2.0, 30), (5.0, 20)]
    gains = np.concatenate([np.full(k, v) for v, k in atoms])
    rng = np.random.default_rng(1)
    rng.shuffle(gains)
    est = empirical_cvar(gains, 0.2)
    assert est.cvar_hat == pytest.approx(2.5, abs=1e-12)
    assert est.var_hat == pytest.approx(1.0)
    # alpha that does not fall on a sample boundary: 0.125 -> 10 at -4, 2.5 at -1
    est = empirical_cvar(gains, 0.125)
    assert est.cvar_hat == pytest.approx(-(0.10 * -4 + 0.025 * -1) / 0.125, abs=1e-12)


def test_empirical_too_few_samples():
    with pytest.raises(DomainError):
        empirical_cvar(np.arange(10.0), 0.05)
    with pytest.raises(DomainError):
        empirical_cvar(np.arange(100.0), 0.0)


def test_portfolio_gain_substitution(market, strikes):
    s = np.array(strikes)
    g = empirical_portfolio_gain(market, Portfolio(4.0), s)
    np.testing.assert_allclose(g, math.exp(-market.r) * 4.0 * s - 400.0, rtol=1e-15)


def test_portfolio_gain_floor(market):
    x, K = 3.0, 105.0
    pf = Portfolio(x, (K,), (x,))
    s = np.array([50.0, 80.0, 104.0])
    g = empirical_portfolio_gain(market, pf, s)
    np.testing.assert_allclose(g, math.exp(-market.r) * x * K - portfolio_value0(market, pf), rtol=1e-14)


def test_stock_only_cvar_oracle(market, mc_prices):
    pf = Portfolio(10.0)
    est = empirical_cvar(empirical_portfolio_gain(market, pf, mc_prices), market.alpha)
    exact = cvar_closed_form(market, pf)
    assert abs(est.cvar_hat - exact) <= 3 * est.std_err
    assert abs(est.cvar_hat - 302.24) <= 3 * est.std_err + 0.005
    assert est.cvar_hat >= est.var_hat


def test_hedged_row_cvar_oracle(market, strikes, mc_prices):
    pf = Portfolio(9.0, strikes, (0, 0, 1.50, 7.50, 0))
    est = empirical_cvar(empirical_portfolio_gain(market, pf, mc_prices), market.alpha)
    assert within_gate(cvar_closed_form(market, pf), est.cvar_hat, est.std_err)
    assert abs(est.cvar_hat - 53.82) <= 0.01


def test_convergence_and_error_scaling(market, strikes):
    rng = np.random.default_rng(17)
    z = rng.uniform(0, 0.3, 5)
    pf = Portfolio(5.0, strikes, tuple(z))
    exact = cvar_closed_form(market, pf)
    errs = []
    for n in (10_000, 100_000, 1_000_000):
        s = simulate_terminal(market, SimConfig(n_paths=n, seed=123))
        est = empirical_cvar(empirical_portfolio_gain(market, pf, s), market.alpha)
        assert within_gate(exact, est.cvar_hat, est.std_err)
        errs.append(est.std_err)
    assert errs[0] > errs[1] > errs[2]
    assert errs[0] / errs[2] == pytest.approx(10.0, rel=0.2)


def test_z_score_floor():
    d = (50.0 + 1e-13) - 50.0
    assert z_score(50.0, 50.0 + d, 0.0) == pytest.approx(3 * d / (1e-9 * 50), rel=1e-9)
    assert within_gate(50.0, 50.0 + 1e-13, 0.0)
    assert not within_gate(50.0, 50.1, 0.01)


def test_conditional_mean(market, mc_config, mc_normals):
    q = norm_quantile(0.05)
    est = conditional_mean_check(market, q, mc_config, normals=mc_normals)
    assert abs(est.value - conditional_stock_mean(market, q)) <= 3 * est.std_err
    assert est.n == pytest.approx(50_000, rel=0.05)


def test_conditional_mean_unconditional(market, mc_config, mc_normals):
    est = conditional_mean_check(market, 8.0, mc_config, normals=mc_normals)
    assert abs(est.value - 100 * math.exp(0.1)) <= 3 * est.std_err
    est0 = conditional_mean_check(market, 0.0, mc_config, normals=mc_normals)
    assert abs(est0.value - conditional_stock_mean(market, 0.0)) <= 3 * est0.std_err


def test_conditional_mean_thin_tail(market):
    with pytest.raises(DomainError):
        conditional_mean_check(market, -4.0, SimConfig(n_paths=10_000))
