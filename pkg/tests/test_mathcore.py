import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cvarhedge.errors import DomainError
from cvarhedge.mathcore import lognormal_quantile, norm_cdf, norm_quantile
from cvarhedge.pricing import MarketParams

from oracles import bisect_quantile, mp_norm_cdf

# mpmath at 40 digits
CDF_M16449 = 0.04999521746834630
CDF_P01 = 0.5398278372770290
Q05 = -1.6448536269514727
LOGNORMAL_Q05 = 77.96027956182098


def test_cdf_at_zero():
    assert norm_cdf(0.0) == 0.5


@pytest.mark.parametrize("x, expected", [(-1.6449, CDF_M16449), (0.1, CDF_P01)])
def test_cdf_reference_values(x, expected):
    assert abs(norm_cdf(x) - expected) <= 1e-12


@pytest.mark.parametrize("x", np.linspace(-9, 9, 73))
def test_cdf_against_mpmath(x):
    assert abs(norm_cdf(x) - mp_norm_cdf(x)) <= 1e-12


@given(st.floats(-30, 30))
def test_cdf_symmetry(x):
    assert abs(norm_cdf(-x) - (1.0 - norm_cdf(x))) <= 1e-14


def test_cdf_nondecreasing():
    xs = np.linspace(-10, 10, 5001)
    vals = [norm_cdf(v) for v in xs]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
def test_cdf_rejects_non_finite(bad):
    with pytest.raises(DomainError):
        norm_cdf(bad)


def test_quantile_median():
    assert norm_quantile(0.5) == 0.0


def test_quantile_five_percent():
    assert abs(Q05 - bisect_quantile(0.05)) < 1e-14
    assert abs(norm_quantile(0.05) - Q05) <= 1e-12
    assert abs(norm_quantile(0.95) + Q05) <= 1e-12


@pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5, math.nan])
def test_quantile_domain(p):
    with pytest.raises(DomainError):
        norm_quantile(p)


def test_quantile_round_trip_grid():
    for p in np.linspace(0.001, 0.999, 999):
        assert abs(norm_cdf(norm_quantile(p)) - p) <= 1e-10


@given(st.floats(-8, 5))
def test_cdf_quantile_inverse(x):
    assert abs(norm_quantile(norm_cdf(x)) - x) <= 1e-8


@pytest.mark.parametrize("x", np.linspace(-8, 8, 65))
def test_quantile_exact_on_rounded_cdf(x):
    # above x ~ 5 the double cdf(x) no longer pins x down to 1e-8; compare
    # with the exact inverse of the same double instead
    p = norm_cdf(x)
    if p < 1.0:
        assert abs(norm_quantile(p) - bisect_quantile(p)) <= 1e-8


@pytest.mark.parametrize("p", [1e-12, 1e-6, 0.02, 0.3, 0.7, 0.98, 1 - 1e-9])
def test_quantile_against_bisection(p):
    assert abs(norm_quantile(p) - bisect_quantile(p)) <= 1e-9


def test_lognormal_median(market):
    expected = market.S0 * math.exp((market.mu - 0.5 * market.sigma**2) * market.T)
    assert lognormal_quantile(market, 0.5) == pytest.approx(expected, rel=1e-15)


def test_lognormal_five_percent(market):
    assert lognormal_quantile(market, 0.05) == pytest.approx(LOGNORMAL_Q05, abs=1e-10)
    assert round(lognormal_quantile(market, 0.05), 2) == 77.96


def test_lognormal_small_sigma_limit():
    m = MarketParams(100.0, 0.1, 1e-10, 0.03, 1.0)
    for p in (0.01, 0.5, 0.99):
        assert lognormal_quantile(m, p) == pytest.approx(100.0 * math.exp(0.1), rel=1e-8)


def test_lognormal_strictly_increasing(market):
    grid = np.linspace(0.0005, 0.9995, 1000)
    vals = [lognormal_quantile(market, p) for p in grid]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_lognormal_empirical_fraction(market, mc_prices):
    n = mc_prices.size
    for p in (0.01, 0.05, 0.5, 0.9):
        frac = float(np.mean(mc_prices < lognormal_quantile(market, p)))
        assert abs(frac - p) <= 3 * math.sqrt(p * (1 - p) / n)
