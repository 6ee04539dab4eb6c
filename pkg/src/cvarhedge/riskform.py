"""Closed-form VaR, CVaR and expected discounted gain for a long stock
position protected by long European puts.

All formulas assume ``z_i >= 0`` and ``sum(z) <= x``: under that hypothesis
the terminal gain is a non-decreasing function of S(T), so its quantiles are
the images of the stock quantiles. Outside it the expressions are wrong, and
:class:`ContractError` is raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ContractError, DomainError
from .mathcore import lognormal_quantile, norm_cdf, norm_quantile
from .pricing import (
    MarketParams,
    PutQuote,
    d_plus_minus,
    expected_put_payoff,
    put_price,
)

# slack for sum(z) <= x after floating point solves
_HYPOTHESIS_TOL = 1e-12


@dataclass(frozen=True)
class Portfolio:
    """``x`` shares plus ``z[i]`` puts struck at ``strikes[i]``."""

    x: float
    strikes: tuple[float, ...] = ()
    z: tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "strikes", tuple(float(k) for k in self.strikes))
        object.__setattr__(self, "z", tuple(float(v) for v in self.z))
        if not (math.isfinite(self.x) and self.x >= 0):
            raise DomainError(f"stock quantity must be finite and >= 0, got {self.x!r}")
        if len(self.strikes) != len(self.z):
            raise DomainError(
                f"{len(self.strikes)} strikes but {len(self.z)} put quantities"
            )
        for k in self.strikes:
            if not (k > 0 and math.isfinite(k)):
                raise DomainError(f"strike must be positive and finite, got {k!r}")
        if any(b <= a for a, b in zip(self.strikes, self.strikes[1:])):
            raise DomainError("strikes must be strictly increasing")
        for v in self.z:
            if not (math.isfinite(v) and v >= 0):
                raise DomainError(f"put quantities must be finite and >= 0, got {v!r}")

    @classmethod
    def stock_only(cls, x: float) -> "Portfolio":
        return cls(x)

    def scaled(self, factor: float) -> "Portfolio":
        return Portfolio(self.x * factor, self.strikes, tuple(v * factor for v in self.z))


@dataclass(frozen=True)
class RiskReport:
    value0: float
    var_alpha: float
    cvar_alpha: float
    expected_gain: float


def check_hypothesis(pf: Portfolio) -> None:
    total = math.fsum(pf.z)
    if total > pf.x + _HYPOTHESIS_TOL * max(1.0, pf.x):
        raise ContractError(
            f"closed forms need sum(z) <= x; got sum(z)={total:.12g} > x={pf.x:.12g}"
        )


def portfolio_value0(m: MarketParams, pf: Portfolio) -> float:
    return pf.x * m.S0 + math.fsum(
        zi * put_price(m.r, m, k) for zi, k in zip(pf.z, pf.strikes)
    )


def var_closed_form(m: MarketParams, pf: Portfolio) -> float:
    check_hypothesis(pf)
    s_q = lognormal_quantile(m, m.alpha)
    # puts evaluated at the stock quantile
    put_part = math.fsum(zi * max(k - s_q, 0.0) for zi, k in zip(pf.z, pf.strikes))
    return portfolio_value0(m, pf) - math.exp(-m.r * m.T) * (pf.x * s_q + put_part)


def p_alpha_coefficient(m: MarketParams, K: float, q_alpha: float | None = None) -> float:
    """Tail contribution of one put to the CVaR bracket.

    ``q_alpha`` is the standard normal ``alpha``-quantile; pass it when
    evaluating many strikes so the clamp uses one value throughout.
    """
    if q_alpha is None:
        q_alpha = norm_quantile(m.alpha)
    _, d_minus = d_plus_minus(m.mu, m, K)
    d_minus_a = max(d_minus, -q_alpha)
    d_plus_a = d_minus_a + m.vol
    value = K * math.exp(-m.mu * m.T) * norm_cdf(-d_minus_a) - m.S0 * norm_cdf(-d_plus_a)
    return max(value, 0.0)


def quote_put(m: MarketParams, K: float, q_alpha: float | None = None) -> PutQuote:
    return PutQuote(
        strike=float(K),
        price0=put_price(m.r, m, K),
        p_alpha=p_alpha_coefficient(m, K, q_alpha),
        expected_payoff=expected_put_payoff(m, K),
    )


def quote_chain(m: MarketParams, strikes: Sequence[float]) -> list[PutQuote]:
    q_alpha = norm_quantile(m.alpha)
    return [quote_put(m, k, q_alpha) for k in strikes]


def _cvar(m: MarketParams, pf: Portfolio, q_alpha: float) -> float:
    stock_tail = pf.x * m.S0 * norm_cdf(q_alpha - m.vol)
    put_tail = math.fsum(
        zi * p_alpha_coefficient(m, k, q_alpha) for zi, k in zip(pf.z, pf.strikes)
    )
    scale = math.exp((m.mu - m.r) * m.T) / m.alpha
    return portfolio_value0(m, pf) - scale * (stock_tail + put_tail)


def cvar_closed_form(m: MarketParams, pf: Portfolio) -> float:
    check_hypothesis(pf)
    return _cvar(m, pf, norm_quantile(m.alpha))


def cvar_single_strike(m: MarketParams, x: float, z: float, K: float) -> float:
    """CVaR of ``x`` shares plus ``z`` puts at one strike, ``0 <= z <= x``."""
    if not (0.0 <= z <= x):
        raise ContractError(f"single-strike CVaR needs 0 <= z <= x, got z={z}, x={x}")
    q_alpha = norm_quantile(m.alpha)
    value0 = x * m.S0 + z * put_price(m.r, m, K)
    bracket = x * m.S0 * norm_cdf(q_alpha - m.vol) + z * p_alpha_coefficient(m, K, q_alpha)
    return value0 - math.exp((m.mu - m.r) * m.T) / m.alpha * bracket


def expected_gain(m: MarketParams, pf: Portfolio) -> float:
    payoff = math.fsum(
        zi * expected_put_payoff(m, k) for zi, k in zip(pf.z, pf.strikes)
    )
    terminal = pf.x * m.S0 * math.exp(m.mu * m.T) + payoff
    return math.exp(-m.r * m.T) * terminal - portfolio_value0(m, pf)


def risk_report(m: MarketParams, pf: Portfolio) -> RiskReport:
    check_hypothesis(pf)
    return RiskReport(
        value0=portfolio_value0(m, pf),
        var_alpha=var_closed_form(m, pf),
        cvar_alpha=_cvar(m, pf, norm_quantile(m.alpha)),
        expected_gain=expected_gain(m, pf),
    )
