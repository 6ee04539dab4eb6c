"""Black-Scholes put prices under an arbitrary rate, expected put payoffs
under the physical measure, and the conditional mean of S(T)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .mathcore import norm_cdf


@dataclass(frozen=True)
class MarketParams:
    """Black-Scholes market plus the CVaR tail mass ``alpha``."""

    S0: float
    mu: float
    sigma: float
    r: float
    T: float
    alpha: float = 0.05

    def __post_init__(self):
        for name in ("S0", "mu", "sigma", "r", "T", "alpha"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise DomainError(f"{name} must be a finite number, got {value!r}")
        if self.S0 <= 0:
            raise DomainError(f"S0 must be positive, got {self.S0}")
        if self.sigma <= 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if self.T <= 0:
            raise DomainError(f"T must be positive, got {self.T}")
        if not (0.0 < self.alpha < 1.0):
            raise DomainError(f"alpha must lie in (0, 1), got {self.alpha}")

    @property
    def vol(self) -> float:
        """sigma * sqrt(T)"""
        return self.sigma * math.sqrt(self.T)


@dataclass(frozen=True)
class PutQuote:
    strike: float
    price0: float
    p_alpha: float
    expected_payoff: float


def _check_strike(K: float) -> None:
    if not (K > 0 and math.isfinite(K)):
        raise DomainError(f"strike must be positive and finite, got {K!r}")


def d_plus_minus(rate: float, m: MarketParams, K: float) -> tuple[float, float]:
    """Return ``(d_plus, d_minus)`` with the drift ``rate`` (pass ``m.r`` for
    pricing, ``m.mu`` for physical-measure quantities)."""
    _check_strike(K)
    vol = m.vol
    d_plus = (math.log(m.S0 / K) + (rate + 0.5 * m.sigma**2) * m.T) / vol
    return d_plus, d_plus - vol


def put_price(rate: float, m: MarketParams, K: float) -> float:
    d_plus, d_minus = d_plus_minus(rate, m, K)
    price = K * math.exp(-rate * m.T) * norm_cdf(-d_minus) - m.S0 * norm_cdf(-d_plus)
    # cancellation can leave a -1e-17 residue for deep out-of-the-money strikes
    return max(price, 0.0)


def expected_put_payoff(m: MarketParams, K: float) -> float:
    """E[(K - S(T))^+] under the physical drift ``mu``."""
    return math.exp(m.mu * m.T) * put_price(m.mu, m, K)


def conditional_stock_mean(m: MarketParams, q: float) -> float:
    """E[S(T) | W(T) <= q sqrt(T)]."""
    if not math.isfinite(q):
        raise DomainError(f"q must be finite, got {q!r}")
    tail = norm_cdf(q)
    if tail == 0.0:
        raise DomainError(f"conditioning event has zero probability at q={q}")
    return m.S0 * math.exp(m.mu * m.T) * norm_cdf(q - m.vol) / tail
