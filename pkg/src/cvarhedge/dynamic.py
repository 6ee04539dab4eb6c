"""Optimal CVaR attainable by a continuously rebalanced hedge.

The benchmark hedges ``x`` shares with a budget ``c`` spent on a
self-financing strategy replicating ``(K - S(T))^+ 1{S(T) > b(K)}``. Every
ingredient has a closed form in Black-Scholes put prices, so the only
numerics are two monotone root finds and a one-dimensional minimisation
over ``K``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InfeasibleError
from .mathcore import lognormal_quantile, norm_cdf
from .pricing import MarketParams, d_plus_minus, put_price

SCAN_POINTS = 512
K_TOL = 1e-6
_ROOT_ITERS = 200
# the barrier constraint is flat near b = 0; residuals below this are rounding
_FLAT_TOL = 1e-12


@dataclass(frozen=True)
class DynamicProblem:
    market: MarketParams
    V0: float
    c: float

    def __post_init__(self):
        if not (math.isfinite(self.V0) and math.isfinite(self.c)):
            raise DomainError("V0 and c must be finite")
        if self.c <= 0:
            raise DomainError(f"dynamic hedging needs a positive budget, got c={self.c}")
        if self.x <= 0:
            raise DomainError(f"budget c={self.c} leaves no stock (V0={self.V0})")

    @property
    def x(self) -> float:
        return (self.V0 - self.c) / self.market.S0


@dataclass(frozen=True)
class DynamicSolution:
    K_star: float
    K_opt: float
    b_opt: float
    cvar: float


class MinimizationError(RuntimeError):
    def __init__(self, message, grid=None, values=None):
        super().__init__(message)
        self.grid = grid
        self.values = values


def _bisect(f, lo: float, hi: float, xtol: float) -> float:
    """Root of a decreasing ``f`` with ``f(lo) >= 0 >= f(hi)``."""
    for _ in range(_ROOT_ITERS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if f(mid) >= 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= xtol:
            break
    return 0.5 * (lo + hi)


def solve_k_star(p: DynamicProblem) -> float:
    """Strike at which ``x`` plain puts cost exactly ``c``."""
    m = p.market
    target = p.c / p.x
    lo, hi = 1e-8 * m.S0, 2.0 * m.S0
    while put_price(m.r, m, lo) > target:
        lo *= 0.5
        if lo < 1e-300:
            raise InfeasibleError(f"no strike prices a put below {target:.6g}")
    while put_price(m.r, m, hi) < target:
        hi *= 2.0
        if not math.isfinite(hi) or hi > 1e300:
            raise InfeasibleError(f"no finite strike prices a put at {target:.6g}")
    return _bisect(lambda k: target - put_price(m.r, m, k), lo, hi, 1e-14 * hi)


def retained_value(m: MarketParams, K: float, b: float) -> float:
    """Time-0 value of one ``(K - S(T))^+ 1{S(T) > b}`` claim."""
    full = put_price(m.r, m, K)
    if b <= 0.0:
        return full
    _, d_minus_b = d_plus_minus(m.r, m, b)
    cut = put_price(m.r, m, b) + (K - b) * math.exp(-m.r * m.T) * norm_cdf(-d_minus_b)
    return full - cut


def barrier_residual(p: DynamicProblem, K: float, b: float) -> float:
    return p.x * retained_value(p.market, K, b) - p.c


def solve_barrier(p: DynamicProblem, K: float, k_star: float | None = None) -> float:
    """Barrier ``b`` in ``[0, K)`` at which the truncated put claim costs ``c``."""
    if k_star is None:
        k_star = solve_k_star(p)
    if K < k_star:
        raise DomainError(f"K={K} lies below K*={k_star}; no barrier b >= 0 exists")
    f = lambda b: barrier_residual(p, K, b)  # noqa: E731
    if f(0.0) <= _FLAT_TOL * max(1.0, p.c):
        return 0.0
    return _bisect(f, 0.0, K, 1e-13 * K)


def tail_expectation(m: MarketParams, K: float, b: float) -> float:
    """E[(K - S(T))^+ 1{S(T) <= b}] under the physical measure."""
    if b <= 0.0:
        return 0.0
    _, d_minus_b = d_plus_minus(m.mu, m, b)
    return math.exp(m.mu * m.T) * put_price(m.mu, m, b) + (K - b) * norm_cdf(-d_minus_b)


def cost_functional(p: DynamicProblem, K: float, k_star: float | None = None) -> float:
    if not (K > 0 and math.isfinite(K)):
        raise DomainError(f"K must be positive and finite, got {K!r}")
    m = p.market
    if k_star is None:
        k_star = solve_k_star(p)
    disc = p.x * math.exp(-m.r * m.T)
    base = p.V0 - disc * K
    if K <= k_star:
        return base
    b = solve_barrier(p, K, k_star)
    return base + disc / m.alpha * tail_expectation(m, K, b)


def upper_strike(m: MarketParams) -> float:
    return 2.0 * lognormal_quantile(m, 0.9999)


def _golden(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    if fc <= fd:
        return c, fc
    return d, fd


def minimize_dynamic_cvar(p: DynamicProblem, scan_points: int = SCAN_POINTS) -> DynamicSolution:
    """Minimise the cost functional over ``[K*, K_hi]``.

    Below ``K*`` the functional is affine and decreasing, so the search
    starts there. A log-spaced scan picks the bracket, golden section
    refines it to ``K_TOL``.
    """
    m = p.market
    k_star = solve_k_star(p)
    k_hi = max(upper_strike(m), 2.0 * k_star)
    grid = np.geomspace(k_star, k_hi, scan_points)
    values = np.array([cost_functional(p, k, k_star) for k in grid])
    if not np.all(np.isfinite(values)):
        raise MinimizationError("cost functional is not finite on the scan grid", grid, values)
    i = int(np.argmin(values))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, len(grid) - 1)]
    k_opt, v_opt = _golden(lambda k: cost_functional(p, k, k_star), lo, hi, K_TOL)
    if values[i] < v_opt:
        k_opt, v_opt = float(grid[i]), float(values[i])
    return DynamicSolution(
        K_star=float(k_star),
        K_opt=float(k_opt),
        b_opt=float(solve_barrier(p, k_opt, k_star)),
        cvar=float(v_opt),
    )
