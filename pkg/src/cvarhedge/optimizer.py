"""CVaR-optimal allocation of a put budget across strikes.

With ``x`` shares fixed, minimising CVaR is the linear program

    maximise   z . P_alpha
    subject to z . P(0) = c,  sum(z) <= x,  z >= 0.

Dividing by ``x`` turns feasible allocations into convex combinations of the
points ``(P(0)_i, P_alpha_i)`` and the origin (the unused slack), so the
optimum is the upper concave envelope of those points evaluated at ``c / x``.
The envelope segment containing ``c / x`` gives the optimal basis directly:
at most two strikes, or one strike plus slack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, InfeasibleError
from .pricing import MarketParams
from .riskform import Portfolio, cvar_closed_form, expected_gain, quote_chain

# relative slack on c / x when the budget sits exactly on the max spend
_EDGE_TOL = 1e-12


@dataclass(frozen=True)
class HedgeProblem:
    market: MarketParams
    strikes: tuple[float, ...]
    V0: float
    c: float

    def __post_init__(self):
        object.__setattr__(self, "strikes", tuple(float(k) for k in self.strikes))
        if not self.strikes:
            raise DomainError("strike list is empty")
        if any(b <= a for a, b in zip(self.strikes, self.strikes[1:])):
            raise DomainError("strikes must be strictly increasing")
        if not (math.isfinite(self.V0) and math.isfinite(self.c)):
            raise DomainError("V0 and c must be finite")
        if not (0.0 <= self.c <= self.V0):
            raise DomainError(f"budget must satisfy 0 <= c <= V0, got c={self.c}, V0={self.V0}")

    @property
    def x(self) -> float:
        return (self.V0 - self.c) / self.market.S0


@dataclass(frozen=True)
class HedgeSolution:
    c: float
    x: float
    z: tuple[float, ...]
    cvar: float
    expected_gain: float
    active_strikes: tuple[int, ...]

    def portfolio(self, strikes: Sequence[float]) -> Portfolio:
        return Portfolio(self.x, tuple(strikes), self.z)


@dataclass(frozen=True)
class FrontierRow:
    c: float
    x: float
    solution: HedgeSolution | None
    error: str | None = None

    @property
    def feasible(self) -> bool:
        return self.solution is not None


def _upper_envelope(cost: np.ndarray, value: np.ndarray) -> list[int]:
    """Indices of the upper concave hull through the origin (index -1),
    left to right, collinear interior points dropped."""
    order = sorted(range(len(cost)), key=lambda i: (cost[i], -value[i], i))
    pts = {-1: (0.0, 0.0)}
    hull = [-1]
    for i in order:
        px, py = cost[i], value[i]
        pts[i] = (px, py)
        lx, ly = pts[hull[-1]]
        if px == lx:
            # same spend: only the better payoff can be on the envelope
            if py <= ly:
                continue
            hull.pop()
        while len(hull) >= 2:
            ax, ay = pts[hull[-2]]
            bx, by = pts[hull[-1]]
            if (bx - ax) * (py - ay) - (by - ay) * (px - ax) >= 0.0:
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def solve_lp(price0: Sequence[float], p_alpha: Sequence[float], x: float, c: float):
    """Solve the allocation LP for raw coefficient vectors.

    Returns ``(z, objective)`` where ``z`` is a numpy array.
    """
    cost = np.asarray(price0, dtype=float)
    value = np.asarray(p_alpha, dtype=float)
    n = cost.size
    if n == 0:
        raise DomainError("strike list is empty")
    if cost.shape != value.shape:
        raise DomainError("price and coefficient vectors differ in length")
    if np.any(cost < 0) or np.any(value < 0):
        raise DomainError("put prices and coefficients must be non-negative")
    z = np.zeros(n)
    if c == 0.0:
        return z, 0.0
    if c < 0 or x < 0:
        raise DomainError(f"need c >= 0 and x >= 0, got c={c}, x={x}")
    max_spend = x * float(cost.max())
    if x == 0.0 or c > max_spend * (1.0 + _EDGE_TOL):
        raise InfeasibleError(
            f"budget {c:.6g} exceeds the maximum spend {max_spend:.6g} with sum(z) <= x",
            max_budget=max_spend,
        )

    t = min(c / x, float(cost.max()))
    hull = _upper_envelope(cost, value)
    coord = [0.0 if h < 0 else cost[h] for h in hull]
    for j in range(1, len(hull)):
        if coord[j] >= t:
            break
    left, right = hull[j - 1], hull[j]
    if coord[j] == t:
        z[right] = c / cost[right]
    else:
        # basis {left, right}: z_l + z_r = x (or slack when left is the origin)
        if left < 0:
            z[right] = c / cost[right]
        else:
            z[right] = (c - cost[left] * x) / (cost[right] - cost[left])
            z[left] = x - z[right]
    np.clip(z, 0.0, None, out=z)
    return z, float(z @ value)


def max_budget(p: HedgeProblem) -> float:
    quotes = quote_chain(p.market, p.strikes)
    return p.x * max(q.price0 for q in quotes)


def solve_budget(p: HedgeProblem) -> HedgeSolution:
    """CVaR-minimising put allocation for budget ``p.c``."""
    m = p.market
    quotes = quote_chain(m, p.strikes)
    z, _ = solve_lp([q.price0 for q in quotes], [q.p_alpha for q in quotes], p.x, p.c)
    pf = Portfolio(p.x, p.strikes, tuple(z))
    return HedgeSolution(
        c=p.c,
        x=p.x,
        z=pf.z,
        cvar=cvar_closed_form(m, pf),
        expected_gain=expected_gain(m, pf),
        active_strikes=tuple(int(i) for i in np.flatnonzero(z > 0)),
    )


def sweep_frontier(
    market: MarketParams,
    strikes: Sequence[float],
    V0: float,
    c_grid: Sequence[float],
) -> list[FrontierRow]:
    """One row per budget; infeasible budgets are kept with ``error`` set."""
    if any(b < a for a, b in zip(c_grid, c_grid[1:])):
        raise DomainError("budget grid must be sorted ascending")
    rows = []
    for c in c_grid:
        c = float(c)
        x = (V0 - c) / market.S0
        try:
            sol = solve_budget(HedgeProblem(market, tuple(strikes), V0, c))
        except InfeasibleError as exc:
            rows.append(FrontierRow(c, x, None, str(exc)))
        except DomainError as exc:
            if not strikes:
                raise
            rows.append(FrontierRow(c, x, None, str(exc)))
        else:
            rows.append(FrontierRow(c, x, sol))
    return rows
