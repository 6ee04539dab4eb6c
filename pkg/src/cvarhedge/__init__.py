"""Conditional Value at Risk of a Black-Scholes stock position hedged with puts.

Closed-form VaR/CVaR, the linear program allocating a put budget across
strikes, the dynamic-hedging benchmark, and a Monte Carlo cross-check.
"""

__version__ = "0.1.0"

from ._accel import BACKEND
from .dynamic import (
    DynamicProblem,
    DynamicSolution,
    cost_functional,
    minimize_dynamic_cvar,
    solve_barrier,
    solve_k_star,
)
from .errors import ContractError, DomainError, InfeasibleError
from .mathcore import lognormal_quantile, norm_cdf, norm_quantile
from .mc_oracle import (
    EmpiricalRisk,
    SimConfig,
    conditional_mean_check,
    empirical_cvar,
    empirical_portfolio_gain,
    simulate_terminal,
)
from .optimizer import HedgeProblem, HedgeSolution, solve_budget, sweep_frontier
from .pricing import (
    MarketParams,
    PutQuote,
    conditional_stock_mean,
    d_plus_minus,
    expected_put_payoff,
    put_price,
)
from .riskform import (
    Portfolio,
    RiskReport,
    cvar_closed_form,
    cvar_single_strike,
    expected_gain,
    p_alpha_coefficient,
    portfolio_value0,
    quote_chain,
    risk_report,
    var_closed_form,
)
