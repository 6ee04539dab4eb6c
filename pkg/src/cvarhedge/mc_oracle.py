"""Monte Carlo cross-check of the closed forms.

Terminal prices come from a counter-based stream: normal number ``i`` is a
pure function of ``(seed, i)``, so results do not depend on how the work is
split into chunks or how many threads run them.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._accel import kernels
from .errors import DomainError
from .mathcore import norm_cdf
from .pricing import MarketParams
from .riskform import Portfolio, portfolio_value0

_SEED_MASK = (1 << 64) - 1
MIN_TAIL_SAMPLES = 1000
GATE_SIGMAS = 3.0
# fully hedged tails are constant, so the sampling error vanishes and only
# rounding separates the two routes
ROUNDING_FLOOR = 1e-9


@dataclass(frozen=True)
class SimConfig:
    n_paths: int = 1_000_000
    seed: int = 20240101
    chunk: int = 1 << 16

    def __post_init__(self):
        if int(self.n_paths) != self.n_paths or self.n_paths < 1:
            raise DomainError(f"n_paths must be a positive integer, got {self.n_paths!r}")
        if int(self.chunk) != self.chunk or self.chunk < 1:
            raise DomainError(f"chunk must be a positive integer, got {self.chunk!r}")
        if not (0 <= self.seed <= _SEED_MASK):
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")

    @property
    def key(self) -> int:
        # decorrelate nearby seeds before they offset the counter
        z = (self.seed + 0x9E3779B97F4A7C15) & _SEED_MASK
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _SEED_MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _SEED_MASK
        return z ^ (z >> 31)

    def chunks(self):
        for start in range(0, self.n_paths, self.chunk):
            yield start, min(self.chunk, self.n_paths - start)


@dataclass(frozen=True)
class EmpiricalRisk:
    var_hat: float
    cvar_hat: float
    std_err: float
    n: int


def z_score(exact: float, estimate: float, std_err: float) -> float:
    """Standardised MC error, with the rounding floor folded into the scale."""
    scale = max(std_err, ROUNDING_FLOOR * max(1.0, abs(exact)) / GATE_SIGMAS)
    return (estimate - exact) / scale


def within_gate(exact: float, estimate: float, std_err: float, sigmas: float = GATE_SIGMAS) -> bool:
    return abs(z_score(exact, estimate, std_err)) <= sigmas


class Estimate(NamedTuple):
    value: float
    std_err: float
    n: int


def _run_chunks(cfg: SimConfig, fill, workers: int | None) -> np.ndarray:
    out = np.empty(cfg.n_paths, dtype=np.float64)
    key = cfg.key
    jobs = [(start, out[start:start + size]) for start, size in cfg.chunks()]
    if workers is None or workers <= 1:
        for start, view in jobs:
            fill(key, start, view)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda job: fill(key, job[0], job[1]), jobs))
    return out


def simulate_normals(cfg: SimConfig, workers: int | None = None) -> np.ndarray:
    return _run_chunks(cfg, kernels.fill_normals, workers)


def simulate_terminal(m: MarketParams, cfg: SimConfig, workers: int | None = None) -> np.ndarray:
    """Samples of S(T) = S0 exp((mu - sigma^2/2) T + sigma sqrt(T) Z)."""
    drift = (m.mu - 0.5 * m.sigma**2) * m.T

    def fill(key, start, view):
        kernels.gbm_terminal(key, start, m.S0, drift, m.vol, view)

    return _run_chunks(cfg, fill, workers)


def terminal_from_normals(m: MarketParams, z: np.ndarray) -> np.ndarray:
    return m.S0 * np.exp((m.mu - 0.5 * m.sigma**2) * m.T + m.vol * z)


def _tail_size(alpha: float, n: int) -> int:
    # alpha * n can land one ulp under an integer
    return int(math.floor(alpha * n + 1e-9))


def empirical_cvar(gains, alpha: float) -> EmpiricalRisk:
    """VaR and CVaR of the empirical distribution of ``gains``.

    With ``k = floor(alpha * N)`` order statistics strictly in the tail, the
    ``(k+1)``-th one is the upper ``alpha``-quantile and carries the
    remaining ``alpha - k/N`` of tail mass.

    The standard error is the asymptotic one for a tail average,
    ``sqrt((s_tail^2 + (1 - alpha) (q - m_tail)^2) / (alpha N))``; the
    second term accounts for the estimated quantile moving the cut.
    """
    g = np.asarray(gains, dtype=np.float64).ravel()
    n = g.size
    if not (0.0 < alpha <= 1.0):
        raise DomainError(f"alpha must lie in (0, 1], got {alpha!r}")
    if n < math.ceil(1.0 / alpha - 1e-9):
        raise DomainError(f"{n} samples are too few for alpha={alpha}; need {math.ceil(1 / alpha)}")
    k = _tail_size(alpha, n)
    if k >= n:
        tail = np.sort(g)
        q = float(tail[-1])
        atom = 0.0
    else:
        part = np.partition(g, k)
        tail = part[:k]
        q = float(part[k])
        atom = alpha - k / n
    tail_sum = math.fsum(tail) if k < 4096 else float(np.sum(tail, dtype=np.float64))
    cvar = -(tail_sum / n + q * atom) / alpha
    if k >= 2:
        tail_mean = tail_sum / k
        spread = float(np.var(tail, ddof=1)) + (1.0 - alpha) * (q - tail_mean) ** 2
        std_err = math.sqrt(spread / (alpha * n))
    else:
        std_err = math.inf
    return EmpiricalRisk(var_hat=-q, cvar_hat=cvar, std_err=std_err, n=n)


def empirical_portfolio_gain(m: MarketParams, pf: Portfolio, samples) -> np.ndarray:
    """Discounted gain ``e^{-rT} V(T) - V(0)`` for each terminal price."""
    prices = np.ascontiguousarray(samples, dtype=np.float64)
    out = np.empty_like(prices)
    kernels.portfolio_gains(
        prices,
        np.asarray(pf.strikes, dtype=np.float64),
        np.asarray(pf.z, dtype=np.float64),
        float(pf.x),
        math.exp(-m.r * m.T),
        portfolio_value0(m, pf),
        out,
    )
    return out


def conditional_mean_check(
    m: MarketParams, q: float, cfg: SimConfig, normals: np.ndarray | None = None
) -> Estimate:
    """Average of simulated S(T) over paths with Z <= q."""
    if not math.isfinite(q):
        raise DomainError(f"q must be finite, got {q!r}")
    expected = norm_cdf(q) * cfg.n_paths
    if expected < MIN_TAIL_SAMPLES:
        raise DomainError(
            f"N(q) * n_paths = {expected:.1f} < {MIN_TAIL_SAMPLES}; the tail is too thin"
        )
    z = simulate_normals(cfg) if normals is None else normals
    mask = z <= q
    count = int(mask.sum())
    s = terminal_from_normals(m, z[mask])
    return Estimate(float(s.mean()), float(s.std(ddof=1) / math.sqrt(count)), count)
