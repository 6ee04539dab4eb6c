"""Standard normal CDF / quantile and lognormal quantiles."""

from __future__ import annotations

import math
from statistics import NormalDist

from .errors import DomainError

_SQRT2 = math.sqrt(2.0)
_INV_SQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)
_STD = NormalDist()


def norm_pdf(x: float) -> float:
    return _INV_SQRT2PI * math.exp(-0.5 * x * x)


def norm_cdf(x: float) -> float:
    """Standard normal CDF, computed from ``erfc`` so both tails keep full
    relative precision."""
    if not math.isfinite(x):
        raise DomainError(f"norm_cdf needs a finite argument, got {x!r}")
    return 0.5 * math.erfc(-x / _SQRT2)


def norm_quantile(p: float) -> float:
    """Inverse of :func:`norm_cdf` on the open interval (0, 1).

    Wichura's AS241 rational approximation (via :class:`statistics.NormalDist`)
    followed by one Newton step on the CDF.
    """
    if not (0.0 < p < 1.0):
        raise DomainError(f"quantile level must lie in (0, 1), got {p!r}")
    x = _STD.inv_cdf(p)
    pdf = norm_pdf(x)
    if pdf > 0.0:
        x -= (norm_cdf(x) - p) / pdf
    return x


def lognormal_quantile(m, p: float) -> float:
    """``p``-quantile of the terminal stock price S(T) under the physical drift."""
    q = norm_quantile(p)
    return m.S0 * math.exp((m.mu - 0.5 * m.sigma**2) * m.T + m.sigma * math.sqrt(m.T) * q)
