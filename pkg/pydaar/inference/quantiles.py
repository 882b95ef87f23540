"""
Reference-distribution quantiles and tail probabilities.

Thin wrappers over scipy.stats with argument checking, so every test
module draws its critical values from one place.
"""

import numpy as np
from scipy import stats


def _check_probability(p: float) -> float:
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ValueError(f"Probability must be in (0, 1), got {p}")
    return p


def normal_quantile(p: float) -> float:
    """
    Standard normal quantile q_p(N(0, 1)).

    Example:
        >>> round(normal_quantile(0.975), 6)
        1.959964
    """
    return float(stats.norm.ppf(_check_probability(p)))


def chi_square_quantile(p: float, df: int) -> float:
    """
    Chi-square quantile with ``df`` degrees of freedom.

    Example:
        >>> round(chi_square_quantile(0.95, 1), 6)
        3.841459
    """
    if df < 1:
        raise ValueError(f"Degrees of freedom must be >= 1, got {df}")
    return float(stats.chi2.ppf(_check_probability(p), df))


def normal_survival(x: float) -> float:
    """Upper tail P(N(0, 1) > x)."""
    return float(stats.norm.sf(x))


def chi_square_survival(x: float, df: int) -> float:
    """Upper tail P(chi2_df > x)."""
    return float(stats.chi2.sf(x, df))


def upper_order_statistic(draws: np.ndarray, alpha: float) -> float:
    """
    The ceil((1 - alpha) * B)-th smallest of B draws (1-based).

    Example:
        >>> upper_order_statistic(np.arange(1.0, 21.0), 0.05)
        19.0
    """
    draws = np.asarray(draws, dtype=np.float64).ravel()
    B = draws.size
    if B == 0:
        raise ValueError("No draws to take an order statistic of")
    index = int(np.ceil((1.0 - alpha) * B - 1e-9))
    index = min(max(index, 1), B)
    return float(np.partition(draws, index - 1)[index - 1])


def exceedance_share(statistic: float, draws: np.ndarray) -> float:
    """Share of draws at or above the statistic (bootstrap p-value)."""
    draws = np.asarray(draws, dtype=np.float64)
    return float(np.mean(draws >= statistic))
