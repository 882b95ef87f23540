"""
Data-driven choice of the ridge regularizer.

The regularizer is the largest theta in [0, theta_bar], theta_bar = ||Z'Z||_op,
for which both leverage criteria

    max_i P_{theta,ii}^2 / K_theta                 <= 1 / sqrt(n)
    max_i sum_{j != i} P_{theta,ij}^2 / K_theta    <= 1 / sqrt(n)

hold. The feasible set need not be an interval, so the criteria are scanned
on a grid and only the upper boundary of the top feasible region is refined
by bisection.
"""

from dataclasses import dataclass, field
from typing import List, Optional
import logging
import math

import numpy as np
import numpy.typing as npt

from pydaar.core.constants import (
    BISECTION_RELATIVE_PRECISION,
    DEFAULT_GRID_SIZE,
    FEASIBILITY_SLACK,
    GRID_ANCHOR_FACTOR,
)
from pydaar.core.exceptions import DegenerateInstruments
from pydaar.linalg.ridge import leverage_profile
from pydaar.linalg.svd import SvdFactors, operator_norm_bound

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridEvaluation:
    """Leverage criteria of P_theta at one grid point."""
    theta: float
    q_criterion: float
    p_criterion: float
    K_theta: float


@dataclass(frozen=True)
class LambdaSelection:
    """
    Result of the regularizer search.

    Attributes:
        lambda_: Selected regularizer (None when infeasible)
        theta_bar: Upper end of the search interval, s_max^2
        feasible: Whether some theta satisfied both criteria
        p_n, q_n, K_lambda: Diagnostics at lambda_ (NaN when infeasible)
        grid_evaluations: Audit trail of every evaluated grid point
    """
    lambda_: Optional[float]
    theta_bar: float
    feasible: bool
    p_n: float = math.nan
    q_n: float = math.nan
    K_lambda: float = math.nan
    grid_evaluations: List[GridEvaluation] = field(default_factory=list)

    def to_dict(self, include_grid: bool = True) -> dict:
        out = {
            "lambda": self.lambda_,
            "theta_bar": self.theta_bar,
            "feasible": self.feasible,
            "p_n": self.p_n,
            "q_n": self.q_n,
            "K_lambda": self.K_lambda,
        }
        if include_grid:
            out["grid"] = [
                {"theta": g.theta, "q_criterion": g.q_criterion,
                 "p_criterion": g.p_criterion, "K_theta": g.K_theta}
                for g in self.grid_evaluations
            ]
        return out


def theta_grid(f: SvdFactors, grid_size: int = DEFAULT_GRID_SIZE, lower: float = 0.0) -> npt.NDArray[np.float64]:
    """
    Search grid over [lower, theta_bar].

    The grid is {0, theta_bar} plus grid_size - 2 geometrically spaced
    interior points from s_min^2 * 1e-4 up to theta_bar. With lower > 0 the
    points below ``lower`` are replaced by ``lower`` itself.

    Raises:
        ValueError: If grid_size < 2
    """
    if grid_size < 2:
        raise ValueError(f"grid_size must be >= 2, got {grid_size}")
    theta_bar = operator_norm_bound(f)
    points = [0.0, theta_bar]
    if grid_size > 2:
        anchor = float(f.s[-1] ** 2) * GRID_ANCHOR_FACTOR
        points.extend(np.geomspace(anchor, theta_bar, grid_size - 1)[:-1].tolist())
    grid = np.unique(np.asarray(points, dtype=np.float64))
    if lower > 0.0:
        grid = np.unique(np.concatenate([[lower], grid[grid > lower]]))
    return grid


def evaluate_criteria(f: SvdFactors, theta: float) -> GridEvaluation:
    """Both leverage criteria and K_theta at one penalty."""
    profile = leverage_profile(f, theta)
    p_n, q_n = profile.ratios()
    return GridEvaluation(theta=float(theta), q_criterion=q_n, p_criterion=p_n, K_theta=profile.K_theta)


def _is_feasible(evaluation: GridEvaluation, bound: float) -> bool:
    return evaluation.q_criterion <= bound and evaluation.p_criterion <= bound


def select_lambda(
    f: SvdFactors,
    n: int,
    grid_size: int = DEFAULT_GRID_SIZE,
    raise_on_infeasible: bool = True,
) -> LambdaSelection:
    """
    Choose the ridge regularizer lambda.

    Args:
        f: SVD factors of the (standardized) instruments
        n: Sample size
        grid_size: Number of grid points, >= 2
        raise_on_infeasible: Raise instead of returning an infeasible selection

    Returns:
        LambdaSelection with the largest feasible theta, refined by bisection
        towards the first infeasible grid point above it

    Raises:
        DegenerateInstruments: If no grid point is feasible (and raising is on)
        ValueError: If grid_size < 2

    Example:
        >>> f = svd_factorize(np.ones((100, 1)))
        >>> select_lambda(f, 100).lambda_
        100.0
    """
    bound = 1.0 / math.sqrt(n) + FEASIBILITY_SLACK
    grid = theta_grid(f, grid_size)
    theta_bar = float(grid[-1])
    evaluations = [evaluate_criteria(f, theta) for theta in grid]
    feasible_idx = [i for i, ev in enumerate(evaluations) if _is_feasible(ev, bound)]

    if not feasible_idx:
        logger.debug("No feasible regularizer on a %d-point grid (theta_bar=%.4g)", len(grid), theta_bar)
        if raise_on_infeasible:
            raise DegenerateInstruments(
                "No ridge penalty in [0, theta_bar] keeps both leverage criteria below "
                f"1/sqrt(n) = {1.0 / math.sqrt(n):.4g}"
            )
        return LambdaSelection(
            lambda_=None, theta_bar=theta_bar, feasible=False, grid_evaluations=evaluations
        )

    top = feasible_idx[-1]
    lo = float(grid[top])
    if top + 1 < len(grid):
        hi = float(grid[top + 1])
        while hi - lo > BISECTION_RELATIVE_PRECISION * hi:
            mid = 0.5 * (lo + hi)
            if _is_feasible(evaluate_criteria(f, mid), bound):
                lo = mid
            else:
                hi = mid

    chosen = evaluate_criteria(f, lo)
    logger.debug("Selected lambda=%.6g (theta_bar=%.6g, p_n=%.4g, q_n=%.4g)",
                 lo, theta_bar, chosen.p_criterion, chosen.q_criterion)
    return LambdaSelection(
        lambda_=lo,
        theta_bar=theta_bar,
        feasible=True,
        p_n=chosen.p_criterion,
        q_n=chosen.q_criterion,
        K_lambda=chosen.K_theta,
        grid_evaluations=evaluations,
    )
