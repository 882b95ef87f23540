"""
Confidence sets by test inversion.

The set is every beta0 on a grid that the chosen test does not reject.
Accepted grid points are compacted into maximal runs, so disconnected
acceptance regions come out as several closed intervals and a test that
rejects everywhere gives an empty set.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np
import numpy.typing as npt
from tqdm import tqdm

from pydaar.core.types import Method, PartialledSample
from pydaar.inference.dispatch import TestOptions, make_tester

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]

# Meta entries that do not depend on beta0
_SHARED_META = frozenset({
    "lambda", "K_lambda", "p_n", "q_n", "theta_bar", "lambda_feasible", "lambda_fallback",
    "r_n", "B", "seed", "weight_law", "gamma_star", "theta", "K", "c",
})


def beta_grid(lo: float, hi: float, points: int) -> npt.NDArray[np.float64]:
    """
    Equally spaced beta0 grid including both ends.

    Raises:
        ValueError: If lo >= hi or points < 2
    """
    if not lo < hi:
        raise ValueError(f"grid_lo must be below grid_hi, got [{lo}, {hi}]")
    if points < 2:
        raise ValueError(f"grid_points must be >= 2, got {points}")
    return np.linspace(float(lo), float(hi), int(points))


def compact_intervals(grid: Sequence[float], accepted: Sequence[bool]) -> List[Interval]:
    """
    Maximal runs of accepted grid points as closed intervals.

    Example:
        >>> compact_intervals([0, 1, 2, 3, 4], [True, True, False, True, False])
        [(0.0, 1.0), (3.0, 3.0)]
    """
    grid = np.asarray(grid, dtype=np.float64)
    accepted = np.asarray(accepted, dtype=bool)
    if grid.shape != accepted.shape:
        raise ValueError("grid and accepted must have the same length")

    intervals: List[Interval] = []
    start: Optional[int] = None
    for i, ok in enumerate(accepted):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            intervals.append((float(grid[start]), float(grid[i - 1])))
            start = None
    if start is not None:
        intervals.append((float(grid[start]), float(grid[-1])))
    return intervals


@dataclass(frozen=True, eq=False)
class ConfidenceSet:
    """
    Accepted beta0 values of a test-inversion confidence set.

    Attributes:
        method: Inverted test
        alpha: Level of the test (coverage 1 - alpha)
        grid: beta0 grid, ascending
        accepted: Non-rejection flag per grid point
        intervals: Disjoint sorted closed intervals of accepted runs
    """
    method: Method
    alpha: float
    grid: npt.NDArray[np.float64]
    accepted: npt.NDArray[np.bool_]
    intervals: List[Interval] = field(default_factory=list)
    meta: Dict[str, object] = field(default_factory=dict)

    @classmethod
    def from_acceptance(
        cls,
        method: Method,
        alpha: float,
        grid: Sequence[float],
        accepted: Sequence[bool],
        meta: Optional[Dict[str, object]] = None,
    ) -> "ConfidenceSet":
        grid = np.asarray(grid, dtype=np.float64)
        accepted = np.asarray(accepted, dtype=bool)
        return cls(method=method, alpha=alpha, grid=grid, accepted=accepted,
                   intervals=compact_intervals(grid, accepted), meta=dict(meta or {}))

    @property
    def empty(self) -> bool:
        return not bool(self.accepted.any())

    @property
    def length(self) -> float:
        """Total length of the intervals."""
        return float(sum(hi - lo for lo, hi in self.intervals))

    def contains(self, beta: float) -> bool:
        return any(lo <= beta <= hi for lo, hi in self.intervals)

    def to_dict(self) -> Dict[str, object]:
        return {
            "method": self.method.value,
            "alpha": self.alpha,
            "empty": self.empty,
            "intervals": [[lo, hi] for lo, hi in self.intervals],
            "length": self.length,
            "grid_points": int(self.grid.size),
            "grid_lo": float(self.grid[0]),
            "grid_hi": float(self.grid[-1]),
            "meta": dict(self.meta),
        }


def invert_test(
    method: Union[Method, str],
    sample: PartialledSample,
    grid: Sequence[float],
    options: Optional[TestOptions] = None,
    progress: bool = False,
) -> ConfidenceSet:
    """
    Run the test at every grid point and collect the non-rejections.

    Bootstrap multipliers are shared across grid points (they depend on the
    seed and the draw index only), so the set is a deterministic function
    of the seed.

    Args:
        method: Test to invert
        sample: Partialled sample
        grid: Ascending beta0 values
        options: Test settings (alpha, draws, seed, ...)
        progress: Show a progress bar on stderr

    Returns:
        ConfidenceSet; ``empty`` is True when every grid point is rejected
    """
    method = Method.parse(method) if isinstance(method, str) else Method(method)
    options = options or TestOptions()
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 1:
        raise ValueError("grid must be a non-empty vector")
    if np.any(np.diff(grid) <= 0.0):
        raise ValueError("grid must be strictly increasing")

    tester = make_tester(method, sample, options)
    accepted = np.zeros(grid.size, dtype=bool)
    meta: Dict[str, object] = {}
    for i, beta0 in enumerate(tqdm(grid, desc=f"{method.value} CI", disable=not progress,
                                   leave=False)):
        result = tester(float(beta0))
        accepted[i] = not result.reject
        if i == 0:
            meta = {k: v for k, v in result.meta.items() if k in _SHARED_META}

    logger.info("%s confidence set: %d of %d grid points accepted",
                method.value, int(accepted.sum()), grid.size)
    return ConfidenceSet.from_acceptance(method, options.alpha, grid, accepted, meta)


def relative_length(cs: ConfidenceSet, reference: ConfidenceSet) -> float:
    """
    Length of ``cs`` relative to ``reference``.

    NaN when the reference has zero length.
    """
    if reference.length <= 0.0:
        return float("nan")
    return cs.length / reference.length
