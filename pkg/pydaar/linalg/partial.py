"""
Partialling out exogenous controls and instrument standardization.

Every test in pydaar runs on the partialled model Y = X beta + e, obtained by
multiplying outcome, regressor and instruments by the annihilator
M_W = I_n - W (W'W)^{-1} W'.
"""

import logging

import numpy as np
import numpy.typing as npt

from pydaar.core.constants import MACHINE_EPSILON, ORTHOGONALITY_TOLERANCE
from pydaar.core.exceptions import RankDeficientControls, ZeroColumn
from pydaar.core.types import PartialledSample, RawSample

logger = logging.getLogger(__name__)


def _control_basis(W: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Orthonormal basis of col(W); raises if W is numerically rank deficient."""
    n, L = W.shape
    U, s, _ = np.linalg.svd(W, full_matrices=False)
    tolerance = (s[0] if s.size else 0.0) * n * MACHINE_EPSILON
    rank = int(np.sum(s > tolerance))
    if rank < L or s[0] == 0.0:
        raise RankDeficientControls(
            f"Controls W have numerical rank {rank} < L = {L} "
            f"(smallest singular value {s[-1]:.3e}, tolerance {tolerance:.3e})"
        )
    return U


def residualize(W: npt.NDArray[np.float64], V: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """
    M_W V for a vector or matrix V.

    Raises:
        RankDeficientControls: If W is numerically rank deficient
    """
    W = np.asarray(W, dtype=np.float64)
    V = np.asarray(V, dtype=np.float64)
    if W.shape[1] == 0:
        return V.copy()
    basis = _control_basis(W)
    return V - basis @ (basis.T @ V)


def partial_out(raw: RawSample) -> PartialledSample:
    """
    Project the controls out of outcome, regressor and instruments.

    Args:
        raw: Sample with controls W of full column rank

    Returns:
        PartialledSample with Y = M_W Y~, X = M_W X~, Z = M_W Z~

    Raises:
        RankDeficientControls: If W has numerical rank below its column count

    Example:
        >>> raw = RawSample(Y=[1, 2, 3], X=[0, 1, 0], W=np.ones((3, 1)), Z=[[1], [0], [2]])
        >>> partial_out(raw).Y
        array([-1.,  0.,  1.])
    """
    if raw.L == 0:
        return PartialledSample(Y=raw.Y, X=raw.X, Z=raw.Z)

    basis = _control_basis(np.asarray(raw.W))
    if raw.L >= raw.n:
        # M_W = 0 when W spans R^n
        logger.debug("Controls span R^%d; every partialled vector is zero", raw.n)
        return PartialledSample(
            Y=np.zeros(raw.n), X=np.zeros(raw.n), Z=np.zeros((raw.n, raw.K))
        )

    stacked = np.column_stack([raw.Y, raw.X, raw.Z])
    residuals = stacked - basis @ (basis.T @ stacked)

    scale = np.maximum(np.linalg.norm(stacked, axis=0), 1.0)
    leak = np.abs(np.asarray(raw.W).T @ residuals) / (np.linalg.norm(raw.W, axis=0)[:, None] * scale)
    if leak.size and leak.max() > ORTHOGONALITY_TOLERANCE:
        logger.warning("Partialled data not orthogonal to W (max relative leak %.2e)", leak.max())

    return PartialledSample(Y=residuals[:, 0], X=residuals[:, 1], Z=residuals[:, 2:])


def standardize_columns(Z: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """
    Scale each column of Z so that (1/n) sum_i Z_ij^2 = 1.

    Raises:
        ZeroColumn: If some column has a zero sum of squares
    """
    Z = np.asarray(Z, dtype=np.float64)
    mean_square = np.mean(Z * Z, axis=0)
    zero = np.flatnonzero(mean_square == 0.0)
    if zero.size:
        raise ZeroColumn(f"Instrument column(s) {zero.tolist()} have zero sum of squares")
    return Z / np.sqrt(mean_square)


def standardize_instruments(sample: PartialledSample) -> PartialledSample:
    """
    Standardize instruments so every column has mean square exactly one.

    Tests operate on the standardized instruments; the standardization is
    applied after partialling out the controls.

    Example:
        >>> s = PartialledSample(Y=[0, 0], X=[0, 0], Z=[[2.0], [0.0]])
        >>> standardize_instruments(s).Z[:, 0]
        array([1.41421356, 0.        ])
    """
    return PartialledSample(
        Y=sample.Y, X=sample.X, Z=standardize_columns(sample.Z), standardized=True
    )


def prepare_instruments(sample: PartialledSample, standardize: bool) -> PartialledSample:
    """Standardize unless the sample already is, or the caller opts out."""
    if standardize and not sample.standardized:
        return standardize_instruments(sample)
    return sample
