"""
Thin singular value decomposition of the instrument matrix.

The factors Z = U diag(s) V' are computed once per sample and every ridge
projection P_theta = U diag(s^2 / (s^2 + theta)) U' is then evaluated from
them, which keeps sweeps over theta cheap.
"""

from dataclasses import dataclass
import logging

import numpy as np
import numpy.typing as npt

from pydaar.core.constants import MACHINE_EPSILON
from pydaar.core.exceptions import ZeroMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SvdFactors:
    """
    Thin SVD of Z restricted to its numerical rank.

    Attributes:
        U: Left singular vectors, shape (n, r), orthonormal columns
        s: Singular values, shape (r,), strictly positive and descending
        Vt: Right singular vectors, shape (r, K)
        n_rows: Number of observations n
        n_cols: Number of instruments K
    """
    U: npt.NDArray[np.float64]
    s: npt.NDArray[np.float64]
    Vt: npt.NDArray[np.float64]
    n_rows: int
    n_cols: int

    @property
    def r(self) -> int:
        """Numerical rank of Z."""
        return int(self.s.shape[0])

    @property
    def s_squared(self) -> npt.NDArray[np.float64]:
        return self.s * self.s

    def reconstruct(self) -> npt.NDArray[np.float64]:
        """Return U diag(s) V', equal to Z up to the dropped singular values."""
        return (self.U * self.s) @ self.Vt


def svd_factorize(Z: npt.NDArray[np.float64]) -> SvdFactors:
    """
    Compute the thin SVD of Z, dropping singular values below the rank tolerance.

    The rank tolerance is s_max * n * machine_epsilon.

    Args:
        Z: Instrument matrix, shape (n, K); K may exceed n

    Returns:
        SvdFactors with r = numerical rank of Z

    Raises:
        ZeroMatrix: If every entry of Z is zero

    Example:
        >>> svd_factorize(np.array([[3.0], [4.0]])).s
        array([5.])
    """
    Z = np.asarray(Z, dtype=np.float64)
    if Z.ndim == 1:
        Z = Z.reshape(-1, 1)
    if not np.any(Z):
        raise ZeroMatrix("Instrument matrix is identically zero")

    n, K = Z.shape
    U, s, Vt = np.linalg.svd(Z, full_matrices=False)
    tolerance = s[0] * n * MACHINE_EPSILON
    keep = s > tolerance
    r = int(np.sum(keep))
    if r < min(n, K):
        logger.debug("Dropped %d singular values below %.3e", min(n, K) - r, tolerance)

    U = np.ascontiguousarray(U[:, :r])
    s = s[:r].copy()
    Vt = np.ascontiguousarray(Vt[:r, :])
    for arr in (U, s, Vt):
        arr.setflags(write=False)
    return SvdFactors(U=U, s=s, Vt=Vt, n_rows=n, n_cols=K)


def operator_norm_bound(f: SvdFactors) -> float:
    """
    Upper end of the regularizer search interval, theta_bar = ||Z'Z||_op = s_max^2.

    Example:
        >>> operator_norm_bound(svd_factorize(np.eye(3)))
        1.0
    """
    return float(f.s[0] ** 2)
