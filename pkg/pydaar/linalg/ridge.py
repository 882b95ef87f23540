"""
Ridge-regularized projection matrices and their leverage diagnostics.

For a penalty theta >= 0,

    P_theta = Z (Z'Z + theta I_K)^{-1} Z' = U diag(s^2 / (s^2 + theta)) U'

with K_theta = sum_{i != j} P_{theta,ij}^2 the off-diagonal Frobenius mass and

    p_n = max_i sum_{j != i} P_{theta,ij}^2 / K_theta
    q_n = max_i P_{theta,ii}^2 / K_theta

Both ratios are +inf when K_theta = 0 (c / 0 = +inf convention).
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple
import logging
import math

import numpy as np
import numpy.typing as npt

from pydaar.core.constants import MATERIALIZE_MAX_N, SYMMETRY_TOLERANCE
from pydaar.core.exceptions import NegativeTheta
from pydaar.linalg.svd import SvdFactors

logger = logging.getLogger(__name__)

# Relative size below which K_theta is treated as exactly zero
_K_ZERO_RELATIVE = 1e-14
# Factors are used when rank * factor <= n
LOW_RANK_FACTOR = 4


@dataclass(frozen=True)
class LeverageProfile:
    """Per-observation diagonal and row mass of P_theta, computed from factors."""
    diag: npt.NDArray[np.float64]
    row_sq: npt.NDArray[np.float64]
    K_theta: float

    @property
    def offdiag_row_mass(self) -> npt.NDArray[np.float64]:
        return np.maximum(self.row_sq - self.diag**2, 0.0)

    def ratios(self) -> Tuple[float, float]:
        """Return (p_n, q_n), both +inf when K_theta = 0."""
        if self.K_theta <= 0.0:
            return math.inf, math.inf
        p_n = float(np.max(self.offdiag_row_mass) / self.K_theta)
        q_n = float(np.max(self.diag**2) / self.K_theta)
        return p_n, q_n


def shrinkage(f: SvdFactors, theta: float) -> npt.NDArray[np.float64]:
    """Eigenvalues s^2 / (s^2 + theta) of P_theta on the rank-r subspace."""
    s2 = f.s_squared
    return s2 / (s2 + theta)


def _k_from(total: float, diag: npt.NDArray[np.float64]) -> float:
    k = float(total - np.dot(diag, diag))
    if k <= _K_ZERO_RELATIVE * max(total, 1e-300):
        return 0.0
    return k


def leverage_profile(f: SvdFactors, theta: float) -> LeverageProfile:
    """
    Diagonal, row sums of squares and K_theta of P_theta in O(n r).

    Uses diag(P) = U^2 d and rowsum(P^2) = U^2 d^2 with d the shrinkage
    factors; P itself is never formed.
    """
    if not theta >= 0.0:
        raise NegativeTheta(f"theta must be >= 0, got {theta}")
    d = shrinkage(f, theta)
    U2 = f.U * f.U
    diag = U2 @ d
    row_sq = U2 @ (d * d)
    return LeverageProfile(diag=diag, row_sq=row_sq, K_theta=_k_from(float(np.sum(d * d)), diag))


@dataclass(frozen=True, eq=False)
class RidgeProjection:
    """
    The projection P_theta with its diagonal, K_theta and leverage diagnostics.

    Backed either by SVD factors (U, shrink) or by an explicit matrix. When
    factors are present and n <= MATERIALIZE_MAX_N the dense matrix is formed
    lazily on first use of :attr:`P`.

    Attributes:
        theta: Ridge penalty (NaN for an explicitly supplied matrix)
        n: Number of observations
        diag: P_ii, shape (n,)
        row_sq: sum_j P_ij^2, shape (n,)
        K_theta: sum_{i != j} P_ij^2
        p_n: Maximal off-diagonal row mass relative to K_theta
        q_n: Maximal squared diagonal relative to K_theta
    """
    theta: float
    n: int
    diag: npt.NDArray[np.float64]
    row_sq: npt.NDArray[np.float64]
    K_theta: float
    p_n: float
    q_n: float
    U: Optional[npt.NDArray[np.float64]] = None
    shrink: Optional[npt.NDArray[np.float64]] = None
    explicit: Optional[npt.NDArray[np.float64]] = None

    @property
    def has_factors(self) -> bool:
        return self.U is not None and self.shrink is not None

    @property
    def materializable(self) -> bool:
        return self.explicit is not None or self.n <= MATERIALIZE_MAX_N

    @property
    def prefers_factors(self) -> bool:
        """Low-rank factors are cheaper than the dense matrix, or the only option."""
        if not self.has_factors:
            return False
        return not self.materializable or self.U.shape[1] * LOW_RANK_FACTOR <= self.n

    @cached_property
    def P(self) -> npt.NDArray[np.float64]:
        """Dense n x n matrix (formed from the factors on first access)."""
        if self.explicit is not None:
            return self.explicit
        dense = (self.U * self.shrink) @ self.U.T
        dense = 0.5 * (dense + dense.T)
        dense.setflags(write=False)
        return dense

    @classmethod
    def from_matrix(cls, P: npt.NDArray[np.float64], theta: float = math.nan) -> "RidgeProjection":
        """
        Wrap an explicit symmetric matrix.

        Raises:
            ValueError: If P is not square and symmetric within 1e-10
        """
        P = np.array(P, dtype=np.float64)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError(f"P must be a square matrix. Got shape {P.shape}.")
        if not np.allclose(P, P.T, rtol=0.0, atol=SYMMETRY_TOLERANCE):
            raise ValueError("P must be symmetric")
        P.setflags(write=False)
        diag = np.diag(P).copy()
        row_sq = np.sum(P * P, axis=1)
        profile = LeverageProfile(
            diag=diag, row_sq=row_sq, K_theta=_k_from(float(np.sum(row_sq)), diag)
        )
        p_n, q_n = profile.ratios()
        return cls(
            theta=float(theta), n=P.shape[0], diag=diag, row_sq=row_sq,
            K_theta=profile.K_theta, p_n=p_n, q_n=q_n, explicit=P,
        )

    def apply(self, v: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """Return P v for a vector, or P applied to each row of a (B, n) stack."""
        v = np.asarray(v, dtype=np.float64)
        if not self.prefers_factors:
            return v @ self.P
        return ((v @ self.U) * self.shrink) @ self.U.T

    def off_diagonal_form(
        self,
        v: npt.NDArray[np.float64],
        use_factors: Optional[bool] = None,
    ) -> npt.NDArray[np.float64]:
        """
        Jackknifed quadratic form sum_{i != j} v_i P_ij v_j.

        Args:
            v: Vector (n,) or stack of vectors (B, n)
            use_factors: Force the factor path (True) or the dense path (False);
                default picks the factors when they are low rank or P is too large

        Returns:
            Scalar array for a vector input, shape (B,) for a stack
        """
        v = np.asarray(v, dtype=np.float64)
        if use_factors is None:
            use_factors = self.prefers_factors
        if use_factors:
            if not self.has_factors:
                raise ValueError("Projection has no SVD factors")
            projected = v @ self.U
            full = (projected * projected) @ self.shrink
        else:
            full = np.sum((v @ self.P) * v, axis=-1)
        return full - (v * v) @ self.diag


def ridge_projection_at(f: SvdFactors, theta: float) -> RidgeProjection:
    """
    Build P_theta = U diag(s^2 / (s^2 + theta)) U' and its diagnostics.

    At theta = 0 this is U U', the projection onto the rank-r column space
    of Z (the pseudoinverse limit when K >= n).

    Args:
        f: SVD factors of the instrument matrix
        theta: Ridge penalty, >= 0

    Returns:
        RidgeProjection with diag, K_theta, p_n and q_n populated

    Raises:
        NegativeTheta: If theta < 0

    Example:
        >>> f = svd_factorize(np.array([[1.0], [0.0]]))
        >>> ridge_projection_at(f, 1.0).P
        array([[0.5, 0. ],
               [0. , 0. ]])
    """
    profile = leverage_profile(f, float(theta))
    p_n, q_n = profile.ratios()
    return RidgeProjection(
        theta=float(theta),
        n=f.n_rows,
        diag=profile.diag,
        row_sq=profile.row_sq,
        K_theta=profile.K_theta,
        p_n=p_n,
        q_n=q_n,
        U=f.U,
        shrink=shrinkage(f, float(theta)),
    )


def k_theta(P: RidgeProjection) -> float:
    """
    Off-diagonal squared Frobenius mass K_theta = ||P||_F^2 - sum_i P_ii^2.

    Example:
        >>> k_theta(RidgeProjection.from_matrix([[0.0, 0.3], [0.3, 0.0]]))
        0.18
    """
    return P.K_theta


def leverage_diagnostics(P: RidgeProjection) -> Tuple[float, float]:
    """Return (p_n, q_n); both are +inf when K_theta = 0."""
    return P.p_n, P.q_n
