"""
Benchmark tests for H0: beta = beta0 with many instruments.

- jar_std: jackknife AR with the standard variance estimator
- jar_cf: jackknife AR with the cross-fit variance estimator (clamped)
- classical_ar: heteroskedasticity-robust AR for fixed K
- rjar: ridge-regularized jackknife AR at the penalty gamma*
- sup_score_bcch: sup-score test with a Bonferroni normal critical value
- ct_test: ratio test at penalty 0.05 with a residual bootstrap

All of them standardize the instruments first unless told otherwise and
return a TestResult whose ``reject`` is ``statistic > critical_value``.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple
import logging
import math
import warnings

import numpy as np
import numpy.typing as npt
from scipy import linalg

from pydaar.core.constants import (
    ARGMAX_RELATIVE_TOLERANCE,
    BCCH_CONSTANT,
    BOOTSTRAP_BLOCK_SIZE,
    CT_REGULARIZER,
    DEFAULT_ALPHA,
    DEFAULT_BOOTSTRAP_DRAWS,
    DEFAULT_GRID_SIZE,
    DEFAULT_SEED,
    MACHINE_EPSILON,
)
from pydaar.core.exceptions import (
    DegenerateColumn,
    DegenerateDenominator,
    SingularGram,
    SingularOmega,
)
from pydaar.core.types import Hypothesis, Method, PartialledSample, TestResult
from pydaar.inference.ar_test import residuals
from pydaar.inference.quantiles import (
    chi_square_quantile,
    chi_square_survival,
    exceedance_share,
    normal_quantile,
    normal_survival,
    upper_order_statistic,
)
from pydaar.linalg.partial import prepare_instruments
from pydaar.linalg.ridge import RidgeProjection, leverage_profile, ridge_projection_at
from pydaar.linalg.selection import theta_grid
from pydaar.linalg.svd import SvdFactors, svd_factorize
from pydaar.utils.parallel import ordered_map
from pydaar.utils.streams import ROLE_RESIDUAL_BOOTSTRAP, block_count, substream

logger = logging.getLogger(__name__)


def jackknife_variance_sum(P: RidgeProjection, a: npt.NDArray[np.float64]) -> float:
    """
    sum_{i != j} P_ij^2 a_i a_j.

    With factors P = U D U' this is ||B' diag(a) B||_F^2 - sum_i P_ii^2 a_i^2
    for B = U D^{1/2}, which costs O(n r^2) and never forms P.
    """
    a = np.asarray(a, dtype=np.float64)
    if P.prefers_factors:
        B = P.U * np.sqrt(P.shrink)
        G = B.T @ (B * a[:, None])
        total = float(np.sum(G * G))
    else:
        P2 = P.P * P.P
        total = float(a @ P2 @ a)
    return total - float(np.sum(P.diag**2 * a**2))


def _jackknife_ratio(e: npt.NDArray[np.float64], P: RidgeProjection) -> Tuple[float, float, float]:
    """(numerator, variance sum, statistic) of the jackknife AR ratio."""
    numerator = float(P.off_diagonal_form(e))
    variance = jackknife_variance_sum(P, e * e)
    if variance <= 0.0:
        return numerator, variance, 0.0
    return numerator, variance, numerator / math.sqrt(2.0 * variance)


def _unregularized_projection(Z: npt.NDArray[np.float64]) -> Tuple[RidgeProjection, SvdFactors]:
    n, K = Z.shape
    if K >= n:
        raise SingularGram(f"Z'Z is singular with K = {K} >= n = {n}")
    f = svd_factorize(Z)
    if f.r < K:
        raise SingularGram(f"Z'Z is singular: numerical rank {f.r} < K = {K}")
    return ridge_projection_at(f, 0.0), f


def jar_std(
    sample: PartialledSample,
    h: Hypothesis,
    alpha: float = DEFAULT_ALPHA,
    standardize: bool = True,
) -> TestResult:
    """
    Jackknife AR test with the standard variance estimator.

    statistic = sum_{i != j} P_ij e_i e_j / sqrt(2 sum_{i != j} P_ij^2 e_i^2 e_j^2)
    with the unregularized projection P, compared with q_{1-alpha}(N(0, 1)).

    Raises:
        SingularGram: If K >= n or Z'Z is numerically singular
    """
    prepared = prepare_instruments(sample, standardize)
    P, _ = _unregularized_projection(np.asarray(prepared.Z))
    e = residuals(prepared, h)
    _, variance, statistic = _jackknife_ratio(e, P)
    return TestResult.from_decision(
        method=Method.JAR_STD,
        statistic=statistic,
        critical_value=normal_quantile(1.0 - alpha),
        alpha=alpha,
        p_value=normal_survival(statistic),
        meta={"K": prepared.K, "variance": 2.0 * variance / prepared.K},
    )


def cross_fit_variance(P: npt.NDArray[np.float64], e: npt.NDArray[np.float64], K: int) -> float:
    """
    Cross-fit variance (2/K) sum_{i != j} R_ij a_i a_j.

    Here M = I - P, a_i = e_i (M e)_i and R_ij = P_ij^2 / (M_ii M_jj + M_ij^2).
    Pairs with a zero denominator contribute nothing.
    """
    P = np.asarray(P, dtype=np.float64)
    n = P.shape[0]
    M = np.eye(n) - P
    a = e * (M @ e)
    m = np.diag(M)
    denominator = np.outer(m, m) + M * M
    P2 = P * P
    R = np.divide(P2, denominator, out=np.zeros_like(P2), where=denominator > 0.0)
    np.fill_diagonal(R, 0.0)
    return 2.0 / K * float(a @ R @ a)


def jar_cf(
    sample: PartialledSample,
    h: Hypothesis,
    alpha: float = DEFAULT_ALPHA,
    standardize: bool = True,
) -> TestResult:
    """
    Jackknife AR test with the cross-fit variance estimator.

    The variance is floored at 1 / sqrt(n log n); ``meta["variance_clamped"]``
    records whether the floor was used.

    Raises:
        SingularGram: If K >= n or Z'Z is numerically singular
    """
    prepared = prepare_instruments(sample, standardize)
    P, _ = _unregularized_projection(np.asarray(prepared.Z))
    e = residuals(prepared, h)
    n, K = prepared.n, prepared.K

    numerator = float(P.off_diagonal_form(e))
    raw_variance = cross_fit_variance(P.P, e, K)
    floor = 1.0 / math.sqrt(n * math.log(n))
    clamped = bool(raw_variance < floor)
    variance = max(raw_variance, floor)
    if clamped:
        logger.debug("Cross-fit variance %.4g below floor %.4g", raw_variance, floor)

    statistic = numerator / (math.sqrt(variance) * math.sqrt(K))
    return TestResult.from_decision(
        method=Method.JAR_CF,
        statistic=statistic,
        critical_value=normal_quantile(1.0 - alpha),
        alpha=alpha,
        p_value=normal_survival(statistic),
        meta={"K": K, "variance": variance, "raw_variance": raw_variance,
              "variance_clamped": clamped},
    )


def classical_ar(
    sample: PartialledSample,
    h: Hypothesis,
    alpha: float = DEFAULT_ALPHA,
    standardize: bool = True,
) -> TestResult:
    """
    Heteroskedasticity-robust AR test for fixed K.

    J = Z'e / sqrt(n), Omega = Z' diag(e^2) Z / n, statistic J' Omega^{-1} J
    against the chi-square quantile with K degrees of freedom.

    Raises:
        SingularOmega: If Omega is numerically singular

    Example:
        >>> s = PartialledSample(Y=[2.0, 0.0], X=[0.0, 0.0], Z=[[1.0], [0.0]])
        >>> round(classical_ar(s, Hypothesis(0.0)).statistic, 10)
        1.0
    """
    prepared = prepare_instruments(sample, standardize)
    Z = np.asarray(prepared.Z)
    e = residuals(prepared, h)
    n, K = Z.shape

    J = Z.T @ e / math.sqrt(n)
    Omega = Z.T @ (Z * (e * e)[:, None]) / n
    Omega = 0.5 * (Omega + Omega.T)
    eigenvalues = linalg.eigvalsh(Omega)
    top = float(eigenvalues[-1])
    if top <= 0.0 or float(eigenvalues[0]) <= top * K * MACHINE_EPSILON * 10.0:
        raise SingularOmega(
            f"Robust moment covariance is singular (eigenvalues in [{eigenvalues[0]:.3e}, {top:.3e}])"
        )

    statistic = float(J @ linalg.solve(Omega, J, assume_a="pos"))
    return TestResult.from_decision(
        method=Method.AR,
        statistic=statistic,
        critical_value=chi_square_quantile(1.0 - alpha, K),
        alpha=alpha,
        p_value=chi_square_survival(statistic, K),
        meta={"K": K},
    )


@dataclass(frozen=True)
class GammaStarSelection:
    """
    Penalty maximizing the off-diagonal Frobenius mass of P_gamma.

    Attributes:
        gamma_star: Largest grid maximizer of sum_{i != j} P_{gamma,ij}^2
        r_n: Numerical rank of Z
        objective_trace: (gamma, objective) at every admissible grid point
    """
    gamma_star: float
    r_n: int
    objective_trace: List[Tuple[float, float]] = field(default_factory=list)


def gamma_star(f: SvdFactors, n: int, grid_size: int = DEFAULT_GRID_SIZE) -> GammaStarSelection:
    """
    Choose the RJAR penalty as the max argmax of K_gamma over the admissible set.

    The admissible set is gamma >= 0 when Z has full column rank and
    gamma >= 1 otherwise; it is scanned on the regularizer search grid.
    If the objective is flat (P_gamma diagonal for every gamma) the grid
    maximum is returned.

    Example:
        >>> gamma_star(svd_factorize(np.ones((2, 1))), 2).gamma_star
        0.0
    """
    lower = 1.0 if f.r < f.n_cols else 0.0
    grid = theta_grid(f, grid_size, lower=lower)
    objective = np.array([leverage_profile(f, g).K_theta for g in grid])
    best = float(objective.max())
    ties = np.flatnonzero(objective >= best - ARGMAX_RELATIVE_TOLERANCE * abs(best))
    choice = float(grid[ties[-1]])
    logger.debug("gamma* = %.6g (objective %.6g, rank %d of %d, n=%d)",
                 choice, best, f.r, f.n_cols, n)
    return GammaStarSelection(
        gamma_star=choice,
        r_n=f.r,
        objective_trace=[(float(g), float(v)) for g, v in zip(grid, objective)],
    )


def rjar(
    sample: PartialledSample,
    h: Hypothesis,
    alpha: float = DEFAULT_ALPHA,
    standardize: bool = True,
    grid_size: int = DEFAULT_GRID_SIZE,
) -> TestResult:
    """
    Ridge-regularized jackknife AR test at the penalty gamma*.

    statistic = sum_{i != j} P_ij e_i e_j / sqrt(2 sum_{i != j} P_ij^2 e_i^2 e_j^2)
    with P = Z (Z'Z + gamma* I)^{-1} Z'; the rank r_n normalizes both the
    numerator and the variance and so cancels.
    """
    prepared = prepare_instruments(sample, standardize)
    f = svd_factorize(prepared.Z)
    selection = gamma_star(f, prepared.n, grid_size)
    P = ridge_projection_at(f, selection.gamma_star)
    e = residuals(prepared, h)
    _, variance, statistic = _jackknife_ratio(e, P)
    return TestResult.from_decision(
        method=Method.RJAR,
        statistic=statistic,
        critical_value=normal_quantile(1.0 - alpha),
        alpha=alpha,
        p_value=normal_survival(statistic),
        meta={"gamma_star": selection.gamma_star, "r_n": selection.r_n,
              "variance": 2.0 * variance / selection.r_n},
    )


def sup_score_bcch(
    sample: PartialledSample,
    h: Hypothesis,
    alpha: float = DEFAULT_ALPHA,
    standardize: bool = True,
) -> TestResult:
    """
    Sup-score test max_j |sum_i e_i Z_ij| / sqrt(sum_i e_i^2 Z_ij^2).

    The critical value is 1.1 q_{1 - alpha / (2K)}(N(0, 1)). Columns with a
    zero denominator are dropped with a warning and K is reduced.

    Raises:
        DegenerateColumn: If every column has a zero denominator

    Example:
        >>> s = PartialledSample(Y=[1.0, 1.0], X=[0.0, 0.0], Z=[[1.0], [1.0]])
        >>> round(sup_score_bcch(s, Hypothesis(0.0)).statistic, 3)
        1.414
    """
    prepared = prepare_instruments(sample, standardize)
    Z = np.asarray(prepared.Z)
    e = residuals(prepared, h)

    scores = np.abs(Z.T @ e)
    scale = np.sqrt((e * e) @ (Z * Z))
    usable = scale > 0.0
    dropped = np.flatnonzero(~usable).tolist()
    if not usable.any():
        raise DegenerateColumn("Every instrument column has a zero sup-score denominator")
    if dropped:
        warnings.warn(
            f"Sup-score test dropped {len(dropped)} instrument column(s) with zero denominator",
            RuntimeWarning,
            stacklevel=2,
        )
    K_eff = int(usable.sum())

    statistic = float(np.max(scores[usable] / scale[usable]))
    p_value = min(1.0, 2.0 * K_eff * normal_survival(statistic / BCCH_CONSTANT))
    return TestResult.from_decision(
        method=Method.BCCH,
        statistic=statistic,
        critical_value=BCCH_CONSTANT * normal_quantile(1.0 - alpha / (2.0 * K_eff)),
        alpha=alpha,
        p_value=p_value,
        meta={"K": K_eff, "dropped_columns": dropped, "c": BCCH_CONSTANT},
    )


def _ct_ratio(E: npt.NDArray[np.float64], P: RidgeProjection) -> npt.NDArray[np.float64]:
    """n e'Pe / (e'e - e'Pe) for each row of a (B, n) stack; 0 where undefined."""
    n = E.shape[-1]
    fitted = np.sum(P.apply(E) * E, axis=-1)
    rest = np.sum(E * E, axis=-1) - fitted
    return np.divide(n * fitted, rest, out=np.zeros_like(fitted), where=rest > 0.0)


def ct_test(
    sample: PartialledSample,
    h: Hypothesis,
    alpha: float = DEFAULT_ALPHA,
    boot_draws: int = DEFAULT_BOOTSTRAP_DRAWS,
    seed: int = DEFAULT_SEED,
    standardize: bool = True,
    threads: Optional[int] = 1,
) -> TestResult:
    """
    Ratio test n e'P e / (e'(I - P) e) at the fixed penalty 0.05.

    The critical value comes from a residual bootstrap. The centered
    restricted residuals are resampled uniformly with replacement and each
    draw is centered again, so it stays orthogonal to an intercept. The
    critical value is the ceil((1 - alpha) B)-th order statistic of the
    recomputed ratios. Draw blocks use their own counter-based streams.

    Raises:
        DegenerateDenominator: If e'(I - P) e = 0

    Example:
        >>> s = PartialledSample(Y=[1.0, 1.0], X=[0.0, 0.0], Z=[[1.0], [0.0]])
        >>> round(ct_test(s, Hypothesis(0.0), standardize=False).statistic, 4)
        1.8182
    """
    if boot_draws < 1:
        raise ValueError(f"boot_draws must be >= 1, got {boot_draws}")
    prepared = prepare_instruments(sample, standardize)
    f = svd_factorize(prepared.Z)
    P = ridge_projection_at(f, CT_REGULARIZER)
    e = residuals(prepared, h)
    n = prepared.n

    fitted = float(np.dot(P.apply(e), e))
    rest = float(np.dot(e, e)) - fitted
    if not rest > 0.0:
        raise DegenerateDenominator("Residual mass outside the regularized projection is zero")
    statistic = n * fitted / rest

    centered = e - e.mean()

    def evaluate(block: int) -> npt.NDArray[np.float64]:
        rows = min(BOOTSTRAP_BLOCK_SIZE, boot_draws - block * BOOTSTRAP_BLOCK_SIZE)
        rng = substream(seed, ROLE_RESIDUAL_BOOTSTRAP, block=block)
        index = rng.integers(0, n, size=(rows, n))
        resampled = centered[index]
        # back onto the partialled space of an intercept control
        return _ct_ratio(resampled - resampled.mean(axis=-1, keepdims=True), P)

    draws = np.concatenate(ordered_map(evaluate, range(block_count(boot_draws)), threads))
    return TestResult.from_decision(
        method=Method.CT,
        statistic=statistic,
        critical_value=upper_order_statistic(draws, alpha),
        alpha=alpha,
        p_value=exceedance_share(statistic, draws),
        meta={"theta": CT_REGULARIZER, "B": boot_draws, "seed": seed,
              "bootstrap": "residual_resampling", "recentered_draws": True},
    )
