"""
Dimension-agnostic bootstrap Anderson-Rubin test.

For H0: beta = beta0 the restricted residuals e = Y - X beta0 enter the
jackknifed ridge quadratic form

    Q = sum_{i != j} e_i P_{lambda,ij} e_j / sqrt(K_lambda)

and H0 is rejected when Q exceeds the upper order statistic of the
multiplier-bootstrap draws

    Q* = sum_{i != j} eta_i e_i P_{lambda,ij} eta_j e_j / sqrt(K_lambda)

with i.i.d. Rademacher (or standard normal) multipliers eta.
"""

from dataclasses import dataclass
from typing import Any, Dict, Optional
import logging
import math
import warnings

import numpy as np
import numpy.typing as npt
from scipy import linalg

from pydaar.core.constants import DEFAULT_GRID_SIZE
from pydaar.core.exceptions import ZeroKLambda
from pydaar.core.types import (
    BootstrapConfig,
    Hypothesis,
    InfeasiblePolicy,
    Method,
    PartialledSample,
    TestResult,
)
from pydaar.inference.quantiles import exceedance_share, upper_order_statistic
from pydaar.linalg.partial import prepare_instruments
from pydaar.linalg.ridge import RidgeProjection, ridge_projection_at
from pydaar.linalg.selection import LambdaSelection, select_lambda
from pydaar.linalg.svd import svd_factorize
from pydaar.utils.parallel import ordered_map
from pydaar.utils.streams import block_count, weight_block

logger = logging.getLogger(__name__)


def residuals(sample: PartialledSample, h: Hypothesis) -> npt.NDArray[np.float64]:
    """
    Restricted residuals e(beta0) = Y - X beta0.

    Example:
        >>> s = PartialledSample(Y=[3.0, 1.0], X=[1.0, 2.0], Z=[[1.0], [0.0]])
        >>> residuals(s, Hypothesis(0.5))
        array([2.5, 0. ])
    """
    return sample.Y - sample.X * h.beta0


def _require_mass(P: RidgeProjection) -> float:
    if P.K_theta <= 0.0:
        raise ZeroKLambda("K_theta is zero: the projection has no off-diagonal mass")
    return math.sqrt(P.K_theta)


def q_statistic(e: npt.NDArray[np.float64], P: RidgeProjection) -> float:
    """
    Jackknifed quadratic form (e'Pe - sum_i P_ii e_i^2) / sqrt(K_theta).

    Raises:
        ZeroKLambda: If K_theta = 0

    Example:
        >>> P = RidgeProjection.from_matrix([[0.0, 0.3], [0.3, 0.0]])
        >>> round(q_statistic(np.array([1.0, 1.0]), P), 5)
        1.41421
    """
    scale = _require_mass(P)
    return float(P.off_diagonal_form(np.asarray(e, dtype=np.float64))) / scale


def bootstrap_draw(
    e: npt.NDArray[np.float64],
    P: RidgeProjection,
    eta: npt.NDArray[np.float64],
) -> float:
    """One bootstrap draw, q_statistic(eta * e, P)."""
    return q_statistic(np.asarray(eta, dtype=np.float64) * np.asarray(e, dtype=np.float64), P)


def bootstrap_draws(
    e: npt.NDArray[np.float64],
    P: RidgeProjection,
    cfg: BootstrapConfig,
    threads: Optional[int] = 1,
    weights: Optional[npt.NDArray[np.float64]] = None,
) -> npt.NDArray[np.float64]:
    """
    All B bootstrap draws, evaluated block by block.

    Args:
        e: Restricted residuals, shape (n,)
        P: Ridge projection with K_theta > 0
        cfg: Bootstrap configuration (draws, weight law, seed)
        threads: Worker threads for the blocks
        weights: Precomputed (B, n) multipliers; drawn from cfg.seed when omitted

    Returns:
        Array of shape (B,). Draw d depends only on (cfg.seed, d).
    """
    scale = _require_mass(P)
    e = np.asarray(e, dtype=np.float64)
    n = e.shape[0]

    if weights is not None:
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != (cfg.draws, n):
            raise ValueError(f"weights must have shape {(cfg.draws, n)}, got {weights.shape}")
        return P.off_diagonal_form(weights * e) / scale

    def evaluate(block: int) -> npt.NDArray[np.float64]:
        eta = weight_block(cfg.seed, block, cfg.draws, n, cfg.weight_law)
        return P.off_diagonal_form(eta * e) / scale

    parts = ordered_map(evaluate, range(block_count(cfg.draws)), threads)
    return np.concatenate(parts)


def critical_value(
    e: npt.NDArray[np.float64],
    P: RidgeProjection,
    cfg: BootstrapConfig,
    threads: Optional[int] = 1,
) -> float:
    """
    Bootstrap critical value: the ceil((1 - alpha) B)-th smallest draw.

    Deterministic in (e, P, cfg) whatever the thread count.
    """
    return upper_order_statistic(bootstrap_draws(e, P, cfg, threads), cfg.alpha)


@dataclass(frozen=True, eq=False)
class BsSetup:
    """
    Everything in the BS test that does not depend on beta0.

    Built once by :func:`prepare_bs` and reused across hypotheses, e.g. on
    a confidence-set grid.
    """
    sample: PartialledSample
    projection: RidgeProjection
    selection: Optional[LambdaSelection]
    rank: int
    fallback: Optional[str] = None

    @property
    def lambda_(self) -> float:
        return self.projection.theta

    def meta(self, cfg: BootstrapConfig) -> Dict[str, Any]:
        P = self.projection
        return {
            "lambda": P.theta,
            "K_lambda": P.K_theta,
            "p_n": P.p_n,
            "q_n": P.q_n,
            "theta_bar": None if self.selection is None else self.selection.theta_bar,
            "lambda_feasible": None if self.selection is None else self.selection.feasible,
            "lambda_fallback": self.fallback,
            "r_n": self.rank,
            "B": cfg.draws,
            "seed": cfg.seed,
            "weight_law": cfg.weight_law.value,
        }


def prepare_bs(
    sample: PartialledSample,
    lambda_override: Optional[float] = None,
    standardize: bool = True,
    grid_size: int = DEFAULT_GRID_SIZE,
    on_infeasible: InfeasiblePolicy = InfeasiblePolicy.RAISE,
) -> BsSetup:
    """
    Standardize the instruments, choose lambda and build P_lambda.

    Raises:
        DegenerateInstruments: If no lambda is feasible under the RAISE policy
    """
    prepared = prepare_instruments(sample, standardize)
    f = svd_factorize(prepared.Z)
    on_infeasible = InfeasiblePolicy(on_infeasible)

    selection: Optional[LambdaSelection] = None
    fallback: Optional[str] = None
    if lambda_override is not None:
        lam = float(lambda_override)
    else:
        selection = select_lambda(
            f, prepared.n, grid_size, raise_on_infeasible=on_infeasible is InfeasiblePolicy.RAISE
        )
        if selection.feasible:
            lam = float(selection.lambda_)
        else:
            lam = selection.theta_bar if on_infeasible is InfeasiblePolicy.UPPER else 0.0
            fallback = on_infeasible.value
            warnings.warn(
                f"No feasible ridge penalty; falling back to lambda = {lam:.6g} ({fallback})",
                RuntimeWarning,
                stacklevel=2,
            )

    projection = ridge_projection_at(f, lam)
    logger.debug("BS setup: n=%d K=%d r=%d lambda=%.6g K_lambda=%.6g",
                 prepared.n, prepared.K, f.r, lam, projection.K_theta)
    return BsSetup(sample=prepared, projection=projection, selection=selection,
                   rank=f.r, fallback=fallback)


def bs_test_prepared(
    setup: BsSetup,
    h: Hypothesis,
    cfg: BootstrapConfig,
    threads: Optional[int] = 1,
    weights: Optional[npt.NDArray[np.float64]] = None,
) -> TestResult:
    """Run the BS test for one hypothesis on a prepared setup."""
    e = residuals(setup.sample, h)
    statistic = q_statistic(e, setup.projection)
    draws = bootstrap_draws(e, setup.projection, cfg, threads, weights)
    return TestResult.from_decision(
        method=Method.BS,
        statistic=statistic,
        critical_value=upper_order_statistic(draws, cfg.alpha),
        alpha=cfg.alpha,
        p_value=exceedance_share(statistic, draws),
        meta=setup.meta(cfg),
    )


def bs_test(
    sample: PartialledSample,
    h: Hypothesis,
    cfg: Optional[BootstrapConfig] = None,
    lambda_override: Optional[float] = None,
    standardize: bool = True,
    grid_size: int = DEFAULT_GRID_SIZE,
    on_infeasible: InfeasiblePolicy = InfeasiblePolicy.RAISE,
    threads: Optional[int] = 1,
) -> TestResult:
    """
    Dimension-agnostic bootstrap AR test of H0: beta = beta0.

    Args:
        sample: Partialled sample
        h: Null hypothesis
        cfg: Bootstrap settings (defaults: B = 2000, alpha = 0.05, Rademacher)
        lambda_override: Use this ridge penalty instead of the data-driven one
        standardize: Scale instruments to unit mean square first
        grid_size: Grid size for the lambda search
        on_infeasible: Policy when no lambda satisfies the leverage criteria
        threads: Worker threads for the bootstrap blocks

    Returns:
        TestResult with meta carrying lambda, K_lambda, p_n, q_n, B and seed

    Raises:
        DegenerateInstruments: No feasible lambda under the RAISE policy
        ZeroKLambda: P_lambda has no off-diagonal mass

    Example:
        >>> s = PartialledSample(Y=x, X=x, Z=z)       # zero residuals at beta0 = 1
        >>> bs_test(s, Hypothesis(1.0)).reject
        False
    """
    cfg = cfg or BootstrapConfig()
    setup = prepare_bs(sample, lambda_override, standardize, grid_size, on_infeasible)
    return bs_test_prepared(setup, h, cfg, threads)


def null_spectrum_oracle(
    P: RidgeProjection,
    sigma2: npt.NDArray[np.float64],
) -> npt.NDArray[np.float64]:
    """
    Weights of the fixed-K null law sum_k w_k (chi2_1,k - 1).

    The weights are the eigenvalues of D^{1/2} (P - diag P) D^{1/2} / sqrt(K_theta)
    with D = diag(sigma2); they sum to zero. A projection without
    off-diagonal mass gives all-zero weights.

    Raises:
        ValueError: If some variance is not strictly positive

    Example:
        >>> P = RidgeProjection.from_matrix([[0.0, 0.3], [0.3, 0.0]])
        >>> null_spectrum_oracle(P, np.ones(2)).round(6)
        array([-0.707107,  0.707107])
    """
    sigma2 = np.asarray(sigma2, dtype=np.float64)
    if sigma2.shape != (P.n,):
        raise ValueError(f"sigma2 must have shape ({P.n},), got {sigma2.shape}")
    if np.any(sigma2 <= 0.0):
        raise ValueError("sigma2 must be strictly positive")
    if P.K_theta <= 0.0:
        return np.zeros(P.n)

    off = np.array(P.P, dtype=np.float64)
    np.fill_diagonal(off, 0.0)
    root = np.sqrt(sigma2)
    scaled = root[:, None] * off * root[None, :]
    return linalg.eigvalsh(scaled) / math.sqrt(P.K_theta)
