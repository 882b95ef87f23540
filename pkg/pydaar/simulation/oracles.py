"""
Analytic reference laws for validating the bootstrap test.

- Weighted chi-square law of sum_k w_k (chi2_1,k(d_k) - 1): survival
  function by Imhof's numerical inversion of the characteristic function,
  quantile by Brent root finding, plus a Monte Carlo quantile.
- Fixed-K local power from the weights and the noncentrality of each
  component.
- Diverging-K local power Phi(mu - z_{1-alpha}) with

      mu  = Delta^2 sum_{i != j} Pi_i P_ij Pi_j / sqrt(K_lambda) / sqrt(Psi)
      Psi = 2 sum_{i != j} s_i^2 P_ij^2 s_j^2 / K_lambda

  computed from known first-stage means Pi and error variances s^2.
"""

from typing import Optional, Sequence
import logging
import math

import numpy as np
import numpy.typing as npt
from scipy import integrate, optimize

from pydaar.core.constants import DEFAULT_ALPHA, DKM_ERROR_COVARIANCE
from pydaar.core.types import InfeasiblePolicy, RawSample
from pydaar.inference.ar_test import prepare_bs
from pydaar.inference.competitors import jackknife_variance_sum
from pydaar.inference.quantiles import normal_quantile, normal_survival
from pydaar.linalg.partial import partial_out, residualize
from pydaar.linalg.ridge import RidgeProjection
from pydaar.simulation.dgp import DgpFamily, DgpSpec, first_stage_coefficients, gen_dkm
from pydaar.utils.streams import substream

logger = logging.getLogger(__name__)

# Weights below this share of the largest one are dropped
_NEGLIGIBLE_WEIGHT = 1e-12
# Stream role of oracle simulations
_ROLE_ORACLE = 99
# Adaptive quadrature settings for the Imhof integral
_QUAD_LIMIT = 400
_QUAD_EPSABS = 1e-11
_FOURIER_CYCLES = 200


def _clean(weights: Sequence[float], noncentrality: Optional[Sequence[float]]):
    w = np.asarray(weights, dtype=np.float64).ravel()
    d = np.zeros_like(w) if noncentrality is None else np.asarray(noncentrality, dtype=np.float64).ravel()
    if d.shape != w.shape:
        raise ValueError("weights and noncentrality must have the same length")
    if np.any(d < 0.0):
        raise ValueError("noncentrality must be >= 0")
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    keep = np.abs(w) > _NEGLIGIBLE_WEIGHT * scale if scale > 0.0 else np.zeros(w.shape, dtype=bool)
    return w[keep], d[keep], float(np.sum(w))


def weighted_chisq_sf(
    x: float,
    weights: Sequence[float],
    noncentrality: Optional[Sequence[float]] = None,
) -> float:
    """
    P(sum_k w_k (chi2_1(d_k) - 1) > x) by Imhof's formula.

    Args:
        x: Threshold
        weights: Weights w_k (any sign)
        noncentrality: Noncentrality d_k >= 0 of each component (default 0)

    Returns:
        Upper tail probability, clipped to [0, 1]

    Example:
        >>> round(weighted_chisq_sf(3.841459 - 1.0, [1.0]), 4)
        0.05
    """
    w, d, total = _clean(weights, noncentrality)
    # uncentered threshold for sum_k w_k chi2_1(d_k)
    t = float(x) + total
    if w.size == 0:
        return 1.0 if t < 0.0 else 0.0

    def phase(u: float) -> float:
        wu = w * u
        return 0.5 * float(np.sum(np.arctan(wu) + d * wu / (1.0 + wu * wu)))

    def amplitude(u: float) -> float:
        wu = w * u
        denom = 1.0 + wu * wu
        log_rho = 0.25 * np.sum(np.log(denom)) + 0.5 * np.sum(d * wu * wu / denom)
        return 1.0 / (u * math.exp(log_rho))

    omega = 0.5 * t
    # integrand(u) -> theta'(0) as u -> 0
    slope = 0.5 * float(np.sum(w * (1.0 + d))) - omega

    def integrand(u: float) -> float:
        if u == 0.0:
            return slope
        return math.sin(phase(u) - omega * u) * amplitude(u)

    split = 1.0 / float(np.max(np.abs(w)))
    head, _ = integrate.quad(integrand, 0.0, split, limit=_QUAD_LIMIT, epsabs=_QUAD_EPSABS)
    if abs(omega) * split < _NEGLIGIBLE_WEIGHT:
        tail, _ = integrate.quad(integrand, split, np.inf, limit=_QUAD_LIMIT, epsabs=_QUAD_EPSABS)
    else:
        # sin(phase - omega u) = sin(phase) cos(omega u) - cos(phase) sin(omega u); the
        # oscillating tail goes to the Fourier-integral rule over successive cycles
        frequency = abs(omega)
        cos_part, _ = integrate.quad(
            lambda u: math.sin(phase(u)) * amplitude(u), split, np.inf,
            weight="cos", wvar=frequency, limlst=_FOURIER_CYCLES, epsabs=_QUAD_EPSABS,
        )
        sin_part, _ = integrate.quad(
            lambda u: math.cos(phase(u)) * amplitude(u), split, np.inf,
            weight="sin", wvar=frequency, limlst=_FOURIER_CYCLES, epsabs=_QUAD_EPSABS,
        )
        tail = cos_part - math.copysign(1.0, omega) * sin_part
    return float(min(1.0, max(0.0, 0.5 + (head + tail) / math.pi)))


def weighted_chisq_quantile(
    p: float,
    weights: Sequence[float],
    tol: float = 1e-8,
) -> float:
    """
    The p-quantile of sum_k w_k (chi2_1 - 1), by bracketing and Brent's method.

    Raises:
        ValueError: If p is not in (0, 1)
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0, 1), got {p}")
    w, _, _ = _clean(weights, None)
    if w.size == 0:
        return 0.0

    target = 1.0 - p
    func = lambda x: weighted_chisq_sf(x, w) - target  # noqa: E731
    spread = math.sqrt(2.0 * float(np.sum(w * w)))
    lo, hi = -spread, spread
    while func(hi) > 0.0:
        lo, hi = hi, hi * 2.0
    while func(lo) < 0.0:
        hi, lo = lo, lo * 2.0
    return float(optimize.brentq(func, lo, hi, xtol=tol * spread))


def weighted_chisq_mc_quantile(
    p: float,
    weights: Sequence[float],
    draws: int = 1_000_000,
    seed: int = 0,
    chunk: int = 10_000,
) -> float:
    """Monte Carlo p-quantile of sum_k w_k (g_k^2 - 1), g_k i.i.d. N(0, 1)."""
    w, _, _ = _clean(weights, None)
    if w.size == 0:
        return 0.0
    values = np.empty(draws)
    for block, start in enumerate(range(0, draws, chunk)):
        rows = min(chunk, draws - start)
        g = substream(seed, _ROLE_ORACLE, block=block).standard_normal((rows, w.size))
        values[start:start + rows] = (g * g - 1.0) @ w
    return float(np.quantile(values, p))


def fixed_k_power(
    weights: Sequence[float],
    shifts: Sequence[float],
    alpha: float = DEFAULT_ALPHA,
) -> float:
    """
    Local power P(sum_k w_k ((g_k + nu_k)^2 - 1) > C(1 - alpha)).

    C is the (1 - alpha) quantile of the null law with the same weights.
    Both the quantile and the tail use Imhof's formula.
    """
    nu = np.asarray(shifts, dtype=np.float64)
    critical = weighted_chisq_quantile(1.0 - alpha, weights)
    return weighted_chisq_sf(critical, weights, nu * nu)


def diverging_k_mu(
    P: RidgeProjection,
    Pi: npt.NDArray[np.float64],
    delta: float,
    sigma2: npt.NDArray[np.float64],
) -> float:
    """
    Mean shift mu of the normalized statistic under a local alternative.

    Args:
        P: Ridge projection at the selected lambda
        Pi: Partialled first-stage mean, shape (n,)
        delta: beta - beta0
        sigma2: Variances of the restricted errors e_i(beta0), shape (n,)
    """
    Pi = np.asarray(Pi, dtype=np.float64)
    sigma2 = np.asarray(sigma2, dtype=np.float64)
    if P.K_theta <= 0.0:
        raise ValueError("K_theta must be positive")
    signal = delta**2 * float(P.off_diagonal_form(Pi)) / math.sqrt(P.K_theta)
    psi = 2.0 * jackknife_variance_sum(P, sigma2) / P.K_theta
    return signal / math.sqrt(psi)


def diverging_k_power(mu: float, alpha: float = DEFAULT_ALPHA) -> float:
    """Phi(mu - z_{1-alpha})."""
    return normal_survival(normal_quantile(1.0 - alpha) - mu)


def dkm_error_variance(delta: float) -> float:
    """Variance of eps + v delta in the DKM design: 2 + 2.4 delta + delta^2."""
    s = DKM_ERROR_COVARIANCE
    return float(s[0, 0] + 2.0 * s[0, 1] * delta + s[1, 1] * delta**2)


def dkm_local_power(
    spec: DgpSpec,
    seed: int,
    replications: int,
    alpha: float = DEFAULT_ALPHA,
) -> float:
    """
    Average diverging-K power over the instrument draws of a DKM experiment.

    Replication r uses the same instruments as replication r of the Monte
    Carlo harness with the same seed, and the lambda the BS test selects on
    them.
    """
    if spec.family is not DgpFamily.DKM:
        raise ValueError("dkm_local_power needs a DKM spec")
    pi = first_stage_coefficients(spec)
    sigma2 = np.full(spec.n, dkm_error_variance(spec.delta))
    powers = []
    for r in range(replications):
        raw: RawSample = gen_dkm(spec, seed, r)
        setup = prepare_bs(partial_out(raw), on_infeasible=InfeasiblePolicy.UPPER)
        Pi = residualize(raw.W, raw.Z @ pi)
        mu = diverging_k_mu(setup.projection, Pi, spec.delta, sigma2)
        powers.append(diverging_k_power(mu, alpha))
    return float(np.mean(powers))
