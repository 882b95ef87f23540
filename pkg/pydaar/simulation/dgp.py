"""
Simulation designs.

Two data-generating processes for a scalar endogenous regressor:

- DKM: Gaussian instruments, homoskedastic bivariate normal errors with
  covariance [[2, 1.2], [1.2, 1]] and a sparse or dense first stage scaled
  to a given concentration parameter mu2 = n pi'pi.
- Hausman: polynomial and interacted instruments built from one
  N(0.5, 1) variable, skewed first-stage errors and outcome errors whose
  scale grows with that variable.

Every random quantity comes from a substream keyed by (seed, role,
replication), so replication r depends on (seed, r) only.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional
import logging
import math

import numpy as np
import numpy.typing as npt

from pydaar.core.constants import (
    DKM_DEFAULT_BETA,
    DKM_DEFAULT_N,
    DKM_DENSE_SHARE,
    DKM_ERROR_COVARIANCE,
    DKM_SPARSE_ACTIVE,
    HAUSMAN_DEFAULT_BETA,
    HAUSMAN_DEFAULT_N,
    HAUSMAN_EXP_RATE,
    HAUSMAN_GAMMA,
    HAUSMAN_PHI,
    HAUSMAN_PI_SCALE_K1,
    HAUSMAN_PI_SCALE_MANY,
    HAUSMAN_POLY_DEGREE,
    HAUSMAN_RHO,
    HAUSMAN_V2_SCALE,
    HAUSMAN_Z1_MEAN,
)
from pydaar.core.exceptions import InvalidSparsity, UnsupportedK
from pydaar.core.types import RawSample
from pydaar.utils.streams import ROLE_ERRORS, ROLE_INSTRUMENTS, substream

logger = logging.getLogger(__name__)


class DgpFamily(str, Enum):
    DKM = "dkm"
    HAUSMAN = "hausman"


class FirstStage(str, Enum):
    SPARSE = "sparse"
    DENSE = "dense"
    NOT_APPLICABLE = "na"


# Hypothesized value tested on power curves
NULL_BETA = {DgpFamily.DKM: DKM_DEFAULT_BETA, DgpFamily.HAUSMAN: HAUSMAN_DEFAULT_BETA}


@dataclass(frozen=True)
class DgpSpec:
    """
    Full parameterization of one simulation design.

    Attributes:
        family: DKM or Hausman
        n: Sample size
        K: Number of instruments
        mu2: Concentration parameter n pi'pi (derived for Hausman)
        first_stage: Sparse or dense first stage (DKM only)
        beta: True coefficient
        beta0: Hypothesized coefficient (defaults to beta)
    """
    family: DgpFamily
    n: int
    K: int
    mu2: float = 0.0
    first_stage: FirstStage = FirstStage.NOT_APPLICABLE
    beta: float = 0.0
    beta0: Optional[float] = None

    def __post_init__(self) -> None:
        family = DgpFamily(self.family)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "first_stage", FirstStage(self.first_stage))
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.K < 1:
            raise ValueError(f"K must be >= 1, got {self.K}")
        if self.beta0 is None:
            object.__setattr__(self, "beta0", float(self.beta))

        if family is DgpFamily.DKM:
            if self.mu2 < 0.0:
                raise ValueError(f"mu2 must be >= 0, got {self.mu2}")
            if self.first_stage is FirstStage.NOT_APPLICABLE:
                raise InvalidSparsity("DKM designs need a sparse or dense first stage")
            if self.first_stage is FirstStage.SPARSE and 1 < self.K < DKM_SPARSE_ACTIVE:
                raise InvalidSparsity(
                    f"Sparse first stage needs K = 1 or K >= {DKM_SPARSE_ACTIVE}, got K = {self.K}"
                )
        else:
            if 2 <= self.K < 2 * HAUSMAN_POLY_DEGREE:
                raise UnsupportedK(f"Hausman instruments are defined for K = 1 or K >= 10, got {self.K}")
            object.__setattr__(self, "first_stage", FirstStage.NOT_APPLICABLE)
            object.__setattr__(self, "mu2", self.n * self.K * _hausman_scale(self.K) ** 2)

    @classmethod
    def dkm(
        cls,
        K: int,
        mu2: float,
        first_stage: FirstStage = FirstStage.SPARSE,
        n: int = DKM_DEFAULT_N,
        beta: float = DKM_DEFAULT_BETA,
        beta0: Optional[float] = None,
    ) -> "DgpSpec":
        return cls(DgpFamily.DKM, n=n, K=K, mu2=mu2, first_stage=first_stage, beta=beta, beta0=beta0)

    @classmethod
    def hausman(
        cls,
        K: int,
        n: int = HAUSMAN_DEFAULT_N,
        beta: float = HAUSMAN_DEFAULT_BETA,
        beta0: Optional[float] = None,
    ) -> "DgpSpec":
        return cls(DgpFamily.HAUSMAN, n=n, K=K, beta=beta, beta0=beta0)

    @property
    def delta(self) -> float:
        """Deviation beta - beta0."""
        return self.beta - float(self.beta0)

    def with_beta(self, beta: float) -> "DgpSpec":
        """Same design with data generated at another true beta (beta0 kept)."""
        return DgpSpec(self.family, n=self.n, K=self.K, mu2=self.mu2, first_stage=self.first_stage,
                       beta=float(beta), beta0=self.beta0)


def _hausman_scale(K: int) -> float:
    c = HAUSMAN_PI_SCALE_K1 if K == 1 else HAUSMAN_PI_SCALE_MANY
    return c / math.sqrt(K)


def active_set(spec: DgpSpec) -> npt.NDArray[np.float64]:
    """
    First-stage pattern kappa of a DKM design.

    Sparse: ones on the first five instruments. Dense: ones on the first
    round(0.4 K) instruments, at least one. K = 1 always uses kappa = 1.
    """
    kappa = np.zeros(spec.K)
    if spec.K == 1:
        kappa[0] = 1.0
    elif spec.first_stage is FirstStage.SPARSE:
        kappa[:DKM_SPARSE_ACTIVE] = 1.0
    else:
        kappa[:max(1, int(math.floor(DKM_DENSE_SHARE * spec.K + 0.5)))] = 1.0
    return kappa


def first_stage_coefficients(spec: DgpSpec) -> npt.NDArray[np.float64]:
    """
    The first-stage vector pi of a design.

    Example:
        >>> pi = first_stage_coefficients(DgpSpec.dkm(K=5, mu2=30.0))
        >>> round(100 * float(pi @ pi), 10)
        30.0
    """
    if spec.family is DgpFamily.HAUSMAN:
        return np.full(spec.K, _hausman_scale(spec.K))
    kappa = active_set(spec)
    zeta = math.sqrt(spec.mu2 / (spec.n * float(kappa @ kappa)))
    return zeta * kappa


def gen_dkm(spec: DgpSpec, seed: int, replication: int = 0) -> RawSample:
    """
    Draw one DKM sample.

    Z ~ N(0, I_K), (eps, v) i.i.d. bivariate normal with covariance
    [[2, 1.2], [1.2, 1]], X = Z pi + v, Y = X beta + eps, W = ones.

    Raises:
        InvalidSparsity: Via DgpSpec validation
    """
    if spec.family is not DgpFamily.DKM:
        raise ValueError(f"gen_dkm needs a DKM spec, got {spec.family.value}")
    n, K = spec.n, spec.K
    Z = substream(seed, ROLE_INSTRUMENTS, replication).standard_normal((n, K))
    chol = np.linalg.cholesky(DKM_ERROR_COVARIANCE)
    errors = substream(seed, ROLE_ERRORS, replication).standard_normal((n, 2)) @ chol.T
    eps, v = errors[:, 0], errors[:, 1]

    X = Z @ first_stage_coefficients(spec) + v
    Y = X * spec.beta + eps
    return RawSample(Y=Y, X=X, W=np.ones((n, 1)), Z=Z)


def hausman_instruments(
    z1: npt.NDArray[np.float64],
    D: npt.NDArray[np.float64],
    K: int,
) -> npt.NDArray[np.float64]:
    """
    Instrument matrix (z, z^2, ..., z^5, z D_1, ..., z D_{K-5}), or z D_1 when K = 1.

    Raises:
        UnsupportedK: For 2 <= K <= 9
    """
    if K == 1:
        return (z1 * D[:, 0]).reshape(-1, 1)
    if K < 2 * HAUSMAN_POLY_DEGREE:
        raise UnsupportedK(f"Hausman instruments are defined for K = 1 or K >= 10, got {K}")
    powers = np.column_stack([z1**p for p in range(1, HAUSMAN_POLY_DEGREE + 1)])
    interactions = z1[:, None] * D[:, : K - HAUSMAN_POLY_DEGREE]
    return np.column_stack([powers, interactions])


def gen_hausman(spec: DgpSpec, seed: int, replication: int = 0) -> RawSample:
    """
    Draw one Hausman-style heteroskedastic sample.

    z1 ~ N(0.5, 1); D_k ~ Bernoulli(1/2);
    v1 = z1 (B - 0.5) with B ~ Beta(0.5, 0.5) drawn as sin^2(pi u / 2);
    v2 ~ N(0, 0.86^2); U2 ~ Exponential(rate 0.2) - 5;
    e = rho U2 + sqrt((1 - rho^2) / (phi^2 + 0.86^4)) (phi v1 + 0.86 v2);
    X = Z pi + U2 and Y = X beta + 1 + sqrt(1 + z1^2) e, with W = ones.

    Raises:
        UnsupportedK: For 2 <= K <= 9
    """
    if spec.family is not DgpFamily.HAUSMAN:
        raise ValueError(f"gen_hausman needs a Hausman spec, got {spec.family.value}")
    n, K = spec.n, spec.K

    rng_z = substream(seed, ROLE_INSTRUMENTS, replication)
    z1 = HAUSMAN_Z1_MEAN + rng_z.standard_normal(n)
    D = rng_z.integers(0, 2, size=(n, max(K - HAUSMAN_POLY_DEGREE, 1))).astype(np.float64)
    Z = hausman_instruments(z1, D, K)

    rng_e = substream(seed, ROLE_ERRORS, replication)
    arcsine = np.sin(0.5 * np.pi * rng_e.random(n)) ** 2
    v1 = z1 * (arcsine - 0.5)
    v2 = HAUSMAN_V2_SCALE * rng_e.standard_normal(n)
    U2 = rng_e.exponential(1.0 / HAUSMAN_EXP_RATE, size=n) - 1.0 / HAUSMAN_EXP_RATE

    mix = math.sqrt((1.0 - HAUSMAN_RHO**2) / (HAUSMAN_PHI**2 + HAUSMAN_V2_SCALE**4))
    e = HAUSMAN_RHO * U2 + mix * (HAUSMAN_PHI * v1 + HAUSMAN_V2_SCALE * v2)

    X = Z @ first_stage_coefficients(spec) + U2
    Y = X * spec.beta + HAUSMAN_GAMMA + np.sqrt(1.0 + z1**2) * e
    return RawSample(Y=Y, X=X, W=np.ones((n, 1)), Z=Z)


def generate(spec: DgpSpec, seed: int, replication: int = 0) -> RawSample:
    """Draw one sample from the design family of a DgpSpec."""
    if spec.family is DgpFamily.DKM:
        return gen_dkm(spec, seed, replication)
    return gen_hausman(spec, seed, replication)
