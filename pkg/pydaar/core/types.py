"""
Core data types for pydaar.

This module provides the dataclasses shared by every test: the raw and
partialled samples, the null hypothesis, the bootstrap configuration and
the uniform test result.

Model:
    Y~_i = X~_i beta + W_i' Gamma + e~_i        (raw sample)
    Y_i  = X_i beta + e_i                       (after partialling out W)
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional
import math

import numpy as np
import numpy.typing as npt

from pydaar.core.constants import DEFAULT_ALPHA, DEFAULT_BOOTSTRAP_DRAWS, DEFAULT_SEED

FloatArray = npt.NDArray[np.float64]


def _frozen_vector(values: Any, name: str) -> FloatArray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be a vector. Got shape {arr.shape}.")
    arr.setflags(write=False)
    return arr


def _frozen_matrix(values: Any, name: str, n_rows: int) -> FloatArray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a matrix. Got shape {arr.shape}.")
    if arr.shape[0] != n_rows:
        raise ValueError(
            f"{name} must have {n_rows} rows like Y. Got shape {arr.shape}."
        )
    arr.setflags(write=False)
    return arr


class Method(str, Enum):
    """Inference procedures available through the common dispatcher."""

    BS = "BS"
    JAR_STD = "JAR_STD"
    JAR_CF = "JAR_CF"
    AR = "AR"
    RJAR = "RJAR"
    BCCH = "BCCH"
    CT = "CT"

    @classmethod
    def parse(cls, name: str) -> "Method":
        """Parse a user-facing method name (case and dash insensitive)."""
        key = name.strip().upper().replace("-", "_")
        try:
            return cls(key)
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise ValueError(f"Unknown method '{name}'. Choose one of: {choices}") from None


class WeightLaw(str, Enum):
    """Law of the bootstrap multipliers eta_i."""

    RADEMACHER = "rademacher"
    STANDARD_NORMAL = "normal"
    DEGENERATE_ONE = "one"  # test-only: every weight equals 1


class InfeasiblePolicy(str, Enum):
    """What to do when no ridge penalty satisfies the leverage constraints."""

    RAISE = "raise"
    UPPER = "upper"   # fall back to theta_bar
    ZERO = "zero"     # fall back to lambda = 0


@dataclass(frozen=True, eq=False)
class RawSample:
    """
    Observed data before the controls are projected out.

    Attributes:
        Y: Outcome, shape (n,)
        X: Endogenous regressor, shape (n,)
        W: Exogenous controls, shape (n, L); L may be 0
        Z: Instruments, shape (n, K)
    """
    Y: FloatArray
    X: FloatArray
    W: FloatArray
    Z: FloatArray

    def __post_init__(self) -> None:
        y = _frozen_vector(self.Y, "Y")
        n = y.shape[0]
        if n < 2:
            raise ValueError(f"A sample needs at least 2 observations, got {n}")
        object.__setattr__(self, "Y", y)
        object.__setattr__(self, "X", _frozen_vector(self.X, "X"))
        if self.X.shape[0] != n:
            raise ValueError(f"X has {self.X.shape[0]} rows, Y has {n}")
        w = np.zeros((n, 0)) if self.W is None else self.W
        object.__setattr__(self, "W", _frozen_matrix(w, "W", n))
        object.__setattr__(self, "Z", _frozen_matrix(self.Z, "Z", n))

    @property
    def n(self) -> int:
        return int(self.Y.shape[0])

    @property
    def L(self) -> int:
        return int(self.W.shape[1])

    @property
    def K(self) -> int:
        return int(self.Z.shape[1])


@dataclass(frozen=True, eq=False)
class PartialledSample:
    """
    Sample after multiplication by the annihilator M_W of the controls.

    Attributes:
        Y, X: Partialled outcome and regressor, shape (n,)
        Z: Partialled instruments, shape (n, K)
        standardized: True once every Z column has mean square 1
    """
    Y: FloatArray
    X: FloatArray
    Z: FloatArray
    standardized: bool = False

    def __post_init__(self) -> None:
        y = _frozen_vector(self.Y, "Y")
        object.__setattr__(self, "Y", y)
        object.__setattr__(self, "X", _frozen_vector(self.X, "X"))
        if self.X.shape[0] != y.shape[0]:
            raise ValueError(f"X has {self.X.shape[0]} rows, Y has {y.shape[0]}")
        object.__setattr__(self, "Z", _frozen_matrix(self.Z, "Z", y.shape[0]))

    @property
    def n(self) -> int:
        return int(self.Y.shape[0])

    @property
    def K(self) -> int:
        return int(self.Z.shape[1])


@dataclass(frozen=True)
class Hypothesis:
    """Null hypothesis H0: beta = beta0."""
    beta0: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.beta0):
            raise ValueError(f"beta0 must be finite, got {self.beta0}")
        object.__setattr__(self, "beta0", float(self.beta0))


@dataclass(frozen=True)
class BootstrapConfig:
    """
    Multiplier bootstrap settings.

    Attributes:
        draws: Number of bootstrap draws B (>= 1)
        alpha: Nominal level in (0, 1)
        weight_law: Law of the multipliers
        seed: 64-bit seed; draw d always uses the substream keyed by (seed, d)
    """
    draws: int = DEFAULT_BOOTSTRAP_DRAWS
    alpha: float = DEFAULT_ALPHA
    weight_law: WeightLaw = WeightLaw.RADEMACHER
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.draws < 1:
            raise ValueError(f"draws must be >= 1, got {self.draws}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "weight_law", WeightLaw(self.weight_law))


@dataclass(frozen=True)
class TestResult:
    """
    Outcome of one hypothesis test.

    ``reject`` is always ``statistic > critical_value`` (strict); build
    instances through :meth:`from_decision` to keep that invariant.
    """
    __test__ = False  # not a pytest class

    method: Method
    statistic: float
    critical_value: float
    reject: bool
    alpha: float
    p_value: Optional[float] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_decision(
        cls,
        method: Method,
        statistic: float,
        critical_value: float,
        alpha: float,
        p_value: Optional[float] = None,
        meta: Optional[Dict[str, Any]] = None,
    ) -> "TestResult":
        return cls(
            method=method,
            statistic=float(statistic),
            critical_value=float(critical_value),
            reject=bool(statistic > critical_value),
            alpha=float(alpha),
            p_value=None if p_value is None else float(p_value),
            meta=dict(meta or {}),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method.value,
            "statistic": self.statistic,
            "critical_value": self.critical_value,
            "reject": self.reject,
            "alpha": self.alpha,
            "p_value": self.p_value,
            "meta": dict(self.meta),
        }
