"""
Method registry.

``run_test`` runs any of the seven procedures by name with one calling
convention; the Monte Carlo harness, the confidence-set inversion and the
CLI all go through it.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Union
import logging

import numpy as np

from pydaar.core.constants import (
    DEFAULT_ALPHA,
    DEFAULT_BOOTSTRAP_DRAWS,
    DEFAULT_GRID_SIZE,
    DEFAULT_SEED,
)
from pydaar.core.types import (
    BootstrapConfig,
    Hypothesis,
    InfeasiblePolicy,
    Method,
    PartialledSample,
    TestResult,
    WeightLaw,
)
from pydaar.inference.ar_test import bs_test_prepared, prepare_bs
from pydaar.inference.competitors import (
    classical_ar,
    ct_test,
    jar_cf,
    jar_std,
    rjar,
    sup_score_bcch,
)
from pydaar.utils.streams import weight_matrix

logger = logging.getLogger(__name__)

# Meta key holding the data-driven regularizer of each method, if any
REGULARIZER_KEYS = {
    Method.BS: "lambda",
    Method.RJAR: "gamma_star",
}


@dataclass(frozen=True)
class TestOptions:
    """
    Settings shared by every method; each method reads the ones it needs.

    Attributes:
        alpha: Nominal level
        draws: Bootstrap draws (BS and CT)
        seed: Bootstrap seed (BS and CT)
        weight_law: Multiplier law (BS)
        standardize: Standardize instruments before testing
        grid_size: Grid size for the lambda and gamma* searches
        on_infeasible: lambda fallback policy (BS)
        lambda_override: Fixed ridge penalty for BS
        threads: Worker threads for bootstrap blocks
    """
    __test__ = False

    alpha: float = DEFAULT_ALPHA
    draws: int = DEFAULT_BOOTSTRAP_DRAWS
    seed: int = DEFAULT_SEED
    weight_law: WeightLaw = WeightLaw.RADEMACHER
    standardize: bool = True
    grid_size: int = DEFAULT_GRID_SIZE
    on_infeasible: InfeasiblePolicy = InfeasiblePolicy.RAISE
    lambda_override: Optional[float] = None
    threads: Optional[int] = 1

    def bootstrap_config(self) -> BootstrapConfig:
        return BootstrapConfig(draws=self.draws, alpha=self.alpha,
                               weight_law=self.weight_law, seed=self.seed)


def make_tester(
    method: Union[Method, str],
    sample: PartialledSample,
    options: Optional[TestOptions] = None,
) -> Callable[[float], TestResult]:
    """
    Return beta0 -> TestResult for a fixed sample.

    For BS the lambda search, the projection and the bootstrap multipliers
    are computed once and shared by every beta0; the multipliers depend on
    (seed, draw) only, so results match independent calls up to rounding.
    """
    method = Method.parse(method) if isinstance(method, str) else Method(method)
    options = options or TestOptions()

    if method is Method.BS:
        cfg = options.bootstrap_config()
        setup = prepare_bs(sample, options.lambda_override, options.standardize,
                           options.grid_size, options.on_infeasible)
        weights = weight_matrix(cfg.seed, cfg.draws, setup.sample.n, cfg.weight_law)

        def bs(beta0: float) -> TestResult:
            return bs_test_prepared(setup, Hypothesis(beta0), cfg, options.threads, weights)

        return bs

    def other(beta0: float) -> TestResult:
        h = Hypothesis(beta0)
        if method is Method.JAR_STD:
            return jar_std(sample, h, options.alpha, options.standardize)
        if method is Method.JAR_CF:
            return jar_cf(sample, h, options.alpha, options.standardize)
        if method is Method.AR:
            return classical_ar(sample, h, options.alpha, options.standardize)
        if method is Method.RJAR:
            return rjar(sample, h, options.alpha, options.standardize, options.grid_size)
        if method is Method.BCCH:
            return sup_score_bcch(sample, h, options.alpha, options.standardize)
        return ct_test(sample, h, options.alpha, options.draws, options.seed,
                       options.standardize, options.threads)

    return other


def run_test(
    method: Union[Method, str],
    sample: PartialledSample,
    beta0: float,
    options: Optional[TestOptions] = None,
) -> TestResult:
    """
    Run one test of H0: beta = beta0.

    Example:
        >>> run_test("bcch", sample, 0.0).method
        <Method.BCCH: 'BCCH'>
    """
    return make_tester(method, sample, options)(beta0)


def regularizer_of(result: TestResult) -> float:
    """The data-driven regularizer recorded in a result, NaN if the method has none."""
    key = REGULARIZER_KEYS.get(result.method)
    if key is None or result.meta.get(key) is None:
        return float(np.nan)
    return float(result.meta[key])
