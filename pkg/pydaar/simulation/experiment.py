"""
Monte Carlo harness for size tables and power curves.

Replication r draws its data from substreams keyed by (master_seed, r) and
its bootstrap weights from a seed derived from the same pair, so every
replication is independent of the others and of the thread schedule.
Per-replication outcomes are reduced in replication order.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union
import logging
import math
import warnings

import numpy as np
import pandas as pd
from tqdm import tqdm

from pydaar.core.constants import (
    DEFAULT_ALPHA,
    DEFAULT_BOOTSTRAP_DRAWS,
    DEFAULT_GRID_SIZE,
    DEFAULT_REPLICATIONS,
    DEFAULT_SEED,
)
from pydaar.core.exceptions import PydaarError
from pydaar.core.types import InfeasiblePolicy, Method, PartialledSample, TestResult
from pydaar.inference.dispatch import TestOptions, regularizer_of, run_test
from pydaar.linalg.partial import partial_out, standardize_instruments
from pydaar.simulation.dgp import DgpSpec, generate
from pydaar.utils.parallel import resolve_threads
from pydaar.utils.streams import ROLE_BOOTSTRAP, derived_seed

logger = logging.getLogger(__name__)

TABLE_COLUMNS = [
    "method", "K", "beta", "rejection_rate", "mc_se", "mean_regularizer", "failures", "infeasible",
]

Runner = Callable[[Method, PartialledSample, float, TestOptions], TestResult]


@dataclass(frozen=True)
class MonteCarloConfig:
    """
    Settings of a Monte Carlo experiment.

    Attributes:
        replications: Number of replications R
        bootstrap_draws: Bootstrap draws B per test
        alpha: Nominal level
        master_seed: Seed of every stream in the experiment
        tests: Methods to run on each replication
        beta_grid: True beta values for a power curve
        threads: Worker threads over replications (None: all CPUs)
        progress: Show a tqdm bar on stderr
        on_infeasible: lambda fallback policy for BS
        grid_size: Grid size for the lambda and gamma* searches
    """
    replications: int = DEFAULT_REPLICATIONS
    bootstrap_draws: int = DEFAULT_BOOTSTRAP_DRAWS
    alpha: float = DEFAULT_ALPHA
    master_seed: int = DEFAULT_SEED
    tests: Tuple[Method, ...] = (Method.BS,)
    beta_grid: Optional[Tuple[float, ...]] = None
    threads: Optional[int] = None
    progress: bool = True
    on_infeasible: InfeasiblePolicy = InfeasiblePolicy.UPPER
    grid_size: int = DEFAULT_GRID_SIZE

    def __post_init__(self) -> None:
        if self.replications < 1:
            raise ValueError(f"replications must be >= 1, got {self.replications}")
        if self.bootstrap_draws < 1:
            raise ValueError(f"bootstrap_draws must be >= 1, got {self.bootstrap_draws}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0, 1), got {self.alpha}")
        tests = tuple(Method.parse(t) if isinstance(t, str) else Method(t) for t in self.tests)
        if not tests:
            raise ValueError("At least one test is required")
        object.__setattr__(self, "tests", tests)
        if self.beta_grid is not None:
            object.__setattr__(self, "beta_grid", tuple(float(b) for b in self.beta_grid))
        object.__setattr__(self, "on_infeasible", InfeasiblePolicy(self.on_infeasible))

    def options(self, seed: int) -> TestOptions:
        return TestOptions(alpha=self.alpha, draws=self.bootstrap_draws, seed=seed,
                           on_infeasible=self.on_infeasible, grid_size=self.grid_size, threads=1)


@dataclass(frozen=True)
class MethodOutcome:
    """One method on one replication."""
    rejected: bool = False
    failed: bool = False
    regularizer: float = math.nan
    infeasible: bool = False


@dataclass(frozen=True)
class RejectionRow:
    method: Method
    K: int
    beta: float
    rejection_rate: float
    mc_se: float
    mean_regularizer: float
    failures: int
    infeasible: int
    replications: int

    @property
    def rejections(self) -> int:
        return int(round(self.rejection_rate * self.replications))


@dataclass
class RejectionTable:
    """Rejection rates keyed by (method, K, beta)."""
    rows: List[RejectionRow] = field(default_factory=list)

    def row(self, method: Union[Method, str], beta: Optional[float] = None) -> RejectionRow:
        method = Method.parse(method) if isinstance(method, str) else method
        for r in self.rows:
            if r.method is method and (beta is None or math.isclose(r.beta, beta)):
                return r
        raise KeyError(f"No row for method {method.value} at beta={beta}")

    def rate(self, method: Union[Method, str], beta: Optional[float] = None) -> float:
        return self.row(method, beta).rejection_rate

    def to_frame(self) -> pd.DataFrame:
        records = [
            {"method": r.method.value, "K": r.K, "beta": r.beta,
             "rejection_rate": r.rejection_rate, "mc_se": r.mc_se,
             "mean_regularizer": r.mean_regularizer, "failures": r.failures,
             "infeasible": r.infeasible}
            for r in self.rows
        ]
        return pd.DataFrame.from_records(records, columns=TABLE_COLUMNS)

    def extend(self, other: "RejectionTable") -> None:
        self.rows.extend(other.rows)


def _replication(
    spec: DgpSpec,
    mc: MonteCarloConfig,
    r: int,
    runner: Runner,
) -> Dict[Method, MethodOutcome]:
    try:
        sample = standardize_instruments(partial_out(generate(spec, mc.master_seed, r)))
    except (PydaarError, np.linalg.LinAlgError) as exc:
        logger.debug("Replication %d: data preparation failed (%s)", r, exc)
        return {m: MethodOutcome(failed=True) for m in mc.tests}

    options = mc.options(derived_seed(mc.master_seed, ROLE_BOOTSTRAP, r))
    outcomes: Dict[Method, MethodOutcome] = {}
    for method in mc.tests:
        try:
            result = runner(method, sample, float(spec.beta0), options)
        except (PydaarError, np.linalg.LinAlgError) as exc:
            logger.debug("Replication %d: %s failed (%s)", r, method.value, exc)
            outcomes[method] = MethodOutcome(failed=True)
            continue
        outcomes[method] = MethodOutcome(
            rejected=result.reject,
            regularizer=regularizer_of(result),
            infeasible=result.meta.get("lambda_fallback") is not None,
        )
    return outcomes


def _default_runner(method: Method, sample: PartialledSample, beta0: float,
                    options: TestOptions) -> TestResult:
    return run_test(method, sample, beta0, options)


def _tabulate(spec: DgpSpec, mc: MonteCarloConfig,
              outcomes: Sequence[Dict[Method, MethodOutcome]]) -> RejectionTable:
    R = mc.replications
    table = RejectionTable()
    for method in mc.tests:
        per_rep = [o[method] for o in outcomes]
        rejections = sum(1 for o in per_rep if o.rejected)
        regularizers = [o.regularizer for o in per_rep if not o.failed and not math.isnan(o.regularizer)]
        p = rejections / R
        table.rows.append(RejectionRow(
            method=method,
            K=spec.K,
            beta=float(spec.beta),
            rejection_rate=p,
            mc_se=math.sqrt(p * (1.0 - p) / R),
            mean_regularizer=float(np.mean(regularizers)) if regularizers else math.nan,
            failures=sum(1 for o in per_rep if o.failed),
            infeasible=sum(1 for o in per_rep if o.infeasible),
            replications=R,
        ))
    return table


def _run(spec: DgpSpec, mc: MonteCarloConfig, runner: Runner, label: str) -> RejectionTable:
    threads = min(resolve_threads(mc.threads), mc.replications)

    def work(r: int) -> Dict[Method, MethodOutcome]:
        return _replication(spec, mc, r, runner)

    bar = tqdm(total=mc.replications, desc=label, disable=not mc.progress, leave=False)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        if threads == 1:
            outcomes = []
            for r in range(mc.replications):
                outcomes.append(work(r))
                bar.update()
        else:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                outcomes = []
                for outcome in pool.map(work, range(mc.replications)):
                    outcomes.append(outcome)
                    bar.update()
    bar.close()
    return _tabulate(spec, mc, outcomes)


def run_size_experiment(
    spec: DgpSpec,
    mc: MonteCarloConfig,
    runner: Optional[Runner] = None,
) -> RejectionTable:
    """
    Null rejection rates of each requested test.

    Failures (any pydaar error in a replication) count as non-rejections
    and are reported in the ``failures`` column; the rate is always over
    all R replications.

    Raises:
        ValueError: If spec.beta0 differs from spec.beta
    """
    if not math.isclose(float(spec.beta0), spec.beta, rel_tol=0.0, abs_tol=1e-12):
        raise ValueError(f"Size experiments need beta0 = beta, got {spec.beta0} and {spec.beta}")
    logger.info("Size experiment: %s n=%d K=%d mu2=%.4g R=%d B=%d",
                spec.family.value, spec.n, spec.K, spec.mu2, mc.replications, mc.bootstrap_draws)
    table = _run(spec, mc, runner or _default_runner, f"{spec.family.value} K={spec.K}")
    for row in table.rows:
        logger.info("%s: rejection rate %.4f (se %.4f, failures %d)",
                    row.method.value, row.rejection_rate, row.mc_se, row.failures)
    return table


def run_power_curve(
    spec: DgpSpec,
    mc: MonteCarloConfig,
    runner: Optional[Runner] = None,
) -> RejectionTable:
    """
    Rejection rates of H0: beta = spec.beta0 for data generated at each grid beta.

    Replication r uses the same seeds at every grid point, so the grid point
    beta = beta0 reproduces the size experiment exactly.

    Raises:
        ValueError: If mc.beta_grid is missing or empty
    """
    if not mc.beta_grid:
        raise ValueError("A power curve needs a non-empty beta_grid")
    runner = runner or _default_runner
    table = RejectionTable()
    for beta in mc.beta_grid:
        logger.info("Power curve point beta=%.4g (beta0=%.4g)", beta, spec.beta0)
        table.extend(_run(spec.with_beta(beta), mc, runner, f"beta={beta:.3g}"))
    return table
