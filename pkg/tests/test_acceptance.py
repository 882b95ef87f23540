"""
End-to-end checks against reference rejection rates and null laws.

The Monte Carlo runs are long and marked ``slow``; run them with
``pytest -m slow``. Rates use 2000 replications with 2000 bootstrap draws,
where the Monte Carlo standard error at 5% is about 0.005.
"""

from dataclasses import replace

import numpy as np
import pytest

from pydaar.core.constants import REFERENCE_BOOTSTRAP_DRAWS
from pydaar.core.types import BootstrapConfig, Hypothesis, InfeasiblePolicy, Method
from pydaar.inference.ar_test import critical_value, null_spectrum_oracle, prepare_bs, residuals
from pydaar.inference.confidence import beta_grid, invert_test
from pydaar.inference.dispatch import TestOptions, run_test
from pydaar.linalg.partial import partial_out
from pydaar.simulation.dgp import DgpSpec, gen_dkm
from pydaar.simulation.experiment import MonteCarloConfig, run_power_curve, run_size_experiment
from pydaar.simulation.oracles import dkm_local_power, weighted_chisq_quantile

REPLICATIONS = 2000
DRAWS = 2000
RATE_TOLERANCE = 0.015


def desk_config(*tests, **overrides):
    settings = dict(replications=REPLICATIONS, bootstrap_draws=DRAWS, tests=tests, progress=False)
    settings.update(overrides)
    return MonteCarloConfig(**settings)


def assert_rate(table, method, reference, tolerance=RATE_TOLERANCE):
    rate = table.rate(method)
    assert max(0.0, reference - tolerance) <= rate <= reference + tolerance, (
        f"{method.value}: {rate:.4f} vs {reference:.3f}")


def test_gaussian_null_law(dkm_sample):
    """Test that Q under N(0, 2 I) errors follows the weighted chi-square law exactly."""
    setup = prepare_bs(dkm_sample)
    P = setup.projection
    sigma2 = np.full(P.n, 2.0)
    weights = null_spectrum_oracle(P, sigma2)

    rng = np.random.default_rng(2)
    E = np.sqrt(2.0) * rng.standard_normal((40_000, P.n))
    Q = P.off_diagonal_form(E) / np.sqrt(P.K_theta)

    assert abs(Q.mean()) < 0.1
    assert np.quantile(Q, 0.95) == pytest.approx(weighted_chisq_quantile(0.95, weights), rel=0.04)


@pytest.mark.slow
@pytest.mark.parametrize("K, reference", [(1, 0.057), (5, 0.064), (30, 0.055), (90, 0.058),
                                          (190, 0.052)])
def test_dkm_size(K, reference):
    """Test BS null rejection rates on the DKM design across instrument counts."""
    table = run_size_experiment(DgpSpec.dkm(K=K, mu2=30.0), desk_config(Method.BS))
    assert table.row(Method.BS).failures == 0
    assert_rate(table, Method.BS, reference)


@pytest.mark.slow
def test_dkm_competitor_sizes():
    """Test the six benchmark tests at K = 30 on the DKM design."""
    references = {Method.RJAR: 0.063, Method.JAR_STD: 0.063, Method.JAR_CF: 0.093,
                  Method.AR: 0.009, Method.BCCH: 0.006}
    table = run_size_experiment(DgpSpec.dkm(K=30, mu2=30.0),
                                desk_config(*references, Method.CT))
    for method, reference in references.items():
        assert_rate(table, method, reference)
    assert_rate(table, Method.CT, 0.057, tolerance=0.025)


@pytest.mark.slow
@pytest.mark.parametrize("K, reference", [(90, 0.053), (190, 0.050)])
def test_ct_size_with_many_instruments(K, reference):
    """Test the residual bootstrap once Z fills (nearly) all of the centered space."""
    table = run_size_experiment(DgpSpec.dkm(K=K, mu2=30.0), desk_config(Method.CT))
    assert_rate(table, Method.CT, reference, tolerance=0.025)


@pytest.mark.slow
def test_single_instrument_lambda():
    """Test that a single instrument selects theta_bar = n or falls back to 0."""
    mc = MonteCarloConfig(replications=500, bootstrap_draws=99, tests=(Method.BS,),
                          progress=False, on_infeasible=InfeasiblePolicy.ZERO)
    row = run_size_experiment(DgpSpec.dkm(K=1, mu2=30.0), mc).row(Method.BS)
    assert 70.0 <= row.mean_regularizer <= 100.0
    assert row.infeasible > 0


@pytest.mark.slow
@pytest.mark.parametrize("K, mean_lambda", [(1, 92.2), (30, 219.544), (190, 544.167)])
def test_regularizer_means(K, mean_lambda):
    """Test the average selected lambda and gamma* on the DKM design."""
    mc = desk_config(Method.BS, Method.RJAR, replications=500, bootstrap_draws=99)
    table = run_size_experiment(DgpSpec.dkm(K=K, mu2=30.0), mc)
    assert table.row(Method.BS).mean_regularizer == pytest.approx(mean_lambda, rel=0.10)
    gamma = table.row(Method.RJAR).mean_regularizer
    if K == 30:
        assert gamma == 0.0
    elif K == 190:
        assert gamma == pytest.approx(105.493, rel=0.15)


@pytest.mark.slow
@pytest.mark.parametrize("K, references", [
    (10, {Method.BS: 0.065, Method.JAR_CF: 0.100, Method.AR: 0.033}),
    (160, {Method.BS: 0.062, Method.JAR_CF: 0.198, Method.AR: 0.000}),
])
def test_hausman_size(K, references):
    """Test null rejection rates under the heteroskedastic Hausman design."""
    table = run_size_experiment(DgpSpec.hausman(K=K), desk_config(*references))
    for method, reference in references.items():
        tolerance = RATE_TOLERANCE
        if method is Method.JAR_CF and K == 160:
            tolerance = 0.03
        elif method is Method.BS and K == 10:
            # about 45% of replications have no feasible lambda and use theta_bar
            tolerance = 0.03
        assert_rate(table, method, reference, tolerance)


@pytest.mark.slow
def test_fixed_k_oracle():
    """Test BS at lambda = 0 against the weighted chi-square null law for fixed K."""
    spec = DgpSpec.dkm(K=3, mu2=0.0, first_stage="dense", n=2000)

    def unregularized(method, sample, beta0, options):
        return run_test(method, sample, beta0, replace(options, lambda_override=0.0))

    mc = desk_config(Method.BS)
    assert 0.035 <= run_size_experiment(spec, mc, runner=unregularized).rate(Method.BS) <= 0.065

    cfg = BootstrapConfig(draws=REFERENCE_BOOTSTRAP_DRAWS, seed=1)
    ratios = []
    for r in range(10):
        sample = partial_out(gen_dkm(spec, seed=4, replication=r))
        setup = prepare_bs(sample, lambda_override=0.0)
        e = residuals(setup.sample, Hypothesis(spec.beta0))
        weights = null_spectrum_oracle(setup.projection, np.full(spec.n, 2.0))
        ratios.append(critical_value(e, setup.projection, cfg) / weighted_chisq_quantile(0.95, weights))
    assert float(np.median(ratios)) == pytest.approx(1.0, abs=0.05)


@pytest.mark.slow
def test_diverging_k_power():
    """Test BS power on a dense many-instrument design against the normal approximation."""
    null_spec = DgpSpec.dkm(K=90, mu2=90.0, first_stage="dense")
    mc = desk_config(Method.BS, beta_grid=(1.4,))
    simulated = run_power_curve(null_spec, mc).rate(Method.BS)
    expected = dkm_local_power(null_spec.with_beta(1.4), mc.master_seed, 400)
    assert simulated == pytest.approx(expected, abs=0.05)


@pytest.mark.slow
def test_confidence_set_coverage():
    """Test that the BS confidence set covers the true beta in about 95% of samples."""
    spec = DgpSpec.dkm(K=5, mu2=100.0)
    options = TestOptions(draws=499, on_infeasible=InfeasiblePolicy.UPPER)
    covered = 0
    for seed in range(200):
        sample = partial_out(gen_dkm(spec, seed=seed))
        cs = invert_test(Method.BS, sample, beta_grid(0.0, 2.0, 41), options)
        covered += cs.contains(spec.beta)
    assert 0.92 <= covered / 200 <= 0.98
