"""Tests for the Monte Carlo harness."""

import math

import numpy as np
import pandas as pd
import pytest

from pydaar.core.exceptions import SingularGram
from pydaar.core.types import Method, TestResult
from pydaar.simulation.dgp import DgpSpec
from pydaar.simulation.experiment import (
    TABLE_COLUMNS,
    MonteCarloConfig,
    run_power_curve,
    run_size_experiment,
)

SPEC = DgpSpec.dkm(K=5, mu2=30.0)


def constant_runner(statistic):
    def runner(method, sample, beta0, options):
        return TestResult.from_decision(method, statistic, 0.0, options.alpha)
    return runner


def failing_runner(method, sample, beta0, options):
    raise SingularGram("always singular")


def seed_runner(method, sample, beta0, options):
    """Rejects on an odd bootstrap seed, so the outcome depends only on the replication."""
    return TestResult.from_decision(method, float(options.seed % 2), 0.5, options.alpha)


def config(**kwargs):
    kwargs.setdefault("replications", 20)
    kwargs.setdefault("progress", False)
    kwargs.setdefault("threads", 1)
    return MonteCarloConfig(**kwargs)


class TestMonteCarloConfig:
    def test_methods_parsed(self):
        assert config(tests=("bs", "jar-std")).tests == (Method.BS, Method.JAR_STD)

    @pytest.mark.parametrize("kwargs", [{"replications": 0}, {"bootstrap_draws": 0},
                                        {"alpha": 1.0}, {"tests": ()}])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            config(**kwargs)


class TestSizeExperiment:
    """Test rejection counting with stub runners."""

    def test_never_rejects(self):
        table = run_size_experiment(SPEC, config(), runner=constant_runner(-math.inf))
        row = table.row(Method.BS)
        assert row.rejection_rate == 0.0
        assert row.mc_se == 0.0
        assert row.failures == 0

    def test_always_rejects(self):
        table = run_size_experiment(SPEC, config(), runner=constant_runner(1.0))
        assert table.rate("BS") == 1.0
        assert table.row("BS").mc_se == 0.0

    def test_failures_are_non_rejections(self):
        row = run_size_experiment(SPEC, config(), runner=failing_runner).row(Method.BS)
        assert row.rejection_rate == 0.0
        assert row.failures == 20
        assert math.isnan(row.mean_regularizer)

    def test_monte_carlo_standard_error(self):
        row = run_size_experiment(SPEC, config(), runner=seed_runner).row(Method.BS)
        p = row.rejection_rate
        assert 0.0 < p < 1.0
        assert row.mc_se == pytest.approx(math.sqrt(p * (1 - p) / 20))
        assert row.rejections == round(20 * p)

    def test_thread_count_irrelevant(self):
        """Test identical tables with one and three worker threads."""
        single = run_size_experiment(SPEC, config(threads=1), runner=seed_runner).to_frame()
        multi = run_size_experiment(SPEC, config(threads=3), runner=seed_runner).to_frame()
        pd.testing.assert_frame_equal(single, multi)

    def test_frame_columns(self):
        frame = run_size_experiment(SPEC, config(tests=("BS", "AR")),
                                    runner=constant_runner(1.0)).to_frame()
        assert list(frame.columns) == TABLE_COLUMNS
        assert list(frame["method"]) == ["BS", "AR"]

    def test_needs_null(self):
        with pytest.raises(ValueError):
            run_size_experiment(SPEC.with_beta(2.0), config(), runner=seed_runner)

    def test_missing_row(self):
        table = run_size_experiment(SPEC, config(), runner=seed_runner)
        with pytest.raises(KeyError):
            table.row(Method.CT)

    def test_real_run(self):
        """Test a short run of the actual tests."""
        mc = config(replications=4, bootstrap_draws=49, tests=("BS", "JAR_STD", "BCCH"))
        frame = run_size_experiment(SPEC, mc).to_frame()
        assert frame["failures"].sum() == 0
        assert frame["rejection_rate"].between(0.0, 1.0).all()
        bs = frame.set_index("method").loc["BS"]
        assert bs["mean_regularizer"] >= 0.0


class TestPowerCurve:
    """Test power curves over a grid of true betas."""

    def test_needs_grid(self):
        with pytest.raises(ValueError):
            run_power_curve(SPEC, config(), runner=seed_runner)

    def test_rows_per_grid_point(self):
        table = run_power_curve(SPEC, config(beta_grid=(0.0, 1.0, 2.0)), runner=seed_runner)
        assert [row.beta for row in table.rows] == [0.0, 1.0, 2.0]

    def test_null_point_reproduces_size(self):
        """Test that beta = beta0 on the curve equals the size experiment."""
        mc = config(replications=6, bootstrap_draws=49, tests=("BS", "AR"), beta_grid=(1.0, 3.0))
        curve = run_power_curve(SPEC, mc)
        size = run_size_experiment(SPEC, mc)
        for method in (Method.BS, Method.AR):
            assert curve.rate(method, 1.0) == size.rate(method)

    def test_power_rises_far_from_null(self):
        mc = config(replications=10, tests=("AR",), beta_grid=(1.0, 6.0))
        curve = run_power_curve(DgpSpec.dkm(K=5, mu2=200.0), mc)
        assert curve.rate("AR", 6.0) >= curve.rate("AR", 1.0)
        assert np.isnan(curve.row("AR", 6.0).mean_regularizer)
