"""Tests for reference quantiles and order statistics."""

import numpy as np
import pytest

from pydaar.inference.quantiles import (
    chi_square_quantile,
    chi_square_survival,
    exceedance_share,
    normal_quantile,
    normal_survival,
    upper_order_statistic,
)


class TestQuantiles:
    """Test normal and chi-square quantiles."""

    def test_normal(self):
        """Test q_0.975(N(0, 1)) = 1.959964."""
        assert normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-5)

    @pytest.mark.parametrize("p", [0.01, 0.2, 0.5, 0.9, 0.999])
    def test_normal_symmetry(self, p):
        """Test q_p = -q_{1-p}."""
        assert normal_quantile(p) == pytest.approx(-normal_quantile(1.0 - p), abs=1e-12)

    def test_chi_square(self):
        """Test q_0.95(chi2_1) = 3.841459."""
        assert chi_square_quantile(0.95, 1) == pytest.approx(3.841459, abs=1e-5)

    def test_survival_inverts_quantile(self):
        """Test that the survival functions invert the quantiles."""
        assert normal_survival(normal_quantile(0.95)) == pytest.approx(0.05)
        assert chi_square_survival(chi_square_quantile(0.95, 7), 7) == pytest.approx(0.05)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.5, 2.0])
    def test_invalid_probability(self, p):
        """Test that p outside (0, 1) is rejected."""
        with pytest.raises(ValueError):
            normal_quantile(p)

    def test_invalid_df(self):
        """Test that df < 1 is rejected."""
        with pytest.raises(ValueError):
            chi_square_quantile(0.5, 0)


class TestOrderStatistics:
    """Test the bootstrap critical value convention."""

    def test_upper_order_statistic(self):
        """Test the ceil((1 - alpha) B)-th smallest of 1..20 at alpha = 0.05."""
        assert upper_order_statistic(np.arange(1.0, 21.0), 0.05) == 19.0

    def test_single_draw(self):
        """Test that B = 1 returns the draw."""
        assert upper_order_statistic(np.array([-2.5]), 0.05) == -2.5

    def test_unsorted(self):
        """Test that input order does not matter."""
        draws = np.array([5.0, 1.0, 4.0, 2.0, 3.0])
        assert upper_order_statistic(draws, 0.2) == 4.0

    def test_empty(self):
        """Test that no draws is an error."""
        with pytest.raises(ValueError):
            upper_order_statistic(np.array([]), 0.05)

    def test_exceedance_share(self):
        """Test the share of draws at or above the statistic."""
        assert exceedance_share(2.0, np.array([1.0, 2.0, 3.0, 4.0])) == pytest.approx(0.75)
