"""Inference module initialization."""

from pydaar.inference.quantiles import (
    chi_square_quantile,
    normal_quantile,
    upper_order_statistic,
)
from pydaar.inference.ar_test import (
    BsSetup,
    bootstrap_draw,
    bootstrap_draws,
    bs_test,
    critical_value,
    null_spectrum_oracle,
    prepare_bs,
    q_statistic,
    residuals,
)
from pydaar.inference.competitors import (
    GammaStarSelection,
    classical_ar,
    ct_test,
    gamma_star,
    jar_cf,
    jar_std,
    rjar,
    sup_score_bcch,
)
from pydaar.inference.dispatch import TestOptions, make_tester, regularizer_of, run_test
from pydaar.inference.confidence import (
    ConfidenceSet,
    beta_grid,
    compact_intervals,
    invert_test,
    relative_length,
)

__all__ = [
    "chi_square_quantile",
    "normal_quantile",
    "upper_order_statistic",
    "BsSetup",
    "bootstrap_draw",
    "bootstrap_draws",
    "bs_test",
    "critical_value",
    "null_spectrum_oracle",
    "prepare_bs",
    "q_statistic",
    "residuals",
    "GammaStarSelection",
    "classical_ar",
    "ct_test",
    "gamma_star",
    "jar_cf",
    "jar_std",
    "rjar",
    "sup_score_bcch",
    "TestOptions",
    "make_tester",
    "regularizer_of",
    "run_test",
    "ConfidenceSet",
    "beta_grid",
    "compact_intervals",
    "invert_test",
    "relative_length",
]
