"""
pydaar - Data-driven ridge-regularized Anderson-Rubin inference

Tests and confidence sets for the coefficient of one endogenous regressor
in a linear instrumental-variables model with many instruments, robust
to weak identification and to heteroskedastic errors. The bootstrap
test uses a ridge-regularized projection whose penalty is chosen from
the instruments alone.
"""

__version__ = "0.1.0"

from pydaar.core.types import Method, PartialledSample, RawSample, TestResult
from pydaar.inference.dispatch import TestOptions, run_test
from pydaar.inference.ar_test import bs_test
from pydaar.linalg.partial import partial_out
from pydaar.linalg.selection import select_lambda

__all__ = [
    "__version__",
    "Method",
    "PartialledSample",
    "RawSample",
    "TestResult",
    "TestOptions",
    "bs_test",
    "partial_out",
    "run_test",
    "select_lambda",
]
