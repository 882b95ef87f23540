"""Core module initialization."""

from pydaar.core.types import (
    BootstrapConfig,
    Hypothesis,
    InfeasiblePolicy,
    Method,
    PartialledSample,
    RawSample,
    TestResult,
    WeightLaw,
)
from pydaar.core.constants import VERSION, SCHEMA_VERSION
from pydaar.core import exceptions

__all__ = [
    "BootstrapConfig",
    "Hypothesis",
    "InfeasiblePolicy",
    "Method",
    "PartialledSample",
    "RawSample",
    "TestResult",
    "WeightLaw",
    "VERSION",
    "SCHEMA_VERSION",
    "exceptions",
]
