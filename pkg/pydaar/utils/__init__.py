"""Utils module initialization."""

from pydaar.utils.streams import (
    ROLE_BOOTSTRAP,
    ROLE_ERRORS,
    ROLE_FIRST_STAGE,
    ROLE_INSTRUMENTS,
    ROLE_RESIDUAL_BOOTSTRAP,
    derived_seed,
    draw_weights,
    stream_key,
    substream,
    weight_block,
    weight_matrix,
)
from pydaar.utils.parallel import available_threads, ordered_map, resolve_threads

__all__ = [
    "ROLE_BOOTSTRAP",
    "ROLE_ERRORS",
    "ROLE_FIRST_STAGE",
    "ROLE_INSTRUMENTS",
    "ROLE_RESIDUAL_BOOTSTRAP",
    "derived_seed",
    "draw_weights",
    "stream_key",
    "substream",
    "weight_block",
    "weight_matrix",
    "available_threads",
    "ordered_map",
    "resolve_threads",
]
