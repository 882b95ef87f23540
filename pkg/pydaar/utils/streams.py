"""
Counter-based random streams.

Every random quantity in pydaar is drawn from a Philox generator whose key
is derived from (seed, role, ids...) and whose counter selects a block.
Draws therefore depend only on their coordinates, never on the order in
which blocks or replications are evaluated, so results are bit-identical
for any thread count.
"""

from typing import Tuple
import logging
import math

import numpy as np
import numpy.typing as npt

from pydaar.core.constants import BOOTSTRAP_BLOCK_SIZE
from pydaar.core.types import WeightLaw

logger = logging.getLogger(__name__)

# Stream roles
ROLE_BOOTSTRAP = 0
ROLE_INSTRUMENTS = 1
ROLE_ERRORS = 2
ROLE_FIRST_STAGE = 3
ROLE_RESIDUAL_BOOTSTRAP = 4

# The block index occupies the top 64-bit word of the 256-bit Philox counter
_BLOCK_SHIFT = 192


def stream_key(seed: int, role: int, *ids: int) -> npt.NDArray[np.uint64]:
    """128-bit Philox key for the stream addressed by (seed, role, ids)."""
    entropy = [int(seed), int(role)] + [int(i) for i in ids]
    return np.random.SeedSequence(entropy).generate_state(2, np.uint64)


def derived_seed(seed: int, role: int, *ids: int) -> int:
    """64-bit seed for a child computation addressed by (seed, role, ids)."""
    return int(stream_key(seed, role, *ids)[0])


def substream(seed: int, role: int, *ids: int, block: int = 0) -> np.random.Generator:
    """
    Generator for one addressed stream.

    Example:
        >>> a = substream(7, ROLE_ERRORS, 3).standard_normal(2)
        >>> b = substream(7, ROLE_ERRORS, 3).standard_normal(2)
        >>> bool(np.all(a == b))
        True
    """
    bit_generator = np.random.Philox(key=stream_key(seed, role, *ids), counter=int(block) << _BLOCK_SHIFT)
    return np.random.Generator(bit_generator)


def draw_weights(rng: np.random.Generator, shape: Tuple[int, int], law: WeightLaw) -> npt.NDArray[np.float64]:
    """Multipliers eta with E eta = 0 and E eta^2 = 1 (or identically one)."""
    law = WeightLaw(law)
    if law is WeightLaw.RADEMACHER:
        return 2.0 * rng.integers(0, 2, size=shape).astype(np.float64) - 1.0
    if law is WeightLaw.STANDARD_NORMAL:
        return rng.standard_normal(shape)
    return np.ones(shape, dtype=np.float64)


def block_count(draws: int, block_size: int = BOOTSTRAP_BLOCK_SIZE) -> int:
    return int(math.ceil(draws / block_size))


def weight_block(
    seed: int,
    block: int,
    draws: int,
    n: int,
    law: WeightLaw,
    role: int = ROLE_BOOTSTRAP,
    block_size: int = BOOTSTRAP_BLOCK_SIZE,
) -> npt.NDArray[np.float64]:
    """
    Rows [block * block_size, min(draws, (block + 1) * block_size)) of the weight matrix.

    Row d of the full matrix depends on (seed, d) only.
    """
    start = block * block_size
    rows = min(block_size, draws - start)
    if rows <= 0:
        return np.empty((0, n), dtype=np.float64)
    return draw_weights(substream(seed, role, block=block), (rows, n), law)


def weight_matrix(
    seed: int,
    draws: int,
    n: int,
    law: WeightLaw,
    role: int = ROLE_BOOTSTRAP,
) -> npt.NDArray[np.float64]:
    """
    Full (draws, n) matrix of bootstrap multipliers, assembled block by block.

    Args:
        seed: 64-bit seed
        draws: Number of rows B
        n: Number of observations
        law: Weight law
        role: Stream role (bootstrap multipliers by default)
    """
    blocks = [weight_block(seed, b, draws, n, law, role) for b in range(block_count(draws))]
    return np.vstack(blocks) if blocks else np.empty((0, n), dtype=np.float64)
