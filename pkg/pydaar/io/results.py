"""
Result documents.

JSON documents carry ``schema_version`` and are written with sorted keys;
non-finite floats become the strings "inf", "-inf" and "nan" so the output
stays strict JSON. Tables are written as CSV with a fixed column order.
"""

from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Union
import json
import logging
import math

import numpy as np
import pandas as pd

from pydaar.core.constants import SCHEMA_VERSION

logger = logging.getLogger(__name__)


def to_plain(value: Any) -> Any:
    """Recursively convert numpy, enum and non-finite values to JSON-safe ones."""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def json_document(payload: Dict[str, Any]) -> str:
    """
    Serialize a result payload with the schema version added.

    Example:
        >>> json_document({"lambda": float("inf")})
        '{\\n  "lambda": "inf",\\n  "schema_version": "1.0"\\n}'
    """
    document = to_plain(payload)
    document["schema_version"] = SCHEMA_VERSION
    return json.dumps(document, sort_keys=True, indent=2, allow_nan=False)


def write_json(payload: Dict[str, Any], path: Optional[Union[str, Path]] = None) -> str:
    """Serialize ``payload``; also write it to ``path`` when given."""
    text = json_document(payload)
    if path is not None:
        Path(path).write_text(text + "\n", encoding="utf-8")
        logger.info("Wrote %s", path)
    return text


def write_frame_csv(frame: pd.DataFrame, path: Union[str, Path]) -> None:
    """Write a table as CSV, without index, floats at full precision."""
    frame.to_csv(path, index=False, float_format="%.17g")
    logger.info("Wrote %s (%d rows)", path, len(frame))


def confidence_set_frame(grid: np.ndarray, accepted: np.ndarray) -> pd.DataFrame:
    """Per-grid-point acceptance table with columns beta, accepted."""
    return pd.DataFrame({"beta": np.asarray(grid, dtype=np.float64),
                         "accepted": np.asarray(accepted, dtype=bool)})
