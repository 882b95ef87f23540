"""
CSV data ingestion.

Files have a header row, UTF-8 text and '.' as decimal separator. Column
roles (outcome, endogenous regressor, controls, instruments) are assigned
by name; instruments may also be selected by a name prefix.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Sequence, Tuple, Union
import logging

import numpy as np
import pandas as pd

from pydaar.core.exceptions import CsvParseError, MissingColumn, NonFinite
from pydaar.core.types import RawSample

logger = logging.getLogger(__name__)

PREFIX_MARKER = "prefix:"


def split_names(value: Union[str, Sequence[str], None]) -> Tuple[str, ...]:
    """Split a comma-separated option value into stripped names."""
    if value is None:
        return ()
    if isinstance(value, str):
        return tuple(part.strip() for part in value.split(",") if part.strip())
    return tuple(str(v).strip() for v in value if str(v).strip())


@dataclass(frozen=True)
class ColumnRoles:
    """
    Assignment of file columns to model roles.

    Attributes:
        outcome: Outcome column
        endogenous: Endogenous regressor column
        controls: Control columns (may be empty)
        instruments: Instrument columns, or a single "prefix:<p>" entry
        add_intercept: Append a column of ones to the controls
    """
    outcome: str
    endogenous: str
    controls: Tuple[str, ...] = ()
    instruments: Tuple[str, ...] = ()
    add_intercept: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "controls", split_names(self.controls))
        object.__setattr__(self, "instruments", split_names(self.instruments))
        if not self.instruments:
            raise ValueError("At least one instrument column (or a prefix) is required")
        if self.prefix is not None and len(self.instruments) > 1:
            raise ValueError("An instrument prefix cannot be combined with explicit names")
        if self.prefix == "":
            raise ValueError("Instrument prefix is empty")

    @property
    def prefix(self) -> Union[str, None]:
        first = self.instruments[0]
        if first.startswith(PREFIX_MARKER):
            return first[len(PREFIX_MARKER):]
        return None

    def instrument_columns(self, header: Sequence[str]) -> List[str]:
        """Explicit instrument names, or the header columns matching the prefix."""
        prefix = self.prefix
        if prefix is None:
            return list(self.instruments)
        taken = {self.outcome, self.endogenous, *self.controls}
        matched = [c for c in header if c.startswith(prefix) and c not in taken]
        if not matched:
            raise MissingColumn(f"No column matches instrument prefix '{prefix}'")
        return matched

    def check_disjoint(self, instruments: Sequence[str]) -> None:
        groups = [[self.outcome], [self.endogenous], list(self.controls), list(instruments)]
        seen = set()
        for group in groups:
            for name in group:
                if name in seen:
                    raise ValueError(f"Column '{name}' is assigned to more than one role")
                seen.add(name)


def _numeric(frame: pd.DataFrame, columns: Sequence[str], path: Path) -> np.ndarray:
    """Parse the named text columns as floats, locating the first bad field."""
    out = np.empty((len(frame), len(columns)), dtype=np.float64)
    for j, name in enumerate(columns):
        text = frame[name].str.strip()
        values = pd.to_numeric(text, errors="coerce")
        bad = values.isna() & ~text.str.lower().isin(["nan", "-nan", "+nan"])
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise CsvParseError(
                f"{path.name}: cannot parse {frame[name].iloc[row]!r} as a number "
                f"(row {row + 2}, column '{name}')"
            )
        # float() rounds correctly, so %.17g text reads back bit for bit
        out[:, j] = np.fromiter(map(float, text), dtype=np.float64, count=len(text))
    finite = np.isfinite(out)
    if not finite.all():
        row, col = (int(v) for v in np.argwhere(~finite)[0])
        raise NonFinite(f"{path.name}: non-finite value at row {row + 2}, column '{columns[col]}'")
    return out


def ingest_csv(path: Union[str, Path], roles: ColumnRoles) -> RawSample:
    """
    Read a CSV file into a RawSample, in file row order.

    Args:
        path: CSV file with a header row
        roles: Column role assignment

    Returns:
        RawSample with Y, X of shape (n,), W of shape (n, L [+1]) and Z of shape (n, K)

    Raises:
        FileNotFoundError: If the file does not exist
        MissingColumn: If a named column is absent
        CsvParseError: If a field is not a number (row and column reported)
        NonFinite: If a field is NaN or infinite

    Example:
        >>> roles = ColumnRoles("y", "x", controls=("w",), instruments=("prefix:z_",))
        >>> ingest_csv("card.csv", roles).Z.shape
        (3010, 4)
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Unable to open file {path}")

    frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    frame.columns = [str(c).strip() for c in frame.columns]
    header = list(frame.columns)

    instruments = roles.instrument_columns(header)
    roles.check_disjoint(instruments)
    needed = [roles.outcome, roles.endogenous, *roles.controls, *instruments]
    missing = [c for c in needed if c not in header]
    if missing:
        raise MissingColumn(f"{path.name}: missing column(s) {', '.join(missing)}")

    values = _numeric(frame, needed, path)
    L = len(roles.controls)
    W = values[:, 2:2 + L]
    if roles.add_intercept:
        W = np.column_stack([W, np.ones(len(frame))])
    logger.info("Read %s: n=%d, L=%d, K=%d", path.name, len(frame), W.shape[1], len(instruments))
    return RawSample(Y=values[:, 0], X=values[:, 1], W=W, Z=values[:, 2 + L:])


def write_sample_csv(sample: RawSample, path: Union[str, Path]) -> ColumnRoles:
    """
    Write a RawSample as CSV with columns y, x, w1..wL, z1..zK.

    Values are written with 17 significant digits; ingest_csv reads them
    back bit for bit.

    Returns:
        ColumnRoles that read the file back
    """
    controls = [f"w{j + 1}" for j in range(sample.L)]
    instruments = [f"z{j + 1}" for j in range(sample.K)]
    data = np.column_stack([sample.Y, sample.X, sample.W, sample.Z])
    frame = pd.DataFrame(data, columns=["y", "x", *controls, *instruments])
    frame.to_csv(path, index=False, float_format="%.17g")
    return ColumnRoles(outcome="y", endogenous="x", controls=tuple(controls),
                       instruments=tuple(instruments))
