"""I/O module initialization."""

from pydaar.io.csv_data import ColumnRoles, ingest_csv, split_names, write_sample_csv
from pydaar.io.results import (
    confidence_set_frame,
    json_document,
    to_plain,
    write_frame_csv,
    write_json,
)
from pydaar.io.config import load_config

__all__ = [
    "ColumnRoles",
    "ingest_csv",
    "split_names",
    "write_sample_csv",
    "confidence_set_frame",
    "json_document",
    "to_plain",
    "write_frame_csv",
    "write_json",
    "load_config",
]
