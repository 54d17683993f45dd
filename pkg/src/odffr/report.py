"""CSV output with a fixed number format."""

from __future__ import annotations

import csv
import math
import os

BLOCKING_COLUMNS = (
    "total_arrival_rate",
    "conventional_analytic",
    "proposed_analytic",
    "conventional_simulated",
    "proposed_simulated",
    "overall_conventional_analytic",
    "overall_proposed_analytic",
)
UTILIZATION_COLUMNS = (
    "total_arrival_rate",
    "conventional_analytic",
    "proposed_analytic",
    "conventional_simulated",
    "proposed_simulated",
)
GRANT_COLUMNS = ("total_arrival_rate", "time", "lender", "borrower", "band", "channels", "sector")
SINR_CDF_COLUMNS = ("cdf", "unsectored_sinr_db", "proposed_sinr_db")
OUTAGE_COLUMNS = ("gamma_db", "unsectored", "proposed", "unsectored_stderr", "proposed_stderr")


def format_value(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return format(value, ".12g")
    return str(value)


def emit_csv(rows, schema, path):
    """Write ``rows`` (mappings or sequences) under a header equal to ``schema``."""
    schema = tuple(schema)
    lines = []
    for k, row in enumerate(rows):
        if isinstance(row, dict):
            extra = set(row) - set(schema)
            if extra:
                raise ValueError(f"row {k} has columns outside the schema: {sorted(extra)}")
            row = [row.get(col) for col in schema]
        if len(row) != len(schema):
            raise ValueError(f"row {k} has {len(row)} fields, schema has {len(schema)}")
        lines.append([format_value(v) for v in row])
    try:
        parent = os.path.dirname(os.fspath(path))
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(schema)
            writer.writerows(lines)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
