"""Deterministic CSV/JSON writers."""

from __future__ import annotations

import csv
import io
import json
import math
from typing import Iterable, Sequence


def fmt(value) -> str:
    """17 significant digits for floats so every value round-trips exactly."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".17g")
    return str(value)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def json_text(payload) -> str:
    # repr-based float output is already shortest-round-trip
    return json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n"
