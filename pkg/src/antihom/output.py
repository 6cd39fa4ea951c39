"""CSV / JSON serialization with round-trip float formatting and atomic writes."""

from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

SCAN_COLUMNS = ("position_um", "probability", "normalized", "counts", "shot_error")


def fmt(value) -> str:
    """Shortest round-trip decimal text; empty for missing values."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def to_jsonable(obj: Any) -> Any:
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def atomic_write(path: str | Path, text: str) -> Path:
    """Write UTF-8 text with LF endings via a temp file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def scan_rows(result) -> list[tuple]:
    counts = result.counts or (None,) * len(result)
    errors = result.shot_error or (None,) * len(result)
    return list(zip(result.positions, result.probability, result.normalized, counts, errors))


def scan_csv(result) -> str:
    return csv_text(SCAN_COLUMNS, scan_rows(result))


def scan_json(result, config: dict | None = None, fit=None) -> str:
    doc = {
        "columns": list(SCAN_COLUMNS),
        "rows": [dict(zip(SCAN_COLUMNS, row)) for row in scan_rows(result)],
        "baseline_probability": result.baseline_probability,
        "reference_counts": result.reference_counts,
        "metadata": result.metadata,
        "config": config or {},
        "fit": fit,
    }
    return dumps(doc)
