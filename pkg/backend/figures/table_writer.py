"""Locale-independent CSV/JSON emission with round-trip float printing."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from backend.figures.config import ensure_directories
from core.errors import OutputError

logger = logging.getLogger(__name__)


def format_float(value: float) -> str:
    """Shortest representation that reads back to the identical double."""
    return repr(float(value))


def _native(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): _native(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_native(v) for v in value]
    return value


def table_rows(df: pd.DataFrame) -> List[Dict[str, Any]]:
    return [_native(row) for row in df.to_dict(orient='records')]


def render_table(df: pd.DataFrame, fmt: str) -> str:
    """Serialise a table as CSV (comma, LF, '.' decimal) or a JSON array of row objects."""
    if fmt == 'csv':
        return df.to_csv(index=False, float_format=format_float, lineterminator='\n')
    if fmt == 'json':
        return json.dumps(table_rows(df), indent=2) + '\n'
    raise ValueError(f"Unknown output format '{fmt}'")


def render_record(record: Dict[str, Any], fmt: str) -> str:
    """Serialise a single record; CSV flattens nested mappings into dotted columns."""
    if fmt == 'json':
        return json.dumps(_native(record), indent=2) + '\n'
    flat = pd.json_normalize(_native(record), sep='.')
    return render_table(flat, 'csv')


def write_text(text: str, path: Optional[Path]) -> Optional[Path]:
    """Write to ``path`` or, when it is None, return the text untouched for stdout."""
    if path is None:
        return None
    try:
        ensure_directories(path.parent)
        with open(path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
    except OSError as exc:
        raise OutputError(path, exc.strerror or str(exc)) from exc
    logger.info(f"Wrote {path}")
    return path


__all__ = ["format_float", "render_record", "render_table", "table_rows", "write_text"]
