# clarkson_mcleod_tools/core/utils.py

import json
import math
import os
from typing import Any, Iterable, Optional, Sequence


def format_float(value: float) -> str:
    """Full-precision repr for TSV cells."""
    return format(value, '.17g')


def tsv_document(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    """Tab-separated block with a '#'-prefixed header line and Unix newlines."""
    lines = ['#' + '\t'.join(header)]
    lines.extend('\t'.join(row) for row in rows)
    return '\n'.join(lines) + '\n'


def optional_cell(value: Optional[Any]) -> str:
    """Blank for None, 1/0 for booleans, '.17g' for floats."""
    if value is None:
        return ''
    if isinstance(value, bool):
        return '1' if value else '0'
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def _json_safe(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def json_document(data: dict) -> str:
    """One top-level JSON object; non-finite floats become null."""
    return json.dumps(_json_safe(data), indent=2, allow_nan=False) + '\n'


def ensure_dir_exists(path: str) -> None:
    """Create directory if it doesn't exist."""
    if path:
        os.makedirs(path, exist_ok=True)


def write_output(text: str, path: str) -> None:
    """Write a finished document to path, creating parent directories."""
    ensure_dir_exists(os.path.dirname(os.path.abspath(path)))
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)
