"""
Result writers - JSON and CSV with 17 significant digits

Files are written through a temporary sibling and renamed into place, so a
failed run never leaves a partial output file.
"""

import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd

from core.errors import ParameterError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'


def _scalar(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if value is None:
        return 'null'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return FLOAT_FORMAT % value if math.isfinite(value) else 'null'
    return json.dumps(str(value), ensure_ascii=False)


def to_json(data: Any, indent: int = 2, level: int = 0) -> str:
    """json.dumps-like rendering with fixed float precision"""
    pad, inner = ' ' * (indent * level), ' ' * (indent * (level + 1))
    if isinstance(data, dict):
        if not data:
            return '{}'
        items = [f"{inner}{json.dumps(str(k))}: {to_json(v, indent, level + 1)}" for k, v in data.items()]
        return '{\n' + ',\n'.join(items) + '\n' + pad + '}'
    if isinstance(data, (list, tuple, np.ndarray)):
        if len(data) == 0:
            return '[]'
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in data):
            return '[' + ', '.join(_scalar(v) for v in data) + ']'
        items = [inner + to_json(v, indent, level + 1) for v in data]
        return '[\n' + ',\n'.join(items) + '\n' + pad + ']'
    return _scalar(data)


def to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def write_text(text: str, out: Optional[str]) -> None:
    """Write to `out`, or stdout when out is None or '-'"""
    if out in (None, '-'):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info(f"✅ Results written to {path}")


def emit(payload: Any, frame: Optional[pd.DataFrame], fmt: str, out: Optional[str]) -> None:
    """Render as JSON (payload) or CSV (frame) and write"""
    if fmt == 'csv':
        if frame is None:
            raise ParameterError("this result has no CSV form; use --format json")
        write_text(to_csv(frame), out)
    else:
        write_text(to_json(payload) + '\n', out)
