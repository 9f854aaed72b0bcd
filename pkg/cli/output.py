# cli/output.py

import json
import math
import os
from datetime import datetime
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd
import pytz

SCHEMA_VERSION = "1.0"
TIMESTAMP_FIELD = "generated_at"


def format_float(value: float) -> str:
    """17 significant digits; non-finite values become JSON strings"""
    value = float(value)
    if math.isnan(value):
        return '"nan"'
    if math.isinf(value):
        return '"inf"' if value > 0 else '"-inf"'
    return f"{value:.17g}"


def _encode(value: Any, indent: int, level: int) -> str:
    pad = ' ' * (indent * (level + 1))
    close = ' ' * (indent * level)
    if value is None or isinstance(value, (bool, np.bool_)):
        return json.dumps(bool(value) if value is not None else None)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return _encode({'re': value.real, 'im': value.imag}, indent, level)
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, np.ndarray):
        return _encode(value.tolist(), indent, level)
    if isinstance(value, dict):
        if not value:
            return '{}'
        items = [f"{pad}{json.dumps(str(key), ensure_ascii=False)}: {_encode(item, indent, level + 1)}"
                 for key, item in value.items()]
        return '{\n' + ',\n'.join(items) + '\n' + close + '}'
    if isinstance(value, (list, tuple)):
        if not value:
            return '[]'
        items = [f"{pad}{_encode(item, indent, level + 1)}" for item in value]
        return '[\n' + ',\n'.join(items) + '\n' + close + ']'
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def to_json(document: Dict[str, Any], indent: int = 2) -> str:
    """Deterministic JSON text with floats at 17 significant digits"""
    return _encode(document, indent, 0) + '\n'


def envelope(subcommand: str, payload: Dict[str, Any], timestamp: Optional[datetime] = None) -> Dict[str, Any]:
    """Wrap a result with schema version and UTC generation time"""
    timestamp = timestamp or datetime.now(pytz.utc)
    return {
        'schema_version': SCHEMA_VERSION,
        'subcommand': subcommand,
        TIMESTAMP_FIELD: timestamp.astimezone(pytz.utc).isoformat(),
        **payload,
    }


def write_json(document: Dict[str, Any], path: Optional[str]) -> str:
    text = to_json(document)
    if path:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as handle:
            handle.write(text)
    return text


def write_csv(frame: pd.DataFrame, path: Optional[str]) -> str:
    """One row per node, floats at 17 significant digits"""
    text = frame.to_csv(index=False, float_format='%.17g')
    if path:
        directory = os.path.dirname(os.path.abspath(path))
        os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as handle:
            handle.write(text)
    return text


def records_frame(records: list, rank: int) -> pd.DataFrame:
    """Flatten evaluation records (λ, H, value) into CSV columns"""
    rows = []
    for record in records:
        row = {}
        for i, component in enumerate(record.get('lambda') or []):
            row[f"lambda_re_{i + 1}"] = float(np.real(component))
            row[f"lambda_im_{i + 1}"] = float(np.imag(component))
        for i, component in enumerate(record.get('H') or []):
            row[f"H_{i + 1}"] = component
        value = record.get('value')
        if value is not None:
            row['value_re'], row['value_im'] = float(np.real(value)), float(np.imag(value))
        for key in ('reference', 'method', 'est_error', 'is_pole'):
            if key in record:
                row[key] = record[key]
        rows.append(row)
    return pd.DataFrame(rows)


def read_samples_csv(path: str, rank: int) -> tuple:
    """
    Sampled function with columns H_1..H_r (or the first r columns) and ``value``

    Returns:
        (points, values) as numpy arrays
    """
    frame = pd.read_csv(path)
    if 'value' not in frame.columns:
        raise ValueError(f"{path}: missing 'value' column")
    coordinate_columns = [f"H_{i + 1}" for i in range(rank)]
    if not all(column in frame.columns for column in coordinate_columns):
        coordinate_columns = [column for column in frame.columns if column != 'value'][:rank]
    if len(coordinate_columns) != rank:
        raise ValueError(f"{path}: expected {rank} coordinate columns")
    return frame[coordinate_columns].to_numpy(dtype=float), frame['value'].to_numpy(dtype=float)
