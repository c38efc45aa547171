"""
JSON output for reports.

Floats are written with JSON_SIGNIFICANT_DIGITS significant digits so a
re-run of the same command gives byte-identical output; infinite statistics
are written as Infinity (as Python's json module does).
"""
import json
import math
from enum import Enum
from typing import Any, Iterable

import numpy as np

from ..config import JSON_SIGNIFICANT_DIGITS


def format_float(value: float) -> str:
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    text = format(value, f".{JSON_SIGNIFICANT_DIGITS}g")
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def to_json(value: Any) -> str:
    """Compact deterministic JSON; keys keep insertion order."""
    if value is None or isinstance(value, (bool, np.bool_)):
        return json.dumps(None if value is None else bool(value))
    if isinstance(value, Enum):
        return json.dumps(value.value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        return "{" + ", ".join(f"{json.dumps(str(k), ensure_ascii=False)}: {to_json(v)}"
                               for k, v in value.items()) + "}"
    if isinstance(value, np.ndarray):
        value = value.tolist()
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(to_json(v) for v in value) + "]"
    if hasattr(value, "to_dict"):
        return to_json(value.to_dict())
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def json_lines(records: Iterable[Any]) -> str:
    return "".join(to_json(record) + "\n" for record in records)


def read_json_lines(path) -> list:
    with open(path, encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]
