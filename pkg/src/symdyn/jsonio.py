"""JSON/CSV emission with reproducible float formatting.

All floats are written with 17 significant digits so that repeated runs
produce byte-identical artifacts and dedup decisions survive a round trip.
"""

from __future__ import annotations

import json
import math
from pathlib import Path


def format_float(x: float) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return format(x, ".17g")
    return repr(x)


def dumps(obj, indent: int | None = None) -> str:
    """Serialize to JSON, floats at 17 significant digits."""
    return _write(obj, indent, 0)


def _write(obj, indent, level) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    nl, pad, pad_in = "", "", ""
    if indent is not None:
        nl = "\n"
        pad = " " * (indent * level)
        pad_in = " " * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = (
            f"{pad_in}{json.dumps(str(k))}: {_write(v, indent, level + 1)}"
            for k, v in obj.items()
        )
        sep = "," + nl if indent is not None else ", "
        return "{" + nl + sep.join(items) + nl + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not len(obj):
            return "[]"
        items = (f"{pad_in}{_write(v, indent, level + 1)}" for v in obj)
        sep = "," + nl if indent is not None else ", "
        return "[" + nl + sep.join(items) + nl + pad + "]"
    # numpy scalars and arrays
    if hasattr(obj, "tolist"):
        return _write(obj.tolist(), indent, level)
    raise TypeError(f"cannot serialize {type(obj)!r}")


def dump(obj, path, indent: int | None = 2) -> None:
    Path(path).write_text(dumps(obj, indent=indent) + "\n")


def load(path):
    return json.loads(Path(path).read_text())


def write_csv(path, header: list[str], rows) -> None:
    """Plain CSV with 17-significant-digit floats (no quoting needed here)."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_float(v) if isinstance(v, float) else str(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")
