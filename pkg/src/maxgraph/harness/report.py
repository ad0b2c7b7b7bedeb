"""Report serialization: JSON with exact rationals, CSV curves, plain text."""

from __future__ import annotations

import dataclasses
import io
import json
import math
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .. import __version__

SCHEMA_NAME = "report_schema.json"


def rational(q) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _key(k) -> str:
    if isinstance(k, tuple):
        return "(" + ",".join(str(c) for c in k) + ")"
    if isinstance(k, Fraction):
        return rational(k)
    return str(k)


def to_jsonable(obj):
    """Plain JSON data; Fractions become ``"p/q"``, tuples become lists."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return rational(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return x
    if isinstance(obj, dict):
        return {_key(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in items]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if dataclasses.is_dataclass(obj):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Path):
        return str(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def envelope(command: str, config: dict, result, status: str = "ok", steps=None) -> dict:
    body = {
        "tool": "maxgraph",
        "version": __version__,
        "command": command,
        "config": config,
        "seed": config.get("seed", 0),
        "status": status,
        "result": result,
    }
    if steps is not None:
        body["steps"] = steps
    return to_jsonable(body)


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def curve_csv(counts) -> str:
    """``lambda,count,product`` rows from ``(v, |{M >= v}|)`` pairs."""
    buf = io.StringIO()
    buf.write("lambda,count,product\n")
    for v, c in counts:
        buf.write(f"{rational(v)},{c},{rational(v * c)}\n")
    return buf.getvalue()


def as_text(report: dict) -> str:
    lines = []

    def walk(prefix, node):
        if isinstance(node, dict):
            for k in sorted(node):
                walk(f"{prefix}.{k}" if prefix else k, node[k])
        elif isinstance(node, list) and node and all(isinstance(x, dict) for x in node):
            for i, x in enumerate(node):
                walk(f"{prefix}[{i}]", x)
        else:
            lines.append(f"{prefix}: {json.dumps(node, sort_keys=True)}")

    walk("", report)
    return "\n".join(lines) + "\n"


def load_schema() -> dict:
    text = resources.files(__package__).joinpath(SCHEMA_NAME).read_text()
    return json.loads(text)
