"""Serialization: JSON records with 17 significant digits, CSV tables and orbit files."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError

ORBIT_HEADER = ("n", "x1", "x2", "x3")


def _float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def plain(obj):
    """Convert numpy scalars/arrays, tuples and dataclasses to JSON-ready builtins."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return plain(asdict(obj))
    if hasattr(obj, "to_dict"):
        return plain(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return plain(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _emit(obj, out: list, indent: int, level: int):
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, float):
        out.append(_float(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            out.append((sep if i else "") + pad + json.dumps(k) + ": ")
            _emit(v, out, indent, level + 1)
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        out.append("[")
        for i, v in enumerate(obj):
            out.append((sep if i else "") + pad)
            _emit(v, out, indent, level + 1)
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""
    out: list = []
    _emit(plain(obj), out, indent, 0)
    return "".join(out)


def loads(text: str):
    return json.loads(text)


def csv_text(rows, columns=None) -> str:
    rows = [plain(r) for r in rows]
    if columns is None:
        columns = []
        for r in rows:
            columns += [k for k in r if k not in columns]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: _cell(r.get(k)) for k in columns})
    return buf.getvalue()


def _cell(v):
    if isinstance(v, float):
        return _float(v)
    if isinstance(v, (list, dict)):
        return dumps(v, indent=0)
    return "" if v is None else v


def write_orbit_csv(path, points, first: int = 0):
    X = np.asarray(points, dtype=float)
    if X.ndim != 2 or X.shape[1] != 3:
        raise ConfigError(f"orbit must have shape (n, 3), got {X.shape}")
    with open(path, "w", newline="") as fh:
        fh.write(",".join(ORBIT_HEADER) + "\n")
        for i, x in enumerate(X):
            fh.write(f"{first + i}," + ",".join(_float(float(v)) for v in x) + "\n")


def read_orbit_csv(path):
    """Returns (first index, points of shape (n, 3))."""
    with open(Path(path), newline="") as fh:
        rd = csv.reader(fh)
        header = tuple(next(rd))
        if header != ORBIT_HEADER:
            raise ConfigError(f"orbit header must be {','.join(ORBIT_HEADER)}, got {','.join(header)}")
        rows = [r for r in rd if r]
    if not rows:
        raise ConfigError("orbit file has no points")
    idx = np.array([int(r[0]) for r in rows])
    if np.any(np.diff(idx) != 1):
        raise ConfigError("orbit indices must be consecutive")
    return int(idx[0]), np.array([[float(v) for v in r[1:4]] for r in rows])
