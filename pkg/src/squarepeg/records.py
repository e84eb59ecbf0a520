"""Line-delimited JSON records.

Each record is one JSON object per line with a ``record`` field naming
its kind. Keys are sorted and floats use ``repr``, so identical inputs
produce identical bytes.
"""
from __future__ import annotations

import json
import math

import numpy as np

from .geom import Configuration


def jsonable(obj):
    if isinstance(obj, Configuration):
        return jsonable(obj.points)
    if isinstance(obj, np.ndarray):
        return [jsonable(x) for x in obj.tolist()] if obj.ndim else jsonable(obj.item())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    return obj


def dumps(kind: str, **fields) -> str:
    rec = {"record": kind}
    rec.update(fields)
    return json.dumps(jsonable(rec), sort_keys=True, separators=(",", ":"), allow_nan=False)


def write(stream, lines) -> None:
    for line in lines:
        stream.write(line)
        stream.write("\n")


def read(path):
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]
