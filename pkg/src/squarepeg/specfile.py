"""Curve and surface specification files.

Both grammars are line based::

    # comment
    key = value

Values are Python literals (numbers, tuples, lists) read with
``ast.literal_eval``; ``type``, ``expr`` and ``ratio`` are taken as raw
text. Blank lines and ``#`` comments are ignored; unknown or repeated keys
are errors.

Curve keys
    ``type``: ellipse | radial_fourier | polygon;
    ``a``, ``b`` (ellipse); ``c0``, ``cos_coeffs``, ``sin_coeffs``
    (radial_fourier, coefficient lists start at m = 1); ``vertices``
    (polygon, list of points in R^2 or R^3); ``rounding`` (polygon, corner
    radius; 0 keeps sharp corners).

Surface keys
    ``type``: sphere | radial_expr; ``radius`` (sphere); ``expr``
    (radial_expr, in ``phi, theta`` or ``theta``); ``dimension`` (2 or 3,
    default 3); ``ratio``: ``regular`` or a literal distance matrix;
    ``rotation``: rotation vector (k = 3) or angle (k = 2);
    ``target``: list of ``(phi, theta)`` pairs to search rotations against.
"""
from __future__ import annotations

import ast
import math
from pathlib import Path

import numpy as np

from .curves import ClosedCurve, Ellipse, Polygon, RadialFourier, RoundedPolygon
from .distgeom import SimplexDistanceRatio
from .errors import SpecError
from .simplex import RadialSurface

RAW_KEYS = {"type", "expr", "ratio"}
CURVE_KEYS = {
    "ellipse": {"type", "a", "b"},
    "radial_fourier": {"type", "c0", "cos_coeffs", "sin_coeffs"},
    "polygon": {"type", "vertices", "rounding"},
}
SURFACE_KEYS = {
    "sphere": {"type", "radius", "dimension", "ratio", "rotation", "target"},
    "radial_expr": {"type", "expr", "dimension", "ratio", "rotation", "target"},
}


def parse_pairs(text: str, source: str = "<spec>") -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SpecError(f"{source}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key.isidentifier():
            raise SpecError(f"{source}:{lineno}: bad key {key!r}")
        if key in out:
            raise SpecError(f"{source}:{lineno}: duplicate key {key!r}")
        if key in RAW_KEYS:
            out[key] = value
            continue
        try:
            out[key] = ast.literal_eval(value)
        except (ValueError, SyntaxError):
            raise SpecError(f"{source}:{lineno}: cannot read value for {key!r}: {value!r}") from None
    return out


def _number(d, key, default=None, positive=False):
    if key not in d:
        if default is None:
            raise SpecError(f"missing required key {key!r}")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise SpecError(f"{key!r} must be a finite number, got {v!r}")
    if positive and v <= 0:
        raise SpecError(f"{key!r} must be positive, got {v!r}")
    return float(v)


def _check_keys(d, allowed, what):
    if "type" not in d:
        raise SpecError(f"{what} spec needs a 'type'")
    extra = set(d) - allowed
    if extra:
        raise SpecError(f"unknown key(s) for {what} type {d['type']!r}: {', '.join(sorted(extra))}")


def curve_from_dict(d: dict) -> ClosedCurve:
    kind = d.get("type")
    if kind not in CURVE_KEYS:
        raise SpecError(f"unknown curve type {kind!r}; expected one of {sorted(CURVE_KEYS)}")
    _check_keys(d, CURVE_KEYS[kind], "curve")
    try:
        if kind == "ellipse":
            return Ellipse(_number(d, "a", positive=True), _number(d, "b", positive=True))
        if kind == "radial_fourier":
            cos = tuple(float(x) for x in d.get("cos_coeffs", ()))
            sin = tuple(float(x) for x in d.get("sin_coeffs", ()))
            return RadialFourier(_number(d, "c0", positive=True), cos, sin)
        if "vertices" not in d:
            raise SpecError("polygon spec needs 'vertices'")
        verts = np.array(d["vertices"], dtype=float)
        rounding = _number(d, "rounding", 0.0)
        if rounding < 0:
            raise SpecError("'rounding' must be nonnegative")
        return RoundedPolygon(verts, rounding) if rounding > 0 else Polygon(verts)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"invalid {kind} curve: {exc}") from None


def load_curve(path) -> ClosedCurve:
    p = Path(path)
    return curve_from_dict(parse_pairs(p.read_text(), str(p)))


class SurfaceSpec:
    """Parsed surface file: the surface plus the inscription inputs."""

    def __init__(self, surface, ratio, rotation, target):
        self.surface = surface
        self.ratio = ratio
        self.rotation = rotation
        self.target = target


def _ratio(text, k):
    if text is None or text == "regular":
        return SimplexDistanceRatio.regular(k)
    try:
        d = ast.literal_eval(text)
        r = SimplexDistanceRatio(np.array(d, dtype=float))
    except (ValueError, SyntaxError, TypeError) as exc:
        raise SpecError(f"bad ratio {text!r}: {exc}") from None
    if r.k != k:
        raise SpecError(f"ratio is a {r.k}-simplex but the surface has dimension {k}")
    return r


def _rotation(value, k):
    from scipy.spatial.transform import Rotation

    if value is None:
        return np.eye(k)
    try:
        if k == 2:
            a = float(value)
            return np.array([[math.cos(a), -math.sin(a)], [math.sin(a), math.cos(a)]])
        v = np.array(value, dtype=float)
        if v.shape != (3,):
            raise ValueError("expected a rotation vector of length 3")
        return Rotation.from_rotvec(v).as_matrix()
    except (TypeError, ValueError) as exc:
        raise SpecError(f"bad rotation {value!r}: {exc}") from None


def surface_from_dict(d: dict) -> SurfaceSpec:
    kind = d.get("type")
    if kind not in SURFACE_KEYS:
        raise SpecError(f"unknown surface type {kind!r}; expected one of {sorted(SURFACE_KEYS)}")
    _check_keys(d, SURFACE_KEYS[kind], "surface")
    k = d.get("dimension", 3)
    if k not in (2, 3) or isinstance(k, bool):
        raise SpecError(f"'dimension' must be 2 or 3, got {k!r}")
    try:
        if kind == "sphere":
            surf = RadialSurface.sphere(_number(d, "radius", 1.0, positive=True), k)
        else:
            if "expr" not in d:
                raise SpecError("radial_expr spec needs 'expr'")
            surf = RadialSurface(k=k, expr=d["expr"])
    except ValueError as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"invalid surface: {exc}") from None
    target = d.get("target")
    if target is not None:
        target = np.array(target, dtype=float)
        if target.shape != (k + 1, 2) or k != 3:
            raise SpecError("'target' must list (phi, theta) for each of the 4 vertices")
    return SurfaceSpec(surf, _ratio(d.get("ratio"), k), _rotation(d.get("rotation"), k), target)


def load_surface(path) -> SurfaceSpec:
    p = Path(path)
    return surface_from_dict(parse_pairs(p.read_text(), str(p)))
