"""Labeled point configurations and the direction / ratio coordinate maps.

Points are labeled ``1..n`` in every public function of this module, so
``direction(c, 1, 2)`` is the unit vector from ``p_2`` towards ``p_1``.
Arrays underneath are ordinary 0-based numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConfigurationError, SizeError

#: pairwise distance below which two points are treated as coincident
COINCIDENCE_TOL = 1e-14


@dataclass(frozen=True)
class Configuration:
    """``n`` labeled, pairwise distinct points in R^k.

    Parameters
    ----------
    points : array_like, shape (n, k)
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] < 1:
            raise SizeError(f"need an (n, k) array with n >= 2, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("configuration coordinates must be finite")
        dist = pairwise_distances(pts)
        n = len(pts)
        off = dist[~np.eye(n, dtype=bool)]
        if np.any(off < COINCIDENCE_TOL):
            raise DegenerateConfigurationError("configuration has coincident points")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n

    def __getitem__(self, label: int) -> np.ndarray:
        return self.points[_index(self, label)]

    def transformed(self, rotation=None, translation=None, scale: float = 1.0) -> "Configuration":
        """Return ``scale * R p + t`` applied to every point."""
        pts = self.points * scale
        if rotation is not None:
            pts = pts @ np.asarray(rotation, dtype=float).T
        if translation is not None:
            pts = pts + np.asarray(translation, dtype=float)
        return Configuration(pts)

    def distances(self) -> np.ndarray:
        return pairwise_distances(self.points)


def pairwise_distances(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    diff = pts[:, None, :] - pts[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _index(c: Configuration, label: int) -> int:
    if not 1 <= label <= c.n:
        raise IndexError(f"label {label} outside 1..{c.n}")
    return label - 1


def direction(c: Configuration, i: int, j: int) -> np.ndarray:
    """Unit vector in the direction of ``p_i - p_j``."""
    if i == j:
        raise ValueError("direction needs two distinct labels")
    v = c[i] - c[j]
    norm = np.linalg.norm(v)
    if norm < COINCIDENCE_TOL:
        raise DegenerateConfigurationError(f"points {i} and {j} coincide")
    return v / norm


def ratio(c: Configuration, i: int, j: int, k: int) -> float:
    """Distance ratio ``|p_i - p_j| / |p_i - p_k|``."""
    if len({i, j, k}) != 3:
        raise ValueError("ratio needs three distinct labels")
    den = np.linalg.norm(c[i] - c[k])
    if den < COINCIDENCE_TOL:
        raise DegenerateConfigurationError(f"points {i} and {k} coincide")
    return float(np.linalg.norm(c[i] - c[j]) / den)


def cyclic_relabel(c: Configuration) -> Configuration:
    """``(p1, p2, p3, p4) -> (p2, p3, p4, p1)``; only defined for quadruples."""
    if c.n != 4:
        raise SizeError(f"cyclic relabeling acts on 4-point configurations, got {c.n}")
    return Configuration(np.roll(c.points, -1, axis=0))
