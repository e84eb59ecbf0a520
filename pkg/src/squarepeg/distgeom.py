"""Cayley-Menger determinants, simplex volumes and circumradii.

A :class:`SimplexDistanceRatio` holds the symmetric matrix of target
pairwise distances between ``k + 1`` vertices, up to a common scale.
"""
from __future__ import annotations

import enum
import math
from fractions import Fraction
from dataclasses import dataclass

import numpy as np

from .errors import ConstructibilityError

MAX_DIM = 8
DEGENERACY_TOL = 1e-12


class RatioTag(enum.Enum):
    CONSTRUCTIBLE_NONDEGENERATE = "ConstructibleNondegenerate"
    DEGENERATE = "Degenerate"
    NON_CONSTRUCTIBLE = "NonConstructible"


@dataclass(frozen=True)
class RatioClass:
    tag: RatioTag
    determinant_value: float


@dataclass(frozen=True)
class SimplexDistanceRatio:
    """Target distances ``d[i, j]`` between the vertices of a k-simplex."""

    d: np.ndarray

    def __post_init__(self):
        d = np.array(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 2:
            raise ValueError(f"distance matrix must be square with size >= 2, got {d.shape}")
        if d.shape[0] - 1 > MAX_DIM:
            raise ValueError(f"dimension {d.shape[0] - 1} exceeds supported maximum {MAX_DIM}")
        if not np.all(np.isfinite(d)):
            raise ValueError("distances must be finite")
        if np.any(np.diag(d) != 0):
            raise ValueError("diagonal entries must be zero")
        if not np.allclose(d, d.T, rtol=0, atol=1e-12 * max(1.0, d.max())):
            raise ValueError("distance matrix must be symmetric")
        off = d[~np.eye(len(d), dtype=bool)]
        if np.any(off <= 0):
            raise ValueError("off-diagonal distances must be positive")
        d = 0.5 * (d + d.T)
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def k(self) -> int:
        return self.d.shape[0] - 1

    @classmethod
    def from_points(cls, points) -> "SimplexDistanceRatio":
        pts = np.asarray(points, dtype=float)
        diff = pts[:, None, :] - pts[None, :, :]
        return cls(np.sqrt((diff**2).sum(-1)))

    @classmethod
    def triangle(cls, a: float, b: float, c: float) -> "SimplexDistanceRatio":
        """Triangle with sides ``a = |p2 p3|``, ``b = |p1 p3|``, ``c = |p1 p2|``."""
        return cls(np.array([[0, c, b], [c, 0, a], [b, a, 0]], dtype=float))

    @classmethod
    def regular(cls, k: int) -> "SimplexDistanceRatio":
        """Regular k-simplex with unit edges."""
        return cls(np.ones((k + 1, k + 1)) - np.eye(k + 1))


def _squares(d: np.ndarray) -> list:
    """Exact rational squares of the distances (no float rounding)."""
    return [[Fraction(float(x)) ** 2 for x in row] for row in d]


def _bordered(r: SimplexDistanceRatio) -> list:
    n = r.k + 1
    sq = _squares(r.d)
    m = [[Fraction(0)] + [Fraction(1)] * n]
    m += [[Fraction(1)] + sq[i] for i in range(n)]
    return m


def _exact_det(m: list) -> Fraction:
    """Determinant of a rational matrix in exact arithmetic.

    The matrices here are at most 10 x 10, and the bordered determinant
    cancels heavily for thin simplices, so floating-point LU loses digits
    that the rounded entries still carry.
    """
    a = [list(row) for row in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        det *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def cayley_menger_det(r: SimplexDistanceRatio) -> float:
    """Bordered ``(k+2) x (k+2)`` Cayley-Menger determinant ``D``.

    For a triangle this is ``-(a+b+c)(a+b-c)(a-b+c)(-a+b+c)``. Squares and
    the determinant are exact in the given distances, so the only rounding
    is the final conversion to float.
    """
    return float(_exact_det(_bordered(r)))


def volume_squared(r: SimplexDistanceRatio) -> float:
    k = r.k
    return (-1) ** (k + 1) / (2**k * math.factorial(k) ** 2) * cayley_menger_det(r)


def classify(r: SimplexDistanceRatio) -> RatioClass:
    """Sign test on the squared volume, with a scale-relative zero band."""
    v2 = volume_squared(r)
    scale = float(r.d.max()) ** (2 * r.k)
    det = cayley_menger_det(r)
    if abs(v2) < DEGENERACY_TOL * scale:
        return RatioClass(RatioTag.DEGENERATE, det)
    if v2 > 0:
        return RatioClass(RatioTag.CONSTRUCTIBLE_NONDEGENERATE, det)
    return RatioClass(RatioTag.NON_CONSTRUCTIBLE, det)


def simplex_volume(r: SimplexDistanceRatio) -> float:
    cls = classify(r)
    if cls.tag is RatioTag.NON_CONSTRUCTIBLE:
        raise ConstructibilityError("distance ratio is not constructible")
    if cls.tag is RatioTag.DEGENERATE:
        return 0.0
    return math.sqrt(volume_squared(r))


def circumradius(r: SimplexDistanceRatio) -> float:
    """Radius of the unique sphere through the vertices, from distances alone.

    ``rho^2 = -det(d_ij^2) / (2 D)``.
    """
    cls = classify(r)
    if cls.tag is not RatioTag.CONSTRUCTIBLE_NONDEGENERATE:
        raise ConstructibilityError(f"circumradius undefined for {cls.tag.value} ratio")
    num = _exact_det(_squares(r.d))
    rho2 = float(-num / (2 * _exact_det(_bordered(r))))
    if rho2 <= 0:
        raise ConstructibilityError("negative radicand in circumradius formula")
    return math.sqrt(rho2)


def realize(r: SimplexDistanceRatio) -> np.ndarray:
    """Some point set in R^k with the given distances (classical MDS).

    The result is centered at the vertex centroid; orientation and frame are
    whatever the eigendecomposition produces.
    """
    cls = classify(r)
    if cls.tag is not RatioTag.CONSTRUCTIBLE_NONDEGENERATE:
        raise ConstructibilityError(f"cannot realize a {cls.tag.value} ratio")
    n = r.k + 1
    j = np.eye(n) - np.ones((n, n)) / n
    gram = -0.5 * j @ (r.d**2) @ j
    w, v = np.linalg.eigh(gram)
    order = np.argsort(w)[::-1][: r.k]
    return v[:, order] * np.sqrt(np.clip(w[order], 0.0, None))


def circumcenter(points) -> np.ndarray:
    """Point equidistant from ``k + 1`` affinely independent points in R^k."""
    pts = np.asarray(points, dtype=float)
    a = 2.0 * (pts[1:] - pts[0])
    b = (pts[1:] ** 2).sum(1) - (pts[0] ** 2).sum()
    return np.linalg.solve(a, b)
