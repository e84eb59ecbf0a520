"""Diagnostics for curves of finite total curvature.

* the total turning of the polygonal arc p -> q -> r -> s of a square-like
  quadrilateral, ``kappa = 2 pi - 4 theta`` with ``theta`` half the apex
  angle at p;
* the audit comparing inscribed side lengths with the pi-distance;
* extraction of a limiting inscribed quadrilateral from a refining sequence
  of mollified polygons.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curves import (ClosedCurve, Polygon, RoundedPolygon, TWO_PI, cusp_vertices,
                     inscribe_polygon, pi_distance)
from .errors import ConstraintError, CurveError, ExtractionError
from .geom import Configuration
from .slq import find_squares, make_solution, polish

SLQ_TOL = 1e-9
CUSP_TOL = 1e-3


def _angle(u, v) -> float:
    c = float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))
    return math.acos(max(-1.0, min(1.0, c)))


def slq_defect(points) -> float:
    """Largest relative spread among the four sides and among the two diagonals."""
    p = np.asarray(points, dtype=float)
    sides = np.linalg.norm(p - np.roll(p, -1, axis=0), axis=1)
    diags = np.array([np.linalg.norm(p[0] - p[2]), np.linalg.norm(p[1] - p[3])])
    m = sides.mean()
    return float(max(np.ptp(sides), np.ptp(diags)) / m)


@dataclass(frozen=True)
class TurningReport:
    theta: float
    kappa: float
    apex_half_angle: float
    planarity_defect: float

    @property
    def theta_mismatch(self) -> float:
        return abs(self.theta - self.apex_half_angle)


def slq_turning(cfg, tol: float = SLQ_TOL) -> TurningReport:
    """Turning of the arc p -> q -> r -> s of a square-like quadrilateral.

    ``kappa`` is the sum of the exterior angles at q and r; ``theta`` is
    recovered from ``kappa = 2 pi - 4 theta`` and reported next to half the
    angle qps for comparison. The planarity defect is the distance between
    the midpoints of the two diagonals over the side length; it vanishes
    exactly for a planar square.
    """
    p = cfg.points if isinstance(cfg, Configuration) else np.asarray(cfg, dtype=float)
    if p.shape[0] != 4:
        raise ConstraintError(f"need four points, got {p.shape[0]}")
    if slq_defect(p) > tol:
        raise ConstraintError("configuration is not square-like (sides or diagonals differ)")
    a, b, c, d = p
    kappa = _angle(b - a, c - b) + _angle(c - b, d - c)
    theta = (TWO_PI - kappa) / 4
    half = _angle(b - a, d - a) / 2
    side = np.linalg.norm(b - a)
    defect = float(np.linalg.norm((a + c) / 2 - (b + d) / 2) / side)
    return TurningReport(theta, kappa, half, defect)


def project_to_slq(points, tol: float = 1e-13, max_iter: int = 50) -> np.ndarray:
    """Nearest-ish square-like quadrilateral by minimum-norm Gauss-Newton.

    The constraints are the four length ratios of the square residual,
    written directly in point coordinates. Each step is the least-norm
    correction, so a start close to the constraint set moves little.
    """
    x = np.array(points, dtype=float)
    n, dim = x.shape

    def res(y):
        q = y.reshape(n, dim)
        d = lambda i, j: np.linalg.norm(q[i] - q[j])
        return np.array([d(0, 1) / d(0, 3) - 1, d(1, 2) / d(0, 1) - 1,
                         d(2, 3) / d(1, 2) - 1, (d(0, 2) - d(1, 3)) / d(0, 1)])

    y = x.ravel()
    for _ in range(max_iter):
        r = res(y)
        if np.linalg.norm(r) < tol:
            break
        h = 1e-7
        jac = np.empty((4, y.size))
        for m in range(y.size):
            e = np.zeros(y.size)
            e[m] = h
            jac[:, m] = (res(y + e) - res(y - e)) / (2 * h)
        y = y - np.linalg.pinv(jac) @ r
    return y.reshape(n, dim)


# ---------------------------------------------------------------------------
# sidelength audit

@dataclass(frozen=True)
class SidelengthAudit:
    min_side: float
    pi_distance_two_sided: float
    pi_distance_one_sided: float
    slack: float
    count: int

    @property
    def holds_two_sided(self) -> bool:
        return self.min_side >= self.pi_distance_two_sided - self.slack

    @property
    def holds_one_sided(self) -> bool:
        return self.min_side >= self.pi_distance_one_sided - self.slack


def sidelength_audit(curve: ClosedCurve, grid: int = 24, n: int = 2000,
                     slack: float | None = None) -> SidelengthAudit:
    """Smallest inscribed side against the pi-distance under both conventions.

    The square search is run with a floor of ``1e-3 * diameter`` so the
    pi-distance does not censor its own comparison.
    """
    diam = curve.diameter()
    if slack is None:
        slack = 1e-2 * diam
    res = find_squares(curve, grid=grid, min_side=1e-3 * diam)
    sides = [o.representative.side for o in res.orbits]
    return SidelengthAudit(
        min(sides) if sides else math.nan,
        pi_distance(curve, n, "two-sided"),
        pi_distance(curve, n, "one-sided"),
        float(slack),
        res.count,
    )


# ---------------------------------------------------------------------------
# limit extraction

@dataclass
class ExtractionLevel:
    n: int
    radius: float
    solution: object  # SlqSolution on the mollified polygon, or None
    count: int


@dataclass
class ExtractionResult:
    levels: list
    limit: Configuration
    polished: object  # SlqSolution on the target, or None
    target_residual: float
    floor: float

    @property
    def side(self) -> float:
        return float(np.linalg.norm(self.limit.points[0] - self.limit.points[1]))


def _vertex_distance(p, q) -> float:
    """Max vertex distance between two labeled quadrilaterals, modulo cyclic relabeling."""
    return min(float(np.max(np.linalg.norm(np.roll(q, -s, axis=0) - p, axis=1)))
               for s in range(4))


def _nearest_params(curve: ClosedCurve, points, samples: int = 20000) -> np.ndarray:
    th = np.arange(samples) * (TWO_PI / samples)
    c = curve.point(th)
    out = []
    for p in points:
        t = th[int(np.argmin(np.linalg.norm(c - p, axis=1)))]
        for _ in range(20):
            d = curve.point(t) - p
            dp = curve.derivative(t)
            t = t - float(d @ dp) / float(dp @ dp)
        out.append(t)
    return np.array(out)


def limit_extraction(curve: ClosedCurve, base: int = 64, levels: int = 5, grid: int = 24,
                     cusp_tol: float = CUSP_TOL) -> ExtractionResult:
    """Limit of inscribed quadrilaterals on refining mollified polygons.

    Level ``i`` (1-based) inscribes a ``base * 2**(i-1)``-gon in ``curve``
    (a polygon target is used as is at every level) and rounds its corners
    with radius ``1 / (4 i)``. The first level keeps its largest orbit;
    each later level keeps the orbit nearest the previous choice. The finest
    choice is the limit candidate; it is then polished by Newton on the
    target itself.
    """
    first = curve if isinstance(curve, Polygon) else inscribe_polygon(curve, base)
    if len(cusp_vertices(first, cusp_tol)):
        raise CurveError("target has a cusp (turning angle within tolerance of pi)")
    floor = 0.5 * pi_distance(curve, 2000)
    chosen = []
    prev = None
    for i in range(1, levels + 1):
        n = base * 2 ** (i - 1)
        poly = curve if isinstance(curve, Polygon) else inscribe_polygon(curve, n)
        radius = 1.0 / (4 * i)
        surrogate = RoundedPolygon(poly.vertices, radius)
        res = find_squares(surrogate, grid=grid, min_side=floor)
        sol = None
        if res.orbits:
            reps = [o.representative for o in res.orbits]
            if prev is None:
                sol = max(reps, key=lambda s: s.side)
            else:
                sol = min(reps, key=lambda s: _vertex_distance(prev, s.vertices.points))
            prev = sol.vertices.points
        chosen.append(ExtractionLevel(n, radius, sol, res.count))
    found = [lv for lv in chosen if lv.solution is not None]
    if not found:
        raise ExtractionError("no refinement level produced a quadrilateral above the floor")
    limit = found[-1].solution.vertices
    theta = _nearest_params(curve, limit.points)
    th, resid, ok = polish(curve, theta)
    polished = make_solution(curve, th) if ok else None
    return ExtractionResult(chosen, limit, polished, resid, floor)
