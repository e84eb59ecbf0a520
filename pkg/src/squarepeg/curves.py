"""Closed curves: evaluation, arclength, inscribed polygons, total curvature.

Every curve is parametrized over ``[0, 2*pi)``. Analytic curves use their
natural angle; polygons use normalized arclength, so vertex ``i`` of an
equilateral-in-arclength polygon sits at ``2*pi*s_i/L``.

The turning-angle estimator and the pi-distance live here as well, since
both only need a vertex list.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .errors import CurveError

TWO_PI = 2.0 * math.pi
QUAD_TOL = 1e-10
EMBED_CHECK_VERTICES = 512
POSITIVITY_GRID = 4096

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


class OneSidedTangent(NamedTuple):
    """Tangent at a polygon corner: unit directions of the two adjacent edges."""

    incoming: np.ndarray
    outgoing: np.ndarray


class ClosedCurve:
    """Base class. Subclasses implement ``point`` and ``derivative``.

    Both accept scalar or array ``theta`` and return arrays of shape
    ``theta.shape + (dim,)``.
    """

    dim: int = 2

    def point(self, theta):
        raise NotImplementedError

    def derivative(self, theta):
        """d(point)/d(theta)."""
        raise NotImplementedError

    def eval(self, theta):
        return self.point(theta)

    def tangent(self, theta):
        d = self.derivative(theta)
        return d / np.linalg.norm(d, axis=-1, keepdims=True)

    def speed(self, theta):
        return np.linalg.norm(self.derivative(theta), axis=-1)

    def sample(self, n: int) -> np.ndarray:
        return self.point(np.arange(n) * (TWO_PI / n))

    def diameter(self, n: int = 512) -> float:
        pts = self.sample(n)
        diff = pts[:, None, :] - pts[None, :, :]
        return float(np.sqrt((diff**2).sum(-1)).max())


@dataclass(frozen=True, eq=False)
class Ellipse(ClosedCurve):
    """``theta -> (a cos theta, b sin theta)``."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise CurveError(f"ellipse semi-axes must be positive, got a={self.a}, b={self.b}")

    def point(self, theta):
        t = np.asarray(theta, dtype=float)
        return np.stack([self.a * np.cos(t), self.b * np.sin(t)], axis=-1)

    def derivative(self, theta):
        t = np.asarray(theta, dtype=float)
        return np.stack([-self.a * np.sin(t), self.b * np.cos(t)], axis=-1)


@dataclass(frozen=True, eq=False)
class RadialFourier(ClosedCurve):
    """Planar star-shaped curve ``r(theta) = c0 + sum a_m cos(m theta) + b_m sin(m theta)``.

    ``cos_coeffs[m-1]`` and ``sin_coeffs[m-1]`` hold ``a_m`` and ``b_m``.
    """

    c0: float = 1.0
    cos_coeffs: tuple = ()
    sin_coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "cos_coeffs", tuple(float(x) for x in self.cos_coeffs))
        object.__setattr__(self, "sin_coeffs", tuple(float(x) for x in self.sin_coeffs))
        t = np.arange(POSITIVITY_GRID) * (TWO_PI / POSITIVITY_GRID)
        if np.min(self.radius(t)) <= 0:
            raise CurveError("radial function must be positive everywhere")

    def _modes(self, theta):
        t = np.asarray(theta, dtype=float)
        m = max(len(self.cos_coeffs), len(self.sin_coeffs))
        a = np.zeros(m)
        b = np.zeros(m)
        a[: len(self.cos_coeffs)] = self.cos_coeffs
        b[: len(self.sin_coeffs)] = self.sin_coeffs
        k = np.arange(1, m + 1)
        mt = t[..., None] * k
        return t, k, a, b, mt

    def radius(self, theta):
        t, k, a, b, mt = self._modes(theta)
        return self.c0 + (a * np.cos(mt) + b * np.sin(mt)).sum(-1)

    def radius_prime(self, theta):
        t, k, a, b, mt = self._modes(theta)
        return (k * (-a * np.sin(mt) + b * np.cos(mt))).sum(-1)

    def point(self, theta):
        t = np.asarray(theta, dtype=float)
        r = self.radius(t)
        return np.stack([r * np.cos(t), r * np.sin(t)], axis=-1)

    def derivative(self, theta):
        t = np.asarray(theta, dtype=float)
        r = self.radius(t)
        dr = self.radius_prime(t)
        return np.stack(
            [dr * np.cos(t) - r * np.sin(t), dr * np.sin(t) + r * np.cos(t)], axis=-1
        )


def _turning(vertices: np.ndarray) -> np.ndarray:
    """Exterior turning angle at each vertex of a closed polygon, in [0, pi]."""
    e_in = vertices - np.roll(vertices, 1, axis=0)
    e_out = np.roll(vertices, -1, axis=0) - vertices
    dot = (e_in * e_out).sum(-1)
    n2 = (e_in**2).sum(-1) * (e_out**2).sum(-1)
    cross = np.sqrt(np.clip(n2 - dot**2, 0.0, None))
    return np.arctan2(cross, dot)


@dataclass(frozen=True, eq=False)
class Polygon(ClosedCurve):
    """Closed polygon in R^k parametrized proportionally to arclength."""

    vertices: np.ndarray
    _cum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or len(v) < 3:
            raise CurveError("polygon needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise CurveError("polygon vertices must be finite")
        edges = np.linalg.norm(np.roll(v, -1, axis=0) - v, axis=1)
        if np.any(edges < 1e-14):
            raise CurveError("polygon has coincident consecutive vertices")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "dim", v.shape[1])
        object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(edges)]))

    @property
    def length(self) -> float:
        return float(self._cum[-1])

    @property
    def n(self) -> int:
        return len(self.vertices)

    def vertex_params(self) -> np.ndarray:
        return self._cum[:-1] * (TWO_PI / self.length)

    def turning_angles(self) -> np.ndarray:
        return _turning(self.vertices)

    def _locate(self, theta):
        s = np.mod(np.asarray(theta, dtype=float), TWO_PI) * (self.length / TWO_PI)
        idx = np.clip(np.searchsorted(self._cum, s, side="right") - 1, 0, self.n - 1)
        return s, idx

    def point(self, theta):
        s, idx = self._locate(theta)
        v0 = self.vertices[idx]
        v1 = self.vertices[(idx + 1) % self.n]
        seg = self._cum[idx + 1] - self._cum[idx]
        w = ((s - self._cum[idx]) / seg)[..., None]
        return v0 + w * (v1 - v0)

    def derivative(self, theta):
        # right derivative; corners are resolved by tangent()
        s, idx = self._locate(theta)
        v0 = self.vertices[idx]
        v1 = self.vertices[(idx + 1) % self.n]
        seg = (self._cum[idx + 1] - self._cum[idx])[..., None]
        return (v1 - v0) / seg * (self.length / TWO_PI)

    def tangent(self, theta):
        """Unit tangent; at a vertex returns a :class:`OneSidedTangent`."""
        t = float(theta)
        params = self.vertex_params()
        s = math.remainder(t, TWO_PI) % TWO_PI
        hit = np.nonzero(np.abs(np.angle(np.exp(1j * (params - s)))) < 1e-12)[0]
        if hit.size:
            i = int(hit[0])
            e_in = self.vertices[i] - self.vertices[i - 1]
            e_out = self.vertices[(i + 1) % self.n] - self.vertices[i]
            return OneSidedTangent(e_in / np.linalg.norm(e_in), e_out / np.linalg.norm(e_out))
        return super().tangent(t)


@dataclass(frozen=True, eq=False)
class RoundedPolygon(ClosedCurve):
    """C^1 surrogate of a polygon: each corner replaced by a circular arc.

    The arc radius is ``radius`` unless the tangent offset would eat more
    than 45% of an adjacent edge, in which case it shrinks locally. Arc
    turning equals corner turning, so total curvature is unchanged.
    """

    vertices: np.ndarray
    radius: float
    _pieces: dict = field(init=False, repr=False)

    def __post_init__(self):
        poly = Polygon(self.vertices)
        v = poly.vertices
        n = len(v)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "dim", v.shape[1])
        if not self.radius > 0:
            raise CurveError("rounding radius must be positive")
        e_out = np.roll(v, -1, axis=0) - v
        elen = np.linalg.norm(e_out, axis=1)
        u_out = e_out / elen[:, None]
        u_in = np.roll(u_out, 1, axis=0)
        alpha = poly.turning_angles()
        if np.any(alpha > math.pi - 1e-9):
            raise CurveError("cannot round a cusp")
        half = np.tan(alpha / 2)
        cap = 0.45 * np.minimum(elen, np.roll(elen, 1))
        offset = np.minimum(self.radius * half, cap)
        rad = np.where(half > 1e-15, offset / np.where(half > 1e-15, half, 1.0), 0.0)
        normal = u_out - (u_out * u_in).sum(1, keepdims=True) * u_in
        nn = np.linalg.norm(normal, axis=1, keepdims=True)
        normal = np.where(nn > 1e-15, normal / np.where(nn > 1e-15, nn, 1.0), 0.0)
        # piece 2i: arc at vertex i; piece 2i+1: straight part of edge i -> i+1
        t1 = v - offset[:, None] * u_in
        t2 = v + offset[:, None] * u_out
        line_start = t2
        line_len = elen - offset - np.roll(offset, -1)
        arc_len = rad * alpha
        lengths = np.empty(2 * n)
        lengths[0::2] = arc_len
        lengths[1::2] = line_len
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        pieces = dict(
            n=n, cum=cum, t1=t1, center=t1 + rad[:, None] * normal, normal=normal,
            u_in=u_in, u_out=u_out, rad=rad, alpha=alpha, line_start=line_start,
        )
        object.__setattr__(self, "_pieces", pieces)

    @property
    def length(self) -> float:
        return float(self._pieces["cum"][-1])

    def _eval(self, theta, deriv: bool):
        p = self._pieces
        cum = p["cum"]
        L = cum[-1]
        s = np.mod(np.asarray(theta, dtype=float), TWO_PI) * (L / TWO_PI)
        idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(cum) - 2)
        local = s - cum[idx]
        vi = idx // 2
        is_arc = (idx % 2 == 0)[..., None]
        rad = p["rad"][vi]
        safe_rad = np.where(rad > 0, rad, 1.0)
        phi = np.where(rad > 0, local / safe_rad, 0.0)[..., None]
        u_in = p["u_in"][vi]
        nrm = p["normal"][vi]
        if deriv:
            arc = nrm * np.sin(phi) + u_in * np.cos(phi)
            line = p["u_out"][vi]
            out = np.where(is_arc, arc, line)
            return out * (L / TWO_PI)
        arc = p["center"][vi] + rad[..., None] * (-nrm * np.cos(phi) + u_in * np.sin(phi))
        line = p["line_start"][vi] + local[..., None] * p["u_out"][vi]
        return np.where(is_arc, arc, line)

    def point(self, theta):
        return self._eval(theta, deriv=False)

    def derivative(self, theta):
        return self._eval(theta, deriv=True)


@dataclass(frozen=True, eq=False)
class TransformedCurve(ClosedCurve):
    """``theta -> scale * M @ base(theta) + offset`` for an isometric ``M``.

    ``M`` may be ``k x d`` with orthonormal columns, which embeds a planar
    curve in R^k.
    """

    base: ClosedCurve
    matrix: np.ndarray
    offset: np.ndarray = None
    scale: float = 1.0

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[1] != self.base.dim:
            raise CurveError("transform matrix does not match curve dimension")
        if not np.allclose(m.T @ m, np.eye(m.shape[1]), atol=1e-10):
            raise CurveError("transform matrix must have orthonormal columns")
        off = np.zeros(m.shape[0]) if self.offset is None else np.array(self.offset, dtype=float)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "offset", off)
        object.__setattr__(self, "dim", m.shape[0])

    def point(self, theta):
        return self.scale * self.base.point(theta) @ self.matrix.T + self.offset

    def derivative(self, theta):
        return self.scale * self.base.derivative(theta) @ self.matrix.T


@dataclass(frozen=True, eq=False)
class BlendedCurve(ClosedCurve):
    """Pointwise blend ``(1-t) c0(theta) + t c1(theta)``.

    For two ellipses this is linear interpolation of ``(a, b)``; for two
    radial Fourier curves it is linear interpolation of the coefficients.
    """

    c0: ClosedCurve
    c1: ClosedCurve
    t: float

    def __post_init__(self):
        if self.c0.dim != self.c1.dim:
            raise CurveError("blended curves must share an ambient dimension")
        object.__setattr__(self, "dim", self.c0.dim)

    def point(self, theta):
        return (1 - self.t) * self.c0.point(theta) + self.t * self.c1.point(theta)

    def derivative(self, theta):
        return (1 - self.t) * self.c0.derivative(theta) + self.t * self.c1.derivative(theta)

    def velocity(self, theta):
        """d(point)/dt at fixed theta."""
        return self.c1.point(theta) - self.c0.point(theta)


@dataclass(frozen=True)
class CurveArc:
    """Arc of ``curve`` from parameter ``start`` forward to ``stop``."""

    curve: ClosedCurve
    start: float
    stop: float

    def __post_init__(self):
        span = (self.stop - self.start) % TWO_PI
        if span == 0 or span >= TWO_PI:
            raise ValueError("arc must be nonempty and shorter than the full curve")

    @property
    def span(self) -> float:
        return (self.stop - self.start) % TWO_PI


# ---------------------------------------------------------------------------
# arclength and polygonization

def arclength(curve: ClosedCurve, start: float = 0.0, stop: float = TWO_PI) -> float:
    """Length of the curve between two parameters, by adaptive quadrature."""
    if isinstance(curve, (Polygon, RoundedPolygon)):
        span = stop - start
        if span == TWO_PI:
            return curve.length
        return span * curve.length / TWO_PI
    val, _ = integrate.quad(
        lambda t: float(curve.speed(t)), start, stop, epsabs=QUAD_TOL, epsrel=0, limit=500
    )
    return val


def _arclength_table(curve: ClosedCurve, panels: int = 512):
    edges = np.linspace(0.0, TWO_PI, panels + 1)
    lens = np.array([arclength(curve, edges[i], edges[i + 1]) for i in range(panels)])
    return edges, np.concatenate([[0.0], np.cumsum(lens)])


def _partial(curve, a, b):
    """Gauss-Legendre arclength on [a, b] (vectorized over arrays a, b)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = mid[..., None] + half[..., None] * _GL_X
    return half * (curve.speed(nodes) * _GL_W).sum(-1)


def arclength_params(curve: ClosedCurve, n: int) -> np.ndarray:
    """Parameters of ``n`` points equally spaced by arclength, starting at 0."""
    if isinstance(curve, (Polygon, RoundedPolygon)):
        return np.arange(n) * (TWO_PI / n)
    edges, cum = _arclength_table(curve)
    total = cum[-1]
    targets = np.arange(n) * (total / n)
    idx = np.clip(np.searchsorted(cum, targets, side="right") - 1, 0, len(edges) - 2)
    lo = edges[idx]
    base = cum[idx]
    width = edges[idx + 1] - lo
    frac = (targets - base) / (cum[idx + 1] - base)
    t = lo + frac * width
    for _ in range(30):
        f = base + _partial(curve, lo, t) - targets
        t_new = np.clip(t - f / curve.speed(t), lo, lo + width)
        if np.max(np.abs(t_new - t)) < 1e-15:
            t = t_new
            break
        t = t_new
    return t


def inscribe_polygon(curve: ClosedCurve, n: int) -> Polygon:
    """Inscribed n-gon with vertices equally spaced in arclength."""
    if n < 3:
        raise ValueError("need at least 3 vertices")
    return Polygon(curve.point(arclength_params(curve, n)))


def as_polygon(curve: ClosedCurve, n: int) -> Polygon:
    if isinstance(curve, Polygon) and curve.n <= n:
        return curve
    return inscribe_polygon(curve, n)


# ---------------------------------------------------------------------------
# curvature

def turning_angles(polygon: Polygon) -> np.ndarray:
    return polygon.turning_angles()


def total_curvature(polygon: Polygon, start: float | None = None, stop: float | None = None) -> float:
    """Total turning of a polygon, or of its open arc ``(start, stop)``.

    Only vertices strictly inside the arc contribute; an arc that begins or
    ends exactly at a vertex does not count that corner.
    """
    alpha = polygon.turning_angles()
    if start is None and stop is None:
        return float(alpha.sum())
    arc = CurveArc(polygon, float(start), float(stop))
    rel = np.mod(polygon.vertex_params() - arc.start, TWO_PI)
    eps = 1e-12
    inside = (rel > eps) & (rel < arc.span - eps)
    return float(alpha[inside].sum())


def cusp_vertices(polygon: Polygon, threshold: float = 1e-3) -> np.ndarray:
    """Indices of corners whose turning is within ``threshold`` of pi."""
    return np.nonzero(polygon.turning_angles() > math.pi - threshold)[0]


# ---------------------------------------------------------------------------
# pi-distance

# slack on the "turns at least pi" test, so symmetric curves whose arcs turn
# exactly pi are not split by rounding in the cumulative sum
TURN_TOL = 1e-9


def _pi_distance_vertices(v: np.ndarray, alpha: np.ndarray, two_sided: bool):
    n = len(v)
    # cum[m] = turning of vertices 0..m-1, extended over two laps
    a2 = np.concatenate([alpha, alpha])
    cum = np.concatenate([[0.0], np.cumsum(a2)])
    total = cum[n]
    best = (math.inf, None, None)
    for i in range(n):
        j = np.arange(i + 1, i + n)
        if two_sided:
            # closed arcs on both sides must turn at least pi
            fwd = cum[j + 1] - cum[i]
            back = total - (cum[j] - cum[i + 1])
            ok = (fwd >= math.pi - TURN_TOL) & (back >= math.pi - TURN_TOL)
        else:
            ok = (cum[j] - cum[i + 1]) >= math.pi - TURN_TOL
        if not ok.any():
            continue
        jj = j[ok] % n
        chords = np.linalg.norm(v[jj] - v[i], axis=1)
        m = int(np.argmin(chords))
        if chords[m] < best[0]:
            best = (float(chords[m]), i, int(jj[m]))
    return best


@dataclass(frozen=True)
class PiDistance:
    value: float
    endpoints: tuple
    polygon: Polygon
    convention: str


def pi_distance_detail(curve: ClosedCurve, n: int = 2000, convention: str = "two-sided") -> PiDistance:
    """Estimate the pi-distance from an inscribed n-gon.

    ``convention="two-sided"`` takes the minimum chord over vertex pairs both
    of whose connecting arcs (endpoints included) turn by at least pi. This
    gives the diameter for a circle. ``convention="one-sided"`` uses the
    literal open-subarc reading, where the long way around every short chord
    qualifies, so the value collapses to roughly one edge length.
    """
    if convention not in ("two-sided", "one-sided"):
        raise ValueError(f"unknown convention {convention!r}")
    poly = curve if (isinstance(curve, Polygon) and curve.n == n) else inscribe_polygon(curve, n)
    value, i, j = _pi_distance_vertices(poly.vertices, poly.turning_angles(), convention == "two-sided")
    if i is None:
        raise RuntimeError("no subarc turns by pi; total curvature of a closed curve is at least 2 pi")
    return PiDistance(value, (i, j), poly, convention)


def pi_distance(curve: ClosedCurve, n: int = 2000, convention: str = "two-sided") -> float:
    return pi_distance_detail(curve, n, convention).value


# ---------------------------------------------------------------------------
# embeddedness

def _segments_intersect_2d(p, q):
    """Boolean matrix: does segment i (p[i]->q[i]) meet segment j?"""
    def orient(a, b, c):
        return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (c[..., 0] - a[..., 0])

    P, Q = p[:, None, :], q[:, None, :]
    R, S = p[None, :, :], q[None, :, :]
    d1 = orient(R, S, P)
    d2 = orient(R, S, Q)
    d3 = orient(P, Q, R)
    d4 = orient(P, Q, S)
    return (d1 * d2 < 0) & (d3 * d4 < 0)


def _segment_distances(p, q):
    """Minimum distance between every pair of segments (any dimension)."""
    d1 = (q - p)[:, None, :]
    d2 = (q - p)[None, :, :]
    r = p[:, None, :] - p[None, :, :]
    a = (d1 * d1).sum(-1)
    e = (d2 * d2).sum(-1)
    f = (d2 * r).sum(-1)
    c = (d1 * r).sum(-1)
    b = (d1 * d2).sum(-1)
    den = a * e - b * b
    s = np.where(den > 1e-300, np.clip((b * f - c * e) / np.where(den > 1e-300, den, 1), 0, 1), 0.0)
    t = (b * s + f) / e
    t = np.clip(t, 0, 1)
    s = np.clip((b * t - c) / a, 0, 1)
    diff = p[:, None, :] + s[..., None] * d1 - (p[None, :, :] + t[..., None] * d2)
    return np.sqrt((diff**2).sum(-1))


def is_simple(curve: ClosedCurve, n: int = EMBED_CHECK_VERTICES) -> bool:
    """Brute-force embeddedness check on an n-gon sampled from the curve."""
    if isinstance(curve, Polygon):
        pts = curve.vertices
    else:
        pts = curve.sample(n)
    m = len(pts)
    p, q = pts, np.roll(pts, -1, axis=0)
    idx = np.arange(m)
    gap = np.abs(idx[:, None] - idx[None, :])
    nonadj = (gap > 1) & (gap < m - 1)
    if curve.dim == 2:
        hit = _segments_intersect_2d(p, q)
        return not bool(np.any(hit & nonadj))
    scale = np.linalg.norm(pts.max(0) - pts.min(0))
    dist = _segment_distances(p, q)
    return not bool(np.any((dist < 1e-9 * scale) & nonadj))


def require_simple(curve: ClosedCurve) -> ClosedCurve:
    if not is_simple(curve):
        raise CurveError("curve is not embedded (self-intersection detected)")
    return curve


# ---------------------------------------------------------------------------
# approximation diagnostics

def approximation_errors(curve: ClosedCurve, n: int, probes: int = 4096, fine: int = 40000):
    """Position, arclength and total-curvature errors of the inscribed n-gon.

    The polygon shares its vertex parameters with the curve and is linear in
    between. Arclength and curvature errors are suprema over all arcs whose
    endpoints are probe parameters, i.e. ``max(diff) - min(diff)`` of the
    cumulative differences. The curve's cumulative turning comes from a
    ``fine``-gon.
    """
    params = arclength_params(curve, n)
    verts = curve.point(params)
    theta = np.linspace(0, TWO_PI, probes, endpoint=False) + 0.5 * TWO_PI / probes
    k = np.searchsorted(params, theta, side="right") - 1
    t0 = params[k]
    t1 = np.where(k + 1 < n, params[(k + 1) % n], TWO_PI)
    w = (theta - t0) / (t1 - t0)
    nxt = verts[(k + 1) % n]
    on_poly = verts[k] + w[:, None] * (nxt - verts[k])
    pos_err = float(np.max(np.linalg.norm(on_poly - curve.point(theta), axis=1)))

    edges, cum_tab = _arclength_table(curve)
    pidx = np.clip(np.searchsorted(edges, theta, side="right") - 1, 0, len(edges) - 2)
    cum_curve = cum_tab[pidx] + _partial(curve, edges[pidx], theta)
    seg = np.linalg.norm(np.roll(verts, -1, axis=0) - verts, axis=1)
    cum_poly = np.concatenate([[0.0], np.cumsum(seg)])[k] + w * seg[k]
    diff = cum_poly - cum_curve
    len_err = float(max(diff.max() - diff.min(), abs(seg.sum() - cum_tab[-1])))

    fine_t = np.arange(fine) * (TWO_PI / fine)
    fine_turn = _turning(curve.point(fine_t))
    k_curve = np.interp(theta, fine_t, np.cumsum(fine_turn))
    k_poly = np.cumsum(_turning(verts))[k]
    dk = k_poly - k_curve
    tc_err = float(max(dk.max() - dk.min(), abs(fine_turn.sum() - _turning(verts).sum())))
    return pos_err, len_err, tc_err
