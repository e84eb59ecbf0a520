"""Independent oracles used to freeze expected values.

None of these share code paths with the package solvers: squares are found
from an implicit curve equation instead of the curve-parameter residual,
tetrahedron volumes come from coordinates, determinants from exact
cofactor expansion.
"""
from __future__ import annotations

from fractions import Fraction
import numpy as np
from scipy.optimize import fsolve


def cofactor_det(m):
    """Exact determinant by Laplace expansion along the first row."""
    m = [[Fraction(x) for x in row] for row in m]
    n = len(m)
    if n == 1:
        return m[0][0]
    total = Fraction(0)
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * cofactor_det(minor)
    return total


def implicit_ellipse(a, b):
    return lambda p: (p[..., 0] / a) ** 2 + (p[..., 1] / b) ** 2 - 1.0


def implicit_radial(c0, cos_coeffs=(), sin_coeffs=()):
    def g(p):
        t = np.arctan2(p[..., 1], p[..., 0])
        r = c0 + sum(a * np.cos((m + 1) * t) for m, a in enumerate(cos_coeffs))
        r = r + sum(b * np.sin((m + 1) * t) for m, b in enumerate(sin_coeffs))
        return np.hypot(p[..., 0], p[..., 1]) - r
    return g


def squares_by_edge_sweep(point, g, n=360, min_side=0.05):
    """Inscribed squares of a planar curve from a sweep over adjacent vertex pairs.

    For parameters (u, v) the points p1 = point(u), p2 = point(v) span one
    side; the other two vertices are p2 + J(p2 - p1) and p1 + J(p2 - p1) with
    J a quarter turn in either direction. Both must satisfy g = 0. Sign
    changes on an n x n grid seed fsolve; results are deduplicated as vertex
    sets. The diagonal u = v is a trivial zero-size root, so ``min_side``
    must stay positive. Returns a list of (4, 2) vertex arrays.
    """
    rots = [np.array([[0.0, -1.0], [1.0, 0.0]]), np.array([[0.0, 1.0], [-1.0, 0.0]])]
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    found = []

    def F(x, J):
        p1, p2 = point(x[0]), point(x[1])
        e = (p2 - p1) @ J.T
        return np.array([g(p2 + e), g(p1 + e)])

    for J in rots:
        U, V = np.meshgrid(t, t, indexing="ij")
        p1, p2 = point(U), point(V)
        e = (p2 - p1) @ J.T
        f1, f2 = g(p2 + e), g(p1 + e)
        side = np.linalg.norm(p2 - p1, axis=-1)
        a1 = np.stack([f1, np.roll(f1, -1, 0), np.roll(f1, -1, 1), np.roll(np.roll(f1, -1, 0), -1, 1)])
        a2 = np.stack([f2, np.roll(f2, -1, 0), np.roll(f2, -1, 1), np.roll(np.roll(f2, -1, 0), -1, 1)])
        ch = (a1.min(0) <= 0) & (a1.max(0) >= 0) & (a2.min(0) <= 0) & (a2.max(0) >= 0)
        cells = np.argwhere(ch & (side > 0.5 * min_side))
        h = t[1] - t[0]
        for i, j in cells:
            x0 = np.array([t[i] + h / 2, t[j] + h / 2])
            x, info, ier, _ = fsolve(F, x0, args=(J,), full_output=True, xtol=1e-14)
            if ier != 1 or np.max(np.abs(F(x, J))) > 1e-10:
                continue
            p1, p2 = point(x[0]), point(x[1])
            e = (p2 - p1) @ J.T
            quad = np.array([p1, p2, p2 + e, p1 + e])
            if np.linalg.norm(p2 - p1) < min_side:
                continue
            if not any(_same_set(quad, q) for q in found):
                found.append(quad)
    return found


def _same_set(a, b, tol=1e-7):
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=-1)
    return bool(np.all(d.min(axis=1) < tol))


def circumcenter_by_lstsq(points):
    """Equidistant point via least squares on |x - p_i|^2 = |x - p_0|^2."""
    p = np.asarray(points, dtype=float)
    A = 2 * (p[1:] - p[0])
    b = (p[1:] ** 2).sum(1) - (p[0] ** 2).sum()
    x, *_ = np.linalg.lstsq(A, b, rcond=None)
    return x


def simplex_volume_from_coords(points):
    import math
    p = np.asarray(points, dtype=float)
    k = p.shape[1]
    return abs(np.linalg.det((p[1:] - p[0]).T)) / math.factorial(k)


def heron(a, b, c):
    return 0.25 * np.sqrt((a + b + c) * (a + b - c) * (a - b + c) * (-a + b + c))


def pi_distance_brute(vertices, two_sided=True):
    """O(n^2) scan over vertex pairs with independently computed turning angles.

    The arc from vertex i forward to vertex j includes both endpoints'
    turning; with ``two_sided`` the complementary arc must also turn by at
    least pi.
    """
    v = np.asarray(vertices, dtype=float)
    n = len(v)
    e_in = v - np.roll(v, 1, axis=0)
    e_out = np.roll(v, -1, axis=0) - v
    cross = e_in[:, 0] * e_out[:, 1] - e_in[:, 1] * e_out[:, 0]
    dot = (e_in * e_out).sum(1)
    turn = np.abs(np.arctan2(cross, dot))
    total = turn.sum()
    best = np.inf
    for i in range(n):
        order = (i + np.arange(n)) % n
        fwd = np.cumsum(turn[order])  # fwd[m]: turning at i .. i+m inclusive
        m = np.arange(1, n)
        j = order[m]
        inner = fwd[m - 1] - turn[i]  # strictly between i and j
        if two_sided:
            ok = (fwd[m] >= np.pi - 1e-9) & (total - inner >= np.pi - 1e-9)
        else:
            ok = inner >= np.pi - 1e-9
        if ok.any():
            best = min(best, float(np.linalg.norm(v[j[ok]] - v[i], axis=1).min()))
    return best


LUMPY = "1 + sin(phi)**3*sin(3*theta)/5 - abs(cos(phi)**7)"


def lumpy_radius(phi, theta):
    return 1 + np.sin(phi) ** 3 * np.sin(3 * theta) / 5 - np.abs(np.cos(phi) ** 7)


def inscribe_lstsq(radius, model, rotation, starts=200, seed=0, min_scale=0.05):
    """All distinct ``(s, t)`` found by scipy least squares from random starts."""
    from scipy.optimize import least_squares

    av = np.asarray(model, dtype=float) @ np.asarray(rotation, dtype=float).T
    rng = np.random.default_rng(seed)

    def F(x):
        w = x[0] * av + x[1:]
        rho = np.linalg.norm(w, axis=1)
        phi = np.arccos(np.clip(w[:, 2] / rho, -1, 1))
        theta = np.arctan2(w[:, 1], w[:, 0])
        return rho - radius(phi, theta)

    found = []
    for _ in range(starts):
        x0 = np.r_[rng.uniform(0.3, 1.5), rng.uniform(-0.5, 0.5, 3)]
        sol = least_squares(F, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        w = sol.x[0] * av + sol.x[1:]
        if (np.max(np.abs(sol.fun)) < 1e-10 and sol.x[0] > min_scale
                and np.linalg.norm(w, axis=1).min() > 1e-6):
            if not any(np.allclose(sol.x, q, atol=1e-7) for q in found):
                found.append(sol.x)
    return found
