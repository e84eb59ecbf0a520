"""Inscribed square-like quadrilaterals on closed curves.

Four points ``p_i = curve(theta_i)`` form a square-like quadrilateral when
all four sides and both diagonals are equal. The residual used throughout is

    r = (s124 - 1, s231 - 1, s342 - 1, s132 - s241),   s_ijk = |p_i p_j| / |p_i p_k|

which vanishes exactly on that set. The Jacobian is with respect to the
four curve parameters.

All kernels are vectorized over a leading batch axis so that the
multi-start search runs every Newton start at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.sparse.csgraph import connected_components
from scipy.sparse import coo_matrix
from scipy.spatial import cKDTree

from .curves import TWO_PI, ClosedCurve, is_simple, pi_distance
from .errors import CurveError, DegenerateConfigurationError, UndefinedSignError
from .geom import COINCIDENCE_TOL, Configuration

NEWTON_TOL = 1e-11
MAX_ITER = 50
DEFAULT_GRID = 24
DEDUPE_TOL = 1e-6
DET_TOL = 1e-8
COND_TOL = 1e8

# (i, j) pairs whose lengths enter the residual, 0-based
_PAIRS = {"12": (0, 1), "14": (0, 3), "23": (1, 2), "34": (2, 3), "13": (0, 2), "24": (1, 3)}


def _lengths(curve: ClosedCurve, theta: np.ndarray):
    """Pairwise lengths and their theta-gradients, each shaped (..., ) and (..., 4)."""
    p = curve.point(theta)
    dp = curve.derivative(theta)
    out = {}
    for key, (i, j) in _PAIRS.items():
        diff = p[..., i, :] - p[..., j, :]
        d = np.linalg.norm(diff, axis=-1)
        with np.errstate(invalid="ignore", divide="ignore"):
            u = diff / d[..., None]
        g = np.zeros(theta.shape)
        g[..., i] = (u * dp[..., i, :]).sum(-1)
        g[..., j] = -(u * dp[..., j, :]).sum(-1)
        out[key] = (d, g)
    return p, out


def _residual_and_jacobian(curve: ClosedCurve, theta: np.ndarray, jac: bool = True):
    theta = np.asarray(theta, dtype=float)
    _, L = _lengths(curve, theta)
    (d12, g12), (d14, g14) = L["12"], L["14"]
    (d23, g23), (d34, g34) = L["23"], L["34"]
    (d13, g13), (d24, g24) = L["13"], L["24"]
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.stack(
            [d12 / d14 - 1.0, d23 / d12 - 1.0, d34 / d23 - 1.0, (d13 - d24) / d12], axis=-1
        )
        if not jac:
            return r, None
        rows = [
            g12 / d14[..., None] - (d12 / d14**2)[..., None] * g14,
            g23 / d12[..., None] - (d23 / d12**2)[..., None] * g12,
            g34 / d23[..., None] - (d34 / d23**2)[..., None] * g23,
            (g13 - g24) / d12[..., None] - ((d13 - d24) / d12**2)[..., None] * g12,
        ]
    return r, np.stack(rows, axis=-2)


def _check_distinct(curve: ClosedCurve, theta: np.ndarray):
    p = curve.point(theta)
    for i, j in combinations(range(4), 2):
        if np.linalg.norm(p[i] - p[j]) < COINCIDENCE_TOL:
            raise DegenerateConfigurationError(f"curve points {i + 1} and {j + 1} coincide")


def residual(curve: ClosedCurve, theta) -> np.ndarray:
    """``(s124 - 1, s231 - 1, s342 - 1, s132 - s241)`` at four curve parameters."""
    th = np.asarray(theta, dtype=float)
    _check_distinct(curve, th)
    return _residual_and_jacobian(curve, th, jac=False)[0]


def jacobian(curve: ClosedCurve, theta) -> np.ndarray:
    """Analytic ``d(residual)/d(theta)``, a 4x4 matrix.

    Each length derivative is ``u_ij . (dp_i dtheta_i - dp_j dtheta_j)`` with
    ``u_ij`` the unit direction from ``p_j`` to ``p_i``.
    """
    th = np.asarray(theta, dtype=float)
    _check_distinct(curve, th)
    return _residual_and_jacobian(curve, th)[1]


def finite_difference_jacobian(curve: ClosedCurve, theta, h: float = 1e-6) -> np.ndarray:
    th = np.asarray(theta, dtype=float)
    cols = []
    for m in range(4):
        e = np.zeros(4)
        e[m] = h
        cols.append((residual(curve, th + e) - residual(curve, th - e)) / (2 * h))
    return np.stack(cols, axis=1)


# ---------------------------------------------------------------------------
# certificates

@dataclass(frozen=True)
class Certificate:
    transverse: bool
    det: float
    condition: float

    @property
    def label(self) -> str:
        return "Transverse" if self.transverse else "NonTransverse"


def certify(jac: np.ndarray) -> Certificate:
    """Full-rank test on the restricted Jacobian.

    Transverse iff ``|det J| > 1e-8 * sigma_max^4`` and ``cond(J) < 1e8``.
    """
    sv = np.linalg.svd(jac, compute_uv=False)
    det = float(np.linalg.det(jac))
    smax = sv[0]
    cond = math.inf if sv[-1] == 0 else float(smax / sv[-1])
    ok = bool(smax > 0 and abs(det) > DET_TOL * smax**4 and cond < COND_TOL)
    return Certificate(ok, det, cond)


# ---------------------------------------------------------------------------
# solutions

@dataclass(frozen=True)
class SlqSolution:
    """One labeled inscribed square-like quadrilateral."""

    theta: np.ndarray
    vertices: Configuration
    side: float
    diagonal: float
    residual_norm: float
    jacobian: np.ndarray
    certificate: Certificate

    @property
    def sign(self) -> int | None:
        if not self.certificate.transverse:
            return None
        return 1 if self.certificate.det > 0 else -1

    def relabeled(self, curve: ClosedCurve, shift: int = 1) -> "SlqSolution":
        """Solution with labels cyclically shifted, ``(t1..t4) -> (t2, t3, t4, t1)``."""
        return make_solution(curve, np.roll(self.theta, -shift))


def make_solution(curve: ClosedCurve, theta) -> SlqSolution:
    th = np.asarray(theta, dtype=float)
    r, j = _residual_and_jacobian(curve, th)
    p = curve.point(th)
    side = float(np.linalg.norm(p[0] - p[1]))
    diag = float(np.linalg.norm(p[0] - p[2]))
    return SlqSolution(
        theta=th,
        vertices=Configuration(p),
        side=side,
        diagonal=diag,
        residual_norm=float(np.linalg.norm(r)),
        jacobian=j,
        certificate=certify(j),
    )


def certificate(sol: SlqSolution) -> Certificate:
    return sol.certificate


def intersection_sign(sol: SlqSolution) -> int:
    """Sign of ``det J``; undefined unless the solution is transverse."""
    if not sol.certificate.transverse:
        raise UndefinedSignError("intersection sign is undefined at a non-transverse solution")
    return 1 if sol.certificate.det > 0 else -1


@dataclass(frozen=True)
class SlqOrbit:
    """The four cyclic relabelings of one inscribed quadrilateral."""

    representative: SlqSolution
    members: tuple = field(repr=False)

    @property
    def transverse(self) -> bool:
        return self.representative.certificate.transverse

    @property
    def size(self) -> int:
        return 4

    def signs(self):
        return [m.sign for m in self.members]


def canonical_theta(theta) -> np.ndarray:
    """Reduce to [0, 2 pi) and rotate labels so the smallest parameter is first."""
    t = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    return np.roll(t, -int(np.argmin(t)))


def make_orbit(curve: ClosedCurve, theta) -> SlqOrbit:
    t = canonical_theta(theta)
    members = tuple(make_solution(curve, np.roll(t, -s)) for s in range(4))
    return SlqOrbit(members[0], members)


def is_cyclically_ordered(theta) -> bool:
    """True when theta_1 < theta_2 < theta_3 < theta_4 going once around the circle."""
    t = np.asarray(theta, dtype=float)
    rel = np.mod(t - t[0], TWO_PI)
    return bool(np.all(np.diff(rel) > 0))


def orbit_distance(t1, t2) -> float:
    """Max circular parameter distance between two labeled solutions, modulo relabeling."""
    a = np.asarray(t1, dtype=float)
    best = math.inf
    for s in range(4):
        d = np.angle(np.exp(1j * (np.roll(np.asarray(t2, dtype=float), -s) - a)))
        best = min(best, float(np.max(np.abs(d))))
    return best


# ---------------------------------------------------------------------------
# batched damped Newton

def newton_batch(curve: ClosedCurve, theta0: np.ndarray, tol: float = NEWTON_TOL,
                 max_iter: int = MAX_ITER):
    """Damped Newton with Armijo backtracking on ``|r|^2``, for a batch of starts.

    Returns ``(theta, residual_norm, ok)``; diverged or degenerate starts get
    ``ok = False`` and are otherwise left alone.
    """
    th = np.array(theta0, dtype=float)
    r, J = _residual_and_jacobian(curve, th)
    f = np.sum(r * r, axis=-1)
    alive = np.isfinite(f) & np.all(np.isfinite(J), axis=(-2, -1))
    f = np.where(alive, f, np.inf)
    done = alive & (np.sqrt(f) < tol)
    for _ in range(max_iter):
        act = alive & ~done
        if not act.any():
            break
        idx = np.nonzero(act)[0]
        Ja, ra = J[idx], r[idx]
        try:
            step = np.linalg.solve(Ja, ra[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = (np.linalg.pinv(Ja, rcond=1e-13) @ ra[..., None])[..., 0]
        bad = ~np.all(np.isfinite(step), axis=-1)
        if bad.any():
            step[bad] = (np.linalg.pinv(Ja[bad], rcond=1e-13) @ ra[bad][..., None])[..., 0]
        lam = np.ones(len(idx))
        accepted = np.zeros(len(idx), dtype=bool)
        new_th = th[idx].copy()
        new_r = ra.copy()
        new_J = Ja.copy()
        new_f = f[idx].copy()
        for _bt in range(12):
            pend = ~accepted
            if not pend.any():
                break
            trial = th[idx][pend] - lam[pend, None] * step[pend]
            rt, Jt = _residual_and_jacobian(curve, trial)
            ft = np.sum(rt * rt, axis=-1)
            good = (np.isfinite(ft) & np.all(np.isfinite(Jt), axis=(-2, -1))
                    & (ft <= (1 - 2e-4 * lam[pend]) * f[idx][pend]))
            sel = np.nonzero(pend)[0][good]
            new_th[sel] = trial[good]
            new_r[sel] = rt[good]
            new_J[sel] = Jt[good]
            new_f[sel] = ft[good]
            accepted[sel] = True
            lam[pend] *= 0.5
        stuck = ~accepted
        th[idx] = new_th
        r[idx] = new_r
        J[idx] = new_J
        f[idx] = new_f
        alive[idx[stuck]] = False
        done |= alive & (np.sqrt(f) < tol)
    ok = done & alive
    return th, np.sqrt(f), ok


def polish(curve: ClosedCurve, theta, tol: float = NEWTON_TOL, max_iter: int = MAX_ITER):
    th, res, ok = newton_batch(curve, np.asarray(theta, dtype=float)[None, :], tol, max_iter)
    return th[0], float(res[0]), bool(ok[0])


def grid_starts(grid: int, offset: float = 0.0) -> np.ndarray:
    """All strictly increasing 4-tuples from a uniform grid on the circle."""
    base = np.arange(grid) * (TWO_PI / grid) + offset
    return base[np.array(list(combinations(range(grid), 4)))]


# ---------------------------------------------------------------------------
# search

@dataclass
class SearchResult:
    orbits: list
    min_side: float
    starts: int
    converged: int

    @property
    def count(self) -> int:
        return len(self.orbits)

    @property
    def all_transverse(self) -> bool:
        return all(o.transverse for o in self.orbits)

    @property
    def rotational_family(self) -> bool:
        """Many non-transverse orbits: a continuum of solutions was sampled."""
        return len(self.orbits) >= 2 and not any(o.transverse for o in self.orbits)


def default_min_side(curve: ClosedCurve) -> float:
    return max(1e-3 * curve.diameter(), 0.5 * pi_distance(curve, 1000))


def _cluster(thetas: np.ndarray, tol: float) -> np.ndarray:
    """Connected components of solutions closer than ``tol`` modulo relabeling.

    A solution is reduced to its sorted parameter set. A twin whose smallest
    parameter crossed zero sorts differently, so each set is also inserted
    with its first ``s`` entries wrapped to the end (shifted down by 2 pi).
    """
    n = len(thetas)
    srt = np.sort(np.mod(thetas, TWO_PI), axis=1)
    copies = [srt]
    for s in range(1, 4):
        shifted = np.roll(srt, -s, axis=1)
        shifted[:, : 4 - s] -= TWO_PI
        copies.append(shifted)
    tree = cKDTree(np.concatenate(copies))
    pairs = tree.query_pairs(tol, p=np.inf, output_type="ndarray")
    own = np.tile(np.arange(n), 4)
    a, b = own[pairs[:, 0]], own[pairs[:, 1]]
    g = coo_matrix((np.ones(len(a)), (a, b)), shape=(n, n))
    return connected_components(g, directed=False)[1]


def find_squares(curve: ClosedCurve, grid: int = DEFAULT_GRID, tol: float = NEWTON_TOL,
                 min_side: float | None = None, dedupe_tol: float = DEDUPE_TOL,
                 check_simple: bool = True) -> SearchResult:
    """All inscribed square-like quadrilaterals reachable from a start grid.

    Every increasing 4-tuple of a ``grid``-point uniform grid seeds a damped
    Newton solve. Converged, cyclically ordered solutions with side at least
    ``min_side`` are grouped into Z/4 orbits.
    """
    if curve.dim not in (2, 3):
        raise CurveError("square search supports planar curves and curves in R^3")
    if check_simple and not is_simple(curve):
        raise CurveError("curve is not embedded (self-intersection detected)")
    if min_side is None:
        min_side = default_min_side(curve)
    starts = grid_starts(grid, offset=0.5 * TWO_PI / grid)
    th, res, ok = newton_batch(curve, starts, tol=tol)
    keep = []
    for i in np.nonzero(ok)[0]:
        t = th[i]
        if not is_cyclically_ordered(t):
            continue
        p = curve.point(t)
        if np.linalg.norm(p[0] - p[1]) < min_side:
            continue
        keep.append(i)
    keep = np.array(keep, dtype=int)
    labels = _cluster(th[keep], dedupe_tol) if len(keep) else np.zeros(0, dtype=int)
    orbits = []
    for lab in np.unique(labels):
        members = keep[labels == lab]
        best = members[np.argmin(res[members])]
        orbits.append(make_orbit(curve, th[best]))
    orbits.sort(key=lambda o: tuple(o.representative.theta))
    return SearchResult(orbits, float(min_side), len(starts), int(ok.sum()))


def signed_count(result: SearchResult) -> int:
    """Sum of intersection signs over every labeled transverse solution."""
    total = 0
    for o in result.orbits:
        for m in o.members:
            if m.sign is not None:
                total += m.sign
    return total


__all__ = [
    "residual", "jacobian", "finite_difference_jacobian", "certify", "certificate",
    "intersection_sign", "find_squares", "make_solution", "make_orbit", "SlqSolution",
    "SlqOrbit", "SearchResult", "Certificate", "newton_batch", "polish", "orbit_distance",
    "canonical_theta", "is_cyclically_ordered", "default_min_side", "signed_count",
]
