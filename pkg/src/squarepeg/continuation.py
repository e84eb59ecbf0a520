"""Tracking inscribed squares through a one-parameter family of curves.

The family is the pointwise blend ``c_t = (1-t) c0 + t c1``. Solutions of
``H(theta, t) = residual(c_t, theta) = 0`` form curves in ``(theta, t)``
space, followed here by pseudo-arclength continuation: an Euler predictor
along the null vector of the 4x5 Jacobian ``[J_theta | H_t]`` and a Newton
corrector on ``(H, tau . (x - x_pred))``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curves import BlendedCurve, ClosedCurve
from .errors import CurveError, DegenerateConfigurationError
from .slq import (NEWTON_TOL, _residual_and_jacobian, default_min_side, find_squares,
                  is_cyclically_ordered, make_solution, orbit_distance, polish)

STEP = 0.01
MIN_STEP = 1e-6
MAX_STEPS = 20000
CORRECTOR_ITER = 12
INTERIOR_SEARCHES = 5
MATCH_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class CurveFamily:
    """Blend between two curves of the same ambient dimension.

    For two ellipses this interpolates ``(a, b)`` linearly, for two radial
    Fourier curves it interpolates the coefficients.
    """

    c0: ClosedCurve
    c1: ClosedCurve

    def __post_init__(self):
        if self.c0.dim != self.c1.dim:
            raise CurveError("family endpoints must share an ambient dimension")

    def at(self, t: float) -> BlendedCurve:
        return BlendedCurve(self.c0, self.c1, float(t))


@dataclass(frozen=True, eq=False)
class _Velocity(ClosedCurve):
    """Blended curve whose ``derivative`` is ``d/dt`` instead of ``d/dtheta``.

    Summing the columns of the residual Jacobian of this view gives
    ``dH/dt``, because each column is ``dr/dp_i . dp_i``.
    """

    curve: BlendedCurve

    def __post_init__(self):
        object.__setattr__(self, "dim", self.curve.dim)

    def point(self, theta):
        return self.curve.point(theta)

    def derivative(self, theta):
        return self.curve.velocity(theta)


def homotopy(family: CurveFamily, x):
    """``H``, and the 4x5 Jacobian ``[J_theta | H_t]`` at ``x = (theta, t)``."""
    x = np.asarray(x, dtype=float)
    c = family.at(x[4])
    r, jt = _residual_and_jacobian(c, x[:4])
    _, jv = _residual_and_jacobian(_Velocity(c), x[:4])
    return r, np.concatenate([jt, jv.sum(axis=1, keepdims=True)], axis=1)


def tangent(jac: np.ndarray, previous=None) -> np.ndarray:
    """Unit null vector of the 4x5 Jacobian, oriented along ``previous``."""
    v = np.linalg.svd(jac)[2][-1]
    if previous is not None and v @ previous < 0:
        v = -v
    return v


@dataclass(frozen=True)
class Event:
    kind: str  # Fold, Exit, NonTransverse, Stalled
    t: float
    reason: str = ""


@dataclass
class ContinuationPath:
    steps: list = field(default_factory=list)  # (t, SlqSolution)
    events: list = field(default_factory=list)
    status: str = "running"

    @property
    def t(self) -> np.ndarray:
        return np.array([s[0] for s in self.steps])

    @property
    def theta(self) -> np.ndarray:
        return np.array([s[1].theta for s in self.steps])

    @property
    def end(self):
        return self.steps[-1]

    @property
    def max_residual(self) -> float:
        return max(s[1].residual_norm for s in self.steps)


def _correct(family, x_pred, tau, tol=NEWTON_TOL, max_iter=CORRECTOR_ITER):
    x = x_pred.copy()
    for _ in range(max_iter):
        try:
            r, g = homotopy(family, x)
        except (DegenerateConfigurationError, FloatingPointError):
            return None
        if not np.all(np.isfinite(r)):
            return None
        if np.linalg.norm(r) < tol and abs(tau @ (x - x_pred)) < tol:
            return x
        f = np.r_[r, tau @ (x - x_pred)]
        a = np.vstack([g, tau])
        try:
            dx = np.linalg.solve(a, f)
        except np.linalg.LinAlgError:
            return None
        x = x - dx
    r, _ = homotopy(family, x)
    return x if np.linalg.norm(r) < tol else None


def _solve_fixed_t(family, theta, t, tol=NEWTON_TOL):
    th, res, ok = polish(family.at(t), theta, tol=tol)
    return th if ok else None


def track(family: CurveFamily, seeds, t0: float = 0.0, step: float = STEP,
          min_step: float = MIN_STEP, min_side: float | None = None, direction: int = 1,
          max_steps: int = MAX_STEPS) -> list:
    """Follow each seed ``theta`` from ``t0`` until ``t = 1``, a fold or an exit.

    ``seeds`` may hold parameter vectors, :class:`SlqSolution` or orbit
    objects. ``direction = -1`` follows the branch toward decreasing ``t``
    and stops at ``t = 0``. The step is halved whenever the corrector fails
    and grows back after successes; below ``min_step`` the path is Stalled.
    """
    paths = []
    for seed in seeds:
        theta = getattr(getattr(seed, "representative", seed), "theta", seed)
        paths.append(_track_one(family, np.asarray(theta, dtype=float), t0, step, min_step,
                                min_side, direction, max_steps))
    return paths


def _track_one(family, theta, t0, step, min_step, min_side, direction, max_steps):
    path = ContinuationPath()
    t_end = 1.0 if direction > 0 else 0.0
    if min_side is None:
        min_side = 0.5 * min(default_min_side(family.c0), default_min_side(family.c1))
    th = _solve_fixed_t(family, theta, t0)
    if th is None:
        path.status = "stalled"
        path.events.append(Event("Stalled", t0, "seed did not converge"))
        return path
    x = np.r_[th, t0]
    sol = make_solution(family.at(t0), th)
    path.steps.append((t0, sol))
    _, g = homotopy(family, x)
    tau = tangent(g)
    if tau[4] * direction < 0:
        tau = -tau
    h = step
    det_prev = sol.certificate.det
    for _ in range(max_steps):
        x_pred = x + h * tau
        if (x_pred[4] - t_end) * direction >= 0:
            # land exactly on the end of the interval
            frac = (t_end - x[4]) / (x_pred[4] - x[4]) if x_pred[4] != x[4] else 1.0
            th_end = _solve_fixed_t(family, x[:4] + frac * (x_pred[:4] - x[:4]), t_end)
            if th_end is not None and orbit_distance(th_end, x[:4]) < 10 * h + 1e-9:
                sol = make_solution(family.at(t_end), th_end)
                if np.sign(sol.certificate.det) != np.sign(det_prev):
                    path.events.append(Event("NonTransverse", t_end, "det sign change"))
                path.steps.append((t_end, sol))
                path.status = "complete"
                return path
            h *= 0.5
            if h < min_step:
                break
            continue
        x_new = _correct(family, x_pred, tau)
        ok = x_new is not None and np.linalg.norm(x_new - x_pred) < 0.5 * h + 1e-12
        if ok:
            _, g = homotopy(family, x_new)
            tau_new = tangent(g, tau)
            ok = tau_new @ tau > 0.5
        if not ok:
            h *= 0.5
            if h < min_step:
                break
            continue
        t_new = float(x_new[4])
        c = family.at(t_new)
        if not is_cyclically_ordered(x_new[:4]):
            path.events.append(Event("Exit", t_new, "labels lost cyclic order"))
            path.status = "exit"
            return path
        sol = make_solution(c, x_new[:4])
        if sol.side < min_side:
            path.events.append(Event("Exit", t_new, "side below min-side"))
            path.status = "exit"
            return path
        if tau_new[4] * tau[4] < 0:
            path.steps.append((t_new, sol))
            path.events.append(Event("Fold", t_new, "dt changed sign"))
            path.status = "fold"
            return path
        if np.sign(sol.certificate.det) != np.sign(det_prev) or not sol.certificate.transverse:
            if not path.events or path.events[-1].kind != "NonTransverse" \
                    or abs(path.events[-1].t - t_new) > 10 * step:
                path.events.append(Event("NonTransverse", t_new,
                                         "det sign change" if sol.certificate.transverse
                                         else "rank-deficient Jacobian"))
        det_prev = sol.certificate.det
        path.steps.append((t_new, sol))
        x, tau = x_new, tau_new
        h = min(step, 2 * h)
    path.events.append(Event("Stalled", float(x[4]), "step fell below the floor"))
    path.status = "stalled"
    return path


@dataclass
class TrackResult:
    paths: list
    interior: list  # (t, SearchResult)
    endpoint: object  # SearchResult at t = 1

    @property
    def events(self):
        return [e for p in self.paths for e in p.events]


def _covered(paths, t, theta, tol=1e-3):
    """Whether some path passes near ``theta`` at parameter ``t``."""
    for p in paths:
        ts = p.t
        if len(ts) < 2:
            continue
        lo, hi = min(ts[0], ts[-1]), max(ts[0], ts[-1])
        if not lo <= t <= hi:
            continue
        th = p.theta
        for i in range(len(ts) - 1):
            a, b = ts[i], ts[i + 1]
            if min(a, b) <= t <= max(a, b):
                w = 0.0 if a == b else (t - a) / (b - a)
                if orbit_distance(th[i] + w * (th[i + 1] - th[i]), theta) < tol:
                    return True
    return False


def track_family(family: CurveFamily, t0: float = 0.0, grid: int = 24, step: float = STEP,
                 interior: int = INTERIOR_SEARCHES, seeds=None) -> TrackResult:
    """Seeds from a search at ``t0``, tracking, and fresh interior searches.

    Orbits found at the interior values of ``t`` that no tracked path passes
    through are followed in both directions, so branches born at folds
    are not missed.
    """
    if seeds is None:
        seeds = [o for o in find_squares(family.at(t0), grid=grid).orbits if o.transverse]
    paths = track(family, seeds, t0=t0, step=step)
    searches = []
    for t in np.linspace(t0, 1.0, interior + 2)[1:-1]:
        res = find_squares(family.at(t), grid=grid)
        searches.append((float(t), res))
        for o in res.orbits:
            if not o.transverse or _covered(paths, t, o.representative.theta):
                continue
            for d in (1, -1):
                p = _track_one(family, o.representative.theta, float(t), step, MIN_STEP, None,
                               d, MAX_STEPS)
                if d < 0:
                    p.steps.reverse()
                paths.append(p)
    endpoint = find_squares(family.at(1.0), grid=grid)
    return TrackResult(paths, searches, endpoint)


def endpoint_matches(paths, result, tol: float = MATCH_TOL):
    """Pair complete paths with orbits of ``result``; returns (matched, unmatched paths)."""
    matched, missing = [], []
    for p in paths:
        if p.status != "complete" or abs(p.end[0] - 1.0) > 1e-12:
            continue
        th = p.end[1].theta
        dists = [orbit_distance(th, o.representative.theta) for o in result.orbits]
        if dists and min(dists) < tol:
            matched.append((p, int(np.argmin(dists))))
        else:
            missing.append(p)
    return matched, missing


@dataclass
class ParitySample:
    t: float
    count: int
    transverse: bool
    signed: int


@dataclass
class ParityReport:
    samples: list

    @property
    def transverse_counts(self):
        return [s.count for s in self.samples if s.transverse]

    @property
    def excluded(self):
        return [s.t for s in self.samples if not s.transverse]

    @property
    def parity_constant(self) -> bool:
        c = self.transverse_counts
        return len({x % 2 for x in c}) <= 1

    @property
    def all_odd(self) -> bool:
        return all(x % 2 == 1 for x in self.transverse_counts)


def parity_audit(family: CurveFamily, samples: int = 11, grid: int = 24) -> ParityReport:
    """Orbit counts and certificates at ``samples`` evenly spaced values of t."""
    out = []
    for t in np.linspace(0.0, 1.0, samples):
        res = find_squares(family.at(t), grid=grid)
        signed = sum(m.sign for o in res.orbits for m in o.members if m.sign is not None)
        out.append(ParitySample(float(t), res.count, res.all_transverse,
                                int(signed)))
    return ParityReport(out)


__all__ = ["CurveFamily", "ContinuationPath", "Event", "homotopy", "tangent", "track",
           "track_family", "TrackResult", "endpoint_matches", "parity_audit", "ParityReport",
           "ParitySample"]
