"""Inscribing a simplex of prescribed shape and rotation in a radial surface.

The surface is the graph ``{r(u) u : |u| = 1}`` of a positive function on
the unit sphere. In R^3 the function is written in spherical coordinates
``(phi, theta)`` with ``phi`` the polar angle from +z and ``theta`` the
azimuth; in R^2 it is a function of the polar angle ``theta``.

Given a model simplex ``V`` (rows ``v_i``) and a rotation ``A``, the unknowns
are a scale ``s`` and translation ``t`` with

    F_i(s, t) = |s A v_i + t| - r(unit(s A v_i + t)) = 0,   i = 1..k+1.
"""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field

import numpy as np
import sympy as sp
from scipy.spatial.transform import Rotation

from .distgeom import RatioTag, SimplexDistanceRatio, circumcenter, classify, realize
from .errors import ConstructibilityError, NoConvergenceError, RankError, SpecError
from .geom import Configuration

RESIDUAL_TOL = 1e-10
MAX_ITER = 60
RESTARTS = 8
POSITIVITY_GRID = (256, 512)
MEAN_GRID = 512
POLE_EPS = 1e-12
ORIGIN_TOL = 1e-6
T_JITTER = 0.4
WIDE_RESTARTS = 64

_FUNCS = {"sin": sp.sin, "cos": sp.cos, "tan": sp.tan, "exp": sp.exp, "sqrt": sp.sqrt,
          "abs": sp.Abs, "log": sp.log}
_CONSTS = {"pi": sp.pi, "e": sp.E}
_ALLOWED_NODES = (ast.Expression, ast.BinOp, ast.UnaryOp, ast.Call, ast.Name, ast.Load,
                  ast.Constant, ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow, ast.USub, ast.UAdd)


def parse_expression(text: str, variables) -> sp.Expr:
    """Parse a restricted arithmetic expression into sympy.

    Allowed: numbers, the given variable names, ``pi``, ``e``, the operators
    ``+ - * / **`` (``^`` is accepted as a power) and the functions
    sin, cos, tan, exp, sqrt, abs, log.
    """
    src = text.replace("^", "**").strip()
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise SpecError(f"cannot parse expression {text!r}: {exc.msg}") from None
    names = {v: sp.Symbol(v, real=True) for v in variables}
    for node in ast.walk(tree):
        if not isinstance(node, _ALLOWED_NODES):
            raise SpecError(f"disallowed syntax {type(node).__name__} in {text!r}")
        if isinstance(node, ast.Constant) and not isinstance(node.value, (int, float)):
            raise SpecError(f"non-numeric constant {node.value!r} in {text!r}")
        if isinstance(node, ast.Call):
            if not isinstance(node.func, ast.Name) or node.func.id not in _FUNCS:
                raise SpecError(f"unknown function in {text!r}")
            if len(node.args) != 1 or node.keywords:
                raise SpecError(f"functions take exactly one argument in {text!r}")
        if isinstance(node, ast.Name) and node.id not in names and node.id not in _FUNCS \
                and node.id not in _CONSTS:
            raise SpecError(f"unknown name {node.id!r} in {text!r}")

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant):
            return sp.nsimplify(node.value) if isinstance(node.value, int) else sp.Float(node.value)
        if isinstance(node, ast.Name):
            return names.get(node.id, _CONSTS.get(node.id))
        if isinstance(node, ast.UnaryOp):
            val = build(node.operand)
            return -val if isinstance(node.op, ast.USub) else val
        if isinstance(node, ast.Call):
            return _FUNCS[node.func.id](build(node.args[0]))
        a, b = build(node.left), build(node.right)
        op = type(node.op)
        if op is ast.Add:
            return a + b
        if op is ast.Sub:
            return a - b
        if op is ast.Mult:
            return a * b
        if op is ast.Div:
            return a / b
        return a**b

    return build(tree)


def _sphere_grid(shape=POSITIVITY_GRID):
    """Midpoint grid in (phi, theta); poles themselves are excluded."""
    nphi, nth = shape
    phi = (np.arange(nphi) + 0.5) * math.pi / nphi
    th = np.arange(nth) * 2 * math.pi / nth
    return np.meshgrid(phi, th, indexing="ij")


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1 - 2 * i / n
    az = math.pi * (1 + 5**0.5) * i
    rho = np.sqrt(1 - z * z)
    return np.stack([rho * np.cos(az), rho * np.sin(az), z], axis=-1)


@dataclass(frozen=True, eq=False)
class RadialSurface:
    """Star-shaped hypersurface ``r(u) u`` in R^k, k = 2 or 3.

    ``expr`` is a string in ``phi, theta`` (k = 3) or ``theta`` (k = 2);
    ``radius`` alone gives a round sphere.
    """

    k: int = 3
    expr: str | None = None
    radius: float = 1.0
    _f: object = field(init=False, repr=False)
    _grad: object = field(init=False, repr=False)

    def __post_init__(self):
        if self.k not in (2, 3):
            raise ValueError("radial surfaces are supported in dimensions 2 and 3")
        variables = ("phi", "theta") if self.k == 3 else ("theta",)
        if self.expr is None:
            if not (self.radius > 0 and math.isfinite(self.radius)):
                raise ValueError("sphere radius must be positive and finite")
            e = sp.Float(self.radius)
        else:
            e = parse_expression(self.expr, variables)
        syms = [sp.Symbol(v, real=True) for v in variables]
        f = sp.lambdify(syms, e, "numpy")
        grads = [sp.lambdify(syms, sp.diff(e, s), "numpy") for s in syms]
        object.__setattr__(self, "_f", f)
        object.__setattr__(self, "_grad", grads)
        self._check_positive()

    @classmethod
    def sphere(cls, radius: float = 1.0, k: int = 3) -> "RadialSurface":
        return cls(k=k, radius=radius)

    @classmethod
    def lumpy(cls) -> "RadialSurface":
        """``1 + sin^3(phi) sin(3 theta)/5 - |cos^7(phi)|``."""
        return cls(k=3, expr="1 + sin(phi)**3*sin(3*theta)/5 - abs(cos(phi)**7)")

    def _check_positive(self):
        if self.k == 3:
            phi, th = _sphere_grid()
            vals = self.r_angles(phi, th)
        else:
            th = np.arange(POSITIVITY_GRID[1]) * 2 * math.pi / POSITIVITY_GRID[1]
            vals = self.r_angles(th)
        if not np.all(np.isfinite(vals)) or np.min(vals) <= 0:
            raise ValueError("radial function must be positive on the sphere")

    def r_angles(self, *angles):
        out = self._f(*angles)
        return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast(*angles).shape).copy()

    @staticmethod
    def angles(w):
        w = np.asarray(w, dtype=float)
        rho = np.linalg.norm(w, axis=-1)
        theta = np.mod(np.arctan2(w[..., 1], w[..., 0]), 2 * math.pi)
        if w.shape[-1] == 2:
            return rho, (theta,)
        phi = np.arccos(np.clip(w[..., 2] / rho, -1.0, 1.0))
        return rho, (phi, theta)

    def r(self, w):
        """Radial function at the direction of ``w`` (any nonzero vector)."""
        _, ang = self.angles(w)
        return self.r_angles(*ang)

    def grad_r(self, w):
        """Gradient in R^k of ``w -> r(w / |w|)``.

        At the poles the azimuthal term is dropped; it is finite only when
        ``r_theta / sin(phi)`` has a limit, which the sphere grid check
        cannot see.
        """
        w = np.asarray(w, dtype=float)
        rho, ang = self.angles(w)
        shape = np.broadcast(*ang).shape
        dth = np.broadcast_to(np.asarray(self._grad[-1](*ang), dtype=float), shape)
        th = ang[-1]
        e_th = np.stack([-np.sin(th), np.cos(th)] + ([np.zeros_like(th)] if self.k == 3 else []), -1)
        if self.k == 2:
            return (dth / rho)[..., None] * e_th
        phi = ang[0]
        dphi = np.broadcast_to(np.asarray(self._grad[0](*ang), dtype=float), shape)
        e_phi = np.stack([np.cos(phi) * np.cos(th), np.cos(phi) * np.sin(th), -np.sin(phi)], -1)
        s = np.sin(phi)
        with np.errstate(divide="ignore", invalid="ignore"):
            az = np.where(s > POLE_EPS, dth / s, 0.0)
        return (dphi / rho)[..., None] * e_phi + (az / rho)[..., None] * e_th

    def mean_radius(self) -> float:
        if self.k == 3:
            return float(np.mean(self.r(fibonacci_sphere(MEAN_GRID))))
        th = np.arange(MEAN_GRID) * 2 * math.pi / MEAN_GRID
        return float(np.mean(self.r_angles(th)))


# ---------------------------------------------------------------------------
# model simplex and orientation

def _require_nondegenerate(ratio: SimplexDistanceRatio):
    tag = classify(ratio).tag
    if tag is not RatioTag.CONSTRUCTIBLE_NONDEGENERATE:
        raise ConstructibilityError(f"simplex ratio is {tag.value}")


def orientation_sign(points) -> float:
    """Determinant of the columns ``pi_{i,k+1}``, i = 1..k."""
    p = np.asarray(points, dtype=float)
    d = p[-1] - p[:-1]
    d = d / np.linalg.norm(d, axis=1, keepdims=True)
    return float(np.linalg.det(d.T))


def model_simplex(ratio: SimplexDistanceRatio) -> np.ndarray:
    """Canonical realization with circumcenter 0, circumradius 1, positive orientation.

    Recipe: realize by classical MDS, move the circumcenter to the origin and
    scale to unit circumradius. Build an orthonormal frame by Gram-Schmidt on
    the vertex vectors in label order, skipping dependent ones, and send the
    j-th frame vector to ``e_{k+1-j}`` (so vertex 1 lands on ``+e_k``). If
    the orientation sign is negative, negate the first coordinate.
    """
    _require_nondegenerate(ratio)
    k = ratio.k
    x = realize(ratio)
    x = x - circumcenter(x)
    x = x / np.mean(np.linalg.norm(x, axis=1))
    frame = []
    for v in x:
        w = v - sum((v @ f) * f for f in frame) if frame else v.copy()
        nw = np.linalg.norm(w)
        if nw > 1e-9:
            frame.append(w / nw)
        if len(frame) == k:
            break
    basis = np.array(frame[::-1])  # row i maps to e_{i+1}
    out = x @ basis.T
    if orientation_sign(out) < 0:
        out[:, 0] *= -1
    return out


def orientation_projection(points) -> np.ndarray:
    """Gram-Schmidt frame of the directions ``pi_12, ..., pi_1(k+1)``.

    Returns an orthogonal k x k matrix Q; ``GS(B P) = B GS(P)`` for every
    orthogonal B, and Q is invariant under translation and scaling of the
    input.
    """
    p = points.points if isinstance(points, Configuration) else np.asarray(points, dtype=float)
    k = p.shape[1]
    if p.shape[0] != k + 1:
        raise RankError(f"need k + 1 = {k + 1} points in R^{k}, got {p.shape[0]}")
    d = p[1:] - p[0]
    d = d / np.linalg.norm(d, axis=1, keepdims=True)
    m = d.T
    sv = np.linalg.svd(m, compute_uv=False)
    if sv[-1] < 1e-10 * sv[0]:
        raise RankError("configuration is affinely dependent")
    q, r = np.linalg.qr(m)
    return q * np.sign(np.diag(r))


# ---------------------------------------------------------------------------
# inscription

@dataclass(frozen=True)
class InscribedSimplex:
    rotation: np.ndarray
    scale: float
    translation: np.ndarray
    vertices: Configuration
    residual_norm: float

    def spherical_coordinates(self) -> np.ndarray:
        """``(phi, theta)`` of each vertex (k = 3) or ``theta`` (k = 2)."""
        _, ang = RadialSurface.angles(self.vertices.points)
        return np.stack(ang, axis=-1)

    def edge_lengths(self) -> np.ndarray:
        d = self.vertices.distances()
        return d[np.triu_indices(len(d), 1)]


def _system(surface: RadialSurface, av: np.ndarray, x: np.ndarray):
    """Residuals ``(B, k+1)`` and Jacobians ``(B, k+1, k+1)`` for a batch of ``(s, t)``."""
    w = x[:, None, :1] * av + x[:, None, 1:]
    rho = np.linalg.norm(w, axis=-1)
    u = w / rho[..., None]
    f = rho - surface.r(w)
    g = u - surface.grad_r(w)
    jac = np.concatenate([(g * av).sum(-1)[..., None], g], axis=-1)
    return f, jac


def _newton(surface, av, x0, tol=RESIDUAL_TOL, max_iter=MAX_ITER):
    """Damped Newton with backtracking, run on a batch of starts at once."""
    x = np.array(x0, dtype=float)
    f, jac = _system(surface, av, x)
    nf = np.linalg.norm(f, axis=-1)
    alive = np.isfinite(nf)
    for _ in range(max_iter):
        act = np.nonzero(alive & (nf >= tol))[0]
        if not len(act):
            break
        step = np.full((len(act), x.shape[1]), np.nan)
        for n, i in enumerate(act):
            try:
                step[n] = np.linalg.solve(jac[i], f[i])
            except np.linalg.LinAlgError:
                pass
        lam = np.ones(len(act))
        pend = np.all(np.isfinite(step), axis=1)
        alive[act[~pend]] = False
        while True:
            pend &= lam > 1e-4
            if not pend.any():
                break
            sel = np.nonzero(pend)[0]
            xt = x[act[sel]] - lam[sel, None] * step[sel]
            with np.errstate(invalid="ignore", divide="ignore"):
                ft, jt = _system(surface, av, xt)
            nt = np.linalg.norm(ft, axis=-1)
            good = (xt[:, 0] > 0) & np.isfinite(nt) & (nt < (1 - 1e-4 * lam[sel]) * nf[act[sel]])
            idx = act[sel[good]]
            x[idx], f[idx], jac[idx], nf[idx] = xt[good], ft[good], jt[good], nt[good]
            pend[sel[good]] = False
            lam[sel[~good]] *= 0.5
        alive[act[lam <= 1e-4]] = False
    return x, nf, alive & (nf < tol)


def inscribe(surface: RadialSurface, ratio: SimplexDistanceRatio, rotation, x0=None,
             seed: int = 0, tol: float = RESIDUAL_TOL) -> InscribedSimplex:
    """Scale and translation putting ``rotation @ model`` on the surface.

    Newton starts from ``x0 = (s, t)`` if given, else from ``s`` = mean
    radius over the model circumradius and ``t = 0``; failures trigger
    seeded restarts with ``s`` jittered by up to 30 percent and ``t`` by up
    to ``T_JITTER`` times the mean radius per coordinate. A final batch of
    ``WIDE_RESTARTS`` starts covers a wider box in ``(s, t)``.
    """
    _require_nondegenerate(ratio)
    k = ratio.k
    if k != surface.k:
        raise ValueError(f"ratio is for R^{k} but the surface lives in R^{surface.k}")
    a = np.asarray(rotation, dtype=float)
    if a.shape != (k, k) or not np.allclose(a @ a.T, np.eye(k), atol=1e-9) \
            or np.linalg.det(a) < 0:
        raise ValueError("rotation must be a proper orthogonal matrix")
    v = model_simplex(ratio)
    av = v @ a.T
    s0 = surface.mean_radius()
    rng = np.random.default_rng(seed)
    first = ([np.asarray(x0, dtype=float)] if x0 is not None else []) + [np.r_[s0, np.zeros(k)]]
    jitter = [np.r_[s0 * (1 + rng.uniform(-0.3, 0.3)), rng.uniform(-T_JITTER, T_JITTER, k) * s0]
              for _ in range(RESTARTS)]
    wide = [np.r_[s0 * rng.uniform(0.4, 1.6), rng.uniform(-0.6, 0.6, k) * s0]
            for _ in range(WIDE_RESTARTS)]
    best = math.inf
    tried = 0
    for stage in (first, jitter, wide):
        x, nf, ok = _newton(surface, av, np.array(stage), tol)
        tried += len(stage)
        w = x[:, None, :1] * av + x[:, None, 1:]
        # a vertex at the origin solves F = 0 trivially wherever r vanishes
        ok &= (x[:, 0] > ORIGIN_TOL * s0) & (np.linalg.norm(w, axis=-1).min(1) > ORIGIN_TOL * x[:, 0])
        if ok.any():
            i = int(np.argmax(ok))
            return InscribedSimplex(a, float(x[i, 0]), x[i, 1:].copy(), Configuration(w[i]),
                                    float(nf[i]))
        best = min(best, float(np.nanmin(nf)) if np.isfinite(nf).any() else math.inf)
    raise NoConvergenceError(f"inscribe failed after {tried} starts (best residual {best:.3g})")


def random_rotations(m: int, k: int, seed: int) -> np.ndarray:
    """``m`` uniformly distributed rotations (unit quaternions for k = 3)."""
    if k == 3:
        return Rotation.random(m, random_state=seed).as_matrix().reshape(m, 3, 3)
    ang = np.random.default_rng(seed).uniform(0, 2 * math.pi, m)
    c, s = np.cos(ang), np.sin(ang)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def axis_loop(steps: int, k: int, base=None) -> np.ndarray:
    """Rotations ``R_z(2 pi j / steps) @ base`` for j = 0..steps-1."""
    ang = np.arange(steps) * 2 * math.pi / steps
    c, s = np.cos(ang), np.sin(ang)
    if k == 3:
        rz = np.zeros((steps, 3, 3))
        rz[:, 0, 0], rz[:, 0, 1], rz[:, 1, 0], rz[:, 1, 1], rz[:, 2, 2] = c, -s, s, c, 1
    else:
        rz = np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)
    b = np.eye(k) if base is None else np.asarray(base, dtype=float)
    return rz @ b


def edge_axis_frame(ratio: SimplexDistanceRatio) -> np.ndarray:
    """Rotation sending the midpoint of model edge v1 v2 to the +z direction.

    For k = 2 this is the identity. For a regular tetrahedron the z-axis
    then bisects two opposite edges, so no vertex sits near a pole.
    """
    if ratio.k == 2:
        return np.eye(2)
    v = model_simplex(ratio)
    m = v[0] + v[1]
    m = m / np.linalg.norm(m)
    axis = np.cross(m, [0.0, 0.0, 1.0])
    n = np.linalg.norm(axis)
    if n < 1e-12:
        return np.eye(3) if m[2] > 0 else np.diag([1.0, -1.0, -1.0])
    return Rotation.from_rotvec(axis / n * math.acos(np.clip(m[2], -1, 1))).as_matrix()


@dataclass
class SweepSummary:
    solutions: list
    failures: list
    loop: list
    success: int
    total: int
    scale_range: tuple
    translation_range: tuple
    loop_max_jump: float

    @property
    def success_fraction(self) -> float:
        return self.success / self.total if self.total else 0.0


def sweep_rotations(surface: RadialSurface, ratio: SimplexDistanceRatio, m: int = 100,
                    seed: int = 0, loop_steps: int = 360, loop_base=None) -> SweepSummary:
    """Inscribe for ``m`` random rotations and along a closed z-axis loop.

    The loop is ``R_z(phi) @ loop_base``; the default base is
    :func:`edge_axis_frame`, which keeps every vertex away from the z-axis.
    Loop solves are warm-started from the previous step, so the reported
    jump measures continuity of ``(s, t)`` rather than branch hopping.
    """
    sols, fails = [], []
    if loop_base is None:
        loop_base = edge_axis_frame(ratio)
    for i, a in enumerate(random_rotations(m, surface.k, seed)):
        try:
            sols.append(inscribe(surface, ratio, a, seed=seed + i))
        except NoConvergenceError as exc:
            fails.append((i, str(exc)))
    loop = []
    prev = None
    for j, a in enumerate(axis_loop(loop_steps, surface.k, loop_base)):
        x0 = None if prev is None else np.r_[prev.scale, prev.translation]
        try:
            prev = inscribe(surface, ratio, a, x0=x0, seed=seed + j)
        except NoConvergenceError as exc:
            fails.append((m + j, str(exc)))
            prev = None
        loop.append(prev)
    jumps = []
    good = [x for x in loop if x is not None]
    if len(good) == len(loop) and loop:
        xs = np.array([np.r_[x.scale, x.translation] for x in loop])
        jumps = np.abs(np.diff(np.vstack([xs, xs[:1]]), axis=0)).max(axis=1)
    max_jump = float(np.max(jumps)) if len(jumps) else math.inf
    scales = [x.scale for x in sols] or [math.nan]
    trans = [float(np.abs(x.translation).max()) for x in sols] or [math.nan]
    return SweepSummary(sols, fails, loop, len(sols), m, (min(scales), max(scales)),
                        (0.0 if sols else math.nan, max(trans)), max_jump)


def fit_rotation_to_coordinates(surface: RadialSurface, ratio: SimplexDistanceRatio, target,
                                samples: int = 200, seed: int = 0) -> tuple:
    """Local search over rotations for an inscription matching target angles.

    ``target`` lists ``(phi, theta)`` per vertex. The mismatch is the sum of
    squared wrapped angle differences, minimized over vertex orderings. A
    random scan over ``samples`` rotations seeds a Nelder-Mead refinement in
    rotation-vector coordinates. Returns ``(InscribedSimplex, mismatch)``.
    """
    from itertools import permutations

    from scipy.optimize import minimize

    tgt = np.asarray(target, dtype=float)
    perms = [list(p) for p in permutations(range(len(tgt)))]

    def mismatch(sol):
        c = sol.spherical_coordinates()
        best = math.inf
        for p in perms:
            d = np.abs(c[p] - tgt)
            d = np.minimum(d, 2 * math.pi - d)
            best = min(best, float(np.sum(d * d)))
        return best

    def cost(q):
        try:
            return mismatch(inscribe(surface, ratio, Rotation.from_rotvec(q).as_matrix()))
        except NoConvergenceError:
            return 1e3

    qs = Rotation.random(samples, random_state=seed).as_rotvec()
    vals = [cost(q) for q in qs]
    res = minimize(cost, qs[int(np.argmin(vals))], method="Nelder-Mead",
                   options=dict(xatol=1e-9, fatol=1e-12, maxiter=2000))
    sol = inscribe(surface, ratio, Rotation.from_rotvec(res.x).as_matrix())
    return sol, mismatch(sol)
