"""SVG figures for the command line tool (matplotlib, Agg backend)."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .curves import ClosedCurve  # noqa: E402

SVG_SALT = "squarepeg"


def _project(points: np.ndarray, axis: int) -> np.ndarray:
    """Orthographic projection of R^3 points along coordinate ``axis``."""
    if points.shape[-1] == 2:
        return points
    keep = [i for i in range(3) if i != axis]
    return points[..., keep]


def _save(fig, path) -> None:
    with matplotlib.rc_context({"svg.hashsalt": SVG_SALT, "svg.fonttype": "none"}):
        fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def _axes(title: str):
    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    ax.set_title(title, fontsize=10)
    return fig, ax


def plot_squares(curve: ClosedCurve, orbits, path, axis: int = 2, n: int = 1000) -> None:
    """Curve with each inscribed quadrilateral drawn as a closed polygon."""
    fig, ax = _axes(f"{len(orbits)} inscribed quadrilateral(s)")
    pts = _project(curve.sample(n), axis)
    ax.plot(*np.vstack([pts, pts[:1]]).T, color="k", lw=1.0)
    for i, o in enumerate(orbits):
        q = _project(o.representative.vertices.points, axis)
        q = np.vstack([q, q[:1]])
        style = "-" if o.transverse else ":"
        ax.plot(*q.T, style, color=f"C{i % 10}", lw=1.2, marker="o", ms=3)
    ax.set_aspect("equal")
    ax.axis("off")
    _save(fig, path)


def plot_branches(paths, path) -> None:
    """Branch diagram: each curve parameter of a tracked path against t."""
    fig, ax = _axes("solution branches")
    for i, p in enumerate(paths):
        if len(p.steps) < 2:
            continue
        th = np.unwrap(p.theta, axis=0)
        for j in range(4):
            ax.plot(p.t, th[:, j], color=f"C{i % 10}", lw=1.0)
        for e in p.events:
            ax.axvline(e.t, color="0.6", lw=0.6, ls="--")
    ax.set_xlabel("t")
    ax.set_ylabel("curve parameter")
    ax.set_xlim(0.0, 1.0)
    _save(fig, path)


def plot_pi_chord(curve: ClosedCurve, detail, path, axis: int = 2, n: int = 1000) -> None:
    """Curve with the chord realizing the pi-distance estimate highlighted."""
    fig, ax = _axes(f"pi-distance {detail.value:.4g} ({detail.convention})")
    pts = _project(curve.sample(n), axis)
    ax.plot(*np.vstack([pts, pts[:1]]).T, color="k", lw=1.0)
    i, j = detail.endpoints
    v = _project(detail.polygon.vertices, axis)
    ax.plot(*v[[i, j]].T, color="C3", lw=1.5, marker="o", ms=3)
    ax.set_aspect("equal")
    ax.axis("off")
    _save(fig, path)


def plot_simplex(solutions, path, axis: int = 2) -> None:
    """Inscribed simplices projected along ``axis`` (all edges drawn)."""
    fig, ax = _axes(f"{len(solutions)} inscribed simplex(es)")
    for i, s in enumerate(solutions):
        v = _project(s.vertices.points, axis)
        for a in range(len(v)):
            for b in range(a + 1, len(v)):
                ax.plot(*v[[a, b]].T, color=f"C{i % 10}", lw=0.8)
        ax.plot(*v.T, "o", color=f"C{i % 10}", ms=3)
    ax.set_aspect("equal")
    _save(fig, path)


def plot_sweep(summary, path) -> None:
    """Scale along the rotation loop."""
    fig, ax = _axes(f"success {summary.success}/{summary.total}")
    s = [np.nan if x is None else x.scale for x in summary.loop]
    ax.plot(np.arange(len(s)), s, color="C0", lw=1.0)
    ax.set_xlabel("loop step")
    ax.set_ylabel("scale")
    _save(fig, path)
