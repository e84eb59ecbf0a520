import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.spatial.transform import Rotation

from conftest import ELLIPSE_VERTEX
from squarepeg.curves import Ellipse, Polygon, RadialFourier, pi_distance
from squarepeg.errors import ConstraintError, CurveError
from squarepeg.ftc import (limit_extraction, project_to_slq, sidelength_audit, slq_defect,
                           slq_turning)
from squarepeg.slq import residual

SQUARE = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], dtype=float)


def tent(a, z):
    """Quadrilateral with equal sides and equal diagonals; planar iff z = 0."""
    return np.array([[a, 0, z], [0, a, -z], [-a, 0, z], [0, -a, -z]], dtype=float)


def random_slq(rng, n):
    """Random square-like quadrilaterals: tents of random height, moved and relabeled.

    Heights are either exactly zero or have ``|z| / a`` in [1e-4, 1] so that
    the planar and non-planar cases are separated by more than rounding.
    """
    out = []
    rots = Rotation.random(n, random_state=rng.integers(2**31)).as_matrix()
    for i in range(n):
        a = rng.uniform(0.1, 10)
        z = 0.0 if i % 10 == 0 else a * rng.choice([-1, 1]) * 10 ** rng.uniform(-4, 0)
        p = tent(a, z) @ rots[i].T + rng.normal(size=3)
        out.append(np.roll(p, -int(rng.integers(4)), axis=0))
    return out


def test_square_turning():
    rep = slq_turning(SQUARE)
    assert abs(rep.kappa - math.pi) < 1e-12
    assert abs(rep.theta - math.pi / 4) < 1e-12
    assert rep.planarity_defect < 1e-15


def test_regular_tetrahedron_turning():
    tet = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    assert slq_defect(tet) < 1e-15
    rep = slq_turning(tet)
    # exterior angle at each corner of a 60-degree path is 120 degrees
    assert_allclose(rep.kappa, 4 * math.pi / 3, rtol=1e-12)
    assert_allclose(rep.theta, math.pi / 6, rtol=1e-12)
    assert rep.theta_mismatch < 1e-12
    assert rep.kappa > math.pi


def test_non_slq_rejected():
    with pytest.raises(ConstraintError):
        slq_turning([[0, 0], [2, 0], [2, 1], [0, 1]])
    with pytest.raises(ConstraintError):
        slq_turning(SQUARE[:3])


def test_turning_bound_on_generated_tents():
    rng = np.random.default_rng(0)
    for p in random_slq(rng, 10_000):
        rep = slq_turning(p)
        assert rep.kappa >= math.pi - 1e-12
        assert rep.theta_mismatch < 1e-9
        assert (abs(rep.kappa - math.pi) < 1e-12) == (rep.planarity_defect < 1e-8)


def test_turning_bound_on_projected_perturbations():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        p = SQUARE + rng.normal(scale=0.05, size=(4, 3))
        q = project_to_slq(p)
        rep = slq_turning(q)
        assert rep.kappa >= math.pi - 1e-12
        assert rep.theta_mismatch < 1e-9
        assert (rep.kappa - math.pi > 1e-12) == (rep.planarity_defect >= 1e-8)


def test_projection_is_close_and_exact():
    p = SQUARE + np.array([[0, 0, 0.01], [0, 0, -0.01], [0.005, 0, 0], [0, 0, 0]])
    q = project_to_slq(p)
    assert slq_defect(q) < 1e-12
    assert np.max(np.abs(q - p)) < 0.05


def test_sidelength_audit_reports_both_readings():
    circle = sidelength_audit(RadialFourier(1.0), grid=16)
    assert_allclose(circle.min_side, math.sqrt(2), rtol=1e-9)
    assert abs(circle.pi_distance_two_sided - 2.0) < 1e-2
    assert not circle.holds_two_sided
    assert circle.holds_one_sided

    wobble = sidelength_audit(RadialFourier(1.0, (0.0, 0.05)), grid=16)
    assert wobble.count % 2 == 1
    assert wobble.holds_one_sided
    assert not wobble.holds_two_sided


def test_ellipse_extraction(ellipse_extraction):
    ex = ellipse_extraction
    assert [lv.n for lv in ex.levels] == [64, 128, 256, 512, 1024]
    assert all(lv.solution is not None for lv in ex.levels)
    assert_allclose(np.abs(ex.limit.points), ELLIPSE_VERTEX, atol=1e-3)
    assert ex.target_residual < 1e-6
    assert np.linalg.norm(residual(Ellipse(2, 1), ex.polished.theta)) < 1e-9
    sides = [lv.solution.side for lv in ex.levels]
    assert np.all(np.diff(sides) > 0)  # inscribed polygons creep outward toward the curve


def test_square_polygon_extraction():
    sq = Polygon([[0, 0], [1, 0], [1, 1], [0, 1]])
    ex = limit_extraction(sq, levels=3)
    assert ex.polished is not None and ex.target_residual < 1e-6
    assert slq_defect(ex.polished.vertices.points) < 1e-9
    assert ex.side >= pi_distance(sq, 2000) - 0.05


def test_cusp_rejected():
    spike = Polygon([[0, 0], [2, 0], [0, 1e-4], [-1, 1]])
    with pytest.raises(CurveError):
        limit_extraction(spike, levels=1)
