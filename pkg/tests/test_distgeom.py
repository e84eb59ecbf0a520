import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from oracles import circumcenter_by_lstsq, cofactor_det, heron, simplex_volume_from_coords
from squarepeg.distgeom import (RatioTag, SimplexDistanceRatio, cayley_menger_det, circumcenter,
                                circumradius, classify, realize, simplex_volume)
from squarepeg.errors import ConstructibilityError

TET = SimplexDistanceRatio.regular(3)


def random_triangle(rng):
    pts = rng.normal(size=(3, 2))
    return SimplexDistanceRatio.from_points(pts), pts


def test_cm_equilateral():
    assert_allclose(cayley_menger_det(SimplexDistanceRatio.triangle(1, 1, 1)), -3.0, atol=1e-14)


def test_cm_degenerate_triangle():
    assert abs(cayley_menger_det(SimplexDistanceRatio.triangle(1, 1, 2))) < 1e-12


def test_cm_factored_form():
    rng = np.random.default_rng(0)
    for _ in range(200):
        a, b, c = rng.uniform(0.5, 2.0, 3)
        expect = -(a + b + c) * (a + b - c) * (a - b + c) * (-a + b + c)
        assert_allclose(cayley_menger_det(SimplexDistanceRatio.triangle(a, b, c)), expect,
                        rtol=1e-10, atol=1e-12)


def test_cm_tetrahedron_matches_cofactor_expansion():
    m = np.ones((5, 5)) - np.eye(5)
    exact = cofactor_det(m.astype(int).tolist())
    assert exact == 4
    assert_allclose(cayley_menger_det(TET), float(exact), rtol=1e-12)


def test_volume_examples():
    assert_allclose(simplex_volume(SimplexDistanceRatio.triangle(1, 1, 1)), math.sqrt(3) / 4,
                    rtol=1e-12)
    assert simplex_volume(SimplexDistanceRatio.triangle(1, 1, 2)) == 0.0
    assert_allclose(simplex_volume(TET), 1 / (6 * math.sqrt(2)), rtol=1e-10)


def test_tetrahedron_volume_against_coordinates():
    pts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]) / math.sqrt(8)
    assert_allclose(simplex_volume_from_coords(pts), 1 / (6 * math.sqrt(2)), rtol=1e-12)
    assert_allclose(simplex_volume(SimplexDistanceRatio.from_points(pts)),
                    simplex_volume_from_coords(pts), rtol=1e-10)


def test_circumradius_examples():
    assert_allclose(circumradius(SimplexDistanceRatio.triangle(1, 1, 1)), 1 / math.sqrt(3),
                    rtol=1e-12)
    assert_allclose(circumradius(SimplexDistanceRatio.triangle(3, 4, 5)), 2.5, rtol=1e-12)
    assert_allclose(circumradius(TET), math.sqrt(3 / 8), rtol=1e-10)
    pts = np.array([[0.0, 0], [4, 0], [0, 3]])
    c = circumcenter_by_lstsq(pts)
    assert_allclose(np.linalg.norm(pts - c, axis=1), 2.5, rtol=1e-12)


def test_classification():
    tri = SimplexDistanceRatio.triangle
    assert classify(tri(1, 1, 1)).tag is RatioTag.CONSTRUCTIBLE_NONDEGENERATE
    assert classify(tri(1, 1, 2)).tag is RatioTag.DEGENERATE
    assert classify(tri(1, 1, 3)).tag is RatioTag.NON_CONSTRUCTIBLE


def test_errors():
    with pytest.raises(ConstructibilityError):
        simplex_volume(SimplexDistanceRatio.triangle(1, 1, 3))
    with pytest.raises(ConstructibilityError):
        circumradius(SimplexDistanceRatio.triangle(1, 1, 2))
    with pytest.raises(ConstructibilityError):
        realize(SimplexDistanceRatio.triangle(1, 1, 3))
    with pytest.raises(ValueError):
        SimplexDistanceRatio(np.array([[0, 1], [2, 0]]))
    with pytest.raises(ValueError):
        SimplexDistanceRatio(np.array([[0, -1], [-1, 0]]))


def test_heron_equivalence():
    rng = np.random.default_rng(1)
    for _ in range(1000):
        r, pts = random_triangle(rng)
        a, b, c = r.d[1, 2], r.d[0, 2], r.d[0, 1]
        assert_allclose(simplex_volume(r), heron(a, b, c), rtol=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.01, 100), st.integers(2, 4))
def test_scale_covariance(seed, lam, k):
    rng = np.random.default_rng(seed)
    r = SimplexDistanceRatio.from_points(rng.normal(size=(k + 1, k)))
    # nearly flat simplices amplify the rounding of lam * d past 1e-10
    if simplex_volume(r) < 1e-2 * r.d.max() ** k:
        return
    scaled = SimplexDistanceRatio(lam * r.d)
    assert_allclose(simplex_volume(scaled), lam**k * simplex_volume(r), rtol=1e-10)
    assert_allclose(circumradius(scaled), lam * circumradius(r), rtol=1e-10)


def test_coordinate_round_trip():
    rng = np.random.default_rng(2)
    for i in range(200):
        k = 1 + i % 4
        pts = rng.normal(size=(k + 1, k))
        r = SimplexDistanceRatio.from_points(pts)
        assert_allclose(simplex_volume(r), simplex_volume_from_coords(pts), rtol=1e-8)
        if k >= 2:
            c = circumcenter_by_lstsq(pts)
            assert_allclose(circumradius(r), np.linalg.norm(pts[0] - c), rtol=1e-8)


def test_realize_reproduces_distances():
    rng = np.random.default_rng(3)
    for k in (2, 3, 4):
        pts = rng.normal(size=(k + 1, k))
        r = SimplexDistanceRatio.from_points(pts)
        q = realize(r)
        assert_allclose(SimplexDistanceRatio.from_points(q).d, r.d, atol=1e-10)
        assert_allclose(np.linalg.norm(q - circumcenter(q), axis=1), circumradius(r), rtol=1e-9)
