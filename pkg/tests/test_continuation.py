import numpy as np
import pytest
from numpy.testing import assert_allclose

from squarepeg.continuation import (CurveFamily, endpoint_matches, homotopy, parity_audit, track,
                                    track_family)
from squarepeg.curves import Ellipse, RadialFourier
from squarepeg.errors import CurveError


def test_homotopy_t_column_matches_finite_difference(lobed_family):
    x = np.array([0.3, 1.9, 3.4, 5.0, 0.37])
    _, g = homotopy(lobed_family, x)
    h = 1e-6
    fd = np.stack([(homotopy(lobed_family, x + h * e)[0] - homotopy(lobed_family, x - h * e)[0])
                   / (2 * h) for e in np.eye(5)], axis=1)
    assert_allclose(g, fd, atol=1e-6)


def test_family_dimension_check():
    from scipy.spatial.transform import Rotation
    from squarepeg.curves import TransformedCurve

    space = TransformedCurve(Ellipse(2, 1), Rotation.identity().as_matrix()[:, :2])
    with pytest.raises(CurveError):
        CurveFamily(Ellipse(2, 1), space)


def test_constant_family_is_flat(ellipse_result):
    fam = CurveFamily(Ellipse(2, 1), Ellipse(2, 1))
    (path,) = track(fam, ellipse_result.orbits)
    assert path.status == "complete"
    assert path.events == []
    assert np.max(np.abs(path.theta - path.theta[0])) < 1e-9
    assert path.t[-1] == 1.0


def test_constant_family_parity():
    rep = parity_audit(CurveFamily(Ellipse(2, 1), Ellipse(2, 1)), 3)
    assert [s.count for s in rep.samples] == [1, 1, 1]
    assert rep.all_odd and rep.parity_constant


def test_ellipse_swap_passes_circle(ellipse_result):
    fam = CurveFamily(Ellipse(2, 1), Ellipse(1, 2))
    (path,) = track(fam, ellipse_result.orbits)
    kinds = [(e.kind, e.t) for e in path.events]
    assert any(k == "NonTransverse" and abs(t - 0.5) < 0.02 for k, t in kinds)
    assert path.max_residual < 1e-9


def test_circle_to_lobed_endpoints():
    fam = CurveFamily(RadialFourier(1.0), RadialFourier(1.0, (0, 0, 0.2)))
    res = track_family(fam, t0=0.01, interior=0)
    assert len(res.paths) == 3
    assert all(p.status == "complete" for p in res.paths)
    matched, missing = endpoint_matches(res.paths, res.endpoint, tol=1e-6)
    assert missing == []
    assert sorted(i for _, i in matched) == list(range(res.endpoint.count))
    for p in res.paths:
        assert p.max_residual < 1e-9


def test_lobed_parity_audit(lobed_parity):
    counts = [s.count for s in lobed_parity.samples]
    assert counts == [1] * 8 + [3] * 3
    assert lobed_parity.all_odd and lobed_parity.parity_constant
    assert lobed_parity.excluded == []
    assert all(s.signed == 0 for s in lobed_parity.samples)


def test_fold_changes_count_by_two(lobed_parity, lobed_tracking):
    folds = [e.t for e in lobed_tracking.events if e.kind == "Fold"]
    assert folds
    samples = lobed_parity.samples
    for tf in folds:
        before = max((s for s in samples if s.t < tf), key=lambda s: s.t)
        after = min((s for s in samples if s.t > tf), key=lambda s: s.t)
        assert abs(after.count - before.count) == 2


def test_lobed_tracking_endpoints(lobed_tracking):
    matched, missing = endpoint_matches(lobed_tracking.paths, lobed_tracking.endpoint)
    assert missing == []
    assert len({i for _, i in matched}) == lobed_tracking.endpoint.count
    for p in lobed_tracking.paths:
        assert p.status != "stalled"
        if p.steps:
            assert p.max_residual < 1e-9
            # consecutive steps stay within the corrector radius
            assert np.max(np.abs(np.diff(p.t))) <= 0.01 + 1e-12


def test_family_crossing_circle_excluded():
    rep = parity_audit(CurveFamily(Ellipse(2, 1), Ellipse(1, 2)), 5)
    assert rep.excluded == [0.5]
    assert rep.transverse_counts == [1, 1, 1, 1]
    assert rep.parity_constant
