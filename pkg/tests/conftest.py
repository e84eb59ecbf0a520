import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from squarepeg.curves import Ellipse, RadialFourier  # noqa: E402
from squarepeg.slq import find_squares  # noqa: E402

# lobed test curves and their orbit counts, frozen from the edge-sweep oracle
LOBED = [
    ((1.0, (0, 0, 0.2), ()), 3),
    ((1.0, (0, 0.1, 0.2), (0, 0, 0.05)), 3),
    ((1.0, (0, 0, 0, 0.15), (0.05,)), 3),
    ((1.0, (0, 0.15, 0.1), (0.05, 0, 0.08)), 1),
]
ELLIPSE_VERTEX = 2 / np.sqrt(5)

# (criterion number, line) pairs filled in by test_acceptance.py
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def ellipse():
    return Ellipse(2.0, 1.0)


@pytest.fixture(scope="session")
def ellipse_result(ellipse):
    return find_squares(ellipse)


@pytest.fixture(scope="session")
def circle_result():
    return find_squares(RadialFourier(1.0))


@pytest.fixture(scope="session")
def lobed_results():
    return [(RadialFourier(*args), count, find_squares(RadialFourier(*args)))
            for args, count in LOBED]


@pytest.fixture(scope="session")
def lumpy_sweep():
    from squarepeg.distgeom import SimplexDistanceRatio
    from squarepeg.simplex import RadialSurface, sweep_rotations

    return sweep_rotations(RadialSurface.lumpy(), SimplexDistanceRatio.regular(3), m=100, seed=0)


@pytest.fixture(scope="session")
def lobed_family():
    from squarepeg.continuation import CurveFamily

    return CurveFamily(Ellipse(2.0, 1.0), RadialFourier(1.0, (0, 0, 0.2)))


@pytest.fixture(scope="session")
def lobed_parity(lobed_family):
    from squarepeg.continuation import parity_audit

    return parity_audit(lobed_family, 11)


@pytest.fixture(scope="session")
def lobed_tracking(lobed_family):
    from squarepeg.continuation import track_family

    return track_family(lobed_family)


@pytest.fixture(scope="session")
def ellipse_extraction(ellipse):
    from squarepeg.ftc import limit_extraction

    return limit_extraction(ellipse)
