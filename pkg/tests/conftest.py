import math

import pytest

from mbs_lab import CloudSpec, make_geometry

K_780 = 2 * math.pi / 780e-9


@pytest.fixture
def geometry():
    """Reference setup: theta0 = 4.3 deg, 780 nm, h = 5 mm."""
    return make_geometry(math.radians(4.3), wavelength=780e-9, h=5e-3, L=0.5)


@pytest.fixture
def cloud():
    return CloudSpec(100_000, 500e-6, 500e-6)
