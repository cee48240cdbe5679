import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbs_lab import JonesVector, NumericalError, overlap_factors, total_drive, waveplate_map
from mbs_lab.polarization import cross_overlap_from_phase, rotated_polarization

angles = st.floats(-math.pi, math.pi, allow_nan=False)
comps = st.floats(-10, 10, allow_nan=False)


def test_waveplate_examples():
    v = waveplate_map(0.0, JonesVector(1, 0))
    assert (v.ex, v.ey) == (1, 0)
    v = waveplate_map(math.pi / 4, JonesVector(1, 0))
    assert v.ex == pytest.approx(0, abs=1e-15) and v.ey == pytest.approx(1)
    v = waveplate_map(math.pi / 8, JonesVector(1, 0))
    assert v.ex == pytest.approx(0.7071067811865476) and v.ey == pytest.approx(0.7071067811865476)


def test_waveplate_swaps_ex_and_e1():
    gamma = 0.3
    e1 = rotated_polarization(gamma)
    assert e1.ex == pytest.approx(math.cos(2 * gamma)) and e1.ey == pytest.approx(math.sin(2 * gamma))
    back = waveplate_map(gamma, e1)
    assert back.ex == pytest.approx(1) and back.ey == pytest.approx(0, abs=1e-15)


def test_unitary_and_involution_random():
    rng = np.random.default_rng(0)
    vecs = rng.normal(size=(10_000, 4))
    gammas = rng.uniform(-np.pi, np.pi, 10_000)
    for (a, b, c, d), g in zip(vecs, gammas):
        v = JonesVector(complex(a, b), complex(c, d))
        w = waveplate_map(g, v)
        assert abs(w.norm2() - v.norm2()) <= 1e-12 * max(1.0, v.norm2())
        ww = waveplate_map(g, w)
        assert abs(ww.ex - v.ex) <= 1e-12 * 10 and abs(ww.ey - v.ey) <= 1e-12 * 10


def test_total_drive_examples(geometry):
    assert total_drive(0.0, 0.0, geometry).amplitude == pytest.approx(2.0)
    for z in (0.0, 1.3e-7, -4e-3):
        assert total_drive(z, math.pi / 4, geometry).amplitude == pytest.approx(math.sqrt(2))
    node = total_drive(geometry.grating_period / 2, 0.0, geometry)
    assert node.amplitude == 0.0 and node.null


@given(z=st.floats(-1e-2, 1e-2), gamma=angles)
def test_total_drive_reproduces_field(z, gamma):
    from mbs_lab.model import make_geometry
    g = make_geometry(math.radians(4.3), wavelength=780e-9, h=5e-3)
    d = total_drive(z, gamma, g)
    if d.null:
        return
    kz = g.k * math.cos(g.theta0) * z
    e1 = rotated_polarization(gamma)
    expected = np.array([np.exp(1j * kz) + np.exp(-1j * kz) * e1.ex, np.exp(-1j * kz) * e1.ey])
    np.testing.assert_allclose(d.amplitude * d.direction.as_array(), expected, atol=1e-9)
    assert d.direction.norm2() == pytest.approx(1.0, abs=1e-12)
    assert 0 <= d.amplitude <= 2 + 1e-12


def test_amplitude_grating_parallel(geometry):
    z = np.linspace(-1e-6, 1e-6, 101)
    amp2 = np.array([total_drive(zi, 0.0, geometry).amplitude ** 2 for zi in z])
    np.testing.assert_allclose(amp2, 4 * np.cos(geometry.k * math.cos(geometry.theta0) * z) ** 2,
                               atol=1e-9)


def test_overlap_examples(geometry):
    lam_star = 2 * geometry.grating_period
    assert overlap_factors(1.234e-7, 0.0, geometry) == pytest.approx((1, 1, 1))
    assert overlap_factors(0.0, math.pi / 4, geometry)[2] == pytest.approx(1.0)
    assert overlap_factors(lam_star / 8, math.pi / 4, geometry)[2] == pytest.approx(0.0, abs=1e-12)


def test_overlap_null_raises(geometry):
    with pytest.raises(NumericalError):
        overlap_factors(geometry.grating_period / 2, 0.0, geometry)


def test_overlap_matches_jones_algebra(geometry):
    rng = np.random.default_rng(1)
    for _ in range(200):
        z, gamma = rng.uniform(-1e-5, 1e-5), rng.uniform(0, np.pi)
        d = total_drive(z, gamma, geometry)
        ld = waveplate_map(gamma, d.direction)
        assert d.direction.dot(d.direction).real == pytest.approx(1)
        assert ld.dot(ld).real == pytest.approx(1)
        cross = d.direction.dot(ld)
        assert cross.imag == pytest.approx(0, abs=1e-9)
        assert cross.real == pytest.approx(overlap_factors(z, gamma, geometry)[2], abs=1e-9)


def test_observables_invariant_under_global_phase(geometry):
    # y only enters through the global phase
    for y in (0.0, 1e-4, 3.3e-3):
        d = total_drive(2e-7, 0.4, geometry, y=y)
        ld = waveplate_map(0.4, d.direction)
        assert d.direction.dot(ld).real == pytest.approx(overlap_factors(2e-7, 0.4, geometry)[2])


@settings(max_examples=300)
@given(phi=st.floats(-100, 100), gamma=angles)
def test_cross_overlap_bounded(phi, gamma):
    val = float(cross_overlap_from_phase(phi, gamma))
    if not math.isnan(val):
        assert abs(val) <= 1 + 1e-9


def test_cross_overlap_periodic(geometry):
    z = np.linspace(-2e-6, 2e-6, 57)
    period = geometry.grating_period
    for gamma in (0.1, math.pi / 4, 0.6):
        a = [overlap_factors(zi, gamma, geometry)[2] for zi in z]
        b = [overlap_factors(zi + period, gamma, geometry)[2] for zi in z]
        np.testing.assert_allclose(a, b, atol=1e-9)
