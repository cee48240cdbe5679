import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mbs_lab import (
    DomainError,
    g1_curve,
    g1_resonant,
    local_saturation,
    make_emitter_drive,
    mollow_spectrum,
    steady_population,
)
from mbs_lab.emitter import _lorentzian_sum, injected_fault
from mbs_lab.oracles import g1_mpmath, local_extrema, spectrum_cosine_transform

# 50-digit evaluations, frozen
G1_S2_T1 = 0.8319458149010079
G1_S20_T4 = 0.1381899098314512
G1_S10_T6 = 0.1210078300628062


def test_local_saturation_examples(geometry):
    assert local_saturation(0.0, 0.0, geometry, 5.0) == pytest.approx(20.0)
    for z in (0.0, 1e-7, -5e-3):
        assert local_saturation(z, math.pi / 4, geometry, 5.0) == pytest.approx(10.0)
    assert local_saturation(geometry.grating_period / 2, 0.0, geometry, 5.0) == pytest.approx(0, abs=1e-12)


def test_emitter_drive_examples():
    d = make_emitter_drive(20.0)
    assert d.omega_l == pytest.approx(math.sqrt(10)) and round(d.omega_l, 3) == 3.162
    d0 = make_emitter_drive(0.0)
    assert d0.omega_l == 0.0 and d0.omega_m_sq == -1 / 16
    d10 = make_emitter_drive(10.0)
    assert d10.omega_l == pytest.approx(2.2360679775)
    assert d10.omega_m.real == pytest.approx(math.sqrt(5 - 1 / 16)) and d10.omega_m.real == pytest.approx(2.2221, abs=1e-4)
    assert make_emitter_drive(0.01).omega_m.imag > 0


@given(st.floats(0, 1e6))
def test_emitter_drive_invariants(s):
    d = make_emitter_drive(s)
    assert d.omega_l**2 == pytest.approx(s / 2, rel=1e-12, abs=1e-300)
    assert d.omega_m_sq == pytest.approx(s / 2 - 1 / 16, rel=1e-12, abs=1e-15)


def test_steady_population():
    assert steady_population(0.0) == 0.0
    assert steady_population(1.0) == 0.25
    assert abs(steady_population(1e9) - 0.5) <= 1e-9
    s = np.linspace(0, 100, 1001)
    assert np.all(np.diff(steady_population(s)) > 0)


@pytest.mark.parametrize("s", [0.0, 0.01, 0.125, 1.0, 2.0, 10.0, 100.0])
def test_g1_at_zero_delay(s):
    assert g1_resonant(s, 0.0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("s", [0.01, 0.125, 1.0, 10.0, 100.0])
def test_g1_long_delay_is_coherent_fraction(s):
    assert abs(g1_resonant(s, 60.0) - 1 / (1 + s)) <= 1e-12


def test_g1_against_arbitrary_precision():
    assert g1_resonant(2.0, 1.0) == pytest.approx(G1_S2_T1, rel=1e-13)
    assert g1_resonant(20.0, 4.0) == pytest.approx(G1_S20_T4, rel=1e-13)
    assert g1_resonant(10.0, 6.0) == pytest.approx(G1_S10_T6, rel=1e-13)


@settings(max_examples=200)
@given(s=st.floats(0, 100), tau=st.floats(0, 20))
def test_g1_matches_mpmath(s, tau):
    assert g1_resonant(s, tau) == pytest.approx(g1_mpmath(s, tau), abs=1e-12)


def test_g1_continuous_across_critical_drive():
    for tau in (0.5, 2.0, 8.0):
        lo, mid, hi = (g1_resonant(0.125 + d, tau) for d in (-1e-9, 0.0, 1e-9))
        assert abs(hi - lo) <= 1e-6
        assert abs(mid - lo) <= 1e-6


def test_g1_bounded_random():
    rng = np.random.default_rng(42)
    s = rng.uniform(0, 100, 10_000)
    tau = rng.uniform(0, 20, 10_000)
    assert np.all(np.abs(g1_resonant(s, tau)) <= 1.0 + 1e-12)


def test_g1_weak_drive_is_elastic():
    s = 1e-6
    tau = np.linspace(0, 50, 2001)
    assert np.max(np.abs(g1_resonant(s, tau) - 1.0)) <= 2 * s


def test_g1_pseudo_period_strong_drive():
    # successive revivals of g1 at s = 20 are 2 pi / Omega_M apart
    omega_m = math.sqrt(10 - 1 / 16)
    tau = np.linspace(0, 8, 80_001)
    ext = local_extrema(tau, g1_resonant(20.0, tau))
    maxima = [t for t, kind in ext if kind == "max"]
    minima = [t for t, kind in ext if kind == "min"]
    assert maxima[1] - maxima[0] == pytest.approx(2 * math.pi / omega_m, rel=0.05)
    assert minima[1] - minima[0] == pytest.approx(2 * math.pi / omega_m, rel=0.05)


def test_g1_curve():
    c = g1_curve(10.0, [0.0, 1.0, 2.0])
    assert c.values[0] == 1.0 and c.s == 10.0
    with pytest.raises(DomainError):
        g1_curve(1.0, [1.0, 0.5])


def test_g1_rejects_negative_inputs():
    with pytest.raises(DomainError):
        g1_resonant(-1.0, 1.0)
    with pytest.raises(DomainError):
        g1_resonant(1.0, -1.0)


def test_fault_hook_changes_g1():
    base = g1_resonant(10.0, 2.0)
    with injected_fault("g1_exponent"):
        assert g1_resonant(10.0, 2.0) != pytest.approx(base, abs=1e-3)
    assert g1_resonant(10.0, 2.0) == base


WIDE = np.arange(-600.0, 600.0 + 1e-9, 0.02)


def test_spectrum_weights():
    spec = mollow_spectrum(10.0, WIDE)
    assert spec.coherent_weight == 1 / 11
    assert spec.coherent_weight + spec.inelastic_weight == pytest.approx(1.0, abs=1e-12)
    # numerical integral over the grid plus the analytic tail outside it
    captured = np.trapezoid(spec.density, WIDE)
    assert captured == pytest.approx(spec.captured_fraction * spec.inelastic_weight, abs=1e-6)
    assert np.all(spec.density >= 0)


@pytest.mark.parametrize("s", [0.05, 0.125, 1.0, 10.0, 50.0])
def test_spectrum_matches_cosine_transform(s):
    nu = np.linspace(-12, 12, 241)
    direct = spectrum_cosine_transform(g1_resonant, s, nu)
    np.testing.assert_allclose(_lorentzian_sum(s, nu), direct, atol=1e-6)


def test_spectrum_symmetric():
    spec = mollow_spectrum(10.0, WIDE)
    np.testing.assert_allclose(spec.density, spec.density[::-1], atol=1e-10)


def test_spectrum_sideband_position_matches_transform():
    # the sideband maximum sits where the numerical transform of g1 peaks
    nu = np.arange(0.0, 4.0, 0.001)
    direct = spectrum_cosine_transform(g1_resonant, 10.0, nu)
    peak_direct = max(t for t, kind in local_extrema(nu, direct) if kind == "max")
    spec = mollow_spectrum(10.0, WIDE)
    sel = (WIDE > 0.5) & (WIDE < 4.0)
    peak_analytic = max(t for t, kind in local_extrema(WIDE[sel], spec.density[sel]) if kind == "max")
    assert abs(peak_analytic - peak_direct) <= 0.02
    # frozen: 1.929, below Omega_M = 2.2221 because of the dispersive terms
    assert peak_direct == pytest.approx(1.929, abs=2e-3)


def test_spectrum_grid_guards():
    with pytest.raises(DomainError, match="inelastic weight"):
        mollow_spectrum(10.0, np.linspace(-5.0, 5.0, 1001))
    with pytest.raises(DomainError, match="symmetric"):
        mollow_spectrum(10.0, np.linspace(-500, 600, 1001))
    with pytest.raises(DomainError):
        mollow_spectrum(0.0, WIDE)


def test_spectrum_critical_point():
    spec = mollow_spectrum(0.125, WIDE)
    assert spec.inelastic_weight == pytest.approx(0.125 / 1.125)
    nu = np.linspace(-5, 5, 51)
    np.testing.assert_allclose(_lorentzian_sum(0.125, nu),
                               spectrum_cosine_transform(g1_resonant, 0.125, nu), atol=1e-6)
