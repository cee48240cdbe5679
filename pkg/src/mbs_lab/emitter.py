"""Resonantly driven two-level emitter: saturation, Rabi frequencies,
steady-state correlators, first-order correlation and Mollow spectrum.

All rates are in units of Gamma and times in units of 1/Gamma.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .model import Geometry
from .polarization import drive_intensity_factor, grating_phase

# Below this |Omega_M| tau the cos/sin terms use their Taylor series.
_SERIES_CUTOFF = 1e-4

# Test hook: names of deliberately broken physics, see ``injected_fault``.
_active_faults: set[str] = set()


@contextlib.contextmanager
def injected_fault(name: str):
    """Temporarily perturb the model (used to check validation sensitivity).

    ``"g1_exponent"`` replaces the 3/4 decay rate of the oscillating terms
    of g1 by 1/2.
    """
    _active_faults.add(name)
    try:
        yield
    finally:
        _active_faults.discard(name)


@dataclass(frozen=True)
class EmitterDrive:
    s: float
    omega_l: float
    omega_m_sq: float

    @property
    def omega_m(self) -> complex:
        """Generalized Rabi frequency; imaginary when overdamped."""
        if self.omega_m_sq >= 0:
            return complex(math.sqrt(self.omega_m_sq))
        return complex(0.0, math.sqrt(-self.omega_m_sq))


@dataclass(frozen=True)
class G1Curve:
    tau_grid: np.ndarray
    values: np.ndarray
    s: float


@dataclass(frozen=True)
class SpectrumResult:
    """Resonance-fluorescence spectrum.

    ``density`` holds only the inelastic part, normalized so that its
    integral over all frequencies equals ``inelastic_weight``. The elastic
    delta peak is reported separately as ``coherent_weight``.
    """

    coherent_weight: float
    nu_grid: np.ndarray
    density: np.ndarray
    inelastic_weight: float
    captured_fraction: float


def local_saturation(z, gamma_wp: float, geometry: Geometry, s0: float):
    """Saturation parameter s(z) = 2 s0 [1 + cos 2g cos(2 k cos(theta0) z)]."""
    if s0 < 0:
        raise DomainError(f"s0={s0!r} must be >= 0")
    s = s0 * drive_intensity_factor(grating_phase(z, geometry), gamma_wp)
    s = np.maximum(s, 0.0)
    return float(s) if np.ndim(s) == 0 else s


def make_emitter_drive(s: float) -> EmitterDrive:
    if s < 0:
        raise DomainError(f"s={s!r} must be >= 0")
    omega_l2 = s / 2.0
    return EmitterDrive(float(s), math.sqrt(omega_l2), omega_l2 - 1.0 / 16.0)


def steady_population(s):
    """Excited-state population s / (2 (1 + s))."""
    s = np.asarray(s, dtype=float)
    out = s / (2.0 * (1.0 + s))
    return float(out) if out.ndim == 0 else out


def _oscillating_parts(omega_m_sq, tau):
    """cos(W tau) and sin(W tau)/W for real or imaginary W, W^2 given."""
    u = omega_m_sq * tau * tau
    small = np.abs(u) < _SERIES_CUTOFF**2
    with np.errstate(invalid="ignore", over="ignore"):
        root = np.sqrt(np.abs(omega_m_sq))
        x = root * tau
        under = omega_m_sq > 0
        cos_part = np.where(under, np.cos(x), np.cosh(x))
        safe_root = np.where(root > 0, root, 1.0)
        sinc_part = np.where(under, np.sin(x), np.sinh(x)) / safe_root
    cos_series = 1.0 - u / 2.0 + u * u / 24.0
    sinc_series = tau * (1.0 - u / 6.0 + u * u / 120.0)
    return np.where(small, cos_series, cos_part), np.where(small, sinc_series, sinc_part)


def g1_resonant(s, tau):
    """First-order correlation of the light scattered by a resonantly driven atom.

    Works in the frame rotating at the laser frequency, so the result is real.
    ``s`` and ``tau`` broadcast. The overdamped regime (Omega_l < Gamma/4) is
    handled by analytic continuation and the critical point by its limit.
    """
    s = np.asarray(s, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if np.any(s < 0):
        raise DomainError("saturation must be >= 0")
    if np.any(tau < 0):
        raise DomainError("tau must be >= 0")
    omega_m_sq = s / 2.0 - 1.0 / 16.0
    cos_part, sinc_part = _oscillating_parts(omega_m_sq, tau)
    slow = 0.5 if "g1_exponent" in _active_faults else 0.75
    damp = np.exp(-slow * tau)
    out = 1.0 / (1.0 + s) + 0.5 * (
        np.exp(-0.5 * tau)
        + (s - 1.0) / (s + 1.0) * cos_part * damp
        + 0.25 * (5.0 * s - 1.0) / (s + 1.0) * sinc_part * damp
    )
    return float(out) if out.ndim == 0 else out


def g1_curve(s: float, tau_grid) -> G1Curve:
    tau_grid = np.asarray(tau_grid, dtype=float)
    if np.any(np.diff(tau_grid) <= 0):
        raise DomainError("tau_grid must be strictly ascending")
    return G1Curve(tau_grid, np.atleast_1d(g1_resonant(s, tau_grid)), float(s))


def _inelastic_poles(s: float):
    """Decomposition of the inelastic part of g1 as sum_j c_j exp(-l_j tau).

    Returns (coeffs, rates, double) where ``double`` lists (c, l) pairs of
    c * tau * exp(-l tau) terms, needed at the critical point Omega_M = 0.
    """
    w2 = s / 2.0 - 1.0 / 16.0
    a = 0.5 * (s - 1.0) / (s + 1.0)
    b = 0.5 * 0.25 * (5.0 * s - 1.0) / (s + 1.0)
    coeffs, rates, double = [0.5], [0.5 + 0j], []
    if abs(w2) < 1e-12:
        coeffs.append(a)
        rates.append(0.75 + 0j)
        double.append((b, 0.75 + 0j))
    else:
        w = np.sqrt(complex(w2))
        # cos(w t) = (e^{iwt} + e^{-iwt}) / 2, sin(w t)/w = (e^{iwt} - e^{-iwt}) / (2iw)
        coeffs += [a / 2 + b / (2j * w), a / 2 - b / (2j * w)]
        rates += [0.75 - 1j * w, 0.75 + 1j * w]
    return coeffs, rates, double


def _lorentzian_sum(s: float, nu):
    coeffs, rates, double = _inelastic_poles(s)
    nu = np.asarray(nu, dtype=float)
    total = np.zeros(nu.shape, dtype=complex)
    for c, lam in zip(coeffs, rates):
        total += c / (lam - 1j * nu)
    for c, lam in double:
        total += c / (lam - 1j * nu) ** 2
    return total.real / np.pi


def _weight_between(s: float, lo: float, hi: float) -> float:
    """Exact integral of the inelastic density over [lo, hi]."""
    coeffs, rates, double = _inelastic_poles(s)
    total = 0j
    for c, lam in zip(coeffs, rates):
        total += c * 1j * (np.log(lam - 1j * hi) - np.log(lam - 1j * lo))
    for c, lam in double:
        # d/dnu [ -i / (lam - i nu) ] = 1 / (lam - i nu)^2
        total += c * (-1j) * (1 / (lam - 1j * hi) - 1 / (lam - 1j * lo))
    return float(total.real / np.pi)


def mollow_spectrum(s: float, nu_grid, min_capture: float = 0.999) -> SpectrumResult:
    """Analytic resonance-fluorescence spectrum as a sum of Lorentzians.

    Parameters
    ----------
    s : saturation parameter, > 0
    nu_grid : frequency offsets from the laser [Gamma], symmetric about 0
    min_capture : fraction of the inelastic weight the grid must span

    Raises
    ------
    DomainError
        If the grid is not symmetric or captures less than ``min_capture``
        of the inelastic weight.
    """
    if not s > 0:
        raise DomainError(f"s={s!r} must be > 0")
    nu_grid = np.asarray(nu_grid, dtype=float)
    if nu_grid.ndim != 1 or nu_grid.size < 3 or np.any(np.diff(nu_grid) <= 0):
        raise DomainError("nu_grid must be a strictly ascending 1-D grid")
    if not np.isclose(nu_grid[0], -nu_grid[-1], rtol=1e-9, atol=1e-12):
        raise DomainError("nu_grid must be symmetric about 0")
    inelastic = s / (1.0 + s)
    captured = _weight_between(s, nu_grid[0], nu_grid[-1]) / inelastic
    if captured < min_capture:
        raise DomainError(
            f"nu_grid spans only {captured:.5f} of the inelastic weight (< {min_capture})"
        )
    density = _lorentzian_sum(s, nu_grid)
    return SpectrumResult(1.0 / (1.0 + s), nu_grid, density, inelastic, captured)
