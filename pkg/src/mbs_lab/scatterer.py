"""Single-atom observables in front of the mirror."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .emitter import g1_resonant, local_saturation
from .exceptions import DomainError
from .model import Geometry, tau_c
from .polarization import (
    EX,
    NULL_THRESHOLD,
    JonesVector,
    cross_overlap_from_phase,
    grating_phase,
    rotated_polarization,
    waveplate_map,
)

LINEAR_REGIME_MAX_S0 = 1e-3


@dataclass(frozen=True)
class SingleAtomResult:
    """Normalized intensity I_1 / I_a and its two factors.

    ``intensity = mean_term * (1 + interference_term)``.
    """

    intensity: float
    mean_term: float
    interference_term: float


def _mean_and_fringe(phi, gamma_wp, s0, tau):
    """Saturated mean s/(1+s) and fringe amplitude s/(1+s) g1 e_l.L[e_l].

    ``phi`` is the grating phase. Written without the overlap denominator so
    it stays finite at field nulls, where both vanish.
    """
    c2g = math.cos(2 * gamma_wp)
    cphi = np.cos(phi)
    s = np.maximum(2.0 * s0 * (1.0 + c2g * cphi), 0.0)
    mean = s / (1.0 + s)
    fringe = 2.0 * s0 * (c2g + cphi) / (1.0 + s) * g1_resonant(s, tau)
    return mean, fringe


def intensity_array(z, theta, tau, gamma_wp, geometry: Geometry, s0):
    """Vectorized I_1 / I_a over broadcastable ``z``, ``theta``, ``tau``."""
    z = np.asarray(z, dtype=float)
    theta = np.asarray(theta, dtype=float)
    mean, fringe = _mean_and_fringe(grating_phase(z, geometry), gamma_wp, s0, tau)
    return mean + fringe * np.cos(2 * geometry.k * z * np.cos(theta))


def intensity_single(z, theta, tau, gamma_wp, geometry: Geometry, s0, *, linewidth=None):
    """Intensity scattered by one atom at longitudinal position ``z``.

    ``tau`` is the reduced delay Gamma*tau_c. Pass ``tau=None`` together
    with ``linewidth`` (Gamma in rad/s) to use the exact position-dependent
    delay 2 (z cos(theta) + L) / c instead.
    """
    if tau is None:
        if linewidth is None:
            raise DomainError("tau=None requires linewidth to compute the exact delay")
        tau = tau_c(
            Geometry(geometry.theta0, theta, geometry.phi, geometry.k, geometry.h,
                     geometry.L, geometry.c_light),
            z, linewidth=linewidth,
        )
    if tau < 0:
        raise DomainError(f"tau={tau!r} must be >= 0")
    phi = float(grating_phase(z, geometry))
    mean, fringe = _mean_and_fringe(phi, gamma_wp, s0, tau)
    mean, fringe = float(mean), float(fringe)
    if mean == 0.0:
        return SingleAtomResult(0.0, 0.0, 0.0)
    interference = fringe / mean * math.cos(2 * geometry.k * z * math.cos(theta))
    return SingleAtomResult(mean * (1.0 + interference), mean, interference)


def is_undriven(z, gamma_wp, geometry: Geometry) -> bool:
    """True at exact nodes of the drive field, where the atom does not scatter."""
    c2g = math.cos(2 * gamma_wp)
    return 2.0 * (1.0 + c2g * math.cos(float(grating_phase(z, geometry)))) < NULL_THRESHOLD


def contrast_single(z, tau, gamma_wp, geometry: Geometry, s0) -> float:
    """Peak-to-peak over mean contrast 2 |g1_z(tau) e_l.L[e_l]| of one atom's fringes.

    Returns 0 for an undriven atom.
    """
    if is_undriven(z, gamma_wp, geometry):
        return 0.0
    s = local_saturation(z, gamma_wp, geometry, s0)
    cross = float(cross_overlap_from_phase(grating_phase(z, geometry), gamma_wp))
    return 2.0 * abs(g1_resonant(s, tau) * cross)


def contrast_single_parallel(z, tau, s0, geometry: Geometry) -> float:
    """Contrast for gamma = 0; s(z) = 4 s0 cos^2(k cos(theta0) z)."""
    return contrast_single(z, tau, 0.0, geometry, s0)


def contrast_single_perp(z, tau, s0, geometry: Geometry) -> float:
    """Contrast for gamma = pi/4; s = 2 s0 for every z."""
    g = g1_resonant(2.0 * s0, tau)
    return 2.0 * abs(g * math.cos(float(grating_phase(z, geometry))))


def four_path_amplitudes(z, theta, gamma_wp, geometry: Geometry) -> tuple[JonesVector, ...]:
    """Linear-regime amplitudes of the four excitation/emission paths.

    Order: (direct in, direct out), (mirror in, direct out),
    (direct in, mirror out), (mirror in, mirror out). Amplitudes are per
    unit incident field, with the common far-field phase removed.
    """
    kz0 = geometry.k * math.cos(geometry.theta0) * z
    out_phase = 2 * geometry.k * math.cos(theta) * z
    e1 = rotated_polarization(gamma_wp)
    return (
        EX.scaled(np.exp(1j * kz0)),
        e1.scaled(np.exp(-1j * kz0)),
        waveplate_map(gamma_wp, EX).scaled(np.exp(1j * (out_phase + kz0))),
        waveplate_map(gamma_wp, e1).scaled(np.exp(1j * (out_phase - kz0))),
    )


def four_path_intensity(z, theta, gamma_wp, geometry: Geometry, s0) -> float:
    """s0/2 |sum of path amplitudes|^2, the weak-drive limit of I_1 / I_a.

    Only defined in the linear regime, ``s0 <= 1e-3``.
    """
    if not 0 <= s0 <= LINEAR_REGIME_MAX_S0:
        raise DomainError(f"four-path picture needs s0 <= {LINEAR_REGIME_MAX_S0}, got {s0!r}")
    total = JonesVector(0.0, 0.0)
    for amp in four_path_amplitudes(z, theta, gamma_wp, geometry):
        total = total + amp
    return 0.5 * s0 * total.norm2()
