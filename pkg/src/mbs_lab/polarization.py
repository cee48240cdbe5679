"""Jones calculus for the transverse drive field in front of the mirror."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError
from .model import Geometry

NULL_THRESHOLD = 1e-9


@dataclass(frozen=True)
class JonesVector:
    """Transverse polarization (ex, ey); the z component is neglected."""

    ex: complex
    ey: complex

    def as_array(self) -> np.ndarray:
        return np.array([self.ex, self.ey], dtype=complex)

    @classmethod
    def from_array(cls, v) -> "JonesVector":
        return cls(complex(v[0]), complex(v[1]))

    def norm2(self) -> float:
        return abs(self.ex) ** 2 + abs(self.ey) ** 2

    def dot(self, other: "JonesVector") -> complex:
        """Hermitian product self^dagger . other."""
        return self.ex.conjugate() * other.ex + self.ey.conjugate() * other.ey

    def scaled(self, factor: complex) -> "JonesVector":
        return JonesVector(factor * self.ex, factor * self.ey)

    def __add__(self, other: "JonesVector") -> "JonesVector":
        return JonesVector(self.ex + other.ex, self.ey + other.ey)


EX = JonesVector(1.0, 0.0)
EY = JonesVector(0.0, 1.0)


@dataclass(frozen=True)
class DriveField:
    """Total drive field: ``amplitude`` (E_l / E0) times unit ``direction``.

    ``null`` is set where the field vanishes; ``direction`` is then an
    arbitrary conventional choice (e_x).
    """

    amplitude: float
    direction: JonesVector
    null: bool = False


def waveplate_matrix(gamma_wp: float) -> np.ndarray:
    """Half-waveplate Jones matrix with proper axis at ``gamma_wp`` from e_x."""
    c, s = math.cos(2 * gamma_wp), math.sin(2 * gamma_wp)
    return np.array([[c, s], [s, -c]])


def waveplate_map(gamma_wp: float, v: JonesVector) -> JonesVector:
    """Apply the half waveplate. The map is a unitary involution."""
    return JonesVector.from_array(waveplate_matrix(gamma_wp) @ v.as_array())


def rotated_polarization(gamma_wp: float) -> JonesVector:
    """e_1, the image of e_x through the waveplate."""
    return waveplate_map(gamma_wp, EX)


def grating_phase(z, geometry: Geometry):
    """Phase 2 k cos(theta0) z of the drive grating."""
    return 2 * geometry.k * math.cos(geometry.theta0) * np.asarray(z, dtype=float)


def drive_intensity_factor(phi, gamma_wp: float):
    """|E_l / E0|^2 = 2 [1 + cos(2 gamma) cos(phi)] as a function of grating phase."""
    return 2.0 * (1.0 + math.cos(2 * gamma_wp) * np.cos(phi))


def total_drive(z: float, gamma_wp: float, geometry: Geometry, y: float = 0.0) -> DriveField:
    """Total drive field (incoming + reflected through the waveplate) at ``z``.

    The global plane-wave phase ``exp(i k (cos(theta0) z - sin(theta0) y))``
    is kept on the direction vector.
    """
    kz = geometry.k * math.cos(geometry.theta0) * z
    e1 = rotated_polarization(gamma_wp)
    # E_l / E0 = exp(i kz) e_x + exp(-i kz) e_1, dropping the y phase
    raw = EX.scaled(np.exp(1j * kz)) + e1.scaled(np.exp(-1j * kz))
    amp2 = float(drive_intensity_factor(2 * kz, gamma_wp))
    global_y = np.exp(-1j * geometry.k * math.sin(geometry.theta0) * y)
    if amp2 < NULL_THRESHOLD:
        return DriveField(0.0, EX.scaled(global_y), null=True)
    # normalize by the computed vector so the direction stays unit length
    # where the analytic factor suffers cancellation near a null
    amp = math.sqrt(raw.norm2())
    return DriveField(amp, raw.scaled(global_y / amp))


def cross_overlap_from_phase(phi, gamma_wp: float):
    """e_l^dagger . L[e_l] versus grating phase; NaN at exact field nulls."""
    c2g = math.cos(2 * gamma_wp)
    cphi = np.cos(phi)
    den = 1.0 + c2g * cphi
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(np.abs(den) < NULL_THRESHOLD / 2, np.nan, (c2g + cphi) / den)
    return out


def overlap_factors(z: float, gamma_wp: float, geometry: Geometry):
    """Polarization overlaps entering the single-atom intensity.

    Returns ``(self_overlap, rotated_overlap, cross_overlap)``; the first two
    are identically 1.

    Raises
    ------
    NumericalError
        At an exact field null, where the drive direction is undefined.
    """
    phi = float(grating_phase(z, geometry))
    c2g = math.cos(2 * gamma_wp)
    den = 1.0 + c2g * math.cos(phi)
    if 2 * den < NULL_THRESHOLD:
        raise NumericalError(f"drive field null at z={z!r}; atom is undriven")
    return 1.0, 1.0, (c2g + math.cos(phi)) / den
