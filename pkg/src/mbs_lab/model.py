"""Shared data model: geometry, cloud and drive specifications.

Conventions
-----------
* Time is measured in units of 1/Gamma and frequencies in units of Gamma
  (Gamma = 1). Lengths stay in meters, with the wavenumber ``k`` explicit.
* ``phi`` (detection azimuth) is carried on :class:`Geometry` but never
  used: every observable in the small-angle regime depends on ``theta`` only.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

from .exceptions import DomainError

C_LIGHT = 299_792_458.0

MAX_SMALL_ANGLE = 0.2


@dataclass(frozen=True)
class Geometry:
    """Mirror / cloud / detection geometry.

    Attributes
    ----------
    theta0 : incidence angle on the mirror [rad]
    theta : detection polar angle [rad]
    phi : detection azimuth [rad], unused
    k : wavenumber 2*pi/lambda [rad/m]
    h : distance from the cloud center to the (virtual) mirror [m]
    L : path length between virtual and real mirror [m]
    c_light : speed of light [m/s]
    """

    theta0: float
    theta: float
    phi: float
    k: float
    h: float
    L: float = 0.0
    c_light: float = C_LIGHT

    def __post_init__(self):
        for name in ("theta0", "theta"):
            value = getattr(self, name)
            if not (0.0 < value < MAX_SMALL_ANGLE):
                raise DomainError(
                    f"{name}={value!r} outside small-angle range (0, {MAX_SMALL_ANGLE}) rad"
                )
        if not self.k > 0:
            raise DomainError(f"k={self.k!r} must be > 0")
        if not self.h > 0:
            raise DomainError(f"h={self.h!r} must be > 0")
        if not self.L >= 0:
            raise DomainError(f"L={self.L!r} must be >= 0")
        if not self.c_light > 0:
            raise DomainError(f"c_light={self.c_light!r} must be > 0")
        if not math.isfinite(self.phi):
            raise DomainError("phi must be finite")

    @property
    def wavelength(self) -> float:
        return 2 * math.pi / self.k

    @property
    def grating_period(self) -> float:
        """Spatial period lambda*/2 = lambda / (2 cos theta0) of the drive grating."""
        return math.pi / (self.k * math.cos(self.theta0))

    def fringe_period(self) -> float:
        """Angular fringe period pi / (theta0 k h) of the cloud pattern."""
        return math.pi / (self.theta0 * self.k * self.h)

    def envelope_width(self, s_z: float) -> float:
        """Rms half-width 1 / (2 theta0 k s_z) of the cloud fringe envelope."""
        return 1.0 / (2 * self.theta0 * self.k * s_z)


def make_geometry(theta0, theta=None, phi=0.0, k=None, h=None, L=0.0, c_light=C_LIGHT,
                  *, wavelength=None) -> Geometry:
    """Build a validated :class:`Geometry`.

    ``theta`` defaults to ``theta0``. Either ``k`` or ``wavelength`` (meters)
    must be given.
    """
    if k is None:
        if wavelength is None:
            raise DomainError("either k or wavelength is required")
        if not wavelength > 0:
            raise DomainError(f"wavelength={wavelength!r} must be > 0")
        k = 2 * math.pi / wavelength
    if h is None:
        raise DomainError("h is required")
    if theta is None:
        theta = theta0
    return Geometry(float(theta0), float(theta), float(phi), float(k), float(h),
                    float(L), float(c_light))


def tau_c(geometry: Geometry, z=0.0, *, cloud_approx=False, linewidth=None):
    """Delay between the direct and mirror-reflected emission paths.

    Returns ``2 (z cos(theta) + L) / c`` in seconds, or ``2 L / c`` when
    ``cloud_approx`` is set (the z-independent delay used for extended
    clouds). If ``linewidth`` (Gamma in rad/s) is given, the result is
    converted to the reduced time Gamma * tau_c.
    """
    if cloud_approx:
        delay = 2 * geometry.L / geometry.c_light
    else:
        delay = 2 * (z * math.cos(geometry.theta) + geometry.L) / geometry.c_light
    if linewidth is not None:
        delay = delay * linewidth
    return delay


@dataclass(frozen=True)
class CloudSpec:
    """Gaussian cloud of ``n_atoms`` scatterers with rms sizes ``s_r``, ``s_z`` [m]."""

    n_atoms: int
    s_r: float
    s_z: float

    def __post_init__(self):
        if int(self.n_atoms) != self.n_atoms or self.n_atoms < 1:
            raise DomainError(f"n_atoms={self.n_atoms!r} must be a positive integer")
        if not self.s_r > 0:
            raise DomainError(f"s_r={self.s_r!r} must be > 0")
        if not self.s_z > 0:
            raise DomainError(f"s_z={self.s_z!r} must be > 0")

    def peak_density_k3(self, k: float) -> float:
        """Peak density in units of k^3."""
        return self.n_atoms / ((2 * math.pi) ** 1.5 * self.s_z * self.s_r**2 * k**3)

    def optical_depth(self, k: float) -> float:
        """Resonant on-axis optical depth, with cross-section 6 pi / k^2."""
        return 3 * self.n_atoms / (k**2 * self.s_r**2)

    def check_validity(self, k: float) -> list[str]:
        """Warn about regimes where the incoherent-sum model breaks down.

        Returns the list of warning messages that were emitted.
        """
        messages = []
        if k * self.s_z <= 100:
            messages.append(f"k*s_z={k * self.s_z:.3g} <= 100: cloud not much larger than 1/k")
        rho = self.peak_density_k3(k)
        if rho > 0.01:
            messages.append(f"peak density {rho:.3g} k^3 > 0.01: collective effects not negligible")
        b0 = self.optical_depth(k)
        if b0 > 0.1:
            messages.append(f"optical depth b0={b0:.3g} is not << 1")
        for msg in messages:
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
        return messages


@dataclass(frozen=True)
class DriveSpec:
    """Resonant drive: single-beam saturation ``s0`` and waveplate angle ``gamma_wp``."""

    s0: float
    gamma_wp: float = 0.0
    Gamma: float = field(default=1.0)

    def __post_init__(self):
        if not (self.s0 >= 0 and math.isfinite(self.s0)):
            raise DomainError(f"s0={self.s0!r} must be finite and >= 0")
        if not self.Gamma > 0:
            raise DomainError(f"Gamma={self.Gamma!r} must be > 0")
        if not math.isfinite(self.gamma_wp):
            raise DomainError("gamma_wp must be finite")
