"""Fringe pattern of an extended Gaussian cloud.

The cloud intensity is the incoherent sum of single-atom intensities,
I / (N I_a) = <I_1(z)> over z ~ Normal(-h, s_z), with a z-independent delay.
Three independent routes are provided: a two-scale quadrature, a Monte
Carlo estimator, and the closed form valid for crossed polarizations.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erfcinv

from ._parallel import ordered_map
from .emitter import g1_resonant
from .exceptions import ConvergenceError, DomainError
from .model import CloudSpec, Geometry
from .scatterer import _mean_and_fringe, intensity_array

WINDOW_SIGMAS = 6.0
MIN_INNER = 64
MAX_DOUBLINGS = 2
PERP_MAX_OFFSET = 0.05
MIN_POINTS_PER_PERIOD = 12


@dataclass(frozen=True)
class QuadratureReport:
    value: float
    est_error: float
    n_outer: int
    n_inner: int


@dataclass
class FringePattern:
    """Normalized cloud intensity I / (N I_a) sampled on ``theta_grid`` [rad]."""

    theta_grid: np.ndarray
    intensity: np.ndarray
    meta: dict = field(default_factory=dict)
    std_error: np.ndarray | None = None

    def __post_init__(self):
        self.theta_grid = np.asarray(self.theta_grid, dtype=float)
        self.intensity = np.asarray(self.intensity, dtype=float)
        if self.theta_grid.ndim != 1 or self.theta_grid.size < 2:
            raise DomainError("pattern needs at least 2 angles")
        if self.intensity.shape != self.theta_grid.shape:
            raise DomainError("theta_grid and intensity differ in length")
        if np.any(np.diff(self.theta_grid) <= 0):
            raise DomainError("theta_grid must be strictly ascending")
        if not np.all(np.isfinite(self.intensity)):
            raise DomainError("intensity must be finite")


def _check_tol(tol):
    if not 1e-10 <= tol <= 1e-2:
        raise DomainError(f"tol={tol!r} outside [1e-10, 1e-2]")


def _window_sigmas(tol):
    # Gaussian mass outside the window stays an order below tol
    return max(WINDOW_SIGMAS, math.sqrt(2.0) * float(erfcinv(tol / 10.0)))


def phase_averages(gamma_wp, s0, tau, n_inner):
    """One-period averages of the fast grating-periodic factors.

    Returns (<mean>, <fringe cos(phi)>, <fringe sin(phi)>), where mean and
    fringe are the saturated mean term and fringe amplitude of one atom as
    functions of the grating phase phi. The rectangle rule is spectrally
    accurate for these smooth periodic functions.
    """
    phi = 2 * np.pi * (np.arange(n_inner) + 0.5) / n_inner
    mean, fringe = _mean_and_fringe(phi, gamma_wp, s0, tau)
    return mean.mean(), (fringe * np.cos(phi)).mean(), (fringe * np.sin(phi)).mean()


def _outer_nodes(delta_max, cloud: CloudSpec, h, n_sig, level):
    """Trapezoid nodes/weights over z in [-h - n_sig s_z, -h + n_sig s_z]."""
    # at least 2 nodes per s_z and 8 per beat wavelength
    du = min(0.5, math.pi / 4 / max(delta_max * cloud.s_z, 1e-300))
    n = int(math.ceil(2 * n_sig / du)) * 2**level + 1
    u = np.linspace(-n_sig, n_sig, n)
    w = np.full(n, u[1] - u[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    gauss = np.exp(-0.5 * u * u) / math.sqrt(2 * math.pi)
    return -h + cloud.s_z * u, w * gauss


def _quadrature_level(thetas, tau, gamma_wp, geometry, cloud, s0, n_sig, level):
    cos0 = math.cos(geometry.theta0)
    delta = 2 * geometry.k * (np.cos(thetas) - cos0)
    z, w = _outer_nodes(float(np.max(np.abs(delta))), cloud, geometry.h, n_sig, level)
    n_inner = MIN_INNER * 2**level
    a_mean, a_cos, a_sin = phase_averages(gamma_wp, s0, tau, n_inner)
    # the emission phase 2 k cos(theta) z = phi + delta z, with delta z slow
    slow = np.outer(delta, z)
    vals = (np.cos(slow) * a_cos - np.sin(slow) * a_sin) @ w + a_mean * w.sum()
    return vals, z.size, n_inner


def _quadrature_many(thetas, tau, gamma_wp, geometry, cloud, s0, tol):
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    n_sig = _window_sigmas(tol)
    prev, _, _ = _quadrature_level(thetas, tau, gamma_wp, geometry, cloud, s0, n_sig, 0)
    for level in range(1, MAX_DOUBLINGS + 1):
        cur, n_outer, n_inner = _quadrature_level(
            thetas, tau, gamma_wp, geometry, cloud, s0, n_sig, level
        )
        err = np.abs(cur - prev)
        if np.all(err <= tol * np.maximum(np.abs(cur), 1e-300)):
            return cur, err, n_outer, n_inner
        prev = cur
    bad = thetas[np.argmax(err - tol * np.abs(cur))]
    raise ConvergenceError(
        f"quadrature at theta={bad:.9g} missed tol={tol:g} after {MAX_DOUBLINGS} doublings"
    )


def cloud_intensity_quadrature(theta, tau, gamma_wp, geometry: Geometry, cloud: CloudSpec,
                               s0, tol=1e-8) -> QuadratureReport:
    """I / (N I_a) at detection angle ``theta`` by two-scale quadrature.

    The integrand factorizes into a slow part (Gaussian density times the
    beat between emission and grating phases) and a part periodic in the
    grating phase with period lambda*/2. The periodic part is averaged over
    one period on ``n_inner`` points, the slow part integrated by the
    trapezoid rule on a grid resolving both s_z and the beat wavelength.
    Both resolutions are doubled until successive results agree to ``tol``.
    """
    _check_tol(tol)
    if tau < 0:
        raise DomainError(f"tau={tau!r} must be >= 0")
    vals, errs, n_outer, n_inner = _quadrature_many(
        theta, tau, gamma_wp, geometry, cloud, s0, tol
    )
    return QuadratureReport(float(vals[0]), float(errs[0]), n_outer, n_inner)


def _mc_block(seed, block, size, theta, tau, gamma_wp, geometry, cloud, s0):
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))
    x = rng.normal(0.0, cloud.s_r, size)
    y = rng.normal(0.0, cloud.s_r, size)
    z = rng.normal(-geometry.h, cloud.s_z, size)
    del x, y  # the intensity depends on z only
    vals = intensity_array(z, theta, tau, gamma_wp, geometry, s0)
    return vals.sum(), (vals * vals).sum()


def cloud_intensity_montecarlo(theta, tau, gamma_wp, geometry: Geometry, cloud: CloudSpec,
                               s0, n_samples=1_000_000, seed=0, block_size=1 << 16):
    """Monte Carlo estimate of I / (N I_a): average of single-atom intensities
    over positions drawn from the cloud density.

    Samples come in fixed-size blocks, each drawn from its own Philox stream
    keyed by (seed, block index), and block sums are reduced in block order,
    so the result does not depend on the number of worker threads.

    Returns
    -------
    (value, std_error)
    """
    if n_samples < 10_000:
        raise DomainError(f"n_samples={n_samples!r} must be >= 1e4")
    if tau < 0:
        raise DomainError(f"tau={tau!r} must be >= 0")
    n_samples = int(n_samples)
    n_blocks = -(-n_samples // block_size)
    sizes = [block_size] * (n_blocks - 1) + [n_samples - block_size * (n_blocks - 1)]
    parts = ordered_map(
        lambda b: _mc_block(seed, b, sizes[b], theta, tau, gamma_wp, geometry, cloud, s0),
        range(n_blocks),
    )
    sums = np.array(parts)
    total, total_sq = np.sum(sums[:, 0]), np.sum(sums[:, 1])
    mean = total / n_samples
    var = max(total_sq / n_samples - mean * mean, 0.0) * n_samples / (n_samples - 1)
    return float(mean), math.sqrt(var / n_samples)


def appendix_integral_closed(theta, geometry: Geometry, cloud: CloudSpec, *, retained_only=False):
    """Gaussian average of cos(2 k z cos(theta0)) cos(2 k z cos(theta)).

    The exact result is the sum of a sum-frequency term, negligible for
    k s_z >> 1, and a difference-frequency term. With ``retained_only`` only
    the difference term is returned, in the small-angle form
    cos(theta) - cos(theta0) ~ -theta0 (theta - theta0).
    """
    theta = np.asarray(theta, dtype=float)
    k, h, s_z = geometry.k, geometry.h, cloud.s_z
    if retained_only:
        d = geometry.theta0 * (theta - geometry.theta0)
        out = 0.5 * np.exp(-2 * (k * s_z * d) ** 2) * np.cos(2 * k * h * d)
    else:
        c, c0 = np.cos(theta), math.cos(geometry.theta0)
        out = (0.5 * np.exp(-2 * (k * s_z * (c + c0)) ** 2) * np.cos(2 * k * h * (c + c0))
               + 0.5 * np.exp(-2 * (k * s_z * (c - c0)) ** 2) * np.cos(2 * k * h * (c - c0)))
    return float(out) if out.ndim == 0 else out


def cloud_intensity_perp_closed(theta, tau, geometry: Geometry, cloud: CloudSpec, s0, *,
                                small_angle=False):
    """Closed-form I / (N I_a) for crossed polarizations (gamma = pi/4).

    s/(1+s) [1 + g1(s, tau) J(theta)] with s = 2 s0 and J the Gaussian
    average from :func:`appendix_integral_closed`. J peaks at 1/2, so the
    fringe visibility at the center is g1/2 and the peak-to-peak over mean
    contrast is g1.
    """
    theta_arr = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta_arr - geometry.theta0) > PERP_MAX_OFFSET):
        raise DomainError(f"|theta - theta0| must be <= {PERP_MAX_OFFSET} rad")
    s = 2.0 * s0
    jint = appendix_integral_closed(theta_arr, geometry, cloud, retained_only=small_angle)
    out = s / (1.0 + s) * (1.0 + g1_resonant(s, tau) * jint)
    return float(out) if np.ndim(out) == 0 else out


def default_theta_grid(geometry: Geometry, cloud: CloudSpec, half_width_sigmas=4.0,
                       points_per_period=16):
    """Grid over theta0 +/- ``half_width_sigmas`` envelope widths."""
    s_theta = geometry.envelope_width(cloud.s_z)
    span = 2 * half_width_sigmas * s_theta
    n = int(math.ceil(span / geometry.fringe_period() * points_per_period)) + 1
    return np.linspace(geometry.theta0 - half_width_sigmas * s_theta,
                       geometry.theta0 + half_width_sigmas * s_theta, n)


def check_theta_grid(theta_grid, geometry: Geometry):
    theta_grid = np.asarray(theta_grid, dtype=float)
    if theta_grid.ndim != 1 or theta_grid.size < 2:
        raise DomainError("theta_grid must be 1-D with at least 2 points")
    step = np.max(np.diff(theta_grid))
    if step * MIN_POINTS_PER_PERIOD > geometry.fringe_period() * (1 + 1e-9):
        raise DomainError(
            f"theta_grid under-resolves the fringe period: "
            f"{geometry.fringe_period() / step:.3g} < {MIN_POINTS_PER_PERIOD} points per period"
        )
    return theta_grid


METHODS = ("quadrature", "montecarlo", "closed_perp")


def fringe_pattern(theta_grid, tau, gamma_wp, geometry: Geometry, cloud: CloudSpec, s0,
                   method="quadrature", *, tol=1e-8, n_samples=100_000, seed=0) -> FringePattern:
    """Cloud fringe pattern on ``theta_grid`` with the chosen backend."""
    theta_grid = check_theta_grid(theta_grid, geometry)
    cloud.check_validity(geometry.k)
    std = None
    if method == "quadrature":
        _check_tol(tol)
        values, _, _, _ = _quadrature_many(theta_grid, tau, gamma_wp, geometry, cloud, s0, tol)
    elif method == "montecarlo":
        res = [cloud_intensity_montecarlo(t, tau, gamma_wp, geometry, cloud, s0,
                                          n_samples=n_samples, seed=seed) for t in theta_grid]
        values = np.array([r[0] for r in res])
        std = np.array([r[1] for r in res])
    elif method == "closed_perp":
        if not math.isclose(math.cos(2 * gamma_wp), 0.0, abs_tol=1e-12):
            raise DomainError("closed_perp requires gamma_wp = pi/4 (mod pi/2)")
        values = cloud_intensity_perp_closed(theta_grid, tau, geometry, cloud, s0)
    else:
        raise DomainError(f"unknown method {method!r}; expected one of {METHODS}")
    meta = dict(tau=tau, gamma_wp=gamma_wp, s0=s0, geometry=geometry, cloud=cloud,
                method=method)
    return FringePattern(theta_grid, values, meta, std)
