"""Self-check suite comparing the main code paths with independent oracles."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .analysis import contrast_curve, fit_envelope_period
from .cloud import (
    appendix_integral_closed,
    cloud_intensity_montecarlo,
    cloud_intensity_perp_closed,
    cloud_intensity_quadrature,
    default_theta_grid,
    fringe_pattern,
)
from .emitter import g1_resonant
from .model import CloudSpec, make_geometry
from .oracles import appendix_integral_bruteforce, g1_mpmath
from .scatterer import four_path_intensity, intensity_single


@dataclass(frozen=True)
class CheckResult:
    name: str
    deviation: float
    threshold: float
    seconds: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.deviation) and self.deviation <= self.threshold)


def reference_setup():
    """Reference setup: theta0 = 4.3 deg, 780 nm, h = 5 mm, s_r = s_z = 500 um."""
    geometry = make_geometry(math.radians(4.3), wavelength=780e-9, h=5e-3)
    cloud = CloudSpec(100_000, 500e-6, 500e-6)
    return geometry, cloud


def _check_g1_limits(fast):
    dev = 0.0
    for s in (0.01, 0.125, 1.0, 10.0, 100.0):
        dev = max(dev, abs(g1_resonant(s, 0.0) - 1.0), abs(g1_resonant(s, 60.0) - 1 / (1 + s)))
    return dev, 1e-9


def _check_appendix(fast):
    geometry, cloud = reference_setup()
    s_theta = geometry.envelope_width(cloud.s_z)
    thetas = geometry.theta0 + np.linspace(-4, 4, 5 if fast else 50) * s_theta
    brute = appendix_integral_bruteforce(thetas, geometry, cloud)
    closed = appendix_integral_closed(thetas, geometry, cloud)
    # sup-norm relative: the finite brute-force window leaves ~1e-9 absolute
    # error that would dominate a pointwise ratio where the closed value is tiny
    return float(np.max(np.abs(brute - closed)) / np.max(np.abs(closed))), 1e-6


def _check_triangle(fast):
    """Quadrature vs closed form (relative) and vs Monte Carlo (in standard errors / 3)."""
    geometry, cloud = reference_setup()
    thetas = geometry.theta0 + np.array([0.0, 0.25]) * geometry.fringe_period()
    n = 100_000 if fast else 1_000_000
    worst = 0.0
    for th in thetas:
        quad = cloud_intensity_quadrature(th, 1.0, math.pi / 4, geometry, cloud, 5.0)
        closed = cloud_intensity_perp_closed(th, 1.0, geometry, cloud, 5.0)
        worst = max(worst, abs(quad.value - closed) / abs(closed) / 1e-6)
        for gamma in (0.0, math.pi / 4):
            quad = cloud_intensity_quadrature(th, 1.0, gamma, geometry, cloud, 5.0)
            mc, se = cloud_intensity_montecarlo(th, 1.0, gamma, geometry, cloud, 5.0,
                                                n_samples=n, seed=7)
            worst = max(worst, abs(mc - quad.value) / math.hypot(se, quad.est_error) / 3.0)
    return worst, 1.0


def _check_perp_identity(fast):
    """Crossed-polarization center contrast (peak-to-peak over mean) against
    the arbitrary-precision g1 at s = 2 s0."""
    geometry, cloud = reference_setup()
    taus = np.linspace(0, 6, 7 if fast else 61)
    curve = contrast_curve(taus, math.pi / 4, geometry, cloud, 5.0,
                           "peak_to_peak_over_mean", method="quadrature")
    got = np.array([c.contrast for c in curve])
    ref = np.array([g1_mpmath(10.0, t) for t in taus])
    return float(np.max(np.abs(got - ref))), 1e-3


def _check_envelope(fast):
    geometry, cloud = reference_setup()
    pattern = fringe_pattern(default_theta_grid(geometry, cloud), 0.0, math.pi / 4,
                             geometry, cloud, 5.0)
    fit = fit_envelope_period(pattern)
    dev_w = abs(fit.s_theta / fit.predicted_s_theta - 1) / 0.01
    dev_p = abs(fit.period / fit.predicted_period - 1) / 0.005
    return max(dev_w, dev_p), 1.0


def _check_four_path(fast):
    geometry, _ = reference_setup()
    rng = np.random.default_rng(3)
    worst = 0.0
    s0 = 1e-6
    for _ in range(20 if fast else 100):
        z = rng.uniform(-6e-3, -4e-3)
        theta = geometry.theta0 + rng.uniform(-5e-3, 5e-3)
        gamma = rng.uniform(0, math.pi)
        full = intensity_single(z, theta, 0.0, gamma, geometry, s0).intensity
        paths = four_path_intensity(z, theta, gamma, geometry, s0)
        worst = max(worst, abs(paths - full) / abs(full))
    return worst, 1e-4


CHECKS = [
    ("g1 limits (tau=0 and tau=60)", _check_g1_limits),
    ("gaussian cosine integral: closed vs brute force", _check_appendix),
    ("quadrature vs closed form vs Monte Carlo", _check_triangle),
    ("crossed-polarization contrast equals g1(2 s0)", _check_perp_identity),
    ("envelope width and period recovery", _check_envelope),
    ("four-path linear limit", _check_four_path),
]


def run_checks(fast=False) -> list[CheckResult]:
    results = []
    for name, fn in CHECKS:
        t0 = time.perf_counter()
        try:
            dev, thr = fn(fast)
        except Exception:  # a crashing check is a failed check
            dev, thr = math.inf, 0.0
        results.append(CheckResult(name, float(dev), float(thr), time.perf_counter() - t0))
    return results


def format_report(results) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  {'deviation':>12}  {'threshold':>10}  result"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {r.deviation:12.4g}  {r.threshold:10.3g}  "
                     f"{'PASS' if r.passed else 'FAIL'}  ({r.seconds:.2f} s)")
    return "\n".join(lines)
