"""Fringe analysis: signed contrast, envelope width and period.

Patterns are fitted with a Gaussian-enveloped cosine,

    I(u) = a [1 + c exp(-2 w^2 u^2) cos(p u + phase)],

with ``u`` either the angle offset theta - theta0 (``coordinate="angle"``)
or cos(theta0) - cos(theta) (``coordinate="cosine"``). The cloud fringes
are exactly of this form in the cosine coordinate, whereas in the angle
coordinate they carry a small chirp; the cosine coordinate is therefore
the default whenever the pattern knows its geometry.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._parallel import ordered_map
from .cloud import FringePattern, default_theta_grid, fringe_pattern
from .exceptions import DomainError, FitError, MBSError
from .model import CloudSpec, Geometry

MIN_PERIODS = 3.0


class Convention(str, enum.Enum):
    MICHELSON = "michelson"
    PEAK_TO_PEAK_OVER_MEAN = "peak_to_peak_over_mean"


@dataclass(frozen=True)
class ContrastResult:
    """Signed fringe contrast at the pattern center.

    ``contrast`` is c for the Michelson convention and 2c for peak-to-peak
    over mean. A negative value means inverted fringes.
    """

    contrast: float
    convention: Convention
    fit_residual_rms: float
    converged: bool
    stderr: float = math.nan
    message: str = ""


@dataclass(frozen=True)
class EnvelopeFit:
    """Envelope rms half-width and fringe period in theta [rad]."""

    s_theta: float
    period: float
    center: float
    phase: float
    s_theta_err: float
    period_err: float
    predicted_s_theta: float = math.nan
    predicted_period: float = math.nan


def _model(params, u):
    a, c, w, p, phase = params[:5]
    u0 = params[5] if len(params) > 5 else 0.0
    v = u - u0
    return a * (1.0 + c * np.exp(-2.0 * w * w * v * v) * np.cos(p * v + phase))


def _fft_frequency(u, r):
    """Angular frequency of the strongest component of ``r`` sampled at ``u``."""
    grid = np.linspace(u[0], u[-1], u.size)
    r_uniform = np.interp(grid, u, r)
    n_fft = 16 * 2 ** int(math.ceil(math.log2(u.size)))
    spec = np.abs(np.fft.rfft(r_uniform * np.hanning(u.size), n_fft))
    freqs = np.fft.rfftfreq(n_fft, grid[1] - grid[0])
    spec[0] = 0.0
    return 2 * np.pi * freqs[np.argmax(spec)]


def _linear_subfit(u, y, a, w, p):
    env = np.exp(-2.0 * w * w * u * u)
    design = np.column_stack([env * np.cos(p * u), env * np.sin(p * u)])
    (ca, cb), *_ = np.linalg.lstsq(design, y / a - 1.0, rcond=None)
    # c cos(pu + phase) = c cos(phase) cos(pu) - c sin(phase) sin(pu)
    return math.hypot(ca, cb), math.atan2(-cb, ca)


def _canonical(c, phase):
    """Fold the phase into (-pi/2, pi/2], moving a half-turn into the sign of c."""
    phase = (phase + np.pi) % (2 * np.pi) - np.pi
    if phase > np.pi / 2:
        return -c, phase - np.pi
    if phase <= -np.pi / 2:
        return -c, phase + np.pi
    return c, phase


class FringeFitter(RegressorMixin, BaseEstimator):
    """Least-squares fit of a Gaussian-enveloped fringe.

    Parameters
    ----------
    theta0 : fringe center [rad]
    coordinate : "cosine" or "angle", see module docstring
    width_init, frequency_init : optional starting values for w and p in the
        chosen coordinate; the frequency otherwise comes from an FFT
    free_center : also fit a center offset
    max_restarts : restarts from perturbed starting frequencies

    Attributes
    ----------
    params_ : (a, c, w, p, phase[, center offset])
    stderr_ : standard errors of ``params_``
    contrast_ : signed contrast c
    residual_rms_ : rms residual relative to a
    converged_ : bool
    """

    def __init__(self, theta0=0.0, coordinate="cosine", width_init=None, frequency_init=None,
                 free_center=False, max_restarts=6):
        self.theta0 = theta0
        self.coordinate = coordinate
        self.width_init = width_init
        self.frequency_init = frequency_init
        self.free_center = free_center
        self.max_restarts = max_restarts

    def _to_u(self, theta):
        theta = np.asarray(theta, dtype=float).reshape(-1)
        if self.coordinate == "cosine":
            return math.cos(self.theta0) - np.cos(theta)
        if self.coordinate == "angle":
            return theta - self.theta0
        raise DomainError(f"unknown coordinate {self.coordinate!r}")

    def _du_dtheta(self):
        return math.sin(self.theta0) if self.coordinate == "cosine" else 1.0

    def fit(self, X, y):
        u = self._to_u(X)
        y = np.asarray(y, dtype=float).reshape(-1)
        if u.size != y.size or u.size < 8:
            raise DomainError("need matching X, y with at least 8 samples")
        if np.any(np.diff(u) <= 0):
            order = np.argsort(u)
            u, y = u[order], y[order]
        if not np.all(np.isfinite(y)):
            raise DomainError("intensities must be finite")
        span = u[-1] - u[0]
        a0 = float(np.mean(y))
        if a0 == 0.0:
            raise FitError("pattern has zero mean intensity")
        p0 = self.frequency_init or _fft_frequency(u, y - a0)
        w0 = self.width_init or 2.0 / span

        best = None
        multipliers = [1.0, 0.95, 1.05, 0.85, 1.15, 0.7, 1.4][: self.max_restarts + 1]
        for m in multipliers:
            p_start = p0 * m
            c_start, ph_start = _linear_subfit(u, y, a0, w0, p_start)
            x0 = [a0, c_start, w0, p_start, ph_start] + ([0.0] if self.free_center else [])
            scale = [abs(a0), 1.0, w0, p_start, 1.0] + ([1.0 / p_start] if self.free_center else [])
            try:
                res = least_squares(lambda q: (_model(q, u) - y) / abs(a0), x0,
                                    x_scale=scale, method="lm", xtol=1e-14, ftol=1e-14,
                                    gtol=1e-14, max_nfev=4000)
            except (ValueError, np.linalg.LinAlgError):
                continue
            if best is None or res.cost < best.cost:
                best = res
            if res.success and np.sqrt(2 * res.cost / u.size) < 1e-3 * max(np.std(y) / abs(a0), 1e-12):
                break
        if best is None:
            raise FitError("fringe fit failed on every restart")

        params = np.array(best.x, dtype=float)
        params[2] = abs(params[2])
        params[1], params[4] = _canonical(params[1], params[4])
        dof = max(u.size - params.size, 1)
        resid = (_model(params, u) - y) / abs(params[0])
        sigma2 = float(np.sum((_model(best.x, u) - y) ** 2)) / dof / a0**2
        jac = best.jac
        try:
            # equilibrate the columns first: their norms span many decades in
            # the cosine coordinate and would otherwise be cut by pinv
            norms = np.linalg.norm(jac, axis=0)
            norms[norms == 0] = 1.0
            js = jac / norms
            cov = np.linalg.pinv(js.T @ js) / np.outer(norms, norms) * sigma2
            stderr = np.sqrt(np.clip(np.diag(cov), 0.0, None))
        except np.linalg.LinAlgError:
            stderr = np.full(params.size, np.nan)

        self.params_ = params
        self.stderr_ = stderr
        self.contrast_ = float(params[1])
        self.residual_rms_ = float(np.sqrt(np.mean(resid**2)))
        self.converged_ = bool(best.success)
        self.n_periods_ = abs(params[3]) * span / (2 * np.pi)
        return self

    def predict(self, X):
        check_is_fitted(self, "params_")
        return _model(self.params_, self._to_u(X))

    @property
    def s_theta_(self):
        check_is_fitted(self, "params_")
        return 1.0 / (2.0 * self.params_[2] * self._du_dtheta())

    @property
    def period_(self):
        check_is_fitted(self, "params_")
        return 2 * np.pi / (abs(self.params_[3]) * self._du_dtheta())


def _pattern_coordinate(pattern: FringePattern, coordinate):
    geometry = pattern.meta.get("geometry")
    if coordinate == "auto":
        coordinate = "cosine" if geometry is not None else "angle"
    theta0 = pattern.meta.get("theta0", geometry.theta0 if geometry is not None else None)
    if theta0 is None:
        theta0 = float(pattern.theta_grid[np.argmax(pattern.intensity)])
    return coordinate, theta0


def _initial_from_meta(pattern, coordinate):
    geometry: Geometry | None = pattern.meta.get("geometry")
    cloud: CloudSpec | None = pattern.meta.get("cloud")
    if geometry is None or cloud is None:
        return None, None
    if coordinate == "cosine":
        return geometry.k * cloud.s_z, 2 * geometry.k * geometry.h
    return geometry.theta0 * geometry.k * cloud.s_z, 2 * geometry.k * geometry.h * geometry.theta0


def _fit_pattern(pattern: FringePattern, coordinate="auto", free_center=False) -> FringeFitter:
    coordinate, theta0 = _pattern_coordinate(pattern, coordinate)
    w_init, _ = _initial_from_meta(pattern, coordinate)
    fitter = FringeFitter(theta0=theta0, coordinate=coordinate, width_init=w_init,
                          free_center=free_center)
    geometry = pattern.meta.get("geometry")
    if geometry is not None:
        span = pattern.theta_grid[-1] - pattern.theta_grid[0]
        if span < MIN_PERIODS * geometry.fringe_period():
            raise DomainError(
                f"pattern spans {span / geometry.fringe_period():.2f} fringe periods, "
                f"need >= {MIN_PERIODS}"
            )
        cloud = pattern.meta.get("cloud")
        if cloud is not None and span < 2 * geometry.envelope_width(cloud.s_z):
            raise DomainError("pattern spans less than 2 s_theta of the envelope")
    fitter.fit(pattern.theta_grid, pattern.intensity)
    if geometry is None and fitter.n_periods_ < MIN_PERIODS and abs(fitter.contrast_) > 1e-6:
        raise DomainError(f"pattern spans only {fitter.n_periods_:.2f} fringe periods")
    return fitter


def extract_contrast(pattern: FringePattern, convention="michelson", *,
                     coordinate="auto") -> ContrastResult:
    """Signed fringe contrast of ``pattern`` at its center."""
    convention = Convention(convention)
    fitter = _fit_pattern(pattern, coordinate)
    factor = 2.0 if convention is Convention.PEAK_TO_PEAK_OVER_MEAN else 1.0
    return ContrastResult(
        contrast=factor * fitter.contrast_,
        convention=convention,
        fit_residual_rms=fitter.residual_rms_,
        converged=fitter.converged_,
        stderr=factor * float(fitter.stderr_[1]),
    )


def fit_envelope_period(pattern: FringePattern, *, coordinate="auto") -> EnvelopeFit:
    """Envelope rms half-width and period of ``pattern``, with the small-angle
    predictions 1/(2 theta0 k s_z) and pi/(theta0 k h) attached when the
    pattern carries its geometry."""
    fitter = _fit_pattern(pattern, coordinate, free_center=True)
    scale = fitter._du_dtheta()
    w, p = fitter.params_[2], abs(fitter.params_[3])
    w_err, p_err = fitter.stderr_[2], fitter.stderr_[3]
    geometry = pattern.meta.get("geometry")
    cloud = pattern.meta.get("cloud")
    pred_s = geometry.envelope_width(cloud.s_z) if geometry is not None and cloud is not None else math.nan
    pred_p = geometry.fringe_period() if geometry is not None else math.nan
    center_u = fitter.params_[5]
    if fitter.coordinate == "cosine":
        center = math.acos(min(max(math.cos(fitter.theta0) - center_u, -1.0), 1.0))
    else:
        center = fitter.theta0 + center_u
    return EnvelopeFit(
        s_theta=1.0 / (2.0 * w * scale),
        period=2 * np.pi / (p * scale),
        center=center,
        phase=float(fitter.params_[4]),
        s_theta_err=w_err / (2.0 * w * w * scale),
        period_err=2 * np.pi * p_err / (p * p * scale),
        predicted_s_theta=pred_s,
        predicted_period=pred_p,
    )


def contrast_curve(tau_grid, gamma_wp, geometry: Geometry, cloud: CloudSpec, s0,
                   convention="michelson", *, method="auto", theta_grid=None, tol=1e-8,
                   n_samples=100_000, seed=0) -> list[ContrastResult]:
    """Center contrast versus delay.

    ``method="auto"`` uses the closed form for crossed polarizations and the
    quadrature otherwise. A failure at one delay is reported in that entry
    (``converged=False``, ``message`` set) without stopping the sweep.
    """
    tau_grid = np.asarray(tau_grid, dtype=float)
    if np.any(tau_grid < 0) or np.any(np.diff(tau_grid) <= 0):
        raise DomainError("tau_grid must be ascending and non-negative")
    convention = Convention(convention)
    if method == "auto":
        perp = math.isclose(math.cos(2 * gamma_wp), 0.0, abs_tol=1e-12)
        method = "closed_perp" if perp else "quadrature"
    if theta_grid is None:
        theta_grid = default_theta_grid(geometry, cloud)

    def one(tau):
        try:
            pattern = fringe_pattern(theta_grid, tau, gamma_wp, geometry, cloud, s0, method,
                                     tol=tol, n_samples=n_samples, seed=seed)
            return extract_contrast(pattern, convention)
        except MBSError as exc:
            return ContrastResult(math.nan, convention, math.nan, False,
                                  message=f"tau={tau:g}: {exc}")

    return ordered_map(one, tau_grid)
