"""scikit-learn style wrappers.

:class:`CloudFringeModel` maps detection angles to normalized cloud
intensity (``predict``), :class:`~mbs_lab.analysis.FringeFitter` maps a
measured pattern to fringe parameters. Both support ``get_params`` /
``set_params`` and clone cleanly.
"""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .analysis import FringeFitter
from .cloud import METHODS, fringe_pattern
from .exceptions import DomainError
from .model import CloudSpec, make_geometry

__all__ = ["CloudFringeModel", "FringeFitter"]


class CloudFringeModel(BaseEstimator):
    """Simulated MBS fringe pattern of a Gaussian cloud.

    ``fit`` only validates the parameters and builds the geometry; there is
    nothing to learn. ``predict(theta)`` returns I / (N I_a).

    Parameters
    ----------
    theta0 : incidence angle [rad]
    wavelength : [m]
    h : cloud to mirror distance [m]
    s_z, s_r : rms cloud sizes [m]
    n_atoms : atom number
    s0 : single-beam saturation parameter
    gamma_wp : waveplate angle [rad]
    tau : reduced delay Gamma*tau_c
    method : "quadrature", "montecarlo" or "closed_perp"
    tol, n_samples, random_state : backend settings
    """

    def __init__(self, theta0=math.radians(4.3), wavelength=780e-9, h=5e-3, s_z=5e-4,
                 s_r=5e-4, n_atoms=100_000, s0=5.0, gamma_wp=math.pi / 4, tau=0.0,
                 method="quadrature", tol=1e-8, n_samples=100_000, random_state=0):
        self.theta0 = theta0
        self.wavelength = wavelength
        self.h = h
        self.s_z = s_z
        self.s_r = s_r
        self.n_atoms = n_atoms
        self.s0 = s0
        self.gamma_wp = gamma_wp
        self.tau = tau
        self.method = method
        self.tol = tol
        self.n_samples = n_samples
        self.random_state = random_state

    def fit(self, X=None, y=None):
        if self.method not in METHODS:
            raise DomainError(f"method must be one of {METHODS}")
        if self.s0 < 0:
            raise DomainError("s0 must be >= 0")
        if self.tau < 0:
            raise DomainError("tau must be >= 0")
        self.geometry_ = make_geometry(self.theta0, wavelength=self.wavelength, h=self.h)
        self.cloud_ = CloudSpec(self.n_atoms, self.s_r, self.s_z)
        return self

    def predict(self, X):
        check_is_fitted(self, "geometry_")
        theta = check_array(np.asarray(X, dtype=float).reshape(-1, 1)).ravel()
        order = np.argsort(theta)
        pattern = fringe_pattern(theta[order], self.tau, self.gamma_wp, self.geometry_,
                                 self.cloud_, self.s0, self.method, tol=self.tol,
                                 n_samples=self.n_samples, seed=int(self.random_state))
        out = np.empty_like(theta)
        out[order] = pattern.intensity
        return out
