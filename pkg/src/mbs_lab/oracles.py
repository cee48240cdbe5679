"""Independent reference computations used for validation.

These deliberately avoid the code paths they check: arbitrary-precision
arithmetic for g1, brute-force summation for the Gaussian cosine integral,
and direct numerical cosine transforms for the spectrum.
"""
from __future__ import annotations

import math

import mpmath as mp
import numpy as np

from .model import CloudSpec, Geometry


def g1_mpmath(s, tau, dps=50):
    """g1(s, tau) in ``dps``-digit arithmetic, via complex Omega_M."""
    with mp.workdps(dps):
        s = mp.mpf(s)
        tau = mp.mpf(tau)
        om = mp.sqrt(mp.mpc(s / 2 - mp.mpf(1) / 16))
        damp = mp.exp(-3 * tau / 4)
        val = 1 / (1 + s) + (
            mp.exp(-tau / 2)
            + (s - 1) / (s + 1) * mp.cos(om * tau) * damp
            + (5 * s - 1) / (s + 1) / 4 * tau * mp.sinc(om * tau) * damp
        ) / 2
        return float(mp.re(val))


def appendix_integral_bruteforce(theta, geometry: Geometry, cloud: CloudSpec, *,
                                 step=None, n_sigma=6.0):
    """Trapezoid sum of N(z; -h, s_z) cos(2kz cos theta0) cos(2kz cos theta).

    Default step is lambda/40 over +/- ``n_sigma`` s_z.
    """
    if step is None:
        step = geometry.wavelength / 40
    half = n_sigma * cloud.s_z
    n = int(math.ceil(2 * half / step)) + 1
    z = np.linspace(-geometry.h - half, -geometry.h + half, n)
    dz = z[1] - z[0]
    w = np.exp(-0.5 * ((z + geometry.h) / cloud.s_z) ** 2) / (math.sqrt(2 * math.pi) * cloud.s_z)
    w[0] *= 0.5
    w[-1] *= 0.5
    base = w * np.cos(2 * geometry.k * z * math.cos(geometry.theta0))
    out = []
    for th in np.atleast_1d(theta):
        out.append(dz * float(np.dot(base, np.cos(2 * geometry.k * z * math.cos(th)))))
    return out[0] if np.ndim(theta) == 0 else np.array(out)


def spectrum_cosine_transform(g1_func, s, nu, *, tau_max=80.0, dtau=2e-3):
    """(1/pi) int_0^inf [g1(tau) - 1/(1+s)] cos(nu tau) dtau by Simpson's rule."""
    from scipy.integrate import simpson

    n = int(round(tau_max / dtau))
    n += n % 2
    tau = np.linspace(0.0, tau_max, n + 1)
    inel = np.asarray(g1_func(s, tau)) - 1.0 / (1.0 + s)
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    return np.array([simpson(inel * np.cos(v * tau), x=tau) for v in nu]) / np.pi


def local_extrema(x, y):
    """Positions and kinds ('max'/'min') of interior local extrema of ``y``,
    refined by a parabola through the three bracketing samples."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = []
    for i in range(1, y.size - 1):
        if (y[i] - y[i - 1]) * (y[i + 1] - y[i]) < 0:
            denom = y[i - 1] - 2 * y[i] + y[i + 1]
            shift = 0.5 * (y[i - 1] - y[i + 1]) / denom if denom != 0 else 0.0
            out.append((x[i] + shift * (x[1] - x[0]), "max" if denom < 0 else "min"))
    return out
