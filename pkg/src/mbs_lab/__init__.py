"""Mirror-assisted backscattering interferometry of resonantly driven
two-level scatterers: single-atom and cloud fringe patterns, and recovery
of the first-order correlation g1 from fringe contrast."""
from .analysis import (
    ContrastResult,
    Convention,
    EnvelopeFit,
    FringeFitter,
    contrast_curve,
    extract_contrast,
    fit_envelope_period,
)
from .cloud import (
    FringePattern,
    QuadratureReport,
    appendix_integral_closed,
    cloud_intensity_montecarlo,
    cloud_intensity_perp_closed,
    cloud_intensity_quadrature,
    default_theta_grid,
    fringe_pattern,
)
from .emitter import (
    EmitterDrive,
    G1Curve,
    SpectrumResult,
    g1_curve,
    g1_resonant,
    local_saturation,
    make_emitter_drive,
    mollow_spectrum,
    steady_population,
)
from .estimators import CloudFringeModel
from .exceptions import ConvergenceError, DomainError, FitError, MBSError, NumericalError
from .model import CloudSpec, DriveSpec, Geometry, make_geometry, tau_c
from .polarization import DriveField, JonesVector, overlap_factors, total_drive, waveplate_map
from .scatterer import (
    SingleAtomResult,
    contrast_single,
    contrast_single_parallel,
    contrast_single_perp,
    four_path_amplitudes,
    four_path_intensity,
    intensity_single,
)

__version__ = "0.1.0"
