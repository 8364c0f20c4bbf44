"""Steklov spectra of product annuli around an excised submanifold.

Separation of variables reduces the mixed Steklov problem on
``N x [eps, delta] x S^{d-1}`` to one radial ODE per pair of base and
cross-section eigenvalues; its Bessel/power/log solutions give sigma in
closed form and an RK4 integrator provides an independent reference.
"""

from .assembler import (
    BracketReport,
    Cluster,
    EigenvalueEntry,
    SpectrumTable,
    assemble,
    bracketing_audit,
    certified_bracketing,
    clusters,
    quasi_isometry_interval,
    torus_slit_spectrum,
)
from .asymptotics import (
    FitReport,
    GapResult,
    PointRecord,
    SweepRecord,
    boundary_volume,
    fit_limit,
    gap_slope,
    normalized_gap,
    point_annulus_formulas,
    point_excision_check,
    sweep_mode,
)
from .config import ConfigError, parse_config
from .errors import (
    AuditError,
    CodimensionError,
    DomainError,
    FitError,
    InconsistencyError,
    IntegrationError,
    ModeSingularError,
    SteklovError,
    TruncationError,
)
from .oracle import IntegratorConfig, OracleSigma, integrate_radial, oracle_sigma
from .radial import (
    ModeData,
    ProblemSpec,
    RadialSolution,
    closed_form_sigma,
    enumerate_modes,
    mode_data,
    radial_basis,
    steklov_asymptotic,
    steklov_value,
)
from .special import BesselQuartet, ScaledValue, bessel_iv, bessel_kv, bessel_quartet, log_gamma
from .spectra import (
    BaseManifold,
    SpectralLine,
    base_spectrum,
    cross_section_spectrum,
    harmonic_dimension,
    load_custom_spectrum,
    sphere_area,
)

__version__ = "0.1.0"
