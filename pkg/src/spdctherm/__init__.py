"""Temperature-dependent type-II SPDC modelling for KTP-family crystals.

Dispersion database, group-velocity-matching and quasi-phase-matching
solvers, joint spectral amplitudes, Schmidt purity and Hong-Ou-Mandel
interference traces.
"""

__version__ = "0.1.0"

from .dispersion import (
    CoefficientDatabase,
    DispersionModel,
    DispersionError,
    ParseError,
    RangeError,
    load_database,
    default_database_path,
)
from .matching import (
    TypeIIAssignment,
    GvmResult,
    PhaseMatchSpec,
    PhaseMatchedPair,
    ScanTable,
    gvm1_wavelength,
    gvm2_wavelength,
    gvm3_residual,
    phase_mismatch,
    degenerate_poling_period,
    phase_matched_pair,
    scan_over_temperature,
    scan_phase_matching,
)
from .biphoton import (
    PumpSpec,
    SpectralGrid,
    JointSpectralAmplitude,
    CrystalGeometry,
    sigma_from_fwhm,
    pump_envelope,
    pm_amplitude,
    compute_jsa,
    schmidt_purity,
)
from .interference import HomTrace, hom_probability, hom_trace, visibility, count_dips
