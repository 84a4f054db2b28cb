"""Joint spectral amplitude construction and Schmidt-purity analysis.

The biphoton amplitude is the pointwise product of a Gaussian pump
envelope alpha(omega_s + omega_i) and the phase-matching amplitude
sinc(Delta-k L / 2), discretized on a uniform angular-frequency grid and
L2-normalized.  Heralded-photon spectral purity follows from the singular
values of the discretized amplitude matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .constants import (
    C_UM_PER_S,
    TWO_PI,
    lambda_um_from_omega,
    nm_to_um,
    omega_from_lambda_um,
    um_to_nm,
)
from .dispersion import CoefficientDatabase, CrystalId
from .matching import TypeIIAssignment

DEFAULT_GRID_POINTS = 512
BOUNDARY_CLIP_FRACTION = 0.01
_MAX_SPAN_DOUBLINGS = 14


def sigma_from_fwhm(lambda_p_nm: float, fwhm_nm: float) -> float:
    """Amplitude bandwidth sigma_p (rad/s) from an intensity FWHM in nm.

    Delta-omega_FWHM = 2 pi c fwhm / lambda_p^2, then
    sigma_p = Delta-omega_FWHM / sqrt(2 ln 2) so that the intensity
    |alpha|^2 reaches one half at detuning Delta-omega_FWHM / 2.
    """
    if fwhm_nm <= 0.0:
        raise ValueError("pump fwhm must be positive")
    lam = nm_to_um(lambda_p_nm)
    d_omega = TWO_PI * C_UM_PER_S * nm_to_um(fwhm_nm) / lam**2
    return d_omega / math.sqrt(2.0 * math.log(2.0))


@dataclass(frozen=True)
class PumpSpec:
    """Gaussian pump: central wavelength and intensity FWHM, both in nm."""

    lambda_p_nm: float
    fwhm_nm: float

    def __post_init__(self):
        if self.lambda_p_nm <= 0.0:
            raise ValueError("pump wavelength must be positive")
        if self.fwhm_nm <= 0.0:
            raise ValueError("pump fwhm must be positive")

    @property
    def omega_p(self) -> float:
        return omega_from_lambda_um(nm_to_um(self.lambda_p_nm))

    @property
    def sigma_p(self) -> float:
        return sigma_from_fwhm(self.lambda_p_nm, self.fwhm_nm)


@dataclass(frozen=True)
class CrystalGeometry:
    """Poled-crystal parameters relevant to phase matching."""

    length_mm: float
    poling_period_um: float
    temperature_c: float

    def __post_init__(self):
        if self.length_mm <= 0.0:
            raise ValueError("crystal length must be positive")
        if self.poling_period_um <= 0.0:
            raise ValueError("poling period must be positive")

    @property
    def length_um(self) -> float:
        return self.length_mm * 1e3


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform angular-frequency axes for signal and idler (rad/s)."""

    omega_s: np.ndarray
    omega_i: np.ndarray

    def __post_init__(self):
        for name, axis in (("omega_s", self.omega_s), ("omega_i", self.omega_i)):
            axis = np.asarray(axis, dtype=float)
            if axis.ndim != 1 or axis.size < 16:
                raise ValueError(f"{name} must be a 1-D axis with at least 16 points")
            steps = np.diff(axis)
            if np.any(steps <= 0.0):
                raise ValueError(f"{name} must be strictly increasing")
            if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
                raise ValueError(f"{name} must be uniformly spaced")
        object.__setattr__(self, "omega_s", np.asarray(self.omega_s, dtype=float))
        object.__setattr__(self, "omega_i", np.asarray(self.omega_i, dtype=float))

    @property
    def n_s(self) -> int:
        return self.omega_s.size

    @property
    def n_i(self) -> int:
        return self.omega_i.size

    @property
    def d_omega_s(self) -> float:
        return float(self.omega_s[1] - self.omega_s[0])

    @property
    def d_omega_i(self) -> float:
        return float(self.omega_i[1] - self.omega_i[0])

    @property
    def lambda_s_nm(self) -> np.ndarray:
        return um_to_nm(lambda_um_from_omega(self.omega_s))

    @property
    def lambda_i_nm(self) -> np.ndarray:
        return um_to_nm(lambda_um_from_omega(self.omega_i))

    @staticmethod
    def centered(omega_0: float, half_width: float, n: int) -> "SpectralGrid":
        """Square grid with both axes spanning omega_0 +/- half_width."""
        axis = np.linspace(omega_0 - half_width, omega_0 + half_width, n)
        return SpectralGrid(omega_s=axis, omega_i=axis.copy())

    @property
    def is_square(self) -> bool:
        return self.n_s == self.n_i and bool(np.array_equal(self.omega_s, self.omega_i))


@dataclass(frozen=True)
class JointSpectralAmplitude:
    """Discretized f(omega_s, omega_i) with its grid and provenance."""

    grid: SpectralGrid
    values: np.ndarray  # n_s x n_i, complex
    normalized: bool
    metadata: dict = field(default_factory=dict)

    def norm_sq(self) -> float:
        return float(
            np.sum(np.abs(self.values) ** 2) * self.grid.d_omega_s * self.grid.d_omega_i
        )

    def to_csv(self) -> str:
        """`#`-commented provenance header followed by the |f|^2 matrix."""
        lines = []
        for key in sorted(self.metadata):
            lines.append(f"# {key} = {self.metadata[key]}")
        lam_s = self.grid.lambda_s_nm
        lam_i = self.grid.lambda_i_nm
        lines.append(
            f"# lambda_s_nm_range = [{lam_s.min():.4f}, {lam_s.max():.4f}]"
        )
        lines.append(
            f"# lambda_i_nm_range = [{lam_i.min():.4f}, {lam_i.max():.4f}]"
        )
        lines.append(f"# rows = omega_s ({self.grid.n_s}), cols = omega_i ({self.grid.n_i})")
        intensity = np.abs(self.values) ** 2
        for row in intensity:
            lines.append(",".join(f"{v:.9e}" for v in row))
        return "\n".join(lines) + "\n"


def pump_envelope(omega_s, omega_i, pump: PumpSpec):
    """Eq.-(8)-style Gaussian alpha(omega_s + omega_i), in (0, 1]."""
    detuning = np.asarray(omega_s) + np.asarray(omega_i) - pump.omega_p
    return np.exp(-((detuning / pump.sigma_p) ** 2))


def pm_amplitude(
    db: CoefficientDatabase,
    omega_s,
    omega_i,
    geometry: CrystalGeometry,
    crystal,
    assignment: TypeIIAssignment = TypeIIAssignment(),
    source: str | None = None,
):
    """Phase-matching amplitude sinc(Delta-k L / 2) on given frequencies.

    Delta-k uses k_p at omega_s + omega_i (energy conservation), the
    type-II axis assignment, and the geometry's grating term 2 pi / Lambda.
    """
    sig = db.model(crystal, assignment.signal_axis, source)
    idl = db.model(crystal, assignment.idler_axis, source)
    pump = db.model(crystal, assignment.pump_axis, source)
    temp = geometry.temperature_c

    omega_s = np.asarray(omega_s, dtype=float)
    omega_i = np.asarray(omega_i, dtype=float)
    lam_s = lambda_um_from_omega(omega_s)
    lam_i = lambda_um_from_omega(omega_i)
    lam_p = lambda_um_from_omega(omega_s + omega_i)

    dk = (
        pump.wave_number(lam_p, temp)
        - sig.wave_number(lam_s, temp)
        - idl.wave_number(lam_i, temp)
        + TWO_PI / geometry.poling_period_um
    )
    x = dk * geometry.length_um / 2.0
    return np.sinc(x / np.pi)


def _fill(db, crystal, geometry, pump, grid, assignment, source):
    ws = grid.omega_s[:, None]
    wi = grid.omega_i[None, :]
    return pm_amplitude(db, ws, wi, geometry, crystal, assignment, source) * pump_envelope(
        ws, wi, pump
    )


def _boundary_fraction(values: np.ndarray) -> float:
    peak = np.abs(values).max()
    if peak == 0.0:
        return 0.0
    edge = max(
        np.abs(values[0, :]).max(),
        np.abs(values[-1, :]).max(),
        np.abs(values[:, 0]).max(),
        np.abs(values[:, -1]).max(),
    )
    return float(edge / peak)


def compute_jsa(
    db: CoefficientDatabase,
    crystal,
    geometry: CrystalGeometry,
    pump: PumpSpec,
    grid: SpectralGrid | None = None,
    assignment: TypeIIAssignment = TypeIIAssignment(),
    source: str | None = None,
) -> JointSpectralAmplitude:
    """Pump envelope x phase-matching amplitude, L2-normalized on the grid.

    With no grid given, a square 512x512 window centered on the degenerate
    frequency omega_p / 2 is auto-sized: starting at +/- 4 sigma_p per
    axis, the half-width doubles until every boundary |f| falls below 1%
    of the peak.  An explicitly supplied grid that clips more than 1% is
    rejected.
    """
    crystal = crystal if isinstance(crystal, CrystalId) else CrystalId.parse(crystal)
    if grid is None:
        half_width = 4.0 * pump.sigma_p
        for _ in range(_MAX_SPAN_DOUBLINGS):
            candidate = SpectralGrid.centered(pump.omega_p / 2.0, half_width, DEFAULT_GRID_POINTS)
            values = _fill(db, crystal, geometry, pump, candidate, assignment, source)
            if _boundary_fraction(values) < BOUNDARY_CLIP_FRACTION:
                grid = candidate
                break
            half_width *= 2.0
        else:
            raise ValueError(
                "could not find a grid span with boundary |f| below "
                f"{BOUNDARY_CLIP_FRACTION:.0%} of peak after {_MAX_SPAN_DOUBLINGS} doublings"
            )
    else:
        values = _fill(db, crystal, geometry, pump, grid, assignment, source)
        frac = _boundary_fraction(values)
        if frac >= BOUNDARY_CLIP_FRACTION:
            raise ValueError(
                f"grid clips the amplitude: boundary |f| is {frac:.1%} of peak "
                f"(limit {BOUNDARY_CLIP_FRACTION:.0%}); enlarge the grid span"
            )

    norm = math.sqrt(float(np.sum(np.abs(values) ** 2)) * grid.d_omega_s * grid.d_omega_i)
    if norm == 0.0:
        raise ValueError("joint spectral amplitude is identically zero on the grid")
    values = np.asarray(values, dtype=complex) / norm

    metadata = {
        "crystal": crystal.value,
        "temperature_c": geometry.temperature_c,
        "poling_period_um": geometry.poling_period_um,
        "length_mm": geometry.length_mm,
        "lambda_p_nm": pump.lambda_p_nm,
        "pump_fwhm_nm": pump.fwhm_nm,
        "sigma_p_rad_s": pump.sigma_p,
        "n_s": grid.n_s,
        "n_i": grid.n_i,
    }
    if source is not None:
        metadata["source"] = source
    return JointSpectralAmplitude(grid=grid, values=values, normalized=True, metadata=metadata)


def schmidt_purity(jsa: JointSpectralAmplitude) -> float:
    """Purity sum(s^4) / (sum(s^2))^2 over singular values of the JSA matrix.

    Invariant under global phase and uniform rescaling; requires a
    normalized JSA so the Schmidt weights are well defined.
    """
    if not jsa.normalized:
        raise ValueError("schmidt_purity requires a normalized JSA")
    s = np.linalg.svd(jsa.values, compute_uv=False)
    s_sq = s**2
    total = s_sq.sum()
    return float((s_sq**2).sum() / total**2)
