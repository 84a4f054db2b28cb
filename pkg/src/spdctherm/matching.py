"""Group-velocity matching and quasi-phase matching solvers.

All conditions are one-dimensional root-finding problems in the degenerate
(or signal) wavelength.  Wavelengths cross the public API in nm, poling
periods in um, temperatures in degC; internally everything runs in um.

Type-II collinear configuration: pump and signal polarized along the
crystal's y axis, idler along z, propagation along x.  The signal branch
of a phase-matched pair is always the y-polarized root, even when it falls
below the idler in wavelength at elevated temperature.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .constants import TWO_PI, nm_to_um, um_to_nm
from .dispersion import CoefficientDatabase, CrystalId, DispersionModel, OpticalAxis
from .rootfind import RootError, solve_unique

# Default search windows (um)
GVM1_WINDOW = (1.0, 2.3)
GVM2_WINDOW = (0.9, 1.8)
PM_WINDOW = (1.0, 2.3)

DEGENERACY_TOL_UM = 5e-5  # 0.05 nm: collapse near-degenerate pairs


@dataclass(frozen=True)
class TypeIIAssignment:
    """Polarization axes of the three fields (propagation along x)."""

    pump_axis: OpticalAxis = OpticalAxis.Y
    signal_axis: OpticalAxis = OpticalAxis.Y
    idler_axis: OpticalAxis = OpticalAxis.Z

    def __post_init__(self):
        if self.pump_axis != self.signal_axis or self.signal_axis == self.idler_axis:
            raise ValueError(
                "type-II assignment requires pump and signal on one axis and "
                "the idler on a different axis"
            )


class GvmCondition(str, enum.Enum):
    GVM1 = "gvm1"
    GVM2_SIGNAL = "gvm2_signal"
    GVM2_IDLER = "gvm2_idler"


@dataclass(frozen=True)
class GvmResult:
    """A solved group-velocity-matching point."""

    lambda_deg_nm: float
    residual: float  # condition residual in units of 1/c
    condition: GvmCondition


@dataclass(frozen=True)
class PhaseMatchSpec:
    """A fixed quasi-phase-matching configuration."""

    crystal: CrystalId
    lambda_p_nm: float
    poling_period_um: float
    temperature_c: float
    assignment: TypeIIAssignment = field(default_factory=TypeIIAssignment)
    source: str | None = None

    def __post_init__(self):
        if not (self.poling_period_um > 0.0 and np.isfinite(self.poling_period_um)):
            raise ValueError("poling period must be finite and positive")
        if self.lambda_p_nm <= 0.0:
            raise ValueError("pump wavelength must be positive")


@dataclass(frozen=True)
class PhaseMatchedPair:
    """Signal/idler solution of Delta-k = 0 at fixed pump and poling."""

    lambda_signal_nm: float
    lambda_idler_nm: float
    mismatch: float  # residual Delta-k, rad/um


@dataclass(frozen=True)
class ScanTable:
    """Tidy temperature-sweep results, one row per temperature."""

    crystal: CrystalId
    condition: str
    columns: tuple  # value column labels, excluding temperature_c
    temperatures_c: tuple
    rows: tuple  # tuple of value tuples, parallel to temperatures_c

    def to_csv(self) -> str:
        lines = ["temperature_c," + ",".join(self.columns)]
        for temp, row in zip(self.temperatures_c, self.rows):
            lines.append(f"{temp:.3f}," + ",".join(f"{v:.4f}" for v in row))
        return "\n".join(lines) + "\n"

    def column(self, label: str) -> np.ndarray:
        return np.array([row[self.columns.index(label)] for row in self.rows])


def _crystal(crystal) -> CrystalId:
    return crystal if isinstance(crystal, CrystalId) else CrystalId.parse(crystal)


def _models(
    db: CoefficientDatabase,
    crystal,
    assignment: TypeIIAssignment,
    source: str | None = None,
):
    sig = db.model(crystal, assignment.signal_axis, source)
    idl = db.model(crystal, assignment.idler_axis, source)
    pump = db.model(crystal, assignment.pump_axis, source)
    return pump, sig, idl


def _clip_window(window, pump: DispersionModel, sig: DispersionModel, idl: DispersionModel):
    """Shrink a search window so lam and lam/2 stay inside model validity."""
    lo = max(window[0], sig.lambda_range[0], idl.lambda_range[0], 2.0 * pump.lambda_range[0])
    hi = min(window[1], sig.lambda_range[1], idl.lambda_range[1], 2.0 * pump.lambda_range[1])
    if lo >= hi:
        raise RootError("search window empty after clipping to model validity ranges")
    return lo, hi


def gvm1_wavelength(
    db: CoefficientDatabase,
    crystal,
    temperature_c: float,
    window=GVM1_WINDOW,
    assignment: TypeIIAssignment = TypeIIAssignment(),
    source: str | None = None,
) -> GvmResult:
    """Degenerate wavelength where 2/V_g,p(lam/2) = 1/V_g,s(lam) + 1/V_g,i(lam)."""
    pump, sig, idl = _models(db, crystal, assignment, source)

    def residual(lam):
        return (
            2.0 * pump.inverse_group_velocity(lam / 2.0, temperature_c)
            - sig.inverse_group_velocity(lam, temperature_c)
            - idl.inverse_group_velocity(lam, temperature_c)
        )

    lo, hi = _clip_window(window, pump, sig, idl)
    root = solve_unique(residual, lo, hi, f"GVM1 {_crystal(crystal).value}")
    return GvmResult(um_to_nm(root), residual(root), GvmCondition.GVM1)


def gvm2_wavelength(
    db: CoefficientDatabase,
    crystal,
    temperature_c: float,
    matched: str = "signal",
    window=GVM2_WINDOW,
    assignment: TypeIIAssignment = TypeIIAssignment(),
    source: str | None = None,
) -> GvmResult:
    """Wavelength where 1/V_g,p(lam/2) equals 1/V_g of the matched photon."""
    if matched not in ("signal", "idler"):
        raise ValueError("matched must be 'signal' or 'idler'")
    pump, sig, idl = _models(db, crystal, assignment, source)
    target = sig if matched == "signal" else idl

    def residual(lam):
        return pump.inverse_group_velocity(lam / 2.0, temperature_c) - target.inverse_group_velocity(
            lam, temperature_c
        )

    lo, hi = _clip_window(window, pump, target, target)
    root = solve_unique(
        residual, lo, hi, f"GVM2({matched}) {_crystal(crystal).value}"
    )
    cond = GvmCondition.GVM2_SIGNAL if matched == "signal" else GvmCondition.GVM2_IDLER
    return GvmResult(um_to_nm(root), residual(root), cond)


def gvm3_residual(
    db: CoefficientDatabase,
    crystal,
    lambda_nm: float,
    temperature_c: float,
    assignment: TypeIIAssignment = TypeIIAssignment(),
    source: str | None = None,
) -> float:
    """Diagnostic residual 1/V_g,s(lam) - 1/V_g,i(lam) (units of 1/c).

    For type-II processes in these crystals this never crosses zero in the
    telecom window, so GVM3 has no solution; exposed for verification only.
    """
    _, sig, idl = _models(db, crystal, assignment, source)
    lam = nm_to_um(lambda_nm)
    return sig.inverse_group_velocity(lam, temperature_c) - idl.inverse_group_velocity(
        lam, temperature_c
    )


def phase_mismatch(
    db: CoefficientDatabase,
    spec: PhaseMatchSpec,
    lambda_s_nm: float,
    lambda_i_nm: float,
) -> float:
    """Delta-k = k_p - k_s - k_i + 2 pi / Lambda (rad/um) at spec.temperature_c."""
    pump, sig, idl = _models(db, spec.crystal, spec.assignment, spec.source)
    temp = spec.temperature_c
    return (
        pump.wave_number(nm_to_um(spec.lambda_p_nm), temp)
        - sig.wave_number(nm_to_um(lambda_s_nm), temp)
        - idl.wave_number(nm_to_um(lambda_i_nm), temp)
        + TWO_PI / spec.poling_period_um
    )


def degenerate_poling_period(
    db: CoefficientDatabase,
    crystal,
    lambda_deg_nm: float,
    temperature_c: float,
    assignment: TypeIIAssignment = TypeIIAssignment(),
    source: str | None = None,
) -> float:
    """First-order poling period (um) phase-matching the degenerate pair.

    From Delta-k = 0: Lambda = 2 pi / (k_s + k_i - k_p), which is positive
    for the type-II process in these crystals.
    """
    pump, sig, idl = _models(db, crystal, assignment, source)
    lam = nm_to_um(lambda_deg_nm)
    denom = (
        sig.wave_number(lam, temperature_c)
        + idl.wave_number(lam, temperature_c)
        - pump.wave_number(lam / 2.0, temperature_c)
    )
    if denom <= 0.0:
        raise RootError(
            f"poling denominator k_s + k_i - k_p = {denom:.6g} rad/um is not "
            "positive; first-order QPM impossible in this convention"
        )
    return TWO_PI / denom


def phase_matched_pair(db: CoefficientDatabase, spec: PhaseMatchSpec, window=PM_WINDOW) -> PhaseMatchedPair:
    """Solve Delta-k(lam_s) = 0 with lam_i eliminated by energy conservation.

    Returns the y-polarized (signal) root and its energy-conservation
    partner; pairs closer than 0.05 nm collapse to the exact degenerate
    point 2 lam_p.
    """
    pump, sig, idl = _models(db, spec.crystal, spec.assignment, spec.source)
    lam_p = nm_to_um(spec.lambda_p_nm)
    temp = spec.temperature_c

    def partner(lam_s):
        return 1.0 / (1.0 / lam_p - 1.0 / lam_s)

    # Keep both the signal root and its partner inside model validity.
    lo, hi = window
    lo = max(lo, sig.lambda_range[0], lam_p * 1.0000001)
    hi = min(hi, sig.lambda_range[1])
    i_lo, i_hi = idl.lambda_range
    # lam_i decreases as lam_s increases: invert the partner map for bounds.
    lo = max(lo, 1.0 / (1.0 / lam_p - 1.0 / i_hi)) if i_hi < float("inf") else lo
    if 1.0 / lam_p > 1.0 / i_lo:
        hi = min(hi, 1.0 / (1.0 / lam_p - 1.0 / i_lo))
    if lo >= hi:
        raise RootError("phase-matching window empty after clipping to validity ranges")

    k_p = pump.wave_number(lam_p, temp)
    grating = TWO_PI / spec.poling_period_um

    def residual(lam_s):
        return k_p - sig.wave_number(lam_s, temp) - idl.wave_number(partner(lam_s), temp) + grating

    # tighter tolerance than the GVM solves so |Delta-k| closes below 1e-9
    root = solve_unique(residual, lo, hi, f"phase matching {spec.crystal.value}", tol=1e-10)
    lam_s, lam_i = root, partner(root)
    if abs(lam_s - lam_i) < DEGENERACY_TOL_UM:
        lam_s = lam_i = 2.0 * lam_p
    return PhaseMatchedPair(um_to_nm(lam_s), um_to_nm(lam_i), residual(root))


def _temperature_axis(t_lo: float, t_hi: float, steps: int) -> np.ndarray:
    if steps < 2:
        raise ValueError("temperature scan needs at least 2 steps")
    if not t_lo < t_hi:
        raise ValueError("temperature scan requires t_lo < t_hi")
    return np.linspace(t_lo, t_hi, steps)


def scan_over_temperature(
    db: CoefficientDatabase,
    crystal,
    condition,
    t_lo: float,
    t_hi: float,
    steps: int,
    source: str | None = None,
) -> ScanTable:
    """Sweep a GVM condition over temperature; one solved row per step."""
    cond = GvmCondition(condition) if not isinstance(condition, GvmCondition) else condition
    crystal = _crystal(crystal)
    temps = _temperature_axis(t_lo, t_hi, steps)
    rows = []
    for temp in temps:
        try:
            if cond == GvmCondition.GVM1:
                res = gvm1_wavelength(db, crystal, float(temp), source=source)
            else:
                matched = "signal" if cond == GvmCondition.GVM2_SIGNAL else "idler"
                res = gvm2_wavelength(db, crystal, float(temp), matched, source=source)
        except RootError as exc:
            raise RootError(f"scan failed at T = {temp:.3f} C: {exc}") from None
        rows.append((res.lambda_deg_nm,))
    return ScanTable(
        crystal=crystal,
        condition=cond.value,
        columns=("lambda_deg_nm",),
        temperatures_c=tuple(float(t) for t in temps),
        rows=tuple(rows),
    )


def scan_phase_matching(
    db: CoefficientDatabase,
    crystal,
    t_lo: float,
    t_hi: float,
    steps: int,
    reference_temperature_c: float = 20.0,
    source: str | None = None,
) -> ScanTable:
    """Sweep the phase-matched pair over temperature.

    The pump wavelength and poling period are frozen at the degenerate
    GVM1 configuration of ``reference_temperature_c``; only the crystal
    temperature varies.
    """
    crystal = _crystal(crystal)
    temps = _temperature_axis(t_lo, t_hi, steps)
    deg = gvm1_wavelength(db, crystal, reference_temperature_c, source=source)
    period = degenerate_poling_period(
        db, crystal, deg.lambda_deg_nm, reference_temperature_c, source=source
    )
    rows = []
    for temp in temps:
        spec = PhaseMatchSpec(
            crystal=crystal,
            lambda_p_nm=deg.lambda_deg_nm / 2.0,
            poling_period_um=period,
            temperature_c=float(temp),
            source=source,
        )
        try:
            pair = phase_matched_pair(db, spec)
        except RootError as exc:
            raise RootError(f"scan failed at T = {temp:.3f} C: {exc}") from None
        rows.append((pair.lambda_signal_nm, pair.lambda_idler_nm))
    return ScanTable(
        crystal=crystal,
        condition="phase_matching",
        columns=("lambda_signal_nm", "lambda_idler_nm"),
        temperatures_c=tuple(float(t) for t in temps),
        rows=tuple(rows),
    )
