from __future__ import annotations

import numpy as np
import pytest

from spdctherm.matching import (
    GvmCondition,
    PhaseMatchSpec,
    TypeIIAssignment,
    degenerate_poling_period,
    gvm1_wavelength,
    gvm2_wavelength,
    gvm3_residual,
    phase_matched_pair,
    phase_mismatch,
    scan_over_temperature,
    scan_phase_matching,
)
from spdctherm.dispersion import CrystalId, OpticalAxis
from spdctherm.rootfind import RootError, solve_all, solve_unique

from conftest import CRYSTALS


def _degenerate_spec(db, crystal, temp=20.0):
    deg = gvm1_wavelength(db, crystal, 20.0)
    period = degenerate_poling_period(db, crystal, deg.lambda_deg_nm, 20.0)
    return deg, PhaseMatchSpec(
        crystal=CrystalId(crystal),
        lambda_p_nm=deg.lambda_deg_nm / 2.0,
        poling_period_um=period,
        temperature_c=temp,
    )


# ---------------------------------------------------------------------------
# Root finder


def test_solve_unique_finds_cubic_root():
    assert solve_unique(lambda x: x**3 - 2.0, 1.0, 2.0, "cube") == pytest.approx(
        2.0 ** (1.0 / 3.0), abs=1e-6
    )


def test_solve_unique_errors_without_root():
    with pytest.raises(RootError, match="no root"):
        solve_unique(lambda x: x + 10.0, 1.0, 2.0, "shifted")


def test_solve_unique_errors_on_multiple_roots_listing_brackets():
    with pytest.raises(RootError, match="brackets"):
        solve_unique(lambda x: (x - 1.2) * (x - 1.7), 1.0, 2.0, "quadratic")


def test_solve_all_orders_roots():
    roots = solve_all(lambda x: (x - 1.2) * (x - 1.7), 1.0, 2.0)
    assert roots == pytest.approx([1.2, 1.7], abs=1e-6)


# ---------------------------------------------------------------------------
# GVM conditions


def test_gvm_residuals_vanish_at_solution(db):
    # bisection stops at 1e-4 nm in wavelength; with condition slopes below
    # ~1 (1/c)/um the residual at the returned root stays under 1e-7
    for crystal in CRYSTALS:
        for temp in (20.0, 120.0):
            assert abs(gvm1_wavelength(db, crystal, temp).residual) < 1e-7
            assert abs(gvm2_wavelength(db, crystal, temp, "idler").residual) < 1e-7


def test_gvm2_signal_branch_has_no_root_in_default_window(db):
    # Table 1's lambda_GVM2 belongs to the idler (z) branch; the signal
    # branch never crosses in the default search window for these crystals
    idl = gvm2_wavelength(db, "KTP", 20.0, "idler")
    assert idl.condition == GvmCondition.GVM2_IDLER
    with pytest.raises(RootError, match="no root"):
        gvm2_wavelength(db, "KTP", 20.0, "signal")


def test_gvm3_is_definitional_composition(db):
    model_y = db.model("KTP", "y")
    model_z = db.model("KTP", "z")
    lam = 1.5846
    expected = model_y.inverse_group_velocity(lam, 20.0) - model_z.inverse_group_velocity(lam, 20.0)
    assert gvm3_residual(db, "KTP", 1584.6, 20.0) == pytest.approx(expected, rel=1e-12)


def test_gvm3_degenerate_axes_is_zero(db):
    assignment = TypeIIAssignment(
        pump_axis=OpticalAxis.Y, signal_axis=OpticalAxis.Y, idler_axis=OpticalAxis.Z
    )
    # same model on both branches via explicit models
    y = db.model("KTP", "y")
    lam = 1.5
    assert y.inverse_group_velocity(lam, 20.0) - y.inverse_group_velocity(lam, 20.0) == 0.0
    assert gvm3_residual(db, "KTP", 1500.0, 20.0, assignment=assignment) != 0.0


def test_type_ii_assignment_validation():
    with pytest.raises(ValueError):
        TypeIIAssignment(pump_axis=OpticalAxis.Y, signal_axis=OpticalAxis.Z,
                         idler_axis=OpticalAxis.Z)


# ---------------------------------------------------------------------------
# Quasi-phase matching


def test_poling_period_positive_and_mismatch_closes(db):
    for crystal in CRYSTALS:
        deg, spec = _degenerate_spec(db, crystal)
        assert spec.poling_period_um > 0.0
        dk = phase_mismatch(db, spec, deg.lambda_deg_nm, deg.lambda_deg_nm)
        assert abs(dk) < 1e-9


def test_phase_match_spec_requires_finite_positive_period(db):
    with pytest.raises(ValueError):
        PhaseMatchSpec(crystal=CrystalId.KTP, lambda_p_nm=792.0,
                       poling_period_um=float("inf"), temperature_c=20.0)
    with pytest.raises(ValueError):
        PhaseMatchSpec(crystal=CrystalId.KTP, lambda_p_nm=792.0,
                       poling_period_um=-45.0, temperature_c=20.0)


def test_phase_matched_pair_degenerate_at_reference_temperature(db):
    for crystal in CRYSTALS:
        deg, spec = _degenerate_spec(db, crystal)
        pair = phase_matched_pair(db, spec)
        assert pair.lambda_signal_nm == pytest.approx(deg.lambda_deg_nm, abs=0.05)
        assert pair.lambda_idler_nm == pytest.approx(deg.lambda_deg_nm, abs=0.05)


def test_phase_matched_pair_energy_conservation(db):
    for crystal in CRYSTALS:
        _, spec = _degenerate_spec(db, crystal, temp=120.0)
        pair = phase_matched_pair(db, spec)
        closure = (1.0 / spec.lambda_p_nm - 1.0 / pair.lambda_signal_nm
                   - 1.0 / pair.lambda_idler_nm)
        assert abs(closure) < 1e-12
        assert abs(pair.mismatch) < 1e-9


def test_phase_matched_signal_is_y_branch_below_idler_when_split(db):
    _, spec = _degenerate_spec(db, "CTA", temp=120.0)
    pair = phase_matched_pair(db, spec)
    assert pair.lambda_signal_nm < pair.lambda_idler_nm


# ---------------------------------------------------------------------------
# Temperature scans


def test_gvm_scan_endpoints_match_single_solves(db):
    table = scan_over_temperature(db, "KTP", "gvm1", 20.0, 120.0, 5)
    assert table.temperatures_c[0] == 20.0 and table.temperatures_c[-1] == 120.0
    assert table.rows[0][0] == pytest.approx(
        gvm1_wavelength(db, "KTP", 20.0).lambda_deg_nm, abs=1e-9
    )
    assert table.rows[-1][0] == pytest.approx(
        gvm1_wavelength(db, "KTP", 120.0).lambda_deg_nm, abs=1e-9
    )


def test_pm_scan_symmetric_about_degeneracy_in_frequency(db):
    table = scan_phase_matching(db, "CTA", 20.0, 120.0, 11)
    deg = gvm1_wavelength(db, "CTA", 20.0).lambda_deg_nm
    for (lam_s, lam_i) in table.rows:
        assert 0.5 * (1.0 / lam_s + 1.0 / lam_i) == pytest.approx(1.0 / deg, rel=1e-12)


def test_pm_scan_row_at_reference_temperature_is_degenerate(db):
    table = scan_phase_matching(db, "RTA", 20.0, 120.0, 11)
    lam_s, lam_i = table.rows[0]
    assert lam_s == pytest.approx(lam_i, abs=0.05)


def test_scan_determinism(db):
    a = scan_over_temperature(db, "RTP", "gvm1", 20.0, 120.0, 7).to_csv()
    b = scan_over_temperature(db, "RTP", "gvm1", 20.0, 120.0, 7).to_csv()
    assert a == b


def test_scan_csv_format(db):
    table = scan_over_temperature(db, "KTP", "gvm1", 20.0, 30.0, 3)
    lines = table.to_csv().splitlines()
    assert lines[0] == "temperature_c,lambda_deg_nm"
    t_field, lam_field = lines[1].split(",")
    assert t_field == "20.000"
    assert len(lam_field.split(".")[1]) == 4


def test_scan_requires_increasing_temperatures(db):
    with pytest.raises(ValueError):
        scan_over_temperature(db, "KTP", "gvm1", 120.0, 20.0, 5)
    with pytest.raises(ValueError):
        scan_over_temperature(db, "KTP", "gvm1", 20.0, 120.0, 1)
