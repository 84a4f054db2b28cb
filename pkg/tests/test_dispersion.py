from __future__ import annotations

import json
import math

import numpy as np
import pytest

from spdctherm.dispersion import (
    CrystalId,
    OpticalAxis,
    ParseError,
    RangeError,
    SellmeierForm,
    ThermoOpticModel,
    default_database_path,
    load_database,
    parse_database,
    serialize_database,
)

from conftest import CRYSTALS


# ---------------------------------------------------------------------------
# Sellmeier forms


def test_single_pole_fixture_matches_hand_derivation():
    # n^2 = A + B/(lam^2 - C): at lam = 1, n^2 = 4 + 1/(1 - 0.25) = 16/3
    # d(n^2)/dlam = -2 lam B/(lam^2 - C)^2 = -2/(0.75^2) = -32/9
    form = SellmeierForm("pole", (4.0, 1.0, 0.25, 0.0, 0.0, 0.0))
    assert form.n_sq(1.0) == pytest.approx(16.0 / 3.0, abs=1e-15)
    assert form.dn_sq_dlambda(1.0) == pytest.approx(-32.0 / 9.0, abs=1e-12)


def test_single_ratio_fixture_matches_hand_derivation():
    # n^2 = A + B/(1 - C/lam^2): at lam = 2, n^2 = 4 + 1/(1 - 0.0625) = 4 + 16/15
    # d(n^2)/dlam = -2 B C / (lam^3 (1 - C/lam^2)^2) = -0.5/(8 * (15/16)^2)
    form = SellmeierForm("ratio", (4.0, 1.0, 0.25, 0.0, 0.0, 0.0))
    assert form.n_sq(2.0) == pytest.approx(4.0 + 16.0 / 15.0, abs=1e-15)
    expected = -2.0 * 0.25 / (8.0 * (15.0 / 16.0) ** 2)
    assert form.dn_sq_dlambda(2.0) == pytest.approx(expected, abs=1e-12)


def test_analytic_derivative_matches_finite_difference_all_models(db):
    h = 1e-7
    for model in db:
        lo, hi = model.lambda_range
        lams = np.linspace(lo + 10 * h, hi - 10 * h, 100)
        for temp in (20.0, 120.0):
            analytic = model.dn_dlambda(lams, temp)
            fd = (model.refractive_index(lams + h, temp)
                  - model.refractive_index(lams - h, temp)) / (2 * h)
            assert np.max(np.abs(analytic - fd) / np.abs(fd)) < 1e-6


def test_group_index_against_dk_domega_oracle(db):
    # n_g = c dk/domega; evaluate dk/domega by finite difference in omega.
    from spdctherm.constants import C_UM_PER_S, TWO_PI

    model = db.model("KTP", "z")
    for lam in (0.79, 1.22, 1.58):
        omega = TWO_PI * C_UM_PER_S / lam
        d_omega = omega * 1e-7
        k = lambda w: model.wave_number(TWO_PI * C_UM_PER_S / w, 20.0)
        dk = (k(omega + d_omega) - k(omega - d_omega)) / (2 * d_omega)
        assert model.inverse_group_velocity(lam, 20.0) == pytest.approx(
            C_UM_PER_S * dk, rel=1e-8
        )


def test_thermo_correction_vanishes_at_reference_temperature():
    thermo = ThermoOpticModel(t0=25.0, order1=(1e-5, 2e-5, 0, 0), order2=(1e-8, 0, 0, 0))
    assert thermo.delta_n(1.5, 25.0) == 0.0
    # and is quadratic-plus-linear away from it
    expected = (1e-5 + 2e-5 / 1.5) * 10 + 1e-8 * 100
    assert thermo.delta_n(1.5, 35.0) == pytest.approx(expected, rel=1e-12)


# ---------------------------------------------------------------------------
# Range enforcement


def test_wavelength_out_of_range_is_hard_error(db):
    model = db.model("KTP", "y")
    with pytest.raises(RangeError):
        model.refractive_index(0.2, 20.0)
    with pytest.raises(RangeError):
        model.refractive_index(5.0, 20.0)


def test_temperature_out_of_range_is_hard_error(db):
    model = db.model("KTP", "y")
    with pytest.raises(RangeError):
        model.refractive_index(1.5, 500.0)


# ---------------------------------------------------------------------------
# Database parsing


def _base_doc():
    return json.loads(default_database_path().read_text(encoding="utf-8"))


def test_bundled_database_loads_with_all_defaults(db):
    for crystal in CRYSTALS:
        for axis in ("y", "z"):
            model = db.model(crystal, axis)
            assert model.default
            assert model.crystal == CrystalId(crystal)
            assert model.axis == OpticalAxis(axis)


def test_serialize_round_trips_bit_for_bit(db):
    text = serialize_database(db)
    again = serialize_database(parse_database(text))
    assert text == again


def test_unknown_top_level_key_rejected():
    doc = _base_doc()
    doc["extra"] = 1
    with pytest.raises(ParseError, match="unknown top-level"):
        parse_database(json.dumps(doc))


def test_unknown_model_key_rejected():
    doc = _base_doc()
    doc["models"][0]["surprise"] = 1
    with pytest.raises(ParseError, match="unknown keys"):
        parse_database(json.dumps(doc))


def test_wrong_schema_version_rejected():
    doc = _base_doc()
    doc["schema_version"] = 2
    with pytest.raises(ParseError, match="schema_version"):
        parse_database(json.dumps(doc))


def test_duplicate_model_key_rejected():
    doc = _base_doc()
    doc["models"].append(dict(doc["models"][0]))
    with pytest.raises(ParseError, match="duplicate"):
        parse_database(json.dumps(doc))


def test_missing_default_rejected():
    doc = _base_doc()
    doc["models"] = [m for m in doc["models"]
                     if not (m["crystal"] == "RTP" and m["axis"] == "z")]
    with pytest.raises(ParseError, match="exactly one default"):
        parse_database(json.dumps(doc))


def test_pole_inside_validity_range_rejected():
    doc = _base_doc()
    model = next(m for m in doc["models"] if m["form"] == "pole")
    model["lambda_range_um"] = [0.1, 3.5]  # UV pole now inside
    with pytest.raises(ParseError, match="pole"):
        parse_database(json.dumps(doc))


def test_malformed_json_rejected():
    with pytest.raises(ParseError, match="invalid JSON"):
        parse_database("{not json")


def test_source_substring_lookup(db):
    model = db.model("CTA", "y", "Cheng")
    assert not model.default
    assert "Cheng" in model.source
    with pytest.raises(ParseError, match="no model"):
        db.model("CTA", "y", "nonexistent-source")


def test_missing_file_is_parse_error(tmp_path):
    with pytest.raises(ParseError, match="cannot read"):
        load_database(tmp_path / "absent.json")


def test_refractive_index_plausible_magnitudes(db):
    # all five crystals have 1.7 < n < 2.1 in the telecom window
    for crystal in CRYSTALS:
        for axis in ("y", "z"):
            n = db.model(crystal, axis).refractive_index(1.55, 20.0)
            assert 1.6 < n < 2.2


def test_z_axis_exceeds_y_axis_index(db):
    # positive birefringence n_z > n_y across the family
    for crystal in CRYSTALS:
        ny = db.model(crystal, "y").refractive_index(1.55, 20.0)
        nz = db.model(crystal, "z").refractive_index(1.55, 20.0)
        assert nz > ny
