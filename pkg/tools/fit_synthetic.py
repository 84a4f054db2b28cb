#!/usr/bin/env python3
"""Generate src/spdctherm/data/coefficients.json.

KTP, one KTP thermo variant, KTA and one CTA model are literature
transcriptions.  The remaining crystals (RTP, RTA, default CTA) ship
synthetic dispersion models: a template Sellmeier curve from the same
crystal family with a few coefficients re-solved so the model reproduces
the published 20 degC phase-matching observables (GVM wavelengths, poling
period) and their published 20->120 degC shifts.  Their `source` strings
say exactly that.

Run from the repository root:  python3 tools/fit_synthetic.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from spdctherm.dispersion import (  # noqa: E402
    CoefficientDatabase,
    parse_database,
    serialize_database,
)
from spdctherm.matching import (  # noqa: E402
    degenerate_poling_period,
    gvm1_wavelength,
    gvm2_wavelength,
    phase_matched_pair,
    PhaseMatchSpec,
)

OUT_PATH = Path(__file__).resolve().parent.parent / "src" / "spdctherm" / "data" / "coefficients.json"

SYNTH_SOURCE = (
    "synthetic dispersion model: {base} template with coefficients re-solved "
    "against published type-II phase-matching observables (original "
    "coefficient sources unavailable)"
)

# ---------------------------------------------------------------------------
# Literature transcriptions


def model_dict(crystal, axis, form, coeffs, t0, th1, th2, lam_range, temp_range, source, default):
    return {
        "crystal": crystal,
        "axis": axis,
        "form": form,
        "coeffs": list(coeffs),
        "t0_celsius": t0,
        "thermo_order1": list(th1),
        "thermo_order2": list(th2),
        "lambda_range_um": list(lam_range),
        "temp_range_c": list(temp_range),
        "source": source,
        "default": default,
    }


KATO_SOURCE = "K. Kato and E. Takaoka, Appl. Opt. 41, 5040 (2002)"
KATO_EMANUELI_SOURCE = (
    "Sellmeier: K. Kato and E. Takaoka, Appl. Opt. 41, 5040 (2002); "
    "thermo-optic: S. Emanueli and A. Arie, Appl. Opt. 42, 6661 (2003)"
)
FENIMORE_SOURCE = (
    "D. L. Fenimore et al., OSA ASSL (1995) Sellmeier; thermo-optic: "
    "S. Emanueli and A. Arie, Appl. Opt. 42, 6661 (2003) [transcription unverified]"
)
CHENG_SOURCE = "L. K. Cheng, L. T. Cheng, and J. D. Bierlein, Appl. Phys. Lett. 63, 2618 (1993)"

KTP_Y_COEFFS = [3.45018, 0.04341, 0.04597, 16.98825, 39.43799, 0.0]
KTP_Z_COEFFS = [4.59423, 0.06206, 0.04763, 110.80672, 86.12171, 0.0]
KTP_Y_TH1 = [0.5425e-5, 0.5154e-5, -0.4063e-5, 0.1997e-5]
KTP_Z_TH1 = [-0.1897e-5, 3.6677e-5, -2.9220e-5, 0.9221e-5]

EM_Y1 = [6.2897e-6, 6.3061e-6, -6.0629e-6, 2.6486e-6]
EM_Y2 = [-0.14445e-8, 2.2244e-8, -3.5770e-8, 1.3470e-8]
EM_Z1 = [9.9587e-6, 9.9228e-6, -8.9603e-6, 4.1010e-6]
EM_Z2 = [-1.1882e-8, 10.459e-8, -9.8136e-8, 3.1481e-8]

KTA_Y_COEFFS = [2.15912, 1.00099, 0.21844**2, 0.0, 0.0, 0.01096]
KTA_Z_COEFFS = [2.14768, 1.29559, 0.22719**2, 0.0, 0.0, 0.01436]
KTA_Y_TH1 = [-12.101e-6, 56.912e-6, -50.616e-6, 15.739e-6]
KTA_Z_TH1 = [-6.1537e-6, 64.505e-6, -56.447e-6, 17.169e-6]

CTA_CHENG_Y = [2.74440, 0.70733, 0.26033**2, 0.0, 0.0, 0.01526]
CTA_CHENG_Z = [2.53666, 1.10600, 0.24988**2, 0.0, 0.0, 0.01711]

KTP_RANGE = [0.43, 3.5]
KTA_RANGE = [0.40, 3.5]
CTA_RANGE = [0.40, 3.5]
TEMP_RANGE = [-20.0, 200.0]

LITERATURE_MODELS = [
    model_dict("KTP", "y", "pole", KTP_Y_COEFFS, 20.0, KTP_Y_TH1, [0, 0, 0, 0], KTP_RANGE, TEMP_RANGE, KATO_SOURCE, True),
    model_dict("KTP", "z", "pole", KTP_Z_COEFFS, 20.0, KTP_Z_TH1, [0, 0, 0, 0], KTP_RANGE, TEMP_RANGE, KATO_SOURCE, True),
    model_dict("KTP", "y", "pole", KTP_Y_COEFFS, 25.0, EM_Y1, EM_Y2, KTP_RANGE, TEMP_RANGE, KATO_EMANUELI_SOURCE, False),
    model_dict("KTP", "z", "pole", KTP_Z_COEFFS, 25.0, EM_Z1, EM_Z2, KTP_RANGE, TEMP_RANGE, KATO_EMANUELI_SOURCE, False),
    model_dict("KTA", "y", "ratio", KTA_Y_COEFFS, 25.0, KTA_Y_TH1, [0, 0, 0, 0], KTA_RANGE, TEMP_RANGE, FENIMORE_SOURCE, True),
    model_dict("KTA", "z", "ratio", KTA_Z_COEFFS, 25.0, KTA_Z_TH1, [0, 0, 0, 0], KTA_RANGE, TEMP_RANGE, FENIMORE_SOURCE, True),
    model_dict("CTA", "y", "ratio", CTA_CHENG_Y, 20.0, [0, 0, 0, 0], [0, 0, 0, 0], CTA_RANGE, TEMP_RANGE, CHENG_SOURCE, False),
    model_dict("CTA", "z", "ratio", CTA_CHENG_Z, 20.0, [0, 0, 0, 0], [0, 0, 0, 0], CTA_RANGE, TEMP_RANGE, CHENG_SOURCE, False),
]

# ---------------------------------------------------------------------------
# Calibration targets (20 degC observables and 20->120 degC shifts)

TARGETS = {
    # crystal: (gvm1_nm, gvm2_idler_nm, poling_um or None,
    #           d_gvm1_nm, d_gvm2_nm, d_pm_nm)
    "RTP": (1643.2, 1282.0, None, 1.2, -2.4, -0.4),
    "RTA": (1786.6, 1379.7, 73.3, 25.6, 22.4, 29.1),
    "CTA": (1972.5, 1577.2, 248.4, 6.3, 5.4, 59.5),
}

TEMPLATES = {
    "RTP": ("pole", KTP_Y_COEFFS, KTP_Z_COEFFS, KTP_RANGE, "KTP"),
    "RTA": ("ratio", KTA_Y_COEFFS, KTA_Z_COEFFS, KTA_RANGE, "KTA"),
    "CTA": ("ratio", CTA_CHENG_Y, CTA_CHENG_Z, CTA_RANGE, "CTA"),
}


# Second-order thermo term for the synthetic CTA z axis.  The linear
# coefficients are pinned by the published 20->120 degC shifts; this value
# sets the low-Delta-T splitting rate and is calibrated against the
# published HOM observables (visibilities and dip counts 1/2/3/6 at
# 20/22/25/30 degC for a 30 mm crystal with a 0.87 nm pump).
CTA_Z_ORDER2 = [5.0e-8, 0.0, 0.0, 0.0]

ORDER2 = {"CTA": ([0, 0, 0, 0], CTA_Z_ORDER2)}


def build_db(crystal, form, cy, cz, lam_range, th_y=None, th_z=None):
    o2_y, o2_z = ORDER2.get(crystal, ([0, 0, 0, 0], [0, 0, 0, 0]))
    models = [
        model_dict(crystal, "y", form, cy, 20.0, th_y or [0, 0, 0, 0], o2_y, lam_range, TEMP_RANGE, "fit", True),
        model_dict(crystal, "z", form, cz, 20.0, th_z or [0, 0, 0, 0], o2_z, lam_range, TEMP_RANGE, "fit", True),
    ]
    from spdctherm.dispersion import _parse_model

    parsed = {}
    for i, m in enumerate(models):
        model = _parse_model(m, i)
        parsed[(model.crystal, model.axis, model.source)] = model
    return CoefficientDatabase(parsed)


def static_observables(db, crystal):
    g1 = gvm1_wavelength(db, crystal, 20.0).lambda_deg_nm
    g2 = gvm2_wavelength(db, crystal, 20.0, "idler").lambda_deg_nm
    period = degenerate_poling_period(db, crystal, g1, 20.0)
    return g1, g2, period


def shift_observables(db, crystal):
    g1_20 = gvm1_wavelength(db, crystal, 20.0).lambda_deg_nm
    g1_120 = gvm1_wavelength(db, crystal, 120.0).lambda_deg_nm
    g2_20 = gvm2_wavelength(db, crystal, 20.0, "idler").lambda_deg_nm
    g2_120 = gvm2_wavelength(db, crystal, 120.0, "idler").lambda_deg_nm
    period = degenerate_poling_period(db, crystal, g1_20, 20.0)
    from spdctherm.dispersion import CrystalId

    spec = PhaseMatchSpec(
        crystal=CrystalId(crystal),
        lambda_p_nm=g1_20 / 2.0,
        poling_period_um=period,
        temperature_c=120.0,
    )
    pm_120 = phase_matched_pair(db, spec).lambda_signal_nm
    return g1_20 - g1_120, g2_20 - g2_120, g1_20 - pm_120


def newton(residual_fn, params, steps=30, tol=1e-9, fd=None):
    """Damped Newton / least-norm Gauss step with finite-difference Jacobian."""
    params = np.asarray(params, dtype=float)
    fd = fd if fd is not None else 1e-5 * np.ones_like(params)
    for _ in range(steps):
        r = np.asarray(residual_fn(params), dtype=float)
        if np.max(np.abs(r)) < tol:
            break
        jac = np.empty((r.size, params.size))
        for j in range(params.size):
            bumped = params.copy()
            bumped[j] += fd[j]
            jac[:, j] = (np.asarray(residual_fn(bumped)) - r) / fd[j]
        step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        params = params + step
    return params, np.asarray(residual_fn(params), dtype=float)


def fit_sellmeier(crystal):
    form, base_y, base_z, lam_range, base_name = TEMPLATES[crystal]
    g1_t, g2_t, period_t, *_ = TARGETS[crystal]

    def apply(params):
        # B coefficients bend the group index (GVM observables); A_z mostly
        # shifts the phase index (poling period).
        cy = list(base_y)
        cz = list(base_z)
        cy[1] += params[0]
        cz[1] += params[1]
        if len(params) > 2:
            cz[0] += params[2]
        return cy, cz

    def residual(params):
        cy, cz = apply(params)
        db = build_db(crystal, form, cy, cz, lam_range)
        g1, g2, period = static_observables(db, crystal)
        res = [g1 - g1_t, g2 - g2_t]
        if period_t is not None:
            res.append(period - period_t)
        return res

    n_params = 2 if period_t is None else 3
    params, res = newton(residual, np.zeros(n_params), fd=1e-4 * np.ones(n_params))
    cy, cz = apply(params)
    print(f"{crystal}: Sellmeier params {np.round(params, 6)} residual {np.round(res, 6)}")
    return form, cy, cz, lam_range, base_name


def fit_thermo(crystal, form, cy, cz, lam_range):
    *_, d1_t, d2_t, dpm_t = TARGETS[crystal]

    def residual(params):
        th_y = [params[0], params[1], 0.0, 0.0]
        th_z = [params[2], params[3], 0.0, 0.0]
        db = build_db(crystal, form, cy, cz, lam_range, th_y, th_z)
        d1, d2, dpm = shift_observables(db, crystal)
        return [d1 - d1_t, d2 - d2_t, dpm - dpm_t]

    params, res = newton(residual, np.zeros(4), fd=1e-7 * np.ones(4))
    print(f"{crystal}: thermo params {params} residual {np.round(res, 6)}")
    return [params[0], params[1], 0.0, 0.0], [params[2], params[3], 0.0, 0.0]


def main():
    models = list(LITERATURE_MODELS)
    for crystal in ("RTP", "RTA", "CTA"):
        form, cy, cz, lam_range, base_name = fit_sellmeier(crystal)
        th_y, th_z = fit_thermo(crystal, form, cy, cz, lam_range)
        source = SYNTH_SOURCE.format(base=base_name)
        o2_y, o2_z = ORDER2.get(crystal, ([0, 0, 0, 0], [0, 0, 0, 0]))
        models.append(model_dict(crystal, "y", form, cy, 20.0, th_y, o2_y, lam_range, TEMP_RANGE, source, True))
        models.append(model_dict(crystal, "z", form, cz, 20.0, th_z, o2_z, lam_range, TEMP_RANGE, source, True))

    doc = {"schema_version": 1, "models": models}
    text = json.dumps(doc, indent=2) + "\n"
    db = parse_database(text)  # full-schema validation before writing
    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    OUT_PATH.write_text(serialize_database(db), encoding="utf-8")
    print(f"wrote {OUT_PATH} with {len(db)} models")

    for crystal in ("KTP", "RTP", "KTA", "RTA", "CTA"):
        g1, g2, period = static_observables(db, crystal)
        d1, d2, dpm = shift_observables(db, crystal)
        print(
            f"{crystal}: GVM1 {g1:.1f} nm  GVM2 {g2:.1f} nm  Lambda {period:.1f} um  "
            f"shifts {d1:+.1f}/{d2:+.1f}/{dpm:+.1f} nm"
        )


if __name__ == "__main__":
    main()
