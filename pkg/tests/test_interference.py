from __future__ import annotations

import numpy as np
import pytest

from spdctherm.biphoton import JointSpectralAmplitude, SpectralGrid
from spdctherm.interference import (
    HomTrace,
    count_dips,
    hom_probability,
    hom_trace,
    visibility,
)

from conftest import gaussian_jsa


def _trace_fixture(p_values, baseline=0.5):
    p = np.asarray(p_values, dtype=float)
    tau = np.linspace(-1e-12, 1e-12, p.size)
    return HomTrace(tau_s=tau, p=p, visibility=0.0, dip_count=0,
                    baseline=baseline, metadata={})


# ---------------------------------------------------------------------------
# hom_probability


def test_exchange_symmetric_jsa_dips_to_zero_at_tau_zero():
    assert hom_probability(gaussian_jsa(), 0.0) < 1e-10


def test_exchange_antisymmetric_jsa_peaks_at_one():
    assert hom_probability(gaussian_jsa(anti=True), 0.0) == pytest.approx(1.0, abs=1e-9)


def test_long_delay_baseline_is_half():
    jsa = gaussian_jsa()
    sigma = jsa.metadata["sigma_p_rad_s"]
    assert hom_probability(jsa, 500.0 / sigma) == pytest.approx(0.5, abs=1e-3)


def test_non_square_grid_rejected():
    jsa = gaussian_jsa()
    grid = SpectralGrid(omega_s=jsa.grid.omega_s, omega_i=jsa.grid.omega_i + 1.0)
    lopsided = JointSpectralAmplitude(grid, jsa.values, True, jsa.metadata)
    with pytest.raises(ValueError, match="square"):
        hom_probability(lopsided, 0.0)


def test_transposed_jsa_gives_identical_probabilities():
    jsa = gaussian_jsa(rotate=True)
    swapped = JointSpectralAmplitude(jsa.grid, jsa.values.T.copy(), True, jsa.metadata)
    for tau in (0.0, 3e-13, 1e-12):
        assert hom_probability(jsa, tau) == pytest.approx(
            hom_probability(swapped, tau), abs=1e-12
        )


# ---------------------------------------------------------------------------
# hom_trace


def test_trace_symmetric_for_real_jsa():
    trace = hom_trace(gaussian_jsa(rotate=True))
    assert np.allclose(trace.p, trace.p[::-1], atol=1e-12)
    assert trace.tau_s[len(trace.tau_s) // 2] == 0.0


def test_trace_global_minimum_at_zero_for_symmetric_jsa():
    trace = hom_trace(gaussian_jsa())
    assert np.argmin(trace.p) == len(trace.p) // 2
    assert trace.p.min() < 1e-9
    assert trace.visibility == pytest.approx(1.0, abs=1e-3)


def test_trace_probabilities_bounded():
    trace = hom_trace(gaussian_jsa(anti=True))
    assert np.all(trace.p >= 0.0) and np.all(trace.p <= 1.0)


def test_trace_requires_odd_steps():
    with pytest.raises(ValueError):
        hom_trace(gaussian_jsa(), steps=100)
    with pytest.raises(ValueError):
        hom_trace(gaussian_jsa(), steps=33)


def test_trace_csv_format():
    trace = hom_trace(gaussian_jsa(), steps=65)
    lines = trace.to_csv().splitlines()
    header_end = next(i for i, l in enumerate(lines) if not l.startswith("#"))
    assert lines[header_end] == "tau_fs,p"
    tau_field, p_field = lines[header_end + 1].split(",")
    assert len(p_field.split(".")[1]) == 9
    assert any(l.startswith("# visibility") for l in lines)


# ---------------------------------------------------------------------------
# Metrics


def test_visibility_formula():
    trace = _trace_fixture([0.5, 0.3, 0.1, 0.3, 0.5])
    assert visibility(trace) == pytest.approx((0.5 - 0.1) / (0.5 + 0.1), rel=1e-12)


def test_visibility_of_constant_trace_is_zero():
    assert visibility(_trace_fixture([0.5] * 65)) == 0.0


def test_count_dips_single_triangle():
    assert count_dips(_trace_fixture([0.5, 0.4, 0.3, 0.2, 0.3, 0.4, 0.5])) == 1


def test_count_dips_monotone_is_zero():
    assert count_dips(_trace_fixture([0.5, 0.4, 0.3, 0.2, 0.1, 0.0])) == 0


def test_count_dips_plateau_counts_once():
    assert count_dips(_trace_fixture([0.5, 0.3, 0.2, 0.2, 0.2, 0.3, 0.5])) == 1


def test_count_dips_ignores_shallow_ripples():
    assert count_dips(_trace_fixture([0.5, 0.495, 0.5, 0.495, 0.5])) == 0


def test_count_dips_two_wells():
    assert count_dips(_trace_fixture([0.5, 0.2, 0.5, 0.2, 0.5])) == 2
