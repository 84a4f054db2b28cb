"""Hong-Ou-Mandel interference from a joint spectral amplitude.

Coincidence probability after a balanced beamsplitter with relative delay
tau:

    p(tau) = 1/2 - 1/2 Re sum_jk f_jk f*_kj exp[-i (omega_j - omega_k) tau] dw^2

evaluated as a plain Riemann sum on the (square, shared-axis) JSA grid.
A separable exchange-symmetric state dips to zero at tau = 0; the
long-delay baseline is 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .biphoton import JointSpectralAmplitude

DIP_EPSILON = 0.01
DEFAULT_STEPS = 513
_CLAMP_SLACK = 1e-9


def _check_square(jsa: JointSpectralAmplitude) -> None:
    if not jsa.normalized:
        raise ValueError("HOM evaluation requires a normalized JSA")
    if not jsa.grid.is_square:
        raise ValueError(
            "HOM evaluation requires a square grid with identical signal and "
            "idler axes (so the exchanged amplitude is the matrix transpose)"
        )


def _clamp(p: np.ndarray) -> np.ndarray:
    if np.any(p < -_CLAMP_SLACK) or np.any(p > 1.0 + _CLAMP_SLACK):
        bad = p[(p < -_CLAMP_SLACK) | (p > 1.0 + _CLAMP_SLACK)][0]
        raise ValueError(f"coincidence probability {bad} outside [0, 1]")
    return np.clip(p, 0.0, 1.0)


@dataclass(frozen=True)
class HomTrace:
    """Sampled HOM trace with its summary metrics."""

    tau_s: np.ndarray
    p: np.ndarray
    visibility: float
    dip_count: int
    baseline: float
    metadata: dict

    def to_csv(self) -> str:
        lines = [
            f"# visibility = {self.visibility:.6f}",
            f"# dip_count = {self.dip_count}",
            f"# baseline = {self.baseline:.6f}",
        ]
        for key in sorted(self.metadata):
            lines.append(f"# {key} = {self.metadata[key]}")
        lines.append("tau_fs,p")
        for tau, prob in zip(self.tau_s, self.p):
            lines.append(f"{tau * 1e15:.3f},{prob:.9f}")
        return "\n".join(lines) + "\n"


def _hom_sum(jsa: JointSpectralAmplitude, taus: np.ndarray) -> np.ndarray:
    """Re sum_jk f_jk f*_kj e^{-i(w_j - w_k) tau} dw^2 for each tau."""
    omega = jsa.grid.omega_s
    f = jsa.values
    cross = f * f.T.conj()  # M_jk = f_jk f*_kj
    # sum_jk M_jk e^{-i w_j tau} e^{+i w_k tau} = e^T M e* per tau, batched:
    phases = np.exp(-1j * np.outer(omega, taus))  # (n, n_tau)
    partial = cross @ phases.conj()  # (n, n_tau)
    total = np.einsum("jt,jt->t", phases, partial)
    return np.real(total) * jsa.grid.d_omega_s**2


def hom_probability(jsa: JointSpectralAmplitude, tau_s: float) -> float:
    """Coincidence probability p(tau) for a single delay in seconds."""
    _check_square(jsa)
    p = 0.5 - 0.5 * _hom_sum(jsa, np.array([float(tau_s)]))
    return float(_clamp(p)[0])


def hom_trace(
    jsa: JointSpectralAmplitude,
    tau_max_s: float | None = None,
    steps: int = DEFAULT_STEPS,
) -> HomTrace:
    """Sample p(tau) on a symmetric window [-tau_max, +tau_max].

    The default window is 20 / sigma_p — several pump coherence times,
    wide enough to show every dip and reach the 1/2 baseline.
    """
    _check_square(jsa)
    if steps < 64 or steps % 2 == 0:
        raise ValueError("steps must be odd and at least 65 so tau = 0 is sampled")
    if tau_max_s is None:
        sigma_p = jsa.metadata.get("sigma_p_rad_s")
        if sigma_p is None:
            raise ValueError("tau_max_s required when the JSA has no pump metadata")
        tau_max_s = 20.0 / float(sigma_p)
    if tau_max_s <= 0.0:
        raise ValueError("tau_max_s must be positive")

    taus = np.linspace(-tau_max_s, tau_max_s, steps)
    p = _clamp(0.5 - 0.5 * _hom_sum(jsa, taus))

    base = baseline(taus, p)
    trace = HomTrace(
        tau_s=taus,
        p=p,
        visibility=0.0,
        dip_count=0,
        baseline=base,
        metadata=dict(jsa.metadata),
    )
    object.__setattr__(trace, "visibility", visibility(trace))
    object.__setattr__(trace, "dip_count", count_dips(trace))
    return trace


def baseline(tau_s: np.ndarray, p: np.ndarray) -> float:
    """Mean probability over the outer 10% of the delay window."""
    n_edge = max(int(round(0.05 * len(tau_s))), 1)
    return float(np.mean(np.concatenate([p[:n_edge], p[-n_edge:]])))


def visibility(trace: HomTrace) -> float:
    """V = (P_max - P_min) / (P_max + P_min) over the sampled window."""
    p_max = float(trace.p.max())
    p_min = float(trace.p.min())
    if p_max + p_min == 0.0:
        return 0.0
    return (p_max - p_min) / (p_max + p_min)


def count_dips(trace: HomTrace, epsilon: float = DIP_EPSILON) -> int:
    """Strict local minima deeper than baseline - epsilon, plateau-tolerant.

    Runs of equal samples are compressed first, so a flat-bottom dip
    counts once.
    """
    p = np.asarray(trace.p)
    keep = np.concatenate([[True], np.diff(p) != 0.0])
    compressed = p[keep]
    if compressed.size < 3:
        return 0
    threshold = trace.baseline - epsilon
    interior = compressed[1:-1]
    is_min = (interior < compressed[:-2]) & (interior < compressed[2:])
    return int(np.sum(is_min & (interior < threshold)))
