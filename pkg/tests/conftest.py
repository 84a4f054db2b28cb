from __future__ import annotations

import numpy as np
import pytest

from spdctherm import load_database
from spdctherm.biphoton import JointSpectralAmplitude, SpectralGrid

CRYSTALS = ("KTP", "RTP", "KTA", "RTA", "CTA")


@pytest.fixture(scope="session")
def db():
    return load_database()


def gaussian_jsa(n=64, center=1.2e15, span=4e12, sigma=5e11, anti=False, rotate=False):
    """Synthetic normalized JSA fixture on a square grid.

    Separable Gaussian by default; `rotate` makes it correlated (entangled),
    `anti` makes it exchange-antisymmetric.
    """
    grid = SpectralGrid.centered(center, span, n)
    ws = grid.omega_s[:, None] - center
    wi = grid.omega_i[None, :] - center
    if rotate:
        a = (ws + wi) / np.sqrt(2.0)
        b = (ws - wi) / np.sqrt(2.0)
        f = np.exp(-(a / (0.2 * sigma)) ** 2 - (b / sigma) ** 2)
    else:
        f = np.exp(-(ws / sigma) ** 2 - (wi / sigma) ** 2)
    if anti:
        f = f * (ws - wi)
    f = f.astype(complex)
    f /= np.sqrt(np.sum(np.abs(f) ** 2) * grid.d_omega_s * grid.d_omega_i)
    return JointSpectralAmplitude(grid=grid, values=f, normalized=True,
                                  metadata={"sigma_p_rad_s": sigma})
