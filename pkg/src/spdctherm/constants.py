"""Physical constants and unit conversions.

Internal canonical units: wavelength in um, temperature in degC, angular
frequency in rad/s.  Conversions to the nm-facing CLI boundary are exact
decimal scalings.
"""

from __future__ import annotations

C_UM_PER_S = 299792458.0 * 1e6  # speed of light, um/s (exact)

TWO_PI = 6.283185307179586


def nm_to_um(value_nm: float) -> float:
    return value_nm * 1e-3


def um_to_nm(value_um: float) -> float:
    return value_um * 1e3


def omega_from_lambda_um(lambda_um):
    """Angular frequency (rad/s) for a vacuum wavelength in um."""
    return TWO_PI * C_UM_PER_S / lambda_um


def lambda_um_from_omega(omega):
    """Vacuum wavelength (um) for an angular frequency in rad/s."""
    return TWO_PI * C_UM_PER_S / omega
