"""Deterministic scalar root finding on a wavelength axis.

All solver entry points use the same scheme: evaluate the residual on a
fixed 0.5 nm grid over the search window, collect every sign-change
bracket, then bisect each bracket down to 1e-4 nm.  No step is adaptive,
so results are bit-reproducible across runs and platforms.
"""

from __future__ import annotations

import numpy as np

GRID_STEP_UM = 5e-4  # 0.5 nm scan grid
TOL_UM = 1e-7  # 1e-4 nm bisection tolerance


class RootError(Exception):
    """Raised when a solve finds no root, or an unexpected number of roots."""


def _bisect(func, lo: float, hi: float, f_lo: float, tol: float = TOL_UM) -> float:
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        f_mid = func(mid)
        if f_mid == 0.0:
            return mid
        if (f_lo < 0.0) == (f_mid < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scan_brackets(func, lo: float, hi: float) -> list:
    """All sign-change brackets of func on [lo, hi] at the fixed grid step."""
    n = max(int(np.ceil((hi - lo) / GRID_STEP_UM)), 2) + 1
    xs = np.linspace(lo, hi, n)
    try:
        vals = np.asarray(func(xs), dtype=float)
        if vals.shape != xs.shape:
            raise TypeError
    except TypeError:
        vals = np.array([func(x) for x in xs], dtype=float)
    if np.any(~np.isfinite(vals)):
        bad = xs[~np.isfinite(vals)]
        raise RootError(f"residual not finite at lam = {bad[0]:.4f} um")
    signs = np.sign(vals)
    brackets = []
    for i in range(len(xs) - 1):
        if signs[i] == 0.0:
            brackets.append((xs[i], xs[i]))
        elif signs[i] * signs[i + 1] < 0.0:
            brackets.append((xs[i], xs[i + 1]))
    if signs[-1] == 0.0:
        brackets.append((xs[-1], xs[-1]))
    return brackets


def solve_all(func, lo: float, hi: float) -> list:
    """Every root of func on [lo, hi], in ascending order."""
    roots = []
    for a, b in scan_brackets(func, lo, hi):
        if a == b:
            roots.append(a)
        else:
            roots.append(_bisect(func, a, b, func(a)))
    return roots


def solve_unique(func, lo: float, hi: float, what: str, tol: float = TOL_UM) -> float:
    """The single root of func on [lo, hi]; error if zero or several."""
    brackets = scan_brackets(func, lo, hi)
    if not brackets:
        raise RootError(f"{what}: no root in [{lo:.4f}, {hi:.4f}] um")
    if len(brackets) > 1:
        spans = ", ".join(f"[{a:.4f}, {b:.4f}]" for a, b in brackets)
        raise RootError(
            f"{what}: {len(brackets)} sign changes in [{lo:.4f}, {hi:.4f}] um "
            f"(brackets: {spans}); narrow the search window"
        )
    a, b = brackets[0]
    return a if a == b else _bisect(func, a, b, func(a), tol)
