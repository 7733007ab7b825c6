"""Closed-form eigenvalue condition for the PT-symmetric rectangular well."""

from __future__ import annotations

import numpy as np
from scipy.optimize import brentq

from ._common import DomainError, SpectrumResult, sign_change_brackets


class EliminantConsistencyError(ArithmeticError):
    """The eliminant picked up an imaginary part it cannot have."""


def eliminant_vars(E, v1, v2, a):
    """``(p, q, r)`` with principal square roots; ``q == conj(p)`` for real E."""
    E = np.asarray(E, dtype=float)
    p = a * np.sqrt(E + v1 - 1j * v2)
    q = a * np.sqrt(E + v1 + 1j * v2)
    r = a * np.sqrt(-E)
    return p, q, r


def eliminant_complex(E, v1, v2, a):
    p, q, r = eliminant_vars(E, v1, v2, a)
    cp, sp = np.cos(p), np.sin(p)
    cq, sq = np.cos(q), np.sin(q)
    return (
        2 * p * q * r * cp * cq
        + p * (r * r - q * q) * cp * sq
        + q * (r * r - p * p) * sp * cq
        - r * (p * p + q * q) * sp * sq
    )


def rect_eliminant(E, v1: float, v2: float, a: float, imag_tol: float = 1e-9):
    """Real part of the matching determinant ``D(E)``.

    Works on scalars or arrays. ``Im D`` vanishes identically for real ``E``
    because swapping ``p`` and ``q`` maps D onto itself; anything above
    ``imag_tol * (1 + |Re D|)`` raises :class:`EliminantConsistencyError`.
    """
    E_arr = np.asarray(E, dtype=float)
    if np.any((E_arr <= -v1) | (E_arr >= 0)):
        raise DomainError(f"energies must lie in ({-v1}, 0)")
    d = eliminant_complex(E_arr, v1, v2, a)
    bad = np.abs(d.imag) > imag_tol * (1.0 + np.abs(d.real))
    if np.any(bad):
        worst = float(np.max(np.abs(d.imag) / (1.0 + np.abs(d.real))))
        raise EliminantConsistencyError(f"Im D / (1 + |Re D|) = {worst:.3e} exceeds {imag_tol}")
    if d.ndim == 0:
        return float(d.real)
    return d.real


def rect_spectrum(v1: float, v2: float, a: float = 2.0, tol: float = 1e-10, points: int = 2000, window=None) -> SpectrumResult:
    """All real roots of the eliminant in ``(-v1, 0)``.

    Sign changes on a uniform ``points`` grid over ``(-v1 + tol, -tol)`` are
    refined with Brent's method to ``tol``. An empty result is legitimate
    (every level pair may have gone complex).
    """
    if v1 <= 0 or a <= 0:
        raise ValueError("v1 and a must be positive")
    lo, hi = -v1 + tol, -tol
    if window is not None:
        lo, hi = max(lo, window[0]), min(hi, window[1])
    grid = np.linspace(lo, hi, points)
    d = rect_eliminant(grid, v1, v2, a)

    def f(e):
        return float(eliminant_complex(e, v1, v2, a).real)

    roots = []
    for i in sign_change_brackets(d):
        if d[i] == 0.0:
            roots.append(float(grid[i]))
        else:
            roots.append(brentq(f, grid[i], grid[i + 1], xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200))
    roots = np.sort(np.asarray(roots, dtype=float))
    dc = eliminant_complex(roots, v1, v2, a) if roots.size else np.zeros(0, complex)
    residuals = np.abs(dc.imag) / (1.0 + np.abs(dc.real)) if roots.size else np.zeros(0)
    return SpectrumResult(
        eigenvalues=roots,
        residuals=np.asarray(residuals, dtype=float),
        method="analytic",
        diagnostics={"points": points, "tol": tol},
    )
