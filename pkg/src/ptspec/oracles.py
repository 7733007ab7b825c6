"""Independent reference computations used by ``validate`` and the tests.

Nothing here shares code with the production solvers beyond the potential
definitions: square-well levels come from the textbook transcendental
conditions, finite-difference spectra from a three-point Laplacian, matrix
elements from Gauss-Hermite quadrature of recurrence-built Hermite functions.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq
from scipy.special import roots_hermite

from .potentials import PotentialSpec, evaluate


# --------------------------------------------------------------------------
# finite square well

def square_well_levels(v1: float, a: float) -> np.ndarray:
    """Bound states of the real well ``-v1`` on ``|x| <= a``.

    With ``z = a sqrt(E + v1)`` and ``z0 = a sqrt(v1)`` the even states solve
    ``z tan z = sqrt(z0^2 - z^2)`` and the odd ones
    ``-z cot z = sqrt(z0^2 - z^2)``; each branch of tan/cot holds at most one root.
    """
    z0 = a * math.sqrt(v1)

    def even(z):
        return z * math.sin(z) - math.sqrt(max(z0 * z0 - z * z, 0.0)) * math.cos(z)

    def odd(z):
        return -z * math.cos(z) - math.sqrt(max(z0 * z0 - z * z, 0.0)) * math.sin(z)

    zs = []
    tiny = 1e-13
    k = 0
    while k * math.pi / 2 < z0:
        lo = k * math.pi / 2 + tiny
        hi = min((k + 1) * math.pi / 2, z0) - tiny
        f = even if k % 2 == 0 else odd
        if hi > lo and f(lo) * f(hi) < 0:
            zs.append(brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500))
        k += 1
    return np.sort(np.array([(z / a) ** 2 - v1 for z in zs]))


# --------------------------------------------------------------------------
# finite differences

def _fd_grid(spec: PotentialSpec, xmax: float, n_points: int):
    # cell centres: no node ever lands on a jump of the rectangular well
    h = 2.0 * xmax / n_points
    x = -xmax + h * (np.arange(n_points) + 0.5)
    return x, h


def fd_hermitian_levels(spec: PotentialSpec, xmax: float = 30.0, n_points: int = 12000) -> np.ndarray:
    """Eigenvalues in ``(-v1, 0)`` of the three-point discretization at ``v2 = 0``."""
    x, h = _fd_grid(spec, xmax, n_points)
    V = evaluate(spec.with_v2(0.0), x).real
    d = 2.0 / h**2 + V
    e = np.full(n_points - 1, -1.0 / h**2)
    w = eigh_tridiagonal(d, e, eigvals_only=True, select="v", select_range=(-spec.v1, 0.0))
    return np.sort(w)


def fd_levels_near(spec: PotentialSpec, targets, xmax: float = 60.0, n_points: int = 12000, k: int = 2) -> np.ndarray:
    """Complex finite-difference eigenvalues closest to each target energy.

    Shift-invert Arnoldi on the sparse non-Hermitian tridiagonal matrix,
    ``k`` eigenvalues per target; duplicates across targets are merged.
    """
    x, h = _fd_grid(spec, xmax, n_points)
    V = evaluate(spec, x)
    off = np.full(n_points - 1, -1.0 / h**2, dtype=complex)
    H = sp.diags([off, 2.0 / h**2 + V, off], [-1, 0, 1], format="csc")
    found = []
    for t in np.atleast_1d(targets):
        for w in spla.eigs(H, k=k, sigma=complex(t), return_eigenvectors=False):
            if all(abs(w - f) > 1e-9 * max(1.0, abs(w)) for f in found):
                found.append(complex(w))
    return np.array(sorted(found, key=lambda z: (z.real, z.imag)))


# --------------------------------------------------------------------------
# Gauss-Hermite matrix elements

def hermite_functions(n_max: int, x) -> np.ndarray:
    """``psi_n(x)`` for ``n <= n_max`` by the normalized three-term recurrence."""
    x = np.asarray(x, dtype=float)
    psi = np.empty((n_max + 1, x.size))
    psi[0] = math.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        psi[1] = math.sqrt(2.0) * x * psi[0]
    for n in range(1, n_max):
        psi[n + 1] = math.sqrt(2.0 / (n + 1)) * x * psi[n] - math.sqrt(n / (n + 1)) * psi[n - 1]
    return psi


class QuadratureOracle:
    """Matrix elements ``<m|O|n>`` by ``n_nodes``-point Gauss-Hermite quadrature.

    ``p^2`` acts through the oscillator equation ``-psi_n'' = (2n + 1 - x^2) psi_n``
    so every operator reduces to a multiplication on the nodes.
    """

    def __init__(self, n_max: int = 40, n_nodes: int = 200):
        t, w = roots_hermite(n_nodes)
        self.x = t
        # exp(t^2) undoes the Hermite weight: psi already decays
        self.psi = hermite_functions(n_max, t)
        self.w = w * np.exp(t * t)
        self.n_max = n_max

    def matrix(self, name: str) -> np.ndarray:
        N = self.n_max + 1
        x = self.x
        mult = {
            "gauss": np.exp(-x * x),
            "xgauss": x * np.exp(-x * x),
            "x": x,
            "x2": x * x,
        }
        if name in mult:
            return (self.psi * (self.w * mult[name])) @ self.psi.T
        n = np.arange(N)[:, None]
        minus_d2 = (2 * n + 1 - x[None, :] ** 2) * self.psi
        if name == "p2":
            return (self.psi * self.w) @ minus_d2.T
        if name == "x2p2":
            return (self.psi * (self.w * x * x)) @ minus_d2.T
        raise KeyError(name)


# --------------------------------------------------------------------------
# eigenvalue sum rules

def trace_moment_errors(M, values, orders=(1, 2)):
    """Relative mismatch of ``sum(values**k)`` against ``trace(M**k)``.

    The scale is ``max(1, sum |values|**k)`` so that cancellation in the
    trace cannot inflate the error.
    """
    M = np.asarray(M, dtype=complex)
    values = np.asarray(values, dtype=complex)
    errs = []
    P = np.eye(M.shape[0], dtype=complex)
    for k in range(1, max(orders) + 1):
        P = P @ M
        if k in orders:
            scale = max(1.0, float(np.sum(np.abs(values) ** k)))
            errs.append(abs(np.sum(values**k) - np.trace(P)) / scale)
    return errs


def real_root_count(values, im_tol, window):
    z = np.asarray(values, dtype=complex)
    return int(np.sum((np.abs(z.imag) <= im_tol) & (z.real > window[0]) & (z.real < window[1])))
