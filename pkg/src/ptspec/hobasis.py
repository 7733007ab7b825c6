"""Harmonic-oscillator basis matrices.

The basis ``|n>`` diagonalizes ``-d^2/dx^2 + x^2`` (eigenvalues ``2n+1``),
optionally stretched by a length scale ``lam``: ``psi_n(x/lam)/sqrt(lam)``.
Matrix elements come from closed forms; the Gaussian ones use log-Gamma
so that several hundred basis states stay finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import gammaln, roots_hermite

from ._common import NonConvergenceError, SpectrumResult
from .linalg import eig_complex, eig_pencil, select_real


@dataclass(frozen=True)
class BasisConfig:
    """Truncation size and basis length scale.

    ``scale="auto"`` picks the scale in ``[0.3, 3]`` minimizing the sum of
    the lowest eigenvalues of the Hermitian Gaussian Hamiltonian.
    """

    n_basis: int = 160
    scale: float | str = 1.0

    def __post_init__(self):
        if int(self.n_basis) < 2:
            raise ValueError("n_basis must be >= 2")
        if self.scale != "auto" and not float(self.scale) > 0:
            raise ValueError("scale must be positive or 'auto'")


# --------------------------------------------------------------------------
# scalar matrix elements

def me_p2(m: int, n: int) -> float:
    if m == n:
        return (2 * n + 1) / 2
    if m == n - 2:
        return -math.sqrt((n - 1) * n) / 2
    if m == n + 2:
        return -math.sqrt((n + 1) * (n + 2)) / 2
    return 0.0


def me_x(m: int, n: int) -> float:
    if m == n - 1:
        return math.sqrt(n / 2)
    if m == n + 1:
        return math.sqrt((n + 1) / 2)
    return 0.0


def me_x2(m: int, n: int) -> float:
    if m == n:
        return (2 * n + 1) / 2
    if m == n - 2:
        return math.sqrt((n - 1) * n) / 2
    if m == n + 2:
        return math.sqrt((n + 1) * (n + 2)) / 2
    return 0.0


def me_x2p2(m: int, n: int) -> float:
    """``<m|x^2 p^2|n>`` from ``x = (a + a+)/sqrt2``, ``p = (a - a+)/(i sqrt2)``.

    The operator is not Hermitian, so the matrix is real but not symmetric.
    """
    if m == n:
        return (2 * n * n + 2 * n - 1) / 4
    if m == n - 2:
        return math.sqrt(n * (n - 1))
    if m == n + 2:
        return -math.sqrt((n + 1) * (n + 2))
    if m == n - 4:
        return -math.sqrt(n * (n - 1) * (n - 2) * (n - 3)) / 4
    if m == n + 4:
        return -math.sqrt((n + 1) * (n + 2) * (n + 3) * (n + 4)) / 4
    return 0.0


def _log_norm(m, n):
    return 0.5 * (math.log(2 * math.pi) + math.lgamma(m + 1) + math.lgamma(n + 1))


def me_gauss(m: int, n: int) -> float:
    """``<m|exp(-x^2)|n>``; zero unless ``m - n`` is even."""
    d = m - n
    if d % 2:
        return 0.0
    sign = -1.0 if (d // 2) % 2 else 1.0
    return sign * math.exp(math.lgamma((m + n + 1) / 2) - _log_norm(m, n))


def me_xgauss(m: int, n: int) -> float:
    """``<m|x exp(-x^2)|n>``; zero unless ``m + n`` is odd."""
    d = m - n
    if d % 2 == 0:
        return 0.0
    sin = -1.0 if ((d - 1) // 2) % 2 else 1.0
    return d / (2 * math.sqrt(2) * sin) * math.exp(math.lgamma((m + n) / 2) - _log_norm(m, n))


# --------------------------------------------------------------------------
# matrices

def _banded(N, offdiag, diag):
    """Symmetric matrix with ``diag(n)`` and ``offdiag(n)`` at ``(n, n+s)``."""
    M = np.zeros((N, N))
    idx = np.arange(N)
    M[idx, idx] = diag(idx)
    for shift, fn in offdiag.items():
        j = np.arange(N - shift)
        vals = fn(j)
        M[j, j + shift] = vals
        M[j + shift, j] = vals
    return M


def p2_matrix(N: int) -> np.ndarray:
    return _banded(N, {2: lambda j: -np.sqrt((j + 1.0) * (j + 2.0)) / 2}, lambda n: (2 * n + 1.0) / 2)


def x_matrix(N: int) -> np.ndarray:
    return _banded(N, {1: lambda j: np.sqrt((j + 1.0) / 2)}, lambda n: np.zeros(n.shape))


def x2_matrix(N: int) -> np.ndarray:
    return _banded(N, {2: lambda j: np.sqrt((j + 1.0) * (j + 2.0)) / 2}, lambda n: (2 * n + 1.0) / 2)


def x2p2_matrix(N: int) -> np.ndarray:
    M = np.zeros((N, N))
    n = np.arange(N, dtype=float)
    M[np.arange(N), np.arange(N)] = (2 * n * n + 2 * n - 1) / 4
    j = np.arange(max(N - 2, 0))
    M[j, j + 2] = np.sqrt((j + 1.0) * (j + 2.0))  # m = n - 2 with n = j + 2
    M[j + 2, j] = -np.sqrt((j + 1.0) * (j + 2.0))
    j = np.arange(max(N - 4, 0))
    quad = -np.sqrt((j + 1.0) * (j + 2.0) * (j + 3.0) * (j + 4.0)) / 4
    M[j, j + 4] = quad
    M[j + 4, j] = quad
    return M


def gauss_matrix(N: int) -> np.ndarray:
    m, n = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    d = m - n
    log_mag = gammaln((m + n + 1) / 2) - 0.5 * (np.log(2 * np.pi) + gammaln(m + 1) + gammaln(n + 1))
    sign = np.where((d // 2) % 2 == 0, 1.0, -1.0)
    return np.where(d % 2 == 0, sign * np.exp(log_mag), 0.0)


def xgauss_matrix(N: int) -> np.ndarray:
    m, n = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    d = m - n
    odd = d % 2 == 1
    mn = np.where(odd, m + n, 1)  # keep gammaln away from 0 on the even entries
    log_mag = gammaln(mn / 2) - 0.5 * (np.log(2 * np.pi) + gammaln(m + 1) + gammaln(n + 1))
    sin = np.where(((d - 1) // 2) % 2 == 0, 1.0, -1.0)
    return np.where(odd, d / (2 * np.sqrt(2) * sin) * np.exp(log_mag), 0.0)


def _hermite_functions_unweighted(N, y):
    """``psi_n(y) * exp(y^2/2)`` for n < N, rows indexed by n."""
    phi = np.empty((N, y.size))
    phi[0] = math.pi ** -0.25
    if N > 1:
        phi[1] = math.sqrt(2.0) * y * phi[0]
    for n in range(1, N - 1):
        phi[n + 1] = math.sqrt(2.0 / (n + 1)) * y * phi[n] - math.sqrt(n / (n + 1)) * phi[n - 1]
    return phi


def scaled_gauss_matrices(N: int, lam: float):
    """``<e^{-x^2}>`` and ``<x e^{-x^2}>`` in the basis stretched by ``lam``.

    In basis units the operators are ``exp(-lam^2 y^2)`` and
    ``lam * y * exp(-lam^2 y^2)``; after ``t = y sqrt(1 + lam^2)`` the
    integrands are polynomial against ``exp(-t^2)``, so Gauss-Hermite with
    ``N + 2`` nodes is exact.
    """
    s = math.sqrt(1.0 + lam * lam)
    t, w = roots_hermite(N + 2)
    y = t / s
    phi = _hermite_functions_unweighted(N, y)
    G = (phi * (w / s)) @ phi.T
    XG = lam * (phi * (w * y / s)) @ phi.T
    return G, XG


def gaussian_scale_objective(lam: float, v1: float, N: int) -> float:
    """Sum of the negative eigenvalues of the Hermitian (``v2 = 0``) part.

    Truncation can only raise this sum, so smaller is better.
    """
    G, _ = scaled_gauss_matrices(N, lam)
    w = np.linalg.eigvalsh(p2_matrix(N) / lam**2 - v1 * G)
    return float(np.sum(np.minimum(w, 0.0)))


def resolve_scale(v1: float, cfg: BasisConfig) -> float:
    if cfg.scale != "auto":
        return float(cfg.scale)
    res = minimize_scalar(
        gaussian_scale_objective, bounds=(0.3, 3.0), args=(v1, int(cfg.n_basis)),
        method="bounded", options={"xatol": 1e-3},
    )
    return float(res.x)


def build_gaussian_hamiltonian(v1: float, v2: float, cfg: BasisConfig | None = None) -> np.ndarray:
    """``h = <p^2> - v1 <e^{-x^2}> + i v2 <x e^{-x^2}>`` as a dense complex matrix."""
    cfg = cfg or BasisConfig()
    N = int(cfg.n_basis)
    lam = resolve_scale(v1, cfg)
    if lam == 1.0:
        G, XG = gauss_matrix(N), xgauss_matrix(N)
    else:
        G, XG = scaled_gauss_matrices(N, lam)
    return p2_matrix(N) / lam**2 - v1 * G + 1j * v2 * XG


def build_wc_pencil(v1: float, v2: float, cfg: BasisConfig | None = None):
    """Pencil ``(A, B)`` whose generalized eigenvalues solve the
    Wigner-Coulomb problem multiplied through by ``1 + x^2``.

    ``A = p^2 + x^2 p^2 - v1 + i v2 x`` and ``B = 1 + x^2``.
    """
    cfg = cfg or BasisConfig(n_basis=140)
    N = int(cfg.n_basis)
    lam = 1.0 if cfg.scale == "auto" else float(cfg.scale)
    eye = np.eye(N)
    A = p2_matrix(N) / lam**2 + x2p2_matrix(N) - v1 * eye + 1j * v2 * lam * x_matrix(N)
    B = eye + lam**2 * x2_matrix(N)
    return A, B


def wc_operator_matrix(E: float, v1: float, v2: float, cfg: BasisConfig | None = None) -> np.ndarray:
    """``<m|p^2 + x^2 p^2 - (E + v1) + i v2 x - E x^2|n>`` assembled term by term."""
    cfg = cfg or BasisConfig(n_basis=140)
    N = int(cfg.n_basis)
    lam = 1.0 if cfg.scale == "auto" else float(cfg.scale)
    return (
        p2_matrix(N) / lam**2
        + x2p2_matrix(N)
        - (E + v1) * np.eye(N)
        + 1j * v2 * lam * x_matrix(N)
        - E * lam**2 * x2_matrix(N)
    )


# --------------------------------------------------------------------------
# spectra

def default_im_tol(v1: float) -> float:
    return 1e-6 * max(1.0, v1)


def _matched(reference, candidates, tol):
    """Entries of ``reference`` with a partner in ``candidates`` within ``tol``."""
    reference = np.asarray(reference, dtype=float)
    if not len(candidates):
        return np.zeros(reference.size, bool)
    best = np.min(np.abs(reference[:, None] - np.asarray(candidates)[None, :]), axis=1)
    return best <= tol * np.maximum(1.0, np.abs(reference))


def _solve_gaussian(v1, v2, cfg, im_tol, window):
    res = eig_complex(build_gaussian_hamiltonian(v1, v2, cfg))
    if not res.converged:
        raise NonConvergenceError("Hamiltonian eigenvalues did not converge")
    return select_real(res.values, window, im_tol)


def _solve_wc(v1, v2, cfg, im_tol, window):
    A, B = build_wc_pencil(v1, v2, cfg)
    res = eig_pencil(A, B)
    if not res.converged:
        raise NonConvergenceError("pencil eigenvalues did not converge")
    return select_real(res.values, window, im_tol)


def _basis_spectrum(solve, v1, v2, cfg, im_tol, window, check_step, conv_tol, method):
    im_tol = default_im_tol(v1) if im_tol is None else im_tol
    window = (-v1, 0.0) if window is None else window
    values = solve(v1, v2, cfg, im_tol, window)
    diagnostics = {"n_basis": int(cfg.n_basis), "scale": cfg.scale, "im_tol": im_tol}
    if check_step:
        bigger = BasisConfig(n_basis=int(cfg.n_basis) + check_step, scale=cfg.scale)
        other = solve(v1, v2, bigger, im_tol, window)
        keep = _matched(values, other, conv_tol)
        diagnostics["unconverged"] = values[~keep].tolist()
        diagnostics["check_n_basis"] = int(bigger.n_basis)
        values = values[keep]
    return SpectrumResult(
        eigenvalues=values,
        residuals=np.zeros(values.size),
        method=method,
        diagnostics=diagnostics,
    )


def gaussian_spectrum(v1, v2, cfg: BasisConfig | None = None, im_tol=None, window=None,
                      check_step: int = 0, conv_tol: float = 1e-4) -> SpectrumResult:
    """Real eigenvalues of the Gaussian Hamiltonian in ``window``.

    With ``check_step > 0`` the basis is enlarged by that many states and
    only eigenvalues reproduced to ``conv_tol`` (relative, floor 1) are kept.
    """
    cfg = cfg or BasisConfig()
    if cfg.scale == "auto":
        cfg = BasisConfig(cfg.n_basis, resolve_scale(v1, cfg))
    return _basis_spectrum(_solve_gaussian, v1, v2, cfg, im_tol, window, check_step, conv_tol, "ho-basis")


def wc_spectrum(v1, v2, cfg: BasisConfig | None = None, im_tol=None, window=None,
                check_step: int = 20, conv_tol: float = 1e-4) -> SpectrumResult:
    """Real generalized eigenvalues of the Wigner-Coulomb pencil in ``window``.

    Levels near ``E = 0`` accumulate and are not representable in a finite
    basis; by default anything not reproduced by a basis 20 states larger is
    dropped.
    """
    cfg = cfg or BasisConfig(n_basis=140)
    return _basis_spectrum(_solve_wc, v1, v2, cfg, im_tol, window, check_step, conv_tol, "wc-pencil")
