"""Dense complex eigenvalues, symmetric-definite pencil reduction, det scans."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla


class PencilDegenerateError(np.linalg.LinAlgError):
    """The right-hand matrix of a pencil is not positive definite."""


@dataclass
class EigenResult:
    values: np.ndarray
    iterations: int
    converged: bool


def _as_square(M, name="matrix"):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ValueError(f"{name} must be a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def eig_complex(M) -> EigenResult:
    """All eigenvalues of a dense complex matrix.

    LAPACK ``zgeev`` does the work: balancing, Hessenberg reduction and
    shifted complex QR. A failed deflation comes back as
    ``converged=False`` with NaN values, never as a partial answer.
    ``iterations`` is not exposed by LAPACK and is reported as -1.
    """
    M = _as_square(M)
    try:
        values = sla.eigvals(M, overwrite_a=False, check_finite=False)
    except np.linalg.LinAlgError:
        return EigenResult(np.full(M.shape[0], np.nan + 0j), -1, False)
    return EigenResult(np.asarray(values, dtype=complex), -1, True)


def cholesky_lower(B) -> np.ndarray:
    B = np.asarray(B)
    if np.iscomplexobj(B):
        if np.max(np.abs(B.imag)) > 0:
            raise PencilDegenerateError("B must be real symmetric")
        B = B.real
    if not np.allclose(B, B.T, rtol=0, atol=1e-12 * max(1.0, np.max(np.abs(B)))):
        raise PencilDegenerateError("B must be symmetric")
    try:
        return sla.cholesky(B, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise PencilDegenerateError(f"B is not positive definite: {exc}") from exc


def reduce_pencil(A, B) -> np.ndarray:
    """``C = L^-1 A L^-T`` for ``B = L L^T``; ``eig(C)`` solves ``det(A - E B) = 0``."""
    A = _as_square(A, "A")
    L = cholesky_lower(B)
    if L.shape != A.shape:
        raise ValueError("A and B must have the same shape")
    Y = sla.solve_triangular(L, A, lower=True, check_finite=False)
    return sla.solve_triangular(L, Y.T, lower=True, check_finite=False).T


def eig_pencil(A, B) -> EigenResult:
    return eig_complex(reduce_pencil(A, B))


def select_real(values, window=(-np.inf, 0.0), im_tol: float = 1e-6) -> np.ndarray:
    """Sorted real parts of the values with ``|Im| <= im_tol`` inside ``(lo, hi)``."""
    lo, hi = window
    if not lo < hi:
        raise ValueError("window must satisfy lo < hi")
    if im_tol <= 0:
        raise ValueError("im_tol must be positive")
    z = np.asarray(values, dtype=complex).ravel()
    z = z[np.isfinite(z)]
    keep = (np.abs(z.imag) <= im_tol) & (z.real > lo) & (z.real < hi)
    return np.sort(z.real[keep])


def log_det(M):
    """Complex log-determinant through an LU factorization."""
    lu, piv = sla.lu_factor(np.asarray(M, dtype=complex), check_finite=False)
    diag = np.diag(lu)
    swaps = np.count_nonzero(piv != np.arange(piv.size))
    return complex(np.sum(np.log(diag.astype(complex))) + (1j * np.pi if swaps % 2 else 0.0))


def det_scan(A, B, energies) -> np.ndarray:
    """``log det(A - E B)`` for every ``E`` in ``energies``."""
    A = _as_square(A, "A")
    B = np.asarray(B, dtype=complex)
    return np.array([log_det(A - e * B) for e in np.atleast_1d(energies)])


def pencil_log_det(A, B, energies, values=None) -> np.ndarray:
    """``log det(B) + sum_i log(lambda_i - E)`` from the pencil eigenvalues.

    Compared against :func:`det_scan` this checks the Cholesky reduction
    without involving it in the reference value.
    """
    if values is None:
        values = eig_pencil(A, B).values
    base = log_det(B)
    return np.array([base + np.sum(np.log(values - e)) for e in np.atleast_1d(energies)])


def log_det_mismatch(a, b) -> np.ndarray:
    """``|exp(a - b) - 1|``: relative difference of determinants given as logs."""
    d = np.asarray(a) - np.asarray(b)
    d = d.real + 1j * (np.angle(np.exp(1j * d.imag)))
    return np.abs(np.expm1(d))
