"""Shooting/matching solver for real bound-state energies.

Two fundamental solutions ``u`` (u(0)=1, u'(0)=0) and ``v`` (v(0)=0,
v'(0)=1) of ``psi'' = (V(x) - E) psi`` are integrated from the origin to
``+L`` and ``-L`` with classical fixed-step RK4, then matched to the
decaying exponentials ``exp(-k|x|)``, ``k = sqrt(-E)``.
"""

from __future__ import annotations

import functools
import logging
from dataclasses import dataclass

import numba
import numpy as np
from scipy.optimize import brentq

from ._common import (
    DomainError,
    OverflowIntegrationError,
    SpectrumResult,
    sign_change_brackets,
)
from .potentials import Model, PotentialSpec, profiles

log = logging.getLogger(__name__)

DEFAULT_L = {
    Model.SCARF2: 12.0,
    Model.GAUSSIAN: 12.0,
    Model.QUARTIC: 12.0,
    Model.SECH: 12.0,
    Model.WIGNER_COULOMB: 30.0,
}


@dataclass(frozen=True)
class ShootingConfig:
    """Integration and root-search settings.

    ``L=None`` picks the model default: ``a`` for the rectangular well,
    30 for Wigner-Coulomb and 12 otherwise. ``residual_tol`` bounds the
    Newton step of the two-sided complex mismatch at an accepted root (see
    :func:`newton_residual`).
    """

    L: float | None = None
    step: float = 1e-3
    e_scan_points: int = 2000
    root_tol: float = 1e-10
    residual_tol: float = 1e-6

    def __post_init__(self):
        if self.L is not None and self.L <= 0:
            raise ValueError("L must be positive")
        if self.step <= 0:
            raise ValueError("step must be positive")
        if self.L is not None and self.step > self.L:
            raise ValueError("step must not exceed L")
        if self.e_scan_points < 2:
            raise ValueError("e_scan_points must be >= 2")
        if self.root_tol <= 0:
            raise ValueError("root_tol must be positive")

    def matching_distance(self, spec: PotentialSpec) -> float:
        if self.L is not None:
            return float(self.L)
        if spec.model is Model.RECT:
            return spec.a
        return DEFAULT_L[spec.model]


@dataclass(frozen=True)
class ShootingState:
    """``u, u', v, v'`` at ``+L`` (``*L``) and at ``-L`` (``*ML``)."""

    uL: complex
    duL: complex
    vL: complex
    dvL: complex
    uML: complex
    duML: complex
    vML: complex
    dvML: complex

    def wronskian(self):
        """``(W(+L), W(-L))`` with ``W = u v' - u' v``; both equal 1 exactly."""
        return (
            self.uL * self.dvL - self.duL * self.vL,
            self.uML * self.dvML - self.duML * self.vML,
        )

    def wronskian_defect(self) -> float:
        """Largest ``|W - 1|`` at ``+-L``, relative to the size of ``u v'`` and ``u' v``.

        Bound-state energies make ``u`` and ``v`` grow like ``exp(kL)``, so
        ``W`` is a difference of two huge products and carries a rounding
        error of order ``eps * |u v'|``; the scale removes that floor.
        """
        out = 0.0
        for (u, du, v, dv), w in zip(
            ((self.uL, self.duL, self.vL, self.dvL), (self.uML, self.duML, self.vML, self.dvML)),
            self.wronskian(),
        ):
            scale = max(1.0, abs(u * dv), abs(du * v))
            out = max(out, abs(w - 1.0) / scale)
        return out


# --------------------------------------------------------------------------
# kernels

@numba.njit(cache=True, nogil=True)
def _march(fe, fo, v1, v2, energy, h, nsteps):
    # fe/fo hold 2*nsteps+1 samples at x = j*h/2 (h carries the direction)
    u = 1.0 + 0.0j
    du = 0.0j
    v = 0.0j
    dv = 1.0 + 0.0j
    half = 0.5 * h
    sixth = h / 6.0
    for k in range(nsteps):
        q0 = complex(-v1 * fe[2 * k] - energy, v2 * fo[2 * k])
        q1 = complex(-v1 * fe[2 * k + 1] - energy, v2 * fo[2 * k + 1])
        q2 = complex(-v1 * fe[2 * k + 2] - energy, v2 * fo[2 * k + 2])

        a1 = du
        b1 = q0 * u
        a2 = du + half * b1
        b2 = q1 * (u + half * a1)
        a3 = du + half * b2
        b3 = q1 * (u + half * a2)
        a4 = du + h * b3
        b4 = q2 * (u + h * a3)
        u = u + sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        du = du + sixth * (b1 + 2.0 * b2 + 2.0 * b3 + b4)

        a1 = dv
        b1 = q0 * v
        a2 = dv + half * b1
        b2 = q1 * (v + half * a1)
        a3 = dv + half * b2
        b3 = q1 * (v + half * a2)
        a4 = dv + h * b3
        b4 = q2 * (v + h * a3)
        v = v + sixth * (a1 + 2.0 * a2 + 2.0 * a3 + a4)
        dv = dv + sixth * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
    return u, du, v, dv


@numba.njit(cache=True, nogil=True)
def _g_scan(fe, fo, v1, v2, energies, h, nsteps):
    out = np.empty(energies.size)
    for i in range(energies.size):
        energy = energies[i]
        k = np.sqrt(-energy)
        u, du, v, dv = _march(fe, fo, v1, v2, energy, h, nsteps)
        z = k * u + du
        w = k * v + dv
        g = z.real * w.real + z.imag * w.imag
        out[i] = g if np.isfinite(g) else np.nan
    return out


@functools.lru_cache(maxsize=64)
def _samples(model: Model, a: float, L: float, step: float, side: int):
    nsteps = max(1, int(round(L / step)))
    h = L / nsteps
    r = np.arange(2 * nsteps + 1) * (0.5 * h)
    if model is Model.RECT:
        # one-sided limits: keep every sample strictly inside (0, a)
        delta = 1e-12 * a
        r = np.clip(r, delta, a - delta)
    fe, fo = profiles(model, side * r, a)
    fe = np.ascontiguousarray(fe, dtype=float)
    fo = np.ascontiguousarray(fo, dtype=float)
    fe.flags.writeable = False
    fo.flags.writeable = False
    return fe, fo, side * h, nsteps


def _grid(spec: PotentialSpec, cfg: ShootingConfig, side: int):
    L = cfg.matching_distance(spec)
    return _samples(spec.model, spec.a, L, float(cfg.step), side)


def _check_energy(spec, energy):
    if not (-spec.v1 < energy < 0.0):
        raise DomainError(f"E={energy} is outside the bound-state window ({-spec.v1}, 0)")


# --------------------------------------------------------------------------
# public operations

def integrate_fundamental(spec: PotentialSpec, E: float, cfg: ShootingConfig | None = None) -> ShootingState:
    """Integrate ``u`` and ``v`` from the origin to ``+L`` and to ``-L``.

    Raises
    ------
    OverflowIntegrationError
        If the march produced inf/nan (energy far too deep or step too big).
    """
    cfg = cfg or ShootingConfig()
    E = float(E)
    if not np.isfinite(E):
        raise ValueError("E must be finite")
    values = []
    for side in (1, -1):
        fe, fo, h, n = _grid(spec, cfg, side)
        values.extend(_march(fe, fo, spec.v1, spec.v2, E, h, n))
    if not np.all(np.isfinite(values)):
        raise OverflowIntegrationError(f"non-finite solution at E={E} for {spec}")
    return ShootingState(*(complex(c) for c in values))


def g_values(spec: PotentialSpec, energies, cfg: ShootingConfig | None = None) -> np.ndarray:
    """The real matching function ``Re(z conj(w))`` on an energy array.

    Uses only the ``+L`` march; PT symmetry supplies the ``-L`` side.
    Overflowing points come back as NaN.
    """
    cfg = cfg or ShootingConfig()
    energies = np.ascontiguousarray(energies, dtype=float)
    fe, fo, h, n = _grid(spec, cfg, 1)
    return _g_scan(fe, fo, spec.v1, spec.v2, energies, h, n)


def mismatch(spec: PotentialSpec, E: float, cfg: ShootingConfig | None = None):
    """Complex matching residual ``F`` and real root function ``G`` at ``E``.

    ``F`` is the cross-multiplied two-sided matching condition
    ``z * (k v(-L) - v'(-L)) - w * (k u(-L) - u'(-L))`` with
    ``z = k u(L) + u'(L)`` and ``w = k v(L) + v'(L)``; ``G = Re(z conj(w))``.
    For a PT-symmetric potential ``F = -2 G``.
    """
    _check_energy(spec, E)
    st = integrate_fundamental(spec, E, cfg)
    k = np.sqrt(-E)
    z = k * st.uL + st.duL
    w = k * st.vL + st.dvL
    F = z * (k * st.vML - st.dvML) - w * (k * st.uML - st.duML)
    G = (z * np.conj(w)).real
    return complex(F), float(G)


def scaled_mismatch(spec: PotentialSpec, E: float, cfg: ShootingConfig | None = None) -> float:
    """``|F| / (|z| |w|)``.

    Small at a root whenever ``v2 != 0``; identically 2 for ``v2 = 0``,
    where ``z conj(w)`` is real.
    """
    F, _ = mismatch(spec, E, cfg)
    st = integrate_fundamental(spec, E, cfg)
    k = np.sqrt(-E)
    z = k * st.uL + st.duL
    w = k * st.vL + st.dvL
    return float(abs(F) / (abs(z) * abs(w) + np.finfo(float).tiny))


def newton_residual(spec: PotentialSpec, E: float, cfg: ShootingConfig | None = None) -> float:
    """``|F / F'|`` at ``E`` relative to ``max(1, |E|)``.

    The Newton step of the two-sided mismatch, i.e. how far ``E`` sits from
    a zero of ``F`` to first order. ``F'`` is a central difference.
    """
    dE = 1e-6 * max(1.0, abs(E))
    lo, hi = max(E - dE, -spec.v1 + 0.5 * dE), min(E + dE, -0.5 * dE)
    try:
        F0 = mismatch(spec, E, cfg)[0]
        slope = (mismatch(spec, hi, cfg)[0] - mismatch(spec, lo, cfg)[0]) / (hi - lo)
    except OverflowIntegrationError:
        return np.inf
    if slope == 0 or not np.isfinite(slope):
        return np.inf
    return float(abs(F0 / slope) / max(1.0, abs(E)))


def refine_roots(spec, grid, gvals, cfg):
    """Brent-refine every sign change of ``gvals`` on ``grid``."""
    fe, fo, h, n = _grid(spec, cfg, 1)
    v1, v2 = spec.v1, spec.v2

    def g(e):
        return _g_scan(fe, fo, v1, v2, np.array([e]), h, n)[0]

    roots = []
    for i in sign_change_brackets(gvals):
        lo, hi = grid[i], grid[i + 1]
        if gvals[i] == 0.0:
            roots.append(float(lo))
            continue
        roots.append(brentq(g, lo, hi, xtol=cfg.root_tol, rtol=4 * np.finfo(float).eps, maxiter=200))
    return roots


def find_real_eigenvalues(spec: PotentialSpec, cfg: ShootingConfig | None = None, window=None) -> SpectrumResult:
    """Scan ``G(E)`` over ``(-v1, 0)``, refine sign changes, filter by ``|F|``.

    Parameters
    ----------
    spec : PotentialSpec
    cfg : ShootingConfig, optional
    window : (float, float), optional
        Restrict the scan to ``(lo, hi)`` inside the bound-state window; the
        grid density stays ``cfg.e_scan_points`` across the sub-window.
    """
    cfg = cfg or ShootingConfig()
    eps = cfg.root_tol
    lo, hi = -spec.v1 + eps, -eps
    if window is not None:
        lo, hi = max(lo, window[0]), min(hi, window[1])
    grid = np.linspace(lo, hi, cfg.e_scan_points)
    gvals = g_values(spec, grid, cfg)
    skipped = grid[~np.isfinite(gvals)]
    if skipped.size:
        log.debug("skipped %d overflowing grid energies", skipped.size)

    candidates = refine_roots(spec, grid, gvals, cfg)
    accepted, residuals, rejected = [], [], []
    for e in candidates:
        res = newton_residual(spec, e, cfg)
        if res <= cfg.residual_tol:
            accepted.append(e)
            residuals.append(res)
        else:
            rejected.append((e, res))
    order = np.argsort(accepted)
    return SpectrumResult(
        eigenvalues=np.asarray(accepted, dtype=float)[order],
        residuals=np.asarray(residuals, dtype=float)[order],
        method="shooting",
        diagnostics={
            "L": cfg.matching_distance(spec),
            "step": cfg.step,
            "e_scan_points": cfg.e_scan_points,
            "skipped_energies": skipped.tolist(),
            "rejected": rejected,
        },
    )
