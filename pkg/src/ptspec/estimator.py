"""scikit-learn style front end to the v2 sweep.

The "samples" are v2 values; ``fit`` traces the real branches over them,
``transform`` returns the branch energies as a table and ``predict`` the
number of real levels.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .hobasis import BasisConfig
from .potentials import Model, PotentialSpec
from .shooting import ShootingConfig
from .trace import Method, SweepConfig, detect_crossings, locate_eps, sweep_grid

_DEFAULT_METHOD = {
    Model.RECT: Method.ANALYTIC,
    Model.GAUSSIAN: Method.HO_BASIS,
    Model.WIGNER_COULOMB: Method.WC_PENCIL,
}


def _v2_column(X) -> np.ndarray:
    if np.ndim(X) <= 1:
        X = np.reshape(np.asarray(X, dtype=float), (-1, 1))
    X = check_array(X, dtype=np.float64, ensure_2d=True)
    if X.shape[1] != 1:
        raise ValueError(f"expected a single column of v2 values, got {X.shape[1]} columns")
    return X[:, 0]


def validate_v2(X) -> np.ndarray:
    """Column (or flat) array of v2 values -> sorted unique 1-D float array."""
    return np.unique(_v2_column(X))


class SpectrumTracer(TransformerMixin, BaseEstimator):
    """Trace the real spectrum of a PT-symmetric well over v2.

    Parameters
    ----------
    potential : str
        Model token (``rect``, ``scarf2``, ``gaussian``, ``quartic``,
        ``sech``, ``wigner-coulomb``).
    v1 : float
        Well depth.
    a : float
        Half-width, rectangular well only.
    method : str or None
        Solver token; ``None`` picks the model's matrix/analytic method
        where one exists and shooting otherwise.
    n_basis, step, L, e_scan_points : solver settings, ``None`` for defaults.
    ep_tol_v2 : float
        Bisection tolerance for exceptional points.
    refine : int
        Local grid refinement factor around branch events.
    threads : int or None
        Worker threads; ``None`` defers to ``PTSPEC_THREADS``.

    Attributes
    ----------
    spec_ : PotentialSpec
    config_ : SweepConfig
    curves_ : SpectralCurves
    exceptional_points_ : list of ExceptionalPoint
    crossings_ : list of CrossingEvent
    n_levels_ : int
        Number of distinct branch labels.
    """

    def __init__(self, potential="gaussian", v1=50.0, a=2.0, method=None, n_basis=None,
                 step=None, L=None, e_scan_points=None, ep_tol_v2=1e-3, refine=10, threads=None):
        self.potential = potential
        self.v1 = v1
        self.a = a
        self.method = method
        self.n_basis = n_basis
        self.step = step
        self.L = L
        self.e_scan_points = e_scan_points
        self.ep_tol_v2 = ep_tol_v2
        self.refine = refine
        self.threads = threads

    def _make_config(self, spec, grid):
        method = Method.parse(self.method) if self.method is not None else _DEFAULT_METHOD.get(spec.model, Method.SHOOTING)
        shoot = ShootingConfig(
            L=self.L,
            step=self.step if self.step is not None else 1e-2,
            e_scan_points=self.e_scan_points if self.e_scan_points is not None else 2000,
        )
        basis = BasisConfig(n_basis=int(self.n_basis)) if self.n_basis is not None else None
        return SweepConfig(
            v2_min=float(grid[0]), v2_max=float(grid[-1]), steps=max(2, grid.size), method=method,
            ep_tol_v2=self.ep_tol_v2, shooting=shoot, basis=basis, refine=int(self.refine),
            threads=self.threads,
        )

    def fit(self, X, y=None):
        grid = validate_v2(X)
        self.spec_ = PotentialSpec(Model.parse(self.potential), float(self.v1), 0.0, float(self.a))
        self.config_ = self._make_config(self.spec_, grid)
        self.curves_ = sweep_grid(self.spec_, self.config_, grid)
        self.exceptional_points_ = locate_eps(self.spec_, self.curves_, self.config_)
        self.crossings_ = detect_crossings(self.curves_)
        self.n_levels_ = len(self.curves_.branches)
        return self

    def transform(self, X):
        """Energies of every branch at the requested v2 values, NaN where not real.

        Values on the fitted grid are returned as traced; other v2 values
        get linear interpolation inside a branch's support.
        """
        check_is_fitted(self, "curves_")
        v2 = _v2_column(X)
        out = np.full((v2.size, self.n_levels_), np.nan)
        for j, label in enumerate(sorted(self.curves_.branches)):
            xs, es = self.curves_.branch_arrays(label)
            inside = (v2 >= xs[0]) & (v2 <= xs[-1])
            if xs.size == 1:
                inside &= v2 == xs[0]
                out[inside, j] = es[0]
            else:
                out[inside, j] = np.interp(v2[inside], xs, es)
        return out

    def predict(self, X):
        """Number of real levels at each v2."""
        return np.sum(np.isfinite(self.transform(X)), axis=1)
