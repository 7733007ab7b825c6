"""Self-check suite behind ``ptspec validate``.

Each check compares a production routine against an independent oracle
(or a published exceptional-point list) and yields a :class:`Check` row.
"""

from __future__ import annotations

import functools
import logging
import time
import warnings
from dataclasses import dataclass

import numpy as np

from . import hobasis, oracles
from .linalg import det_scan, eig_complex, eig_pencil, log_det_mismatch, pencil_log_det
from .potentials import Model, PotentialSpec, check_pt_symmetry
from .rectwell import rect_spectrum
from .shooting import ShootingConfig, find_real_eigenvalues, integrate_fundamental
from .trace import AmbiguousEPWarning, Method, SweepConfig, detect_crossings, locate_eps, sweep

log = logging.getLogger(__name__)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


# --------------------------------------------------------------------------
# published exceptional points and the sweeps that reproduce them

@dataclass(frozen=True)
class FigureCase:
    key: str
    spec: PotentialSpec
    cfg: SweepConfig
    published: tuple
    rel_tol: float = 0.0
    abs_tol: float = 0.0
    first_only: bool = False


FIGURES = {
    "rect-40-shooting": FigureCase(
        "rect-40-shooting", PotentialSpec(Model.RECT, 40.0, 0.0, 2.0),
        SweepConfig(0.0, 8.0, 400, Method.SHOOTING), (0.96, 2.75, 4.88, 7.33), abs_tol=0.05),
    "rect-40-analytic": FigureCase(
        "rect-40-analytic", PotentialSpec(Model.RECT, 40.0, 0.0, 2.0),
        SweepConfig(0.0, 8.0, 400, Method.ANALYTIC), (0.96, 2.75, 4.88, 7.33), abs_tol=0.05),
    "rect-20-shooting": FigureCase(
        "rect-20-shooting", PotentialSpec(Model.RECT, 20.0, 0.0, 2.0),
        SweepConfig(0.0, 8.0, 400, Method.SHOOTING), (0.96, 2.75, 4.88, 7.33), abs_tol=0.05),
    "rect-20-analytic": FigureCase(
        "rect-20-analytic", PotentialSpec(Model.RECT, 20.0, 0.0, 2.0),
        SweepConfig(0.0, 8.0, 400, Method.ANALYTIC), (0.96, 2.75, 4.88, 7.33), abs_tol=0.05),
    "gaussian-shooting": FigureCase(
        "gaussian-shooting", PotentialSpec(Model.GAUSSIAN, 50.0),
        SweepConfig(0.0, 80.0, 400, Method.SHOOTING), (43.26, 55.55, 63.70), rel_tol=0.01),
    "gaussian-ho": FigureCase(
        "gaussian-ho", PotentialSpec(Model.GAUSSIAN, 50.0),
        SweepConfig(0.0, 80.0, 400, Method.HO_BASIS, basis=hobasis.BasisConfig(160, 1.0)),
        (43.26, 55.55, 63.70), rel_tol=0.01),
    "quartic-shooting": FigureCase(
        "quartic-shooting", PotentialSpec(Model.QUARTIC, 50.0),
        SweepConfig(0.0, 50.0, 400, Method.SHOOTING), (19.39, 38.87, 46.35), rel_tol=0.01),
    "sech-shooting": FigureCase(
        "sech-shooting", PotentialSpec(Model.SECH, 50.0),
        SweepConfig(0.0, 45.0, 400, Method.SHOOTING), (25.37, 31.15, 34.92, 37.35), rel_tol=0.01),
    "wc-pencil": FigureCase(
        "wc-pencil", PotentialSpec(Model.WIGNER_COULOMB, 20.0),
        SweepConfig(0.0, 22.0, 400, Method.WC_PENCIL, basis=hobasis.BasisConfig(140, 1.0)),
        (19.73, 10.87, 5.53, 2.74), rel_tol=0.015),
}
for _v1 in (2.0, 5.0, 10.0):
    FIGURES[f"scarf2-{_v1:g}"] = FigureCase(
        f"scarf2-{_v1:g}", PotentialSpec(Model.SCARF2, _v1),
        SweepConfig(0.0, 1.3 * (_v1 + 0.25), 200, Method.SHOOTING), (_v1 + 0.25,), rel_tol=0.01,
        first_only=True)
FIGURES["scarf2-50"] = FigureCase(
    "scarf2-50", PotentialSpec(Model.SCARF2, 50.0), SweepConfig(0.0, 30.0, 400, Method.SHOOTING), ())


@dataclass
class FigureRun:
    case: FigureCase
    curves: object
    eps: list
    crossings: list
    seconds: float

    def coalescences(self):
        """Refined coalescence values, ascending in v2."""
        return [ep for ep in self.eps if ep.kind == "coalescence" and not ep.ambiguous]


@functools.lru_cache(maxsize=None)
def run_figure(key: str) -> FigureRun:
    case = FIGURES[key]
    t0 = time.perf_counter()
    curves = sweep(case.spec, case.cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AmbiguousEPWarning)
        eps = locate_eps(case.spec, curves, case.cfg)
    crossings = detect_crossings(curves)
    return FigureRun(case, curves, eps, crossings, time.perf_counter() - t0)


def match_published(values, published, rel_tol=0.0, abs_tol=0.0):
    """Nearest computed value for each published one and whether it is within tolerance."""
    values = np.asarray(values, dtype=float)
    out = []
    for p in published:
        if values.size == 0:
            out.append((p, np.nan, False))
            continue
        best = float(values[np.argmin(np.abs(values - p))])
        tol = max(abs_tol, rel_tol * abs(p))
        out.append((p, best, abs(best - p) <= tol))
    return out


def _figure_check(key):
    run = run_figure(key)
    case = run.case
    values = [ep.v2c for ep in run.coalescences()]
    if case.first_only:
        values = values[:1]
    rows = match_published(values, case.published, case.rel_tol, case.abs_tol)
    ok = all(r[2] for r in rows)
    detail = "; ".join(f"{p:g}->{b:.4f}{'' if good else ' (miss)'}" for p, b, good in rows)
    if case.spec.model is Model.WIGNER_COULOMB:
        below, reversed_ = wc_ordering(run)
        ok = ok and below and reversed_
        detail += f"; all v2c < v1: {below}; highest pair first: {reversed_}"
    return ok, f"{detail} [{run.seconds:.0f} s]"


def wc_ordering(run):
    """(every EP below v1, coalescence order runs from the top pair downwards)."""
    eps = run.coalescences()
    below = bool(eps) and all(ep.v2c < run.case.spec.v1 for ep in eps)
    energies = [ep.e_c for ep in eps]  # eps are sorted by v2c
    reversed_ = len(energies) >= 2 and all(e1 > e2 for e1, e2 in zip(energies, energies[1:]))
    return below, reversed_


# --------------------------------------------------------------------------
# oracle checks

_SIX = [
    PotentialSpec(Model.RECT, 20.0, 3.0, 2.0),
    PotentialSpec(Model.SCARF2, 5.0, 2.0),
    PotentialSpec(Model.GAUSSIAN, 50.0, 10.0),
    PotentialSpec(Model.QUARTIC, 50.0, 10.0),
    PotentialSpec(Model.SECH, 50.0, 10.0),
    PotentialSpec(Model.WIGNER_COULOMB, 20.0, 5.0),
]


def check_pt():
    worst = max(check_pt_symmetry(s, 1000, 30.0) for s in _SIX)
    return worst <= 1e-12, f"max |V(-x) - conj V(x)| = {worst:.2e}"


def check_wronskian():
    cfg = ShootingConfig(step=1e-3)
    worst = 0.0
    for s in _SIX:
        for frac in (0.05, 0.3, 0.6, 0.95):
            worst = max(worst, integrate_fundamental(s, -frac * s.v1, cfg).wronskian_defect())
    return worst <= 1e-8, f"max scaled |W - 1| = {worst:.2e} (step 1e-3)"


def check_matrix_elements(n_max=40):
    q = oracles.QuadratureOracle(n_max, 200)
    N = n_max + 1
    scalar = {
        "p2": hobasis.me_p2, "x": hobasis.me_x, "x2": hobasis.me_x2, "x2p2": hobasis.me_x2p2,
        "gauss": hobasis.me_gauss, "xgauss": hobasis.me_xgauss,
    }
    dense = {
        "p2": hobasis.p2_matrix, "x": hobasis.x_matrix, "x2": hobasis.x2_matrix,
        "x2p2": hobasis.x2p2_matrix, "gauss": hobasis.gauss_matrix, "xgauss": hobasis.xgauss_matrix,
    }
    errs = {}
    for name, f in scalar.items():
        ref = q.matrix(name)
        closed = np.array([[f(m, n) for n in range(N)] for m in range(N)])
        errs[name] = max(np.max(np.abs(closed - ref)), np.max(np.abs(dense[name](N) - ref)))
    worst = max(errs, key=errs.get)
    return errs[worst] <= 1e-10, f"worst {worst}: {errs[worst]:.2e} (m, n <= {n_max})"


def check_square_well():
    ref = oracles.square_well_levels(20.0, 2.0)
    shoot = find_real_eigenvalues(PotentialSpec(Model.RECT, 20.0, 0.0, 2.0)).eigenvalues
    ana = rect_spectrum(20.0, 0.0, 2.0).eigenvalues
    if shoot.size != ref.size or ana.size != ref.size:
        return False, f"level counts: oracle {ref.size}, shooting {shoot.size}, analytic {ana.size}"
    e1, e2 = np.max(np.abs(shoot - ref)), np.max(np.abs(ana - ref))
    return e1 <= 1e-6 and e2 <= 1e-8, f"shooting {e1:.1e}, analytic {e2:.1e}"


def hermitian_limit_errors(fast=True):
    """Relative deviation of ``v2 = 0`` spectra from the finite-difference oracle.

    Shooting runs with ``L = 20`` here: at the default ``L = 12`` the
    shallowest quartic level (E ~ -0.018) still feels the ``1/x^4`` tail
    and is off by about 7e-3 relative.
    """
    out = {}
    shoot_cfg = ShootingConfig(L=20.0, step=1e-3)
    models = [(Model.RECT, 20.0), (Model.GAUSSIAN, 50.0), (Model.SECH, 50.0), (Model.QUARTIC, 50.0),
              (Model.SCARF2, 5.0)]
    if fast:
        models = models[:2]
    for model, v1 in models:
        spec = PotentialSpec(model, v1)
        # h = 1/600 puts the rectangular well's edges on cell boundaries
        fd = oracles.fd_hermitian_levels(spec, 60.0, 72000)
        cfg = ShootingConfig(step=1e-3) if model is Model.RECT else shoot_cfg
        got = find_real_eigenvalues(spec, cfg).eigenvalues
        out[f"{model.value}/shooting"] = _rel_dev(got, fd, same_count=True)
    spec = PotentialSpec(Model.GAUSSIAN, 50.0)
    out["gaussian/ho-basis"] = _rel_dev(hobasis.gaussian_spectrum(50.0, 0.0).eigenvalues,
                                        oracles.fd_hermitian_levels(spec, 60.0, 72000), same_count=True)
    # the pencil keeps only basis-converged levels; the accumulation near 0 is dropped
    spec = PotentialSpec(Model.WIGNER_COULOMB, 20.0)
    wc = hobasis.wc_spectrum(20.0, 0.0, hobasis.BasisConfig(140)).eigenvalues
    fd = oracles.fd_hermitian_levels(spec, 60.0, 12000)
    out["wigner-coulomb/wc-pencil"] = _rel_dev(wc, fd)
    return out


def _rel_dev(got, ref, same_count=False):
    got, ref = np.asarray(got), np.asarray(ref)
    if got.size == 0 or (same_count and got.size != ref.size):
        return np.inf
    # every computed level must have an oracle partner
    return float(np.max([np.min(np.abs(ref - g)) / abs(g) for g in got]))


def check_hermitian_limit(fast=True):
    errs = hermitian_limit_errors(fast)
    worst = max(errs, key=errs.get)
    return errs[worst] <= 1e-3, f"worst {worst}: {errs[worst]:.1e} relative"


def check_trace_moments():
    rng = np.random.default_rng(20240601)
    mats = [rng.standard_normal((60, 60)) + 1j * rng.standard_normal((60, 60)),
            hobasis.build_gaussian_hamiltonian(50.0, 10.0, hobasis.BasisConfig(80))]
    worst = 0.0
    for M in mats:
        res = eig_complex(M)
        if not res.converged:
            return False, "eig_complex did not converge"
        worst = max(worst, *oracles.trace_moment_errors(M, res.values))
    return worst <= 1e-8, f"max relative trace-moment error {worst:.1e}"


def check_pencil_det_scan():
    A, B = hobasis.build_wc_pencil(20.0, 5.0, hobasis.BasisConfig(60))
    energies = np.linspace(-15.0, -1.0, 5)
    direct = det_scan(A, B, energies)
    via_eigs = pencil_log_det(A, B, energies, eig_pencil(A, B).values)
    worst = float(np.max(log_det_mismatch(via_eigs, direct)))
    same_sign = np.array_equal(np.sign(np.exp(1j * direct.imag).real), np.sign(np.exp(1j * via_eigs.imag).real))
    return worst <= 1e-8 and same_sign, f"max relative determinant mismatch {worst:.1e}"


def check_cross_methods():
    spec = PotentialSpec(Model.RECT, 20.0, 3.0, 2.0)
    s = find_real_eigenvalues(spec).eigenvalues
    a = rect_spectrum(20.0, 3.0, 2.0).eigenvalues
    rect_err = np.max(np.abs(s - a)) if s.size == a.size and s.size else np.inf
    g = find_real_eigenvalues(PotentialSpec(Model.GAUSSIAN, 50.0, 10.0)).eigenvalues
    h = hobasis.gaussian_spectrum(50.0, 10.0, hobasis.BasisConfig(120)).eigenvalues
    gauss_err = abs(g[0] - h[0]) / abs(g[0]) if g.size and h.size else np.inf
    return rect_err <= 1e-6 and gauss_err <= 1e-3, (
        f"rect shooting/analytic {rect_err:.1e}; gaussian ground state shooting/HO {gauss_err:.1e} relative")


def check_v2_parity():
    worst = 0.0
    for s in _SIX:
        if s.model is Model.WIGNER_COULOMB:
            plus = hobasis.wc_spectrum(s.v1, s.v2).eigenvalues
            minus = hobasis.wc_spectrum(s.v1, -s.v2).eigenvalues
        else:
            plus = find_real_eigenvalues(s).eigenvalues
            minus = find_real_eigenvalues(s.with_v2(-s.v2)).eigenvalues
        if plus.size != minus.size:
            return False, f"{s.model.value}: {plus.size} vs {minus.size} levels"
        if plus.size:
            worst = max(worst, float(np.max(np.abs(plus - minus))))
    return worst <= 1e-6, f"max |E(v2) - E(-v2)| = {worst:.1e}"


def check_gaussian_empty_above_eps():
    res = find_real_eigenvalues(PotentialSpec(Model.GAUSSIAN, 50.0, 70.0))
    return res.eigenvalues.size == 0, f"{res.eigenvalues.size} real levels at v2 = 70"


ORACLE_CHECKS = [
    ("pt-symmetry", check_pt),
    ("wronskian", check_wronskian),
    ("matrix-elements-quadrature", check_matrix_elements),
    ("square-well-oracle", check_square_well),
    ("hermitian-limit-fd", check_hermitian_limit),
    ("trace-moments", check_trace_moments),
    ("pencil-vs-det-scan", check_pencil_det_scan),
    ("cross-method", check_cross_methods),
    ("v2-parity", check_v2_parity),
    ("gaussian-above-eps", check_gaussian_empty_above_eps),
]

FIGURE_CHECKS = [
    "rect-40-analytic", "rect-40-shooting", "gaussian-shooting", "gaussian-ho",
    "quartic-shooting", "sech-shooting", "wc-pencil", "scarf2-2", "scarf2-5", "scarf2-10",
]


def _timed(name, fn, *args):
    t0 = time.perf_counter()
    try:
        ok, detail = fn(*args)
    except Exception as exc:  # a crashing check is a failed check
        log.exception("check %s raised", name)
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    return Check(name, bool(ok), detail, time.perf_counter() - t0)


def run_checks(fast: bool = False):
    """All oracle checks; the full suite adds the published exceptional points."""
    rows = []
    for name, fn in ORACLE_CHECKS:
        if name == "hermitian-limit-fd":
            rows.append(_timed(name, fn, fast))
        else:
            rows.append(_timed(name, fn))
    if not fast:
        for key in FIGURE_CHECKS:
            rows.append(_timed(f"eps:{key}", _figure_check, key))
    return rows


def format_table(rows) -> str:
    width = max(len(r.name) for r in rows)
    lines = [f"{'check':<{width}}  result  time    detail"]
    for r in rows:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.seconds:6.1f}s  {r.detail}")
    failed = [r.name for r in rows if not r.passed]
    lines.append(f"{len(rows) - len(failed)}/{len(rows)} checks passed"
                 + (f"; failing: {', '.join(failed)}" if failed else ""))
    return "\n".join(lines)
