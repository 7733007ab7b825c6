"""Parameter sweeps in v2: branch tracking, exceptional points, crossings."""

from __future__ import annotations

import enum
import logging
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from ._common import ConfigError, SpectrumResult
from .hobasis import BasisConfig, gaussian_spectrum, wc_spectrum
from .potentials import Model, PotentialSpec
from .rectwell import rect_spectrum
from .shooting import ShootingConfig, find_real_eigenvalues

log = logging.getLogger(__name__)


class Method(str, enum.Enum):
    SHOOTING = "shooting"
    ANALYTIC = "analytic"
    HO_BASIS = "ho-basis"
    WC_PENCIL = "wc-pencil"

    @classmethod
    def parse(cls, token) -> "Method":
        if isinstance(token, cls):
            return token
        try:
            return cls(str(token).strip().lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise ConfigError(f"unknown method {token!r} (expected one of: {names})") from None


_ONLY_FOR = {Method.ANALYTIC: Model.RECT, Method.HO_BASIS: Model.GAUSSIAN, Method.WC_PENCIL: Model.WIGNER_COULOMB}


class AmbiguousEPWarning(UserWarning):
    """An EP bracket whose real-root count does not drop by exactly two."""


@dataclass(frozen=True)
class SweepConfig:
    """Sweep grid, solver choice and linking/EP tolerances.

    ``steps`` is the number of grid points from ``v2_min`` to ``v2_max``
    inclusive. ``match_gap=None`` means three times the median level
    spacing at ``v2_min``. Shooting sweeps integrate with ``step=1e-2``
    unless ``shooting`` says otherwise.
    """

    v2_min: float = 0.0
    v2_max: float = 1.0
    steps: int = 400
    method: Method = Method.SHOOTING
    match_gap: float | None = None
    ep_tol_v2: float = 1e-3
    shooting: ShootingConfig = field(default_factory=lambda: ShootingConfig(step=1e-2))
    basis: BasisConfig | None = None
    im_tol: float | None = None
    conv_check: int = 20
    refine: int = 10
    threads: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "method", Method.parse(self.method))
        if self.v2_min > self.v2_max:
            raise ConfigError("v2_min must not exceed v2_max")
        if self.steps < 2 and self.v2_min != self.v2_max:
            raise ConfigError("steps must be >= 2")
        if self.ep_tol_v2 <= 0:
            raise ConfigError("ep_tol_v2 must be positive")
        if self.match_gap is not None and self.match_gap <= 0:
            raise ConfigError("match_gap must be positive")

    def grid(self) -> np.ndarray:
        if self.v2_min == self.v2_max:
            return np.array([float(self.v2_min)])
        return np.linspace(self.v2_min, self.v2_max, self.steps)

    def basis_for(self, model: Model) -> BasisConfig:
        if self.basis is not None:
            return self.basis
        return BasisConfig(n_basis=140) if model is Model.WIGNER_COULOMB else BasisConfig(n_basis=160)


@dataclass
class Termination:
    """Branches that stop being real (or start) between two v2 values.

    ``kind`` is ``"pair"`` for two adjacent branches vanishing together (an
    exceptional point), ``"birth-pair"`` for two appearing together, and
    ``"single"``/``"birth"`` for lone branches (typically crossing the
    ``E = 0`` threshold).
    """

    labels: tuple
    interval: tuple
    energies: tuple
    kind: str = "pair"


@dataclass
class SpectralCurves:
    v2_grid: np.ndarray
    branches: dict
    terminations: list
    births: list = field(default_factory=list)
    spectra: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def branch_arrays(self, label):
        pts = self.branches[label]
        return np.array([p[0] for p in pts]), np.array([p[1] for p in pts])

    def rows(self):
        """``(v2, label, energy)`` sorted by v2 then label."""
        out = [(v2, label, e) for label, pts in self.branches.items() for v2, e in pts]
        out.sort(key=lambda r: (r[0], r[1]))
        return out

    def count_at(self, v2):
        return sum(1 for pts in self.branches.values() for p in pts if p[0] == v2)


@dataclass
class ExceptionalPoint:
    v2c: float
    e_c: float
    branch_pair: tuple
    method: str
    kind: str = "coalescence"
    bracket: tuple = ()
    ambiguous: bool = False


@dataclass
class CrossingEvent:
    v2_star: float
    e_star: float
    branch_pair: tuple


# --------------------------------------------------------------------------
# solver dispatch

def check_method(spec: PotentialSpec, method: Method) -> None:
    need = _ONLY_FOR.get(method)
    if need is not None and spec.model is not need:
        raise ConfigError(f"method {method.value!r} only applies to the {need.value!r} model, not {spec.model.value!r}")


def real_spectrum(spec: PotentialSpec, cfg: SweepConfig, window=None) -> SpectrumResult:
    """Real spectrum at one point with the sweep's method and settings."""
    method = cfg.method
    check_method(spec, method)
    if method is Method.SHOOTING:
        return find_real_eigenvalues(spec, cfg.shooting, window=window)
    if method is Method.ANALYTIC:
        return rect_spectrum(spec.v1, spec.v2, spec.a, window=window)
    if method is Method.HO_BASIS:
        return gaussian_spectrum(spec.v1, spec.v2, cfg.basis_for(spec.model), im_tol=cfg.im_tol, window=window)
    return wc_spectrum(spec.v1, spec.v2, cfg.basis_for(spec.model), im_tol=cfg.im_tol, window=window,
                       check_step=cfg.conv_check)


def _thread_count(cfg: SweepConfig) -> int:
    n = cfg.threads
    if n is None:
        try:
            n = int(os.environ.get("PTSPEC_THREADS", "0"))
        except ValueError:
            n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def _spectra(spec, cfg, v2_values):
    def one(v2):
        return real_spectrum(spec.with_v2(float(v2)), cfg).eigenvalues

    workers = _thread_count(cfg)
    if workers == 1 or len(v2_values) == 1:
        return [one(v) for v in v2_values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, v2_values))


# --------------------------------------------------------------------------
# linking

class _Linker:
    def __init__(self, match_gap):
        self.match_gap = match_gap
        self.branches = {}
        self.alive = []
        self.next_label = 0
        self.terminations = []
        self.births = []

    def start(self, v2, energies):
        for e in np.sort(energies):
            self._new(v2, e)

    def _new(self, v2, e):
        label = self.next_label
        self.next_label += 1
        self.branches[label] = [(float(v2), float(e))]
        self.alive.append(label)
        return label

    def _predicted(self, label, v2):
        pts = self.branches[label]
        if len(pts) < 2:
            return pts[-1][1]
        (x0, e0), (x1, e1) = pts[-2], pts[-1]
        return e1 + (e1 - e0) / (x1 - x0) * (v2 - x1)

    def propose(self, v2, energies):
        """Assignment of alive branches to ``energies`` without committing."""
        energies = np.asarray(energies, dtype=float)
        alive = list(self.alive)
        if not alive or not energies.size:
            return alive, energies, {}
        pred = np.array([self._predicted(lb, v2) for lb in alive])
        last = np.array([self.branches[lb][-1][1] for lb in alive])
        cost = np.minimum(np.abs(pred[:, None] - energies[None, :]), np.abs(last[:, None] - energies[None, :]))
        big = 1e6 * (1.0 + cost.max())
        masked = np.where(cost <= self.match_gap, cost, big)
        rows, cols = linear_sum_assignment(masked)
        match = {alive[r]: c for r, c in zip(rows, cols) if masked[r, c] < big}
        return alive, energies, match

    def commit(self, v2_prev, v2, energies):
        alive, energies, match = self.propose(v2, energies)
        gone = [lb for lb in alive if lb not in match]
        used = set(match.values())
        fresh = [i for i in range(energies.size) if i not in used]
        for lb, c in match.items():
            self.branches[lb].append((float(v2), float(energies[c])))
        self.alive = [lb for lb in alive if lb in match]
        if gone:
            self._record_gone(gone, v2_prev, v2)
        new_labels = [self._new(v2, energies[i]) for i in fresh]
        if new_labels:
            self._record_born(new_labels, v2_prev, v2)
        self.alive.sort(key=lambda lb: self.branches[lb][-1][1])

    def _record_gone(self, gone, v2_prev, v2):
        gone = sorted(gone, key=lambda lb: self.branches[lb][-1][1])
        used = set()
        # adjacent vanishing branches (in energy order at v2_prev) pair up
        for a, b in zip(gone, gone[1:]):
            if a in used or b in used:
                continue
            ea, eb = self.branches[a][-1][1], self.branches[b][-1][1]
            between = [
                lb for lb in self.alive
                if min(ea, eb) < self.branches[lb][-2 if len(self.branches[lb]) > 1 else -1][1] < max(ea, eb)
            ]
            if not between:
                self.terminations.append(Termination((a, b), (v2_prev, v2), (ea, eb), "pair"))
                used.update((a, b))
        for lb in gone:
            if lb not in used:
                e = self.branches[lb][-1][1]
                self.terminations.append(Termination((lb,), (v2_prev, v2), (e,), "single"))

    def _record_born(self, labels, v2_prev, v2):
        labels = sorted(labels, key=lambda lb: self.branches[lb][0][1])
        used = set()
        for a, b in zip(labels, labels[1:]):
            ea, eb = self.branches[a][0][1], self.branches[b][0][1]
            between = [lb for lb in self.alive if lb not in labels and min(ea, eb) < self.branches[lb][-1][1] < max(ea, eb)]
            if not between:
                self.births.append(Termination((a, b), (v2_prev, v2), (ea, eb), "birth-pair"))
                used.update((a, b))
        for lb in labels:
            if lb not in used:
                self.births.append(Termination((lb,), (v2_prev, v2), (self.branches[lb][0][1],), "birth"))


def _scan_spacing(spec, cfg):
    if cfg.method is Method.SHOOTING:
        return spec.v1 / cfg.shooting.e_scan_points
    if cfg.method is Method.ANALYTIC:
        return spec.v1 / 2000
    return None


def _rescan(spec, cfg, linker, v2, energies):
    """Dense local re-scan around branches the regular grid lost.

    Near a coalescence the two roots get closer than the energy grid
    spacing and the plain scan sees neither; this looks again with a grid
    about a hundred times finer before a termination is accepted.
    """
    spacing = _scan_spacing(spec, cfg)
    energies = np.asarray(energies, dtype=float)
    if spacing is None:
        return energies
    alive, energies_, match = linker.propose(v2, energies)
    lost = [lb for lb in alive if lb not in match]
    if not lost:
        return energies
    found = list(energies)
    point = spec.with_v2(v2)
    for lb in lost:
        e = linker.branches[lb][-1][1]
        lo, hi = e - 10 * spacing, e + 10 * spacing
        for r in real_spectrum(point, cfg, window=(lo, hi)).eigenvalues:
            if not found or np.min(np.abs(np.asarray(found) - r)) > 1e-7 * max(1.0, abs(r)):
                found.append(float(r))
    return np.sort(np.asarray(found, dtype=float))


def _default_gap(energies, v1):
    e = np.sort(np.asarray(energies, dtype=float))
    if e.size >= 2:
        return 3.0 * float(np.median(np.diff(e)))
    return 0.25 * v1


def sweep(spec: PotentialSpec, cfg: SweepConfig) -> SpectralCurves:
    """Real spectrum over the v2 grid with branches linked step to step.

    Wherever a branch vanishes or appears between two grid points, the
    interval is re-sampled ``cfg.refine`` times finer before the event is
    recorded, so coarse grids do not fake terminations.
    """
    return sweep_grid(spec, cfg, cfg.grid())


def sweep_grid(spec: PotentialSpec, cfg: SweepConfig, grid) -> SpectralCurves:
    """:func:`sweep` on an explicit increasing v2 grid (``cfg``'s range is ignored)."""
    check_method(spec, cfg.method)
    grid = np.asarray(grid, dtype=float).ravel()
    if grid.size == 0:
        raise ConfigError("empty v2 grid")
    if np.any(np.diff(grid) <= 0):
        raise ConfigError("v2 grid must be strictly increasing")
    spectra = _spectra(spec, cfg, grid)
    gap = cfg.match_gap or _default_gap(spectra[0], spec.v1)
    linker = _Linker(gap)
    linker.start(grid[0], spectra[0])
    all_points = {float(grid[0]): spectra[0]}
    for i in range(1, len(grid)):
        v_prev, v = float(grid[i - 1]), float(grid[i])
        spectra[i] = _rescan(spec, cfg, linker, v, spectra[i])
        alive, energies, match = linker.propose(v, spectra[i])
        eventful = len(match) != len(alive) or len(match) != energies.size
        if eventful and cfg.refine > 1:
            sub = np.linspace(v_prev, v, cfg.refine + 1)[1:-1]
            sub_spectra = _spectra(spec, cfg, sub)
            prev = v_prev
            for s, es in zip(sub, sub_spectra):
                es = _rescan(spec, cfg, linker, float(s), es)
                linker.commit(prev, float(s), es)
                all_points[float(s)] = es
                prev = float(s)
            spectra[i] = _rescan(spec, cfg, linker, v, spectra[i])
            linker.commit(prev, v, spectra[i])
        else:
            linker.commit(v_prev, v, spectra[i])
        all_points[v] = spectra[i]

    v2_all = np.array(sorted(all_points))
    counts = [len(all_points[v]) for v in v2_all]
    increases = [float(v2_all[j + 1]) for j in range(len(counts) - 1) if counts[j + 1] > counts[j]]
    if increases:
        log.info("real-level count increased at v2 = %s", increases[:10])
    return SpectralCurves(
        v2_grid=v2_all,
        branches=linker.branches,
        terminations=linker.terminations,
        births=linker.births,
        spectra={float(v): np.asarray(all_points[v]) for v in v2_all},
        diagnostics={"match_gap": gap, "count_increases": increases, "method": cfg.method.value},
    )


# --------------------------------------------------------------------------
# exceptional points

def _pair_window(curves, event, v2_ref):
    """Energy window around a pair at ``v2_ref`` that excludes neighbours."""
    ea, eb = sorted(event.energies)
    spread = max(eb - ea, 1e-3)
    lo, hi = ea - 0.5 * spread - 0.05, eb + 0.5 * spread + 0.05
    others = [e for e in curves.spectra.get(v2_ref, []) if not (ea - 1e-12 <= e <= eb + 1e-12)]
    below = [e for e in others if e < ea]
    above = [e for e in others if e > eb]
    if below:
        lo = max(lo, 0.5 * (max(below) + ea))
    if above:
        hi = min(hi, 0.5 * (min(above) + eb))
    return lo, hi


def _count(spec, cfg, v2, window):
    return real_spectrum(spec.with_v2(v2), cfg, window=window).eigenvalues


def _ambiguous(ev, lo, hi, energies, method, birth, counts):
    warnings.warn(
        f"EP bracket ({lo:.6g}, {hi:.6g}) for branches {ev.labels} has real-root counts "
        f"{counts[0]} -> {counts[1]}; left unrefined",
        AmbiguousEPWarning,
        stacklevel=3,
    )
    return ExceptionalPoint(0.5 * (lo + hi), float(np.mean(energies)), tuple(ev.labels), method,
                            "emergence" if birth else "coalescence", (lo, hi), True)


def locate_eps(spec: PotentialSpec, curves: SpectralCurves, cfg: SweepConfig,
               include_births: bool = True, edge_fraction: float = 0.05):
    """Bisect every pair termination (and pair birth) down to ``ep_tol_v2``.

    The bisection tracks the number of real roots inside the pair's energy
    window; ``e_c`` is the mean of the two roots at the last bracket end
    where both exist. A lone branch vanishing deeper than
    ``edge_fraction * v1`` below threshold is reported unrefined with an
    :class:`AmbiguousEPWarning`; shallower ones are taken to have left
    through the continuum edge.
    """
    events = [t for t in curves.terminations if t.kind == "pair"]
    if include_births:
        events += [t for t in curves.births if t.kind == "birth-pair"]
    singles = [t for t in curves.terminations
               if t.kind == "single" and abs(t.energies[0]) > edge_fraction * spec.v1]
    method = cfg.method.value
    eps = []
    for ev in singles:
        lo, hi = map(float, ev.interval)
        eps.append(_ambiguous(ev, lo, hi, ev.energies, method, False, (1, 0)))
    for ev in events:
        birth = ev.kind == "birth-pair"
        lo, hi = map(float, ev.interval)
        window = _pair_window(curves, ev, hi if birth else lo)
        alive_side = _count(spec, cfg, hi if birth else lo, window)
        dead_side = _count(spec, cfg, lo if birth else hi, window)
        if not birth:
            # the pair can outlive the coarse scan by a little; walk forward
            width = hi - lo
            for _ in range(20):
                if dead_side.size != 2:
                    break
                lo, hi = hi, hi + width
                alive_side, dead_side = dead_side, _count(spec, cfg, hi, window)
        if alive_side.size != 2 or dead_side.size != 0:
            energies = alive_side if alive_side.size else ev.energies
            eps.append(_ambiguous(ev, lo, hi, energies, method, birth, (alive_side.size, dead_side.size)))
            continue
        last_pair = alive_side
        while hi - lo > cfg.ep_tol_v2:
            mid = 0.5 * (lo + hi)
            roots = _count(spec, cfg, mid, window)
            alive = roots.size >= 2
            if alive:
                last_pair = roots
            if alive != birth:
                lo = mid
            else:
                hi = mid
        eps.append(ExceptionalPoint(
            v2c=0.5 * (lo + hi),
            e_c=float(np.mean(last_pair[:2])),
            branch_pair=tuple(ev.labels),
            method=method,
            kind="emergence" if birth else "coalescence",
            bracket=(lo, hi),
        ))
    eps.sort(key=lambda ep: ep.v2c)
    return eps


# --------------------------------------------------------------------------
# crossings

def detect_crossings(curves: SpectralCurves, min_persist: int = 2):
    """Sign changes of ``E_i - E_j`` on the v2 values both branches share.

    A sign change only counts when both branches stay real for at least
    ``min_persist`` shared points on either side, which rules out label
    swaps right before a coalescence.
    """
    events = []
    labels = sorted(curves.branches)
    data = {lb: dict(curves.branches[lb]) for lb in labels}
    for ia, a in enumerate(labels):
        for b in labels[ia + 1:]:
            common = sorted(set(data[a]) & set(data[b]))
            if len(common) < 2:
                continue
            d = np.array([data[a][v] - data[b][v] for v in common])
            s = np.sign(d)
            nz = np.nonzero(s)[0]
            for j, k in zip(nz, nz[1:]):
                if s[j] == s[k]:
                    continue
                if j + 1 < min_persist or len(common) - k < min_persist:
                    continue
                x0, x1 = common[j], common[k]
                t = d[j] / (d[j] - d[k])
                v_star = x0 + t * (x1 - x0)
                ea = data[a][x0] + t * (data[a][x1] - data[a][x0])
                eb = data[b][x0] + t * (data[b][x1] - data[b][x0])
                events.append(CrossingEvent(float(v_star), float(0.5 * (ea + eb)), (a, b)))
    events.sort(key=lambda c: c.v2_star)
    return events
