"""Real spectra, exceptional points and level crossings of 1-D PT-symmetric wells."""

from ._common import ConfigError, DomainError, NonConvergenceError, SpectrumResult
from .estimator import SpectrumTracer
from .potentials import Model, PotentialSpec, evaluate
from .rectwell import rect_spectrum
from .shooting import ShootingConfig, find_real_eigenvalues
from .trace import Method, SweepConfig, detect_crossings, locate_eps, real_spectrum, sweep

__all__ = [
    "ConfigError", "DomainError", "NonConvergenceError", "SpectrumResult", "SpectrumTracer",
    "Model", "PotentialSpec", "evaluate", "rect_spectrum", "ShootingConfig",
    "find_real_eigenvalues", "Method", "SweepConfig", "detect_crossings", "locate_eps",
    "real_spectrum", "sweep",
]
