from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ConfigError(ValueError):
    """Incompatible or invalid solver configuration."""


class DomainError(ValueError):
    """Energy outside the bound-state window ``(-v1, 0)``."""


class OverflowIntegrationError(FloatingPointError):
    """Non-finite values appeared while integrating the wave equation."""


class NonConvergenceError(RuntimeError):
    """An iterative eigensolver failed to converge."""


@dataclass
class SpectrumResult:
    """Real eigenvalues found at one parameter point.

    ``residuals`` holds one diagnostic number per eigenvalue; its meaning
    depends on ``method`` (relative matching mismatch for shooting, the
    eliminant's imaginary-to-real ratio for the analytic route, ``|Im E|``
    for the matrix routes).
    """

    eigenvalues: np.ndarray
    residuals: np.ndarray
    method: str
    diagnostics: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.eigenvalues)

    def __iter__(self):
        return iter(self.eigenvalues)


def sign_change_brackets(values):
    """Indices ``i`` where ``values[i]`` and ``values[i+1]`` have opposite signs.

    NaN entries never bracket. An exact zero brackets with its right neighbour.
    """
    values = np.asarray(values, dtype=float)
    s = np.sign(values)
    ok = np.isfinite(values[:-1]) & np.isfinite(values[1:])
    flips = (s[:-1] * s[1:] < 0) | ((s[:-1] == 0) & ok)
    return np.nonzero(flips & ok)[0]
