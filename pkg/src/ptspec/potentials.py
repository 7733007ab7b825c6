"""Complex PT-symmetric scattering potentials.

Every model has the form ``V(x) = -v1 * f_even(x) + 1j * v2 * f_odd(x)``
with ``f_even >= 0`` and ``f_odd`` odd, so ``V(-x) == conj(V(x))``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np


class InvalidSpecError(ValueError):
    """Raised for an unknown model or out-of-range parameters."""


class Model(str, enum.Enum):
    RECT = "rect"
    SCARF2 = "scarf2"
    GAUSSIAN = "gaussian"
    QUARTIC = "quartic"
    SECH = "sech"
    WIGNER_COULOMB = "wigner-coulomb"

    @classmethod
    def parse(cls, token) -> "Model":
        if isinstance(token, cls):
            return token
        try:
            return cls(str(token).strip().lower())
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise InvalidSpecError(f"unknown potential model {token!r} (expected one of: {names})") from None


@dataclass(frozen=True)
class PotentialSpec:
    """A potential model plus its real parameters.

    ``a`` is the half-width of the rectangular well and is ignored by the
    other models.
    """

    model: Model
    v1: float
    v2: float = 0.0
    a: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "model", Model.parse(self.model))
        for name in ("v1", "v2", "a"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise InvalidSpecError(f"{name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.v1 <= 0:
            raise InvalidSpecError(f"v1 must be positive, got {self.v1}")
        if self.model is Model.RECT and self.a <= 0:
            raise InvalidSpecError(f"a must be positive for the rectangular well, got {self.a}")

    def with_v2(self, v2: float) -> "PotentialSpec":
        return replace(self, v2=v2)

    def __call__(self, x):
        return evaluate(self, x)


def profiles(model, x, a: float = 2.0):
    """Return ``(f_even, f_odd)`` sampled at ``x`` for a model.

    Parameters
    ----------
    model : Model or str
    x : array_like
    a : float
        Rectangular half-width.

    Returns
    -------
    f_even, f_odd : ndarray
        Real arrays with ``V = -v1 * f_even + 1j * v2 * f_odd``.
    """
    model = Model.parse(model)
    x = np.asarray(x, dtype=float)
    if model is Model.RECT:
        ax = np.abs(x)
        f_even = (ax <= a).astype(float)
        # Theta_2 is +1 on [0, a) and -1 on (-a, 0); V carries -i*v2*Theta_2
        theta2 = np.where(ax < a, np.where(x >= 0, 1.0, -1.0), 0.0)
        return f_even, -theta2
    if model is Model.SCARF2:
        s = 1.0 / np.cosh(x)
        return s * s, s * np.tanh(x)
    if model is Model.GAUSSIAN:
        g = np.exp(-x * x)
        return g, x * g
    if model is Model.QUARTIC:
        d = 1.0 / (1.0 + x**4)
        return d, x * d
    if model is Model.SECH:
        s = 1.0 / np.cosh(x)
        return s, s * np.tanh(x)
    if model is Model.WIGNER_COULOMB:
        d = 1.0 / (1.0 + x * x)
        return d, x * d
    raise InvalidSpecError(f"unhandled model {model!r}")


def evaluate(spec: PotentialSpec, x):
    """Complex potential value(s) at real ``x``; scalar in, complex out."""
    if not isinstance(spec, PotentialSpec):
        raise InvalidSpecError(f"expected a PotentialSpec, got {type(spec).__name__}")
    f_even, f_odd = profiles(spec.model, x, spec.a)
    value = -spec.v1 * f_even + 1j * spec.v2 * f_odd
    if np.ndim(value) == 0:
        return complex(value)
    return value


def check_pt_symmetry(spec: PotentialSpec, samples: int = 1000, xmax: float = 10.0) -> float:
    """Max of ``|V(-x) - conj(V(x))|`` over ``samples`` points in ``[0, xmax]``.

    The rectangular well's jump at ``x = 0`` is excluded from the sample.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    if xmax <= 0:
        raise ValueError("xmax must be positive")
    x = np.linspace(0.0, xmax, samples)
    if spec.model is Model.RECT:
        x = x[x != 0.0]
    return float(np.max(np.abs(evaluate(spec, -x) - np.conj(evaluate(spec, x)))))
