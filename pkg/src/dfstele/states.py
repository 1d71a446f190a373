"""Input states, the displaced-Fock-state resource and their characteristic functions.

All characteristic functions use the symmetric ordering chi(gamma) = Tr[D(gamma) rho].
They accept a :class:`PhasePoint`, a complex scalar or a complex ndarray for
``gamma``; array inputs are evaluated elementwise.
"""

from dataclasses import dataclass
import math
from typing import Union

import numpy as np

from .special import laguerre

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhasePoint:
    """Phase-space point, stored as gamma = (x + i p) / sqrt(2).

    This is the only place the sqrt(2) between the complex amplitude and
    the quadrature pair lives; d^2 gamma = dx dp / 2.
    """

    gamma: complex

    def __post_init__(self):
        object.__setattr__(self, "gamma", complex(self.gamma))

    @classmethod
    def from_xp(cls, x, p):
        return cls((x + 1j * p) / math.sqrt(2.0))

    @property
    def x(self):
        return math.sqrt(2.0) * self.gamma.real

    @property
    def p(self):
        return math.sqrt(2.0) * self.gamma.imag

    def conj(self):
        return PhasePoint(self.gamma.conjugate())

    def scale(self, factor):
        return PhasePoint(factor * self.gamma)


def _as_gamma(g):
    if isinstance(g, PhasePoint):
        return g.gamma
    return np.asarray(g, dtype=complex)[()] if np.ndim(g) == 0 else np.asarray(g, dtype=complex)


@dataclass(frozen=True)
class CoherentState:
    """Coherent state |alpha>."""

    alpha: complex = 0.0

    def __post_init__(self):
        a = complex(self.alpha)
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise ValueError("coherent amplitude must be finite")
        object.__setattr__(self, "alpha", a)


@dataclass(frozen=True)
class SqueezedState:
    """Squeezed vacuum S(r e^{i phi})|0>; ``phi`` is reduced into [0, 2 pi)."""

    r: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if not self.r >= 0:
            raise ValueError(f"squeezing magnitude r must be >= 0, got {self.r}")
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "phi", float(self.phi) % TWO_PI)

    @property
    def epsilon(self):
        return self.r * np.exp(1j * self.phi)


InputState = Union[CoherentState, SqueezedState]


@dataclass(frozen=True)
class DFSChannel:
    """Two-mode resource D(alpha1) D(alpha2) |n1, n2>.

    Mode 1 is the sender's half (mode A), mode 2 the receiver's (mode B).
    """

    alpha1: complex = 0.0
    alpha2: complex = 0.0
    n1: int = 0
    n2: int = 0

    def __post_init__(self):
        for name in ("n1", "n2"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v}")
            object.__setattr__(self, name, int(v))
        object.__setattr__(self, "alpha1", complex(self.alpha1))
        object.__setattr__(self, "alpha2", complex(self.alpha2))


def _displacement_phase(alpha, gamma):
    # alpha* gamma - alpha gamma*, purely imaginary
    return np.conj(alpha) * gamma - alpha * np.conj(gamma)


def chi_coherent(s, g):
    """chi(gamma) = exp(-|gamma|^2 / 2) exp(alpha* gamma - alpha gamma*)."""
    gamma = _as_gamma(g)
    return np.exp(-0.5 * np.abs(gamma) ** 2 + _displacement_phase(s.alpha, gamma))


def squeezed_xi(s, gamma):
    return gamma * np.cosh(s.r) + np.conj(gamma) * np.exp(1j * s.phi) * np.sinh(s.r)


def chi_squeezed(s, g):
    """chi(gamma) = exp(-|xi|^2 / 2), xi = gamma cosh r + gamma* e^{i phi} sinh r."""
    gamma = _as_gamma(g)
    xi = squeezed_xi(s, gamma)
    return np.exp(-0.5 * np.abs(xi) ** 2) + 0j


def chi_input(s, g):
    """Dispatch on the input-state variant."""
    if isinstance(s, CoherentState):
        return chi_coherent(s, g)
    if isinstance(s, SqueezedState):
        return chi_squeezed(s, g)
    raise TypeError(f"unsupported input state {type(s).__name__}")


def chi_dfs(c, g1, g2):
    """Two-mode displaced-Fock-state characteristic function.

    A product of single-mode factors
    exp(-|gamma_j|^2/2 + alpha_j* gamma_j - alpha_j gamma_j*) L_{n_j}(|gamma_j|^2).
    """
    z1 = _as_gamma(g1)
    z2 = _as_gamma(g2)
    t1 = np.abs(z1) ** 2
    t2 = np.abs(z2) ** 2
    gauss = np.exp(
        -0.5 * t1
        - 0.5 * t2
        + _displacement_phase(c.alpha1, z1)
        + _displacement_phase(c.alpha2, z2)
    )
    return gauss * laguerre(c.n1, 0, t1) * laguerre(c.n2, 0, t2)
