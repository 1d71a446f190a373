"""Teleported-state characteristic functions and the fidelity functional.

With u = g T and v = exp(-tau / 2) the lossy output is

    chi_out(gamma) = chi_in(u gamma) chi_DFS(u gamma*, v gamma) exp(-Gamma |gamma|^2)

and the fidelity is F = (1/pi) Int d^2gamma chi_in(gamma) chi_out(-gamma).
Expanding the product of Gaussians gives one complex quadratic exponent in
(gamma, gamma*) times L_{n1}(u^2 |gamma|^2) L_{n2}(v^2 |gamma|^2); that
canonical form is :class:`IntegrandSpec`, which every route consumes.
"""

from dataclasses import dataclass, field
import math
import time

import numpy as np

from . import closedform, quad
from .quad import IntegralEstimate, IntegrationError, QuadConfig
from .special import laguerre
from .states import (
    CoherentState,
    PhasePoint,
    SqueezedState,
    chi_dfs,
    chi_input,
)

ROUTES = ("adaptive", "gauss-hermite", "closed-form", "monte-carlo")


@dataclass(frozen=True)
class NoiseParams:
    """Gain, beam-splitter reflectivity, damping exponent tau and thermal occupation."""

    g: float = 1.0
    R: float = 0.0
    tau: float = 0.0
    n_th: float = 0.0

    def __post_init__(self):
        if not self.g >= 0:
            raise ValueError(f"g must be >= 0, got {self.g}")
        if not 0.0 <= self.R <= 1.0:
            raise ValueError(f"R must lie in [0,1], got {self.R}")
        if not self.tau >= 0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        if not self.n_th >= 0:
            raise ValueError(f"n_th must be >= 0, got {self.n_th}")
        for name in ("g", "R", "tau", "n_th"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def ideal(cls):
        return cls(g=1.0, R=0.0, tau=0.0, n_th=0.0)

    @property
    def T(self):
        return math.sqrt(1.0 - self.R * self.R)

    @property
    def is_ideal(self):
        return self == NoiseParams.ideal()


def gamma_thermal(n):
    """Added phase-space noise (1 - e^{-tau}) (1/2 + n_th) + g^2 R^2."""
    return -math.expm1(-n.tau) * (0.5 + n.n_th) + n.g**2 * n.R**2


def _gamma_of(g):
    if isinstance(g, PhasePoint):
        return g.gamma
    return np.asarray(g, dtype=complex)


def chi_out_ideal(inp, ch, g):
    """chi_in(gamma) chi_DFS(gamma*, gamma): unit gain, no losses."""
    gamma = _gamma_of(g)
    return chi_input(inp, gamma) * chi_dfs(ch, np.conj(gamma), gamma)


def chi_out_realistic(inp, ch, n, g):
    """Output characteristic function with gain, detector and channel losses.

    Evaluated on the quadrature pair (x, p) of ``g``:
    chi_in(uX, uP) chi_DFS(uX, -uP; vX, vP) exp(-Gamma (X^2 + P^2) / 2).
    """
    gamma = _gamma_of(g)
    x = math.sqrt(2.0) * gamma.real
    p = math.sqrt(2.0) * gamma.imag
    u = n.g * n.T
    v = math.exp(-0.5 * n.tau)

    def point(a, b):
        return (a + 1j * b) / math.sqrt(2.0)

    return (
        chi_input(inp, point(u * x, u * p))
        * chi_dfs(ch, point(u * x, -u * p), point(v * x, v * p))
        * np.exp(-0.5 * gamma_thermal(n) * (x * x + p * p))
    )


@dataclass(frozen=True)
class IntegrandSpec:
    """exp(E(gamma)) prod_i L_{n_i}(s_i |gamma|^2), integrated against d^2 gamma.

    ``E = quad |g|^2 + quad_gg g^2 + quad_cc g*^2 + lin g + lin_conj g*``.
    The fidelity is ``prefactor`` times the integral.
    """

    quad: complex
    lin: complex = 0j
    lin_conj: complex = 0j
    quad_gg: complex = 0j
    quad_cc: complex = 0j
    laguerre: tuple = ()
    prefactor: float = 1.0 / math.pi

    def __post_init__(self):
        for name in ("quad", "lin", "lin_conj", "quad_gg", "quad_cc"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        lag = tuple((int(n), complex(s) if complex(s).imag else float(complex(s).real))
                    for n, s in self.laguerre)
        if any(n < 0 for n, _ in lag):
            raise ValueError("Laguerre degrees must be non-negative")
        object.__setattr__(self, "laguerre", lag)
        a1, a2, a3, _, _ = self.real_form()
        if not (a1.real < 0 and a2.real < 0 and 4 * a1.real * a2.real - a3.real**2 > 0):
            raise ValueError("integrand is not integrable: Re of the quadratic form must be negative definite")

    def exponent(self, gamma):
        gc = np.conj(gamma)
        return (
            self.quad * gamma * gc
            + self.quad_gg * gamma * gamma
            + self.quad_cc * gc * gc
            + self.lin * gamma
            + self.lin_conj * gc
        )

    def laguerre_factor(self, gamma):
        t = np.abs(gamma) ** 2
        out = np.ones_like(t)
        for n, s in self.laguerre:
            out = out * laguerre(n, 0, s * t)
        return out

    def __call__(self, gamma):
        gamma = np.asarray(gamma, dtype=complex)
        return np.exp(self.exponent(gamma)) * self.laguerre_factor(gamma)

    def real_form(self):
        """Coefficients (a1..a5) of a1 x^2 + a2 y^2 + a3 xy + a4 x + a5 y, gamma = x + i y."""
        a1 = self.quad + self.quad_gg + self.quad_cc
        a2 = self.quad - self.quad_gg - self.quad_cc
        a3 = 2j * (self.quad_gg - self.quad_cc)
        a4 = self.lin + self.lin_conj
        a5 = 1j * (self.lin - self.lin_conj)
        return a1, a2, a3, a4, a5

    def is_physical(self, tol=1e-12):
        """Real |gamma|^2 coefficient, conjugate-paired gamma^2 terms, imaginary linear part."""
        return (
            abs(self.quad.imag) <= tol
            and abs(self.quad_cc - self.quad_gg.conjugate()) <= tol
            and abs(self.lin_conj + self.lin.conjugate()) <= tol
        )


def fidelity_integrand(inp, ch, n=None):
    """Canonical integrand of (1/pi) Int chi_in(gamma) chi_out(-gamma) d^2 gamma."""
    n = n or NoiseParams.ideal()
    u = n.g * n.T
    v = math.exp(-0.5 * n.tau)
    quad_c = -0.5 * (u * u + v * v) - gamma_thermal(n)
    gg = cc = 0j
    lin = u * ch.alpha1 - v * ch.alpha2.conjugate()
    lin_conj = -u * ch.alpha1.conjugate() + v * ch.alpha2
    if isinstance(inp, CoherentState):
        quad_c -= 0.5 * (1.0 + u * u)
        lin += (1.0 - u) * inp.alpha.conjugate()
        lin_conj -= (1.0 - u) * inp.alpha
    elif isinstance(inp, SqueezedState):
        # -(1 + u^2)/2 |xi|^2 with |xi|^2 = cosh2r |g|^2 + sinh2r (e^{-i phi} g^2 + e^{i phi} g*^2) / 2
        k = 0.5 * (1.0 + u * u)
        quad_c -= k * math.cosh(2 * inp.r)
        half_sh = 0.5 * k * math.sinh(2 * inp.r)
        gg = -half_sh * complex(math.cos(inp.phi), -math.sin(inp.phi))
        cc = -half_sh * complex(math.cos(inp.phi), math.sin(inp.phi))
    else:
        raise TypeError(f"unsupported input state {type(inp).__name__}")
    return IntegrandSpec(
        quad=quad_c,
        lin=lin,
        lin_conj=lin_conj,
        quad_gg=gg,
        quad_cc=cc,
        laguerre=((ch.n1, u * u), (ch.n2, v * v)),
    )


@dataclass(frozen=True)
class FidelityResult:
    value: float
    error: float
    route: str
    wall_time: float = field(default=0.0, compare=False)
    imag: float = 0.0


def integrate(spec, route="closed-form", cfg=None):
    """Integral of ``spec`` (no prefactor) by the named route."""
    cfg = cfg or QuadConfig()
    if route == "closed-form":
        est = closedform.integrate_closed(spec)
        if est.error > cfg.tolerance(est.value):
            raise IntegrationError(
                "closed-form sum lost too many digits to cancellation",
                estimate=est.value,
                gap=est.error,
            )
        return est
    if route == "adaptive":
        return quad.integrate_adaptive(spec, cfg)
    if route == "gauss-hermite":
        return quad.integrate_gauss_hermite(spec, cfg)
    if route == "monte-carlo":
        return quad.integrate_monte_carlo(spec, cfg)
    raise ValueError(f"unknown route {route!r}; expected one of {', '.join(ROUTES)}")


def fidelity(inp, ch, n=None, route="closed-form", cfg=None):
    """Teleportation fidelity Tr[rho_in rho_out].

    Parameters
    ----------
    inp : CoherentState or SqueezedState
    ch : DFSChannel
    n : NoiseParams, optional
        Defaults to the ideal protocol.
    route : {"closed-form", "adaptive", "gauss-hermite", "monte-carlo"}
    cfg : QuadConfig, optional

    Returns
    -------
    FidelityResult
        ``value`` is the real part; ``imag`` keeps the imaginary residue,
        which should sit at the level of ``error``.

    Raises
    ------
    IntegrationError
        If the route cannot meet the configured tolerance.
    """
    t0 = time.perf_counter()
    spec = fidelity_integrand(inp, ch, n)
    est = integrate(spec, route, cfg)
    value = spec.prefactor * est.value
    return FidelityResult(
        value=float(value.real),
        error=float(spec.prefactor * est.error),
        route=route,
        wall_time=time.perf_counter() - t0,
        imag=float(value.imag),
    )


__all__ = [
    "ROUTES",
    "NoiseParams",
    "IntegrandSpec",
    "FidelityResult",
    "IntegralEstimate",
    "IntegrationError",
    "gamma_thermal",
    "chi_out_ideal",
    "chi_out_realistic",
    "fidelity_integrand",
    "integrate",
    "fidelity",
]
