"""Teleportation fidelity through a two-mode displaced-Fock-state channel.

Characteristic-function evaluation of ideal and lossy Braunstein-Kimble
teleportation of coherent and squeezed-vacuum inputs, with closed-form,
adaptive, Gauss-Hermite and Monte Carlo evaluation routes.
"""

from .states import (
    CoherentState,
    DFSChannel,
    PhasePoint,
    SqueezedState,
    chi_coherent,
    chi_dfs,
    chi_input,
    chi_squeezed,
)
from .protocol import (
    ROUTES,
    FidelityResult,
    IntegrandSpec,
    IntegrationError,
    NoiseParams,
    chi_out_ideal,
    chi_out_realistic,
    fidelity,
    fidelity_integrand,
    gamma_thermal,
)
from .quad import QuadConfig, IntegralEstimate

__version__ = "0.1.0"

__all__ = [
    "CoherentState",
    "SqueezedState",
    "DFSChannel",
    "PhasePoint",
    "chi_coherent",
    "chi_squeezed",
    "chi_dfs",
    "chi_input",
    "NoiseParams",
    "IntegrandSpec",
    "FidelityResult",
    "IntegrationError",
    "ROUTES",
    "gamma_thermal",
    "chi_out_ideal",
    "chi_out_realistic",
    "fidelity_integrand",
    "fidelity",
    "QuadConfig",
    "IntegralEstimate",
    "__version__",
]
