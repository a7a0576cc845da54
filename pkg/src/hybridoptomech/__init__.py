"""Linearized hybrid optomechanics of a dopant-loaded membrane in a cavity.

Noise spectra, cooling rates, Fano approximations, Lyapunov steady states,
final phonon occupations and parameter sweeps, all in units of the
mechanical frequency.
"""
__version__ = "0.1.0"

from .model import (  # noqa: E402
    DesignInputs,
    LinearParams,
    PhysicalParams,
    cooperativity,
    design_cooperativity,
    linearize,
    validate,
)

__all__ = [
    "DesignInputs",
    "LinearParams",
    "PhysicalParams",
    "cooperativity",
    "design_cooperativity",
    "linearize",
    "validate",
]
