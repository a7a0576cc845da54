"""Parameter containers for the doped-membrane cavity system.

All frequencies, rates and couplings are expressed in units of the
mechanical frequency.  ``validate`` (and ``LinearParams.normalized``) rescale
an arbitrary set of inputs so that ``omega_m == 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

from .errors import NonFiniteInput, NonPositiveRate

__all__ = [
    "PhysicalParams",
    "LinearParams",
    "DesignInputs",
    "validate",
    "linearize",
    "cooperativity",
    "design_cooperativity",
]

# fields that carry a frequency dimension and are rescaled by omega_m
_PHYSICAL_FREQS = ("omega_m", "gamma_m", "kappa", "gamma", "delta_c", "delta_a", "g0", "lam", "mu0", "eta")
_LINEAR_FREQS = ("omega_m", "gamma_m", "kappa", "gamma", "delta_c", "delta_a", "g", "lam", "mu")


def _check_finite(obj) -> None:
    for f in fields(obj):
        value = getattr(obj, f.name)
        if isinstance(value, (int, float)) and not math.isfinite(value):
            raise NonFiniteInput(f"{f.name} must be finite, got {value!r}")


def _check_rates(obj) -> None:
    for name in ("omega_m", "kappa", "gamma"):
        if not getattr(obj, name) > 0:
            raise NonPositiveRate(f"{name} must be > 0, got {getattr(obj, name)!r}")
    if obj.gamma_m < 0:
        raise NonPositiveRate(f"gamma_m must be >= 0, got {obj.gamma_m!r}")
    if obj.nbar < 0:
        raise NonPositiveRate(f"nbar must be >= 0, got {obj.nbar!r}")


@dataclass(frozen=True)
class PhysicalParams:
    """Inputs of the full nonlinear model (bare couplings plus drive)."""

    kappa: float
    gamma: float
    delta_c: float = 0.0
    delta_a: float = 0.0
    g0: float = 0.0
    lam: float = 0.0
    mu0: float = 0.0
    eta: float = 0.0
    phi: float = 0.0
    gamma_m: float = 1e-6
    nbar: float = 0.0
    omega_m: float = 1.0

    def __post_init__(self):
        _check_finite(self)
        _check_rates(self)
        if self.eta < 0:
            raise NonPositiveRate(f"eta must be >= 0, got {self.eta!r}")


@dataclass(frozen=True)
class LinearParams:
    """Linearized system: couplings g, lam, mu around a real intracavity amplitude."""

    kappa: float
    gamma: float
    g: float = 0.0
    lam: float = 0.0
    mu: float = 0.0
    delta_c: float = 0.0
    delta_a: float = 0.0
    gamma_m: float = 1e-6
    nbar: float = 0.0
    omega_m: float = 1.0

    def __post_init__(self):
        _check_finite(self)
        _check_rates(self)

    @property
    def g_tilde(self) -> complex:
        """Effective complex coupling ``g - i*lam*mu/(gamma + i*delta_a)``."""
        return self.g - 1j * self.lam * self.mu / (self.gamma + 1j * self.delta_a)

    @property
    def eta_mix(self) -> float:
        return self.lam * self.mu / (self.gamma**2 + self.delta_a**2)

    def replace(self, **changes) -> "LinearParams":
        return replace(self, **changes)

    def normalized(self) -> "LinearParams":
        s = self.omega_m
        return replace(self, **{k: getattr(self, k) / s for k in _LINEAR_FREQS})


@dataclass(frozen=True)
class DesignInputs:
    """Cavity design quantities for the dopant-cavity cooperativity estimate.

    ``mode_area`` and ``wavelength`` must share a length unit.
    """

    n_emitters: float
    finesse: float
    mode_area: float
    wavelength: float

    def __post_init__(self):
        _check_finite(self)
        if self.n_emitters < 0:
            raise NonPositiveRate("n_emitters must be >= 0")
        for name in ("finesse", "mode_area", "wavelength"):
            if not getattr(self, name) > 0:
                raise NonPositiveRate(f"{name} must be > 0")


def validate(p: PhysicalParams) -> PhysicalParams:
    """Return ``p`` rescaled to units where ``omega_m == 1``.

    Construction already rejects non-finite values and non-positive rates,
    so this only normalizes.
    """
    _check_finite(p)
    _check_rates(p)
    s = p.omega_m
    return replace(p, **{k: getattr(p, k) / s for k in _PHYSICAL_FREQS})


def linearize(p: PhysicalParams, cbar: complex, qbar: float = 0.0) -> LinearParams:
    """Linearize the nonlinear model around a classical steady state.

    The drive phase is chosen so that the intracavity amplitude is real and
    non-negative, hence only ``|cbar|`` enters.  The static displacement
    ``qbar`` shifts the cavity detuning by ``g0*qbar`` and the Tavis-Cummings
    coupling by ``mu0*qbar``.

    Parameters
    ----------
    p : PhysicalParams
        Bare model parameters.
    cbar : complex
        Intracavity amplitude of the branch to linearize around.
    qbar : float, optional
        Static mechanical displacement of that branch.

    Returns
    -------
    LinearParams
    """
    c = abs(complex(cbar))
    if not (math.isfinite(c) and math.isfinite(qbar)):
        raise NonFiniteInput("cbar and qbar must be finite")
    return LinearParams(
        kappa=p.kappa,
        gamma=p.gamma,
        g=p.g0 * c,
        lam=p.lam + p.mu0 * qbar,
        mu=p.mu0 * c,
        delta_c=p.delta_c + p.g0 * qbar,
        delta_a=p.delta_a,
        gamma_m=p.gamma_m,
        nbar=p.nbar,
        omega_m=p.omega_m,
    )


def cooperativity(lin: LinearParams) -> float:
    return lin.lam**2 / (lin.kappa * lin.gamma)


def design_cooperativity(d: DesignInputs) -> float:
    """Dopant-cavity cooperativity ``3 N F (wavelength/2pi)^2 / mode_area``."""
    return 3.0 * d.n_emitters * d.finesse * (d.wavelength / (2.0 * math.pi)) ** 2 / d.mode_area
