"""Langevin force noise spectra, cooling rates and polariton structure.

Every function accepts scalar or array frequencies and is vectorized over
them.  Susceptibility conventions::

    chi_c^-1(w) = kappa - i(w - delta_c)
    chi_a^-1(w) = gamma - i(w - delta_a)
    dressed:  chi~_c^-1 = chi_c^-1 + lam^2 chi_a   (and c <-> a)
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DetuningNotZero, SingularDetuning
from .model import LinearParams

EPS_SING = 1e-6

__all__ = [
    "SpectrumSample",
    "FanoApprox",
    "chi_bare",
    "chi_dressed",
    "force_spectrum",
    "cooling_rate",
    "polariton_energies",
    "optimal_cavity_detuning",
    "fano_approximation",
    "resonant_spectra",
    "resonant_cooling_rate",
]


@dataclass(frozen=True)
class SpectrumSample:
    omega: np.ndarray
    s_kappa: np.ndarray
    s_gamma: np.ndarray

    @property
    def s_f(self) -> np.ndarray:
        return self.s_kappa + self.s_gamma


@dataclass(frozen=True)
class FanoApprox:
    """Leading-order (in omega_m/kappa) polariton description of the spectra.

    ``S_kappa ~ A(w) / (gamma_eff^2 + (w - delta_eff)^2)`` with
    ``A(w) = a0 + a1*w + a2*w^2`` and ``S_gamma ~ b_amp / (...)``.
    """

    gamma_eff: float
    delta_eff: float
    b_amp: float
    a_coeffs: tuple[float, float, float]

    def amplitude_a(self, omega):
        a0, a1, a2 = self.a_coeffs
        omega = np.asarray(omega, dtype=float)
        return a0 + a1 * omega + a2 * omega**2

    def spectra(self, omega) -> SpectrumSample:
        omega = np.asarray(omega, dtype=float)
        lorentz = self.gamma_eff**2 + (omega - self.delta_eff) ** 2
        return SpectrumSample(omega, self.amplitude_a(omega) / lorentz, self.b_amp / lorentz)


def _check_mode(mode: str) -> None:
    if mode not in ("cavity", "dopant"):
        raise ValueError(f"mode must be 'cavity' or 'dopant', got {mode!r}")


def chi_bare(mode: str, lin: LinearParams, omega):
    _check_mode(mode)
    omega = np.asarray(omega, dtype=float)
    if mode == "cavity":
        return 1.0 / (lin.kappa - 1j * (omega - lin.delta_c))
    return 1.0 / (lin.gamma - 1j * (omega - lin.delta_a))


def chi_dressed(mode: str, lin: LinearParams, omega):
    _check_mode(mode)
    other = "dopant" if mode == "cavity" else "cavity"
    return 1.0 / (1.0 / chi_bare(mode, lin, omega) + lin.lam**2 * chi_bare(other, lin, omega))


def force_spectrum(lin: LinearParams, omega) -> SpectrumSample:
    """Cavity and dopant contributions to the Langevin force spectrum.

    Parameters
    ----------
    lin : LinearParams
    omega : float or array_like
        Frequencies in units of omega_m.

    Returns
    -------
    SpectrumSample
        ``s_kappa`` and ``s_gamma`` evaluated at every ``omega``; their sum
        is ``s_f``.
    """
    omega = np.asarray(omega, dtype=float)
    chi_c = chi_bare("cavity", lin, omega)
    chi_a = chi_bare("dopant", lin, omega)
    dchi_c = 1.0 / (1.0 / chi_c + lin.lam**2 * chi_a)
    dchi_a = 1.0 / (1.0 / chi_a + lin.lam**2 * chi_c)
    gt_conj = np.conj(lin.g_tilde)
    lm = lin.lam * lin.mu
    s_kappa = 2.0 * lin.kappa * np.abs(gt_conj * dchi_c - 1j * lm * dchi_a * chi_c) ** 2
    s_gamma = 2.0 * lin.gamma * np.abs(lin.mu * dchi_a - 1j * gt_conj * lin.lam * dchi_c * chi_a) ** 2
    return SpectrumSample(omega, s_kappa, s_gamma)


def cooling_rate(lin: LinearParams) -> float:
    """Half the difference of the force spectrum at +omega_m and -omega_m.

    Positive values mean net cooling.
    """
    s = force_spectrum(lin, np.array([lin.omega_m, -lin.omega_m]))
    s_f = s.s_f
    return float(0.5 * (s_f[0] - s_f[1]))


def polariton_energies(lin: LinearParams) -> tuple[float, float]:
    """Return ``(omega_plus, omega_minus)`` of the hybridized cavity-dopant modes."""
    mean = 0.5 * (lin.delta_a + lin.delta_c)
    half_split = 0.5 * np.hypot(lin.delta_a - lin.delta_c, 2.0 * lin.lam)
    return float(mean + half_split), float(mean - half_split)


def optimal_cavity_detuning(delta_a: float, lam: float, omega_m: float = 1.0, eps: float = EPS_SING) -> float:
    """Cavity detuning that puts one polariton on the lower mechanical sideband.

    Raises
    ------
    SingularDetuning
        If ``|delta_a - omega_m| <= eps * omega_m``; the required cavity
        detuning diverges there.
    """
    d = delta_a - omega_m
    if abs(d) <= eps * omega_m:
        raise SingularDetuning(f"delta_a={delta_a!r} is within {eps}*omega_m of omega_m")
    return omega_m + lam**2 / d


def fano_approximation(lin: LinearParams) -> FanoApprox:
    """Polariton linewidth, position and amplitudes of the approximate spectra.

    Assumes the cavity detuning obeys the polariton sideband condition for
    ``lin.delta_a`` (the stored ``delta_c`` is ignored) and is accurate to
    leading order in ``omega_m/kappa``.
    """
    wm = lin.omega_m
    k, ga, lam, mu, g, da = lin.kappa, lin.gamma, lin.lam, lin.mu, lin.g, lin.delta_a
    optimal_cavity_detuning(da, lam, wm)  # raises on the pole
    d = da - wm
    lam4 = lam**4
    den = lam4 + k**2 * d**2
    dd = ga**2 + da**2

    gamma_eff = (lam4 * ga + k * (lam**2 + ga * k) * d**2) / den
    delta_eff = (lam4 * wm + k**2 * da * d**2) / den

    # A(w) = pref * [(u0 + u1 w)^2 + g^2 ga^2 w^2]
    pref = 2.0 * k * d**2 / (dd * den)
    u0 = 2.0 * lam * mu * da - g * dd
    u1 = g * da - lam * mu
    a_coeffs = (pref * u0**2, 2.0 * pref * u0 * u1, pref * (u1**2 + g**2 * ga**2))

    t1 = lam**2 * mu * ga - (g * lam * ga + mu * k * da) * d
    t2 = lam**2 * mu * (2.0 * da - wm) - (g * lam * da - mu * ga * k) * d
    b_amp = 2.0 * ga / dd * (t1**2 + t2**2) / den
    return FanoApprox(float(gamma_eff), float(delta_eff), float(b_amp), tuple(float(a) for a in a_coeffs))


def _require_resonant(lin: LinearParams) -> None:
    if lin.delta_c != 0.0 or lin.delta_a != 0.0:
        raise DetuningNotZero(f"resonant closed forms need delta_c = delta_a = 0, got {lin.delta_c}, {lin.delta_a}")


def _resonant_denominator(lin: LinearParams, omega):
    k, ga, lam = lin.kappa, lin.gamma, lin.lam
    return (lam**2 + ga * k) ** 2 + (ga**2 + k**2 - 2.0 * lam**2) * omega**2 + omega**4


def resonant_spectra(lin: LinearParams, omega) -> SpectrumSample:
    """Closed-form force spectra for cavity and dopant both driven on resonance."""
    _require_resonant(lin)
    omega = np.asarray(omega, dtype=float)
    k, ga, lam, mu, g = lin.kappa, lin.gamma, lin.lam, lin.mu, lin.g
    den = _resonant_denominator(lin, omega)
    s_kappa = 2.0 * k / ga**2 * (g**2 * ga**2 * omega**2 + (g * ga**2 + lam * mu * omega) ** 2) / den
    s_gamma = 2.0 / ga * (mu**2 * (lam**2 + ga * k) ** 2 + ga**2 * (g * lam + mu * omega) ** 2) / den
    return SpectrumSample(omega, s_kappa, s_gamma)


def resonant_cooling_rate(lin: LinearParams) -> float:
    _require_resonant(lin)
    wm = lin.omega_m
    num = 4.0 * lin.g * lin.lam * lin.mu * wm * (lin.gamma + lin.kappa)
    return float(num / _resonant_denominator(lin, wm))
