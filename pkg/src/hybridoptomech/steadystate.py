"""Classical steady state of the nonlinear cavity-dopant-membrane model.

The steady-state equations in the frame rotating with the drive are::

    0 = -(kappa + i dc) c - i L a - i g0 c q + eta_phi
    0 = -(gamma + i da) a - i L c
    0 = -omega_m q - 2 mu0 Re(c a*) - g0 |c|^2

with ``L = lam + mu0 q`` and ``eta_phi = eta exp(-i phi)``.  Eliminating
``a`` and ``q`` leaves ``eta_phi = Z(x) c`` with ``x = |c|^2``; clearing the
rational denominators of ``|Z(x)|^2 x = eta^2`` gives a polynomial of degree
at most five in ``x`` whose non-negative real roots are the branches.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .covariance import drift_matrix, dynamical_stability
from .errors import DegenerateDenominator, NoConvergence
from .model import PhysicalParams, linearize, validate

RESIDUAL_TOL = 1e-10
NEWTON_MAXITER = 50
DEDUP_RTOL = 1e-8
DEGENERATE_TOL = 1e-9

__all__ = [
    "SteadyBranch",
    "solve_steady_state",
    "drive_for_amplitude",
    "branch_stability",
    "count_stable_branches",
    "steady_state_residual",
]


@dataclass(frozen=True)
class SteadyBranch:
    cbar: complex
    abar: complex
    qbar: float
    residual: float
    degenerate: bool = False

    @property
    def intensity(self) -> float:
        return abs(self.cbar) ** 2


def _coefficients(p: PhysicalParams):
    dd = p.gamma**2 + p.delta_a**2
    b = p.g0 - 2.0 * p.lam * p.mu0 * p.delta_a / dd
    s_slope = 2.0 * p.mu0**2 * p.delta_a / dd
    return dd, b, s_slope


def _qbar(p: PhysicalParams, x: float) -> float:
    dd, b, s_slope = _coefficients(p)
    s = p.omega_m - s_slope * x
    if abs(s) <= DEGENERATE_TOL * p.omega_m:
        raise DegenerateDenominator(f"displacement denominator vanishes at |c|^2={x!r}")
    return -b * x / s


def _impedance(p: PhysicalParams, x: float) -> tuple[complex, float]:
    q = _qbar(p, x)
    lam_eff = p.lam + p.mu0 * q
    z = p.kappa + 1j * p.delta_c + 1j * p.g0 * q + lam_eff**2 / (p.gamma + 1j * p.delta_a)
    return z, q


def steady_state_residual(p: PhysicalParams, cbar: complex, abar: complex, qbar: float) -> np.ndarray:
    """Real 5-vector of steady-state equation mismatches."""
    eta_phi = p.eta * cmath.exp(-1j * p.phi)
    lam_eff = p.lam + p.mu0 * qbar
    e1 = -(p.kappa + 1j * p.delta_c) * cbar - 1j * lam_eff * abar - 1j * p.g0 * cbar * qbar + eta_phi
    e2 = -(p.gamma + 1j * p.delta_a) * abar - 1j * lam_eff * cbar
    e3 = -p.omega_m * qbar - 2.0 * p.mu0 * (cbar * abar.conjugate()).real - p.g0 * abs(cbar) ** 2
    return np.array([e1.real, e1.imag, e2.real, e2.imag, e3])


def _jacobian(p: PhysicalParams, cbar: complex, abar: complex, qbar: float) -> np.ndarray:
    lam_eff = p.lam + p.mu0 * qbar
    # e1, e2 are holomorphic in (c, a): d/d(re) = d, d/d(im) = i*d
    d1c = -(p.kappa + 1j * p.delta_c) - 1j * p.g0 * qbar
    d1a = -1j * lam_eff
    d1q = -1j * p.mu0 * abar - 1j * p.g0 * cbar
    d2c = -1j * lam_eff
    d2a = -(p.gamma + 1j * p.delta_a)
    d2q = -1j * p.mu0 * cbar
    jac = np.zeros((5, 5))
    for row, (dc, da, dq) in enumerate(((d1c, d1a, d1q), (d2c, d2a, d2q))):
        cols = (dc, 1j * dc, da, 1j * da, dq)
        jac[2 * row] = [z.real for z in cols]
        jac[2 * row + 1] = [z.imag for z in cols]
    cr, ci, ar, ai = cbar.real, cbar.imag, abar.real, abar.imag
    jac[4] = [
        -2.0 * p.mu0 * ar - 2.0 * p.g0 * cr,
        -2.0 * p.mu0 * ai - 2.0 * p.g0 * ci,
        -2.0 * p.mu0 * cr,
        -2.0 * p.mu0 * ci,
        -p.omega_m,
    ]
    return jac


def _newton(p: PhysicalParams, cbar: complex, abar: complex, qbar: float):
    u = np.array([cbar.real, cbar.imag, abar.real, abar.imag, qbar])

    def unpack(u):
        return complex(u[0], u[1]), complex(u[2], u[3]), float(u[4])

    res = steady_state_residual(p, *unpack(u))
    for _ in range(NEWTON_MAXITER):
        if np.max(np.abs(res)) <= 0.1 * RESIDUAL_TOL:
            break
        try:
            step = np.linalg.solve(_jacobian(p, *unpack(u)), -res)
        except np.linalg.LinAlgError:
            break
        trial = u + step
        trial_res = steady_state_residual(p, *unpack(trial))
        if np.max(np.abs(trial_res)) >= np.max(np.abs(res)):
            break
        u, res = trial, trial_res
    return (*unpack(u), float(np.max(np.abs(res))))


def _polynomial(p: PhysicalParams) -> Polynomial:
    dd, b, s_slope = _coefficients(p)
    x = Polynomial([0.0, 1.0])
    s = Polynomial([p.omega_m, -s_slope])
    za = complex(p.gamma, p.delta_a)
    poly_p = complex(p.kappa, p.delta_c) * za * s**2 - 1j * p.g0 * b * za * x * s + (p.lam * s - p.mu0 * b * x) ** 2
    poly_p_conj = Polynomial(np.conj(poly_p.coef))
    full = x * poly_p * poly_p_conj - p.eta**2 * dd * s**4
    return Polynomial(full.coef.real)


def _candidate_intensities(p: PhysicalParams) -> list[float]:
    poly = _polynomial(p).trim()
    if poly.degree() < 1:
        return [0.0] if abs(poly.coef[0]) == 0.0 else []
    roots = poly.roots()
    scale = max(1.0, float(np.max(np.abs(roots))))
    out = []
    for r in roots:
        if abs(r.imag) <= 1e-6 * max(1.0, abs(r)) and r.real >= -1e-9 * scale:
            out.append(max(0.0, float(r.real)))
    return sorted(out)


def solve_steady_state(p: PhysicalParams) -> list[SteadyBranch]:
    """All classical steady-state branches, sorted by ``|cbar|``.

    Raises
    ------
    NoConvergence
        If a polynomial root cannot be polished to the residual tolerance.
    """
    p = validate(p)
    eta_phi = p.eta * cmath.exp(-1j * p.phi)
    branches: list[SteadyBranch] = []
    _, _, s_slope = _coefficients(p)
    for x in _candidate_intensities(p):
        s = p.omega_m - s_slope * x
        if abs(s) <= DEGENERATE_TOL * p.omega_m:
            nan = float("nan")
            branches.append(SteadyBranch(complex(math.sqrt(x), 0.0), complex(nan, nan), nan, nan, True))
            continue
        z, q = _impedance(p, x)
        cbar = eta_phi / z
        abar = -1j * (p.lam + p.mu0 * q) * cbar / (p.gamma + 1j * p.delta_a)
        cbar, abar, q, res = _newton(p, cbar, abar, q)
        if not res <= RESIDUAL_TOL:
            raise NoConvergence(f"steady-state residual {res:.3e} at |c|^2={x:.6g}")
        branches.append(SteadyBranch(cbar, abar, q, res))

    branches.sort(key=lambda b: abs(b.cbar))
    unique: list[SteadyBranch] = []
    for br in branches:
        if unique and abs(abs(br.cbar) - abs(unique[-1].cbar)) <= DEDUP_RTOL * max(1.0, abs(br.cbar)):
            continue
        unique.append(br)
    return unique


def drive_for_amplitude(p: PhysicalParams, cbar: float) -> tuple[float, float]:
    """Drive amplitude and phase that produce a real intracavity amplitude ``cbar``.

    Returns ``(eta, phi)`` with ``eta * exp(-i phi) = Z(cbar^2) * cbar``.
    """
    if cbar < 0:
        raise ValueError("cbar must be >= 0")
    if cbar == 0:
        return 0.0, 0.0
    p = validate(p)
    z, _ = _impedance(p, cbar**2)
    eta_phi = z * cbar
    return abs(eta_phi), -cmath.phase(eta_phi)


def branch_stability(p: PhysicalParams, branches: list[SteadyBranch]) -> list[bool]:
    """Dynamical stability of the linearization around each branch."""
    p = validate(p)
    out = []
    for br in branches:
        if br.degenerate:
            out.append(False)
            continue
        lin = linearize(p, br.cbar, br.qbar)
        out.append(dynamical_stability(drift_matrix(lin)).stable)
    return out


def count_stable_branches(p: PhysicalParams, branches: list[SteadyBranch]) -> int:
    return sum(branch_stability(p, branches))
