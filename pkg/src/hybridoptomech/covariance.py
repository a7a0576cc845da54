"""Gaussian covariance dynamics of the linearized cavity-dopant-membrane system.

Quadrature ordering is ``r = (X_c, Y_c, X_a, Y_a, q, p)`` with
``X = (c + c^dag)/sqrt2`` and ``Y = -i(c - c^dag)/sqrt2``.  The covariance
convention is ``V_ij = <r_i r_j + r_j r_i> - 2<r_i><r_j>`` so that the vacuum
state is the identity.  The steady state solves ``A V + V A^T + N = 0``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AsymmetricInput, EigenFailure, SingularSystem, StepTooLarge, UnstableSystem
from .model import LinearParams

EPS_STAB = 1e-9
LYAPUNOV_RTOL = 1e-9
PHYSICAL_TOL = 1e-8

SQRT2 = math.sqrt(2.0)

__all__ = [
    "CovarianceState",
    "StabilityReport",
    "drift_matrix",
    "diffusion_matrix",
    "dynamical_stability",
    "solve_lyapunov",
    "final_occupation",
    "evolve_covariance",
    "physicality",
    "symplectic_form",
    "lyapunov_residual",
]


@dataclass(frozen=True)
class StabilityReport:
    eigen_real_parts: np.ndarray
    stable: bool

    @property
    def max_real_part(self) -> float:
        return float(self.eigen_real_parts[0])


@dataclass(frozen=True)
class CovarianceState:
    v: np.ndarray
    residual: float
    stable: bool = True


def drift_matrix(lin: LinearParams) -> np.ndarray:
    """Drift matrix of the linearized quantum Langevin equations.

    The cavity couples to the displacement through the real and imaginary
    parts of ``g_tilde``: ``Re g_tilde = g - eta_mix*delta_a`` and
    ``Im g_tilde = -eta_mix*gamma`` with ``eta_mix = lam*mu/(gamma^2 +
    delta_a^2)``.  The momentum row is the one fixed by the Hamiltonian,
    i.e. ``dp/dt`` picks up ``-sqrt2 Re(g_tilde) X_c - sqrt2 Im(g_tilde) Y_c``.
    """
    k, ga, lam, mu = lin.kappa, lin.gamma, lin.lam, lin.mu
    dc, da, wm = lin.delta_c, lin.delta_a, lin.omega_m
    em = lin.eta_mix
    re_gt = lin.g - em * da
    im_gt = -em * ga
    return np.array(
        [
            [-k, dc, 0.0, lam, SQRT2 * im_gt, 0.0],
            [-dc, -k, -lam, 0.0, -SQRT2 * re_gt, 0.0],
            [0.0, lam, -ga, da, 0.0, 0.0],
            [-lam, 0.0, -da, -ga, -SQRT2 * mu, 0.0],
            [0.0, 0.0, 0.0, 0.0, 0.0, wm],
            [-SQRT2 * re_gt, -SQRT2 * im_gt, -SQRT2 * mu, 0.0, -wm, -lin.gamma_m],
        ]
    )


def diffusion_matrix(lin: LinearParams) -> np.ndarray:
    k, ga = lin.kappa, lin.gamma
    return np.diag([2 * k, 2 * k, 2 * ga, 2 * ga, 0.0, 2 * lin.gamma_m * (2 * lin.nbar + 1)])


def dynamical_stability(a: np.ndarray, eps: float = EPS_STAB) -> StabilityReport:
    """Eigenvalue real parts of the drift matrix, sorted descending.

    The system counts as stable only if every real part is below ``-eps``;
    marginal systems are reported unstable.
    """
    try:
        ev = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    if not np.all(np.isfinite(ev)):
        raise EigenFailure("non-finite eigenvalues")
    re = np.sort(ev.real)[::-1]
    return StabilityReport(re, bool(re[0] < -eps))


def lyapunov_residual(a: np.ndarray, v: np.ndarray, n: np.ndarray) -> float:
    """``max|A V + V A^T + N| / max|N|`` (absolute when ``N == 0``)."""
    r = a @ v + v @ np.swapaxes(a, -1, -2) + n
    scale = np.max(np.abs(n), axis=(-2, -1))
    scale = np.where(scale > 0, scale, 1.0)
    return np.max(np.abs(r), axis=(-2, -1)) / scale


def solve_lyapunov(a: np.ndarray, n: np.ndarray, *, check_stability: bool = True) -> CovarianceState:
    """Steady-state covariance from the Lyapunov equation.

    Solves ``(A (x) I + I (x) A) vec(V) = -vec(N)`` densely and symmetrizes.

    Raises
    ------
    UnstableSystem
        If the drift matrix has an eigenvalue with real part >= -EPS_STAB.
    SingularSystem
        If the linear system is singular or the solution misses the
        residual tolerance.
    """
    a = np.asarray(a, dtype=float)
    n = np.asarray(n, dtype=float)
    if check_stability:
        report = dynamical_stability(a)
        if not report.stable:
            raise UnstableSystem(f"max eigenvalue real part {report.max_real_part:.3e}")
    dim = a.shape[0]
    eye = np.eye(dim)
    k = np.kron(a, eye) + np.kron(eye, a)
    try:
        vec = np.linalg.solve(k, -n.reshape(-1))
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    v = vec.reshape(dim, dim)
    v = 0.5 * (v + v.T)
    res = float(lyapunov_residual(a, v, n))
    if not res <= LYAPUNOV_RTOL:
        raise SingularSystem(f"Lyapunov residual {res:.3e} exceeds {LYAPUNOV_RTOL:g}")
    return CovarianceState(v, res, True)


def final_occupation(v) -> float:
    """Mechanical phonon number ``(V55 + V66 - 2)/4``."""
    m = v.v if isinstance(v, CovarianceState) else np.asarray(v)
    return float((m[4, 4] + m[5, 5] - 2.0) / 4.0)


def evolve_covariance(a, n, v0, t_final: float, dt: float) -> CovarianceState:
    """Integrate ``dV/dt = A V + V A^T + N`` with classical RK4.

    Leading batch dimensions on ``a``, ``n`` and ``v0`` broadcast.  The
    step is shortened so that an integer number of steps lands exactly on
    ``t_final``.

    Raises
    ------
    StepTooLarge
        If ``dt`` exceeds ``0.05 / max|A_ij|``.
    """
    a = np.asarray(a, dtype=float)
    n = np.asarray(n, dtype=float)
    v = np.array(v0, dtype=float)
    limit = 0.05 / float(np.max(np.abs(a)))
    if dt > limit:
        raise StepTooLarge(f"dt={dt:g} exceeds {limit:g}")
    steps = max(1, math.ceil(t_final / dt))
    h = t_final / steps
    at = np.swapaxes(a, -1, -2)

    def rhs(x):
        return a @ x + x @ at + n

    for _ in range(steps):
        k1 = rhs(v)
        k2 = rhs(v + 0.5 * h * k1)
        k3 = rhs(v + 0.5 * h * k2)
        k4 = rhs(v + h * k3)
        v = v + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        v = 0.5 * (v + np.swapaxes(v, -1, -2))
    res = lyapunov_residual(a, v, n)
    return CovarianceState(v, float(np.max(res)), True)


def symplectic_form(modes: int = 3) -> np.ndarray:
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def physicality(v, tol: float = 1e-12) -> np.ndarray:
    """Symplectic eigenvalues of a covariance matrix, ascending.

    A state is physical when all of them are at least ``1 - PHYSICAL_TOL``.
    """
    m = v.v if isinstance(v, CovarianceState) else np.asarray(v, dtype=float)
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.T)) > tol * scale:
        raise AsymmetricInput("covariance matrix is not symmetric")
    omega = symplectic_form(m.shape[0] // 2)
    ev = np.linalg.eigvals(1j * omega @ m)
    # eigenvalues come in +/- pairs; keep the positive half
    return np.sort(np.abs(ev))[::2]
