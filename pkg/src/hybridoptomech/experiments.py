"""Cooling-strategy configuration and parameter sweeps.

Each sweep cell is a pure function of its ``LinearParams``: build the drift
and diffusion matrices, gate on dynamical stability, solve the Lyapunov
equation and read off the final occupation.  Cells are classified as

* ``cooled``   -- stable with ``n_f <= nbar``
* ``heated``   -- stable with ``n_f > nbar``
* ``unstable`` -- drift matrix not strictly stable (no ``n_f``)
* ``skipped``  -- on the guard band of the polariton drive condition
* ``error``    -- a numerical failure inside the cell
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Sequence

import numpy as np

from .covariance import (
    PHYSICAL_TOL,
    diffusion_matrix,
    drift_matrix,
    dynamical_stability,
    final_occupation,
    physicality,
    solve_lyapunov,
)
from .errors import HybridOptomechError
from .model import LinearParams
from .spectra import EPS_SING, optimal_cavity_detuning

GUARD_BAND = 1e-3

__all__ = [
    "Strategy",
    "SweepCell",
    "SweepPlan",
    "SweepResult",
    "CellOutcome",
    "configure",
    "evaluate_cell",
    "polariton_line_scan",
    "compare_strategies",
    "detuning_map",
    "resonant_map",
    "radiation_pressure_g_scan",
    "run_parallel",
    "polariton_branches",
    "default_line_grid",
]


class Strategy(str, Enum):
    RADIATION_PRESSURE = "radiation_pressure"
    DRESSED_CAVITY = "dressed_cavity"
    DOPANT = "dopant"
    INTERFERENCE = "interference"


def configure(strategy: Strategy | str, base: LinearParams) -> LinearParams:
    """Zero the couplings that a given cooling strategy does not use."""
    strategy = Strategy(strategy)
    if strategy is Strategy.RADIATION_PRESSURE:
        return base.replace(lam=0.0, mu=0.0)
    if strategy is Strategy.DRESSED_CAVITY:
        return base.replace(mu=0.0)
    if strategy is Strategy.DOPANT:
        return base.replace(g=0.0)
    return base


@dataclass(frozen=True)
class CellOutcome:
    n_f: float | None
    status: str
    max_real_part: float | None = None
    detail: str = ""


@dataclass(frozen=True)
class SweepCell:
    coords: tuple[float, ...]
    n_f: float | None
    status: str


@dataclass
class SweepPlan:
    """Cells to evaluate; ``params[i] is None`` marks a skipped cell."""

    axes: dict[str, tuple[float, ...]]
    coord_names: tuple[str, ...]
    coords: list[tuple[float, ...]]
    params: list[LinearParams | None]
    config: dict[str, Any] = field(default_factory=dict)

    def __len__(self):
        return len(self.coords)


@dataclass
class SweepResult:
    axes: dict[str, tuple[float, ...]]
    coord_names: tuple[str, ...]
    cells: list[SweepCell]
    config: dict[str, Any] = field(default_factory=dict)

    @property
    def summary(self) -> dict[str, Any]:
        best = None
        for cell in self.cells:
            if cell.n_f is not None and (best is None or cell.n_f < best.n_f):
                best = cell
        counts: dict[str, int] = {}
        for cell in self.cells:
            counts[cell.status] = counts.get(cell.status, 0) + 1
        return {
            "min_n_f": None if best is None else best.n_f,
            "argmin": None if best is None else dict(zip(self.coord_names, best.coords)),
            "below_one": sum(1 for c in self.cells if c.n_f is not None and c.n_f < 1.0),
            "status_counts": counts,
        }

    @property
    def min_n_f(self) -> float:
        m = self.summary["min_n_f"]
        return math.inf if m is None else m

    def column(self, name: str) -> np.ndarray:
        i = self.coord_names.index(name)
        return np.array([c.coords[i] for c in self.cells])

    def n_f_array(self) -> np.ndarray:
        return np.array([np.nan if c.n_f is None else c.n_f for c in self.cells])

    def grid(self) -> np.ndarray:
        """``n_f`` reshaped to the axis lengths (NaN where absent)."""
        return self.n_f_array().reshape([len(v) for v in self.axes.values()])

    @property
    def n_errors(self) -> int:
        return sum(1 for c in self.cells if c.status == "error")


def evaluate_cell(lin: LinearParams) -> CellOutcome:
    """Final occupation and status of a single parameter point."""
    try:
        a = drift_matrix(lin)
        report = dynamical_stability(a)
        if not report.stable:
            return CellOutcome(None, "unstable", report.max_real_part)
        state = solve_lyapunov(a, diffusion_matrix(lin), check_stability=False)
        nu = physicality(state)
    except HybridOptomechError as exc:
        return CellOutcome(None, "error", None, f"{type(exc).__name__}: {exc}")
    if nu[0] < 1.0 - PHYSICAL_TOL:
        # only happens next to the stability boundary, where the solve is ill-conditioned
        return CellOutcome(None, "unstable", report.max_real_part, "unphysical covariance")
    n_f = final_occupation(state)
    return CellOutcome(n_f, "heated" if n_f > lin.nbar else "cooled", report.max_real_part)


def _evaluate_chunk(params: Sequence[LinearParams | None]) -> list[tuple[float | None, str]]:
    out = []
    for lin in params:
        if lin is None:
            out.append((None, "skipped"))
        else:
            r = evaluate_cell(lin)
            out.append((r.n_f, r.status))
    return out


def run_parallel(plan: SweepPlan, worker_count: int = 1) -> SweepResult:
    """Evaluate every cell of ``plan``, optionally in a process pool.

    Cells are split into contiguous chunks and reassembled in order, so the
    result does not depend on ``worker_count``.
    """
    n = len(plan.params)
    if worker_count <= 1 or n < 2:
        outcomes = _evaluate_chunk(plan.params)
    else:
        n_chunks = min(n, 4 * worker_count)
        bounds = np.linspace(0, n, n_chunks + 1).astype(int)
        chunks = [plan.params[bounds[i] : bounds[i + 1]] for i in range(n_chunks)]
        with ProcessPoolExecutor(max_workers=worker_count) as pool:
            outcomes = [o for part in pool.map(_evaluate_chunk, chunks) for o in part]
    cells = [SweepCell(c, nf, st) for c, (nf, st) in zip(plan.coords, outcomes)]
    return SweepResult(dict(plan.axes), plan.coord_names, cells, dict(plan.config))


def default_line_grid(points: int = 400, limit: float = 120.0, omega_m: float = 1.0) -> np.ndarray:
    """Cavity detunings on both polariton branches.

    The window ``(-omega_m - GUARD_BAND, omega_m + GUARD_BAND)`` is left out;
    the lower-sideband curve diverges at ``delta_c = omega_m``.
    """
    lo = np.linspace(-limit, -omega_m - GUARD_BAND, points)
    hi = np.linspace(omega_m + GUARD_BAND, limit, points)
    return np.concatenate([lo, hi])


def _line_plan(strategy: Strategy | str, base: LinearParams, dc_grid) -> SweepPlan:
    strategy = Strategy(strategy)
    lin0 = configure(strategy, base)
    wm = base.omega_m
    coords, params = [], []
    for dc in np.asarray(dc_grid, dtype=float):
        dc = float(dc)
        # slack so that grid points placed exactly on the band edge survive round-off
        if abs(dc - wm) < GUARD_BAND * wm * (1.0 - 1e-6):
            coords.append((dc, math.nan))
            params.append(None)
            continue
        # the dopant detuning follows the polariton sideband relation with the
        # roles of the two detunings exchanged
        da = optimal_cavity_detuning(dc, base.lam, wm, eps=EPS_SING)
        coords.append((dc, da))
        params.append(lin0.replace(delta_c=dc, delta_a=da))
    dcs = tuple(float(x) for x in np.asarray(dc_grid, dtype=float))
    return SweepPlan({"delta_c": dcs}, ("delta_c", "delta_a"), coords, params, {"strategy": strategy.value})


def polariton_line_scan(strategy, base: LinearParams, dc_grid, worker_count: int = 1) -> SweepResult:
    """Final occupation along the polariton lower-sideband curve.

    For every cavity detuning the dopant detuning is set to
    ``omega_m + lam^2/(delta_c - omega_m)``; cells inside the guard band
    around ``delta_c = omega_m`` are skipped.
    """
    return run_parallel(_line_plan(strategy, base, dc_grid), worker_count)


def compare_strategies(base: LinearParams, dc_grid, strategies=tuple(Strategy), worker_count: int = 1) -> dict[str, SweepResult]:
    return {Strategy(s).value: polariton_line_scan(s, base, dc_grid, worker_count) for s in strategies}


def polariton_branches(lam: float, da_values, omega_m: float = 1.0) -> dict[str, np.ndarray]:
    """``(delta_a, delta_c)`` points of the two polariton sideband curves.

    ``upper`` is the branch with ``delta_a < omega_m`` (the upper polariton
    sits on the sideband), ``lower`` the one with ``delta_a > omega_m``.
    """
    das = np.asarray(da_values, dtype=float)
    das = das[np.abs(das - omega_m) > EPS_SING * omega_m]
    dcs = omega_m + lam**2 / (das - omega_m)
    up = das < omega_m
    return {
        "upper": np.column_stack([das[up], dcs[up]]),
        "lower": np.column_stack([das[~up], dcs[~up]]),
    }


def detuning_map(base: LinearParams, dc_grid, da_grid, worker_count: int = 1) -> SweepResult:
    """Final occupation over the (cavity detuning, dopant detuning) plane.

    Rows run over ``dc_grid`` and columns over ``da_grid``.
    """
    dcs = tuple(float(x) for x in dc_grid)
    das = tuple(float(x) for x in da_grid)
    coords = [(dc, da) for dc in dcs for da in das]
    params = [base.replace(delta_c=dc, delta_a=da) for dc, da in coords]
    plan = SweepPlan({"delta_c": dcs, "delta_a": das}, ("delta_c", "delta_a"), coords, params)
    return run_parallel(plan, worker_count)


def resonant_map(
    kappa: float,
    gamma: float,
    mu_over_lambda: float,
    g_grid,
    lambda_grid,
    *,
    gamma_m: float = 1e-6,
    nbar: float = 1e3,
    worker_count: int = 1,
) -> SweepResult:
    """Interference cooling with cavity and dopant driven on resonance.

    Rows run over ``lambda_grid`` and columns over ``g_grid``; the dopant
    coupling is ``mu = mu_over_lambda * lam`` in every cell.
    """
    lams = tuple(float(x) for x in lambda_grid)
    gs = tuple(float(x) for x in g_grid)
    base = LinearParams(kappa=kappa, gamma=gamma, gamma_m=gamma_m, nbar=nbar)
    coords = [(lam, g) for lam in lams for g in gs]
    params = [base.replace(lam=lam, g=g, mu=mu_over_lambda * lam) for lam, g in coords]
    plan = SweepPlan({"lambda": lams, "g": gs}, ("lambda", "g"), coords, params, {"mu_over_lambda": mu_over_lambda})
    return run_parallel(plan, worker_count)


def radiation_pressure_g_scan(
    kappa: float,
    gamma: float,
    g_grid,
    *,
    delta_c: float = 1.0,
    gamma_m: float = 1e-6,
    nbar: float = 1e3,
    worker_count: int = 1,
) -> SweepResult:
    """Sideband-driven radiation-pressure cooling as a function of ``g``."""
    gs = tuple(float(x) for x in g_grid)
    base = LinearParams(kappa=kappa, gamma=gamma, delta_c=delta_c, gamma_m=gamma_m, nbar=nbar)
    params = [base.replace(g=g) for g in gs]
    plan = SweepPlan({"g": gs}, ("g",), [(g,) for g in gs], params, {"strategy": Strategy.RADIATION_PRESSURE.value})
    return run_parallel(plan, worker_count)
