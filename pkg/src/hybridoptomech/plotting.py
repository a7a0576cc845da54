"""Figure rendering for the CLI report commands.

matplotlib is imported lazily so that the numerical modules never depend on
it.  Every function writes a single file and closes its figure.
"""
from __future__ import annotations

import numpy as np

from .experiments import SweepResult, polariton_branches
from .spectra import SpectrumSample

STRATEGY_STYLE = {
    "interference": dict(color="C0", ls="-", label="interference"),
    "radiation_pressure": dict(color="C1", ls="--", label="radiation pressure"),
    "dressed_cavity": dict(color="C2", ls=":", label="dressed cavity"),
    "dopant": dict(color="C3", ls="-.", label="dopant"),
}


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    _pyplot().close(fig)


def plot_spectrum(sample: SpectrumSample, path: str, omega_m: float = 1.0) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(sample.omega, sample.s_f, color="C0", ls="-", label=r"$S_F$")
    ax.plot(sample.omega, sample.s_kappa, color="C1", ls="--", label=r"$S_\kappa$")
    ax.plot(sample.omega, sample.s_gamma, color="C2", ls=":", label=r"$S_\gamma$")
    for x in (-omega_m, omega_m):
        ax.axvline(x, color="0.5", lw=0.8)
    ax.set_xlabel(r"$\omega/\omega_m$")
    ax.set_ylabel(r"$S(\omega)/\omega_m$")
    ax.legend(frameon=False)
    _save(fig, path)


def _masked_log(result: SweepResult, nbar: float | None = None) -> np.ma.MaskedArray:
    grid = result.grid()
    bad = ~np.isfinite(grid) | (grid <= 0)
    if nbar is not None:
        bad |= grid > nbar
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.ma.array(np.log10(np.where(bad, 1.0, grid)), mask=bad)


def plot_detuning_map(result: SweepResult, lam: float, nbar: float, path: str, omega_m: float = 1.0) -> None:
    plt = _pyplot()
    dcs = np.array(result.axes["delta_c"])
    das = np.array(result.axes["delta_a"])
    z = _masked_log(result, nbar)
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    ax.set_facecolor("midnightblue")
    mesh = ax.pcolormesh(das, dcs, z, shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=r"$\log_{10} n_f$")
    if z.count():
        ax.contour(das, dcs, z.filled(np.inf), levels=[0.0], colors="k", linewidths=1.0)
    fine = np.linspace(das.min(), das.max(), 2001)
    for pts in polariton_branches(lam, fine, omega_m).values():
        keep = (pts[:, 1] >= dcs.min()) & (pts[:, 1] <= dcs.max())
        ax.plot(pts[keep, 0], pts[keep, 1], "r--", lw=1.0)
    ax.set_xlim(das.min(), das.max())
    ax.set_ylim(dcs.min(), dcs.max())
    ax.set_xlabel(r"$\Delta_a/\omega_m$")
    ax.set_ylabel(r"$\Delta_c/\omega_m$")
    _save(fig, path)


def plot_compare(results: dict[str, SweepResult], path: str) -> None:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 3.8))
    for name, res in results.items():
        dc = res.column("delta_c")
        nf = res.n_f_array()
        # keep the two branches visually separate
        gap = np.where(np.diff(dc) > 1.5)[0]
        nf = nf.copy()
        if gap.size:
            nf[gap] = np.nan
        ax.semilogy(dc, nf, **STRATEGY_STYLE.get(name, {"label": name}))
    ax.axhline(1.0, color="k", lw=0.8)
    ax.set_xlabel(r"$\Delta_c/\omega_m$")
    ax.set_ylabel(r"$n_f$")
    ax.legend(frameon=False, fontsize=8)
    _save(fig, path)


def plot_resonant_map(result: SweepResult, path: str) -> None:
    plt = _pyplot()
    lams = np.array(result.axes["lambda"])
    gs = np.array(result.axes["g"])
    z = _masked_log(result)
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    ax.set_facecolor("midnightblue")
    mesh = ax.pcolormesh(lams, gs, z.T, shading="auto", cmap="viridis")
    fig.colorbar(mesh, ax=ax, label=r"$\log_{10} n_f$")
    if z.count():
        ax.contour(lams, gs, z.filled(np.inf).T, levels=[0.0], colors="k", linewidths=1.0)
    ax.set_yscale("log")
    ax.set_xlabel(r"$\lambda/\omega_m$")
    ax.set_ylabel(r"$g/\omega_m$")
    _save(fig, path)


def plot_steady_state(intensity, drive, eta: float, branches, stable, path: str) -> None:
    """Drive amplitude versus intracavity intensity with the branches marked."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(intensity, drive, color="C0")
    ax.axhline(eta, color="0.5", lw=0.8)
    for br, ok in zip(branches, stable):
        ax.plot(abs(br.cbar) ** 2, eta, "o", color="C2" if ok else "C3", mfc="C2" if ok else "none")
    ax.set_xlabel(r"$|\bar c|^2$")
    ax.set_ylabel(r"$\eta/\omega_m$")
    _save(fig, path)
