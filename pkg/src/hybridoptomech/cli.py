"""Command-line interface.

Subcommands: ``spectrum``, ``occupation``, ``map2d``, ``compare``,
``resonant-map`` and ``steady-state``.  Exit status is 0 on success, 1 on a
fatal configuration or solver error and 2 when a sweep completed but some
cells failed numerically.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .config import (
    GridSpec,
    PRESETS,
    RunConfig,
    apply_overrides,
    line_grid_values,
    load_config,
    parse_grid_flag,
)
from .covariance import diffusion_matrix, drift_matrix, dynamical_stability, final_occupation, solve_lyapunov
from .errors import ConfigError, DegenerateDenominator, HybridOptomechError, MissingField, UnstableSystem
from .experiments import (
    Strategy,
    compare_strategies,
    detuning_map,
    radiation_pressure_g_scan,
    resonant_map,
)
from .model import LinearParams, cooperativity, linearize, validate
from .output import Table, write
from .spectra import cooling_rate, force_spectrum
from .steadystate import branch_stability, drive_for_amplitude, solve_steady_state

log = logging.getLogger("hybridoptomech")

WORKERS_ENV = "HYBRIDOPTOMECH_WORKERS"


class CommandResult:
    def __init__(self, table: Table, exit_code: int = 0, figure: Callable[[str], None] | None = None):
        self.table = table
        self.exit_code = exit_code
        self.figure = figure


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def _resolve_config(args) -> RunConfig:
    if args.config and args.preset:
        raise ConfigError("use either --preset or --config, not both")
    source = args.config or args.preset
    if source is None:
        raise MissingField("one of --preset or --config is required")
    cfg = load_config(source)
    if args.set:
        cfg = apply_overrides(cfg, args.set)
    for text in args.grid or []:
        cfg.set_grid(parse_grid_flag(text))
    if getattr(args, "omega_min", None) is not None or getattr(args, "omega_max", None) is not None or getattr(args, "omega_points", None) is not None:
        old = cfg.grid("omega") or GridSpec("omega", -2.0, 2.0, 401)
        lo = old.min if args.omega_min is None else args.omega_min
        hi = old.max if args.omega_max is None else args.omega_max
        pts = old.points if args.omega_points is None else args.omega_points
        cfg.set_grid(parse_grid_flag(f"omega={lo!r}:{hi!r}:{pts}"))
    if args.strategy:
        names = [s.value for s in Strategy] if "all" in args.strategy else args.strategy
        for s in names:
            Strategy(s)
        cfg.strategies = list(names)
    if args.branch is not None:
        cfg.branch = args.branch
    if args.format is not None:
        cfg.output_format = args.format
    cfg.output_path = args.out or cfg.output_path
    return cfg


def _choose_branch(cfg: RunConfig):
    p = cfg.physical_params()
    branches = solve_steady_state(p)
    stable = branch_stability(p, branches)
    if cfg.branch is not None:
        if cfg.branch >= len(branches):
            raise ConfigError(f"branch {cfg.branch} requested but only {len(branches)} branch(es) exist")
        return p, branches[cfg.branch]
    candidates = [b for b, ok in zip(branches, stable) if ok] or branches
    if len(candidates) != 1:
        raise ConfigError(f"{len(candidates)} candidate steady-state branches; choose one with --branch")
    return p, candidates[0]


def linear_params_for(cfg: RunConfig) -> LinearParams:
    if cfg.mode == "linear":
        return cfg.linear_params()
    p, br = _choose_branch(cfg)
    if br.degenerate:
        raise DegenerateDenominator("selected branch sits on a degenerate displacement denominator")
    return linearize(validate(p), br.cbar, br.qbar)


def _grid_values(cfg: RunConfig, name: str, default: GridSpec | None = None) -> np.ndarray:
    spec = cfg.grid(name)
    if spec is None:
        if default is None:
            raise MissingField(f"this command needs a '{name}' grid (config 'grids' or --grid {name}=min:max:points)")
        cfg.set_grid(default)
        spec = default
    return spec.values()


def cmd_spectrum(cfg: RunConfig, workers: int = 1) -> CommandResult:
    lin = linear_params_for(cfg)
    omega = _grid_values(cfg, "omega", GridSpec("omega", -2.0, 2.0, 401))
    if len(omega) < 2:
        raise ConfigError("spectrum needs at least 2 frequency points")
    s = force_spectrum(lin, omega)
    rows = [[float(w), float(a), float(b), float(a + b)] for w, a, b in zip(s.omega, s.s_kappa, s.s_gamma)]
    meta = {"markers": [-lin.omega_m, lin.omega_m], "gamma_cool": cooling_rate(lin)}
    table = Table("spectrum", ["omega", "s_kappa", "s_gamma", "s_f"], rows, cfg.to_json(), meta)

    def figure(path):
        from .plotting import plot_spectrum

        plot_spectrum(s, path, lin.omega_m)

    return CommandResult(table, 0, figure)


def occupation_record(lin: LinearParams) -> dict:
    a = drift_matrix(lin)
    report = dynamical_stability(a)
    record = {
        "n_f": None,
        "stable": report.stable,
        "eigen_real_parts": [float(x) for x in report.eigen_real_parts],
        "gamma_cool": cooling_rate(lin),
        "cooperativity": cooperativity(lin),
    }
    if report.stable:
        try:
            record["n_f"] = final_occupation(solve_lyapunov(a, diffusion_matrix(lin)))
        except UnstableSystem:
            record["stable"] = False
    return record


def cmd_occupation(cfg: RunConfig, workers: int = 1) -> CommandResult:
    rec = occupation_record(linear_params_for(cfg))
    cols = ["n_f", "stable", "gamma_cool", "cooperativity", "eigen_real_parts"]
    row = [rec["n_f"], rec["stable"], rec["gamma_cool"], rec["cooperativity"], " ".join(repr(x) for x in rec["eigen_real_parts"])]
    table = Table("occupation", cols, [row], cfg.to_json(), {"record": rec})
    return CommandResult(table)


def _sweep_rows(result, extra=()):
    return [[*extra, *cell.coords, cell.n_f, cell.status] for cell in result.cells]


def cmd_map2d(cfg: RunConfig, workers: int = 1) -> CommandResult:
    base = linear_params_for(cfg)
    dcs = _grid_values(cfg, "delta_c")
    das = _grid_values(cfg, "delta_a")
    res = detuning_map(base, dcs, das, worker_count=workers)
    table = Table(
        "map2d",
        ["delta_c", "delta_a", "n_f", "status"],
        _sweep_rows(res),
        cfg.to_json(),
        {"summary": res.summary},
        groups=[len(das)] * len(dcs),
    )

    def figure(path):
        from .plotting import plot_detuning_map

        plot_detuning_map(res, base.lam, base.nbar, path, base.omega_m)

    return CommandResult(table, 2 if res.n_errors else 0, figure)


def cmd_compare(cfg: RunConfig, workers: int = 1) -> CommandResult:
    base = linear_params_for(cfg)
    spec = cfg.grid("delta_c")
    if spec is None:
        spec = GridSpec("delta_c", -120.0, 120.0, 400)
        cfg.set_grid(spec)
    dcs = line_grid_values(spec, base.omega_m)
    results = compare_strategies(base, dcs, cfg.strategies, worker_count=workers)
    rows, groups = [], []
    for name, res in results.items():
        rows += _sweep_rows(res, (name,))
        groups.append(len(res.cells))
    meta = {"minima": {name: res.summary["min_n_f"] for name, res in results.items()}}
    table = Table("compare", ["strategy", "delta_c", "delta_a", "n_f", "status"], rows, cfg.to_json(), meta, groups, 2)
    errors = sum(r.n_errors for r in results.values())

    def figure(path):
        from .plotting import plot_compare

        plot_compare(results, path)

    return CommandResult(table, 2 if errors else 0, figure)


def cmd_resonant_map(cfg: RunConfig, workers: int = 1) -> CommandResult:
    base = linear_params_for(cfg)
    p = cfg.params
    if "mu_over_lambda" in p:
        ratio = p["mu_over_lambda"]
    elif base.lam != 0:
        ratio = base.mu / base.lam
    else:
        raise MissingField("resonant-map needs params.mu_over_lambda")
    gs = _grid_values(cfg, "g")
    lams = _grid_values(cfg, "lambda")
    kw = dict(gamma_m=base.gamma_m, nbar=base.nbar, worker_count=workers)
    res = resonant_map(base.kappa, base.gamma, ratio, gs, lams, **kw)
    rp = radiation_pressure_g_scan(base.kappa, base.gamma, gs, delta_c=base.omega_m, **kw)
    rows = [[lam, g, ratio * lam, c.n_f, c.status] for c in res.cells for lam, g in [c.coords]]
    meta = {
        "summary": res.summary,
        "radiation_pressure": {"delta_c": base.omega_m, "min_n_f": rp.summary["min_n_f"], "argmin": rp.summary["argmin"]},
        "detunings": "delta_c = delta_a = 0",
    }
    table = Table("resonant-map", ["lambda", "g", "mu", "n_f", "status"], rows, cfg.to_json(), meta, [len(gs)] * len(lams))

    def figure(path):
        from .plotting import plot_resonant_map

        plot_resonant_map(res, path)

    return CommandResult(table, 2 if (res.n_errors or rp.n_errors) else 0, figure)


def cmd_steady_state(cfg: RunConfig, workers: int = 1) -> CommandResult:
    if cfg.mode != "physical":
        raise ConfigError("steady-state needs a configuration with mode 'physical'")
    p = validate(cfg.physical_params())
    branches = solve_steady_state(p)
    stable = branch_stability(p, branches)
    cols = ["index", "cbar_re", "cbar_im", "abs_cbar", "abar_re", "abar_im", "qbar", "residual", "stable", "degenerate"]
    rows = [
        [i, b.cbar.real, b.cbar.imag, abs(b.cbar), b.abar.real, b.abar.imag, b.qbar, b.residual, ok, b.degenerate]
        for i, (b, ok) in enumerate(zip(branches, stable))
    ]
    meta = {"n_branches": len(branches), "n_stable": int(sum(stable)), "bistable": sum(stable) > 1}
    if cfg.branch is not None:
        if cfg.branch >= len(branches):
            raise ConfigError(f"branch {cfg.branch} requested but only {len(branches)} branch(es) exist")
        br = branches[cfg.branch]
        lin = linearize(p, br.cbar, br.qbar)
        meta["linearized"] = {"g": lin.g, "lambda": lin.lam, "mu": lin.mu, "delta_c": lin.delta_c, "delta_a": lin.delta_a}
    table = Table("steady-state", cols, rows, cfg.to_json(), meta)

    def figure(path):
        from .plotting import plot_steady_state

        top = max([b.intensity for b in branches if not b.degenerate] + [1.0]) * 1.5
        xs, etas = [], []
        for x in np.linspace(0.0, top, 600):
            try:
                etas.append(drive_for_amplitude(p, float(np.sqrt(x)))[0])
                xs.append(x)
            except DegenerateDenominator:
                continue
        plot_steady_state(xs, etas, p.eta, branches, stable, path)

    return CommandResult(table, 0, figure)


COMMANDS = {
    "spectrum": (cmd_spectrum, "csv"),
    "occupation": (cmd_occupation, "json"),
    "map2d": (cmd_map2d, "csv"),
    "compare": (cmd_compare, "csv"),
    "resonant-map": (cmd_resonant_map, "csv"),
    "steady-state": (cmd_steady_state, "csv"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("configuration")
    src.add_argument("--preset", choices=sorted(PRESETS), help="named figure preset")
    src.add_argument("--config", help="JSON config file, or a previous output file to re-run")
    src.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a parameter (repeatable)")
    src.add_argument("--grid", action="append", metavar="AXIS=MIN:MAX:POINTS[:log]", help="grid axis (repeatable)")
    src.add_argument("--strategy", action="append", metavar="NAME|all", help="cooling strategy for compare (repeatable)")
    src.add_argument("--branch", type=int, help="steady-state branch index to linearize around")
    out = common.add_argument_group("output")
    out.add_argument("--out", help="output file (default: stdout)")
    out.add_argument("--format", choices=("csv", "json", "plotdata"))
    out.add_argument("--figure", help="figure path (default: next to --out, as .png)")
    out.add_argument("--no-figure", action="store_true", help="do not render a figure")
    out.add_argument("--workers", type=int, default=None, help=f"worker processes (default: ${WORKERS_ENV} or 1)")
    out.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="hybridoptomech", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "spectrum":
            sp.add_argument("--omega-min", type=float)
            sp.add_argument("--omega-max", type=float)
            sp.add_argument("--omega-points", type=int)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    func, default_fmt = COMMANDS[args.command]
    workers = args.workers if args.workers is not None else _default_workers()
    try:
        cfg = _resolve_config(args)
        result = func(cfg, workers)
        fmt = cfg.output_format or default_fmt
        write(result.table, fmt, cfg.output_path)
    except (HybridOptomechError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    fig_path = args.figure
    if fig_path is None and cfg.output_path and cfg.output_path != "-":
        fig_path = str(Path(cfg.output_path).with_suffix(".png"))
    if result.figure is not None and fig_path and not args.no_figure:
        result.figure(fig_path)
        log.info("figure written to %s", fig_path)
    if result.exit_code:
        log.warning("completed with per-cell failures")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
