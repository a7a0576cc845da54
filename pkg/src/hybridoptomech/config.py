"""Run configuration: strict JSON schema, named figure presets, overrides."""
from __future__ import annotations

import copy
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import BadRange, ConfigError, MissingField, ParseError, UnknownKey
from .experiments import GUARD_BAND, Strategy
from .model import LinearParams, PhysicalParams

CONFIG_PREFIX = "# config: "

TOP_LEVEL_KEYS = {"mode", "params", "grids", "strategies", "output", "branch"}
COMMON_PARAMS = {"kappa", "gamma", "delta_c", "delta_a", "gamma_m", "q_m", "nbar", "omega_m", "lambda"}
LINEAR_PARAMS = COMMON_PARAMS | {"g", "mu", "mu_over_lambda"}
PHYSICAL_PARAMS = COMMON_PARAMS | {"g0", "mu0", "eta", "phi"}
GRID_AXES = {"omega", "delta_c", "delta_a", "g", "lambda"}
GRID_KEYS = {"name", "min", "max", "points", "spacing"}
OUTPUT_KEYS = {"format", "path"}
FORMATS = ("csv", "json", "plotdata")

DEFAULT_Q_M = 1e6


@dataclass
class GridSpec:
    name: str
    min: float
    max: float
    points: int
    spacing: str = "linear"

    def values(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.min, self.max, self.points)
        return np.linspace(self.min, self.max, self.points)

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "min": self.min, "max": self.max, "points": self.points, "spacing": self.spacing}


@dataclass
class RunConfig:
    mode: str
    params: dict[str, float]
    grids: list[GridSpec] = field(default_factory=list)
    strategies: list[str] = field(default_factory=lambda: [s.value for s in Strategy])
    output_format: str | None = None
    output_path: str | None = None
    branch: int | None = None

    def grid(self, name: str) -> GridSpec | None:
        for g in self.grids:
            if g.name == name:
                return g
        return None

    def set_grid(self, spec: GridSpec) -> None:
        self.grids = [g for g in self.grids if g.name != spec.name] + [spec]
        self.grids.sort(key=lambda g: g.name)

    def to_dict(self) -> dict[str, Any]:
        """Provenance record; the output path is deliberately left out."""
        d: dict[str, Any] = {
            "mode": self.mode,
            "params": dict(sorted(self.params.items())),
            "grids": [g.to_dict() for g in self.grids],
            "strategies": list(self.strategies),
        }
        if self.output_format is not None:
            d["output"] = {"format": self.output_format}
        if self.branch is not None:
            d["branch"] = self.branch
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @property
    def omega_m(self) -> float:
        return self.params.get("omega_m", 1.0)

    def _gamma_m(self) -> float:
        if "gamma_m" in self.params:
            return self.params["gamma_m"]
        return self.omega_m / self.params.get("q_m", DEFAULT_Q_M)

    def linear_params(self) -> LinearParams:
        if self.mode != "linear":
            raise ConfigError("linear_params() needs mode 'linear'")
        p = self.params
        lam = p.get("lambda", 0.0)
        mu = p["mu_over_lambda"] * lam if "mu_over_lambda" in p else p.get("mu", 0.0)
        return LinearParams(
            kappa=p["kappa"],
            gamma=p["gamma"],
            g=p.get("g", 0.0),
            lam=lam,
            mu=mu,
            delta_c=p.get("delta_c", 0.0),
            delta_a=p.get("delta_a", 0.0),
            gamma_m=self._gamma_m(),
            nbar=p.get("nbar", 0.0),
            omega_m=self.omega_m,
        ).normalized()

    def physical_params(self) -> PhysicalParams:
        if self.mode != "physical":
            raise ConfigError("physical_params() needs mode 'physical'")
        p = self.params
        return PhysicalParams(
            kappa=p["kappa"],
            gamma=p["gamma"],
            delta_c=p.get("delta_c", 0.0),
            delta_a=p.get("delta_a", 0.0),
            g0=p.get("g0", 0.0),
            lam=p.get("lambda", 0.0),
            mu0=p.get("mu0", 0.0),
            eta=p["eta"],
            phi=p.get("phi", 0.0),
            gamma_m=self._gamma_m(),
            nbar=p.get("nbar", 0.0),
            omega_m=self.omega_m,
        )


def _fig3_params() -> dict[str, float]:
    # upper-polariton lower-sideband point near the branch optimum
    da = -0.6
    return {
        "g": 0.25, "lambda": 8.0, "mu": 0.01, "kappa": 20.0, "gamma": 0.8,
        "q_m": 1e6, "nbar": 1e3, "delta_a": da, "delta_c": 1.0 + 64.0 / (da - 1.0),
    }


def _line_grid() -> list[dict[str, Any]]:
    return [{"name": "delta_c", "min": -120.0, "max": 120.0, "points": 400, "spacing": "linear"}]


def _resonant_grids() -> list[dict[str, Any]]:
    return [
        {"name": "g", "min": 0.01, "max": 2.0, "points": 150, "spacing": "log"},
        {"name": "lambda", "min": 0.1, "max": 20.0, "points": 150, "spacing": "linear"},
    ]


def _fig4(kappa: float, gamma: float, g: float, lam: float, mu: float) -> dict[str, Any]:
    dc = -40.0
    params = {
        "kappa": kappa, "gamma": gamma, "g": g, "lambda": lam, "mu": mu,
        "q_m": 1e6, "nbar": 1e3, "delta_c": dc, "delta_a": 1.0 + lam**2 / (dc - 1.0),
    }
    return {"mode": "linear", "params": params, "grids": _line_grid()}


def _fig5(kappa: float, gamma: float, lam: float, g: float) -> dict[str, Any]:
    return {
        "mode": "linear",
        "params": {
            "kappa": kappa, "gamma": gamma, "mu_over_lambda": 0.05, "lambda": lam, "g": g,
            "delta_c": 0.0, "delta_a": 0.0, "q_m": 1e6, "nbar": 1e3,
        },
        "grids": _resonant_grids(),
    }


PRESETS: dict[str, dict[str, Any]] = {
    "fig3": {
        "mode": "linear",
        "params": _fig3_params(),
        "grids": [
            {"name": "delta_a", "min": -6.0, "max": 6.0, "points": 201, "spacing": "linear"},
            {"name": "delta_c", "min": -40.0, "max": 40.0, "points": 201, "spacing": "linear"},
            {"name": "omega", "min": -2.0, "max": 2.0, "points": 401, "spacing": "linear"},
        ],
    },
    "fig4a": _fig4(kappa=20.0, gamma=0.8, g=0.25, lam=8.0, mu=0.01),
    "fig4b": _fig4(kappa=80.0, gamma=2.0, g=0.06, lam=15.0, mu=0.006),
    "fig4c": _fig4(kappa=80.0, gamma=0.1, g=0.3, lam=8.0, mu=0.005),
    "fig4d": _fig4(kappa=0.8, gamma=10.0, g=0.1, lam=12.0, mu=0.025),
    "fig5a": _fig5(2.7, 0.8, lam=1.4, g=0.17),
    "fig5b": _fig5(0.7, 0.5, lam=0.77, g=0.079),
}


def _number(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{key} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise BadRange(f"{key} must be finite")
    return value


def _parse_grid(raw: Any) -> GridSpec:
    if not isinstance(raw, dict):
        raise ParseError(f"grid entry must be an object, got {raw!r}")
    extra = set(raw) - GRID_KEYS
    if extra:
        raise UnknownKey(f"unknown grid key(s): {', '.join(sorted(extra))}")
    for k in ("name", "min", "max", "points"):
        if k not in raw:
            raise MissingField(f"grid entry is missing '{k}'")
    name = raw["name"]
    if name not in GRID_AXES:
        raise UnknownKey(f"unknown grid axis {name!r}; expected one of {sorted(GRID_AXES)}")
    lo, hi = _number(f"grid {name}.min", raw["min"]), _number(f"grid {name}.max", raw["max"])
    points = raw["points"]
    if isinstance(points, bool) or not isinstance(points, int) or points < 1:
        raise BadRange(f"grid {name}.points must be a positive integer")
    spacing = raw.get("spacing", "linear")
    if spacing not in ("linear", "log"):
        raise BadRange(f"grid {name}.spacing must be 'linear' or 'log'")
    if hi < lo:
        raise BadRange(f"grid {name}: max < min")
    if spacing == "log" and lo <= 0:
        raise BadRange(f"grid {name}: log spacing needs min > 0")
    return GridSpec(name, lo, hi, points, spacing)


def _check_params(mode: str, params: dict[str, float]) -> None:
    for k in ("kappa", "gamma"):
        if k not in params:
            raise MissingField(f"params.{k} is required")
        if params[k] <= 0:
            raise BadRange(f"params.{k} must be > 0, got {params[k]}")
    for k in ("gamma_m", "nbar", "eta"):
        if k in params and params[k] < 0:
            raise BadRange(f"params.{k} must be >= 0, got {params[k]}")
    for k in ("q_m", "omega_m"):
        if k in params and params[k] <= 0:
            raise BadRange(f"params.{k} must be > 0, got {params[k]}")
    if "gamma_m" in params and "q_m" in params:
        raise BadRange("give either params.gamma_m or params.q_m, not both")
    if mode == "linear" and "mu" in params and "mu_over_lambda" in params:
        raise BadRange("give either params.mu or params.mu_over_lambda, not both")
    if mode == "physical" and "eta" not in params:
        raise MissingField("physical mode requires the drive amplitude params.eta")


def parse_config(raw: Any) -> RunConfig:
    """Validate a decoded JSON object against the run-configuration schema."""
    if not isinstance(raw, dict):
        raise ParseError("configuration must be a JSON object")
    extra = set(raw) - TOP_LEVEL_KEYS
    if extra:
        raise UnknownKey(f"unknown top-level key(s): {', '.join(sorted(extra))}")
    mode = raw.get("mode", "linear")
    if mode not in ("linear", "physical"):
        raise BadRange(f"mode must be 'linear' or 'physical', got {mode!r}")
    if "params" not in raw:
        raise MissingField("'params' is required")
    if not isinstance(raw["params"], dict):
        raise ParseError("'params' must be an object")
    allowed = LINEAR_PARAMS if mode == "linear" else PHYSICAL_PARAMS
    extra = set(raw["params"]) - allowed
    if extra:
        raise UnknownKey(f"unknown {mode}-mode parameter(s): {', '.join(sorted(extra))}")
    params = {k: _number(f"params.{k}", v) for k, v in raw["params"].items()}
    _check_params(mode, params)

    grids_raw = raw.get("grids", [])
    if not isinstance(grids_raw, list):
        raise ParseError("'grids' must be a list")
    grids = sorted((_parse_grid(g) for g in grids_raw), key=lambda g: g.name)
    names = [g.name for g in grids]
    if len(set(names)) != len(names):
        raise BadRange("duplicate grid axis")

    strategies = raw.get("strategies", [s.value for s in Strategy])
    if not isinstance(strategies, list):
        raise ParseError("'strategies' must be a list")
    for s in strategies:
        try:
            Strategy(s)
        except ValueError:
            raise BadRange(f"unknown strategy {s!r}") from None

    output = raw.get("output", {})
    if not isinstance(output, dict):
        raise ParseError("'output' must be an object")
    extra = set(output) - OUTPUT_KEYS
    if extra:
        raise UnknownKey(f"unknown output key(s): {', '.join(sorted(extra))}")
    fmt = output.get("format")
    if fmt is not None and fmt not in FORMATS:
        raise BadRange(f"output.format must be one of {FORMATS}")

    branch = raw.get("branch")
    if branch is not None and (isinstance(branch, bool) or not isinstance(branch, int) or branch < 0):
        raise BadRange("branch must be a non-negative integer")
    return RunConfig(mode, params, grids, list(strategies), fmt, output.get("path"), branch)


def _read_embedded(text: str) -> Any:
    for line in text.splitlines():
        if line.startswith(CONFIG_PREFIX):
            return json.loads(line[len(CONFIG_PREFIX):])
    raise ParseError("no embedded configuration found")


def load_config(source: str) -> RunConfig:
    """Load a preset by name, a JSON config file, or the header of a previous output.

    Raises
    ------
    ParseError, UnknownKey, MissingField, BadRange
    """
    if source in PRESETS:
        return parse_config(copy.deepcopy(PRESETS[source]))
    if not os.path.exists(source):
        raise ParseError(f"{source!r} is neither a preset ({', '.join(PRESETS)}) nor an existing file")
    with open(source) as fh:
        text = fh.read()
    try:
        if text.lstrip().startswith("#"):
            raw = _read_embedded(text)
        else:
            raw = json.loads(text)
            if isinstance(raw, dict) and "config" in raw and "rows" in raw:
                raw = raw["config"]
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}: {exc}") from exc
    return parse_config(raw)


def parse_grid_flag(text: str) -> GridSpec:
    """Parse ``axis=min:max:points[:log]``."""
    try:
        name, spec = text.split("=", 1)
        parts = spec.split(":")
        if len(parts) not in (3, 4):
            raise ValueError
        spacing = "linear"
        if len(parts) == 4:
            if parts[3] not in ("log", "linear"):
                raise ValueError
            spacing = parts[3]
        raw = {"name": name.strip(), "min": float(parts[0]), "max": float(parts[1]), "points": int(parts[2]), "spacing": spacing}
    except ValueError:
        raise ParseError(f"bad --grid value {text!r}; expected axis=min:max:points[:log]") from None
    return _parse_grid(raw)


def apply_overrides(cfg: RunConfig, assignments: list[str]) -> RunConfig:
    """Apply ``key=value`` parameter overrides and re-validate."""
    raw = cfg.to_dict()
    for item in assignments:
        if "=" not in item:
            raise ParseError(f"bad --set value {item!r}; expected key=value")
        key, value = item.split("=", 1)
        try:
            raw["params"][key.strip()] = float(value)
        except ValueError:
            raise ParseError(f"--set {key}: {value!r} is not a number") from None
        if key.strip() == "gamma_m":
            raw["params"].pop("q_m", None)
        elif key.strip() == "q_m":
            raw["params"].pop("gamma_m", None)
        elif key.strip() == "mu":
            raw["params"].pop("mu_over_lambda", None)
        elif key.strip() == "mu_over_lambda":
            raw["params"].pop("mu", None)
    new = parse_config(raw)
    new.output_path = cfg.output_path
    return new


def line_grid_values(spec: GridSpec, omega_m: float = 1.0) -> np.ndarray:
    """Cavity detunings for a polariton line scan.

    ``points`` are placed on each side of the excluded window
    ``(-omega_m - guard, omega_m + guard)``.
    """
    pieces = []
    if spec.min < -omega_m - GUARD_BAND:
        pieces.append(np.linspace(spec.min, min(spec.max, -omega_m - GUARD_BAND), spec.points))
    if spec.max > omega_m + GUARD_BAND:
        pieces.append(np.linspace(max(spec.min, omega_m + GUARD_BAND), spec.max, spec.points))
    if not pieces:
        return spec.values()
    return np.concatenate(pieces)
