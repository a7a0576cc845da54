import json
import math

import numpy as np
import pytest

from hybridoptomech.config import (
    PRESETS,
    apply_overrides,
    line_grid_values,
    load_config,
    parse_config,
    parse_grid_flag,
)
from hybridoptomech.errors import BadRange, MissingField, ParseError, UnknownKey
from hybridoptomech.model import cooperativity
from hybridoptomech.output import Table, read_csv, render


def test_fig3_preset():
    cfg = load_config("fig3")
    p = cfg.params
    assert (p["kappa"], p["gamma"], p["g"], p["lambda"], p["mu"], p["q_m"], p["nbar"]) == (20.0, 0.8, 0.25, 8.0, 0.01, 1e6, 1e3)
    lin = cfg.linear_params()
    assert lin.gamma_m == 1e-6
    assert cooperativity(lin) == 4.0
    assert (1 - lin.delta_a) * (1 - lin.delta_c) == pytest.approx(64.0, rel=1e-14)


def test_fig5b_preset():
    cfg = load_config("fig5b")
    lin = cfg.linear_params()
    assert (lin.kappa, lin.gamma, lin.delta_c, lin.delta_a) == (0.7, 0.5, 0.0, 0.0)
    assert lin.mu == pytest.approx(0.05 * lin.lam, rel=1e-15)
    assert cfg.grid("g").spacing == "log"


@pytest.mark.parametrize(
    "name, expected",
    [
        ("fig4a", (20.0, 0.8, 0.25, 8.0, 0.01)),
        ("fig4b", (80.0, 2.0, 0.06, 15.0, 0.006)),
        ("fig4c", (80.0, 0.1, 0.3, 8.0, 0.005)),
        ("fig4d", (0.8, 10.0, 0.1, 12.0, 0.025)),
    ],
)
def test_fig4_presets(name, expected):
    lin = load_config(name).linear_params()
    assert (lin.kappa, lin.gamma, lin.g, lin.lam, lin.mu) == expected


def test_all_presets_parse():
    for name in PRESETS:
        load_config(name).linear_params()


def base():
    return {"mode": "linear", "params": {"kappa": 1.0, "gamma": 1.0}}


def test_schema_errors():
    raw = base()
    raw["params"]["kappa"] = -1.0
    with pytest.raises(BadRange):
        parse_config(raw)
    with pytest.raises(UnknownKey, match="colour"):
        parse_config({**base(), "colour": "red"})
    raw = base()
    raw["params"]["g0"] = 1.0
    with pytest.raises(UnknownKey, match="g0"):
        parse_config(raw)
    with pytest.raises(MissingField):
        parse_config({"mode": "linear"})
    with pytest.raises(MissingField):
        parse_config({"mode": "physical", "params": {"kappa": 1.0, "gamma": 1.0}})
    raw = base()
    raw["params"]["gamma"] = "fast"
    with pytest.raises(ParseError):
        parse_config(raw)
    with pytest.raises(BadRange):
        parse_config({**base(), "grids": [{"name": "g", "min": 0.0, "max": 1.0, "points": 3, "spacing": "log"}]})
    with pytest.raises(UnknownKey):
        parse_config({**base(), "grids": [{"name": "phase", "min": 0.0, "max": 1.0, "points": 3}]})
    with pytest.raises(BadRange):
        parse_config({**base(), "strategies": ["laser"]})


def test_load_config_errors(tmp_path):
    with pytest.raises(ParseError):
        load_config("no-such-preset")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        load_config(str(bad))


def test_config_json_round_trip(tmp_path):
    cfg = load_config("fig4b")
    path = tmp_path / "c.json"
    path.write_text(cfg.to_json())
    again = load_config(str(path))
    assert again.to_json() == cfg.to_json()
    assert again.linear_params() == cfg.linear_params()


def test_grid_flag_and_overrides():
    g = parse_grid_flag("g=0.01:2:5:log")
    np.testing.assert_allclose(g.values(), np.geomspace(0.01, 2, 5), rtol=1e-15)
    with pytest.raises(ParseError):
        parse_grid_flag("g=0:1")
    cfg = apply_overrides(load_config("fig3"), ["gamma_m=1e-4", "nbar=10"])
    lin = cfg.linear_params()
    assert lin.gamma_m == 1e-4 and lin.nbar == 10.0
    with pytest.raises(UnknownKey):
        apply_overrides(load_config("fig3"), ["colour=1"])


def test_line_grid_values_exclude_window():
    spec = parse_grid_flag("delta_c=-10:10:5")
    vals = line_grid_values(spec)
    assert vals.size == 10 and vals[0] == -10.0 and vals[-1] == 10.0
    assert not np.any(np.abs(vals) < 1.0)


def test_csv_round_trip_full_precision():
    values = [0.1 + 0.2, math.pi * 1e-17, 123456789.123456789, -2.5e300]
    table = Table("test", ["x", "ok", "missing"], [[v, True, None] for v in values], json.dumps({"a": 1}))
    header, cols, rows = read_csv(render(table, "csv"))
    assert cols == ["x", "ok", "missing"]
    assert header["command"] == "test"
    assert [r[0] for r in rows] == values
    assert all(r[1] is True and r[2] is None for r in rows)


def test_plotdata_blocks():
    table = Table("t", ["a", "b"], [[1, 2.0], [3, None], [5, 6.0]], groups=[2, 1], group_gap=2)
    text = render(table, "plotdata")
    body = [l for l in text.splitlines() if not l.startswith("#")]
    assert body == ["1 2.0", "3 nan", "", "", "5 6.0"]
    doc = json.loads(render(table, "json"))
    assert doc["rows"][1] == [3, None]
