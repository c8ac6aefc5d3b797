"""Configuration parsing, initial data, and gate checks."""

import json

import numpy as np
import pytest

from landau.config import (SimulationConfig, boundary_fraction, config_from_dict,
                           initial_data, parse_config, support_radius,
                           validate_config)
from landau.errors import ConfigInvalid, ParseError


def _base_dict(**over):
    raw = {
        "gamma": -1.0,
        "epsilon": 1e-3,
        "dims": {"d_x": 1, "d_v": 2},
        "grid": {"n_x": 16, "n_v": 24, "L_x": 500.0, "v_max": 6.0},
        "time": {"t_final": 10.0, "dt_max": 0.25, "output_every": 2.5},
        "initial_data": {"kind": "gaussian",
                         "parameters": {"x_width": 30.0, "v_width": 1.0}},
    }
    raw.update(over)
    return raw


def test_parse_round_trip(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(_base_dict()))
    cfg = parse_config(str(path))
    assert cfg.gamma == -1.0
    assert cfg.grid().shape == (16, 24, 24)
    assert cfg.fit_window == (5.0, 8.0)  # default 0.8 t_final


def test_parse_error_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{\n  broken\n}")
    with pytest.raises(ParseError) as exc:
        parse_config(str(path))
    assert exc.value.line >= 1


def test_missing_key_raises_parse_error():
    raw = _base_dict()
    del raw["gamma"]
    with pytest.raises(ParseError):
        config_from_dict(raw)


def test_gate_gamma():
    with pytest.raises(ConfigInvalid) as exc:
        config_from_dict(_base_dict(gamma=-2.5))
    assert exc.value.gate == "gamma"


def test_gate_dims():
    raw = _base_dict()
    raw["dims"] = {"d_x": 3, "d_v": 2}
    with pytest.raises(ConfigInvalid) as exc:
        config_from_dict(raw)
    assert exc.value.gate == "dims"


def test_gate_cfl():
    raw = _base_dict()
    raw["time"]["cfl_safety"] = 1.5
    with pytest.raises(ConfigInvalid) as exc:
        config_from_dict(raw)
    assert exc.value.gate == "cfl_safety"


def test_gate_no_wrap():
    raw = _base_dict()
    raw["grid"]["L_x"] = 20.0  # far too small for v_max * t_final = 60
    with pytest.raises(ConfigInvalid) as exc:
        config_from_dict(raw)
    assert exc.value.gate == "no-wrap"


def test_gate_velocity_boundary():
    raw = _base_dict()
    raw["grid"]["v_max"] = 2.0  # e^{-4} at the boundary, far above 1e-14
    raw["time"]["t_final"] = 1.0
    with pytest.raises(ConfigInvalid) as exc:
        config_from_dict(raw)
    assert exc.value.gate == "gaussian-dominated"


def test_initial_data_kinds():
    cfg = config_from_dict(_base_dict())
    f = initial_data(cfg)
    assert f.time == 0.0
    assert float(np.max(f.values)) <= cfg.epsilon * (1.0 + 1e-12)

    raw = _base_dict()
    # bumps at +-2 need a wider velocity box to stay Gaussian-dominated
    raw["grid"]["v_max"] = 8.5
    raw["time"]["t_final"] = 5.0
    raw["initial_data"] = {"kind": "seed",
                           "parameters": {"x_width": 30.0, "v_width": 1.0,
                                          "bump_velocity": [2.0]}}
    cfg = config_from_dict(raw)
    f = initial_data(cfg)
    v1 = f.grid.v_mesh()[0]
    # two bumps: the v1-marginal has peaks on both sides
    marg = f.values.sum(axis=(0, 2))
    mid = f.grid.n_v // 2
    assert marg[:mid].max() > 0.5 * marg.max()
    assert marg[mid:].max() > 0.5 * marg.max()


def test_unknown_initial_kind():
    cfg = config_from_dict(_base_dict())
    cfg.initial_kind = "vortex"
    with pytest.raises(ConfigInvalid):
        initial_data(cfg)


def test_support_radius_and_boundary_fraction():
    cfg = config_from_dict(_base_dict())
    f = initial_data(cfg)
    rad = support_radius(f)
    assert 30.0 < rad < 0.5 * cfg.L_x
    assert boundary_fraction(f) <= 1e-14


def test_validate_returns_config():
    cfg = config_from_dict(_base_dict())
    assert validate_config(cfg) is cfg
