import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from giant_emitters.model import (
    ModelParams,
    SimulationGrid,
    ValidationError,
    grid_from_dict,
    load_config,
    params_from_dict,
    scenarios_from_config,
    validate,
)


def test_defaults_are_valid():
    p = validate(ModelParams())
    assert p.coupling_sites == (0,)
    assert p.leg_coupling == pytest.approx(0.2)


def test_giant_legs_split_coupling():
    p = validate(ModelParams(nc=2, d=12, g0=0.2))
    assert p.coupling_sites == (-6, 6)
    assert p.leg_coupling == pytest.approx(0.1)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"xi": 0.0},
        {"xi": -1.0},
        {"g0": 0.0},
        {"nc": 3},
        {"nc": 2, "d": None},
        {"nc": 2, "d": 3},
        {"nc": 2, "d": 0},
        {"nc": 1, "d": 4},
    ],
)
def test_invalid_params_rejected(kwargs):
    with pytest.raises(ValidationError):
        validate(ModelParams(**kwargs))


@given(st.integers(min_value=1, max_value=200))
def test_even_separations_accepted(half):
    p = validate(ModelParams(nc=2, d=2 * half))
    assert p.coupling_sites[1] - p.coupling_sites[0] == 2 * half


def test_grid_must_keep_wavefront_inside():
    with pytest.raises(ValidationError):
        grid_from_dict({"t_max": 300.0, "lattice_half_width": 400})
    g = grid_from_dict({"t_max": 100.0, "n_t": 11})
    assert g.dt == pytest.approx(10.0)
    assert isinstance(g, SimulationGrid)


def test_params_from_dict_rejects_unknown_and_fractional():
    with pytest.raises(ValidationError):
        params_from_dict({"gamma": 1.0})
    with pytest.raises(ValidationError):
        params_from_dict({"nc": 2, "d": 2.5})


def test_config_roundtrip(tmp_path):
    cfg = {"scenarios": [{"name": "a", "params": {"delta": 1.0}}, {"name": "b", "params": {"nc": 2, "d": 4}, "outputs": ["trace", "field"]}]}
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg))
    scen = load_config(path)
    assert [s.name for s in scen] == ["a", "b"]
    assert scen[1].outputs == {"trace", "field"}


def test_duplicate_names_rejected():
    with pytest.raises(ValidationError):
        scenarios_from_config({"scenarios": [{"name": "a"}, {"name": "a"}]})


def test_unknown_output_and_sweep_rejected():
    with pytest.raises(ValidationError):
        scenarios_from_config({"name": "a", "outputs": ["movie"]})
    with pytest.raises(ValidationError):
        scenarios_from_config({"name": "a", "sweep": {"xi": [1.0]}})
