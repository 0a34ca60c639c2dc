"""Run configuration loading, validation, and round-tripping."""

import pytest

from scalemine.config import RunConfig
from scalemine.errors import ConfigError
from scalemine.experiments import DEFAULT_SWEEP_GRID


def test_defaults():
    cfg = RunConfig()
    cfg.validate()
    assert cfg.methods == ["sornette", "scholtes"]
    assert cfg.p_threshold == 0.01
    assert cfg.front_load_grid == list(DEFAULT_SWEEP_GRID)
    assert cfg.front_load_grid[0] == 0
    assert cfg.front_load_grid[-1] == 720
    assert cfg.jobs == 1


def test_variants_inherit_config_defaults():
    cfg = RunConfig(
        methods=["sornette:nofilter", "scholtes:loglin"],
        outlier_fraction=0.025,
        filter_one_timers=True,
    )
    first, second = cfg.variants()
    assert first.method == "sornette"
    assert first.p_threshold is None
    assert first.outlier_fraction == 0.025
    assert first.filter_one_timers
    assert second.model == "loglin"
    assert second.outlier_fraction == 0.025


def test_save_load_round_trip(tmp_path):
    cfg = RunConfig(
        manifests=["a.json", "b.json"],
        records_dir="rec",
        methods=["sornette:p=0.05"],
        front_load_grid=[0, 30, 60],
        jobs=4,
    )
    path = tmp_path / "run.json"
    cfg.save(path)
    assert RunConfig.load(path) == cfg


def test_save_is_deterministic(tmp_path):
    cfg = RunConfig(manifests=["m.json"])
    cfg.save(tmp_path / "a.json")
    cfg.save(tmp_path / "b.json")
    a = (tmp_path / "a.json").read_bytes()
    assert a == (tmp_path / "b.json").read_bytes()
    assert b"\r" not in a


def test_unknown_keys_rejected(tmp_path):
    path = tmp_path / "run.json"
    path.write_text('{"records_dir": "r", "threads": 2}', encoding="utf-8")
    with pytest.raises(ConfigError, match="threads"):
        RunConfig.load(path)


def test_unreadable_config_rejected(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.load(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError, match="object"):
        RunConfig.load(bad)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"measure": "sloc"},
        {"methods": []},
        {"methods": ["sornette:bogus"]},
        {"p_threshold": 0.0},
        {"p_threshold": 1.5},
        {"front_load_grid": []},
        {"front_load_grid": [30, 0]},
        {"front_load_grid": [-1, 0]},
        {"front_load_grid": [0, "30"]},
        {"outlier_fraction": 0.5},
        {"outlier_fraction": -0.1},
        {"jobs": 0},
        {"jobs": 1.5},
    ],
)
def test_invalid_values_rejected(kwargs):
    with pytest.raises(ConfigError):
        RunConfig(**kwargs)
