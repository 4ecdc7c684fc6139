"""Tests for run configuration loading and validation."""

import json

import pytest

from omega_width.config import ConfigError, RunConfig, load_config, save_config


@pytest.fixture
def config_file(tmp_path):
    """A JSON configuration selecting the ts mode."""
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"command": "solve", "mode": "ts", "seed": 7}), encoding="utf-8")
    return path


class TestRunConfig:
    """Test defaults and validation."""

    def test_defaults(self):
        config = RunConfig()
        assert config.mode == "wnu"
        assert config.seed == 42
        assert config.levels is None
        assert config.analyses == ("bounded-width",)

    def test_levels(self):
        assert RunConfig(k=2, ell=3).levels == (2, 3)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"command": "explode"},
            {"mode": "fast"},
            {"route": "direct"},
            {"analyses": ("speed",)},
            {"k": 2},
            {"k": 4, "ell": 3},
            {"trials": -1},
            {"n_vars": 0},
            {"node_cap": 0},
            {"log_level": "LOUD"},
        ],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigError):
            RunConfig(**kwargs)

    def test_to_json(self):
        document = json.loads(RunConfig(atlas="henson:3").to_json())
        assert document["format"] == "config"
        assert document["version"] == 1
        assert document["atlas"] == "henson:3"


class TestLoadConfig:
    """Test merging defaults, files and overrides."""

    def test_file_then_overrides(self, config_file):
        config = load_config(config_file, {"seed": 9, "atlas": None})
        assert config.mode == "ts"
        assert config.seed == 9
        assert config.atlas is None

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown configuration keys"):
            load_config(None, {"colour": "red"})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_config(tmp_path / "absent.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{", encoding="utf-8")
        with pytest.raises(ConfigError, match="Invalid JSON"):
            load_config(path)

    def test_not_an_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[]", encoding="utf-8")
        with pytest.raises(ConfigError, match="JSON object"):
            load_config(path)

    def test_saved_config_reloads(self, tmp_path):
        original = RunConfig(command="gen", atlas="henson:3", n_vars=5, analyses=("core", "ts"))
        path = tmp_path / "saved.json"
        save_config(original, path)
        assert json.loads(path.read_text(encoding="utf-8"))["format"] == "config"
        assert load_config(path) == original
