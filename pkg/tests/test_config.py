"""Tests for presets, environment overrides and CLI precedence."""

import json
from pathlib import Path

import pytest

from stuq.config import ExperimentConfig, WindowSchema, load_settings, parse_int_list
from stuq.core.enums import CellKind, HeadKind, MethodTag, OptimizerKind, SupportKind
from stuq.core.errors import ConfigError

PRESETS = sorted((Path(__file__).resolve().parent.parent / "presets").glob("*.env"))

BASE = "DATA_GENERATOR=graph-diffusion\nDATA_NODES=4\nDATA_STEPS=200\n"


def preset(tmp_path, text, name="run.env"):
    path = tmp_path / name
    path.write_text(BASE + text)
    return path


class TestPresets:
    @pytest.mark.parametrize("path", PRESETS, ids=lambda p: p.stem)
    def test_every_preset_loads(self, path):
        config = ExperimentConfig.from_env(path, environ={})
        assert config.model_config(4, 1, (2, 2) if config.model.cell_kind == CellKind.GRID_CONV else None)

    def test_presets_present(self):
        assert {p.stem for p in PRESETS} >= {tag.value for tag in MethodTag}

    def test_method_preset_trains_its_heads(self):
        config = ExperimentConfig.from_env(PRESETS[0].parent / "sq.env", environ={})
        assert config.method == MethodTag.SQ
        assert config.head_kind == HeadKind.SPLINE_11


class TestLoadSettings:
    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_settings(tmp_path / "absent.env", environ={})

    def test_unknown_key(self, tmp_path):
        with pytest.raises(ConfigError, match="MODEL_WIDTH"):
            load_settings(preset(tmp_path, "MODEL_WIDTH=3\n"), environ={})

    def test_environment_overrides_file(self, tmp_path):
        path = preset(tmp_path, "TRAIN_LR=0.1\n")
        settings = load_settings(path, environ={"STUQ_TRAIN_LR": "0.5", "HOME": "/root", "STUQ_LOG_LEVEL": "DEBUG"})
        assert settings["TRAIN_LR"] == "0.5"
        assert "LOG_LEVEL" not in settings

    def test_environment_only(self):
        settings = load_settings(environ={"STUQ_DATA_GENERATOR": "seasonal-grid"})
        assert settings == {"DATA_GENERATOR": "seasonal-grid"}


class TestExperimentConfig:
    def test_defaults(self, tmp_path):
        config = ExperimentConfig.from_env(preset(tmp_path, ""), environ={})
        assert config.method == MethodTag.POINT
        assert config.rho == 0.05
        assert config.train.optimizer == OptimizerKind.ADAM
        assert config.model.support_kinds == (SupportKind.RANDOM_WALK,)

    def test_typed_values(self, tmp_path):
        path = preset(tmp_path, "TRAIN_CLIP=none\nMODEL_SUPPORTS=random-walk,reverse-random-walk\nMODEL_RESIDUAL=yes\n")
        config = ExperimentConfig.from_env(path, environ={})
        assert config.train.clip_norm is None
        assert len(config.model.support_kinds) == 2
        assert config.model.residual is True
        assert config.model_config(4, 1).support_count == 2

    def test_bad_number(self, tmp_path):
        with pytest.raises(ConfigError, match="TRAIN_EPOCHS"):
            ExperimentConfig.from_env(preset(tmp_path, "TRAIN_EPOCHS=many\n"), environ={})

    def test_bad_boolean(self, tmp_path):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_env(preset(tmp_path, "MODEL_RESIDUAL=maybe\n"), environ={})

    def test_needs_exactly_one_data_source(self, tmp_path):
        path = preset(tmp_path, "DATA_PATH=series.csv\n")
        with pytest.raises(ConfigError):
            ExperimentConfig.from_env(path, environ={})

    def test_explicit_head_must_match_method(self, tmp_path):
        with pytest.raises(ConfigError, match="interval-3"):
            ExperimentConfig.from_env(preset(tmp_path, "METHOD_TAG=mis\nMODEL_HEAD=quantile-3\n"), environ={})

    def test_rho_range(self, tmp_path):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_env(preset(tmp_path, "METHOD_RHO=1.5\n"), environ={})

    def test_cli_overrides_environment(self, tmp_path):
        path = preset(tmp_path, "RUN_SEED=1\nMETHOD_TAG=point\n")
        config = ExperimentConfig.from_env(path, environ={"STUQ_RUN_SEED": "2"})
        assert config.seed == 2
        overridden = config.with_overrides(seed=3, method="bootstrap", rho=0.2, sweep_counts=[5, 25, 100])
        assert (overridden.seed, overridden.method, overridden.rho) == (3, MethodTag.BOOTSTRAP, 0.2)
        assert overridden.sweep_counts == (5, 25, 100)

    def test_method_override_drops_foreign_head(self, tmp_path):
        config = ExperimentConfig.from_env(preset(tmp_path, "METHOD_TAG=sq\nMODEL_HEAD=spline-11\n"), environ={})
        assert config.with_overrides(method="quantile").head_kind == HeadKind.QUANTILE_3

    def test_unknown_method_override(self, tmp_path):
        config = ExperimentConfig.from_env(preset(tmp_path, ""), environ={})
        with pytest.raises(ConfigError):
            config.with_overrides(method="laplace")

    def test_horizon_windows(self, tmp_path):
        config = ExperimentConfig.from_env(preset(tmp_path, "DATA_HORIZON=12\n"), environ={})
        assert config.horizon_windows() == (3, 6, 12)

    def test_window_steps_within_horizon(self, tmp_path):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_env(preset(tmp_path, "DATA_HORIZON=4\nRUN_WINDOWS=2,5\n"), environ={})

    def test_echo_is_json_ready(self, tmp_path):
        config = ExperimentConfig.from_env(preset(tmp_path, "METHOD_TAG=sg-mcmc\n"), environ={})
        echo = json.loads(json.dumps(config.to_dict()))
        assert echo["method"] == "sg-mcmc"
        assert echo["data"]["generator"]["kind"] == "graph-diffusion"


class TestParsing:
    def test_int_list(self):
        assert parse_int_list("5, 25,100") == (5, 25, 100)

    def test_int_range(self):
        assert parse_int_list("0-3") == (0, 1, 2, 3)

    def test_empty_item(self):
        with pytest.raises(ValueError):
            parse_int_list("5,,25")

    def test_window_schema_split(self):
        with pytest.raises(ConfigError):
            WindowSchema(split=(0.5, 0.5, 0.5))
