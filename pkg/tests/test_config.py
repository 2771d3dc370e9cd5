# Copyright 2021 - 2024 Universität Tübingen, DKFZ, EMBL, and Universität zu Köln
# for the German Human Genome-Phenome Archive (GHGA)
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#

"""Tests loading run configurations."""

from pathlib import Path

import pytest

from kernelscore import load_run_config
from kernelscore.exceptions import ConfigError
from kernelscore.models import ScoreRequest
from kernelscore.utils import read_json_or_yaml_mapping
from tests.fixtures.examples import ENERGY_CONFIG, INVALID_CONFIG, RUN_CONFIG


def test_default_config():
    """Test the configuration used without a file."""
    config = load_run_config()
    assert config.scores == (ScoreRequest(),)
    assert config.level == 0.05
    assert config.seed == 0
    assert config.hac_lag == 0
    assert config.experiment is None


def test_load_config():
    """Test loading score requests and settings from YAML."""
    config = load_run_config(RUN_CONFIG)
    assert [request.name for request in config.scores] == ["crps", "owcrps", "twcrps"]
    assert [request.mode for request in config.scores] == [
        "none",
        "outcome",
        "threshold",
    ]
    assert config.seed == 3


def test_load_multivariate_config():
    """Test loading multivariate score requests."""
    config = load_run_config(ENERGY_CONFIG)
    assert [request.name for request in config.scores] == [
        "energy",
        "variogram",
        "vr_energy",
    ]
    assert config.scores[2].mode == "vertical"


def test_invalid_config():
    """Test that invalid values are reported with details."""
    with pytest.raises(ConfigError) as exception_info:
        load_run_config(INVALID_CONFIG)

    assert exception_info.value.details
    assert exception_info.value.details[0]["loc"] == ("level",)


def test_config_with_unknown_field(tmp_path: Path):
    """Test that unknown fields are rejected."""
    path = tmp_path / "config.yaml"
    path.write_text("seeds: 3\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_run_config(path)


def test_missing_config_file(tmp_path: Path):
    """Test that a missing file is a configuration error."""
    with pytest.raises(ConfigError):
        load_run_config(tmp_path / "missing.yaml")


def test_environment_overrides_file(monkeypatch: pytest.MonkeyPatch):
    """Test that environment variables take precedence over file values, and the
    seed argument over both.
    """
    monkeypatch.setenv("KERNELSCORE_SEED", "11")
    assert load_run_config(RUN_CONFIG).seed == 11
    assert load_run_config(RUN_CONFIG, seed=9).seed == 9


def test_read_config_mapping():
    """Test reading a configuration file as a plain mapping."""
    mapping = read_json_or_yaml_mapping(RUN_CONFIG)
    assert mapping["seed"] == 3
    assert len(mapping["scores"]) == 3
