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

"""Example ensemble datasets, run configurations and training data."""

from pathlib import Path

from tests.fixtures.utils import BASE_DIR

DATA_DIR = BASE_DIR / "data"

forecasts_suffix = ".forecasts.csv"
config_suffix = ".config.yaml"


def list_examples_in_dir(dir: Path, *, suffix: str) -> dict[str, Path]:
    """List all example files with the given suffix in the given dir.

    Returns:
        A dict of {example_name: path}.
    """
    examples = {
        path.name.removesuffix(suffix): path
        for path in dir.iterdir()
        if path.name.endswith(suffix)
    }

    return dict(sorted(examples.items()))


FORECAST_PATHS = list_examples_in_dir(DATA_DIR, suffix=forecasts_suffix)
CONFIG_PATHS = list_examples_in_dir(DATA_DIR, suffix=config_suffix)

UNIVARIATE_FORECASTS = FORECAST_PATHS["univariate"]
UNIVARIATE_OBSERVATIONS = DATA_DIR / "univariate.observations.csv"
UNIVARIATE_JSONL = DATA_DIR / "univariate.jsonl"
SHIFTED_FORECASTS = FORECAST_PATHS["shifted"]
PARTIAL_FORECASTS = FORECAST_PATHS["partial"]
MIXED_SIZE_FORECASTS = FORECAST_PATHS["mixed_size"]
WEIGHTED_FORECASTS = FORECAST_PATHS["weighted"]
BIVARIATE_FORECASTS = FORECAST_PATHS["bivariate"]
BIVARIATE_OBSERVATIONS = DATA_DIR / "bivariate.observations.csv"
UNKNOWN_CASE_OBSERVATIONS = DATA_DIR / "unknown_case.observations.csv"

# unreadable forecast files and the line of the problem, the header being line 1
INVALID_FORECASTS = {
    "missing_member": 1,
    "gap": 1,
    "invalid_value": 3,
    "duplicate_member": 4,
}

INVALID_JSONL = {
    "broken": 2,
    "inconsistent": 2,
    "unexpected_key": 1,
}

RUN_CONFIG = DATA_DIR / "config.yaml"
ENERGY_CONFIG = CONFIG_PATHS["energy"]
INVALID_CONFIG = CONFIG_PATHS["invalid"]
UNIVARIATE_WEIGHT_CONFIG = CONFIG_PATHS["univariate_weight"]
SIMULATE_CONFIG = CONFIG_PATHS["simulate"]
REORDER_CONFIG = CONFIG_PATHS["reorder"]

TRAINING = DATA_DIR / "training.csv"
SHORT_TRAINING = DATA_DIR / "short_training.csv"
CSGD_PARAMS = DATA_DIR / "params.yaml"

# CRPS of the univariate example, computed by hand
UNIVARIATE_CRPS = {"c1": 7 / 18, "c2": 19 / 9, "c3": 2 / 9}
