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

"""Run configuration shared by the command line interface.

Warning: This is an internal part of the library and might change without notice.
"""

import logging
from pathlib import Path

import pydantic
from pydantic import Field, NonNegativeInt, PositiveInt
from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)

from kernelscore._internals.exceptions import ConfigError
from kernelscore._internals.models.base import Matrix
from kernelscore._internals.models.postproc import GaussianCopulaMode
from kernelscore._internals.models.scores import ScoreRequest
from kernelscore._internals.models.simstudy import ExperimentConfig
from kernelscore._internals.utils import read_json_or_yaml_mapping

log = logging.getLogger(__name__)


class RunConfig(BaseSettings):
    """Settings of a command line run.

    Values are read from a YAML or JSON file and from environment variables with
    the prefix KERNELSCORE_, e.g. KERNELSCORE_SEED. Environment variables take
    precedence over file values.
    """

    model_config = SettingsConfigDict(
        env_prefix="KERNELSCORE_", extra="forbid", frozen=True
    )

    scores: tuple[ScoreRequest, ...] = Field(
        (ScoreRequest(),),
        min_length=1,
        description="The scores to compute, the unweighted CRPS by default.",
    )
    level: float = Field(
        0.05, gt=0, lt=1, description="Significance level of forecast comparisons."
    )
    seed: NonNegativeInt = Field(
        0, description="Seed of rank tie breaks, simulations, fits and reordering."
    )
    hac_lag: NonNegativeInt = Field(
        0,
        description=(
            "Lags of the autocovariance correction in forecast comparisons. Zero"
            + " treats cases as independent."
        ),
    )
    experiment: ExperimentConfig | None = Field(
        None, description="The simulation experiment run by the simulate command."
    )
    correlation: Matrix | None = Field(
        None,
        description=(
            "Correlation matrix of the Gaussian copula. Estimated from observations"
            + " if omitted."
        ),
    )
    copula_mode: GaussianCopulaMode = GaussianCopulaMode.SIMULATE
    max_grid_size: PositiveInt = Field(
        10**6, description="Maximal size of the Gaussian copula grid."
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        """Environment variables override values passed on construction."""
        return env_settings, init_settings


def load_run_config(path: Path | None = None, *, seed: int | None = None) -> RunConfig:
    """Load a run configuration.

    Args:
        path: A YAML or JSON file. Only defaults and environment variables are used
            if omitted.
        seed: If given, overrides the seed from all other sources.

    Raises:
        ConfigError: If the file cannot be parsed or the configuration is invalid.
    """
    data = {}
    if path is not None:
        try:
            data = read_json_or_yaml_mapping(path)
        except (OSError, ValueError) as error:
            raise ConfigError(str(error)) from error
    try:
        config = RunConfig(**data)
    except pydantic.ValidationError as error:
        raise ConfigError(message=str(error), details=error.errors()) from error

    if seed is not None:
        config = config.model_copy(update={"seed": seed})
    log.debug("Using seed %d.", config.seed)
    return config
