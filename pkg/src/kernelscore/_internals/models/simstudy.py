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

"""Models describing the mixture-forecast discrimination experiment.

Warning: This is an internal part of the library and might change without notice.
"""

from enum import StrEnum

from arcticfreeze import FrozenDict
from pydantic import Field, NonNegativeInt, PositiveInt, model_validator
from pydantic_core import PydanticCustomError

from kernelscore._internals.models.base import (
    FiniteFloat,
    PositiveFloat,
    Probability,
    _FrozenNoExtraBaseModel,
)
from kernelscore._internals.models.scores import ScoreFamily


class MixtureForecast(StrEnum):
    """The two competing forecast distributions.

    F1 = a G + (1 - a) H and F2 = (1 - a) G + a H, where G is standard normal, H is a
    Student t distribution and a is the mixing function.
    """

    F1 = "F1"
    F2 = "F2"


class MixtureSpec(_FrozenNoExtraBaseModel):
    """The distributions G and H and the mixing function a(z) = Phi(sum_i z_i / s)."""

    dimension: PositiveInt = 1
    degrees_of_freedom: PositiveFloat = Field(
        4.0, description="Degrees of freedom of the Student t distribution H."
    )
    mixing_sd: PositiveFloat = Field(
        0.5, description="Standard deviation s of the mixing distribution function."
    )
    mixing_override: Probability | None = Field(
        None,
        description="If set, a constant used in place of the mixing function a(z).",
    )


class WeightKind(StrEnum):
    """The family of threshold weights the experiment sweeps over."""

    UNIVARIATE = "univariate"
    ORTHANT = "orthant"
    HALF_SPACE = "half_space"


class WeightingMode(StrEnum):
    """The weighting variants compared in the experiment."""

    UNWEIGHTED = "unweighted"
    TW_LOCALISING = "tw_localising"
    TW_NONLOCALISING = "tw_nonlocalising"
    OUTCOME = "outcome"
    OUTCOME_COMPLEMENTED = "outcome_complemented"
    VERTICAL = "vertical"


class ExperimentScore(_FrozenNoExtraBaseModel):
    """A score family evaluated under several weighting modes."""

    family: ScoreFamily
    modes: tuple[WeightingMode, ...] = Field(
        tuple(WeightingMode), min_length=1, description="The weighting modes to run."
    )


class ExperimentConfig(_FrozenNoExtraBaseModel):
    """Configuration of the rejection-rate experiment."""

    dimension: PositiveInt = 1
    n_obs: int = Field(100, ge=2, description="Observations per repetition.")
    members: PositiveInt = Field(100, description="Ensemble members per forecast.")
    repetitions: PositiveInt = 1000
    weight_kind: WeightKind = WeightKind.UNIVARIATE
    thresholds: tuple[FiniteFloat, ...] | None = Field(
        None,
        min_length=1,
        description="Thresholds to sweep. Defaults depend on the weight kind.",
    )
    scores: tuple[ExperimentScore, ...] | None = Field(
        None,
        min_length=1,
        description="Scores to evaluate. Defaults depend on the dimension.",
    )
    level: float = Field(0.05, gt=0, lt=1)
    seed: NonNegativeInt = 0
    mixture: MixtureSpec | None = Field(
        None, description="Overrides of the mixture distributions."
    )
    swap_forecasts: bool = Field(
        False, description="Exchange the roles of F1 and F2."
    )
    max_undefined_fraction: Probability = Field(
        0.5,
        description=(
            "A repetition is dropped for a score if a larger fraction of its cases"
            + " has an undefined score."
        ),
    )
    workers: PositiveInt = Field(
        1, description="Number of processes used to run repetitions."
    )

    @model_validator(mode="after")
    def check_dimensions(self) -> "ExperimentConfig":
        """Univariate weights and the CRPS require one dimension."""
        if self.weight_kind == WeightKind.UNIVARIATE and self.dimension != 1:
            raise PydanticCustomError(
                "UnivariateWeightError",
                "Univariate weights need dimension 1, got {dimension}.",
                {"dimension": self.dimension},
            )
        if self.mixture is not None and self.mixture.dimension != self.dimension:
            raise PydanticCustomError(
                "LengthMismatchError",
                "The mixture has dimension {mixture}, the experiment {dimension}.",
                {"mixture": self.mixture.dimension, "dimension": self.dimension},
            )
        for score in self.scores or ():
            if score.family.kind == "crps" and self.dimension != 1:
                raise PydanticCustomError(
                    "UnivariateScoreError",
                    "The CRPS needs dimension 1, got {dimension}.",
                    {"dimension": self.dimension},
                )
        return self


class RejectionPoint(_FrozenNoExtraBaseModel):
    """Directional rejection counts and rates at one threshold. Rates are relative to
    the repetitions used; repetitions dropped for undefined scores are left out.
    """

    threshold: float
    favours_f1: NonNegativeInt
    favours_f2: NonNegativeInt
    repetitions_used: NonNegativeInt
    repetitions_dropped: NonNegativeInt

    @property
    def repetitions(self) -> int:
        """All repetitions, used or dropped."""
        return self.repetitions_used + self.repetitions_dropped

    @property
    def rate_f1(self) -> float | None:
        """Proportion of used repetitions rejecting in favour of F1, None if every
        repetition was dropped.
        """
        if self.repetitions_used == 0:
            return None
        return self.favours_f1 / self.repetitions_used

    @property
    def rate_f2(self) -> float | None:
        """Proportion of used repetitions rejecting in favour of F2."""
        if self.repetitions_used == 0:
            return None
        return self.favours_f2 / self.repetitions_used


class RejectionCurve(_FrozenNoExtraBaseModel):
    """Rejection rates of one score over all thresholds."""

    score: str
    mode: WeightingMode
    points: tuple[RejectionPoint, ...]


class ExperimentResult(_FrozenNoExtraBaseModel):
    """Rejection curves keyed by '<score>/<mode>'."""

    curves: FrozenDict[str, RejectionCurve]

    def curve(self, score: str, mode: WeightingMode | str) -> RejectionCurve:
        """Look up the curve of a score family and weighting mode."""
        return self.curves[f"{score}/{WeightingMode(mode).value}"]
