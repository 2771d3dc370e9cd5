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

"""Results of forecast comparisons and calibration diagnostics.

Warning: This is an internal part of the library and might change without notice.
"""

from enum import StrEnum

from pydantic import Field, NonNegativeInt, model_validator
from pydantic_core import PydanticCustomError

from kernelscore._internals.models.base import Probability, _FrozenNoExtraBaseModel


class DmDirection(StrEnum):
    """The outcome of a Diebold-Mariano test. Lower scores are better."""

    FAVORS_A = "favors_a"
    FAVORS_B = "favors_b"
    NO_DECISION = "no_decision"


class DmTestResult(_FrozenNoExtraBaseModel):
    """The result of a two-sided Diebold-Mariano test of equal performance."""

    statistic: float | None = Field(
        ...,
        description="The test statistic, None if the score differences have no spread.",
    )
    p_value: Probability
    direction: DmDirection
    n: NonNegativeInt = Field(..., description="Number of case pairs used.")
    level: Probability


class RankHistogram(_FrozenNoExtraBaseModel):
    """Counts of the observation ranks 1, ..., M + 1 within the pooled ensemble."""

    counts: tuple[NonNegativeInt, ...] = Field(..., min_length=2)
    n: NonNegativeInt

    @model_validator(mode="after")
    def check_total(self) -> "RankHistogram":
        """The counts must add up to the number of cases."""
        if sum(self.counts) != self.n:
            raise PydanticCustomError(
                "CountMismatchError",
                "The counts add up to {total}, expected {n}.",
                {"total": sum(self.counts), "n": self.n},
            )
        return self

    @property
    def members(self) -> int:
        """The ensemble size M."""
        return len(self.counts) - 1


class UniformityTestResult(_FrozenNoExtraBaseModel):
    """A chi-square test of a rank histogram against the uniform distribution."""

    statistic: float
    p_value: Probability
    degrees_of_freedom: NonNegativeInt
