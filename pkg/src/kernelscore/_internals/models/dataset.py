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

"""Models for collections of ensemble forecasts and observations.

Warning: This is an internal part of the library and might change without notice.
"""

import numpy as np
from pydantic import Field, model_validator
from pydantic_core import PydanticCustomError

from kernelscore._internals.models.base import (
    CaseId,
    Matrix,
    Vector,
    _FrozenNoExtraBaseModel,
)


class EnsembleCase(_FrozenNoExtraBaseModel):
    """One forecast case: M members of d values each and an optional observation."""

    case_id: CaseId
    ensemble: Matrix
    observation: Vector | None = None
    member_weights: Vector | None = Field(
        None,
        description=(
            "Non-negative member probabilities. They are normalized to sum to one;"
            + " members are equally likely if omitted."
        ),
    )

    @model_validator(mode="after")
    def check_shapes(self) -> "EnsembleCase":
        """Members and observation must share the dimension, weights the ensemble
        size.
        """
        dimension = len(self.ensemble[0])
        if any(len(member) != dimension for member in self.ensemble):
            raise PydanticCustomError(
                "InconsistentDimensionError",
                "The members of case '{case_id}' differ in dimension.",
                {"case_id": self.case_id},
            )
        if self.observation is not None and len(self.observation) != dimension:
            raise PydanticCustomError(
                "InconsistentDimensionError",
                "The observation of case '{case_id}' has dimension {actual}, the"
                + " members {dimension}.",
                {
                    "case_id": self.case_id,
                    "actual": len(self.observation),
                    "dimension": dimension,
                },
            )
        if self.member_weights is not None:
            if len(self.member_weights) != len(self.ensemble):
                raise PydanticCustomError(
                    "WeightCountError",
                    "Case '{case_id}' has {n_weights} member weights for {n_members}"
                    + " members.",
                    {
                        "case_id": self.case_id,
                        "n_weights": len(self.member_weights),
                        "n_members": len(self.ensemble),
                    },
                )
            if min(self.member_weights) < 0 or sum(self.member_weights) <= 0:
                raise PydanticCustomError(
                    "InvalidWeightsError",
                    "The member weights of case '{case_id}' must be non-negative and"
                    + " not all zero.",
                    {"case_id": self.case_id},
                )
        return self

    @property
    def dimension(self) -> int:
        """The dimension d of members and observation."""
        return len(self.ensemble[0])

    @property
    def n_members(self) -> int:
        """The ensemble size M."""
        return len(self.ensemble)

    def members_array(self) -> np.ndarray:
        """The members as an M x d array."""
        return np.asarray(self.ensemble, dtype=float)

    def probabilities(self) -> np.ndarray:
        """The normalized member probabilities."""
        if self.member_weights is None:
            return np.full(self.n_members, 1.0 / self.n_members)
        weights = np.asarray(self.member_weights, dtype=float)
        return weights / weights.sum()


class EnsembleDataset(_FrozenNoExtraBaseModel):
    """A sequence of forecast cases with unique IDs and a common dimension. The
    ensemble size may vary between cases.
    """

    cases: tuple[EnsembleCase, ...] = Field(..., min_length=1)

    @model_validator(mode="after")
    def check_cases(self) -> "EnsembleDataset":
        """All cases share one dimension and have distinct IDs."""
        dimension = self.cases[0].dimension
        for case in self.cases:
            if case.dimension != dimension:
                raise PydanticCustomError(
                    "InconsistentDimensionError",
                    "Case '{case_id}' has dimension {actual}, expected {dimension}.",
                    {
                        "case_id": case.case_id,
                        "actual": case.dimension,
                        "dimension": dimension,
                    },
                )
        case_ids = [case.case_id for case in self.cases]
        if len(set(case_ids)) != len(case_ids):
            duplicates = sorted({id_ for id_ in case_ids if case_ids.count(id_) > 1})
            raise PydanticCustomError(
                "DuplicateCaseError",
                "Duplicate case IDs: {duplicates}.",
                {"duplicates": ", ".join(duplicates)},
            )
        return self

    @property
    def dimension(self) -> int:
        """The common dimension d."""
        return self.cases[0].dimension

    @property
    def case_ids(self) -> tuple[str, ...]:
        """The IDs of all cases in order."""
        return tuple(case.case_id for case in self.cases)

    def has_observations(self) -> bool:
        """Whether every case has an observation."""
        return all(case.observation is not None for case in self.cases)
