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

"""Base model and type annotations shared by all declarative models.

Warning: This is an internal part of the library and might change without notice.
"""

from typing import Annotated, TypeAlias

from pydantic import BaseModel, ConfigDict
from pydantic import Field as _Field


class _FrozenNoExtraBaseModel(BaseModel):
    """A hashable BaseModel that does not allow any extra fields."""

    model_config = ConfigDict(use_enum_values=True, extra="forbid", frozen=True)


FiniteFloat: TypeAlias = Annotated[float, _Field(allow_inf_nan=False)]
PositiveFloat: TypeAlias = Annotated[float, _Field(gt=0, allow_inf_nan=False)]
Probability: TypeAlias = Annotated[float, _Field(ge=0, le=1)]
Vector: TypeAlias = Annotated[tuple[FiniteFloat, ...], _Field(min_length=1)]
PositiveVector: TypeAlias = Annotated[tuple[PositiveFloat, ...], _Field(min_length=1)]
Matrix: TypeAlias = Annotated[tuple[Vector, ...], _Field(min_length=1)]
CaseId: TypeAlias = Annotated[str, _Field(..., min_length=1)]
