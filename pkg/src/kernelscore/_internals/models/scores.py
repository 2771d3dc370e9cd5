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

"""Models describing score requests and their results.

Warning: This is an internal part of the library and might change without notice.
"""

from typing import Annotated, Literal, TypeAlias

from pydantic import Field, NonNegativeInt

from kernelscore._internals.models.base import (
    Matrix,
    Vector,
    _FrozenNoExtraBaseModel,
)
from kernelscore._internals.models.kernels import (
    AbsoluteDifferenceKernel,
    EuclideanPowerKernel,
    InverseMultiquadricKernel,
    KernelSpec,
    VariogramKernel,
)
from kernelscore._internals.models.weights import ChainingSpec, WeightSpec


class CrpsFamily(_FrozenNoExtraBaseModel):
    """The continuous ranked probability score; univariate only."""

    kind: Literal["crps"] = "crps"

    def kernel(self) -> KernelSpec:
        """The kernel the score is built on."""
        return AbsoluteDifferenceKernel()


class EnergyFamily(_FrozenNoExtraBaseModel):
    """The energy score."""

    kind: Literal["energy"] = "energy"
    beta: float = Field(1.0, gt=0, lt=2)

    def kernel(self) -> KernelSpec:
        """The kernel the score is built on."""
        return EuclideanPowerKernel(beta=self.beta)


class VariogramFamily(_FrozenNoExtraBaseModel):
    """The variogram score of order p."""

    kind: Literal["variogram"] = "variogram"
    p: float = Field(0.5, gt=0)
    h: Matrix | None = None

    def kernel(self) -> KernelSpec:
        """The kernel the score is built on."""
        return VariogramKernel(p=self.p, h=self.h)


class InverseMultiquadricFamily(_FrozenNoExtraBaseModel):
    """The inverse multiquadric score."""

    kind: Literal["ims"] = "ims"

    def kernel(self) -> KernelSpec:
        """The kernel the score is built on."""
        return InverseMultiquadricKernel()


ScoreFamily: TypeAlias = Annotated[
    CrpsFamily | EnergyFamily | VariogramFamily | InverseMultiquadricFamily,
    Field(discriminator="kind"),
]


class Unweighted(_FrozenNoExtraBaseModel):
    """The plain kernel score."""

    kind: Literal["none"] = "none"


class ThresholdWeighted(_FrozenNoExtraBaseModel):
    """Forecasts and observations are transformed by a chaining function."""

    kind: Literal["threshold"] = "threshold"
    chaining: ChainingSpec


class OutcomeWeighted(_FrozenNoExtraBaseModel):
    """The forecast is conditioned on the weight and the score multiplied by w(y)."""

    kind: Literal["outcome"] = "outcome"
    weight: WeightSpec


class OutcomeWeightedComplemented(_FrozenNoExtraBaseModel):
    """An outcome-weighted score plus a score for the probability the forecast
    assigns to the weighted region.
    """

    kind: Literal["outcome_complemented"] = "outcome_complemented"
    weight: WeightSpec
    binary_score: Literal["brier"] = "brier"


class VerticallyRescaled(_FrozenNoExtraBaseModel):
    """The kernel output is multiplied by w(x)w(x')."""

    kind: Literal["vertical"] = "vertical"
    weight: WeightSpec
    center: Vector | None = Field(
        None, description="Center of the rescaled kernel. Defaults to the origin."
    )


Weighting: TypeAlias = Annotated[
    Unweighted
    | ThresholdWeighted
    | OutcomeWeighted
    | OutcomeWeightedComplemented
    | VerticallyRescaled,
    Field(discriminator="kind"),
]


class ScoreRequest(_FrozenNoExtraBaseModel):
    """A score family combined with a weighting mode."""

    family: ScoreFamily = CrpsFamily()
    weighting: Weighting = Unweighted()
    label: str | None = Field(
        None,
        description=(
            "Name used for the score in outputs. Defaults to the kind of the family."
        ),
    )

    @property
    def name(self) -> str:
        """The name of the score used in outputs."""
        return self.label or self.family.kind

    @property
    def mode(self) -> str:
        """The weighting mode used in outputs."""
        return self.weighting.kind


class ScoreResult(_FrozenNoExtraBaseModel):
    """Per-case scores of one request and their aggregate. Undefined scores are
    represented by None and excluded from the mean and its standard error.
    """

    name: str
    mode: str
    scores: tuple[float | None, ...]
    mean: float | None = Field(
        ..., description="Mean over defined cases, None if no case is defined."
    )
    stderr: float | None = Field(
        ...,
        description=(
            "Sample standard deviation over defined cases divided by the square root"
            + " of their number, None for fewer than two defined cases."
        ),
    )
    n_undefined: NonNegativeInt
