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

"""Declarative conditionally negative definite kernels and their transforms.

Warning: This is an internal part of the library and might change without notice.
"""

from typing import Annotated, ClassVar, Literal, TypeAlias

from pydantic import Field, model_validator
from pydantic_core import PydanticCustomError

from kernelscore._internals.models.base import (
    Matrix,
    Vector,
    _FrozenNoExtraBaseModel,
)
from kernelscore._internals.models.weights import ChainingSpec, WeightSpec


class _KernelBase(_FrozenNoExtraBaseModel):
    """Fields shared by all kernels."""

    zero_diagonal: ClassVar[bool] = True

    dimension: int | None = Field(
        None,
        ge=1,
        description="If set, points must have exactly this dimension.",
    )


class AbsoluteDifferenceKernel(_KernelBase):
    """rho(x, x') = |x - x'| on the real line; the kernel of the CRPS."""

    kind: Literal["absolute_difference"] = "absolute_difference"

    @model_validator(mode="after")
    def check_univariate(self) -> "AbsoluteDifferenceKernel":
        """The absolute difference is only defined on the real line."""
        if self.dimension not in (None, 1):
            raise PydanticCustomError(
                "MultivariateKernelError",
                "The absolute difference kernel is univariate, got dimension"
                + " {dimension}.",
                {"dimension": self.dimension},
            )
        return self


class EuclideanPowerKernel(_KernelBase):
    """rho(x, x') = ||x - x'||^beta; the kernel of the energy score."""

    kind: Literal["euclidean_power"] = "euclidean_power"
    beta: float = Field(1.0, gt=0, lt=2, description="The exponent, in (0, 2).")


class VariogramKernel(_KernelBase):
    """rho(x, x') = sum_ij h_ij (|x_i - x_j|^p - |x'_i - x'_j|^p)^2; the kernel of the
    variogram score.
    """

    kind: Literal["variogram"] = "variogram"
    p: float = Field(0.5, gt=0, description="The order of the variogram.")
    h: Matrix | None = Field(
        None,
        description=(
            "Symmetric d x d matrix of scaling weights in [0, 1]. Defaults to all"
            + " ones."
        ),
    )

    @model_validator(mode="after")
    def check_scaling_weights(self) -> "VariogramKernel":
        """The scaling matrix must be square, symmetric and take values in [0, 1]."""
        if self.h is None:
            return self
        size = len(self.h)
        if any(len(row) != size for row in self.h):
            raise PydanticCustomError(
                "NonSquareMatrixError", "The scaling matrix h must be square.", {}
            )
        if any(not 0 <= value <= 1 for row in self.h for value in row):
            raise PydanticCustomError(
                "ScalingWeightRangeError",
                "The entries of h must lie in [0, 1].",
                {},
            )
        if any(
            self.h[i][j] != self.h[j][i]
            for i in range(size)
            for j in range(i + 1, size)
        ):
            raise PydanticCustomError(
                "AsymmetricMatrixError", "The scaling matrix h must be symmetric.", {}
            )
        if self.dimension is not None and self.dimension != size:
            raise PydanticCustomError(
                "LengthMismatchError",
                "The scaling matrix has size {size}, but the dimension is {dimension}.",
                {"size": size, "dimension": self.dimension},
            )
        return self


class InverseMultiquadricKernel(_KernelBase):
    """rho(x, x') = -(1 + ||x - x'||^2)^(-1/2); rho(x, x) = -1."""

    zero_diagonal: ClassVar[bool] = False

    kind: Literal["inverse_multiquadric"] = "inverse_multiquadric"


KernelSpec: TypeAlias = Annotated[
    AbsoluteDifferenceKernel
    | EuclideanPowerKernel
    | VariogramKernel
    | InverseMultiquadricKernel,
    Field(discriminator="kind"),
]


class TransformedKernel(_FrozenNoExtraBaseModel):
    """A kernel with optional transforms, applied in a fixed order: inputs are
    chained first, the result is centered next and finally multiplied by w(x)w(x').

    Centering at x0 gives rho*(x, x') = rho(x, x') - rho(x, x0) - rho(x', x0) and is
    only offered for kernels with rho(x, x) = 0. For those, a weight requires a
    center (vertical re-scaling); the inverse multiquadric kernel is already negative
    definite and is weighted directly.
    """

    base: KernelSpec
    chaining: ChainingSpec | None = None
    center: Vector | None = None
    weight: WeightSpec | None = None

    @model_validator(mode="after")
    def check_transforms(self) -> "TransformedKernel":
        """Centering and weighting must fit the base kernel."""
        if self.base.zero_diagonal:
            if self.weight is not None and self.center is None:
                raise PydanticCustomError(
                    "MissingCenterError",
                    "Weighting the '{kind}' kernel needs a center.",
                    {"kind": self.base.kind},
                )
        elif self.center is not None:
            raise PydanticCustomError(
                "UnexpectedCenterError",
                "The '{kind}' kernel cannot be centered.",
                {"kind": self.base.kind},
            )
        return self

    @classmethod
    def chained(cls, base: KernelSpec, chaining: ChainingSpec) -> "TransformedKernel":
        """The threshold-weighted kernel rho(v(x), v(x'))."""
        return cls(base=base, chaining=chaining)

    @classmethod
    def centered(cls, base: KernelSpec, center: Vector) -> "TransformedKernel":
        """The centered kernel rho*."""
        return cls(base=base, center=center)

    @classmethod
    def vertically_rescaled(
        cls, base: KernelSpec, weight: WeightSpec, center: Vector | None = None
    ) -> "TransformedKernel":
        """The vertically re-scaled kernel. The center is ignored for kernels that are
        already negative definite.
        """
        if not base.zero_diagonal:
            center = None
        return cls(base=base, weight=weight, center=center)
