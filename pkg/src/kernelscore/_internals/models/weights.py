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

"""Declarative weight and chaining functions.

A weight function maps a d-dimensional outcome to [0, 1] and emphasizes a region of
the outcome space. A chaining function maps the outcome space into itself and is used
to deform forecasts and observations before a kernel is evaluated.

Warning: This is an internal part of the library and might change without notice.
"""

from typing import Annotated, Literal, TypeAlias

from pydantic import Field, model_validator
from pydantic_core import PydanticCustomError

from kernelscore._internals.models.base import (
    FiniteFloat,
    PositiveFloat,
    PositiveVector,
    Probability,
    Vector,
    _FrozenNoExtraBaseModel,
)

Threshold: TypeAlias = FiniteFloat | Vector


def _threshold_dimension(threshold: Threshold) -> int | None:
    return len(threshold) if isinstance(threshold, tuple) else None


class ConstantWeight(_FrozenNoExtraBaseModel):
    """A weight function that gives the same weight to every outcome."""

    kind: Literal["constant"] = "constant"
    value: Probability = Field(1.0, description="The constant weight in [0, 1].")

    @property
    def required_dimension(self) -> int | None:
        """The dimension of outcomes this weight applies to, None if arbitrary."""
        return None

    @property
    def is_binary(self) -> bool:
        """Whether the weight only takes the values zero and one."""
        return self.value in (0.0, 1.0)


class AboveThresholdWeight(_FrozenNoExtraBaseModel):
    """The indicator of the orthant above a threshold: w(z) = 1 iff z_i >= t_i for
    all i. A scalar threshold applies to every coordinate.
    """

    kind: Literal["above"] = "above"
    threshold: Threshold = Field(
        ...,
        description=(
            "A single threshold applied to all coordinates or one threshold per"
            + " coordinate."
        ),
    )

    @property
    def required_dimension(self) -> int | None:
        """The dimension of outcomes this weight applies to, None if arbitrary."""
        return _threshold_dimension(self.threshold)

    @property
    def is_binary(self) -> bool:
        """Whether the weight only takes the values zero and one."""
        return True


class BelowThresholdWeight(_FrozenNoExtraBaseModel):
    """The indicator of the orthant below a threshold: w(z) = 1 iff z_i <= t_i for
    all i.
    """

    kind: Literal["below"] = "below"
    threshold: Threshold

    @property
    def required_dimension(self) -> int | None:
        """The dimension of outcomes this weight applies to, None if arbitrary."""
        return _threshold_dimension(self.threshold)

    @property
    def is_binary(self) -> bool:
        """Whether the weight only takes the values zero and one."""
        return True


class IntervalWeight(_FrozenNoExtraBaseModel):
    """The indicator of a closed interval [lower, upper] of the real line."""

    kind: Literal["interval"] = "interval"
    lower: FiniteFloat
    upper: FiniteFloat

    @model_validator(mode="after")
    def check_bounds(self) -> "IntervalWeight":
        """Make sure the interval is not empty."""
        if not self.lower < self.upper:
            raise PydanticCustomError(
                "EmptyIntervalError",
                "The lower bound {lower} must be smaller than the upper bound {upper}.",
                {"lower": self.lower, "upper": self.upper},
            )
        return self

    @property
    def required_dimension(self) -> int | None:
        """The dimension of outcomes this weight applies to, None if arbitrary."""
        return 1

    @property
    def is_binary(self) -> bool:
        """Whether the weight only takes the values zero and one."""
        return True


class HalfSpaceWeight(_FrozenNoExtraBaseModel):
    """The indicator of a half space: w(z) = 1 iff sum_i b_i z_i >= t."""

    kind: Literal["half_space"] = "half_space"
    coefficients: Vector = Field(..., description="The coefficients b_i.")
    threshold: FiniteFloat

    @property
    def required_dimension(self) -> int | None:
        """The dimension of outcomes this weight applies to, None if arbitrary."""
        return len(self.coefficients)

    @property
    def is_binary(self) -> bool:
        """Whether the weight only takes the values zero and one."""
        return True


class GaussianCdfWeight(_FrozenNoExtraBaseModel):
    """The distribution function of a univariate normal distribution."""

    kind: Literal["gaussian_cdf"] = "gaussian_cdf"
    mean: FiniteFloat = 0.0
    sd: PositiveFloat = 1.0

    @property
    def required_dimension(self) -> int | None:
        """The dimension of outcomes this weight applies to, None if arbitrary."""
        return 1

    @property
    def is_binary(self) -> bool:
        """Whether the weight only takes the values zero and one."""
        return False


class MultivariateGaussianCdfWeight(_FrozenNoExtraBaseModel):
    """The distribution function of a multivariate normal distribution with diagonal
    covariance, i.e. the product of the marginal normal distribution functions.
    """

    kind: Literal["gaussian_cdf_mv"] = "gaussian_cdf_mv"
    mean: Vector
    sd: PositiveVector = Field(
        ..., description="Square roots of the diagonal of the covariance matrix."
    )

    @model_validator(mode="after")
    def check_lengths(self) -> "MultivariateGaussianCdfWeight":
        """Make sure mean and standard deviations have the same length."""
        if len(self.mean) != len(self.sd):
            raise PydanticCustomError(
                "LengthMismatchError",
                "Mean has length {mean}, but sd has length {sd}.",
                {"mean": len(self.mean), "sd": len(self.sd)},
            )
        return self

    @property
    def required_dimension(self) -> int | None:
        """The dimension of outcomes this weight applies to, None if arbitrary."""
        return len(self.mean)

    @property
    def is_binary(self) -> bool:
        """Whether the weight only takes the values zero and one."""
        return False


WeightSpec: TypeAlias = Annotated[
    ConstantWeight
    | AboveThresholdWeight
    | BelowThresholdWeight
    | IntervalWeight
    | HalfSpaceWeight
    | GaussianCdfWeight
    | MultivariateGaussianCdfWeight,
    Field(discriminator="kind"),
]


class IdentityChaining(_FrozenNoExtraBaseModel):
    """v(z) = z."""

    kind: Literal["identity"] = "identity"

    @property
    def required_dimension(self) -> int | None:
        """The dimension of outcomes this chaining applies to, None if arbitrary."""
        return None


class WeightIntegralChaining(_FrozenNoExtraBaseModel):
    """The univariate chaining function obtained by integrating a weight function,
    so that v(x) - v(x') equals the integral of w over [x', x).
    """

    kind: Literal["from_weight"] = "from_weight"
    weight: WeightSpec

    @model_validator(mode="after")
    def check_univariate(self) -> "WeightIntegralChaining":
        """Only univariate weights can be integrated."""
        if self.weight.required_dimension not in (None, 1):
            raise PydanticCustomError(
                "MultivariateWeightError",
                "Chaining by integration needs a univariate weight, got dimension"
                + " {dimension}.",
                {"dimension": self.weight.required_dimension},
            )
        return self

    @property
    def required_dimension(self) -> int | None:
        """The dimension of outcomes this chaining applies to, None if arbitrary."""
        return 1


class CollapseOutsideChaining(_FrozenNoExtraBaseModel):
    """v(z) = z where w(z) > 0 and v(z) = center elsewhere, for a binary weight w.
    Threshold-weighted scores based on this chaining are localising.
    """

    kind: Literal["collapse"] = "collapse"
    weight: WeightSpec
    center: Vector

    @model_validator(mode="after")
    def check_weight(self) -> "CollapseOutsideChaining":
        """The weight must be an indicator with a matching dimension."""
        if not self.weight.is_binary:
            raise PydanticCustomError(
                "NonBinaryWeightError",
                "Collapsing needs a binary weight, got '{kind}'.",
                {"kind": self.weight.kind},
            )
        dimension = self.weight.required_dimension
        if dimension is not None and dimension != len(self.center):
            raise PydanticCustomError(
                "LengthMismatchError",
                "The center has length {center}, but the weight has dimension"
                + " {dimension}.",
                {"center": len(self.center), "dimension": dimension},
            )
        return self

    @property
    def required_dimension(self) -> int | None:
        """The dimension of outcomes this chaining applies to, None if arbitrary."""
        return len(self.center)


class ComponentwiseMaxChaining(_FrozenNoExtraBaseModel):
    """v(z) = (max(z_1, t), ..., max(z_d, t))."""

    kind: Literal["componentwise_max"] = "componentwise_max"
    threshold: FiniteFloat

    @property
    def required_dimension(self) -> int | None:
        """The dimension of outcomes this chaining applies to, None if arbitrary."""
        return None


class PlaneProjectionChaining(_FrozenNoExtraBaseModel):
    """Points with a coordinate sum below t are moved perpendicular onto the plane
    where the coordinates sum to t; other points are left unchanged.
    """

    kind: Literal["plane_projection"] = "plane_projection"
    threshold: FiniteFloat

    @property
    def required_dimension(self) -> int | None:
        """The dimension of outcomes this chaining applies to, None if arbitrary."""
        return None


class GaussianIntegratedChaining(_FrozenNoExtraBaseModel):
    """Per-coordinate integral of a normal distribution function:
    v_i(z_i) = (z_i - mu_i) Phi(r_i) + sigma_i phi(r_i), r_i = (z_i - mu_i) / sigma_i.
    """

    kind: Literal["gaussian_integrated"] = "gaussian_integrated"
    mean: Vector
    sd: PositiveVector

    @model_validator(mode="after")
    def check_lengths(self) -> "GaussianIntegratedChaining":
        """Make sure mean and standard deviations have the same length."""
        if len(self.mean) != len(self.sd):
            raise PydanticCustomError(
                "LengthMismatchError",
                "Mean has length {mean}, but sd has length {sd}.",
                {"mean": len(self.mean), "sd": len(self.sd)},
            )
        return self

    @property
    def required_dimension(self) -> int | None:
        """The dimension of outcomes this chaining applies to, None if arbitrary."""
        return len(self.mean)


ChainingSpec: TypeAlias = Annotated[
    IdentityChaining
    | WeightIntegralChaining
    | CollapseOutsideChaining
    | ComponentwiseMaxChaining
    | PlaneProjectionChaining
    | GaussianIntegratedChaining,
    Field(discriminator="kind"),
]
