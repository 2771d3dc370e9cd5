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

"""Models for ensemble post-processing: censored shifted Gamma regression and copula
reordering.

Warning: This is an internal part of the library and might change without notice.
"""

from enum import StrEnum
from typing import Annotated, Literal, TypeAlias

import numpy as np
from pydantic import Field, NonNegativeFloat, PositiveInt, model_validator
from pydantic_core import PydanticCustomError
from scipy import stats

from kernelscore._internals.models.base import (
    Matrix,
    PositiveFloat,
    _FrozenNoExtraBaseModel,
)


class CsgdParams(_FrozenNoExtraBaseModel):
    """Coefficients linking ensemble statistics to a censored shifted Gamma
    distribution: mu = alpha + beta * xbar and sigma = gamma + delta * s.
    """

    alpha: NonNegativeFloat
    beta: NonNegativeFloat
    gamma: NonNegativeFloat
    delta: NonNegativeFloat
    xi: NonNegativeFloat = Field(..., description="The shift of the distribution.")


class CsgdDistribution(_FrozenNoExtraBaseModel):
    """A Gamma distribution shifted left by xi and censored below at zero."""

    shape: PositiveFloat
    scale: PositiveFloat
    shift: NonNegativeFloat

    @property
    def point_mass_at_zero(self) -> float:
        """The probability of exactly zero."""
        return float(stats.gamma.cdf(self.shift, self.shape, scale=self.scale))

    def cdf(self, y: float | np.ndarray) -> np.ndarray:
        """The distribution function, zero below zero."""
        y = np.asarray(y, dtype=float)
        values = stats.gamma.cdf(y + self.shift, self.shape, scale=self.scale)
        return np.where(y < 0, 0.0, values)

    def quantile(self, levels: float | np.ndarray) -> np.ndarray:
        """The quantile function, zero for levels up to the point mass."""
        levels = np.asarray(levels, dtype=float)
        values = stats.gamma.ppf(levels, self.shape, scale=self.scale) - self.shift
        return np.maximum(values, 0.0)


class CsgdFitResult(_FrozenNoExtraBaseModel):
    """Coefficients found by maximum likelihood and the attained log-likelihood."""

    params: CsgdParams
    log_likelihood: float
    n_cases: PositiveInt


class CopulaKind(StrEnum):
    """The copulas available for reordering post-processed margins."""

    INDEPENDENCE = "independence"
    COMONOTONIC = "comonotonic"
    ECC = "ecc"
    GAUSSIAN = "gaussian"


class IndependenceCopula(_FrozenNoExtraBaseModel):
    """Every combination of marginal values is equally likely."""

    kind: Literal["independence"] = "independence"


class ComonotonicCopula(_FrozenNoExtraBaseModel):
    """Values of the same rank are combined across all dimensions."""

    kind: Literal["comonotonic"] = "comonotonic"


class EccCopula(_FrozenNoExtraBaseModel):
    """Ensemble copula coupling: values take over the rank structure of a template,
    usually the raw ensemble (M rows of d values).
    """

    kind: Literal["ecc"] = "ecc"
    template: Matrix


class GaussianCopulaMode(StrEnum):
    """How the Gaussian copula is turned into an ensemble.

    simulate: combinations are drawn sequentially on the grid of quantile levels,
    removing all combinations sharing a level with a drawn one.
    weight: all combinations are kept with weights proportional to the density.
    random: margins are reordered by the ranks of a sample from the copula.
    """

    SIMULATE = "simulate"
    WEIGHT = "weight"
    RANDOM = "random"


class GaussianCopula(_FrozenNoExtraBaseModel):
    """A Gaussian copula with the given correlation matrix."""

    kind: Literal["gaussian"] = "gaussian"
    correlation: Matrix
    mode: GaussianCopulaMode = GaussianCopulaMode.SIMULATE
    max_grid_size: PositiveInt = Field(
        10**6, description="Maximal number of grid combinations to evaluate."
    )

    @model_validator(mode="after")
    def check_correlation(self) -> "GaussianCopula":
        """The correlation matrix must be a symmetric positive definite matrix with
        unit diagonal.
        """
        matrix = np.asarray(self.correlation, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise PydanticCustomError(
                "NonSquareMatrixError", "The correlation matrix must be square.", {}
            )
        if not np.array_equal(matrix, matrix.T) or not np.all(np.diag(matrix) == 1):
            raise PydanticCustomError(
                "InvalidCorrelationError",
                "The correlation matrix must be symmetric with unit diagonal.",
                {},
            )
        try:
            np.linalg.cholesky(matrix)
        except np.linalg.LinAlgError as error:
            raise PydanticCustomError(
                "InvalidCorrelationError",
                "The correlation matrix must be positive definite.",
                {},
            ) from error
        return self


CopulaSpec: TypeAlias = Annotated[
    IndependenceCopula | ComonotonicCopula | EccCopula | GaussianCopula,
    Field(discriminator="kind"),
]


class CopulaPlan(_FrozenNoExtraBaseModel):
    """A copula together with the ensemble size and dimension it is applied to."""

    copula: CopulaSpec
    members: PositiveInt
    dimension: PositiveInt

    @model_validator(mode="after")
    def check_shapes(self) -> "CopulaPlan":
        """Templates and correlation matrices must match members and dimension."""
        copula = self.copula
        if isinstance(copula, EccCopula):
            rows = len(copula.template)
            columns = {len(row) for row in copula.template}
            if rows != self.members or columns != {self.dimension}:
                raise PydanticCustomError(
                    "TemplateShapeError",
                    "The template must have {members} rows of {dimension} values.",
                    {"members": self.members, "dimension": self.dimension},
                )
        if isinstance(copula, GaussianCopula) and (
            len(copula.correlation) != self.dimension
        ):
            raise PydanticCustomError(
                "LengthMismatchError",
                "The correlation matrix has size {size}, the dimension is {dimension}.",
                {"size": len(copula.correlation), "dimension": self.dimension},
            )
        return self
