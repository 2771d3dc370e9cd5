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

"""Evaluation of weight and chaining functions.

All functions operate on arrays of points whose last axis holds the d coordinates,
so that whole ensembles (or stacks of ensembles) are transformed at once.

Warning: This is an internal part of the library and might change without notice.
"""

import logging
from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import integrate, stats

from kernelscore._internals.exceptions import (
    DimensionMismatchError,
    NonFiniteInputError,
)
from kernelscore._internals.models.weights import (
    AboveThresholdWeight,
    BelowThresholdWeight,
    ChainingSpec,
    CollapseOutsideChaining,
    ComponentwiseMaxChaining,
    ConstantWeight,
    GaussianCdfWeight,
    GaussianIntegratedChaining,
    HalfSpaceWeight,
    IdentityChaining,
    IntervalWeight,
    MultivariateGaussianCdfWeight,
    PlaneProjectionChaining,
    WeightIntegralChaining,
    WeightSpec,
)

log = logging.getLogger(__name__)

QUADRATURE_TOLERANCE = 1e-10


def as_points(values: ArrayLike, *, what: str = "points") -> NDArray[np.float64]:
    """Convert to a float array with the coordinates on the last axis. Scalars and
    flat sequences are treated as univariate.

    Raises:
        NonFiniteInputError: If any value is NaN or infinite.
    """
    points = np.asarray(values, dtype=float)
    if points.ndim == 0:
        points = points.reshape(1)
    if not np.all(np.isfinite(points)):
        raise NonFiniteInputError(f"The {what} contain non-finite values.")
    return points


def check_dimension(required: int | None, actual: int, *, context: str) -> None:
    """Raise a DimensionMismatchError if a required dimension is not met."""
    if required is not None and required != actual:
        raise DimensionMismatchError(expected=required, actual=actual, context=context)


def weight_values(weight: WeightSpec, points: NDArray) -> NDArray[np.float64]:
    """Evaluate a weight function on an array of points (..., d), giving (...)."""
    dimension = points.shape[-1]
    check_dimension(
        weight.required_dimension, dimension, context=f"{weight.kind} weight"
    )

    match weight:
        case ConstantWeight():
            return np.full(points.shape[:-1], weight.value)
        case AboveThresholdWeight():
            threshold = np.asarray(weight.threshold, dtype=float)
            return np.all(points >= threshold, axis=-1).astype(float)
        case BelowThresholdWeight():
            threshold = np.asarray(weight.threshold, dtype=float)
            return np.all(points <= threshold, axis=-1).astype(float)
        case IntervalWeight():
            inside = (points[..., 0] >= weight.lower) & (points[..., 0] <= weight.upper)
            return inside.astype(float)
        case HalfSpaceWeight():
            combination = points @ np.asarray(weight.coefficients, dtype=float)
            return (combination >= weight.threshold).astype(float)
        case GaussianCdfWeight():
            return stats.norm.cdf(points[..., 0], loc=weight.mean, scale=weight.sd)
        case MultivariateGaussianCdfWeight():
            marginals = stats.norm.cdf(
                points, loc=np.asarray(weight.mean), scale=np.asarray(weight.sd)
            )
            return np.prod(marginals, axis=-1)
    raise NotImplementedError(f"Unknown weight kind '{weight.kind}'.")


def eval_weight(weight: WeightSpec, z: ArrayLike) -> float:
    """Evaluate a weight function at a single point z.

    Raises:
        DimensionMismatchError: If z does not have the dimension of the weight.
        NonFiniteInputError: If z is not finite.
    """
    point = as_points(z, what="point")
    if point.ndim != 1:
        raise ValueError("Expected a single point, use weight_values for arrays.")
    return float(weight_values(weight, point))


def _integrate_weight(weight: WeightSpec, values: NDArray) -> NDArray[np.float64]:
    """v(z) = integral of w from 0 to z, by adaptive quadrature."""
    breakpoints: list[float] = []
    if isinstance(weight, HalfSpaceWeight) and weight.coefficients[0] != 0:
        breakpoints.append(weight.threshold / weight.coefficients[0])

    def integrand(u: float) -> float:
        return float(weight_values(weight, np.array([u])))

    result = np.empty_like(values)
    for index, upper in np.ndenumerate(values):
        if upper == 0:
            result[index] = 0.0
            continue
        lower, upper_ = sorted((0.0, float(upper)))
        inner = [b for b in breakpoints if lower < b < upper_]
        integral, _ = integrate.quad(
            integrand,
            lower,
            upper_,
            points=inner or None,
            epsabs=QUADRATURE_TOLERANCE,
            limit=200,
        )
        result[index] = integral if upper > 0 else -integral
    return result


def _univariate_chaining(weight: WeightSpec, z: NDArray) -> NDArray[np.float64]:
    """Closed-form chaining functions anchored such that v(t) = t, with quadrature
    as the fallback for weights without one.
    """
    match weight:
        case ConstantWeight():
            return weight.value * z
        case AboveThresholdWeight():
            return np.maximum(z, np.ravel(weight.threshold)[0])
        case BelowThresholdWeight():
            return np.minimum(z, np.ravel(weight.threshold)[0])
        case IntervalWeight():
            return np.clip(z, weight.lower, weight.upper)
        case GaussianCdfWeight():
            return _gaussian_integral(z, weight.mean, weight.sd)
        case MultivariateGaussianCdfWeight():
            return _gaussian_integral(z, weight.mean[0], weight.sd[0])
    log.debug("Chaining '%s' weight by numerical quadrature.", weight.kind)
    return _integrate_weight(weight, z)


def _gaussian_integral(
    z: NDArray, mean: float | NDArray, sd: float | NDArray
) -> NDArray[np.float64]:
    standardized = (z - mean) / sd
    return (z - mean) * stats.norm.cdf(standardized) + sd * stats.norm.pdf(
        standardized
    )


def chain_points(chaining: ChainingSpec, points: NDArray) -> NDArray[np.float64]:
    """Apply a chaining function to an array of points (..., d)."""
    dimension = points.shape[-1]
    check_dimension(
        chaining.required_dimension, dimension, context=f"{chaining.kind} chaining"
    )

    match chaining:
        case IdentityChaining():
            return points.copy()
        case WeightIntegralChaining():
            return _univariate_chaining(chaining.weight, points[..., 0])[..., None]
        case CollapseOutsideChaining():
            inside = weight_values(chaining.weight, points) > 0
            center = np.asarray(chaining.center, dtype=float)
            return np.where(inside[..., None], points, center)
        case ComponentwiseMaxChaining():
            return np.maximum(points, chaining.threshold)
        case PlaneProjectionChaining():
            shift = (chaining.threshold - points.sum(axis=-1)) / dimension
            return points + np.maximum(shift, 0.0)[..., None]
        case GaussianIntegratedChaining():
            return _gaussian_integral(
                points, np.asarray(chaining.mean), np.asarray(chaining.sd)
            )
    raise NotImplementedError(f"Unknown chaining kind '{chaining.kind}'.")


def eval_chaining(chaining: ChainingSpec, z: ArrayLike) -> NDArray[np.float64]:
    """Apply a chaining function to a single point z.

    Raises:
        DimensionMismatchError: If z does not fit the chaining function.
        NonFiniteInputError: If z is not finite.
    """
    point = as_points(z, what="point")
    if point.ndim != 1:
        raise ValueError("Expected a single point, use chain_points for arrays.")
    return chain_points(chaining, point)


def weight_integral(weight: WeightSpec, lower: float, upper: float) -> float:
    """The integral of a univariate weight over [lower, upper] by quadrature. Used to
    check chaining functions against their defining property.
    """
    check_dimension(weight.required_dimension, 1, context=f"{weight.kind} weight")
    breakpoints: Sequence[float] = ()
    match weight:
        case AboveThresholdWeight() | BelowThresholdWeight():
            breakpoints = (float(np.ravel(weight.threshold)[0]),)
        case IntervalWeight():
            breakpoints = (weight.lower, weight.upper)
        case HalfSpaceWeight() if weight.coefficients[0] != 0:
            breakpoints = (weight.threshold / weight.coefficients[0],)
    inner = [b for b in breakpoints if lower < b < upper]
    value, _ = integrate.quad(
        lambda u: float(weight_values(weight, np.array([u]))),
        lower,
        upper,
        points=inner or None,
        epsabs=QUADRATURE_TOLERANCE,
        limit=200,
    )
    return value
