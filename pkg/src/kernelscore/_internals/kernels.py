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

"""Evaluation of conditionally negative definite kernels and empirical kernel scores.

Warning: This is an internal part of the library and might change without notice.
"""

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray

from kernelscore._internals.exceptions import (
    DimensionMismatchError,
    EmptyEnsembleError,
)
from kernelscore._internals.models.kernels import (
    AbsoluteDifferenceKernel,
    EuclideanPowerKernel,
    InverseMultiquadricKernel,
    KernelSpec,
    TransformedKernel,
    VariogramKernel,
)
from kernelscore._internals.models.weights import ChainingSpec, WeightSpec
from kernelscore._internals.weights import (
    as_points,
    chain_points,
    check_dimension,
    weight_values,
)

log = logging.getLogger(__name__)


def base_dimension(base: KernelSpec) -> int | None:
    """The dimension a base kernel requires, None if it accepts any."""
    if isinstance(base, AbsoluteDifferenceKernel):
        return 1
    if isinstance(base, VariogramKernel) and base.h is not None:
        return len(base.h)
    return base.dimension


def check_kernel_dimension(kernel: TransformedKernel, dimension: int) -> None:
    """Make sure all parts of a transformed kernel accept points of a dimension.

    Raises:
        DimensionMismatchError: If any part requires another dimension.
    """
    check_dimension(
        base_dimension(kernel.base), dimension, context=f"{kernel.base.kind} kernel"
    )
    if kernel.chaining is not None:
        check_dimension(
            kernel.chaining.required_dimension,
            dimension,
            context=f"{kernel.chaining.kind} chaining",
        )
    if kernel.weight is not None:
        check_dimension(
            kernel.weight.required_dimension,
            dimension,
            context=f"{kernel.weight.kind} weight",
        )
    if kernel.center is not None:
        check_dimension(len(kernel.center), dimension, context="kernel center")


def _as_transformed(kernel: TransformedKernel | KernelSpec) -> TransformedKernel:
    if isinstance(kernel, TransformedKernel):
        return kernel
    return TransformedKernel(base=kernel)


def _variogram_features(kernel: VariogramKernel, points: NDArray) -> NDArray:
    """Pairwise coordinate differences to the power p, scaled by the square root of
    h and flattened, so that the kernel is a squared Euclidean distance of features.
    """
    dimension = points.shape[-1]
    differences = np.abs(points[..., :, None] - points[..., None, :]) ** kernel.p
    scaling = (
        np.ones((dimension, dimension))
        if kernel.h is None
        else np.asarray(kernel.h, dtype=float)
    )
    features = differences * np.sqrt(scaling)
    return features.reshape(*points.shape[:-1], dimension * dimension)


def pairwise(base: KernelSpec, a: NDArray, b: NDArray) -> NDArray[np.float64]:
    """Evaluate a base kernel between all points of a (..., n, d) and b (..., m, d),
    giving (..., n, m).
    """
    if isinstance(base, VariogramKernel):
        features_a = _variogram_features(base, a)
        features_b = _variogram_features(base, b)
        difference = features_a[..., :, None, :] - features_b[..., None, :, :]
        return np.einsum("...k,...k->...", difference, difference)

    difference = a[..., :, None, :] - b[..., None, :, :]
    match base:
        case AbsoluteDifferenceKernel():
            return np.abs(difference[..., 0])
        case EuclideanPowerKernel():
            distance = np.sqrt(np.einsum("...k,...k->...", difference, difference))
            return distance if base.beta == 1 else distance**base.beta
        case InverseMultiquadricKernel():
            squared = np.einsum("...k,...k->...", difference, difference)
            return -1.0 / np.sqrt(1.0 + squared)
    raise NotImplementedError(f"Unknown kernel kind '{base.kind}'.")


def kernel_diagonal(base: KernelSpec, points: NDArray) -> NDArray[np.float64]:
    """rho(x, x) for every point of an array (..., d)."""
    value = 0.0 if base.zero_diagonal else -1.0
    return np.full(points.shape[:-1], value)


def transformed_kernel_matrix(
    kernel: TransformedKernel, a: NDArray, b: NDArray
) -> NDArray[np.float64]:
    """Evaluate a transformed kernel between all points of a and b.

    Inputs are chained first, the result is centered next and finally multiplied by
    the weights of the raw inputs.
    """
    base = kernel.base
    chained_a = a if kernel.chaining is None else chain_points(kernel.chaining, a)
    chained_b = b if kernel.chaining is None else chain_points(kernel.chaining, b)
    values = pairwise(base, chained_a, chained_b)

    if kernel.center is not None:
        center = np.asarray(kernel.center, dtype=float)[None, :]
        values = (
            values
            - pairwise(base, chained_a, center)
            - pairwise(base, chained_b, center)[..., :, 0][..., None, :]
        )
    if kernel.weight is not None:
        values = (
            values
            * weight_values(kernel.weight, a)[..., :, None]
            * weight_values(kernel.weight, b)[..., None, :]
        )
    return values


def kernel_matrix(
    kernel: TransformedKernel | KernelSpec, a: ArrayLike, b: ArrayLike
) -> NDArray[np.float64]:
    """The matrix of kernel values between two sets of points (n x d and m x d).

    Raises:
        DimensionMismatchError: If the points do not fit the kernel or each other.
        NonFiniteInputError: If any coordinate is not finite.
    """
    kernel = _as_transformed(kernel)
    points_a = _as_ensemble(a)
    points_b = _as_ensemble(b)
    if points_a.shape[-1] != points_b.shape[-1]:
        raise DimensionMismatchError(
            expected=points_a.shape[-1],
            actual=points_b.shape[-1],
            context="the second set of points",
        )
    check_kernel_dimension(kernel, points_a.shape[-1])
    return transformed_kernel_matrix(kernel, points_a, points_b)


def evaluate_kernel(
    kernel: TransformedKernel | KernelSpec, x: ArrayLike, x_prime: ArrayLike
) -> float:
    """Evaluate a (transformed) kernel at a single pair of points.

    Args:
        kernel: A base kernel or a transformed kernel.
        x: A point of dimension d, a scalar is treated as a point on the real line.
        x_prime: A second point of the same dimension.

    Raises:
        DimensionMismatchError: If the points do not fit the kernel or each other.
        NonFiniteInputError: If any coordinate is not finite.
    """
    point = as_points(x, what="first point")
    point_prime = as_points(x_prime, what="second point")
    if point.ndim != 1 or point_prime.ndim != 1:
        raise ValueError("Expected single points, use kernel_matrix for sets.")
    return float(kernel_matrix(kernel, point[None, :], point_prime[None, :])[0, 0])


def check_conditionally_negative_definite(
    kernel: TransformedKernel | KernelSpec,
    points: ArrayLike,
    coefficients: ArrayLike | None = None,
    *,
    samples: int = 100,
    seed: int = 0,
    tolerance: float = 1e-9,
) -> bool:
    """Check that sum_ij c_i c_j rho(x_i, x_j) <= tolerance on a set of points for
    coefficient vectors summing to zero. Only a sample of vectors is checked, so a
    True result does not prove the property.

    Args:
        kernel: A base kernel or a transformed kernel.
        points: n x d points; a flat sequence is a set of points on the real line.
        coefficients: One (n,) or several (k, n) zero-sum coefficient vectors. If
            omitted, `samples` centered standard normal vectors are drawn.
        samples: Number of drawn coefficient vectors.
        seed: Seed for drawing coefficient vectors.
        tolerance: Largest quadratic form still accepted.

    Raises:
        ValueError: If the coefficients do not fit the points or do not sum to zero.
    """
    matrix = kernel_matrix(kernel, points, points)
    n = matrix.shape[0]
    if coefficients is None:
        rng = np.random.default_rng(seed)
        vectors = rng.standard_normal((samples, n))
        vectors -= vectors.mean(axis=1, keepdims=True)
    else:
        vectors = np.atleast_2d(np.asarray(coefficients, dtype=float))
        if vectors.ndim != 2 or vectors.shape[1] != n:
            raise ValueError(
                f"Expected coefficient vectors of length {n}, got shape"
                + f" {vectors.shape}."
            )
        scale = np.maximum(1.0, np.abs(vectors).sum(axis=1))
        if np.any(np.abs(vectors.sum(axis=1)) > 1e-12 * scale):
            raise ValueError("Coefficient vectors must sum to zero.")

    forms = np.einsum("ki,ij,kj->k", vectors, matrix, vectors)
    largest = float(forms.max())
    if largest > tolerance:
        log.debug("Quadratic form %.6g exceeds the tolerance %g.", largest, tolerance)
    return largest <= tolerance


def _as_ensemble(values: ArrayLike) -> NDArray[np.float64]:
    """An M x d array of ensemble members; a flat sequence is a univariate ensemble."""
    members = as_points(values, what="ensemble members")
    if members.ndim == 1:
        members = members[:, None]
    if members.ndim != 2:
        raise ValueError(f"Expected M x d members, got {members.ndim} axes.")
    if members.shape[0] == 0:
        raise EmptyEnsembleError("The ensemble has no members.")
    return members


def _as_probabilities(
    weights: ArrayLike | None, shape: tuple[int, ...]
) -> NDArray[np.float64]:
    """Normalized member probabilities of a given shape, uniform if omitted."""
    if weights is None:
        return np.full(shape, 1.0 / shape[-1])
    probabilities = np.broadcast_to(np.asarray(weights, dtype=float), shape)
    if not np.all(np.isfinite(probabilities)) or np.any(probabilities < 0):
        raise ValueError("Member weights must be finite and non-negative.")
    totals = probabilities.sum(axis=-1, keepdims=True)
    if np.any(totals <= 0):
        raise ValueError("Member weights must not all be zero.")
    return probabilities / totals


class EnsembleBatch:
    """N ensemble forecasts with M members each and their observations, prepared for
    scoring with several kernels.

    Chained points, weights and Gram matrices are cached per transform, so scoring
    one batch under many weighting variants does not repeat the O(M^2) work.
    """

    def __init__(
        self,
        members: ArrayLike,
        observations: ArrayLike,
        probabilities: ArrayLike | None = None,
    ):
        """Prepare a batch.

        Args:
            members: Array of shape (N, M, d), or (N, M) for univariate ensembles.
            observations: Array of shape (N, d), or (N,) for univariate ones.
            probabilities: Optional non-negative member weights of shape (N, M).
                Each row is normalized to sum to one.

        Raises:
            EmptyEnsembleError: If M is zero.
            DimensionMismatchError: If members and observations do not fit.
            NonFiniteInputError: If any value is not finite.
        """
        members_ = as_points(members, what="ensemble members")
        if members_.ndim == 2:
            members_ = members_[..., None]
        if members_.ndim != 3:
            raise ValueError("Expected members of shape (N, M, d).")
        if members_.shape[1] == 0:
            raise EmptyEnsembleError("The ensembles have no members.")

        observations_ = as_points(observations, what="observations")
        if observations_.ndim == 1:
            observations_ = observations_[:, None]
        if observations_.shape[0] != members_.shape[0]:
            raise ValueError(
                f"Got {members_.shape[0]} ensembles but {observations_.shape[0]}"
                + " observations."
            )
        if observations_.shape[-1] != members_.shape[-1]:
            raise DimensionMismatchError(
                expected=members_.shape[-1],
                actual=observations_.shape[-1],
                context="the observations",
            )

        self.members = members_
        self.observations = observations_
        self.probabilities = _as_probabilities(probabilities, members_.shape[:2])
        self._chained: dict[ChainingSpec | None, tuple[NDArray, NDArray]] = {}
        self._weights: dict[WeightSpec, tuple[NDArray, NDArray]] = {}
        self._grams: dict[tuple[KernelSpec, ChainingSpec | None], NDArray] = {}
        self._orders: dict[ChainingSpec | None, NDArray] = {}

    @property
    def n_cases(self) -> int:
        """The number of ensembles N."""
        return self.members.shape[0]

    @property
    def n_members(self) -> int:
        """The ensemble size M."""
        return self.members.shape[1]

    @property
    def dimension(self) -> int:
        """The dimension d of members and observations."""
        return self.members.shape[2]

    def chained(self, chaining: ChainingSpec | None) -> tuple[NDArray, NDArray]:
        """Members and observations after applying a chaining function."""
        if chaining not in self._chained:
            if chaining is None:
                self._chained[chaining] = (self.members, self.observations)
            else:
                self._chained[chaining] = (
                    chain_points(chaining, self.members),
                    chain_points(chaining, self.observations),
                )
        return self._chained[chaining]

    def weights(self, weight: WeightSpec) -> tuple[NDArray, NDArray]:
        """The weights of members (N, M) and observations (N,)."""
        if weight not in self._weights:
            self._weights[weight] = (
                weight_values(weight, self.members),
                weight_values(weight, self.observations),
            )
        return self._weights[weight]

    def _uses_sorting(self, base: KernelSpec) -> bool:
        return self.dimension == 1 and (
            isinstance(base, AbsoluteDifferenceKernel)
            or (isinstance(base, EuclideanPowerKernel) and base.beta == 1)
        )

    def gram(self, base: KernelSpec, chaining: ChainingSpec | None) -> NDArray:
        """Kernel values between all pairs of (chained) members, (N, M, M)."""
        key = (base, chaining)
        if key not in self._grams:
            members, _ = self.chained(chaining)
            self._grams[key] = pairwise(base, members, members)
        return self._grams[key]

    def self_sum(
        self, base: KernelSpec, chaining: ChainingSpec | None, coefficients: NDArray
    ) -> NDArray[np.float64]:
        """sum_ij a_i a_j rho(u_i, u_j) per ensemble, for coefficients a (N, M).

        On the real line with rho(x, x') = |x - x'| the double sum is computed from
        the sorted members in O(M log M).
        """
        if not self._uses_sorting(base):
            return np.einsum(
                "...i,...ij,...j->...",
                coefficients,
                self.gram(base, chaining),
                coefficients,
            )

        members, _ = self.chained(chaining)
        if chaining not in self._orders:
            self._orders[chaining] = np.argsort(members[..., 0], axis=-1, kind="stable")
        order = self._orders[chaining]
        values = np.take_along_axis(members[..., 0], order, axis=-1)
        sorted_coefficients = np.take_along_axis(coefficients, order, axis=-1)
        cumulative = np.cumsum(sorted_coefficients, axis=-1)
        before = cumulative - sorted_coefficients
        after = cumulative[..., -1:] - cumulative
        return 2.0 * np.sum(sorted_coefficients * values * (before - after), axis=-1)

    def cross_sum(
        self, base: KernelSpec, chaining: ChainingSpec | None, coefficients: NDArray
    ) -> NDArray[np.float64]:
        """sum_m a_m rho(u_m, u_y) per ensemble, for coefficients a (N, M)."""
        members, observations = self.chained(chaining)
        distances = pairwise(base, members, observations[:, None, :])[..., 0]
        return np.sum(coefficients * distances, axis=-1)

    def observation_diagonal(
        self, base: KernelSpec, chaining: ChainingSpec | None
    ) -> NDArray[np.float64]:
        """rho(u_y, u_y) per ensemble."""
        _, observations = self.chained(chaining)
        return kernel_diagonal(base, observations)

    def center_terms(
        self, base: KernelSpec, chaining: ChainingSpec | None, center: NDArray
    ) -> tuple[NDArray, NDArray]:
        """rho(u, x0) for the members (N, M) and the observations (N,)."""
        members, observations = self.chained(chaining)
        anchor = center[None, :]
        return (
            pairwise(base, members, anchor)[..., 0],
            pairwise(base, observations, anchor)[..., 0],
        )


def kernel_score_batch(
    kernel: TransformedKernel | KernelSpec, batch: EnsembleBatch
) -> NDArray[np.float64]:
    """The kernel score of every ensemble of a batch for its observation.

    With member probabilities p, the score is
    sum_m p_m k(x_m, y) - 1/2 sum_mj p_m p_j k(x_m, x_j) - 1/2 k(y, y),
    where k is the transformed kernel.
    """
    kernel = _as_transformed(kernel)
    check_kernel_dimension(kernel, batch.dimension)
    base, chaining = kernel.base, kernel.chaining

    if kernel.weight is None:
        coefficients = batch.probabilities
        weight_obs = np.ones(batch.n_cases)
    else:
        weight_members, weight_obs = batch.weights(kernel.weight)
        coefficients = batch.probabilities * weight_members

    cross = batch.cross_sum(base, chaining, coefficients)
    self_sum = batch.self_sum(base, chaining, coefficients)
    diagonal = batch.observation_diagonal(base, chaining)

    if kernel.center is not None:
        center_members, center_obs = batch.center_terms(
            base, chaining, np.asarray(kernel.center, dtype=float)
        )
        total = coefficients.sum(axis=-1)
        weighted_center = np.sum(coefficients * center_members, axis=-1)
        cross = cross - weighted_center - center_obs * total
        self_sum = self_sum - 2.0 * weighted_center * total
        diagonal = diagonal - 2.0 * center_obs

    return weight_obs * cross - 0.5 * self_sum - 0.5 * diagonal * weight_obs**2


def empirical_kernel_score(
    kernel: TransformedKernel | KernelSpec,
    ensemble: ArrayLike,
    y: ArrayLike,
    *,
    member_weights: ArrayLike | None = None,
) -> float:
    """The kernel score of an ensemble forecast for an observation.

    Args:
        kernel: A base kernel or a transformed kernel.
        ensemble: M x d members, or a flat sequence of univariate members.
        y: The observation of dimension d.
        member_weights: Optional member probabilities, equal if omitted.

    Raises:
        EmptyEnsembleError: If the ensemble has no members.
        DimensionMismatchError: If the inputs do not fit the kernel or each other.
        NonFiniteInputError: If any value is not finite.
    """
    members = _as_ensemble(ensemble)
    observation = as_points(y, what="observation")
    if observation.ndim != 1:
        raise ValueError("Expected a single observation.")
    probabilities = None if member_weights is None else [member_weights]
    batch = EnsembleBatch(members[None], observation[None], probabilities)
    return float(kernel_score_batch(kernel, batch)[0])


def empirical_energy_distance(
    kernel: TransformedKernel | KernelSpec,
    ensemble_a: ArrayLike,
    ensemble_b: ArrayLike,
    *,
    weights_a: ArrayLike | None = None,
    weights_b: ArrayLike | None = None,
) -> float:
    """The kernel divergence between two ensembles: the mean kernel value across the
    ensembles minus half of the mean within each of them.

    With a chained kernel and a univariate threshold weight this is the
    threshold-weighted integrated quadratic distance.
    """
    kernel = _as_transformed(kernel)
    members_a = _as_ensemble(ensemble_a)
    members_b = _as_ensemble(ensemble_b)
    if members_a.shape[-1] != members_b.shape[-1]:
        raise DimensionMismatchError(
            expected=members_a.shape[-1],
            actual=members_b.shape[-1],
            context="the second ensemble",
        )
    check_kernel_dimension(kernel, members_a.shape[-1])
    p = _as_probabilities(weights_a, members_a.shape[:1])
    q = _as_probabilities(weights_b, members_b.shape[:1])

    cross = p @ transformed_kernel_matrix(kernel, members_a, members_b) @ q
    within_a = p @ transformed_kernel_matrix(kernel, members_a, members_a) @ p
    within_b = q @ transformed_kernel_matrix(kernel, members_b, members_b) @ q
    return float(cross - 0.5 * within_a - 0.5 * within_b)
