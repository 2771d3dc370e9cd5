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

"""Reordering of post-processed marginal ensembles to restore dependence between
dimensions.

Warning: This is an internal part of the library and might change without notice.
"""

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import stats

from kernelscore._internals.exceptions import (
    DimensionMismatchError,
    GridTooLargeError,
    InsufficientDataError,
    InvalidTrainingDataError,
    NonFiniteInputError,
    UnsortedInputError,
)
from kernelscore._internals.models.postproc import (
    ComonotonicCopula,
    CopulaPlan,
    EccCopula,
    GaussianCopula,
    GaussianCopulaMode,
    IndependenceCopula,
)

log = logging.getLogger(__name__)

MIN_EIGENVALUE = 1e-6


@dataclass(frozen=True)
class ReorderedEnsemble:
    """A multivariate ensemble assembled from marginal values.

    Attributes:
        members:
            K x d array of members. K equals the number of marginal values except in
            the weight mode of the Gaussian copula, which returns all M^d
            combinations.
        weights:
            Member probabilities summing to one, None if members are equally likely.
    """

    members: NDArray[np.float64]
    weights: NDArray[np.float64] | None = None


def _check_margins(plan: CopulaPlan, margins: ArrayLike) -> NDArray[np.float64]:
    values = np.asarray(margins, dtype=float)
    if values.ndim != 2:
        raise ValueError("Margins must be given as d sequences of M values.")
    if values.shape[0] != plan.dimension:
        raise DimensionMismatchError(
            expected=plan.dimension, actual=values.shape[0], context="the margins"
        )
    if values.shape[1] != plan.members:
        raise ValueError(
            f"Each margin must have {plan.members} values, got {values.shape[1]}."
        )
    if not np.all(np.isfinite(values)):
        raise NonFiniteInputError("The margins contain non-finite values.")
    if np.any(np.diff(values, axis=1) < 0):
        raise UnsortedInputError("The values of each margin must be ascending.")
    return values


def _assemble(margins: NDArray, ranks: NDArray) -> NDArray[np.float64]:
    """Members whose coordinate j is the margin value of rank ranks[:, j]."""
    return np.take_along_axis(margins.T, ranks, axis=0)


def _ranks(values: NDArray, rng: np.random.Generator) -> NDArray[np.int_]:
    """Zero-based ranks of the values along the first axis, ties broken at random."""
    ranks = np.empty(values.shape, dtype=int)
    for j in range(values.shape[1]):
        order = np.lexsort((rng.random(values.shape[0]), values[:, j]))
        ranks[order, j] = np.arange(values.shape[0])
    return ranks


def _grid_log_density(
    copula: GaussianCopula, members: int
) -> tuple[NDArray[np.int_], NDArray[np.float64]]:
    """All combinations of level indices and the log copula density at the levels
    i / (M + 1).
    """
    correlation = np.asarray(copula.correlation, dtype=float)
    dimension = correlation.shape[0]
    size = members**dimension
    if size > copula.max_grid_size:
        raise GridTooLargeError(size=size, cap=copula.max_grid_size)

    quantiles = stats.norm.ppf(np.arange(1, members + 1) / (members + 1))
    combinations = np.indices((members,) * dimension).reshape(dimension, -1).T
    points = quantiles[combinations]
    precision = np.linalg.inv(correlation) - np.eye(dimension)
    _, log_determinant = np.linalg.slogdet(correlation)
    log_density = -0.5 * log_determinant - 0.5 * np.einsum(
        "ki,ij,kj->k", points, precision, points
    )
    return combinations, log_density


def _simulate_on_grid(
    copula: GaussianCopula, members: int, rng: np.random.Generator
) -> NDArray[np.int_]:
    """Draw combinations with probability proportional to the density among those
    that share no level with a combination drawn before.
    """
    combinations, log_density = _grid_log_density(copula, members)
    available = np.ones(len(combinations), dtype=bool)
    drawn = np.empty((members, combinations.shape[1]), dtype=int)
    for step in range(members):
        relative = np.where(
            available, np.exp(log_density - log_density[available].max()), 0.0
        )
        choice = rng.choice(len(combinations), p=relative / relative.sum())
        drawn[step] = combinations[choice]
        available &= ~np.any(combinations == combinations[choice], axis=1)
    return drawn


def reorder(
    plan: CopulaPlan,
    margins: ArrayLike,
    *,
    seed: int | np.random.Generator = 0,
) -> ReorderedEnsemble:
    """Combine marginal values into a multivariate ensemble following a copula.

    Args:
        plan: The copula, the ensemble size M and the dimension d.
        margins: d sequences of M ascending values.
        seed: Seed for random permutations, tie breaks and grid draws. A generator
            is used as is, so that several calls can share one random stream.

    Raises:
        UnsortedInputError: If a margin is not ascending.
        DimensionMismatchError: If the margins do not have the planned dimension.
        GridTooLargeError: If the Gaussian copula grid exceeds its maximal size.
    """
    values = _check_margins(plan, margins)
    rng = np.random.default_rng(seed)
    copula = plan.copula
    members, dimension = plan.members, plan.dimension

    match copula:
        case IndependenceCopula():
            ranks = np.column_stack(
                [rng.permutation(members) for _ in range(dimension)]
            )
        case ComonotonicCopula():
            ranks = np.repeat(np.arange(members)[:, None], dimension, axis=1)
        case EccCopula():
            ranks = _ranks(np.asarray(copula.template, dtype=float), rng)
        case GaussianCopula(mode=GaussianCopulaMode.WEIGHT):
            combinations, log_density = _grid_log_density(copula, members)
            weights = np.exp(log_density - log_density.max())
            log.debug("Weighting all %d grid combinations.", len(combinations))
            return ReorderedEnsemble(
                members=_assemble(values, combinations), weights=weights / weights.sum()
            )
        case GaussianCopula(mode=GaussianCopulaMode.RANDOM):
            sample = rng.multivariate_normal(
                np.zeros(dimension), np.asarray(copula.correlation), size=members
            )
            ranks = _ranks(sample, rng)
        case GaussianCopula():
            ranks = _simulate_on_grid(copula, members, rng)
        case _:
            raise NotImplementedError(f"Unknown copula kind '{copula.kind}'.")
    return ReorderedEnsemble(members=_assemble(values, ranks))


def estimate_gaussian_correlation(observations: ArrayLike) -> NDArray[np.float64]:
    """Estimate a Gaussian copula correlation matrix from n x d observations.

    Spearman rank correlations r are converted to 2 sin(pi r / 6); the result is
    made positive definite by clipping its eigenvalues and rescaled to a unit
    diagonal.

    Raises:
        InsufficientDataError: If there are fewer than three observations.
        InvalidTrainingDataError: If a dimension has no variation.
    """
    data = np.asarray(observations, dtype=float)
    if data.ndim != 2:
        raise ValueError("Observations must be an n x d array.")
    if not np.all(np.isfinite(data)):
        raise NonFiniteInputError("The observations contain non-finite values.")
    n, dimension = data.shape
    if n < 3:
        raise InsufficientDataError(
            n=n, required=3, context="Estimating a copula correlation"
        )
    if np.any(np.ptp(data, axis=0) == 0):
        raise InvalidTrainingDataError(
            "Every dimension needs varying observations to estimate a correlation."
        )
    if dimension == 1:
        return np.ones((1, 1))

    rank_correlation, _ = stats.spearmanr(data)
    if dimension == 2:
        rank_correlation = np.array(
            [[1.0, rank_correlation], [rank_correlation, 1.0]]
        )
    correlation = 2.0 * np.sin(np.pi * np.asarray(rank_correlation) / 6.0)

    eigenvalues, eigenvectors = np.linalg.eigh(correlation)
    clipped = (eigenvectors * np.maximum(eigenvalues, MIN_EIGENVALUE)) @ eigenvectors.T
    scale = 1.0 / np.sqrt(np.diag(clipped))
    repaired = clipped * np.outer(scale, scale)
    repaired = (repaired + repaired.T) / 2
    np.fill_diagonal(repaired, 1.0)
    return repaired
