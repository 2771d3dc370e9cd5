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

"""Scoring rules for ensemble forecasts: the CRPS, energy, variogram and inverse
multiquadric scores with their threshold-weighted, outcome-weighted and vertically
re-scaled variants.

Warning: This is an internal part of the library and might change without notice.
"""

import logging
import math
from collections import defaultdict
from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from kernelscore._internals.exceptions import (
    DimensionMismatchError,
    UnsortedInputError,
)
from kernelscore._internals.kernels import (
    EnsembleBatch,
    base_dimension,
    check_kernel_dimension,
    kernel_score_batch,
)
from kernelscore._internals.models.dataset import EnsembleDataset
from kernelscore._internals.models.kernels import TransformedKernel
from kernelscore._internals.models.scores import (
    OutcomeWeighted,
    OutcomeWeightedComplemented,
    ScoreRequest,
    ScoreResult,
    ThresholdWeighted,
    Unweighted,
    VerticallyRescaled,
)
from kernelscore._internals.models.weights import ChainingSpec, WeightSpec
from kernelscore._internals.weights import (
    as_points,
    chain_points,
    check_dimension,
    weight_integral,
)

log = logging.getLogger(__name__)

Case = tuple[ArrayLike, ArrayLike]


def kernel_for(request: ScoreRequest, dimension: int) -> TransformedKernel:
    """The transformed kernel behind a request that is a kernel score.

    Raises:
        ValueError: For outcome-weighted requests, which are not kernel scores.
    """
    base = request.family.kernel()
    weighting = request.weighting
    match weighting:
        case Unweighted():
            return TransformedKernel(base=base)
        case ThresholdWeighted():
            return TransformedKernel.chained(base, weighting.chaining)
        case VerticallyRescaled():
            center = weighting.center or (0.0,) * dimension
            return TransformedKernel.vertically_rescaled(base, weighting.weight, center)
    raise ValueError(f"The '{weighting.kind}' weighting does not define a kernel.")


def check_request_dimension(request: ScoreRequest, dimension: int) -> None:
    """Make sure a request can score outcomes of a dimension.

    Raises:
        DimensionMismatchError: If the kernel, weight, chaining or center requires
            another dimension.
    """
    weighting = request.weighting
    if isinstance(weighting, OutcomeWeighted | OutcomeWeightedComplemented):
        base = request.family.kernel()
        check_dimension(
            base_dimension(base), dimension, context=f"{base.kind} kernel"
        )
        check_dimension(
            weighting.weight.required_dimension,
            dimension,
            context=f"{weighting.weight.kind} weight",
        )
        return
    check_kernel_dimension(kernel_for(request, dimension), dimension)


def _outcome_weighted_batch(
    request: ScoreRequest, weight: WeightSpec, batch: EnsembleBatch
) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
    """The forecast is restricted to the weighted region and renormalized, the
    score is multiplied by w(y). Undefined where the forecast gives the region no
    probability.
    """
    base = request.family.kernel()
    check_dimension(
        base_dimension(base), batch.dimension, context=f"{base.kind} kernel"
    )
    weight_members, weight_obs = batch.weights(weight)
    coefficients = batch.probabilities * weight_members
    mass = coefficients.sum(axis=-1)
    defined = mass > 0
    safe_mass = np.where(defined, mass, 1.0)

    cross = batch.cross_sum(base, None, coefficients)
    self_sum = batch.self_sum(base, None, coefficients)
    diagonal = batch.observation_diagonal(base, None)
    values = (
        weight_obs * cross / safe_mass
        - 0.5 * weight_obs * self_sum / safe_mass**2
        - 0.5 * diagonal * weight_obs
    )

    if isinstance(request.weighting, OutcomeWeightedComplemented):
        values = values + weight_obs * (mass - 1.0) ** 2 + (1.0 - weight_obs) * mass**2
        no_weight_anywhere = ~defined & (weight_obs == 0)
        values = np.where(no_weight_anywhere, 0.0, values)
        defined = defined | no_weight_anywhere
    return np.where(defined, values, np.nan), defined


def score_batch(
    request: ScoreRequest, batch: EnsembleBatch
) -> tuple[NDArray[np.float64], NDArray[np.bool_]]:
    """Score every ensemble of a batch.

    Returns:
        The scores (NaN where undefined) and a mask of the defined ones.
    """
    weighting = request.weighting
    if isinstance(weighting, OutcomeWeighted | OutcomeWeightedComplemented):
        return _outcome_weighted_batch(request, weighting.weight, batch)
    values = kernel_score_batch(kernel_for(request, batch.dimension), batch)
    return values, np.ones(batch.n_cases, dtype=bool)


def score_case(
    request: ScoreRequest,
    ensemble: ArrayLike,
    y: ArrayLike,
    *,
    member_weights: ArrayLike | None = None,
) -> float | None:
    """Score a single ensemble forecast.

    Args:
        request: The score family and weighting.
        ensemble: M x d members, or a flat sequence of univariate members.
        y: The observation of dimension d.
        member_weights: Optional member probabilities, equal if omitted.

    Returns:
        The score, or None if it is undefined for this case.

    Raises:
        EmptyEnsembleError: If the ensemble has no members.
        DimensionMismatchError: If the inputs do not fit the request or each other.
        NonFiniteInputError: If any value is not finite.
    """
    members = as_points(ensemble, what="ensemble members")
    if members.ndim == 1:
        members = members[:, None]
    observation = as_points(y, what="observation")
    probabilities = None if member_weights is None else [member_weights]
    batch = EnsembleBatch(members[None], observation[None], probabilities)
    values, defined = score_batch(request, batch)
    return float(values[0]) if defined[0] else None


def aggregate(scores: Sequence[float | None]) -> tuple[float | None, float | None, int]:
    """Mean and standard error over the defined scores and the undefined count.

    The standard error is the sample standard deviation divided by the square root
    of the number of defined scores; it needs at least two of them.
    """
    defined = [value for value in scores if value is not None]
    n_undefined = len(scores) - len(defined)
    if not defined:
        return None, None, n_undefined
    mean = math.fsum(defined) / len(defined)
    if len(defined) < 2:
        return mean, None, n_undefined
    variance = math.fsum((value - mean) ** 2 for value in defined) / (len(defined) - 1)
    return mean, math.sqrt(variance) / math.sqrt(len(defined)), n_undefined


def _dataset_to_cases(
    dataset: EnsembleDataset,
) -> list[tuple[NDArray, NDArray, NDArray]]:
    cases = []
    for case in dataset.cases:
        if case.observation is None:
            raise ValueError(f"Case '{case.case_id}' has no observation to score.")
        cases.append(
            (
                case.members_array(),
                np.asarray(case.observation, dtype=float),
                case.probabilities(),
            )
        )
    return cases


def _sequence_to_cases(
    cases: Sequence[Case],
) -> list[tuple[NDArray, NDArray, NDArray | None]]:
    prepared: list[tuple[NDArray, NDArray, NDArray | None]] = []
    for ensemble, y in cases:
        members = as_points(ensemble, what="ensemble members")
        if members.ndim == 1:
            members = members[:, None]
        prepared.append((members, as_points(y, what="observation"), None))
    return prepared


def score_dataset(
    request: ScoreRequest, cases: EnsembleDataset | Sequence[Case]
) -> ScoreResult:
    """Score a sequence of forecast cases and aggregate the scores.

    Cases with the same ensemble size are scored together. Undefined scores are
    reported as None, skipped in the aggregate and counted.

    Args:
        request: The score family and weighting.
        cases: A dataset with observations or pairs of ensemble and observation.
    """
    prepared = (
        _dataset_to_cases(cases)
        if isinstance(cases, EnsembleDataset)
        else _sequence_to_cases(cases)
    )
    if not prepared:
        raise ValueError("There are no cases to score.")
    dimension = prepared[0][0].shape[-1]

    groups: defaultdict[int, list[int]] = defaultdict(list)
    for index, (members, observation, _) in enumerate(prepared):
        if members.shape[-1] != dimension or observation.shape[-1] != dimension:
            raise DimensionMismatchError(
                expected=dimension,
                actual=(
                    members.shape[-1]
                    if members.shape[-1] != dimension
                    else observation.shape[-1]
                ),
                context=f"case {index}",
            )
        groups[members.shape[0]].append(index)

    scores: list[float | None] = [None] * len(prepared)
    for indices in groups.values():
        probabilities = [prepared[i][2] for i in indices]
        batch = EnsembleBatch(
            np.stack([prepared[i][0] for i in indices]),
            np.stack([prepared[i][1] for i in indices]),
            None if any(p is None for p in probabilities) else np.stack(probabilities),
        )
        values, defined = score_batch(request, batch)
        for position, index in enumerate(indices):
            if defined[position]:
                scores[index] = float(values[position])

    mean, stderr, n_undefined = aggregate(scores)
    if n_undefined:
        log.info(
            "Score '%s' (%s) is undefined for %d of %d cases.",
            request.name,
            request.mode,
            n_undefined,
            len(scores),
        )
    return ScoreResult(
        name=request.name,
        mode=request.mode,
        scores=tuple(scores),
        mean=mean,
        stderr=stderr,
        n_undefined=n_undefined,
    )


def quantile_twcrps(
    quantiles: Sequence[tuple[float, float]], chaining: ChainingSpec, y: float
) -> float:
    """The threshold-weighted CRPS as twice the integral of chained quantile scores
    over the quantile levels, approximated by a midpoint rule.

    Args:
        quantiles: Pairs of quantile level and value, with strictly increasing levels
            in (0, 1). Each pair represents the cell between the midpoints to its
            neighbouring levels.
        chaining: A univariate chaining function.
        y: The observation.

    Raises:
        UnsortedInputError: If the levels are not strictly increasing.
    """
    if not quantiles:
        raise ValueError("At least one quantile is needed.")
    levels = np.array([level for level, _ in quantiles], dtype=float)
    values = np.array([value for _, value in quantiles], dtype=float)
    if np.any(levels <= 0) or np.any(levels >= 1):
        raise ValueError("Quantile levels must lie in (0, 1).")
    if np.any(np.diff(levels) <= 0):
        raise UnsortedInputError("Quantile levels must be strictly increasing.")

    boundaries = np.concatenate(([0.0], (levels[:-1] + levels[1:]) / 2, [1.0]))
    widths = np.diff(boundaries)
    chained = chain_points(chaining, values[:, None])[:, 0]
    chained_y = float(chain_points(chaining, np.array([[y]], dtype=float))[0, 0])
    indicator = (values >= y).astype(float)
    return float(2.0 * np.sum(widths * (indicator - levels) * (chained - chained_y)))


def integral_twcrps(
    ensemble: ArrayLike,
    y: float,
    weight: WeightSpec,
    *,
    member_weights: ArrayLike | None = None,
) -> float:
    """The threshold-weighted CRPS of a univariate ensemble as the weighted integral
    of the squared difference between forecast and observation distribution
    functions.

    Between consecutive members and the observation the integrand is constant up to
    the weight, so the integral is a sum of weighted segment lengths.
    """
    members = as_points(ensemble, what="ensemble members").reshape(-1)
    if members.size == 0:
        raise ValueError("The ensemble has no members.")
    if member_weights is None:
        probabilities = np.full(members.size, 1.0 / members.size)
    else:
        probabilities = np.asarray(member_weights, dtype=float)
        probabilities = probabilities / probabilities.sum()

    breakpoints = np.unique(np.append(members, y))
    total = 0.0
    for lower, upper in zip(breakpoints[:-1], breakpoints[1:], strict=True):
        midpoint = (lower + upper) / 2
        forecast_cdf = float(probabilities[members <= midpoint].sum())
        observed_cdf = 1.0 if y <= midpoint else 0.0
        difference = forecast_cdf - observed_cdf
        if difference != 0:
            total += difference**2 * weight_integral(weight, lower, upper)
    return total
