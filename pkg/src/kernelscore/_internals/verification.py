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

"""Comparison of competing forecasts and calibration diagnostics.

Warning: This is an internal part of the library and might change without notice.
"""

import logging
from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import stats

from kernelscore._internals.exceptions import (
    DimensionMismatchError,
    EnsembleSizeMismatchError,
    InsufficientDataError,
)
from kernelscore._internals.models.dataset import EnsembleDataset
from kernelscore._internals.models.verification import (
    DmDirection,
    DmTestResult,
    RankHistogram,
    UniformityTestResult,
)
from kernelscore._internals.weights import as_points

log = logging.getLogger(__name__)


def _long_run_variance(differences: NDArray, lag: int) -> float:
    """The sample variance for lag zero, otherwise the Newey-West estimate with
    Bartlett weights.
    """
    if lag == 0:
        return float(np.var(differences, ddof=1))
    n = differences.size
    centered = differences - differences.mean()
    variance = float(centered @ centered) / n
    for k in range(1, lag + 1):
        autocovariance = float(centered[k:] @ centered[:-k]) / n
        variance += 2.0 * (1.0 - k / (lag + 1)) * autocovariance
    return variance


def dm_test(
    scores_a: Sequence[float | None],
    scores_b: Sequence[float | None],
    *,
    level: float = 0.05,
    lag: int = 0,
) -> DmTestResult:
    """Diebold-Mariano test of equal predictive performance of two forecasts.

    The statistic is the mean score difference a - b over its standard error. The
    test is two-sided with a standard normal reference distribution; a rejection is
    attributed to the forecast with the lower mean score.

    Args:
        scores_a: Per-case scores of forecast A, None where undefined.
        scores_b: Per-case scores of forecast B for the same cases.
        level: The significance level.
        lag: Number of autocovariance lags in the variance estimate, 0 for
            independent cases.

    Raises:
        ValueError: If the sequences differ in length or the arguments are invalid.
        InsufficientDataError: If fewer than two pairs are defined in both, or
            not more pairs than lags.
    """
    if len(scores_a) != len(scores_b):
        raise ValueError(
            f"Score sequences differ in length: {len(scores_a)} and {len(scores_b)}."
        )
    if not 0 < level < 1:
        raise ValueError(f"The level must lie in (0, 1), got {level}.")
    if lag < 0:
        raise ValueError(f"The lag must not be negative, got {lag}.")

    a = np.array([np.nan if v is None else v for v in scores_a], dtype=float)
    b = np.array([np.nan if v is None else v for v in scores_b], dtype=float)
    usable = np.isfinite(a) & np.isfinite(b)
    differences = a[usable] - b[usable]
    n = differences.size
    if n < 2:
        raise InsufficientDataError(
            n=n, required=2, context="The Diebold-Mariano test"
        )
    if lag >= n:
        raise InsufficientDataError(
            n=n, required=lag + 1, context=f"A Newey-West variance with {lag} lags"
        )

    constant = bool(np.all(differences == differences[0]))
    variance = 0.0 if constant else _long_run_variance(differences, lag)
    if variance <= 0:
        log.debug("Score differences have no spread, the test is inconclusive.")
        return DmTestResult(
            statistic=None,
            p_value=1.0,
            direction=DmDirection.NO_DECISION,
            n=n,
            level=level,
        )

    statistic = float(differences.mean() / np.sqrt(variance / n))
    p_value = float(2.0 * stats.norm.sf(abs(statistic)))
    direction = DmDirection.NO_DECISION
    if p_value < level:
        direction = DmDirection.FAVORS_A if statistic < 0 else DmDirection.FAVORS_B
    return DmTestResult(
        statistic=statistic, p_value=p_value, direction=direction, n=n, level=level
    )


def _stack_cases(
    cases: EnsembleDataset | Sequence[tuple[ArrayLike, ArrayLike]],
) -> tuple[NDArray, NDArray]:
    """Members (N, M, d) and observations (N, d) of cases with a common ensemble
    size.
    """
    if isinstance(cases, EnsembleDataset):
        pairs: list[tuple[ArrayLike, ArrayLike]] = []
        for case in cases.cases:
            if case.observation is None:
                raise ValueError(f"Case '{case.case_id}' has no observation.")
            pairs.append((case.ensemble, case.observation))
    else:
        pairs = list(cases)
    if not pairs:
        raise InsufficientDataError(n=0, required=1, context="A rank histogram")

    members_list, observations_list = [], []
    for ensemble, y in pairs:
        members = as_points(ensemble, what="ensemble members")
        members_list.append(members[:, None] if members.ndim == 1 else members)
        observations_list.append(as_points(y, what="observation"))
    sizes = {members.shape[0] for members in members_list}
    if len(sizes) != 1:
        raise EnsembleSizeMismatchError(
            sizes=sorted(sizes), context="A rank histogram"
        )
    members = np.stack(members_list)
    observations = np.stack(observations_list)
    if observations.shape[-1] != members.shape[-1]:
        raise DimensionMismatchError(
            expected=members.shape[-1],
            actual=observations.shape[-1],
            context="the observations",
        )
    return members, observations


def _ranks_with_random_ties(
    reference: NDArray, others: NDArray, rng: np.random.Generator
) -> NDArray[np.int_]:
    """Zero-based rank of each reference value among itself and the others, ties
    placed uniformly at random.
    """
    below = np.sum(others < reference[:, None], axis=-1)
    ties = np.sum(others == reference[:, None], axis=-1)
    return below + rng.integers(0, ties + 1)


def rank_histogram(
    cases: EnsembleDataset | Sequence[tuple[ArrayLike, ArrayLike]], *, seed: int = 0
) -> RankHistogram:
    """Histogram of the rank of univariate observations within their ensembles.

    Raises:
        DimensionMismatchError: If the cases are not univariate.
        EnsembleSizeMismatchError: If the ensemble sizes differ between cases.
    """
    members, observations = _stack_cases(cases)
    if members.shape[-1] != 1:
        raise DimensionMismatchError(
            expected=1, actual=members.shape[-1], context="a univariate rank histogram"
        )
    rng = np.random.default_rng(seed)
    ranks = _ranks_with_random_ties(observations[:, 0], members[..., 0], rng)
    counts = np.bincount(ranks, minlength=members.shape[1] + 1)
    return RankHistogram(counts=tuple(int(c) for c in counts), n=len(ranks))


def multivariate_pre_ranks(pool: NDArray) -> NDArray[np.int_]:
    """For every point of pooled sets (N, K, d), the number of points of its set
    that are component-wise smaller or equal, itself included.
    """
    smaller_or_equal = np.all(pool[:, :, None, :] <= pool[:, None, :, :], axis=-1)
    return smaller_or_equal.sum(axis=1)


def multivariate_rank_histogram(
    cases: EnsembleDataset | Sequence[tuple[ArrayLike, ArrayLike]], *, seed: int = 0
) -> RankHistogram:
    """Histogram of multivariate observation ranks.

    Observation and members are pooled and pre-ranked by component-wise dominance;
    the rank of the observation is the rank of its pre-rank among all pre-ranks.
    """
    members, observations = _stack_cases(cases)
    pool = np.concatenate((observations[:, None, :], members), axis=1)
    pre_ranks = multivariate_pre_ranks(pool)
    rng = np.random.default_rng(seed)
    ranks = _ranks_with_random_ties(pre_ranks[:, 0], pre_ranks[:, 1:], rng)
    counts = np.bincount(ranks, minlength=members.shape[1] + 1)
    return RankHistogram(counts=tuple(int(c) for c in counts), n=len(ranks))


def rank_histogram_uniformity(histogram: RankHistogram) -> UniformityTestResult:
    """Chi-square test of the rank counts against a uniform distribution."""
    if histogram.n == 0:
        raise InsufficientDataError(n=0, required=1, context="The uniformity test")
    result = stats.chisquare(np.asarray(histogram.counts, dtype=float))
    return UniformityTestResult(
        statistic=float(result.statistic),
        p_value=float(result.pvalue),
        degrees_of_freedom=len(histogram.counts) - 1,
    )
