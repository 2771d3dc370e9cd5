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

"""A simulation experiment on the power of weighted scores to discriminate between
two forecasts that differ only in the tails.

Observations are drawn from a standard normal distribution G. The forecast F1
resembles G where the mixing function a is close to one (large values) and a Student
t distribution H elsewhere; F2 does the opposite. Both are scored by every requested
score and compared with a Diebold-Mariano test per repetition.

Warning: This is an internal part of the library and might change without notice.
"""

import logging
from collections import Counter
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache

import numpy as np
from arcticfreeze import FrozenDict
from numpy.typing import NDArray
from scipy import special, stats

from kernelscore._internals.exceptions import InsufficientDataError, SimulationError
from kernelscore._internals.kernels import EnsembleBatch
from kernelscore._internals.models.scores import (
    CrpsFamily,
    EnergyFamily,
    InverseMultiquadricFamily,
    OutcomeWeighted,
    OutcomeWeightedComplemented,
    ScoreFamily,
    ScoreRequest,
    ThresholdWeighted,
    Unweighted,
    VariogramFamily,
    VerticallyRescaled,
    Weighting,
)
from kernelscore._internals.models.simstudy import (
    ExperimentConfig,
    ExperimentResult,
    ExperimentScore,
    MixtureForecast,
    MixtureSpec,
    RejectionCurve,
    RejectionPoint,
    WeightingMode,
    WeightKind,
)
from kernelscore._internals.models.verification import DmDirection
from kernelscore._internals.models.weights import (
    AboveThresholdWeight,
    ChainingSpec,
    CollapseOutsideChaining,
    ComponentwiseMaxChaining,
    HalfSpaceWeight,
    PlaneProjectionChaining,
    WeightSpec,
)
from kernelscore._internals.scores import score_batch
from kernelscore._internals.verification import dm_test

log = logging.getLogger(__name__)

BISECTION_TOLERANCE = 1e-10
MAX_BISECTION_STEPS = 200
_UNIFORM_CLIP = 1e-12

FAVOURS_F1 = "F1"
FAVOURS_F2 = "F2"
UNDECIDED = "none"
DROPPED = "dropped"

Seed = int | Sequence[int] | np.random.Generator


def mixing_function(spec: MixtureSpec, points: NDArray) -> NDArray[np.float64]:
    """a(z) = Phi(sum_i z_i / s) for points (..., d), or the configured constant."""
    if spec.mixing_override is not None:
        return np.full(points.shape[:-1], spec.mixing_override)
    return stats.norm.cdf(points.sum(axis=-1) / spec.mixing_sd)


def _g_share(spec: MixtureSpec, which: MixtureForecast, points: NDArray) -> NDArray:
    """The share of G in the mixture at each point."""
    share = mixing_function(spec, points)
    return share if which == MixtureForecast.F1 else 1.0 - share


def mixture_cdf(
    spec: MixtureSpec, which: MixtureForecast | str, z: NDArray
) -> NDArray[np.float64]:
    """The distribution function of a univariate mixture forecast."""
    which = MixtureForecast(which)
    share = _g_share(spec, which, np.asarray(z, dtype=float)[..., None])
    return share * stats.norm.cdf(z) + (1.0 - share) * stats.t.cdf(
        z, spec.degrees_of_freedom
    )


@lru_cache(maxsize=32)
def _check_monotone(spec: MixtureSpec, which: MixtureForecast) -> None:
    grid = np.linspace(-10.0, 10.0, 2001)
    values = mixture_cdf(spec, which, grid)
    if np.any(np.diff(values) < -1e-12):
        raise SimulationError(
            f"The mixture {which.value} does not have a non-decreasing distribution"
            + " function and cannot be sampled by inversion."
        )


def _invert_univariate(
    spec: MixtureSpec, which: MixtureForecast, levels: NDArray
) -> NDArray[np.float64]:
    """Solve F(z) = u by bisection. F lies pointwise between the normal and the t
    distribution function, so their quantiles bracket the solution.
    """
    normal = stats.norm.ppf(levels)
    student = stats.t.ppf(levels, spec.degrees_of_freedom)
    lower = np.minimum(normal, student)
    upper = np.maximum(normal, student)
    for _ in range(MAX_BISECTION_STEPS):
        middle = (lower + upper) / 2
        tolerance = BISECTION_TOLERANCE * np.maximum(1.0, np.abs(middle))
        if np.all(upper - lower <= tolerance):
            break
        below = mixture_cdf(spec, which, middle) < levels
        lower = np.where(below, middle, lower)
        upper = np.where(below, upper, middle)
    return (lower + upper) / 2


def _draw_student(
    rng: np.random.Generator, size: int, dimension: int, df: float
) -> NDArray[np.float64]:
    normal = rng.standard_normal((size, dimension))
    return normal / np.sqrt(rng.chisquare(df, size) / df)[:, None]


def _rejection_sample(
    spec: MixtureSpec, which: MixtureForecast, n: int, rng: np.random.Generator
) -> NDArray[np.float64]:
    """Draw from the density a g + (1 - a) h (F1) by rejection from (g + h) / 2."""
    dimension = spec.dimension
    zeros = np.zeros(dimension)
    identity = np.eye(dimension)
    accepted: list[NDArray] = []
    n_accepted = 0
    batch_size = max(2 * n, 64)
    while n_accepted < n:
        from_g = rng.random(batch_size) < 0.5
        proposals = np.where(
            from_g[:, None],
            rng.standard_normal((batch_size, dimension)),
            _draw_student(rng, batch_size, dimension, spec.degrees_of_freedom),
        )
        log_g = stats.multivariate_normal.logpdf(proposals, zeros, identity)
        log_h = stats.multivariate_t.logpdf(
            proposals, loc=zeros, shape=identity, df=spec.degrees_of_freedom
        )
        normal_part = special.expit(np.atleast_1d(log_g - log_h))
        share = _g_share(spec, which, proposals)
        acceptance = share * normal_part + (1.0 - share) * (1.0 - normal_part)
        keep = rng.random(batch_size) < acceptance
        accepted.append(proposals[keep])
        n_accepted += int(keep.sum())
    return np.concatenate(accepted)[:n]


def sample_mixture(
    spec: MixtureSpec, which: MixtureForecast | str, n: int, seed: Seed
) -> NDArray[np.float64]:
    """Draw n points from one of the two mixture forecasts.

    Univariate draws invert the distribution function numerically; multivariate
    draws use rejection sampling from the density mixture.

    Args:
        spec: The mixture components and mixing function.
        which: F1 or F2.
        n: Number of draws.
        seed: A seed or a numpy Generator.

    Returns:
        An n x d array.

    Raises:
        SimulationError: If a univariate mixture is not a valid distribution.
    """
    if n < 1:
        raise ValueError(f"The number of draws must be positive, got {n}.")
    which = MixtureForecast(which)
    rng = np.random.default_rng(seed)
    if spec.dimension == 1:
        _check_monotone(spec, which)
        levels = np.clip(rng.random(n), _UNIFORM_CLIP, 1.0 - _UNIFORM_CLIP)
        return _invert_univariate(spec, which, levels)[:, None]
    return _rejection_sample(spec, which, n, rng)


def default_thresholds(weight_kind: WeightKind | str) -> tuple[float, ...]:
    """Thresholds spanning the range where the two forecasts can be told apart."""
    match WeightKind(weight_kind):
        case WeightKind.UNIVARIATE:
            values = np.linspace(-1.0, 2.5, 15)
        case WeightKind.ORTHANT:
            values = np.linspace(-1.0, 1.5, 11)
        case WeightKind.HALF_SPACE:
            values = np.linspace(-2.0, 3.0, 11)
    return tuple(float(value) for value in values)


def default_scores(dimension: int) -> tuple[ExperimentScore, ...]:
    """The CRPS and IMS for one dimension, else the energy, variogram and IMS."""
    families: tuple[ScoreFamily, ...]
    if dimension == 1:
        families = (CrpsFamily(), InverseMultiquadricFamily())
    else:
        families = (EnergyFamily(), VariogramFamily(), InverseMultiquadricFamily())
    return tuple(ExperimentScore(family=family) for family in families)


def _weight_and_center(
    weight_kind: WeightKind, threshold: float, dimension: int
) -> tuple[WeightSpec, tuple[float, ...]]:
    """The threshold weight and the center used for localising chaining."""
    match weight_kind:
        case WeightKind.UNIVARIATE:
            return AboveThresholdWeight(threshold=threshold), (threshold,)
        case WeightKind.ORTHANT:
            return (
                AboveThresholdWeight(threshold=(threshold,) * dimension),
                (threshold,) * dimension,
            )
        case WeightKind.HALF_SPACE:
            return (
                HalfSpaceWeight(coefficients=(1.0,) * dimension, threshold=threshold),
                (threshold / dimension,) * dimension,
            )
    raise NotImplementedError(f"Unknown weight kind '{weight_kind}'.")


def weighting_for(
    mode: WeightingMode | str,
    weight_kind: WeightKind | str,
    threshold: float,
    dimension: int,
) -> Weighting:
    """The weighting a mode of the experiment stands for at one threshold."""
    mode = WeightingMode(mode)
    weight_kind = WeightKind(weight_kind)
    weight, center = _weight_and_center(weight_kind, threshold, dimension)
    match mode:
        case WeightingMode.UNWEIGHTED:
            return Unweighted()
        case WeightingMode.TW_LOCALISING:
            return ThresholdWeighted(
                chaining=CollapseOutsideChaining(weight=weight, center=center)
            )
        case WeightingMode.TW_NONLOCALISING:
            chaining: ChainingSpec = (
                PlaneProjectionChaining(threshold=threshold)
                if weight_kind == WeightKind.HALF_SPACE
                else ComponentwiseMaxChaining(threshold=threshold)
            )
            return ThresholdWeighted(chaining=chaining)
        case WeightingMode.OUTCOME:
            return OutcomeWeighted(weight=weight)
        case WeightingMode.OUTCOME_COMPLEMENTED:
            return OutcomeWeightedComplemented(weight=weight)
        case WeightingMode.VERTICAL:
            return VerticallyRescaled(weight=weight, center=(0.0,) * dimension)
    raise NotImplementedError(f"Unknown weighting mode '{mode}'.")


def _curve_key(family: ScoreFamily, mode: WeightingMode | str) -> str:
    return f"{family.kind}/{WeightingMode(mode).value}"


def _resolved(
    config: ExperimentConfig,
) -> tuple[tuple[float, ...], tuple[ExperimentScore, ...]]:
    thresholds = config.thresholds or default_thresholds(config.weight_kind)
    scores = config.scores or default_scores(config.dimension)
    return thresholds, scores


def _compare(
    request: ScoreRequest,
    batch_f1: EnsembleBatch,
    batch_f2: EnsembleBatch,
    config: ExperimentConfig,
) -> str:
    """The outcome of one score in one repetition."""
    values_f1, defined_f1 = score_batch(request, batch_f1)
    values_f2, defined_f2 = score_batch(request, batch_f2)
    defined = defined_f1 & defined_f2
    if 1.0 - defined.mean() > config.max_undefined_fraction:
        return DROPPED
    scores_f1 = [float(v) if ok else None for v, ok in zip(values_f1, defined)]
    scores_f2 = [float(v) if ok else None for v, ok in zip(values_f2, defined)]
    try:
        result = dm_test(scores_f1, scores_f2, level=config.level)
    except InsufficientDataError:
        return DROPPED
    match result.direction:
        case DmDirection.FAVORS_A:
            return FAVOURS_F1
        case DmDirection.FAVORS_B:
            return FAVOURS_F2
    return UNDECIDED


def run_repetition(config: ExperimentConfig, repetition: int) -> dict[str, list[str]]:
    """Run one repetition of the experiment.

    The random streams for observations and both forecasts are derived from the seed
    and the repetition index only, so the outcome does not depend on scheduling.

    Returns:
        For every curve key, the outcome at each threshold: 'F1', 'F2', 'none' or
        'dropped'.
    """
    thresholds, scores = _resolved(config)
    mixture = config.mixture or MixtureSpec(dimension=config.dimension)
    streams = np.random.SeedSequence([config.seed, repetition]).spawn(3)
    rng_obs, rng_first, rng_second = (np.random.default_rng(s) for s in streams)

    dimension, n_obs, members = config.dimension, config.n_obs, config.members
    observations = rng_obs.standard_normal((n_obs, dimension))
    draws = n_obs * members
    ensembles_first = sample_mixture(mixture, MixtureForecast.F1, draws, rng_first)
    ensembles_second = sample_mixture(mixture, MixtureForecast.F2, draws, rng_second)
    if config.swap_forecasts:
        ensembles_first, ensembles_second = ensembles_second, ensembles_first
    batch_f1 = EnsembleBatch(
        ensembles_first.reshape(n_obs, members, dimension), observations
    )
    batch_f2 = EnsembleBatch(
        ensembles_second.reshape(n_obs, members, dimension), observations
    )

    outcomes: dict[str, list[str]] = {}
    for score in scores:
        for mode in score.modes:
            key = _curve_key(score.family, mode)
            per_threshold: list[str] = []
            cache: dict[ScoreRequest, str] = {}
            for threshold in thresholds:
                request = ScoreRequest(
                    family=score.family,
                    weighting=weighting_for(
                        mode, config.weight_kind, threshold, dimension
                    ),
                )
                if request not in cache:
                    cache[request] = _compare(request, batch_f1, batch_f2, config)
                per_threshold.append(cache[request])
            outcomes[key] = per_threshold
    log.debug("Finished repetition %d.", repetition)
    return outcomes


def _tally(
    config: ExperimentConfig, outcomes: Sequence[dict[str, list[str]]]
) -> ExperimentResult:
    thresholds, scores = _resolved(config)
    curves: dict[str, RejectionCurve] = {}
    for score in scores:
        for mode in score.modes:
            key = _curve_key(score.family, mode)
            points = []
            for index, threshold in enumerate(thresholds):
                counts = Counter(repetition[key][index] for repetition in outcomes)
                if counts[DROPPED]:
                    log.info(
                        "Dropped %d repetitions for '%s' at threshold %g.",
                        counts[DROPPED],
                        key,
                        threshold,
                    )
                points.append(
                    RejectionPoint(
                        threshold=threshold,
                        favours_f1=counts[FAVOURS_F1],
                        favours_f2=counts[FAVOURS_F2],
                        repetitions_used=len(outcomes) - counts[DROPPED],
                        repetitions_dropped=counts[DROPPED],
                    )
                )
            curves[key] = RejectionCurve(
                score=score.family.kind, mode=WeightingMode(mode), points=tuple(points)
            )
    return ExperimentResult(curves=FrozenDict(curves))


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run all repetitions of the experiment and collect the directional rejection
    rates of every score and weighting mode per threshold.

    Raises:
        SimulationError: If the mixture cannot be sampled or curve keys collide.
    """
    _, scores = _resolved(config)
    keys = [_curve_key(score.family, mode) for score in scores for mode in score.modes]
    if len(set(keys)) != len(keys):
        raise SimulationError(
            "Every score family and weighting mode may only be requested once."
        )

    log.info(
        "Running %d repetitions with %d observations and %d members in dimension %d.",
        config.repetitions,
        config.n_obs,
        config.members,
        config.dimension,
    )
    repetitions = range(config.repetitions)
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            outcomes = list(
                executor.map(run_repetition, [config] * config.repetitions, repetitions)
            )
    else:
        outcomes = [run_repetition(config, repetition) for repetition in repetitions]
    log.info("Finished all %d repetitions.", config.repetitions)
    return _tally(config, outcomes)
