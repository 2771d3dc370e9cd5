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

"""High-level convenience functions.

Warning: This is an internal part of the library and might change without notice.
"""

import logging
from collections.abc import Mapping, Sequence
from pathlib import Path

import numpy as np

from kernelscore._internals.exceptions import ConfigError, UnmatchedCasesError
from kernelscore._internals.load import DataFormat, ingest
from kernelscore._internals.models.base import Matrix
from kernelscore._internals.models.dataset import EnsembleDataset
from kernelscore._internals.models.postproc import (
    ComonotonicCopula,
    CopulaKind,
    CopulaPlan,
    CopulaSpec,
    CsgdFitResult,
    CsgdParams,
    EccCopula,
    GaussianCopula,
    GaussianCopulaMode,
    IndependenceCopula,
)
from kernelscore._internals.models.scores import ScoreRequest, ScoreResult
from kernelscore._internals.models.verification import DmTestResult
from kernelscore._internals.postproc.copula import (
    ReorderedEnsemble,
    estimate_gaussian_correlation,
    reorder,
)
from kernelscore._internals.postproc.csgd import (
    csgd_distribution,
    csgd_quantiles,
    fit_csgd,
)
from kernelscore._internals.scores import score_dataset
from kernelscore._internals.validation import DatasetValidator
from kernelscore._internals.verification import dm_test

log = logging.getLogger(__name__)


def load_and_validate(
    path: Path,
    *,
    requests: Sequence[ScoreRequest] = (),
    data_format: DataFormat | str = DataFormat.CSV,
    observations: Path | None = None,
) -> EnsembleDataset:
    """Load an ensemble dataset and check that it can be scored with the given
    requests using the default validation plugins.

    Raises:
        kernelscore.exceptions.ParsingError:
            If a file cannot be parsed.
        kernelscore.exceptions.DatasetFormatError:
            If the data has an invalid layout.
        kernelscore.exceptions.ValidationError:
            If the dataset cannot be scored with the requests.
    """
    dataset = ingest(path, data_format, observations=observations)
    validator = DatasetValidator(requests=requests)
    validator.validate(dataset=dataset)
    return dataset


def score_all(
    dataset: EnsembleDataset, requests: Sequence[ScoreRequest]
) -> list[ScoreResult]:
    """Score a dataset with every request."""
    return [score_dataset(request, dataset) for request in requests]


def _align(dataset_a: EnsembleDataset, dataset_b: EnsembleDataset) -> EnsembleDataset:
    """The cases of B in the order of A.

    Raises:
        UnmatchedCasesError: If the datasets do not have the same case IDs.
    """
    ids_b = set(dataset_b.case_ids)
    ids_a = set(dataset_a.case_ids)
    missing_in_b = [case_id for case_id in dataset_a.case_ids if case_id not in ids_b]
    missing_in_a = [case_id for case_id in dataset_b.case_ids if case_id not in ids_a]
    if missing_in_a or missing_in_b:
        raise UnmatchedCasesError(missing_in_a=missing_in_a, missing_in_b=missing_in_b)
    by_id = {case.case_id: case for case in dataset_b.cases}
    return EnsembleDataset(
        cases=tuple(by_id[case_id] for case_id in dataset_a.case_ids)
    )


def compare_datasets(
    dataset_a: EnsembleDataset,
    dataset_b: EnsembleDataset,
    requests: Sequence[ScoreRequest],
    *,
    level: float = 0.05,
    lag: int = 0,
) -> list[tuple[str, str, DmTestResult]]:
    """Compare two forecasts of the same cases with a Diebold-Mariano test per
    score request.

    Returns:
        Tuples of score name, weighting mode and test result.

    Raises:
        UnmatchedCasesError: If the datasets do not cover the same cases.
        InsufficientDataError: If fewer than two cases have defined scores.
    """
    aligned_b = _align(dataset_a, dataset_b)
    comparisons = []
    for request in requests:
        result_a = score_dataset(request, dataset_a)
        result_b = score_dataset(request, aligned_b)
        result = dm_test(result_a.scores, result_b.scores, level=level, lag=lag)
        log.info(
            "Comparison of '%s' (%s): %s, p = %.4g.",
            request.name,
            request.mode,
            result.direction,
            result.p_value,
        )
        comparisons.append((request.name, request.mode, result))
    return comparisons


def fit_csgd_by_dimension(
    training: Mapping[str, np.ndarray], *, seed: int = 0
) -> dict[str, CsgdFitResult]:
    """Fit one CSGD regression per dimension label of the training data."""
    return {
        label: fit_csgd(rows, seed=seed) for label, rows in sorted(training.items())
    }


def _params_for(params: Mapping[str, CsgdFitResult], dimension: int) -> CsgdParams:
    """Coefficients for the 0-based dimension index. A single set of coefficients
    applies to every dimension.
    """
    label = str(dimension + 1)
    if label in params:
        return params[label].params
    if len(params) == 1:
        return next(iter(params.values())).params
    raise ConfigError(f"No CSGD coefficients for dimension '{label}'.")


def _copula_for(
    kind: CopulaKind | str,
    *,
    template: np.ndarray,
    correlation: Matrix | None,
    mode: GaussianCopulaMode | str,
    max_grid_size: int,
) -> CopulaSpec:
    match CopulaKind(kind):
        case CopulaKind.INDEPENDENCE:
            return IndependenceCopula()
        case CopulaKind.COMONOTONIC:
            return ComonotonicCopula()
        case CopulaKind.ECC:
            return EccCopula(template=tuple(map(tuple, template.tolist())))
        case CopulaKind.GAUSSIAN:
            if correlation is None:
                raise ConfigError("The Gaussian copula needs a correlation matrix.")
            return GaussianCopula(
                correlation=correlation, mode=mode, max_grid_size=max_grid_size
            )
    raise NotImplementedError(f"Unknown copula kind '{kind}'.")


def _correlation_from(dataset: EnsembleDataset) -> Matrix:
    if not dataset.has_observations():
        raise ConfigError(
            "The Gaussian copula needs a correlation matrix in the configuration or"
            + " observations to estimate it from."
        )
    observations = np.asarray([case.observation for case in dataset.cases])
    correlation = estimate_gaussian_correlation(observations)
    log.info("Estimated copula correlation %s.", correlation.round(4).tolist())
    return tuple(map(tuple, correlation.tolist()))


def reorder_dataset(
    dataset: EnsembleDataset,
    params: Mapping[str, CsgdFitResult],
    kind: CopulaKind | str,
    *,
    members: int | None = None,
    correlation: Matrix | None = None,
    mode: GaussianCopulaMode | str = GaussianCopulaMode.SIMULATE,
    max_grid_size: int = 10**6,
    seed: int = 0,
) -> list[ReorderedEnsemble]:
    """Post-process every case of a dataset: the margins are CSGD quantiles derived
    from the mean and the standard deviation (ddof 0) of the raw members per
    dimension, combined into multivariate members by a copula.

    Args:
        dataset: The raw ensembles.
        params: CSGD coefficients per dimension label '1', ..., 'd'.
        kind: The copula to combine margins with.
        members: The size of the post-processed ensembles; defaults to the raw size.
            ECC needs the raw size.
        correlation: Correlation matrix of the Gaussian copula; estimated from the
            observations of the dataset if omitted.
        mode: How the Gaussian copula is turned into an ensemble.
        max_grid_size: Maximal grid size of the Gaussian copula.
        seed: Seed of the random stream shared by all cases.

    Raises:
        ConfigError: If coefficients, correlation or ensemble size are missing or do
            not fit the copula.
        DegenerateDistributionError: If the coefficients imply an invalid margin.
        GridTooLargeError: If the Gaussian grid exceeds its maximal size.
    """
    if CopulaKind(kind) == CopulaKind.GAUSSIAN and correlation is None:
        correlation = _correlation_from(dataset)
    rng = np.random.default_rng(seed)
    dimension = dataset.dimension

    reordered = []
    for case in dataset.cases:
        raw = case.members_array()
        size = members or case.n_members
        if CopulaKind(kind) == CopulaKind.ECC and size != case.n_members:
            raise ConfigError(
                f"ECC keeps the raw ensemble size {case.n_members} of case"
                + f" '{case.case_id}', but {size} members were requested."
            )
        margins = np.stack(
            [
                csgd_quantiles(
                    csgd_distribution(
                        _params_for(params, j),
                        float(raw[:, j].mean()),
                        float(raw[:, j].std()),
                    ),
                    size,
                )
                for j in range(dimension)
            ]
        )
        copula = _copula_for(
            kind,
            template=raw,
            correlation=correlation,
            mode=mode,
            max_grid_size=max_grid_size,
        )
        plan = CopulaPlan(copula=copula, members=size, dimension=dimension)
        reordered.append(reorder(plan, margins, seed=rng))
    log.info("Reordered %d cases with the %s copula.", len(reordered), kind)
    return reordered
