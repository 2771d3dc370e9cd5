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

"""Kernel scores and weighted scoring rules for verifying ensemble forecasts, with
forecast comparison, calibration diagnostics and ensemble post-processing.
"""

from importlib.metadata import version

from ._internals.config import load_run_config
from ._internals.kernels import (
    EnsembleBatch,
    check_conditionally_negative_definite,
    empirical_energy_distance,
    empirical_kernel_score,
    evaluate_kernel,
    kernel_matrix,
)
from ._internals.load import ingest, read_ensemble_csv, read_ensemble_jsonl
from ._internals.main import (
    compare_datasets,
    fit_csgd_by_dimension,
    load_and_validate,
    reorder_dataset,
)
from ._internals.postproc.copula import (
    ReorderedEnsemble,
    estimate_gaussian_correlation,
    reorder,
)
from ._internals.postproc.csgd import csgd_distribution, csgd_quantiles, fit_csgd
from ._internals.scores import (
    integral_twcrps,
    quantile_twcrps,
    score_case,
    score_dataset,
)
from ._internals.simstudy import run_experiment, sample_mixture
from ._internals.validation import DatasetValidator
from ._internals.verification import (
    dm_test,
    multivariate_rank_histogram,
    rank_histogram,
    rank_histogram_uniformity,
)
from ._internals.weights import eval_chaining, eval_weight

__all__ = [
    "DatasetValidator",
    "EnsembleBatch",
    "ReorderedEnsemble",
    "check_conditionally_negative_definite",
    "compare_datasets",
    "csgd_distribution",
    "csgd_quantiles",
    "dm_test",
    "empirical_energy_distance",
    "empirical_kernel_score",
    "estimate_gaussian_correlation",
    "eval_chaining",
    "eval_weight",
    "evaluate_kernel",
    "fit_csgd",
    "fit_csgd_by_dimension",
    "ingest",
    "integral_twcrps",
    "kernel_matrix",
    "load_and_validate",
    "load_run_config",
    "multivariate_rank_histogram",
    "quantile_twcrps",
    "rank_histogram",
    "rank_histogram_uniformity",
    "read_ensemble_csv",
    "read_ensemble_jsonl",
    "reorder",
    "reorder_dataset",
    "run_experiment",
    "sample_mixture",
    "score_case",
    "score_dataset",
]

__version__ = version(__package__)
