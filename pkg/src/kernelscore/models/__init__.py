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

"""Models describing kernels, weights, score requests, results, experiments and
post-processing plans (part of the public API of this package).
"""

from kernelscore._internals.config import RunConfig
from kernelscore._internals.models.dataset import EnsembleCase, EnsembleDataset
from kernelscore._internals.models.kernels import (
    AbsoluteDifferenceKernel,
    EuclideanPowerKernel,
    InverseMultiquadricKernel,
    KernelSpec,
    TransformedKernel,
    VariogramKernel,
)
from kernelscore._internals.models.postproc import (
    ComonotonicCopula,
    CopulaKind,
    CopulaPlan,
    CopulaSpec,
    CsgdDistribution,
    CsgdFitResult,
    CsgdParams,
    EccCopula,
    GaussianCopula,
    GaussianCopulaMode,
    IndependenceCopula,
)
from kernelscore._internals.models.scores import (
    CrpsFamily,
    EnergyFamily,
    InverseMultiquadricFamily,
    OutcomeWeighted,
    OutcomeWeightedComplemented,
    ScoreFamily,
    ScoreRequest,
    ScoreResult,
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
from kernelscore._internals.models.verification import (
    DmDirection,
    DmTestResult,
    RankHistogram,
    UniformityTestResult,
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

__all__ = [
    "AboveThresholdWeight",
    "AbsoluteDifferenceKernel",
    "BelowThresholdWeight",
    "ChainingSpec",
    "CollapseOutsideChaining",
    "ComonotonicCopula",
    "ComponentwiseMaxChaining",
    "ConstantWeight",
    "CopulaKind",
    "CopulaPlan",
    "CopulaSpec",
    "CrpsFamily",
    "CsgdDistribution",
    "CsgdFitResult",
    "CsgdParams",
    "DmDirection",
    "DmTestResult",
    "EccCopula",
    "EnergyFamily",
    "EnsembleCase",
    "EnsembleDataset",
    "EuclideanPowerKernel",
    "ExperimentConfig",
    "ExperimentResult",
    "ExperimentScore",
    "GaussianCdfWeight",
    "GaussianCopula",
    "GaussianCopulaMode",
    "GaussianIntegratedChaining",
    "HalfSpaceWeight",
    "IdentityChaining",
    "IndependenceCopula",
    "IntervalWeight",
    "InverseMultiquadricFamily",
    "InverseMultiquadricKernel",
    "KernelSpec",
    "MixtureForecast",
    "MixtureSpec",
    "MultivariateGaussianCdfWeight",
    "OutcomeWeighted",
    "OutcomeWeightedComplemented",
    "PlaneProjectionChaining",
    "RankHistogram",
    "RejectionCurve",
    "RejectionPoint",
    "RunConfig",
    "ScoreFamily",
    "ScoreRequest",
    "ScoreResult",
    "ThresholdWeighted",
    "TransformedKernel",
    "UniformityTestResult",
    "Unweighted",
    "VariogramFamily",
    "VariogramKernel",
    "VerticallyRescaled",
    "WeightIntegralChaining",
    "WeightKind",
    "WeightSpec",
    "Weighting",
    "WeightingMode",
]
