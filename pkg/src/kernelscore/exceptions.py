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

"""Collection of package-specific exceptions"""

from kernelscore._internals.exceptions import (
    BaseError,
    ConfigError,
    CsgdFitError,
    DatasetFormatError,
    DegenerateDistributionError,
    DimensionMismatchError,
    EmptyEnsembleError,
    EnsembleSizeMismatchError,
    GridTooLargeError,
    InsufficientDataError,
    InvalidTrainingDataError,
    NonFiniteInputError,
    ParsingError,
    SimulationError,
    UnknownCaseError,
    UnmatchedCasesError,
    UnsortedInputError,
    ValidationError,
    ValidationErrorRecord,
    ValidationPluginError,
)

__all__ = [
    "BaseError",
    "ConfigError",
    "CsgdFitError",
    "DatasetFormatError",
    "DegenerateDistributionError",
    "DimensionMismatchError",
    "EmptyEnsembleError",
    "EnsembleSizeMismatchError",
    "GridTooLargeError",
    "InsufficientDataError",
    "InvalidTrainingDataError",
    "NonFiniteInputError",
    "ParsingError",
    "SimulationError",
    "UnknownCaseError",
    "UnmatchedCasesError",
    "UnsortedInputError",
    "ValidationError",
    "ValidationErrorRecord",
    "ValidationPluginError",
]
