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

from abc import ABC
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import pydantic_core


class BaseError(ABC, Exception):
    """Base class for all kernelscore errors."""


class ParsingError(BaseError, ValueError):
    """Raised when parsing CSV, JSON Lines, JSON or YAML data fails."""


class ConfigError(BaseError, ValueError):
    """An error indicating that a run configuration is not valid."""

    def __init__(
        self, message: str, *, details: list[pydantic_core.ErrorDetails] | None = None
    ):
        """Initiate a ConfigError.

        Args:
            message: A human-readable message describing the error.
            details: Details on which fields of the configuration are invalid.
        """
        message = f"The provided run configuration is not valid: {message}"
        super().__init__(message)
        self.message = message
        self.details = details if details else []


class DatasetFormatError(BaseError, ValueError):
    """Raised when an ensemble or training file does not have the expected layout."""

    def __init__(self, message: str, *, path: Path, line: int | None = None):
        """Initiate a DatasetFormatError.

        Args:
            message: A human-readable message describing the error.
            path: The file in which the problem was found.
            line: The 1-based line of the file, if the problem is line-specific.
        """
        location = f"'{path}'" if line is None else f"'{path}', line {line}"
        super().__init__(f"Invalid data in {location}: {message}")
        self.message = message
        self.path = path
        self.line = line


class UnknownCaseError(BaseError, KeyError):
    """Raised when observations refer to a case for which no forecast exists."""

    def __init__(self, *, case_id: str, path: Path, line: int):
        """Initiate an UnknownCaseError.

        Args:
            case_id: The case ID without a matching forecast.
            path: The observation file.
            line: The 1-based line of the observation.
        """
        message = (
            f"Observation for case '{case_id}' in '{path}', line {line}, has no"
            + " matching forecast."
        )
        super().__init__(message)
        self.message = message
        self.case_id = case_id
        self.path = path
        self.line = line

    def __str__(self) -> str:
        return self.message


class UnmatchedCasesError(BaseError, KeyError):
    """Raised when two forecast datasets that are compared do not cover the same
    cases.
    """

    def __init__(self, *, missing_in_a: Sequence[str], missing_in_b: Sequence[str]):
        """Initiate an UnmatchedCasesError.

        Args:
            missing_in_a: Case IDs only present in the second dataset.
            missing_in_b: Case IDs only present in the first dataset.
        """
        parts = []
        if missing_in_a:
            parts.append("missing in forecast A: " + ", ".join(missing_in_a))
        if missing_in_b:
            parts.append("missing in forecast B: " + ", ".join(missing_in_b))
        message = "The compared forecasts do not match case-wise (" + "; ".join(
            parts
        )
        message += ")."
        super().__init__(message)
        self.message = message
        self.missing_in_a = list(missing_in_a)
        self.missing_in_b = list(missing_in_b)

    def __str__(self) -> str:
        return self.message


class DimensionMismatchError(BaseError, ValueError):
    """Raised when the dimension of an input does not match what is expected."""

    def __init__(self, *, expected: int, actual: int, context: str):
        """Initiate a DimensionMismatchError.

        Args:
            expected: The expected dimension.
            actual: The dimension that was found.
            context: What was being checked, used in the message.
        """
        message = f"Expected dimension {expected} for {context}, got {actual}."
        super().__init__(message)
        self.expected = expected
        self.actual = actual


class EnsembleSizeMismatchError(BaseError, ValueError):
    """Raised when cases that must share an ensemble size do not."""

    def __init__(self, *, sizes: Sequence[int], context: str):
        """Initiate an EnsembleSizeMismatchError.

        Args:
            sizes: The distinct ensemble sizes found.
            context: The procedure that needs a common size.
        """
        self.sizes = sorted(set(sizes))
        message = f"{context} needs a common ensemble size, got sizes " + ", ".join(
            str(size) for size in self.sizes
        )
        super().__init__(message + ".")


class NonFiniteInputError(BaseError, ValueError):
    """Raised when a forecast, observation or evaluation point is not finite."""


class EmptyEnsembleError(BaseError, ValueError):
    """Raised when an ensemble forecast without members is scored."""


class InsufficientDataError(BaseError, ValueError):
    """Raised when there are too few cases for a statistical procedure."""

    def __init__(self, *, n: int, required: int, context: str):
        """Initiate an InsufficientDataError.

        Args:
            n: The number of usable cases.
            required: The minimal number of cases.
            context: The procedure that needs the data.
        """
        message = f"{context} needs at least {required} usable cases, got {n}."
        super().__init__(message)
        self.n = n
        self.required = required


class UnsortedInputError(BaseError, ValueError):
    """Raised when quantile levels or marginal values are not in ascending order."""


class DegenerateDistributionError(BaseError, ValueError):
    """Raised when regression coefficients imply a non-positive mean or spread."""


class InvalidTrainingDataError(BaseError, ValueError):
    """Raised when training data violates the assumptions of a post-processing model."""


class CsgdFitError(BaseError, RuntimeError):
    """Raised when no start of the likelihood optimization gives a finite value."""


class GridTooLargeError(BaseError, ValueError):
    """Raised when a Gaussian copula grid would exceed the configured size."""

    def __init__(self, *, size: int, cap: int):
        """Initiate a GridTooLargeError.

        Args:
            size: The number of grid points that would be needed.
            cap: The configured maximum.
        """
        message = (
            f"The copula grid would contain {size} combinations, exceeding the"
            + f" maximum of {cap}. Use fewer members, or the simulate mode instead"
            + " of the weight mode."
        )
        super().__init__(message)
        self.size = size
        self.cap = cap


class SimulationError(BaseError, RuntimeError):
    """Raised when a simulation setup does not describe valid distributions."""


class ValidationPluginError(BaseError, ValueError):
    """Raised by a ValidationPlugin."""

    def __init__(
        self, *, type_: str, message: str, details: dict[str, object] | None = None
    ):
        """Initiate a ValidationPluginError.

        Args:
            type_: A preferably short type label.
            message: A human-readable message describing the error.
            details: A dictionary for transporting additional machine-readable details.
        """
        super().__init__(message)
        self.type_ = type_
        self.message = message
        self.details = details if details else {}


@dataclass
class ValidationErrorRecord:
    """A record of an issue found while checking an ensemble dataset.

    Attributes:
        case_id:
            If relevant, the ID of the forecast case the issue refers to.
        type:
            A preferably short type label.
        message:
            A human-readable message describing the error.
        details:
            A dictionary for transporting additional machine-readable details.
    """

    case_id: str | None
    type: str
    message: str
    details: dict[str, object]


def _val_record_to_str(record: ValidationErrorRecord) -> str:
    """Translate a ValidationErrorRecord into a human-readable message."""
    context = f"case '{record.case_id}'" if record.case_id else "dataset"

    return (
        f"Error in {context}:"
        + f"\n\tType: {record.type}"
        + f"\n\tMessage: {record.message}"
    )


class ValidationError(BaseError, ValueError):
    """A collection of ValidationErrorRecords raised when an ensemble dataset cannot
    be used for the requested computation.
    """

    def __init__(self, records: list[ValidationErrorRecord]):
        """Initiate a ValidationError.

        Args:
            records: A list of ValidationErrorRecords.
        """
        if not records:
            raise ValueError("ValidationError must be raised with at least one record.")

        self.records = sorted(records, key=lambda r: (r.case_id or "", r.type))
        n_records = len(self.records)
        record_messages = "\n".join(_val_record_to_str(r) for r in self.records)
        message = f"Validation failed with {n_records} issue(s):\n{record_messages}"

        super().__init__(message)
