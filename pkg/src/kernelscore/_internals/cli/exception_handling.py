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

"""Handling user-derived exceptions in the CLI."""

from contextlib import contextmanager

import typer

from kernelscore import exceptions
from kernelscore._internals.cli import exit_codes
from kernelscore._internals.cli.printing import print_exception, print_final_failure

DATA_ERRORS = (
    exceptions.ParsingError,
    exceptions.DatasetFormatError,
    exceptions.UnknownCaseError,
    exceptions.DimensionMismatchError,
    exceptions.NonFiniteInputError,
    exceptions.EmptyEnsembleError,
    exceptions.EnsembleSizeMismatchError,
    exceptions.UnsortedInputError,
)

COMPUTATION_ERRORS = (
    exceptions.InsufficientDataError,
    exceptions.DegenerateDistributionError,
    exceptions.InvalidTrainingDataError,
    exceptions.CsgdFitError,
)


@contextmanager
def expect_config_errors():
    """Handle invalid run configurations."""
    try:
        yield
    except (
        exceptions.ConfigError,
        exceptions.SimulationError,
        exceptions.GridTooLargeError,
    ) as error:
        print_exception(error, exception_name=type(error).__name__)
        print_final_failure("The provided run configuration cannot be used.")
        raise typer.Exit(exit_codes.USAGE_ERROR) from None


@contextmanager
def expect_file_errors():
    """Handle files that cannot be opened."""
    try:
        yield
    except OSError as error:
        print_exception(error, exception_name=type(error).__name__)
        print_final_failure("A provided file could not be read or written.")
        raise typer.Exit(exit_codes.USAGE_ERROR) from None


@contextmanager
def expect_data_errors():
    """Handle datasets that cannot be read."""
    try:
        yield
    except DATA_ERRORS as error:
        print_exception(error, exception_name=type(error).__name__)
        print_final_failure("The provided data could not be read.")
        raise typer.Exit(exit_codes.DATA_ERROR) from None


@contextmanager
def expect_validation_errors():
    """Handle datasets that do not fit the requested computation."""
    try:
        yield
    except exceptions.ValidationError as error:
        print_exception(error, exception_name="ValidationError")
        print_final_failure("The provided data does not fit the requested scores.")
        raise typer.Exit(exit_codes.DATA_ERROR) from None


@contextmanager
def expect_unmatched_cases_errors():
    """Handle compared forecasts that do not cover the same cases."""
    try:
        yield
    except exceptions.UnmatchedCasesError as error:
        print_exception(error, exception_name="UnmatchedCasesError")
        print_final_failure("The compared forecasts do not cover the same cases.")
        raise typer.Exit(exit_codes.DATA_ERROR) from None


@contextmanager
def expect_computation_errors():
    """Handle data on which a statistical procedure cannot be carried out."""
    try:
        yield
    except COMPUTATION_ERRORS as error:
        print_exception(error, exception_name=type(error).__name__)
        print_final_failure("The computation could not be carried out on this data.")
        raise typer.Exit(exit_codes.DATA_ERROR) from None


@contextmanager
def expect_common_user_errors():
    """Handle all user-derived errors."""
    with (
        expect_file_errors(),
        expect_config_errors(),
        expect_data_errors(),
        expect_validation_errors(),
        expect_unmatched_cases_errors(),
        expect_computation_errors(),
    ):
        yield
