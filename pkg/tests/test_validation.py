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

"""Tests checking ensemble datasets against score requests."""

from collections.abc import Sequence

import pytest

from kernelscore import DatasetValidator, load_and_validate, read_ensemble_csv
from kernelscore.exceptions import ValidationError, ValidationPluginError
from kernelscore.models import (
    EnergyFamily,
    EnsembleCase,
    EnsembleDataset,
    IntervalWeight,
    OutcomeWeighted,
    ScoreRequest,
)
from kernelscore.plugins import CaseValidationPlugin
from tests.fixtures.examples import (
    BIVARIATE_FORECASTS,
    BIVARIATE_OBSERVATIONS,
    UNIVARIATE_FORECASTS,
    UNIVARIATE_OBSERVATIONS,
)

ENERGY_WITH_UNIVARIATE_WEIGHT = ScoreRequest(
    family=EnergyFamily(),
    weighting=OutcomeWeighted(weight=IntervalWeight(lower=0.0, upper=1.0)),
)


class MinimumMembersValidationPlugin(CaseValidationPlugin):
    """Requires at least four members per case."""

    @staticmethod
    def does_apply(*, requests: Sequence[ScoreRequest]) -> bool:
        return True

    def __init__(self, *, requests: Sequence[ScoreRequest]):
        pass

    def validate(self, *, case: EnsembleCase, dataset: EnsembleDataset) -> None:
        if case.n_members < 4:
            raise ValidationPluginError(
                type_="TooFewMembersError", message="Too few members."
            )


def test_valid_dataset():
    """Test that a matching dataset passes."""
    dataset = load_and_validate(
        UNIVARIATE_FORECASTS,
        requests=[ScoreRequest()],
        observations=UNIVARIATE_OBSERVATIONS,
    )
    assert len(dataset.cases) == 3


def test_univariate_score_on_multivariate_data():
    """Test that the CRPS is only requested for univariate datasets."""
    with pytest.raises(ValidationError) as exception_info:
        load_and_validate(
            BIVARIATE_FORECASTS,
            requests=[ScoreRequest()],
            observations=BIVARIATE_OBSERVATIONS,
        )

    records = exception_info.value.records
    assert [record.type for record in records] == ["UnivariateScoreError"]
    assert records[0].case_id is None


def test_request_dimension():
    """Test that weights must fit the dimension of the dataset."""
    dataset = read_ensemble_csv(BIVARIATE_FORECASTS, BIVARIATE_OBSERVATIONS)
    validator = DatasetValidator(requests=[ENERGY_WITH_UNIVARIATE_WEIGHT])
    with pytest.raises(ValidationError) as exception_info:
        validator.validate(dataset=dataset)

    records = exception_info.value.records
    assert [record.type for record in records] == ["RequestDimensionError"]
    assert "energy/outcome" in records[0].details["mismatches"]


def test_missing_observations():
    """Test that every case without an observation is reported."""
    dataset = read_ensemble_csv(UNIVARIATE_FORECASTS)
    validator = DatasetValidator(requests=[ScoreRequest()])
    with pytest.raises(ValidationError) as exception_info:
        validator.validate(dataset=dataset)

    records = exception_info.value.records
    assert [record.case_id for record in records] == ["c1", "c2", "c3"]
    assert {record.type for record in records} == {"MissingObservationError"}


def test_case_plugins_skipped_after_global_failure():
    """Test that case plugins only run on datasets passing the global checks."""
    dataset = read_ensemble_csv(BIVARIATE_FORECASTS)
    validator = DatasetValidator(requests=[ScoreRequest()])
    with pytest.raises(ValidationError) as exception_info:
        validator.validate(dataset=dataset)

    assert len(exception_info.value.records) == 1


def test_additional_plugin():
    """Test running a custom case plugin next to the default ones."""
    dataset = read_ensemble_csv(UNIVARIATE_FORECASTS, UNIVARIATE_OBSERVATIONS)
    validator = DatasetValidator(
        requests=[ScoreRequest()],
        add_case_plugins=[MinimumMembersValidationPlugin],
    )
    with pytest.raises(ValidationError) as exception_info:
        validator.validate(dataset=dataset)

    records = exception_info.value.records
    assert len(records) == 3
    assert {record.type for record in records} == {"TooFewMembersError"}
    assert "Validation failed with 3 issue(s)" in str(exception_info.value)
