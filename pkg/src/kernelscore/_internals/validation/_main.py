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

"""Logic for running multiple validation plugins on an ensemble dataset with respect
to a set of score requests.
"""

from collections.abc import Sequence

from kernelscore._internals.exceptions import (
    ValidationError,
    ValidationErrorRecord,
    ValidationPluginError,
)
from kernelscore._internals.models.dataset import EnsembleDataset
from kernelscore._internals.models.scores import ScoreRequest
from kernelscore._internals.validation.base import (
    CaseValidationPlugin,
    GlobalValidationPlugin,
)
from kernelscore._internals.validation.default import (
    DEFAULT_CASE_PLUGIN_REGISTRY,
    DEFAULT_GLOBAL_PLUGIN_REGISTRY,
)


def _create_plugins[Plugin: GlobalValidationPlugin | CaseValidationPlugin](
    *, requests: Sequence[ScoreRequest], plugin_classes: list[type[Plugin]]
) -> list[Plugin]:
    """Create instances of all the provided plugins that apply to the given
    requests.
    """
    return [
        cls(requests=requests)
        for cls in plugin_classes
        if cls.does_apply(requests=requests)
    ]


def _plugin_error_to_record(
    error: ValidationPluginError, *, case_id: str | None = None
) -> ValidationErrorRecord:
    """Convert a ValidationPluginError to a ValidationErrorRecord."""
    return ValidationErrorRecord(
        case_id=case_id,
        type=error.type_,
        message=error.message,
        details=error.details,
    )


def _run_global_plugins(
    *, dataset: EnsembleDataset, plugins: list[GlobalValidationPlugin]
) -> list[ValidationErrorRecord]:
    """Run all the given global plugins on the given dataset."""
    records: list[ValidationErrorRecord] = []

    for plugin in plugins:
        try:
            plugin.validate(dataset=dataset)
        except ValidationPluginError as error:
            records.append(_plugin_error_to_record(error))

    return records


def _run_case_plugins(
    *, dataset: EnsembleDataset, plugins: list[CaseValidationPlugin]
) -> list[ValidationErrorRecord]:
    """Run all case plugins on all cases of the given dataset."""
    records: list[ValidationErrorRecord] = []

    for case in dataset.cases:
        for plugin in plugins:
            try:
                plugin.validate(case=case, dataset=dataset)
            except ValidationPluginError as error:
                records.append(_plugin_error_to_record(error, case_id=case.case_id))

    return records


class DatasetValidator:
    """A class for checking that ensemble datasets can be scored with a specific set
    of score requests.
    """

    def __init__(
        self,
        *,
        requests: Sequence[ScoreRequest],
        add_global_plugins: list[type[GlobalValidationPlugin]] | None = None,
        add_case_plugins: list[type[CaseValidationPlugin]] | None = None,
    ):
        """Initialize with the score requests.

        Args:
            requests:
                The scores the datasets will be evaluated with.
            add_global_plugins:
                Global validation plugins to use in addition to the default ones.
            add_case_plugins:
                Case validation plugins to use in addition to the default ones.
        """
        self._global_plugins = _create_plugins(
            requests=requests,
            plugin_classes=DEFAULT_GLOBAL_PLUGIN_REGISTRY + (add_global_plugins or []),
        )
        self._case_plugins = _create_plugins(
            requests=requests,
            plugin_classes=DEFAULT_CASE_PLUGIN_REGISTRY + (add_case_plugins or []),
        )

    def validate(self, *, dataset: EnsembleDataset):
        """Validate the given dataset. Global plugins are run first; case plugins
        only run if the global plugins found no issue.

        Raises:
            kernelscore.exceptions.ValidationError: If any validation issues are found.
        """
        error_records = _run_global_plugins(
            dataset=dataset, plugins=self._global_plugins
        )

        if not error_records:
            error_records.extend(
                _run_case_plugins(dataset=dataset, plugins=self._case_plugins)
            )

        if error_records:
            raise ValidationError(records=error_records)
