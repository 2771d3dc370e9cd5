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

"""A validation plugin."""

from collections.abc import Sequence

from kernelscore._internals.exceptions import ValidationPluginError
from kernelscore._internals.models.dataset import EnsembleCase, EnsembleDataset
from kernelscore._internals.models.scores import ScoreRequest
from kernelscore._internals.validation.base import CaseValidationPlugin


class ObservationPresentValidationPlugin(CaseValidationPlugin):
    """A case-scoped validation plugin validating that every case has an
    observation to score the forecast against.
    """

    @staticmethod
    def does_apply(*, requests: Sequence[ScoreRequest]) -> bool:
        """Scores and rank histograms always need observations.

        Returns: True for all requests.
        """
        return True

    def __init__(self, *, requests: Sequence[ScoreRequest]):
        """This plugin is configured with all score requests."""
        # there is nothing to do

    def validate(self, *, case: EnsembleCase, dataset: EnsembleDataset) -> None:
        """Validate a single case.

        Raises:
            kernelscore.exceptions.ValidationPluginError: If validation fails.
        """
        if case.observation is None:
            raise ValidationPluginError(
                type_="MissingObservationError",
                message=f"Case '{case.case_id}' has no observation.",
            )
