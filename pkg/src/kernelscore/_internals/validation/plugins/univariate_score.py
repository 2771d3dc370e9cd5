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
from kernelscore._internals.models.dataset import EnsembleDataset
from kernelscore._internals.models.scores import ScoreRequest
from kernelscore._internals.validation.base import GlobalValidationPlugin

UNIVARIATE_FAMILIES = frozenset({"crps"})


class UnivariateScoreValidationPlugin(GlobalValidationPlugin):
    """A global-scoped validation plugin validating that scores that only exist for
    univariate outcomes, like the CRPS, are only requested for univariate datasets.
    """

    @staticmethod
    def does_apply(*, requests: Sequence[ScoreRequest]) -> bool:
        """Only relevant if a univariate score is requested.

        Returns: True if any request uses a univariate score family.
        """
        return any(request.family.kind in UNIVARIATE_FAMILIES for request in requests)

    def __init__(self, *, requests: Sequence[ScoreRequest]):
        """This plugin is configured with all score requests."""
        self._names = [
            request.name
            for request in requests
            if request.family.kind in UNIVARIATE_FAMILIES
        ]

    def validate(self, *, dataset: EnsembleDataset):
        """Validate the entire dataset.

        Raises:
            kernelscore.exceptions.ValidationPluginError: If validation fails.
        """
        if dataset.dimension != 1:
            raise ValidationPluginError(
                type_="UnivariateScoreError",
                message=(
                    "The score(s) "
                    + ", ".join(self._names)
                    + " need univariate outcomes, the dataset has dimension"
                    + f" {dataset.dimension}."
                ),
                details={"scores": self._names, "dimension": dataset.dimension},
            )
