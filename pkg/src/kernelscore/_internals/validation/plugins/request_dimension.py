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

from kernelscore._internals.exceptions import (
    DimensionMismatchError,
    ValidationPluginError,
)
from kernelscore._internals.models.dataset import EnsembleDataset
from kernelscore._internals.models.scores import ScoreRequest
from kernelscore._internals.scores import check_request_dimension
from kernelscore._internals.validation.base import GlobalValidationPlugin
from kernelscore._internals.validation.plugins.univariate_score import (
    UNIVARIATE_FAMILIES,
)


class RequestDimensionValidationPlugin(GlobalValidationPlugin):
    """A global-scoped validation plugin validating that the kernels, weights,
    chainings and centers of all requests fit the dimension of the dataset.

    Univariate score families are left to the UnivariateScoreValidationPlugin.
    """

    @staticmethod
    def does_apply(*, requests: Sequence[ScoreRequest]) -> bool:
        """Relevant for every request that is not restricted to univariate outcomes.

        Returns: True if there is such a request.
        """
        return any(
            request.family.kind not in UNIVARIATE_FAMILIES for request in requests
        )

    def __init__(self, *, requests: Sequence[ScoreRequest]):
        """This plugin is configured with all score requests."""
        self._requests = [
            request
            for request in requests
            if request.family.kind not in UNIVARIATE_FAMILIES
        ]

    def validate(self, *, dataset: EnsembleDataset):
        """Validate the entire dataset.

        Raises:
            kernelscore.exceptions.ValidationPluginError: If validation fails.
        """
        mismatches: dict[str, str] = {}
        for request in self._requests:
            try:
                check_request_dimension(request, dataset.dimension)
            except DimensionMismatchError as error:
                mismatches[f"{request.name}/{request.mode}"] = str(error)

        if mismatches:
            raise ValidationPluginError(
                type_="RequestDimensionError",
                message=(
                    "Score request(s) do not fit the dataset: "
                    + " ".join(
                        f"{name}: {message}" for name, message in mismatches.items()
                    )
                ),
                details={"mismatches": mismatches},
            )
