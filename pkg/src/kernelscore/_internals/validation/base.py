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

"""Base classes for defining validation plugins."""

from abc import ABC, abstractmethod
from collections.abc import Sequence

from kernelscore._internals.models.dataset import EnsembleCase, EnsembleDataset
from kernelscore._internals.models.scores import ScoreRequest


class GlobalValidationPlugin(ABC):
    """Abstract class for a plugin that checks an ensemble dataset as a whole with
    respect to the requested scores.

    Please note:
    A ValidationPlugin should always just check for one single aspect of validation.
    The "global" scope means that the plugin does not look at individual cases but
    at properties shared by the entire dataset, like its dimension.
    """

    @staticmethod
    @abstractmethod
    def does_apply(*, requests: Sequence[ScoreRequest]) -> bool:
        """Check whether this validation plugin is relevant for the given score
        requests.

        Returns: True if this plugin is relevant for the given requests.
        """
        raise NotImplementedError

    @abstractmethod
    def __init__(self, *, requests: Sequence[ScoreRequest]):
        """This plugin is configured with all score requests."""
        raise NotImplementedError

    @abstractmethod
    def validate(self, *, dataset: EnsembleDataset):
        """Validate the entire dataset.

        Raises:
            kernelscore.exceptions.ValidationPluginError: If validation fails.
        """
        raise NotImplementedError


class CaseValidationPlugin(ABC):
    """Abstract class for a plugin that checks every case of an ensemble dataset
    individually.
    """

    @staticmethod
    @abstractmethod
    def does_apply(*, requests: Sequence[ScoreRequest]) -> bool:
        """Check whether this validation plugin is relevant for the given score
        requests.

        Returns: True if this plugin is relevant for the given requests.
        """
        raise NotImplementedError

    @abstractmethod
    def __init__(self, *, requests: Sequence[ScoreRequest]):
        """This plugin is configured with all score requests."""
        raise NotImplementedError

    @abstractmethod
    def validate(self, *, case: EnsembleCase, dataset: EnsembleDataset) -> None:
        """Validate a single case. The entire dataset is provided for checks that
        relate a case to the others.

        Raises:
            kernelscore.exceptions.ValidationPluginError: If validation fails.
        """
        raise NotImplementedError
