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

"""Loading ensemble datasets, training data and fitted coefficients.

Warning: This is an internal part of the library and might change without notice.
"""

import json
import logging
import re
from enum import StrEnum
from pathlib import Path
from typing import Any

import jsonschema
import numpy as np
import pandas as pd
import pydantic

from kernelscore._internals.exceptions import (
    ConfigError,
    DatasetFormatError,
    ParsingError,
    UnknownCaseError,
)
from kernelscore._internals.models.dataset import EnsembleCase, EnsembleDataset
from kernelscore._internals.models.postproc import CsgdFitResult
from kernelscore._internals.utils import read_json_or_yaml_mapping

log = logging.getLogger(__name__)

DIMENSION_COLUMN = re.compile(r"^dim_(\d+)$")

ENSEMBLE_CASE_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "id": {"type": ["string", "integer"]},
        "ensemble": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "array", "minItems": 1, "items": {"type": "number"}},
        },
        "obs": {"type": "array", "minItems": 1, "items": {"type": "number"}},
        "weights": {"type": "array", "minItems": 1, "items": {"type": "number"}},
    },
    "required": ["id", "ensemble"],
    "additionalProperties": False,
}
_CASE_VALIDATOR = jsonschema.Draft202012Validator(ENSEMBLE_CASE_SCHEMA)


class DataFormat(StrEnum):
    """Supported encodings of ensemble datasets."""

    CSV = "csv"
    JSONL = "jsonl"


def _line(index: int) -> int:
    """The 1-based file line of a data frame row, the header being line 1."""
    return int(index) + 2


def _read_csv(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(path, dtype={"case_id": str}, float_precision="round_trip")
    except (
        pd.errors.ParserError,
        pd.errors.EmptyDataError,
        UnicodeDecodeError,
    ) as error:
        raise ParsingError(
            f"The file at '{path}' could not be parsed as CSV."
        ) from error


def _require_columns(frame: pd.DataFrame, columns: list[str], path: Path) -> None:
    missing = [column for column in columns if column not in frame.columns]
    if missing:
        raise DatasetFormatError(
            "missing column(s) " + ", ".join(missing) + ".", path=path, line=1
        )


def _dimension_columns(frame: pd.DataFrame, path: Path) -> list[str]:
    """The columns dim_1, ..., dim_d in order."""
    numbers = sorted(
        int(match.group(1))
        for column in frame.columns
        if (match := DIMENSION_COLUMN.match(str(column)))
    )
    if not numbers:
        raise DatasetFormatError("missing column(s) dim_1.", path=path, line=1)
    if numbers != list(range(1, len(numbers) + 1)):
        raise DatasetFormatError(
            "dimension columns must be dim_1, ..., dim_d without gaps.",
            path=path,
            line=1,
        )
    return [f"dim_{number}" for number in numbers]


def _numeric(frame: pd.DataFrame, column: str, path: Path) -> pd.Series:
    """A column as floats. Missing or non-numeric entries are reported with their
    line.
    """
    values = pd.to_numeric(frame[column], errors="coerce")
    invalid = values.isna() | ~np.isfinite(values.to_numpy(dtype=float))
    if invalid.any():
        index = invalid.idxmax()
        raise DatasetFormatError(
            f"column '{column}' needs a finite number, got"
            + f" '{frame.at[index, column]}'.",
            path=path,
            line=_line(index),
        )
    return values.astype(float)


def _check_case_ids(frame: pd.DataFrame, path: Path) -> None:
    missing = frame["case_id"].isna()
    if missing.any():
        raise DatasetFormatError(
            "case_id must not be empty.", path=path, line=_line(missing.idxmax())
        )


def _build_case(
    *, path: Path, line: int | None, **fields: Any
) -> EnsembleCase:
    try:
        return EnsembleCase(**fields)
    except pydantic.ValidationError as error:
        message = "; ".join(detail["msg"] for detail in error.errors())
        raise DatasetFormatError(message, path=path, line=line) from error


def _build_dataset(cases: list[EnsembleCase], path: Path) -> EnsembleDataset:
    try:
        return EnsembleDataset(cases=tuple(cases))
    except pydantic.ValidationError as error:
        message = "; ".join(detail["msg"] for detail in error.errors())
        raise DatasetFormatError(message, path=path) from error


def _read_observations(
    path: Path, dimension: int, known: set[str]
) -> dict[str, tuple[float, ...]]:
    frame = _read_csv(path)
    _require_columns(frame, ["case_id"], path)
    _check_case_ids(frame, path)
    columns = _dimension_columns(frame, path)
    if len(columns) != dimension:
        raise DatasetFormatError(
            f"observations have {len(columns)} dimensions, forecasts {dimension}.",
            path=path,
            line=1,
        )
    values = np.column_stack([_numeric(frame, column, path) for column in columns])

    observations: dict[str, tuple[float, ...]] = {}
    for index, case_id in frame["case_id"].items():
        if case_id not in known:
            raise UnknownCaseError(case_id=case_id, path=path, line=_line(index))
        if case_id in observations:
            raise DatasetFormatError(
                f"duplicate observation for case '{case_id}'.",
                path=path,
                line=_line(index),
            )
        observations[case_id] = tuple(values[int(index)].tolist())
    return observations


def read_ensemble_csv(
    forecasts: Path, observations: Path | None = None
) -> EnsembleDataset:
    """Read forecasts in long format (case_id, member, dim_1, ..., dim_d and an
    optional weight column) and optionally join observations (case_id, dim_1, ...,
    dim_d).

    Members are ordered by the member column, cases by first appearance.

    Raises:
        ParsingError: If a file is not valid CSV.
        DatasetFormatError: If columns or values are missing or invalid.
        UnknownCaseError: If an observation has no matching forecast.
    """
    frame = _read_csv(forecasts)
    _require_columns(frame, ["case_id", "member"], forecasts)
    _check_case_ids(frame, forecasts)
    columns = _dimension_columns(frame, forecasts)
    frame["member"] = _numeric(frame, "member", forecasts)
    for column in columns:
        frame[column] = _numeric(frame, column, forecasts)
    has_weights = "weight" in frame.columns
    if has_weights:
        frame["weight"] = _numeric(frame, "weight", forecasts)

    duplicated = frame.duplicated(["case_id", "member"])
    if duplicated.any():
        index = duplicated.idxmax()
        raise DatasetFormatError(
            f"duplicate member {frame.at[index, 'member']:g} in case"
            + f" '{frame.at[index, 'case_id']}'.",
            path=forecasts,
            line=_line(index),
        )

    observed = (
        {}
        if observations is None
        else _read_observations(observations, len(columns), set(frame["case_id"]))
    )

    cases = []
    for case_id, group in frame.groupby("case_id", sort=False):
        group = group.sort_values("member", kind="stable")
        cases.append(
            _build_case(
                path=forecasts,
                line=_line(group.index[0]),
                case_id=str(case_id),
                ensemble=tuple(map(tuple, group[columns].to_numpy().tolist())),
                observation=observed.get(str(case_id)),
                member_weights=(
                    tuple(group["weight"].tolist()) if has_weights else None
                ),
            )
        )
    dataset = _build_dataset(cases, forecasts)
    log.debug("Read %d cases from '%s'.", len(dataset.cases), forecasts)
    return dataset


def read_ensemble_jsonl(path: Path) -> EnsembleDataset:
    """Read one case per line as a JSON object with the keys id, ensemble and
    optionally obs and weights.

    Raises:
        DatasetFormatError: If a line is not valid JSON, violates the schema or the
            dimension differs from the first case.
    """
    cases = []
    dimension: int | None = None
    with path.open("r", encoding="utf-8") as file:
        for line_number, line in enumerate(file, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as error:
                raise DatasetFormatError(
                    f"invalid JSON ({error.msg}).", path=path, line=line_number
                ) from error
            schema_error = jsonschema.exceptions.best_match(
                _CASE_VALIDATOR.iter_errors(record)
            )
            if schema_error is not None:
                raise DatasetFormatError(
                    schema_error.message, path=path, line=line_number
                )
            case = _build_case(
                path=path,
                line=line_number,
                case_id=str(record["id"]),
                ensemble=record["ensemble"],
                observation=record.get("obs"),
                member_weights=record.get("weights"),
            )
            if dimension is None:
                dimension = case.dimension
            elif case.dimension != dimension:
                raise DatasetFormatError(
                    f"case '{case.case_id}' has dimension {case.dimension}, expected"
                    + f" {dimension}.",
                    path=path,
                    line=line_number,
                )
            cases.append(case)
    if not cases:
        raise DatasetFormatError("the file contains no cases.", path=path)
    return _build_dataset(cases, path)


def ingest(
    path: Path,
    data_format: DataFormat | str = DataFormat.CSV,
    *,
    observations: Path | None = None,
) -> EnsembleDataset:
    """Read an ensemble dataset in one of the supported formats.

    Args:
        path: The forecast file.
        data_format: 'csv' or 'jsonl'.
        observations: A CSV file of observations. Only used with the CSV format;
            JSON Lines carry their observations inline.

    Raises:
        ConfigError: If an observation file is given for JSON Lines.
    """
    match DataFormat(data_format):
        case DataFormat.CSV:
            return read_ensemble_csv(path, observations)
        case DataFormat.JSONL:
            if observations is not None:
                raise ConfigError(
                    "Observations are part of JSON Lines files, a separate"
                    + " observation file cannot be used with them."
                )
            return read_ensemble_jsonl(path)
    raise NotImplementedError(f"Unknown format '{data_format}'.")


def read_training_csv(path: Path) -> dict[str, np.ndarray]:
    """Read CSGD training data with the columns case_id, xbar, s, y and an optional
    dim column.

    Returns:
        Rows of (xbar, s, y) per dimension label; the label is '1' without a dim
        column.
    """
    frame = _read_csv(path)
    _require_columns(frame, ["case_id", "xbar", "s", "y"], path)
    values = np.column_stack(
        [_numeric(frame, column, path) for column in ("xbar", "s", "y")]
    )
    if "dim" not in frame.columns:
        return {"1": values}
    labels = frame["dim"].astype(str)
    return {
        label: values[(labels == label).to_numpy()]
        for label in labels.drop_duplicates()
    }


def load_csgd_params(path: Path) -> dict[str, CsgdFitResult]:
    """Load fitted CSGD coefficients per dimension label, as written by fit-csgd."""
    data = read_json_or_yaml_mapping(path)
    try:
        return {
            str(label): CsgdFitResult.model_validate(result)
            for label, result in data.items()
        }
    except pydantic.ValidationError as error:
        message = "; ".join(detail["msg"] for detail in error.errors())
        raise DatasetFormatError(message, path=path) from error
