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

"""Tests the command line interface.

Please note, these tests will just shallowly test that the cli commands can be called
and produce the expected output. Deeper testing is done on the python API (to avoid
redundancy of tests).
"""

import json
import sys
from pathlib import Path

import pytest
from typer.testing import CliRunner

from kernelscore import __version__ as kernelscore_version
from kernelscore._internals.cli import cli, run
from kernelscore.cli import exit_codes
from tests.fixtures.examples import (
    BIVARIATE_FORECASTS,
    BIVARIATE_OBSERVATIONS,
    CSGD_PARAMS,
    DATA_DIR,
    ENERGY_CONFIG,
    INVALID_CONFIG,
    MIXED_SIZE_FORECASTS,
    PARTIAL_FORECASTS,
    REORDER_CONFIG,
    RUN_CONFIG,
    SHIFTED_FORECASTS,
    SHORT_TRAINING,
    SIMULATE_CONFIG,
    TRAINING,
    UNIVARIATE_FORECASTS,
    UNIVARIATE_JSONL,
    UNIVARIATE_OBSERVATIONS,
    UNIVARIATE_WEIGHT_CONFIG,
)
from tests.fixtures.utils import (
    assert_formatted_string,
    loads_csv,
    loads_json_or_yaml_mapping,
)

runner = CliRunner()

UNIVARIATE_DATA = [
    "-f",
    str(UNIVARIATE_FORECASTS),
    "-o",
    str(UNIVARIATE_OBSERVATIONS),
]
BIVARIATE_DATA = [
    "-f",
    str(BIVARIATE_FORECASTS),
    "-o",
    str(BIVARIATE_OBSERVATIONS),
]


def test_version():
    """Test the version option."""
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == exit_codes.SUCCESS == 0
    assert result.stdout.strip() == str(kernelscore_version)


def test_score():
    """Test the score command printing the aggregate to stdout."""
    result = runner.invoke(cli, ["score", *UNIVARIATE_DATA, "-c", str(RUN_CONFIG)])
    assert result.exit_code == exit_codes.SUCCESS == 0

    aggregate = loads_csv(result.stdout)
    assert aggregate["score"].tolist() == ["crps", "owcrps", "twcrps"]
    assert aggregate.loc[0, "mean"] == pytest.approx(49 / 54)
    assert aggregate.loc[1, "n_undefined"] == 2


def test_score_to_directory(tmp_path: Path):
    """Test the score command writing per-case scores and the aggregate."""
    result = runner.invoke(cli, ["score", *UNIVARIATE_DATA, "--out", str(tmp_path)])
    assert result.exit_code == exit_codes.SUCCESS == 0

    scores = loads_csv((tmp_path / "scores.csv").read_text(encoding="utf-8"))
    assert scores["case_id"].tolist() == ["c1", "c2", "c3"]
    assert (tmp_path / "aggregate.csv").exists()


def test_score_jsonl():
    """Test reading forecasts and observations from JSON Lines."""
    result = runner.invoke(
        cli, ["score", "-f", str(UNIVARIATE_JSONL), "--format", "jsonl"]
    )
    assert result.exit_code == exit_codes.SUCCESS == 0
    assert loads_csv(result.stdout).loc[0, "mean"] == pytest.approx(49 / 54)


def test_score_multivariate():
    """Test multivariate scores on bivariate data."""
    result = runner.invoke(cli, ["score", *BIVARIATE_DATA, "-c", str(ENERGY_CONFIG)])
    assert result.exit_code == exit_codes.SUCCESS == 0
    assert len(loads_csv(result.stdout)) == 3


@pytest.mark.parametrize(
    "args, exit_code, error_name",
    [
        (BIVARIATE_DATA, exit_codes.DATA_ERROR, "ValidationError"),
        (
            [*BIVARIATE_DATA, "-c", str(UNIVARIATE_WEIGHT_CONFIG)],
            exit_codes.DATA_ERROR,
            "ValidationError",
        ),
        (
            ["-f", str(DATA_DIR / "invalid_value.forecasts.csv")],
            exit_codes.DATA_ERROR,
            "DatasetFormatError",
        ),
        (
            [*UNIVARIATE_DATA, "-c", str(INVALID_CONFIG)],
            exit_codes.USAGE_ERROR,
            "ConfigError",
        ),
        (
            ["-f", str(DATA_DIR / "missing.forecasts.csv")],
            exit_codes.USAGE_ERROR,
            "FileNotFoundError",
        ),
        (
            [
                "-f",
                str(UNIVARIATE_JSONL),
                "--format",
                "jsonl",
                "-o",
                str(UNIVARIATE_OBSERVATIONS),
            ],
            exit_codes.USAGE_ERROR,
            "ConfigError",
        ),
    ],
    ids=[
        "univariate_score",
        "request_dimension",
        "invalid_value",
        "invalid_config",
        "missing_file",
        "jsonl_with_observations",
    ],
)
def test_score_errors(args: list[str], exit_code: int, error_name: str):
    """Test that errors are reported with their exit code."""
    result = runner.invoke(cli, ["score", *args])
    assert result.exit_code == exit_code != 0
    assert error_name in result.stderr


def test_compare():
    """Test comparing a forecast with a shifted copy of it."""
    result = runner.invoke(
        cli, ["compare", *UNIVARIATE_DATA, "-b", str(SHIFTED_FORECASTS)]
    )
    assert result.exit_code == exit_codes.SUCCESS == 0

    table = loads_csv(result.stdout)
    assert table["direction"].tolist() == ["favors_a"]
    assert table["n"].tolist() == [3]


def test_compare_unknown_case():
    """Test comparing forecasts of different cases."""
    result = runner.invoke(
        cli, ["compare", *UNIVARIATE_DATA, "-b", str(PARTIAL_FORECASTS)]
    )
    assert result.exit_code == exit_codes.DATA_ERROR != 0
    assert "UnknownCaseError" in result.stderr


def test_compare_lag_too_large():
    """Test that a Newey-West lag needs more cases than lags."""
    result = runner.invoke(
        cli,
        ["compare", *UNIVARIATE_DATA, "-b", str(SHIFTED_FORECASTS)],
        env={"KERNELSCORE_HAC_LAG": "3"},
    )
    assert result.exit_code == exit_codes.DATA_ERROR != 0
    assert "InsufficientDataError" in result.stderr


def test_rankhist():
    """Test the rank histogram as CSV table."""
    result = runner.invoke(cli, ["rankhist", *UNIVARIATE_DATA])
    assert result.exit_code == exit_codes.SUCCESS == 0

    table = loads_csv(result.stdout)
    assert table["rank"].tolist() == [1, 2, 3, 4]
    assert table["count"].sum() == 3


def test_rankhist_mixed_ensemble_sizes():
    """Test that cases with different ensemble sizes are rejected as data error."""
    result = runner.invoke(
        cli,
        [
            "rankhist",
            "-f",
            str(MIXED_SIZE_FORECASTS),
            "-o",
            str(UNIVARIATE_OBSERVATIONS),
        ],
    )
    assert result.exit_code == exit_codes.DATA_ERROR != 0
    assert "EnsembleSizeMismatchError" in result.stderr


def test_rankhist_json():
    """Test the rank histogram and the uniformity test as JSON."""
    result = runner.invoke(cli, ["rankhist", *UNIVARIATE_DATA, "--json", "--seed", "1"])
    assert result.exit_code == exit_codes.SUCCESS == 0
    assert_formatted_string(result.stdout, json_format=True)

    output = json.loads(result.stdout)
    assert output["histogram"]["n"] == 3
    assert 0.0 <= output["uniformity"]["p_value"] <= 1.0


def test_rankhist_multivariate():
    """Test the multivariate rank histogram and the dimension check."""
    result = runner.invoke(cli, ["rankhist", *BIVARIATE_DATA, "-m"])
    assert result.exit_code == exit_codes.SUCCESS == 0
    assert loads_csv(result.stdout)["count"].sum() == 2

    result = runner.invoke(cli, ["rankhist", *BIVARIATE_DATA])
    assert result.exit_code == exit_codes.DATA_ERROR != 0
    assert "DimensionMismatchError" in result.stderr


def test_simulate():
    """Test a small simulation experiment."""
    result = runner.invoke(cli, ["simulate", "-c", str(SIMULATE_CONFIG)])
    assert result.exit_code == exit_codes.SUCCESS == 0

    table = loads_csv(result.stdout)
    assert list(table.columns) == ["threshold", "score", "mode", "rate_F1", "rate_F2"]
    assert len(table) == 4
    assert table["rate_F1"].between(0, 1).all()


def test_simulate_without_experiment():
    """Test that the simulate command needs an experiment section."""
    result = runner.invoke(cli, ["simulate", "-c", str(RUN_CONFIG)])
    assert result.exit_code == exit_codes.USAGE_ERROR != 0
    assert "ConfigError" in result.stderr


@pytest.mark.parametrize("json_format", [True, False], ids=["json", "yaml"])
def test_fit_csgd(json_format: bool):
    """Test fitting CSGD coefficients."""
    args = ["fit-csgd", "-t", str(TRAINING)] + (["--json"] if json_format else [])
    result = runner.invoke(cli, args)
    assert result.exit_code == exit_codes.SUCCESS == 0
    assert_formatted_string(result.stdout, json_format=json_format)

    output = loads_json_or_yaml_mapping(result.stdout)
    assert list(output) == ["1"]
    assert output["1"]["n_cases"] == 24


def test_fit_csgd_to_file(tmp_path: Path):
    """Test writing fitted coefficients that the reorder command can read."""
    path = tmp_path / "params.yaml"
    result = runner.invoke(cli, ["fit-csgd", "-t", str(TRAINING), "--out", str(path)])
    assert result.exit_code == exit_codes.SUCCESS == 0

    result = runner.invoke(
        cli,
        [
            "reorder",
            "-f",
            str(BIVARIATE_FORECASTS),
            "-p",
            str(path),
            "--copula",
            "independence",
        ],
    )
    assert result.exit_code == exit_codes.SUCCESS == 0


def test_fit_csgd_insufficient_data():
    """Test that too few training cases are reported."""
    result = runner.invoke(cli, ["fit-csgd", "-t", str(SHORT_TRAINING)])
    assert result.exit_code == exit_codes.DATA_ERROR != 0
    assert "InsufficientDataError" in result.stderr


def test_reorder():
    """Test post-processing with the comonotonic copula."""
    args = ["-f", str(BIVARIATE_FORECASTS), "-p", str(CSGD_PARAMS)]
    result = runner.invoke(cli, ["reorder", *args, "--copula", "comonotonic"])
    assert result.exit_code == exit_codes.SUCCESS == 0

    table = loads_csv(result.stdout)
    assert list(table.columns) == ["case_id", "member", "dim_1", "dim_2"]
    assert len(table) == 6


def test_reorder_gaussian_weights():
    """Test the weight mode of the Gaussian copula from the run configuration."""
    args = ["-f", str(BIVARIATE_FORECASTS), "-p", str(CSGD_PARAMS)]
    result = runner.invoke(
        cli, ["reorder", *args, "--copula", "gaussian", "-c", str(REORDER_CONFIG)]
    )
    assert result.exit_code == exit_codes.SUCCESS == 0

    table = loads_csv(result.stdout)
    assert len(table) == 18
    assert table.groupby("case_id")["weight"].sum().to_numpy() == pytest.approx(1.0)


def test_reorder_ecc_size():
    """Test that ECC cannot change the ensemble size."""
    args = ["-f", str(BIVARIATE_FORECASTS), "-p", str(CSGD_PARAMS)]
    result = runner.invoke(cli, ["reorder", *args, "--copula", "ecc", "-M", "5"])
    assert result.exit_code == exit_codes.USAGE_ERROR != 0
    assert "ConfigError" in result.stderr


@pytest.mark.parametrize(
    "argv, exit_code",
    [
        (["--version"], exit_codes.SUCCESS),
        (["score"], exit_codes.USAGE_ERROR),
        (["score", *UNIVARIATE_DATA, "--seed", "1"], exit_codes.USAGE_ERROR),
    ],
    ids=["version", "missing_option", "deterministic_command_without_seed"],
)
def test_run(monkeypatch: pytest.MonkeyPatch, argv: list[str], exit_code: int):
    """Test the console entrypoint and its exit codes."""
    monkeypatch.setattr(sys, "argv", ["kernelscore", *argv])
    with pytest.raises(SystemExit) as exception_info:
        run()

    assert exception_info.value.code == exit_code
