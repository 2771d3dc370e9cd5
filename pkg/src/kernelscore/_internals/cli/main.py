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

"""Describes a command line interface"""

import sys
from pathlib import Path
from typing import Annotated

import click
import typer

from kernelscore import __version__
from kernelscore._internals.cli import exit_codes
from kernelscore._internals.cli.exception_handling import expect_common_user_errors
from kernelscore._internals.cli.printing import (
    configure_logging,
    print_final_success,
    print_output,
)
from kernelscore._internals.config import load_run_config
from kernelscore._internals.dump import (
    aggregate_table,
    dm_table,
    dumps_csv,
    ensemble_table,
    histogram_table,
    rejection_table,
    scores_table,
    write_csv,
)
from kernelscore._internals.exceptions import ConfigError
from kernelscore._internals.load import (
    DataFormat,
    ingest,
    load_csgd_params,
    read_training_csv,
)
from kernelscore._internals.main import (
    compare_datasets,
    fit_csgd_by_dimension,
    load_and_validate,
    reorder_dataset,
    score_all,
)
from kernelscore._internals.models.postproc import CopulaKind
from kernelscore._internals.simstudy import run_experiment
from kernelscore._internals.utils import (
    dumps_dict,
    model_to_serializable_dict,
    write_dict,
)
from kernelscore._internals.verification import (
    multivariate_rank_histogram,
    rank_histogram,
    rank_histogram_uniformity,
)

cli = typer.Typer()

ForecastsOption = Annotated[
    Path,
    typer.Option(
        "--forecasts", "-f", help="The forecast file (CSV long format or JSON Lines)."
    ),
]
ObservationsOption = Annotated[
    Path | None,
    typer.Option(
        "--observations",
        "-o",
        help="A CSV file of observations (case_id, dim_1, ..., dim_d).",
    ),
]
FormatOption = Annotated[
    DataFormat, typer.Option("--format", help="The encoding of the forecast file.")
]
ConfigOption = Annotated[
    Path | None,
    typer.Option("--config", "-c", help="A YAML or JSON run configuration."),
]
SeedOption = Annotated[
    int | None,
    typer.Option(
        "--seed",
        min=0,
        help="Seed for random operations; overrides configuration and environment.",
    ),
]
JsonOption = Annotated[
    bool, typer.Option("--json", "-j", help="Output JSON instead of CSV or YAML.")
]


def _emit_csv(table, *, path: Path | None) -> None:
    """Write a table to a file or to stdout."""
    if path is None:
        print_output(dumps_csv(table).rstrip("\n"))
    else:
        write_csv(table, path=path)


def version_callback(
    version: bool = False,
):
    if version:
        print_output(__version__)
        raise typer.Exit(exit_codes.SUCCESS)


@cli.callback()
def common(
    ctx: typer.Context,
    version: Annotated[
        bool,
        typer.Option(
            "--version",
            callback=version_callback,
            help="Show the version of the library and exit.",
        ),
    ] = False,
    verbose: Annotated[
        int,
        typer.Option(
            "--verbose",
            "-v",
            count=True,
            help="Log progress to stderr; repeat for debug messages.",
        ),
    ] = 0,
):
    """Common arguments and options."""
    configure_logging(verbose)


@cli.command()
def score(
    *,
    forecasts: ForecastsOption,
    observations: ObservationsOption = None,
    data_format: FormatOption = DataFormat.CSV,
    config: ConfigOption = None,
    out: Annotated[
        Path | None,
        typer.Option(
            "--out",
            help=(
                "Directory for scores.csv and aggregate.csv. The aggregate is"
                " written to stdout if omitted."
            ),
        ),
    ] = None,
):
    """Score ensemble forecasts with the scores of the run configuration."""
    with expect_common_user_errors():
        run_config = load_run_config(config)
        dataset = load_and_validate(
            forecasts,
            requests=run_config.scores,
            data_format=data_format,
            observations=observations,
        )
        results = score_all(dataset, run_config.scores)
        aggregate = aggregate_table(results)
        if out is None:
            _emit_csv(aggregate, path=None)
            return
        write_csv(scores_table(results, dataset.case_ids), path=out / "scores.csv")
        write_csv(aggregate, path=out / "aggregate.csv")

    print_final_success(f"Scores written to '{out}'.")


@cli.command()
def compare(
    *,
    forecasts: ForecastsOption,
    forecasts_b: Annotated[
        Path,
        typer.Option(
            "--forecasts-b", "-b", help="The competing forecast file, same format."
        ),
    ],
    observations: ObservationsOption = None,
    data_format: FormatOption = DataFormat.CSV,
    config: ConfigOption = None,
    out: Annotated[
        Path | None,
        typer.Option(
            "--out", help="Directory for dm.csv. Written to stdout if omitted."
        ),
    ] = None,
):
    """Compare two forecasts of the same cases with Diebold-Mariano tests. Lower
    scores are better.
    """
    with expect_common_user_errors():
        run_config = load_run_config(config)
        dataset_a, dataset_b = (
            load_and_validate(
                path,
                requests=run_config.scores,
                data_format=data_format,
                observations=observations,
            )
            for path in (forecasts, forecasts_b)
        )
        comparisons = compare_datasets(
            dataset_a,
            dataset_b,
            run_config.scores,
            level=run_config.level,
            lag=run_config.hac_lag,
        )
        _emit_csv(dm_table(comparisons), path=out and out / "dm.csv")

    if out is not None:
        print_final_success(f"Comparison written to '{out}'.")


@cli.command()
def rankhist(
    *,
    forecasts: ForecastsOption,
    observations: ObservationsOption = None,
    data_format: FormatOption = DataFormat.CSV,
    multivariate: Annotated[
        bool,
        typer.Option(
            "--multivariate",
            "-m",
            help="Rank multivariate observations by component-wise dominance.",
        ),
    ] = False,
    json: JsonOption = False,
    config: ConfigOption = None,
    seed: SeedOption = None,
    out: Annotated[
        Path | None,
        typer.Option("--out", help="Output file. Written to stdout if omitted."),
    ] = None,
):
    """Count the ranks of the observations within their ensembles."""
    with expect_common_user_errors():
        run_config = load_run_config(config, seed=seed)
        dataset = load_and_validate(
            forecasts, data_format=data_format, observations=observations
        )
        histogram_of = multivariate_rank_histogram if multivariate else rank_histogram
        histogram = histogram_of(dataset, seed=run_config.seed)
        uniformity = rank_histogram_uniformity(histogram)

        if not json:
            _emit_csv(histogram_table(histogram), path=out)
            return
        result = {
            "histogram": model_to_serializable_dict(histogram),
            "uniformity": model_to_serializable_dict(uniformity),
        }
        if out is None:
            print_output(dumps_dict(result, yaml_format=False))
        else:
            write_dict(result, path=out, yaml_format=False)


@cli.command()
def simulate(
    *,
    config: Annotated[
        Path,
        typer.Option(
            "--config", "-c", help="A run configuration with an experiment section."
        ),
    ],
    seed: SeedOption = None,
    out: Annotated[
        Path | None,
        typer.Option(
            "--out",
            help="Directory for rejection_rates.csv. Written to stdout if omitted.",
        ),
    ] = None,
):
    """Run the mixture-forecast experiment and tabulate the directional rejection
    rates of every score and weighting mode per threshold.
    """
    with expect_common_user_errors():
        run_config = load_run_config(config, seed=seed)
        if run_config.experiment is None:
            raise ConfigError("The simulate command needs an 'experiment' section.")
        experiment = run_config.experiment
        if "seed" in run_config.model_fields_set:
            experiment = experiment.model_copy(update={"seed": run_config.seed})
        result = run_experiment(experiment)
        _emit_csv(rejection_table(result), path=out and out / "rejection_rates.csv")

    if out is not None:
        print_final_success(f"Rejection rates written to '{out}'.")


@cli.command()
def fit_csgd(
    *,
    training: Annotated[
        Path,
        typer.Option(
            "--training",
            "-t",
            help="Training CSV with case_id, xbar, s, y and an optional dim column.",
        ),
    ],
    config: ConfigOption = None,
    seed: SeedOption = None,
    json: JsonOption = False,
    out: Annotated[
        Path | None,
        typer.Option("--out", help="Output file. Written to stdout if omitted."),
    ] = None,
):
    """Fit censored shifted Gamma regressions, one per dimension of the training
    data.
    """
    with expect_common_user_errors():
        run_config = load_run_config(config, seed=seed)
        fits = fit_csgd_by_dimension(
            read_training_csv(training), seed=run_config.seed
        )
        result = {label: model_to_serializable_dict(fit) for label, fit in fits.items()}
        if out is None:
            print_output(dumps_dict(result, yaml_format=not json))
            return
        write_dict(result, path=out, yaml_format=not json)

    print_final_success(f"Coefficients written to '{out}'.")


@cli.command()
def reorder(
    *,
    forecasts: ForecastsOption,
    params: Annotated[
        Path,
        typer.Option(
            "--params", "-p", help="CSGD coefficients as written by fit-csgd."
        ),
    ],
    copula: Annotated[
        CopulaKind,
        typer.Option("--copula", help="The copula that combines the margins."),
    ],
    members: Annotated[
        int | None,
        typer.Option(
            "--members",
            "-M",
            min=1,
            help="Size of the post-processed ensembles; the raw size if omitted.",
        ),
    ] = None,
    observations: ObservationsOption = None,
    data_format: FormatOption = DataFormat.CSV,
    config: ConfigOption = None,
    seed: SeedOption = None,
    out: Annotated[
        Path | None,
        typer.Option("--out", help="Output CSV file. Written to stdout if omitted."),
    ] = None,
):
    """Post-process raw ensembles: CSGD quantiles per dimension, combined into
    multivariate members by a copula.
    """
    with expect_common_user_errors():
        run_config = load_run_config(config, seed=seed)
        dataset = ingest(forecasts, data_format, observations=observations)
        ensembles = reorder_dataset(
            dataset,
            load_csgd_params(params),
            copula,
            members=members,
            correlation=run_config.correlation,
            mode=run_config.copula_mode,
            max_grid_size=run_config.max_grid_size,
            seed=run_config.seed,
        )
        _emit_csv(ensemble_table(dataset.case_ids, ensembles), path=out)

    if out is not None:
        print_final_success(f"Post-processed ensembles written to '{out}'.")


def run():
    """Console entrypoint. Command-line usage errors exit with the usage error
    code.
    """
    try:
        code = cli(standalone_mode=False)
    except click.ClickException as error:
        error.show()
        sys.exit(exit_codes.USAGE_ERROR)
    except click.Abort:
        sys.exit(exit_codes.USAGE_ERROR)
    sys.exit(code if isinstance(code, int) else exit_codes.SUCCESS)
