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

"""Logic for writing scores, test results and ensembles as CSV tables.

Floats are written with 17 significant digits so that values survive a round trip
through the files exactly. Undefined values are written as NA.

Warning: This is an internal part of the library and might change without notice.
"""

from collections.abc import Sequence
from pathlib import Path

import pandas as pd

from kernelscore._internals.models.scores import ScoreResult
from kernelscore._internals.models.simstudy import ExperimentResult
from kernelscore._internals.models.verification import DmTestResult, RankHistogram
from kernelscore._internals.postproc.copula import ReorderedEnsemble

FLOAT_FORMAT = "%.17g"
NA_REP = "NA"


def scores_table(
    results: Sequence[ScoreResult], case_ids: Sequence[str]
) -> pd.DataFrame:
    """One row per score request and case with the columns score, mode, case_id and
    value.
    """
    rows = [
        {"score": result.name, "mode": result.mode, "case_id": case_id, "value": value}
        for result in results
        for case_id, value in zip(case_ids, result.scores, strict=True)
    ]
    return pd.DataFrame(rows, columns=["score", "mode", "case_id", "value"])


def aggregate_table(results: Sequence[ScoreResult]) -> pd.DataFrame:
    """One row per score request with its mean, standard error and the number of
    cases for which the score is undefined.
    """
    columns = ["score", "mode", "mean", "stderr", "n_undefined"]
    rows = [
        {
            "score": result.name,
            "mode": result.mode,
            "mean": result.mean,
            "stderr": result.stderr,
            "n_undefined": result.n_undefined,
        }
        for result in results
    ]
    return pd.DataFrame(rows, columns=columns)


def dm_table(comparisons: Sequence[tuple[str, str, DmTestResult]]) -> pd.DataFrame:
    """One row per compared score, given as (score, mode, result)."""
    columns = ["score", "mode", "statistic", "p_value", "direction", "n"]
    rows = [
        {
            "score": score,
            "mode": mode,
            "statistic": result.statistic,
            "p_value": result.p_value,
            "direction": result.direction,
            "n": result.n,
        }
        for score, mode, result in comparisons
    ]
    return pd.DataFrame(rows, columns=columns)


def histogram_table(histogram: RankHistogram) -> pd.DataFrame:
    """The counts of the ranks 1, ..., M + 1."""
    return pd.DataFrame(
        {
            "rank": range(1, len(histogram.counts) + 1),
            "count": list(histogram.counts),
        }
    )


def rejection_table(result: ExperimentResult) -> pd.DataFrame:
    """Directional rejection rates of every curve at every threshold."""
    rows = [
        {
            "threshold": point.threshold,
            "score": curve.score,
            "mode": curve.mode,
            "rate_F1": point.rate_f1,
            "rate_F2": point.rate_f2,
        }
        for curve in result.curves.values()
        for point in curve.points
    ]
    return pd.DataFrame(
        rows, columns=["threshold", "score", "mode", "rate_F1", "rate_F2"]
    )


def ensemble_table(
    case_ids: Sequence[str], ensembles: Sequence[ReorderedEnsemble]
) -> pd.DataFrame:
    """Ensembles in the long format read by the ingest functions. A weight column is
    added if any ensemble carries member probabilities.
    """
    frames = []
    weighted = any(ensemble.weights is not None for ensemble in ensembles)
    for case_id, ensemble in zip(case_ids, ensembles, strict=True):
        n_members, dimension = ensemble.members.shape
        frame = pd.DataFrame(
            ensemble.members, columns=[f"dim_{j + 1}" for j in range(dimension)]
        )
        frame.insert(0, "member", range(1, n_members + 1))
        frame.insert(0, "case_id", case_id)
        if weighted:
            frame["weight"] = (
                ensemble.weights
                if ensemble.weights is not None
                else 1.0 / n_members
            )
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def dumps_csv(frame: pd.DataFrame) -> str:
    """Render a table as CSV text."""
    return frame.to_csv(
        index=False, float_format=FLOAT_FORMAT, na_rep=NA_REP, lineterminator="\n"
    )


def write_csv(frame: pd.DataFrame, *, path: Path) -> None:
    """Write a table as CSV file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as file:
        file.write(dumps_csv(frame))
