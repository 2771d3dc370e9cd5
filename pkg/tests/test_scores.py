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

"""Tests weighted scoring rules."""

import numpy as np
import pytest
from scipy import stats

from kernelscore import (
    integral_twcrps,
    quantile_twcrps,
    read_ensemble_csv,
    score_case,
    score_dataset,
)
from kernelscore._internals.scores import check_request_dimension
from kernelscore.exceptions import DimensionMismatchError, UnsortedInputError
from kernelscore.models import (
    AboveThresholdWeight,
    CollapseOutsideChaining,
    ComponentwiseMaxChaining,
    CrpsFamily,
    EnergyFamily,
    GaussianCdfWeight,
    HalfSpaceWeight,
    IdentityChaining,
    IntervalWeight,
    InverseMultiquadricFamily,
    MultivariateGaussianCdfWeight,
    OutcomeWeighted,
    OutcomeWeightedComplemented,
    ScoreRequest,
    ThresholdWeighted,
    VariogramFamily,
    VerticallyRescaled,
    WeightIntegralChaining,
)
from tests.fixtures.examples import (
    UNIVARIATE_CRPS,
    UNIVARIATE_FORECASTS,
    UNIVARIATE_OBSERVATIONS,
)

CRPS = ScoreRequest()

UNIVARIATE_REQUESTS = {
    "crps": CRPS,
    "tw_crps": ScoreRequest(
        weighting=ThresholdWeighted(
            chaining=WeightIntegralChaining(weight=AboveThresholdWeight(threshold=0.3))
        )
    ),
    "ow_crps": ScoreRequest(weighting=OutcomeWeighted(weight=GaussianCdfWeight())),
    "owc_crps": ScoreRequest(
        weighting=OutcomeWeightedComplemented(weight=GaussianCdfWeight(mean=0.5))
    ),
    "vr_crps": ScoreRequest(
        weighting=VerticallyRescaled(
            weight=IntervalWeight(lower=-0.5, upper=1.0), center=(0.0,)
        )
    ),
    "ims": ScoreRequest(family=InverseMultiquadricFamily()),
    "vr_ims": ScoreRequest(
        family=InverseMultiquadricFamily(),
        weighting=VerticallyRescaled(weight=GaussianCdfWeight()),
    ),
}

BIVARIATE_REQUESTS = {
    "energy": ScoreRequest(family=EnergyFamily()),
    "energy_beta": ScoreRequest(family=EnergyFamily(beta=0.5)),
    "tw_energy": ScoreRequest(
        family=EnergyFamily(),
        weighting=ThresholdWeighted(chaining=ComponentwiseMaxChaining(threshold=0.0)),
    ),
    "vr_energy": ScoreRequest(
        family=EnergyFamily(),
        weighting=VerticallyRescaled(
            weight=HalfSpaceWeight(coefficients=(1.0, 1.0), threshold=0.0),
            center=(0.0, 0.0),
        ),
    ),
    "ow_energy": ScoreRequest(
        family=EnergyFamily(),
        weighting=OutcomeWeighted(
            weight=MultivariateGaussianCdfWeight(mean=(0.0, 0.0), sd=(1.0, 1.0))
        ),
    ),
    "variogram": ScoreRequest(family=VariogramFamily()),
    "ims": ScoreRequest(family=InverseMultiquadricFamily()),
}


def expected_score(
    request: ScoreRequest, atoms: np.ndarray, forecast: np.ndarray, truth: np.ndarray
) -> float:
    """The expected score of a discrete forecast when outcomes follow truth."""
    return sum(
        probability * score_case(request, atoms, atom, member_weights=forecast)
        for atom, probability in zip(atoms, truth)
    )


@pytest.mark.parametrize(
    "name, dimension",
    [(name, 1) for name in UNIVARIATE_REQUESTS]
    + [(name, 2) for name in BIVARIATE_REQUESTS],
    ids=[f"univariate_{name}" for name in UNIVARIATE_REQUESTS]
    + [f"bivariate_{name}" for name in BIVARIATE_REQUESTS],
)
def test_propriety(name: str, dimension: int):
    """Test that no discrete forecast has a lower expected score than the true
    distribution.
    """
    requests = UNIVARIATE_REQUESTS if dimension == 1 else BIVARIATE_REQUESTS
    request = requests[name]
    rng = np.random.default_rng(42)
    for _ in range(10):
        atoms = rng.normal(size=(6, dimension))
        truth = rng.dirichlet(np.ones(6))
        forecast = rng.dirichlet(np.ones(6))
        assert expected_score(request, atoms, truth, truth) <= (
            expected_score(request, atoms, forecast, truth) + 1e-10
        )


def test_score_dataset_by_hand():
    """Test scoring a dataset against hand-computed values."""
    dataset = read_ensemble_csv(UNIVARIATE_FORECASTS, UNIVARIATE_OBSERVATIONS)
    result = score_dataset(CRPS, dataset)

    expected = [UNIVARIATE_CRPS[case_id] for case_id in dataset.case_ids]
    assert result.scores == pytest.approx(expected, abs=1e-12)
    assert result.mean == pytest.approx(49 / 54, abs=1e-12)
    assert result.stderr == pytest.approx(
        np.std(expected, ddof=1) / np.sqrt(3), abs=1e-12
    )
    assert result.n_undefined == 0
    assert result.name == "crps"
    assert result.mode == "none"


def test_score_dataset_mixed_ensemble_sizes():
    """Test that cases of different ensemble sizes are scored individually."""
    cases = [([0.0, 1.0, 2.0], 1.5), ([1.0, 3.0], 0.0), ([4.0], 4.5), ([1.0, 2.0], 0.0)]
    result = score_dataset(CRPS, cases)
    for (ensemble, y), value in zip(cases, result.scores):
        assert value == pytest.approx(score_case(CRPS, ensemble, y), abs=1e-12)


def test_outcome_weighted_by_hand():
    """Test the outcome-weighted CRPS, which restricts the forecast to the weighted
    region, and its complemented version.
    """
    weight = AboveThresholdWeight(threshold=2.0)
    ow = ScoreRequest(weighting=OutcomeWeighted(weight=weight))
    owc = ScoreRequest(weighting=OutcomeWeightedComplemented(weight=weight))

    # restricted to {3, 5}: E|X - 4.5| = 1 and E|X - X'| / 2 = 0.5
    assert score_case(ow, [1.0, 3.0, 5.0], 4.5) == pytest.approx(0.5)
    # plus the Brier score of the forecast probability 2/3 for the region
    assert score_case(owc, [1.0, 3.0, 5.0], 4.5) == pytest.approx(0.5 + 1 / 9)
    assert score_case(owc, [1.0, 3.0, 5.0], 0.0) == pytest.approx(4 / 9)


@pytest.mark.parametrize(
    "request_, symmetric",
    [
        (
            ScoreRequest(
                weighting=ThresholdWeighted(
                    chaining=WeightIntegralChaining(weight=GaussianCdfWeight())
                )
            ),
            True,
        ),
        (
            ScoreRequest(weighting=VerticallyRescaled(weight=GaussianCdfWeight())),
            True,
        ),
        (ScoreRequest(weighting=OutcomeWeighted(weight=GaussianCdfWeight())), False),
    ],
    ids=["threshold_weighted", "vertically_rescaled", "outcome_weighted"],
)
def test_point_mass_symmetry(request_: ScoreRequest, symmetric: bool):
    """Test whether scoring a point mass at x for y equals scoring a point mass at
    y for x. The outcome-weighted CRPS gives w(y) |x - y| and w(x) |x - y|.
    """
    forward = score_case(request_, [-1.0], 1.0)
    backward = score_case(request_, [1.0], -1.0)
    if symmetric:
        assert forward == pytest.approx(backward, abs=1e-12)
    else:
        assert forward == pytest.approx(2 * stats.norm.cdf(1.0))
        assert backward == pytest.approx(2 * stats.norm.cdf(-1.0))


def test_outcome_weighted_undefined():
    """Test that outcome-weighted scores are undefined if the forecast gives the
    weighted region no probability, except for the complemented score of an
    outcome outside the region.
    """
    weight = AboveThresholdWeight(threshold=4.0)
    ow = ScoreRequest(weighting=OutcomeWeighted(weight=weight))
    owc = ScoreRequest(weighting=OutcomeWeightedComplemented(weight=weight))

    assert score_case(ow, [0.0, 1.0, 2.0], 5.0) is None
    assert score_case(ow, [0.0, 1.0, 2.0], 0.0) is None
    assert score_case(owc, [0.0, 1.0, 2.0], 5.0) is None
    assert score_case(owc, [0.0, 1.0, 2.0], 0.0) == 0.0

    result = score_dataset(ow, [([0.0, 1.0, 2.0], 0.0), ([1.0, 3.0, 5.0], 0.0)])
    assert result.scores == (None, 0.0)
    assert result.n_undefined == 1
    assert result.mean == 0.0
    assert result.stderr is None


@pytest.mark.parametrize(
    "request_",
    [
        ScoreRequest(
            weighting=VerticallyRescaled(
                weight=AboveThresholdWeight(threshold=0.5), center=(0.5,)
            )
        ),
        ScoreRequest(
            weighting=OutcomeWeighted(weight=AboveThresholdWeight(threshold=0.5))
        ),
        ScoreRequest(
            weighting=ThresholdWeighted(
                chaining=CollapseOutsideChaining(
                    weight=AboveThresholdWeight(threshold=0.5), center=(0.5,)
                )
            )
        ),
    ],
    ids=["vertical", "outcome", "threshold_collapse"],
)
def test_localising_scores(request_: ScoreRequest):
    """Test that moving members within the region of zero weight does not change a
    localising score.
    """
    rng = np.random.default_rng(5)
    for _ in range(10):
        ensemble = rng.normal(size=20)
        y = float(rng.normal())
        moved = np.where(ensemble < 0.5, ensemble - rng.uniform(0, 3, 20), ensemble)
        assert score_case(request_, moved, y) == pytest.approx(
            score_case(request_, ensemble, y), abs=1e-12
        )


def test_componentwise_max_is_not_localising():
    """Test that component-wise maximum chaining is not localising for a half-space
    weight: members outside the half space affect the score.
    """
    request = ScoreRequest(
        family=EnergyFamily(),
        weighting=ThresholdWeighted(chaining=ComponentwiseMaxChaining(threshold=0.0)),
    )
    region = HalfSpaceWeight(coefficients=(1.0, 1.0), threshold=0.0)
    outside, moved = (-3.0, 1.0), (1.0, -3.0)
    assert np.dot(region.coefficients, outside) < region.threshold
    assert np.dot(region.coefficients, moved) < region.threshold

    ensemble = [[1.0, 1.0], [0.5, 2.0], outside]
    perturbed = [[1.0, 1.0], [0.5, 2.0], moved]
    y = [1.5, 0.5]
    assert score_case(request, ensemble, y) != pytest.approx(
        score_case(request, perturbed, y)
    )


@pytest.mark.parametrize(
    "weight",
    [
        AboveThresholdWeight(threshold=0.5),
        IntervalWeight(lower=-1.0, upper=1.0),
        GaussianCdfWeight(mean=0.3, sd=1.5),
    ],
    ids=["above", "interval", "gaussian_cdf"],
)
def test_kernel_twcrps_matches_integral(weight):
    """Test the kernel form of the threshold-weighted CRPS against the weighted
    integral of the squared distribution function difference.
    """
    rng = np.random.default_rng(7)
    request = ScoreRequest(
        weighting=ThresholdWeighted(chaining=WeightIntegralChaining(weight=weight))
    )
    for _ in range(5):
        ensemble = rng.normal(size=12)
        y = float(rng.normal())
        assert score_case(request, ensemble, y) == pytest.approx(
            integral_twcrps(ensemble, y, weight), abs=1e-7
        )


def test_twcrps_identity_equals_crps():
    """Test that the identity chaining gives the CRPS."""
    request = ScoreRequest(weighting=ThresholdWeighted(chaining=IdentityChaining()))
    assert score_case(request, [1.0, 3.0, 5.0], 0.0) == pytest.approx(19 / 9)


@pytest.mark.parametrize("y", [-1.2, 0.3, 2.0])
def test_quantile_twcrps_normal(y: float):
    """Test the quantile form of the CRPS on many quantiles of a standard normal
    distribution against its closed-form CRPS.
    """
    size = 1000
    levels = (np.arange(1, size + 1) - 0.5) / size
    quantiles = list(zip(levels, stats.norm.ppf(levels)))
    expected = (
        y * (2 * stats.norm.cdf(y) - 1) + 2 * stats.norm.pdf(y) - 1 / np.sqrt(np.pi)
    )
    assert quantile_twcrps(quantiles, IdentityChaining(), y) == pytest.approx(
        expected, abs=1e-3
    )


def test_quantile_twcrps_invalid_levels():
    """Test that quantile levels must lie in (0, 1) and increase strictly."""
    with pytest.raises(UnsortedInputError):
        quantile_twcrps([(0.5, 0.0), (0.25, -1.0)], IdentityChaining(), 0.0)
    with pytest.raises(ValueError):
        quantile_twcrps([(0.0, -1.0), (0.5, 0.0)], IdentityChaining(), 0.0)


@pytest.mark.parametrize(
    "request_, dimension",
    [
        (CRPS, 2),
        (
            ScoreRequest(
                family=EnergyFamily(),
                weighting=VerticallyRescaled(
                    weight=HalfSpaceWeight(coefficients=(1.0, 1.0), threshold=0.0)
                ),
            ),
            3,
        ),
        (
            ScoreRequest(
                family=EnergyFamily(),
                weighting=OutcomeWeighted(weight=IntervalWeight(lower=0, upper=1)),
            ),
            2,
        ),
        (
            ScoreRequest(
                family=VariogramFamily(h=((1.0, 0.5), (0.5, 1.0))),
            ),
            3,
        ),
    ],
    ids=["crps", "half_space", "outcome_interval", "variogram_scaling"],
)
def test_check_request_dimension(request_: ScoreRequest, dimension: int):
    """Test that requests are checked against the dimension of the data."""
    with pytest.raises(DimensionMismatchError):
        check_request_dimension(request_, dimension)


def test_score_case_dimension_mismatch():
    """Test that the CRPS cannot score bivariate outcomes."""
    with pytest.raises(DimensionMismatchError):
        score_case(CRPS, [[0.0, 1.0], [1.0, 2.0]], [0.5, 0.5])
