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

"""Tests kernels and empirical kernel scores."""

import numpy as np
import pydantic
import pytest

from kernelscore import (
    EnsembleBatch,
    check_conditionally_negative_definite,
    empirical_energy_distance,
    empirical_kernel_score,
    evaluate_kernel,
    kernel_matrix,
)
from kernelscore.exceptions import (
    DimensionMismatchError,
    EmptyEnsembleError,
    NonFiniteInputError,
)
from kernelscore.models import (
    AboveThresholdWeight,
    AbsoluteDifferenceKernel,
    CollapseOutsideChaining,
    ComponentwiseMaxChaining,
    ConstantWeight,
    EuclideanPowerKernel,
    GaussianCdfWeight,
    InverseMultiquadricKernel,
    TransformedKernel,
    VariogramKernel,
    WeightIntegralChaining,
)
from tests.fixtures.examples import UNIVARIATE_CRPS

UNIVARIATE_CASES = {
    "c1": ([0.0, 1.0, 2.0], 1.5),
    "c2": ([1.0, 3.0, 5.0], 0.0),
    "c3": ([-1.0, 0.0, 1.0], 0.0),
}


@pytest.mark.parametrize(
    "kernel, x, x_prime, expected",
    [
        (AbsoluteDifferenceKernel(), 1.0, 3.0, 2.0),
        (EuclideanPowerKernel(), (0.0, 0.0), (3.0, 4.0), 5.0),
        (EuclideanPowerKernel(beta=0.5), (0.0, 0.0), (3.0, 4.0), np.sqrt(5.0)),
        (InverseMultiquadricKernel(), (0.0, 0.0), (3.0, 4.0), -1.0 / np.sqrt(26.0)),
        (InverseMultiquadricKernel(), (1.0, 2.0), (1.0, 2.0), -1.0),
        (VariogramKernel(p=1.0), (0.0, 1.0), (0.0, 3.0), 8.0),
        (VariogramKernel(p=1.0, h=((1.0, 0.5), (0.5, 1.0))), (0, 1), (0, 3), 4.0),
    ],
    ids=[
        "absolute_difference",
        "euclidean",
        "euclidean_power",
        "ims",
        "ims_diagonal",
        "variogram",
        "variogram_scaled",
    ],
)
def test_evaluate_kernel(kernel, x, x_prime, expected: float):
    """Test evaluating base kernels at single pairs of points."""
    assert evaluate_kernel(kernel, x, x_prime) == pytest.approx(expected)


def test_evaluate_transformed_kernel():
    """Test the order of transforms: chaining, centering and finally weighting by
    the raw inputs.
    """
    base = AbsoluteDifferenceKernel()
    chained = TransformedKernel.chained(
        base, WeightIntegralChaining(weight=AboveThresholdWeight(threshold=1.0))
    )
    assert evaluate_kernel(chained, -5.0, 3.0) == pytest.approx(2.0)

    centered = TransformedKernel.centered(base, (1.0,))
    # |4 - 2| - |4 - 1| - |2 - 1|
    assert evaluate_kernel(centered, 4.0, 2.0) == pytest.approx(-2.0)

    rescaled = TransformedKernel.vertically_rescaled(
        base, AboveThresholdWeight(threshold=0.0), (0.0,)
    )
    assert evaluate_kernel(rescaled, -1.0, 3.0) == 0.0
    assert evaluate_kernel(rescaled, 1.0, 3.0) == pytest.approx(-2.0)


def test_kernel_matrix_shape():
    """Test that kernel matrices cover all pairs of points."""
    matrix = kernel_matrix(
        EuclideanPowerKernel(), [[0.0, 0.0], [1.0, 0.0]], [[0.0, 1.0]] * 3
    )
    assert matrix.shape == (2, 3)
    np.testing.assert_allclose(matrix[:, 0], [1.0, np.sqrt(2.0)])


def test_weighting_zero_diagonal_kernel_needs_center():
    """Test that vertical re-scaling of a kernel with zero diagonal needs a center."""
    with pytest.raises(pydantic.ValidationError):
        TransformedKernel(
            base=EuclideanPowerKernel(), weight=AboveThresholdWeight(threshold=0.0)
        )


def test_centering_ims_is_rejected():
    """Test that the inverse multiquadric kernel is not centered."""
    with pytest.raises(pydantic.ValidationError):
        TransformedKernel(base=InverseMultiquadricKernel(), center=(0.0,))


@pytest.mark.parametrize(
    "case_id", UNIVARIATE_CASES, ids=list(UNIVARIATE_CASES)
)
def test_crps_by_hand(case_id: str):
    """Test the kernel score of the absolute difference against hand-computed CRPS
    values.
    """
    ensemble, y = UNIVARIATE_CASES[case_id]
    observed = empirical_kernel_score(AbsoluteDifferenceKernel(), ensemble, y)
    assert observed == pytest.approx(UNIVARIATE_CRPS[case_id], abs=1e-12)


def test_energy_score_reduces_to_crps():
    """Test that the energy score with beta = 1 equals the CRPS on the real line."""
    rng = np.random.default_rng(1)
    for _ in range(20):
        ensemble = rng.normal(size=int(rng.integers(1, 30)))
        y = rng.normal()
        crps = empirical_kernel_score(AbsoluteDifferenceKernel(), ensemble, y)
        energy = empirical_kernel_score(EuclideanPowerKernel(), ensemble[:, None], [y])
        assert energy == pytest.approx(crps, abs=1e-12)


def test_sorted_self_sum_matches_gram():
    """Test the O(M log M) double sum against the full Gram matrix."""
    rng = np.random.default_rng(2)
    members = rng.normal(size=(4, 25))
    batch = EnsembleBatch(members, rng.normal(size=4))
    coefficients = rng.dirichlet(np.ones(25), size=4)
    gram = np.abs(members[:, :, None] - members[:, None, :])
    expected = np.einsum("ni,nij,nj->n", coefficients, gram, coefficients)

    observed = batch.self_sum(AbsoluteDifferenceKernel(), None, coefficients)
    np.testing.assert_allclose(observed, expected, rtol=1e-12, atol=1e-12)


def test_member_weights_equal_repeated_members():
    """Test that member weights act like repeated members."""
    weighted = empirical_kernel_score(
        AbsoluteDifferenceKernel(), [0.0, 1.0, 2.0], 1.5, member_weights=[1, 1, 2]
    )
    repeated = empirical_kernel_score(
        AbsoluteDifferenceKernel(), [0.0, 1.0, 2.0, 2.0], 1.5
    )
    assert weighted == pytest.approx(repeated, abs=1e-12)


@pytest.mark.parametrize(
    "base",
    [
        AbsoluteDifferenceKernel(),
        EuclideanPowerKernel(beta=0.7),
        VariogramKernel(),
        InverseMultiquadricKernel(),
    ],
    ids=["absolute_difference", "euclidean_power", "variogram", "ims"],
)
def test_constant_weight_vertical_rescaling_is_unweighted(base):
    """Test that re-scaling with w = 1 leaves the score unchanged, for any center."""
    rng = np.random.default_rng(3)
    dimension = 1 if isinstance(base, AbsoluteDifferenceKernel) else 3
    for _ in range(10):
        ensemble = rng.normal(size=(15, dimension))
        y = rng.normal(size=dimension)
        center = tuple(rng.normal(size=dimension).tolist())
        rescaled = TransformedKernel.vertically_rescaled(base, ConstantWeight(), center)
        assert empirical_kernel_score(rescaled, ensemble, y) == pytest.approx(
            empirical_kernel_score(base, ensemble, y), abs=1e-10
        )


@pytest.mark.parametrize(
    "base",
    [EuclideanPowerKernel(), VariogramKernel(p=1.0)],
    ids=["energy", "variogram"],
)
@pytest.mark.parametrize("dimension", [1, 2, 3])
def test_collapse_chaining_equals_vertical_rescaling(base, dimension: int):
    """Test that chaining by collapsing onto a center outside a binary weight's
    region gives the score of vertical re-scaling with the same weight and center.
    """
    rng = np.random.default_rng(10 + dimension)
    for threshold in (-0.5, 0.0, 0.8):
        weight = AboveThresholdWeight(threshold=threshold)
        center = (threshold,) * dimension
        chained = TransformedKernel.chained(
            base, CollapseOutsideChaining(weight=weight, center=center)
        )
        rescaled = TransformedKernel.vertically_rescaled(base, weight, center)
        for _ in range(10):
            ensemble = rng.normal(size=(20, dimension))
            y = rng.normal(size=dimension)
            assert empirical_kernel_score(chained, ensemble, y) == pytest.approx(
                empirical_kernel_score(rescaled, ensemble, y), abs=1e-10
            )


def test_energy_distance_of_identical_ensembles():
    """Test that the kernel divergence vanishes for identical ensembles and is
    positive otherwise.
    """
    ensemble = [[0.0, 1.0], [2.0, -1.0], [0.5, 0.5]]
    kernel = EuclideanPowerKernel()
    assert empirical_energy_distance(kernel, ensemble, ensemble) == pytest.approx(
        0.0, abs=1e-12
    )
    shifted = [[x + 1.0, y] for x, y in ensemble]
    assert empirical_energy_distance(kernel, ensemble, shifted) > 0


@pytest.mark.parametrize("p", [0.5, 1.0, 2.0])
def test_variogram_kernel_score_by_formula(p: float):
    """Test the variogram kernel score against the sum over coordinate pairs of the
    squared difference between observed and expected variograms.
    """
    rng = np.random.default_rng(20)
    dimension = 4
    scaling = rng.uniform(size=(dimension, dimension))
    scaling = (scaling + scaling.T) / 2
    kernel = VariogramKernel(p=p, h=tuple(map(tuple, scaling.tolist())))
    for _ in range(5):
        ensemble = rng.normal(size=(12, dimension))
        y = rng.normal(size=dimension)
        observed_variogram = np.abs(y[:, None] - y[None, :]) ** p
        expected_variogram = np.mean(
            np.abs(ensemble[:, :, None] - ensemble[:, None, :]) ** p, axis=0
        )
        expected = np.sum(scaling * (observed_variogram - expected_variogram) ** 2)
        assert empirical_kernel_score(kernel, ensemble, y) == pytest.approx(
            expected, rel=1e-10, abs=1e-12
        )


KERNELS_BY_DIMENSION = [
    (AbsoluteDifferenceKernel(), 1),
    (EuclideanPowerKernel(beta=0.5), 3),
    (EuclideanPowerKernel(beta=1.9), 3),
    (VariogramKernel(p=0.5), 3),
    (VariogramKernel(p=1.5), 3),
    (InverseMultiquadricKernel(), 3),
    (
        TransformedKernel.chained(
            AbsoluteDifferenceKernel(),
            WeightIntegralChaining(weight=GaussianCdfWeight(mean=0.5, sd=0.5)),
        ),
        1,
    ),
    (
        TransformedKernel.chained(
            EuclideanPowerKernel(), ComponentwiseMaxChaining(threshold=0.0)
        ),
        3,
    ),
    (
        TransformedKernel.vertically_rescaled(
            EuclideanPowerKernel(), GaussianCdfWeight(), (0.0,)
        ),
        1,
    ),
    (
        TransformedKernel.vertically_rescaled(
            InverseMultiquadricKernel(), GaussianCdfWeight(mean=1.0)
        ),
        1,
    ),
]
KERNEL_IDS = [
    "absolute_difference",
    "energy_0.5",
    "energy_1.9",
    "variogram_0.5",
    "variogram_1.5",
    "ims",
    "chained_gaussian_cdf",
    "chained_componentwise_max",
    "rescaled_energy",
    "rescaled_ims",
]


@pytest.mark.parametrize("kernel, dimension", KERNELS_BY_DIMENSION, ids=KERNEL_IDS)
def test_kernels_are_conditionally_negative_definite(kernel, dimension: int):
    """Test that zero-sum quadratic forms of kernel matrices are not positive."""
    points = np.random.default_rng(30).normal(size=(15, dimension))
    assert check_conditionally_negative_definite(kernel, points, samples=200)


def test_conditional_negative_definiteness_with_given_coefficients():
    """Test explicit coefficient vectors, which must sum to zero and fit the
    points.
    """
    points = [0.0, 1.0, 3.0]
    kernel = AbsoluteDifferenceKernel()
    # 1 * 1 * 0 + 2 * (1 * -1 * 1) = -2
    assert check_conditionally_negative_definite(kernel, points, [1.0, -1.0, 0.0])
    with pytest.raises(ValueError):
        check_conditionally_negative_definite(kernel, points, [1.0, 1.0, 0.0])
    with pytest.raises(ValueError):
        check_conditionally_negative_definite(kernel, points, [1.0, -1.0])


@pytest.mark.parametrize("kernel, dimension", KERNELS_BY_DIMENSION, ids=KERNEL_IDS)
def test_divergence_to_observation_equals_score(kernel, dimension: int):
    """Test that the kernel divergence between an ensemble and a point mass at the
    observation is the kernel score.
    """
    rng = np.random.default_rng(31)
    ensemble = rng.normal(size=(10, dimension))
    y = rng.normal(size=dimension)
    assert empirical_energy_distance(kernel, ensemble, y[None, :]) == pytest.approx(
        empirical_kernel_score(kernel, ensemble, y), abs=1e-12
    )


@pytest.mark.parametrize("kernel, dimension", KERNELS_BY_DIMENSION, ids=KERNEL_IDS)
def test_point_mass_scores_are_symmetric(kernel, dimension: int):
    """Test that scoring a point mass at x for y gives the same as the point mass at
    y for x.
    """
    rng = np.random.default_rng(32)
    for _ in range(5):
        x, y = rng.normal(size=(2, dimension))
        assert empirical_kernel_score(kernel, x[None, :], y) == pytest.approx(
            empirical_kernel_score(kernel, y[None, :], x), abs=1e-12
        )


def test_empty_ensemble():
    """Test that an ensemble without members cannot be scored."""
    with pytest.raises(EmptyEnsembleError):
        empirical_kernel_score(AbsoluteDifferenceKernel(), [], 0.0)


def test_non_finite_member():
    """Test that non-finite members are rejected."""
    with pytest.raises(NonFiniteInputError):
        empirical_kernel_score(AbsoluteDifferenceKernel(), [0.0, np.inf], 0.0)


def test_dimension_mismatch():
    """Test that members and observation must share the dimension."""
    with pytest.raises(DimensionMismatchError):
        empirical_kernel_score(EuclideanPowerKernel(), [[0.0, 1.0]], [0.0, 1.0, 2.0])
    with pytest.raises(DimensionMismatchError):
        empirical_kernel_score(AbsoluteDifferenceKernel(), [[0.0, 1.0]], [0.0, 1.0])
