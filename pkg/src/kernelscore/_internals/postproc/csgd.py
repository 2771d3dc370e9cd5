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

"""Censored shifted Gamma regression for non-negative quantities like precipitation.

The predictive distribution of a case is a Gamma distribution with mean
mu = alpha + beta * xbar and standard deviation sigma = gamma + delta * s, shifted
left by xi and censored at zero, where xbar and s are the mean and the standard
deviation of the raw ensemble.

Warning: This is an internal part of the library and might change without notice.
"""

import logging

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import optimize, stats

from kernelscore._internals.exceptions import (
    CsgdFitError,
    DegenerateDistributionError,
    InsufficientDataError,
    InvalidTrainingDataError,
    NonFiniteInputError,
)
from kernelscore._internals.models.postproc import (
    CsgdDistribution,
    CsgdFitResult,
    CsgdParams,
)

log = logging.getLogger(__name__)

MIN_TRAINING_CASES = 20
OPTIMIZER_OPTIONS = {"xatol": 1e-8, "fatol": 1e-8, "maxiter": 20_000, "maxfev": 40_000}
_JITTER_SD = 0.3


def csgd_distribution(params: CsgdParams, xbar: float, s: float) -> CsgdDistribution:
    """The predictive distribution for an ensemble with mean xbar and standard
    deviation s.

    Raises:
        DegenerateDistributionError: If the implied mean or spread is not positive.
    """
    mu = params.alpha + params.beta * xbar
    sigma = params.gamma + params.delta * s
    if mu <= 0 or sigma <= 0:
        raise DegenerateDistributionError(
            f"The coefficients imply mean {mu} and spread {sigma} for ensemble mean"
            + f" {xbar} and spread {s}; both must be positive."
        )
    return CsgdDistribution(
        shape=(mu / sigma) ** 2, scale=sigma**2 / mu, shift=params.xi
    )


def csgd_quantiles(distribution: CsgdDistribution, members: int) -> NDArray[np.float64]:
    """Quantiles at the equidistant levels i / (members + 1), i = 1, ..., members."""
    if members < 1:
        raise ValueError(f"The number of members must be positive, got {members}.")
    levels = np.arange(1, members + 1) / (members + 1)
    return distribution.quantile(levels)


def log_likelihood(
    coefficients: NDArray, xbar: NDArray, s: NDArray, y: NDArray
) -> float:
    """Log-likelihood of (alpha, beta, gamma, delta, xi) on training data. Zeros
    contribute the point mass, positive values the shifted density.
    """
    alpha, beta, gamma, delta, xi = coefficients
    mu = alpha + beta * xbar
    sigma = gamma + delta * s
    if np.any(mu <= 0) or np.any(sigma <= 0):
        return -np.inf
    shape = (mu / sigma) ** 2
    scale = sigma**2 / mu
    with np.errstate(divide="ignore"):
        terms = np.where(
            y == 0,
            stats.gamma.logcdf(xi, shape, scale=scale),
            stats.gamma.logpdf(y + xi, shape, scale=scale),
        )
    total = float(np.sum(terms))
    return total if np.isfinite(total) else -np.inf


def _prepare_training(training: ArrayLike) -> tuple[NDArray, NDArray, NDArray]:
    data = np.asarray(training, dtype=float)
    if data.ndim != 2 or data.shape[1] != 3:
        raise ValueError("Training data must have the columns xbar, s and y.")
    if not np.all(np.isfinite(data)):
        raise NonFiniteInputError("The training data contain non-finite values.")
    n = data.shape[0]
    if n < MIN_TRAINING_CASES:
        raise InsufficientDataError(
            n=n, required=MIN_TRAINING_CASES, context="Fitting a CSGD regression"
        )
    xbar, s, y = data.T
    if np.any(y < 0):
        raise InvalidTrainingDataError("Observations must not be negative.")
    if np.any(s < 0):
        raise InvalidTrainingDataError("Ensemble spreads must not be negative.")
    return xbar, s, y


def _start_values(xbar: NDArray, y: NDArray) -> NDArray[np.float64]:
    variance = float(np.var(xbar))
    slope = float(np.cov(xbar, y, bias=True)[0, 1] / variance) if variance > 0 else 0.0
    beta = max(slope, 0.1)
    alpha = max(float(np.mean(y)) - beta * float(np.mean(xbar)), 0.1)
    gamma = max(0.5 * float(np.std(y)), 0.1)
    return np.array([alpha, beta, gamma, 0.5, 0.1])


def fit_csgd(
    training: ArrayLike, *, seed: int = 0, restarts: int = 5
) -> CsgdFitResult:
    """Fit the regression coefficients by maximum likelihood.

    The coefficients are optimized as squares of free parameters, which keeps them
    non-negative. The simplex search is started from moment-based values and from
    randomly perturbed copies of them; the best result is polished by a final run.
    If all spreads are zero, delta is not identified and fixed at zero.

    Args:
        training: Rows of (xbar, s, y).
        seed: Seed for the perturbation of the start values.
        restarts: Number of perturbed starts in addition to the plain one.

    Raises:
        InsufficientDataError: If there are fewer than 20 rows.
        InvalidTrainingDataError: If an observation or spread is negative.
        CsgdFitError: If the likelihood is not finite at any optimum found.
    """
    xbar, s, y = _prepare_training(training)
    free = np.ones(5, dtype=bool)
    if np.all(s == 0):
        log.warning("All ensemble spreads are zero, delta is fixed at zero.")
        free[3] = False

    def to_coefficients(roots: NDArray) -> NDArray:
        coefficients = np.zeros(5)
        coefficients[free] = roots**2
        return coefficients

    def objective(roots: NDArray) -> float:
        value = -log_likelihood(to_coefficients(roots), xbar, s, y)
        return value if np.isfinite(value) else np.inf

    start = np.sqrt(_start_values(xbar, y)[free])
    rng = np.random.default_rng(seed)
    starts = [start] + [
        start * np.exp(rng.normal(0.0, _JITTER_SD, start.size)) for _ in range(restarts)
    ]

    best: optimize.OptimizeResult | None = None
    for initial in starts:
        result = optimize.minimize(
            objective, initial, method="Nelder-Mead", options=OPTIMIZER_OPTIONS
        )
        if np.isfinite(result.fun) and (best is None or result.fun < best.fun):
            best = result
    if best is None:
        raise CsgdFitError(
            "The likelihood is not finite at any of the optima found; the"
            + " training data may not fit a censored shifted Gamma model."
        )
    polished = optimize.minimize(
        objective, best.x, method="Nelder-Mead", options=OPTIMIZER_OPTIONS
    )
    if np.isfinite(polished.fun) and polished.fun <= best.fun:
        best = polished

    alpha, beta, gamma, delta, xi = (float(c) for c in to_coefficients(best.x))
    params = CsgdParams(alpha=alpha, beta=beta, gamma=gamma, delta=delta, xi=xi)
    log.info(
        "Fitted CSGD coefficients %s with log-likelihood %.6g on %d cases.",
        params.model_dump(),
        -best.fun,
        y.size,
    )
    return CsgdFitResult(params=params, log_likelihood=-float(best.fun), n_cases=y.size)
