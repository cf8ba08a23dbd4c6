# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

"""
Marginal Effects

File : marginal.py

Brief : This file contains survey-weighted marginal effects and average
        marginal effects (AME) of dummy regressors in the logit model, their
        analytic Jacobian, and the AME packaged as a smooth functional for
        debiased inference
"""

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from svylasso.debias import SmoothFunctional
from svylasso.errors import DomainError
from svylasso.glm import theta_vector


@dataclass(frozen=True, eq=False)
class AmeResult:
    ame_hat: float
    jacobian_column: np.ndarray
    regressor_index: int


def _check_index(data, j):
    if not 1 <= j <= data.p:
        raise DomainError("regressor position {} is outside 1..{}".format(j, data.p))


def toggled_designs(data, j):
    """
    Design matrices with dummy regressor j set to 1 and to 0

    Product columns built from j by an interaction expansion are recomputed
    from their parents so the toggle stays coherent.

    Args:
        data: The Dataset
        j: Position in theta of a binary regressor

    Returns:
        (X1, X0)
    """
    _check_index(data, j)
    column = data.X[:, j]
    if not np.all(np.isin(column, (0.0, 1.0))):
        raise DomainError("regressor '{}' is not a 0/1 dummy; marginal effects are defined for dummies only"
                          .format(data.column_names[j - 1]))
    designs = []
    for level in (1.0, 0.0):
        X = np.array(data.X)
        X[:, j] = level
        if data.expansion is not None:
            for target, (left, right) in data.expansion.parentage.items():
                if j in (left, right):
                    X[:, target] = X[:, left] * X[:, right]
        designs.append(X)
    return designs[0], designs[1]


def marginal_effects(data, theta, j):
    """ME_ij for every observation i"""
    vector = theta_vector(data, theta)
    X1, X0 = toggled_designs(data, j)
    return expit(X1 @ vector) - expit(X0 @ vector)


def marginal_effect(data, theta, j, i):
    """
    ME_ij = Lambda(x_i' theta) at x_ij = 1 minus Lambda(x_i' theta) at x_ij = 0
    """
    if not 0 <= i < data.n:
        raise DomainError("observation {} is outside 0..{}".format(i, data.n - 1))
    return float(marginal_effects(data, theta, j)[i])


def ame(data, theta, j):
    """
    Survey-weighted average marginal effect of dummy regressor j

    Args:
        data: The Dataset
        theta: The parameter vector
        j: Position in theta of the dummy regressor

    Returns:
        An AmeResult whose jacobian_column is the analytic gradient in theta
    """
    vector = theta_vector(data, theta)
    X1, X0 = toggled_designs(data, j)
    mu1 = expit(X1 @ vector)
    mu0 = expit(X0 @ vector)
    total = float(np.sum(data.w))
    ame_hat = float(np.sum(data.w * (mu1 - mu0))) / total
    jacobian = (X1.T @ (data.w * mu1 * (1.0 - mu1)) - X0.T @ (data.w * mu0 * (1.0 - mu0))) / total
    return AmeResult(ame_hat, jacobian, j)


def ame_functional(data, j):
    """AME of regressor j as a SmoothFunctional over the fixed dataset"""
    # Validates the column up front
    toggled_designs(data, j)
    name = "AME({})".format(data.column_names[j - 1])
    return SmoothFunctional(lambda theta: np.array([ame(data, theta, j).ame_hat]),
                            lambda theta: ame(data, theta, j).jacobian_column[:, None],
                            (name,))


def population_ame(theta0, j, success_probability=0.5, max_support=20):
    """
    Population AME of regressor j under i.i.d. Bernoulli regressors, by
    enumerating the cells of the other regressors with nonzero coefficients

    Args:
        theta0: The true parameter vector (intercept first)
        j: Position in theta of the regressor
        success_probability: Bernoulli probability of every regressor
        max_support: Largest number of other nonzero coefficients enumerated

    Returns:
        The AME as a float
    """
    theta0 = np.asarray(theta0, dtype=float)
    if not 1 <= j < theta0.shape[0]:
        raise DomainError("regressor position {} is outside 1..{}".format(j, theta0.shape[0] - 1))
    others = [k for k in np.flatnonzero(theta0[1:]) + 1 if k != j]
    if len(others) > max_support:
        raise DomainError("{} nonzero coefficients is too many to enumerate".format(len(others)))
    total = 0.0
    for cell in itertools.product((0.0, 1.0), repeat=len(others)):
        probability = 1.0
        base = theta0[0]
        for k, value in zip(others, cell):
            probability *= success_probability if value else 1.0 - success_probability
            base += theta0[k] * value
        total += probability * (expit(base + theta0[j]) - expit(base))
    return float(total)
