# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

"""
Seeded synthetic datasets shared by the test modules
"""

import numpy as np
from scipy.special import expit

from svylasso.glm import Dataset


def logit_dataset(rng, n, theta, binary=True, weights=None, names=()):
    """
    Draws y ~ Bernoulli(expit(x' theta)) with Bernoulli(0.5) or standard normal regressors

    Args:
        rng: A numpy Generator
        n: Number of rows
        theta: True parameter, intercept first
        binary: Bernoulli(0.5) regressors when true, normal otherwise
        weights: Survey weights (default uniform on [0.5, 2])

    Returns:
        A Dataset
    """
    theta = np.asarray(theta, dtype=float)
    p = theta.shape[0] - 1
    if binary:
        regressors = (rng.random((n, p)) < 0.5).astype(float)
    else:
        regressors = rng.standard_normal((n, p))
    X = np.column_stack((np.ones(n), regressors))
    y = (rng.random(n) < expit(X @ theta)).astype(float)
    if weights is None:
        weights = rng.uniform(0.5, 2.0, n)
    return Dataset(y, X, weights, names)


def newton_mle(data, iterations=100):
    """Plain undamped Newton iterations on the weighted log-likelihood"""
    theta = np.zeros(data.p + 1)
    for _ in range(iterations):
        mu = expit(data.X @ theta)
        gradient = data.X.T @ (data.w * (data.y - mu))
        hessian = (data.X.T * (data.w * mu * (1.0 - mu))) @ data.X
        step = np.linalg.solve(hessian, gradient)
        theta = theta + step
        if np.max(np.abs(step)) < 1e-13:
            break
    return theta
