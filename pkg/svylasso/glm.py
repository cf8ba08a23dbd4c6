# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

"""
Survey-Weighted GLM Core

File : glm.py

Brief : This file contains the survey-weighted generalized linear model objects
        shared by every other module: the negative log-density and its
        derivatives, the weighted log-likelihood, the score, the negative
        Hessian and the sample information matrix
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg
from scipy.special import expit

from svylasso.errors import DimensionError, DomainError

LOGIT = "logit"


class LogitFamily(object):
    """
    Negative log-density g(y, t) = log(1 + e^t) - y * t of the logit model and
    its first two derivatives in t
    """

    name = LOGIT
    # Lower/upper clamp applied to the fitted probability inside variance terms only
    variance_clamp = 1e-12

    @staticmethod
    def check_outcome(y):
        y = np.asarray(y, dtype=float)
        bad = ~np.isin(y, (0.0, 1.0))
        if np.any(bad):
            index = int(np.flatnonzero(bad)[0])
            raise DomainError("logit outcome must be 0 or 1; found {!r} at position {}".format(
                float(np.ravel(y)[index]), index))

    @staticmethod
    def g(y, t):
        return np.logaddexp(0.0, t) - y * t

    @staticmethod
    def g_dot(y, t):
        return expit(t) - y

    def g_ddot(self, y, t):
        mu = np.clip(expit(t), self.variance_clamp, 1.0 - self.variance_clamp)
        return mu * (1.0 - mu)


_FAMILIES = {LOGIT: LogitFamily()}


def get_family(tag):
    """
    Looks up a link family by its tag

    Args:
        tag: The family tag, or a family object

    Returns:
        The family object
    """
    if not isinstance(tag, str):
        return tag
    try:
        return _FAMILIES[tag]
    except KeyError:
        raise DomainError("unsupported link family '{}'; available: {}".format(tag, ", ".join(sorted(_FAMILIES))))


def neg_log_density_derivs(family, y, t):
    """
    Evaluates g, its first derivative and its second derivative in t

    Args:
        family: The link family tag
        y: Outcome value(s)
        t: Linear predictor value(s)

    Returns:
        A (g, g_dot, g_ddot) triple with the broadcast shape of y and t
    """
    fam = get_family(family)
    y_arr = np.asarray(y, dtype=float)
    t_arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t_arr)):
        raise DomainError("linear predictor must be finite")
    fam.check_outcome(y_arr)
    values = (fam.g(y_arr, t_arr), fam.g_dot(y_arr, t_arr), fam.g_ddot(y_arr, t_arr))
    if y_arr.ndim == 0 and t_arr.ndim == 0:
        return tuple(float(v) for v in values)
    return values


def _read_only(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Outcome vector, design matrix with a leading intercept column, and survey
    weights. Immutable once constructed.

    Attributes
    ----------
    y : (n,) array
    X : (n, p + 1) array whose first column is all ones
    w : (n,) array of strictly positive survey weights
    column_names : names of the p non-intercept regressors
    family : link family tag
    strata : optional (n,) stratum labels
    expansion : optional ExpansionMap when the regressors came from an interaction expansion
    """

    y: np.ndarray
    X: np.ndarray
    w: np.ndarray
    column_names: tuple = ()
    family: str = LOGIT
    strata: Optional[np.ndarray] = None
    expansion: Optional[object] = None

    def __post_init__(self):
        X = _read_only(self.X)
        if X.ndim != 2:
            raise DimensionError("design matrix must be two-dimensional")
        n = X.shape[0]
        if n < 1 or X.shape[1] < 1:
            raise DimensionError("design matrix needs at least one row and the intercept column")
        y = _read_only(np.ravel(self.y))
        w = _read_only(np.ravel(self.w))
        if y.shape[0] != n or w.shape[0] != n:
            raise DimensionError("y ({}), w ({}) and X ({} rows) disagree in length".format(y.shape[0], w.shape[0], n))
        if not np.all(np.isfinite(X)):
            raise DomainError("design matrix contains non-finite values")
        if not np.all(X[:, 0] == 1.0):
            raise DomainError("the first column of the design matrix must be the all-ones intercept")
        if not np.all(np.isfinite(w)) or np.any(w <= 0.0):
            raise DomainError("survey weights must be finite and strictly positive")
        get_family(self.family).check_outcome(y)
        p = X.shape[1] - 1
        names = tuple(self.column_names) if self.column_names else tuple("x{}".format(j) for j in range(1, p + 1))
        if len(names) != p:
            raise DimensionError("expected {} column names, got {}".format(p, len(names)))
        if len(set(names)) != p:
            raise DomainError("column names must be unique")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "column_names", names)
        if self.strata is not None:
            strata = np.array(self.strata)
            if strata.shape != (n,):
                raise DimensionError("strata labels must have one entry per row")
            strata.setflags(write=False)
            object.__setattr__(self, "strata", strata)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1] - 1

    @property
    def n_strata(self):
        if self.strata is None:
            return 1
        return len(np.unique(self.strata))

    @property
    def design_df(self):
        """Design degrees of freedom: n minus the number of strata"""
        return max(self.n - self.n_strata, 1)

    def subset(self, rows):
        rows = np.asarray(rows)
        strata = None if self.strata is None else self.strata[rows]
        return Dataset(self.y[rows], self.X[rows], self.w[rows], self.column_names, self.family, strata,
                       self.expansion)

    def with_weights(self, w):
        return Dataset(self.y, self.X, w, self.column_names, self.family, self.strata, self.expansion)

    def column_index(self, name):
        """Position in theta of the regressor called name"""
        try:
            return self.column_names.index(name) + 1
        except ValueError:
            raise DomainError("unknown regressor '{}'".format(name))


@dataclass(frozen=True, eq=False)
class Theta:
    alpha: float
    beta: np.ndarray

    def __post_init__(self):
        beta = _read_only(np.ravel(self.beta))
        if not np.isfinite(self.alpha) or not np.all(np.isfinite(beta)):
            raise DomainError("theta entries must be finite")
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", beta)

    @classmethod
    def from_vector(cls, vector):
        vector = np.ravel(np.asarray(vector, dtype=float))
        if vector.shape[0] < 1:
            raise DimensionError("theta needs at least the intercept")
        return cls(vector[0], vector[1:])

    def as_vector(self):
        return np.concatenate(([self.alpha], self.beta))

    def __len__(self):
        return self.beta.shape[0] + 1


@dataclass(frozen=True, eq=False)
class LikelihoodParts:
    loglik: float
    score: np.ndarray
    hessian: np.ndarray
    info: np.ndarray


def theta_vector(data, theta):
    """
    Coerces a Theta or array-like to a (p + 1)-vector matching data
    """
    if isinstance(theta, Theta):
        vector = theta.as_vector()
    else:
        vector = np.ravel(np.asarray(theta, dtype=float))
    if vector.shape[0] != data.p + 1:
        raise DimensionError("theta has length {}, data needs {}".format(vector.shape[0], data.p + 1))
    if not np.all(np.isfinite(vector)):
        raise DomainError("theta entries must be finite")
    return vector


def linear_predictor(data, theta):
    return data.X @ theta_vector(data, theta)


def weighted_loglik(data, theta):
    """L_n(theta) = -n^-1 sum_i w_i g(y_i, x_i' theta)"""
    fam = get_family(data.family)
    t = linear_predictor(data, theta)
    return -float(np.sum(data.w * fam.g(data.y, t))) / data.n


def score(data, theta):
    """S(theta) = -n^-1 sum_i w_i x_i g_dot(y_i, x_i' theta)"""
    fam = get_family(data.family)
    t = linear_predictor(data, theta)
    return -(data.X.T @ (data.w * fam.g_dot(data.y, t))) / data.n


def _symmetric(matrix):
    return 0.5 * (matrix + matrix.T)


def hessian_and_info(data, theta):
    """
    Negative Hessian and sample information of the weighted log-likelihood

    Args:
        data: The Dataset
        theta: The parameter vector

    Returns:
        (H, I) where H = n^-1 sum w_i x_i x_i' g_ddot and I = n^-1 sum w_i^2 x_i x_i' g_dot^2
    """
    fam = get_family(data.family)
    t = linear_predictor(data, theta)
    X = data.X
    h = data.w * fam.g_ddot(data.y, t)
    s = (data.w * fam.g_dot(data.y, t)) ** 2
    hessian = _symmetric((X.T * h) @ X / data.n)
    info = _symmetric((X.T * s) @ X / data.n)
    return hessian, info


def likelihood_parts(data, theta):
    fam = get_family(data.family)
    vector = theta_vector(data, theta)
    t = data.X @ vector
    X = data.X
    g_dot = fam.g_dot(data.y, t)
    loglik = -float(np.sum(data.w * fam.g(data.y, t))) / data.n
    grad = -(X.T @ (data.w * g_dot)) / data.n
    hessian = _symmetric((X.T * (data.w * fam.g_ddot(data.y, t))) @ X / data.n)
    info = _symmetric((X.T * (data.w * g_dot) ** 2) @ X / data.n)
    return LikelihoodParts(loglik, grad, hessian, info)


def null_intercept(data):
    """Intercept of the intercept-only fit: logit of the weighted outcome mean"""
    ybar = float(np.sum(data.w * data.y) / np.sum(data.w))
    ybar = min(max(ybar, 1e-12), 1.0 - 1e-12)
    return float(np.log(ybar / (1.0 - ybar)))


def solve_psd(matrix, rhs):
    """
    Solves matrix @ x = rhs for a symmetric positive semidefinite matrix,
    falling back to least squares when the Cholesky factorization fails
    """
    try:
        factor = linalg.cho_factor(matrix, lower=True, check_finite=False)
        return linalg.cho_solve(factor, rhs, check_finite=False)
    except linalg.LinAlgError:
        return linalg.lstsq(matrix, rhs, check_finite=False)[0]


@dataclass(frozen=True, eq=False)
class MleResult:
    theta_hat: np.ndarray
    loglik: float
    converged: bool
    iterations: int
    separation: bool


def fit_weighted_mle(data, columns=None, tol=1e-10, max_iter=25, divergence_norm=1e3, stop_on_divergence=True,
                     log_level=logging.WARNING):
    """
    Maximizes the weighted log-likelihood by damped Newton steps

    Args:
        data: The Dataset
        columns: Positions in theta to estimate (the intercept is always included); the rest stay at zero
        tol: Relative change in L_n that ends the iteration
        max_iter: Maximum number of Newton steps
        divergence_norm: Norm of theta beyond which the fit is flagged as quasi-separated
        stop_on_divergence: End the iteration once the norm is exceeded; otherwise run on and return the last iterate
        log_level: Level of the separation and non-convergence messages

    Returns:
        An MleResult
    """
    if columns is None:
        columns = np.arange(data.p + 1)
    else:
        columns = np.union1d([0], np.asarray(columns, dtype=int))
    theta = np.zeros(data.p + 1)
    theta[0] = null_intercept(data)
    current = weighted_loglik(data, theta)
    converged = False
    separation = False
    iteration = 0
    for iteration in range(1, max_iter + 1):
        parts = likelihood_parts(data, theta)
        sub_h = parts.hessian[np.ix_(columns, columns)]
        step = np.zeros_like(theta)
        step[columns] = solve_psd(sub_h, parts.score[columns])
        scale = 1.0
        candidate = theta + step
        proposed = weighted_loglik(data, candidate)
        # Halve the step until the likelihood does not decrease
        while proposed < current and scale > 1e-10:
            scale *= 0.5
            candidate = theta + scale * step
            proposed = weighted_loglik(data, candidate)
        if proposed < current:
            # No ascent even at the smallest step: theta is stationary to working precision
            logging.debug("fit_weighted_mle: step halving found no improvement at step {}".format(iteration))
            converged = True
            break
        change = abs(proposed - current) / (abs(proposed) + 0.1)
        theta, current = candidate, proposed
        if np.linalg.norm(theta) > divergence_norm and not separation:
            separation = True
            logging.log(log_level, "fit_weighted_mle: coefficients diverging (norm {:.3e}); data look quasi-separated"
                        .format(np.linalg.norm(theta)))
        if separation and stop_on_divergence:
            break
        if change < tol:
            converged = True
            break
    if not converged and not separation:
        logging.log(log_level, "fit_weighted_mle: no convergence after {} Newton steps".format(iteration))
    return MleResult(theta, current, converged, iteration, separation)
