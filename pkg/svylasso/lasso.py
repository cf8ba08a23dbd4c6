# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

"""
Survey-Weighted Logistic Lasso Solver

File : lasso.py

Brief : This file contains the l1-penalized survey-weighted maximum likelihood
        solver (IRLS outer loop, cyclic coordinate descent inner loop,
        proximal-gradient fallback), lambda paths, cross-validated lambda
        selection by weighted AUC, and adaptive penalty weights
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import expit
from sklearn.metrics import roc_auc_score
from sklearn.model_selection import KFold

from svylasso.errors import DomainError, FoldConstructionError, UsageError
from svylasso.glm import (Theta, fit_weighted_mle, null_intercept, score, theta_vector, weighted_loglik)

# Working-weight clamp on the fitted probability, as in glmnet
_WORKING_CLAMP = 1e-5
_MAX_OUTER = 200
_FOLD_RETRIES = 20
_SEPARATION_NORM = 1e3


@dataclass(frozen=True, eq=False)
class PenaltySpec:
    """
    Penalty of the svy LLasso objective: lam * sum_j weights_j * |beta_j|.
    All-ones weights give the plain Lasso; data-driven weights the adaptive Lasso.
    The intercept is never penalized.
    """

    lam: float
    weights: Optional[np.ndarray] = None
    penalize_intercept: bool = False

    def __post_init__(self):
        if not np.isfinite(self.lam) or self.lam < 0.0:
            raise DomainError("lambda must be a finite nonnegative number, got {!r}".format(self.lam))
        if self.penalize_intercept:
            raise DomainError("the intercept is never penalized")
        if self.weights is not None:
            weights = np.array(np.ravel(self.weights), dtype=float)
            if np.any(np.isnan(weights)) or np.any(weights < 0.0):
                raise DomainError("penalty weights must be nonnegative")
            weights.setflags(write=False)
            object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "lam", float(self.lam))

    def weights_for(self, p):
        if self.weights is None:
            return np.ones(p)
        if self.weights.shape[0] != p:
            raise DomainError("expected {} penalty weights, got {}".format(p, self.weights.shape[0]))
        return np.array(self.weights)


@dataclass(frozen=True, eq=False)
class FitResult:
    """
    Attributes
    ----------
    theta_hat : the penalized estimate on the original regressor scale
    lam : the lambda used
    active_set : positions in theta (1..p) of the nonzero slope coefficients
    m0_hat : size of the active set
    iterations : coordinate sweeps (or proximal steps) spent
    objective : -L_n(theta_hat) + lam * sum_j penalty_weights_j * |beta_j|
    converged : whether the stopping rule was met within max_iter
    penalty_weights : effective original-scale penalty weights
    separation : whether the coefficient norm diverged beyond 1e3
    solver : "irls-cd" or "proximal-gradient"
    excluded : positions held at zero (zero variance or infinite weight)
    """

    theta_hat: Theta
    lam: float
    active_set: tuple
    m0_hat: int
    iterations: int
    objective: float
    converged: bool
    penalty_weights: np.ndarray
    separation: bool = False
    solver: str = "irls-cd"
    excluded: tuple = ()

    @property
    def theta_vector(self):
        return self.theta_hat.as_vector()


@dataclass(frozen=True, eq=False)
class LambdaPath:
    grid: np.ndarray
    cv_scores: np.ndarray
    mean_scores: np.ndarray
    se_scores: np.ndarray
    selected_lambda: float
    one_se_lambda: float
    fold_assignment_seed: int
    folds: np.ndarray
    lambda_max: float
    n_folds: int
    penalty_weights: Optional[np.ndarray] = field(default=None)

    @property
    def selected_index(self):
        return int(np.flatnonzero(self.grid == self.selected_lambda)[0])

    @property
    def cv_error(self):
        """1 - mean out-of-fold AUC at the selected lambda"""
        return 1.0 - float(self.mean_scores[self.selected_index])


def _weighted_moments(data):
    """Weighted means and (population) standard deviations of the p regressors"""
    weights = data.w / np.sum(data.w)
    regressors = data.X[:, 1:]
    means = weights @ regressors
    sds = np.sqrt(weights @ (regressors - means) ** 2)
    return means, sds


def _held_columns(data, weights):
    """Masks of regressors fixed at zero: (zero weighted variance, infinite penalty weight)"""
    means, sds = _weighted_moments(data)
    zero_variance = sds <= 1e-10 * np.maximum(1.0, np.abs(means))
    return zero_variance, np.isinf(weights)


def effective_weights(data, weights, standardize=True):
    """
    Original-scale penalty weights equivalent to penalizing standardized coefficients

    Args:
        data: The Dataset
        weights: The per-coefficient penalty weights (length p)
        standardize: Whether weights apply to standardized coefficients

    Returns:
        weights * sd when standardizing, weights otherwise
    """
    weights = np.asarray(weights, dtype=float)
    if not standardize:
        return weights.copy()
    _, sds = _weighted_moments(data)
    with np.errstate(invalid="ignore"):
        scaled = weights * sds
    # Infinite weights stay infinite even on zero-variance columns
    scaled[np.isinf(weights)] = np.inf
    return scaled


class _StandardizedProblem(object):
    """
    The svy LLasso objective written on centered and scaled regressors:
    sum_i v_i g(y_i, a + z_i' b) + lam * sum_j thresholds_j |b_j| with v = w / n
    """

    def __init__(self, data, weights, standardize):
        self.data = data
        self.y = data.y
        self.v = data.w / data.n
        means, sds = _weighted_moments(data)
        zero_variance, infinite = _held_columns(data, weights)
        for j in np.flatnonzero(zero_variance & ~infinite):
            logging.warning("fit_penalized: regressor '{}' has zero weighted variance; held at zero"
                            .format(data.column_names[j]))
        self.included = np.flatnonzero(~zero_variance & ~infinite)
        self.excluded = tuple(int(j) + 1 for j in np.flatnonzero(zero_variance | infinite))
        self.means = means[self.included]
        self.sds = sds[self.included]
        self.Z = np.asfortranarray((data.X[:, 1 + self.included] - self.means) / self.sds)
        self.effective = effective_weights(data, weights, standardize)
        self.thresholds = self.effective[self.included] / self.sds

    def to_standard(self, vector):
        beta = vector[1 + self.included]
        b = beta * self.sds
        a = vector[0] + float(np.dot(self.means, beta))
        return a, b

    def to_original(self, a, b):
        vector = np.zeros(self.data.p + 1)
        beta = b / self.sds
        vector[1 + self.included] = beta
        vector[0] = a - float(np.dot(self.means, beta))
        return vector

    def smooth(self, eta):
        return float(np.sum(self.v * (np.logaddexp(0.0, eta) - self.y * eta)))

    def objective(self, a, b, lam):
        eta = a + self.Z @ b
        return self.smooth(eta) + lam * float(np.sum(self.thresholds[b != 0.0] * np.abs(b[b != 0.0])))


def _soft_threshold(u, threshold):
    if abs(u) <= threshold:
        return 0.0
    return math.copysign(abs(u) - threshold, u)


def _coordinate_descent(Z, h, r, a, b, thresholds, inner_tol, max_sweeps):
    """
    Minimizes 1/2 sum_i h_i (r_i - da - z_i' db)^2 + sum_j thresholds_j |b_j + db_j|
    by cyclic coordinate descent with an active-set cycle; r and b are updated in place

    Returns:
        (a, sweeps)
    """
    h_sum = float(np.sum(h))
    HZ = np.asfortranarray(Z * h[:, None])
    xv = np.einsum("ij,ij->j", HZ, Z)
    sweeps = 0
    everything = range(b.shape[0])

    def sweep(indices, a, r):
        delta = float(np.dot(h, r)) / h_sum
        change = abs(delta)
        if delta != 0.0:
            a += delta
            r -= delta
        for j in indices:
            if xv[j] <= 0.0:
                continue
            old = b[j]
            u = float(np.dot(HZ[:, j], r)) + xv[j] * old
            new = _soft_threshold(u, thresholds[j]) / xv[j]
            if new != old:
                r -= (new - old) * Z[:, j]
                b[j] = new
                change = max(change, abs(new - old) * math.sqrt(xv[j] / h_sum))
        return a, change

    while sweeps < max_sweeps:
        a, change = sweep(everything, a, r)
        sweeps += 1
        if change < inner_tol:
            break
        while sweeps < max_sweeps:
            active = np.flatnonzero(b)
            a, change = sweep(active, a, r)
            sweeps += 1
            if change < inner_tol:
                break
    return a, sweeps


def _irls(problem, a, b, lam, tol, max_iter, inner_tol=1e-10):
    """
    Outer iteratively reweighted least squares loop

    Returns:
        (a, b, sweeps, converged, degenerate)
    """
    thresholds = lam * problem.thresholds
    obj = problem.objective(a, b, lam)
    sweeps = 0
    quiet = 0
    for _ in range(_MAX_OUTER):
        eta = a + problem.Z @ b
        mu = expit(eta)
        q = np.clip(mu * (1.0 - mu), _WORKING_CLAMP * (1.0 - _WORKING_CLAMP), None)
        h = problem.v * q
        if float(np.sum(h)) <= 1e-12 * float(np.sum(problem.v)):
            logging.info("fit_penalized: IRLS working weights degenerate; switching to proximal gradient")
            return a, b, sweeps, False, True
        r = (problem.y - mu) / q
        new_b = b.copy()
        new_a, used = _coordinate_descent(problem.Z, h, r, a, new_b, thresholds, inner_tol, max_iter - sweeps)
        sweeps += used
        new_obj = problem.objective(new_a, new_b, lam)
        if new_obj > obj + 1e-13 * max(1.0, abs(obj)):
            # Backtrack along the quadratic-model step
            step = 1.0
            for _ in range(40):
                step *= 0.5
                try_a = a + step * (new_a - a)
                try_b = b + step * (new_b - b)
                try_obj = problem.objective(try_a, try_b, lam)
                if try_obj <= obj:
                    new_a, new_b, new_obj = try_a, try_b, try_obj
                    break
            else:
                logging.info("fit_penalized: IRLS step failed to decrease the objective; switching to proximal gradient")
                return a, b, sweeps, False, True
        change = max(abs(new_a - a), float(np.max(np.abs(new_b - b), initial=0.0)))
        relative = abs(obj - new_obj) / max(abs(new_obj), 1e-10)
        a, b, obj = new_a, new_b, new_obj
        if relative < tol:
            quiet += 1
            if change < 1e-7 or quiet >= 3:
                return a, b, sweeps, True, False
        else:
            quiet = 0
        if sweeps >= max_iter:
            break
    return a, b, sweeps, False, False


def _proximal_gradient(problem, a, b, lam, tol, max_iter):
    """
    Accelerated proximal gradient (FISTA with backtracking) on the standardized objective

    Returns:
        (a, b, steps, converged)
    """
    thresholds = lam * problem.thresholds
    Z, v, y = problem.Z, problem.v, problem.y

    def smooth_and_grad(a, b):
        eta = a + Z @ b
        resid = v * (expit(eta) - y)
        return problem.smooth(eta), float(np.sum(resid)), Z.T @ resid

    step_inv = 0.25 * float(np.sum(v)) * (1.0 + Z.shape[1])
    ya, yb = a, b.copy()
    momentum = 1.0
    obj = problem.objective(a, b, lam)
    for step_count in range(1, max_iter + 1):
        f_y, ga, gb = smooth_and_grad(ya, yb)
        while True:
            na = ya - ga / step_inv
            z = yb - gb / step_inv
            nb = np.sign(z) * np.maximum(np.abs(z) - thresholds / step_inv, 0.0)
            da, db = na - ya, nb - yb
            bound = f_y + ga * da + float(gb @ db) + 0.5 * step_inv * (da * da + float(db @ db))
            if problem.smooth(na + Z @ nb) <= bound + 1e-15:
                break
            step_inv *= 2.0
        new_obj = problem.objective(na, nb, lam)
        next_momentum = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * momentum * momentum))
        ya = na + (momentum - 1.0) / next_momentum * (na - a)
        yb = nb + (momentum - 1.0) / next_momentum * (nb - b)
        momentum = next_momentum
        relative = abs(obj - new_obj) / max(abs(new_obj), 1e-10)
        a, b, obj = na, nb, new_obj
        if relative < tol * 1e-2:
            return a, b, step_count, True
    return a, b, max_iter, False


def _polish_intercept(data, vector, max_steps=50):
    """One-dimensional Newton steps on the unpenalized intercept until S_0 vanishes"""
    base = data.X[:, 1:] @ vector[1:]
    v = data.w / data.n
    for _ in range(max_steps):
        mu = expit(vector[0] + base)
        gradient = float(np.sum(v * (mu - data.y)))
        if abs(gradient) <= 1e-14:
            break
        curvature = float(np.sum(v * mu * (1.0 - mu)))
        if curvature <= 0.0:
            break
        vector[0] -= gradient / curvature
    return vector


def penalized_objective(data, theta, lam, penalty_weights):
    vector = theta_vector(data, theta)
    beta = vector[1:]
    nonzero = beta != 0.0
    return -weighted_loglik(data, vector) + lam * float(np.sum(np.asarray(penalty_weights)[nonzero] * np.abs(beta[nonzero])))


def fit_penalized(data, penalty, init=None, tol=1e-8, max_iter=100000, standardize=True, log_level=logging.WARNING):
    """
    Solves argmin -L_n(theta) + lam * sum_j w_j |beta_j| with an unpenalized intercept

    Args:
        data: The Dataset
        penalty: A PenaltySpec
        init: Optional starting Theta (or vector) on the original scale
        tol: Relative change in the penalized objective that ends the iteration
        max_iter: Maximum number of coordinate sweeps
        standardize: Apply the penalty to standardized coefficients (glmnet default)
        log_level: Level of the separation and non-convergence messages

    Returns:
        A FitResult; non-convergence is reported through its converged flag
    """
    weights = penalty.weights_for(data.p)
    problem = _StandardizedProblem(data, weights, standardize)
    if init is None:
        a, b = null_intercept(data), np.zeros(problem.included.shape[0])
    else:
        a, b = problem.to_standard(theta_vector(data, init))
    a, b, iterations, converged, degenerate = _irls(problem, a, b, penalty.lam, tol, max_iter)
    solver = "irls-cd"
    if degenerate:
        solver = "proximal-gradient"
        a, b, steps, converged = _proximal_gradient(problem, a, b, penalty.lam, tol, max(max_iter - iterations, 1))
        iterations += steps
    vector = _polish_intercept(data, problem.to_original(a, b))
    separation = bool(np.linalg.norm(vector) > _SEPARATION_NORM)
    if separation:
        logging.log(log_level, "fit_penalized: coefficient norm {:.3e} exceeds {:.0e}; data look quasi-separated"
                        .format(np.linalg.norm(vector), _SEPARATION_NORM))
    if not converged:
        logging.log(log_level, "fit_penalized: no convergence at lambda={:.4g} after {} iterations".format(penalty.lam, iterations))
    active = tuple(int(j) + 1 for j in np.flatnonzero(vector[1:]))
    objective = penalized_objective(data, vector, penalty.lam, problem.effective)
    logging.debug("fit_penalized: lambda={:.4g}, active={}, objective={:.10g}, solver={}, iterations={}"
                  .format(penalty.lam, len(active), objective, solver, iterations))
    return FitResult(Theta.from_vector(vector), penalty.lam, active, len(active), iterations, objective,
                     converged, problem.effective, separation, solver, problem.excluded)


def kkt_violations(data, fit):
    """
    Stationarity violations of a fit

    Returns:
        A dict with the largest violation over active coefficients
        (|S_j - lam w_j sign(beta_j)|), inactive coefficients (max(|S_j| - lam w_j, 0))
        and the intercept (|S_0|)
    """
    vector = fit.theta_vector
    grad = score(data, vector)
    weights = fit.penalty_weights
    active = np.asarray(fit.active_set, dtype=int)
    inactive = np.setdiff1d(np.arange(1, data.p + 1), active)
    active_gap = 0.0
    if active.size:
        target = fit.lam * weights[active - 1] * np.sign(vector[active])
        active_gap = float(np.max(np.abs(grad[active] - target)))
    inactive_gap = 0.0
    if inactive.size:
        with np.errstate(invalid="ignore"):
            slack = np.abs(grad[inactive]) - fit.lam * weights[inactive - 1]
        slack = slack[np.isfinite(slack)]
        if slack.size:
            inactive_gap = float(max(np.max(slack), 0.0))
    return {"active": active_gap, "inactive": inactive_gap, "intercept": float(abs(grad[0]))}


def lambda_max(data, penalty_weights, standardize=True):
    """
    Smallest lambda at which every penalized slope is zero

    Args:
        data: The Dataset
        penalty_weights: Per-coefficient penalty weights (length p), as given to PenaltySpec
        standardize: Whether fit_penalized will standardize (weights then act as w_j * sd_j)

    Returns:
        max_j |S_j(theta_null)| / w_j over the penalized regressors, with w the
        effective original-scale weights
    """
    weights = np.asarray(penalty_weights, dtype=float)
    if weights.shape[0] != data.p:
        raise DomainError("expected {} penalty weights, got {}".format(data.p, weights.shape[0]))
    if not np.any(weights > 0.0):
        raise DomainError("lambda_max needs at least one positive penalty weight")
    zero_variance, infinite = _held_columns(data, weights)
    held = zero_variance | infinite
    effective = effective_weights(data, weights, standardize)
    unpenalized = np.flatnonzero((weights == 0.0) & ~held) + 1
    if unpenalized.size:
        null_theta = fit_weighted_mle(data, columns=unpenalized).theta_hat
    else:
        null_theta = np.zeros(data.p + 1)
        null_theta[0] = null_intercept(data)
    grad = np.abs(score(data, null_theta)[1:])
    penalized = (weights > 0.0) & ~held
    if not np.any(penalized):
        return 0.0
    return float(np.max(grad[penalized] / effective[penalized]))


def lambda_grid(lam_max, grid_size=100, min_ratio=1e-4):
    """Log-spaced descending grid from lam_max down to min_ratio * lam_max"""
    if lam_max <= 0.0 or grid_size < 2:
        return np.array([max(lam_max, 0.0)])
    return np.geomspace(lam_max, min_ratio * lam_max, grid_size)


def fit_path(data, grid, penalty_weights=None, standardize=True, tol=1e-8, max_iter=100000):
    """Fits a descending lambda grid with warm starts"""
    fits = []
    init = None
    for lam in grid:
        fit = fit_penalized(data, PenaltySpec(lam, penalty_weights), init=init, tol=tol, max_iter=max_iter,
                            standardize=standardize, log_level=logging.DEBUG)
        fits.append(fit)
        init = fit.theta_hat
    return fits


def weighted_auc(scores, labels, weights):
    """
    Weighted Mann-Whitney AUC: sum over positive/negative pairs of
    w_i w_j [1(s_i > s_j) + 1/2 1(s_i = s_j)] divided by the product of class weight totals
    """
    labels = np.asarray(labels, dtype=float)
    weights = np.asarray(weights, dtype=float)
    if not np.all(np.isin(labels, (0.0, 1.0))):
        raise DomainError("AUC labels must be 0/1")
    positive = float(np.sum(weights[labels == 1.0]))
    negative = float(np.sum(weights[labels == 0.0]))
    if positive <= 0.0 or negative <= 0.0:
        raise DomainError("AUC needs both outcome classes present with positive weight")
    return float(roc_auc_score(labels, np.asarray(scores, dtype=float), sample_weight=weights))


def _make_folds(data, n_folds, rng):
    for attempt in range(1, _FOLD_RETRIES + 1):
        fold_seed = int(rng.integers(0, 2 ** 31 - 1))
        folds = np.empty(data.n, dtype=int)
        splitter = KFold(n_splits=n_folds, shuffle=True, random_state=fold_seed)
        for k, (_, test) in enumerate(splitter.split(np.zeros(data.n))):
            folds[test] = k
        usable = True
        for k in range(n_folds):
            train_y = data.y[folds != k]
            test_y = data.y[folds == k]
            if np.unique(train_y).size < 2 or np.unique(test_y).size < 2:
                usable = False
                break
        if usable:
            return folds
        logging.debug("cv_select_lambda: fold assignment {} left a fold with one class; re-randomizing".format(attempt))
    raise FoldConstructionError("could not build {} folds with both outcome classes after {} attempts"
                                .format(n_folds, _FOLD_RETRIES))


def _fold_scores(data, folds, k, grid, weights, standardize, tol, max_iter):
    train = data.subset(np.flatnonzero(folds != k))
    test_rows = np.flatnonzero(folds == k)
    fits = fit_path(train, grid, weights, standardize, tol, max_iter)
    X_test = data.X[test_rows]
    return np.array([weighted_auc(X_test @ fit.theta_vector, data.y[test_rows], data.w[test_rows]) for fit in fits])


def cv_select_lambda(data, n_folds=10, grid_size=100, *, seed, penalty_weights=None, standardize=True,
                     min_ratio=1e-4, workers=1, tol=1e-8, max_iter=100000):
    """
    Selects lambda by n_folds-fold cross-validated weighted AUC

    Args:
        data: The Dataset
        n_folds: Number of folds
        grid_size: Number of lambda values
        seed: Seed of the fold assignment
        penalty_weights: Per-coefficient penalty weights (default all ones)
        standardize: Penalize standardized coefficients
        min_ratio: Smallest grid value relative to lambda_max
        workers: Threads used to fit folds concurrently

    Returns:
        A LambdaPath; ties in mean AUC resolve to the largest lambda
    """
    if seed is None:
        raise UsageError("cross-validation requires a seed")
    if data.n < n_folds:
        raise DomainError("cross-validation needs n >= n_folds ({} < {})".format(data.n, n_folds))
    if n_folds < 2:
        raise DomainError("cross-validation needs at least two folds")
    if np.unique(data.y).size < 2:
        raise DomainError("cross-validated AUC needs both outcome classes in the data")
    weights = np.ones(data.p) if penalty_weights is None else np.asarray(penalty_weights, dtype=float)
    rng = np.random.default_rng(seed)
    folds = _make_folds(data, n_folds, rng)
    if data.p == 0 or not np.any(weights > 0.0):
        lam_max = 0.0
    else:
        lam_max = lambda_max(data, weights, standardize)
    grid = lambda_grid(lam_max, grid_size, min_ratio)

    def run(k):
        return _fold_scores(data, folds, k, grid, weights, standardize, tol, max_iter)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, range(n_folds)))
    else:
        rows = [run(k) for k in range(n_folds)]
    cv_scores = np.vstack(rows)
    mean_scores = cv_scores.mean(axis=0)
    se_scores = cv_scores.std(axis=0, ddof=1) / math.sqrt(n_folds)
    # argmax returns the first maximum, i.e. the largest lambda among ties
    best = int(np.argmax(mean_scores))
    one_se = int(np.flatnonzero(mean_scores >= mean_scores[best] - se_scores[best])[0])
    logging.info("cv_select_lambda: lambda_max={:.4g}, selected={:.4g} (AUC {:.4f}), one-SE={:.4g}"
                 .format(lam_max, grid[best], mean_scores[best], grid[one_se]))
    return LambdaPath(grid, cv_scores, mean_scores, se_scores, float(grid[best]), float(grid[one_se]), seed,
                      folds, lam_max, n_folds, weights)


def adaptive_weights(initial_fit, gamma=1.0, floor=0.0):
    """
    Adaptive Lasso weights 1 / (|beta_init_j|^gamma + floor); coefficients that
    are exactly zero with floor 0 get infinite weight and stay excluded
    """
    if not initial_fit.converged:
        logging.warning("adaptive_weights: initial fit did not converge; weights may be unreliable")
    magnitude = np.abs(initial_fit.theta_hat.beta) ** gamma + floor
    with np.errstate(divide="ignore"):
        return np.where(magnitude > 0.0, 1.0 / np.where(magnitude > 0.0, magnitude, 1.0), np.inf)


def fit_adaptive(data, n_folds=10, grid_size=100, *, seed, gamma=1.0, floor=0.0, standardize=True, workers=1):
    """
    Two-stage adaptive Lasso: a cross-validated Lasso supplies the weights of a
    second cross-validated fit on the same folds

    Returns:
        (fit, path, weights)
    """
    first_path = cv_select_lambda(data, n_folds, grid_size, seed=seed, standardize=standardize, workers=workers)
    first = fit_penalized(data, PenaltySpec(first_path.selected_lambda), standardize=standardize)
    weights = adaptive_weights(first, gamma, floor)
    if not np.any(np.isfinite(weights)):
        logging.warning("fit_adaptive: the initial Lasso selected nothing; the adaptive fit is intercept-only")
        return first, first_path, weights
    path = cv_select_lambda(data, n_folds, grid_size, seed=seed, penalty_weights=weights, standardize=standardize,
                            workers=workers)
    fit = fit_penalized(data, PenaltySpec(path.selected_lambda, weights), standardize=standardize)
    return fit, path, weights


def theory_lambda(n, p, constant=1.0):
    """Rate-order tuning parameter constant * sqrt(log p / n)"""
    return constant * math.sqrt(math.log(max(p, 2)) / n)
