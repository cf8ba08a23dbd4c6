# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

"""
Debiased Inference

File : debias.py

Brief : This file contains the one-step debiasing correction of the svy LLasso
        estimate, the debiased smooth-functional estimator with its sandwich
        covariance, Wald tests, and the survey-weighted t-test at the
        unpenalized MLE used as the comparison test
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import linalg
from scipy.stats import chi2, norm
from scipy.stats import t as t_dbn

from svylasso.errors import DimensionError, DomainError, RankDeficientError, SeparationError, SingularHessianError
from svylasso.glm import Theta, fit_weighted_mle, likelihood_parts

_EIGEN_FLOOR = 1e-10
# Policies of svy_mle_ttest for a separated or non-converged MLE
RAISE = "raise"
REPORT = "report"


@dataclass(frozen=True, eq=False)
class SmoothFunctional:
    """
    rho(theta) in R^r with its Jacobian rho_dot(theta) of shape (p + 1, r)
    """

    evaluate: Callable
    jacobian: Callable
    names: tuple = ()


def linear_functional(matrix, names=()):
    """rho(theta) = C theta for an (r, p + 1) matrix C"""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    return SmoothFunctional(lambda theta: matrix @ np.asarray(theta, dtype=float),
                            lambda theta: matrix.T.copy(), tuple(names))


def coordinate_functional(p, indices=None, names=()):
    """Projection of theta onto the given positions (all of them by default)"""
    indices = np.arange(p + 1) if indices is None else np.atleast_1d(np.asarray(indices, dtype=int))
    return linear_functional(np.eye(p + 1)[indices], names)


@dataclass(frozen=True, eq=False)
class DebiasedEstimate:
    """
    Debiased point estimate with its sandwich covariance.

    Standard errors follow sqrt(diag(covariance) / n), so that
    (estimate - null) / std_error is the n^(1/2)-studentized Wald statistic.
    wald_stats and p_values test each component against zero.
    """

    estimate: np.ndarray
    covariance: np.ndarray
    std_errors: np.ndarray
    wald_stats: np.ndarray
    p_values: np.ndarray
    n: int
    plug_in: np.ndarray
    names: tuple = ()
    diagnostics: dict = field(default_factory=dict)

    @property
    def theta_tilde(self):
        return Theta.from_vector(self.estimate)

    @property
    def rho_tilde(self):
        return self.estimate

    @property
    def r(self):
        return self.estimate.shape[0]


@dataclass(frozen=True, eq=False)
class _Sandwich:
    correction: np.ndarray
    hessian_inverse: np.ndarray
    info: np.ndarray
    diagnostics: dict


def _sandwich_parts(data, fit, ridge):
    vector = fit.theta_vector
    parts = likelihood_parts(data, vector)
    hessian = parts.hessian
    min_eigenvalue = float(linalg.eigvalsh(hessian)[0])
    diagnostics = {"min_hessian_eigenvalue": min_eigenvalue, "ridge_jitter": 0.0}
    if min_eigenvalue <= _EIGEN_FLOOR:
        if not ridge:
            raise SingularHessianError(min_eigenvalue)
        jitter = 1e-8 * float(np.trace(hessian)) / (data.p + 1)
        hessian = hessian + jitter * np.eye(data.p + 1)
        diagnostics["ridge_jitter"] = jitter
        logging.warning("debias: negative Hessian near singular (min eigenvalue {:.3e}); ridge jitter {:.3e} added"
                        .format(min_eigenvalue, jitter))
    try:
        factor = linalg.cho_factor(hessian, lower=True)
    except linalg.LinAlgError:
        raise SingularHessianError(min_eigenvalue)
    correction = linalg.cho_solve(factor, parts.score)
    hessian_inverse = linalg.cho_solve(factor, np.eye(data.p + 1))
    hessian_inverse = 0.5 * (hessian_inverse + hessian_inverse.T)
    p = max(data.p, 1)
    diagnostics["m0_hat"] = fit.m0_hat
    diagnostics["rate_diagnostic"] = fit.m0_hat * math.log(p) * math.sqrt(p / data.n)
    return _Sandwich(correction, hessian_inverse, parts.info, diagnostics)


def _studentize(estimate, covariance, n, plug_in, names, diagnostics):
    covariance = 0.5 * (covariance + covariance.T)
    variances = np.clip(np.diag(covariance), 0.0, None)
    std_errors = np.sqrt(variances / n)
    with np.errstate(divide="ignore", invalid="ignore"):
        wald = np.where(std_errors > 0.0, estimate / std_errors, np.nan)
    p_values = np.where(np.isnan(wald), np.nan, 2.0 * norm.sf(np.abs(wald)))
    return DebiasedEstimate(estimate, covariance, std_errors, wald, p_values, n, plug_in, tuple(names), diagnostics)


def debias_theta(data, fit, ridge=False):
    """
    One-step debiased coefficients theta_tilde = theta_hat + H^-1 S at theta_hat

    Args:
        data: The Dataset the fit was computed on
        fit: A FitResult
        ridge: Add a 1e-8 * trace / (p + 1) ridge when H is near singular instead of raising

    Returns:
        A DebiasedEstimate with covariance H^-1 I H^-1
    """
    if not fit.converged:
        logging.warning("debias_theta: penalized fit did not converge; debiasing anyway")
    sandwich = _sandwich_parts(data, fit, ridge)
    theta_hat = fit.theta_vector
    estimate = theta_hat + sandwich.correction
    covariance = sandwich.hessian_inverse @ sandwich.info @ sandwich.hessian_inverse
    names = ("(Intercept)",) + tuple(data.column_names)
    return _studentize(estimate, covariance, data.n, theta_hat, names, sandwich.diagnostics)


def debias_functional(data, fit, rho, ridge=False):
    """
    Debiased functional rho_tilde = rho(theta_hat) + rho_dot' H^-1 S at theta_hat

    Args:
        data: The Dataset the fit was computed on
        fit: A FitResult
        rho: A SmoothFunctional
        ridge: As in debias_theta

    Returns:
        A DebiasedEstimate with covariance rho_dot' H^-1 I H^-1 rho_dot
    """
    if not fit.converged:
        logging.warning("debias_functional: penalized fit did not converge; debiasing anyway")
    theta_hat = fit.theta_vector
    jacobian = np.asarray(rho.jacobian(theta_hat), dtype=float)
    if jacobian.ndim == 1:
        jacobian = jacobian[:, None]
    if jacobian.shape[0] != data.p + 1:
        raise DimensionError("functional Jacobian has {} rows, expected {}".format(jacobian.shape[0], data.p + 1))
    gram_eigenvalue = float(linalg.eigvalsh(jacobian.T @ jacobian)[0])
    if gram_eigenvalue <= _EIGEN_FLOOR:
        raise RankDeficientError(gram_eigenvalue)
    sandwich = _sandwich_parts(data, fit, ridge)
    plug_in = np.atleast_1d(np.asarray(rho.evaluate(theta_hat), dtype=float))
    estimate = plug_in + jacobian.T @ sandwich.correction
    bread = sandwich.hessian_inverse @ jacobian
    covariance = bread.T @ sandwich.info @ bread
    names = rho.names if rho.names else tuple("rho{}".format(k) for k in range(1, plug_in.shape[0] + 1))
    return _studentize(estimate, covariance, data.n, plug_in, names, sandwich.diagnostics)


def wald_test(est, null_value, index=None):
    """
    Wald test of H0: rho = null_value

    Args:
        est: A DebiasedEstimate
        null_value: Null value (scalar or r-vector; a scalar when index is given)
        index: Test only this component

    Returns:
        (statistic, p_value); a standard-normal z for one component, a
        chi-square quadratic form with r degrees of freedom otherwise
    """
    if index is not None:
        null = float(np.ravel(np.asarray(null_value, dtype=float))[0])
        se = est.std_errors[index]
        if not se > 0.0:
            raise DomainError("component {} has zero standard error".format(index))
        z = (est.estimate[index] - null) / se
        return float(z), float(2.0 * norm.sf(abs(z)))
    null = np.atleast_1d(np.asarray(null_value, dtype=float))
    if null.shape[0] != est.r:
        raise DimensionError("null value has {} entries, estimate has {}".format(null.shape[0], est.r))
    diff = est.estimate - null
    if est.r == 1:
        se = est.std_errors[0]
        if not se > 0.0:
            raise DomainError("estimate has zero standard error")
        z = diff[0] / se
        return float(z), float(2.0 * norm.sf(abs(z)))
    quadratic = float(est.n * diff @ linalg.solve(est.covariance, diff, assume_a="sym"))
    return quadratic, float(chi2.sf(quadratic, est.r))


def confidence_intervals(est, level=0.95):
    """Componentwise Wald intervals estimate +/- z_(1 - (1 - level) / 2) * std_error"""
    z = norm.ppf(0.5 + 0.5 * level)
    return np.column_stack((est.estimate - z * est.std_errors, est.estimate + z * est.std_errors))


@dataclass(frozen=True, eq=False)
class TTestResult:
    statistic: float
    p_value: float
    estimate: float
    std_error: float
    df: int
    theta_mle: Optional[np.ndarray] = None
    converged: bool = True
    separation: bool = False

    @property
    def nonconverged(self):
        return self.separation or not self.converged

    def __iter__(self):
        return iter((self.statistic, self.p_value))


def svy_mle_ttest(data, null_value, coefficient_index=None, ame_index=None, max_iter=25, nonconverged=RAISE):
    """
    Standard survey t-test at the unpenalized weighted MLE with the sandwich
    covariance H^-1 I H^-1 (delta method for an AME)

    Args:
        data: The Dataset
        null_value: Value of the coefficient or AME under H0
        coefficient_index: Position in theta of the tested coefficient
        ame_index: Position in theta of the dummy regressor whose AME is tested
        max_iter: Newton steps allowed for the MLE
        nonconverged: RAISE to fail on separation or non-convergence; REPORT to
            test the last Newton iterate anyway (as survey GLM software does)
            and flag the result

    Returns:
        A TTestResult; the reference distribution is Student t with the design
        degrees of freedom (n minus the number of strata)
    """
    from svylasso.marginal import ame

    if (coefficient_index is None) == (ame_index is None):
        raise DomainError("give exactly one of coefficient_index and ame_index")
    if nonconverged not in (RAISE, REPORT):
        raise DomainError("nonconverged must be '{}' or '{}', got {!r}".format(RAISE, REPORT, nonconverged))
    if nonconverged == RAISE:
        mle = fit_weighted_mle(data, max_iter=max_iter)
        if mle.separation or not mle.converged:
            raise SeparationError("unpenalized weighted MLE does not exist or did not converge "
                                  "(converged={}, separation={})".format(mle.converged, mle.separation))
    else:
        mle = fit_weighted_mle(data, max_iter=max_iter, stop_on_divergence=False, log_level=logging.DEBUG)
    parts = likelihood_parts(data, mle.theta_hat)
    min_eigenvalue = float(linalg.eigvalsh(parts.hessian)[0])
    if min_eigenvalue > _EIGEN_FLOOR:
        factor = linalg.cho_factor(parts.hessian, lower=True)
        hessian_inverse = linalg.cho_solve(factor, np.eye(data.p + 1))
    elif nonconverged == REPORT:
        logging.debug("svy_mle_ttest: Hessian eigenvalue {:.3e} at the last iterate; using the pseudo-inverse"
                      .format(min_eigenvalue))
        hessian_inverse = linalg.pinvh(parts.hessian)
    else:
        raise SingularHessianError(min_eigenvalue)
    covariance = hessian_inverse @ parts.info @ hessian_inverse
    if coefficient_index is not None:
        estimate = float(mle.theta_hat[coefficient_index])
        variance = float(covariance[coefficient_index, coefficient_index])
    else:
        effect = ame(data, mle.theta_hat, ame_index)
        estimate = effect.ame_hat
        gradient = effect.jacobian_column
        variance = float(gradient @ covariance @ gradient)
    std_error = math.sqrt(max(variance, 0.0) / data.n)
    if not std_error > 0.0:
        raise DomainError("tested quantity has zero standard error")
    statistic = (estimate - float(null_value)) / std_error
    df = data.design_df
    return TTestResult(statistic, float(2.0 * t_dbn.sf(abs(statistic), df)), estimate, std_error, df, mle.theta_hat,
                       mle.converged, mle.separation)
