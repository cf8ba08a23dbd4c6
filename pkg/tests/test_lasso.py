# Copyright Notice:
# Copyright 2026 svy-llasso contributors. All rights reserved.
# License: BSD 3-Clause License. For full text see link: LICENSE.md

import math
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from svylasso.errors import DomainError, UsageError
from svylasso.glm import Dataset, Theta
from svylasso.lasso import (FitResult, PenaltySpec, adaptive_weights, cv_select_lambda, effective_weights,
                            fit_adaptive, fit_path, fit_penalized, kkt_violations, lambda_grid, lambda_max,
                            theory_lambda, weighted_auc)
from tests.synthetic import logit_dataset, newton_mle


def fit_with_beta(beta):
    beta = np.asarray(beta, dtype=float)
    active = tuple(int(j) + 1 for j in np.flatnonzero(beta))
    return FitResult(Theta(0.0, beta), 0.1, active, len(active), 1, 0.0, True, np.ones(beta.shape[0]))


class PenaltySpecTest(unittest.TestCase):

    def test_rejects_negative_lambda(self):
        with self.assertRaises(DomainError):
            PenaltySpec(-1.0)

    def test_rejects_penalized_intercept(self):
        with self.assertRaises(DomainError):
            PenaltySpec(1.0, penalize_intercept=True)

    def test_weights_length_checked(self):
        with self.assertRaises(DomainError):
            PenaltySpec(1.0, [1.0, 1.0]).weights_for(3)
        with self.assertRaises(DomainError):
            PenaltySpec(1.0, [1.0, -1.0])
        assert_array_equal(PenaltySpec(1.0).weights_for(2), [1.0, 1.0])


class FitPenalizedTest(unittest.TestCase):

    def test_intercept_only(self):
        data = Dataset([1, 1, 0, 0], np.ones((4, 1)), np.ones(4))
        fit = fit_penalized(data, PenaltySpec(0.5))
        self.assertAlmostEqual(fit.theta_hat.alpha, 0.0, places=8)
        self.assertEqual(fit.active_set, ())

    def test_above_lambda_max_everything_is_zero(self):
        rng = np.random.default_rng(1)
        data = logit_dataset(rng, 200, [0.3, 1.0, -0.5, 0.0])
        fit = fit_penalized(data, PenaltySpec(1.01 * lambda_max(data, np.ones(data.p))))
        assert_array_equal(fit.theta_hat.beta, np.zeros(data.p))
        mean = np.sum(data.w * data.y) / np.sum(data.w)
        self.assertAlmostEqual(1.0 / (1.0 + math.exp(-fit.theta_hat.alpha)), mean, places=8)
        self.assertEqual(fit.m0_hat, 0)

    def test_just_below_lambda_max_something_enters(self):
        rng = np.random.default_rng(2)
        data = logit_dataset(rng, 200, [0.3, 1.0, -0.5, 0.0])
        fit = fit_penalized(data, PenaltySpec(0.9 * lambda_max(data, np.ones(data.p))))
        self.assertGreater(fit.m0_hat, 0)

    def test_lambda_zero_matches_newton_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            p = int(rng.integers(1, 8))
            theta = rng.normal(0.0, 0.7, p + 1)
            data = logit_dataset(rng, int(rng.integers(200, 500)), theta, binary=bool(rng.integers(2)))
            fit = fit_penalized(data, PenaltySpec(0.0))
            self.assertTrue(fit.converged)
            assert_allclose(fit.theta_vector, newton_mle(data), atol=1e-6)

    def test_kkt_certificate_on_random_instances(self):
        rng = np.random.default_rng(2024)
        checked = 0
        for _ in range(200):
            p = int(rng.integers(2, 15))
            n = int(rng.integers(100, 300))
            theta = np.concatenate(([rng.normal(0.0, 0.5)], rng.normal(0.0, 1.0, p) * (rng.random(p) < 0.5)))
            data = logit_dataset(rng, n, theta, binary=bool(rng.integers(2)))
            standardize = bool(rng.integers(2))
            weights = rng.uniform(0.5, 2.0, p)
            lam = rng.uniform(0.05, 0.9) * lambda_max(data, weights, standardize)
            fit = fit_penalized(data, PenaltySpec(lam, weights), standardize=standardize)
            if not fit.converged:
                continue
            checked += 1
            gaps = kkt_violations(data, fit)
            self.assertLessEqual(gaps["active"], 1e-6 * max(1.0, lam))
            self.assertLessEqual(gaps["inactive"], 1e-6)
            self.assertLessEqual(gaps["intercept"], 1e-8)
        self.assertGreater(checked, 180)

    def test_unstandardized_weights_are_used_as_given(self):
        rng = np.random.default_rng(4)
        data = logit_dataset(rng, 150, [0.0, 1.0, 1.0], binary=False)
        fit = fit_penalized(data, PenaltySpec(0.01, [1.0, 2.0]), standardize=False)
        assert_allclose(fit.penalty_weights, [1.0, 2.0])

    def test_infinite_weight_excludes_column(self):
        rng = np.random.default_rng(8)
        data = logit_dataset(rng, 200, [0.0, 1.5, 1.5])
        fit = fit_penalized(data, PenaltySpec(0.001, [1.0, np.inf]))
        self.assertEqual(fit.theta_hat.beta[1], 0.0)
        self.assertIn(2, fit.excluded)
        self.assertNotEqual(fit.theta_hat.beta[0], 0.0)

    def test_zero_variance_column_held_at_zero(self):
        rng = np.random.default_rng(9)
        base = logit_dataset(rng, 100, [0.0, 1.0])
        X = np.column_stack((base.X, np.full(100, 3.0)))
        data = Dataset(base.y, X, base.w)
        with self.assertLogs(level="WARNING"):
            fit = fit_penalized(data, PenaltySpec(0.01))
        self.assertEqual(fit.theta_hat.beta[1], 0.0)

    def test_objective_is_reported(self):
        rng = np.random.default_rng(10)
        data = logit_dataset(rng, 100, [0.0, 1.0, -1.0])
        fit = fit_penalized(data, PenaltySpec(0.02))
        self.assertTrue(np.isfinite(fit.objective))
        self.assertEqual(fit.m0_hat, len(fit.active_set))

    def test_objective_grows_with_lambda(self):
        rng = np.random.default_rng(14)
        data = logit_dataset(rng, 200, [0.2, 1.0, -0.7, 0.3, 0.0])
        lam = lambda_max(data, np.ones(data.p))
        objectives = [fit.objective for fit in fit_path(data, lambda_grid(lam, 15, 1e-3))]
        # grid is descending, so objectives must not increase along it
        self.assertTrue(all(later <= earlier + 1e-7 for earlier, later in zip(objectives, objectives[1:])))

    def test_weight_scaling_equivariance(self):
        rng = np.random.default_rng(15)
        data = logit_dataset(rng, 200, [0.0, 1.0, -1.0, 0.5])
        scaled = data.with_weights(3.0 * data.w)
        fit = fit_penalized(data, PenaltySpec(0.02))
        rescaled = fit_penalized(scaled, PenaltySpec(0.06))
        assert_allclose(rescaled.theta_vector, fit.theta_vector, atol=1e-5)


class LambdaPathTest(unittest.TestCase):

    def test_lambda_max_zero_for_orthogonal_regressor(self):
        data = Dataset([1, 0, 1, 0], [[1, 1], [1, 1], [1, 0], [1, 0]], np.ones(4))
        self.assertEqual(lambda_max(data, [1.0]), 0.0)

    def test_lambda_max_needs_a_positive_weight(self):
        data = Dataset([1, 0, 1, 0], [[1, 1], [1, 1], [1, 0], [1, 0]], np.ones(4))
        with self.assertRaises(DomainError):
            lambda_max(data, [0.0])

    def test_lambda_max_with_unpenalized_column(self):
        rng = np.random.default_rng(12)
        data = logit_dataset(rng, 200, [0.2, 1.0, 0.5])
        weights = np.array([0.0, 1.0])
        lam = lambda_max(data, weights, standardize=False)
        fit = fit_penalized(data, PenaltySpec(1.01 * lam, weights), standardize=False)
        self.assertEqual(fit.theta_hat.beta[1], 0.0)
        self.assertNotEqual(fit.theta_hat.beta[0], 0.0)

    def test_lambda_max_takes_the_fit_weights(self):
        rng = np.random.default_rng(19)
        weights = np.array([1.0, 2.0, 0.5])
        for standardize in (True, False):
            data = logit_dataset(rng, 300, [0.3, 1.0, -0.8, 0.5])
            lam = lambda_max(data, weights, standardize)
            above = fit_penalized(data, PenaltySpec(1.01 * lam, weights), standardize=standardize)
            self.assertEqual(above.active_set, ())
            below = fit_penalized(data, PenaltySpec(0.95 * lam, weights), standardize=standardize)
            self.assertGreater(below.m0_hat, 0)

    def test_lambda_max_ignores_held_columns(self):
        rng = np.random.default_rng(20)
        base = logit_dataset(rng, 200, [0.2, 1.0])
        X = np.column_stack((base.X, rng.random(200) < 0.5, np.full(200, 3.0)))
        data = Dataset(base.y, X, base.w)
        self.assertAlmostEqual(lambda_max(data, [1.0, np.inf, 1.0]), lambda_max(base, [1.0]), places=12)

    def test_effective_weights_scale_by_sd(self):
        data = Dataset([1, 0, 1, 0], [[1, 0], [1, 0], [1, 1], [1, 1]], np.ones(4))
        assert_allclose(effective_weights(data, [2.0]), [1.0])
        assert_allclose(effective_weights(data, [2.0], standardize=False), [2.0])

    def test_grid_is_descending(self):
        grid = lambda_grid(1.0, 5, 1e-2)
        assert_allclose(grid, [1.0, 10 ** -0.5, 0.1, 10 ** -1.5, 0.01])
        assert_array_equal(lambda_grid(0.0, 5), [0.0])

    def test_path_warm_starts(self):
        rng = np.random.default_rng(13)
        data = logit_dataset(rng, 150, [0.0, 1.0, -1.0, 0.0])
        lam = lambda_max(data, np.ones(3))
        fits = fit_path(data, lambda_grid(lam, 10, 1e-2))
        self.assertEqual(len(fits), 10)
        self.assertEqual(fits[0].m0_hat, 0)
        self.assertGreaterEqual(fits[-1].m0_hat, 2)


class WeightedAucTest(unittest.TestCase):

    def test_examples(self):
        self.assertEqual(weighted_auc([0.9, 0.4, 0.6], [1, 0, 1], [1, 1, 1]), 1.0)
        self.assertEqual(weighted_auc([0.9, 0.1, 0.8, 0.2], [1, 0, 1, 0], [1, 2, 3, 4]), 1.0)
        self.assertAlmostEqual(weighted_auc([0.5, 0.5, 0.5], [1, 0, 1], [1, 1, 1]), 0.5)

    def test_weights_enter_pairs(self):
        # positives at 0.2 (w=1) and 0.8 (w=3); negative at 0.5 (w=1)
        self.assertAlmostEqual(weighted_auc([0.2, 0.8, 0.5], [1, 1, 0], [1.0, 3.0, 1.0]), 0.75)

    def test_single_class(self):
        with self.assertRaises(DomainError):
            weighted_auc([0.1, 0.2], [1, 1], [1, 1])

    def test_labels_must_be_binary(self):
        with self.assertRaises(DomainError):
            weighted_auc([0.1, 0.2, 0.3], [0, 1, 2], [1, 1, 1])


class CrossValidationTest(unittest.TestCase):

    def test_needs_seed(self):
        rng = np.random.default_rng(14)
        data = logit_dataset(rng, 50, [0.0, 1.0])
        with self.assertRaises(UsageError):
            cv_select_lambda(data, 5, 5, seed=None)

    def test_needs_enough_rows(self):
        rng = np.random.default_rng(15)
        data = logit_dataset(rng, 8, [0.0, 1.0])
        with self.assertRaises(DomainError):
            cv_select_lambda(data, 10, 5, seed=1)

    def test_strong_signal_keeps_true_regressors(self):
        rng = np.random.default_rng(16)
        data = logit_dataset(rng, 200, [1.0, 1.0, 1.0], weights=np.repeat([0.1, 0.2, 0.3, 0.4], 50))
        path = cv_select_lambda(data, 10, 20, seed=42)
        fit = fit_penalized(data, PenaltySpec(path.selected_lambda))
        self.assertEqual(fit.active_set, (1, 2))
        self.assertEqual(path.cv_scores.shape, (10, 20))
        self.assertGreaterEqual(path.one_se_lambda, path.selected_lambda)
        self.assertAlmostEqual(path.cv_error, 1.0 - path.mean_scores[path.selected_index])

    def test_same_seed_same_path(self):
        rng = np.random.default_rng(17)
        data = logit_dataset(rng, 120, [0.0, 1.0, 0.0, -1.0])
        first = cv_select_lambda(data, 5, 10, seed=3)
        second = cv_select_lambda(data, 5, 10, seed=3, workers=2)
        assert_array_equal(first.folds, second.folds)
        assert_array_equal(first.cv_scores, second.cv_scores)
        self.assertEqual(first.selected_lambda, second.selected_lambda)

    def test_every_fold_has_both_classes(self):
        rng = np.random.default_rng(18)
        data = logit_dataset(rng, 100, [-1.0, 0.5])
        path = cv_select_lambda(data, 10, 5, seed=9)
        for k in range(10):
            self.assertEqual(len(np.unique(data.y[path.folds == k])), 2)

    def test_pure_noise_selects_a_near_empty_model(self):
        near_empty = 0
        for seed in range(50):
            rng = np.random.default_rng(100 + seed)
            data = logit_dataset(rng, 200, [0.0] * 11)
            path = cv_select_lambda(data, 5, 10, seed=seed)
            near_empty += fit_penalized(data, PenaltySpec(path.one_se_lambda)).m0_hat <= 1
        self.assertGreaterEqual(near_empty, 40)

    def test_strong_signal_rate(self):
        both = 0
        for seed in range(50):
            rng = np.random.default_rng(200 + seed)
            data = logit_dataset(rng, 200, [1.0, 1.0, 1.0], weights=np.repeat([0.1, 0.2, 0.3, 0.4], 50))
            path = cv_select_lambda(data, 5, 10, seed=seed)
            both += fit_penalized(data, PenaltySpec(path.selected_lambda)).active_set == (1, 2)
        self.assertGreaterEqual(both, 48)


class AdaptiveTest(unittest.TestCase):

    def test_weight_examples(self):
        assert_allclose(adaptive_weights(fit_with_beta([0.0]), floor=1e-3), [1000.0])
        assert_allclose(adaptive_weights(fit_with_beta([1.0])), [1.0])
        assert_allclose(adaptive_weights(fit_with_beta([2.0, 0.5])), [0.5, 2.0])
        self.assertTrue(np.isinf(adaptive_weights(fit_with_beta([0.0, 1.0]))[0]))

    def test_two_stage_fit(self):
        rng = np.random.default_rng(19)
        data = logit_dataset(rng, 200, [0.5, 1.5, -1.5, 0.0, 0.0])
        fit, path, weights = fit_adaptive(data, 5, 10, seed=5)
        self.assertEqual(weights.shape, (4,))
        for j in np.flatnonzero(np.isinf(weights)):
            self.assertEqual(fit.theta_hat.beta[j], 0.0)
        self.assertIn(1, fit.active_set)
        self.assertIn(2, fit.active_set)


class TheoryLambdaTest(unittest.TestCase):

    def test_rate(self):
        self.assertAlmostEqual(theory_lambda(400, 10), math.sqrt(math.log(10) / 400))
        self.assertAlmostEqual(theory_lambda(400, 10, 2.0), 2.0 * math.sqrt(math.log(10) / 400))


if __name__ == '__main__':
    unittest.main()
