# -*- coding: utf-8 -*-
"""
Created on 18 Oct 2026

Unit tests for the numeric primitives: softmax, sigmoid, Gauss-Legendre
quadrature on [0, 1] and the RK4 step.

"""

import math
import unittest
import numpy as np
import pytest
from parameterized import parameterized

from src.manncontrol.numerics import (QUAD_NODES, QUAD_WEIGHTS, softmax, sigmoid, sigmoid_deriv,
                                      quad01, rk4_step, as_vec, as_mat)
from src.manncontrol.helper_mods.errors import DimensionError, NumericError


class TestSoftmax(unittest.TestCase):
    def test_uniform(self):
        np.testing.assert_allclose(softmax([0.0, 0.0]), [0.5, 0.5])

    def test_sums_to_one(self):
        z = softmax([1.0, -2.0, 3.5, 0.25])
        self.assertAlmostEqual(float(np.sum(z)), 1.0, places=14)
        self.assertTrue(np.all(z > 0))

    def test_large_inputs_do_not_overflow(self):
        z = softmax([1000.0, 1000.0, 999.0])
        self.assertTrue(np.all(np.isfinite(z)))
        self.assertAlmostEqual(z[0], z[1])

    def test_log_weights(self):
        np.testing.assert_allclose(softmax(np.log([1.0, 2.0, 3.0])), [1 / 6, 2 / 6, 3 / 6], rtol=1e-12)

    def test_single_entry(self):
        np.testing.assert_array_equal(softmax([3.0]), [1.0])

    def test_empty_raises(self):
        with self.assertRaises(DimensionError):
            softmax([])

    def test_permutation_moves_weights_with_entries(self):
        rng = np.random.default_rng(11)
        v = rng.normal(size=7)
        perm = rng.permutation(7)
        np.testing.assert_allclose(softmax(v[perm]), softmax(v)[perm], rtol=1e-14)

    @parameterized.expand([
        ("positive", 3.25),
        ("negative", -40.0),
        ("large", 500.0),
    ])
    def test_constant_shift_changes_nothing(self, name, shift):
        v = np.array([0.3, -1.2, 2.0, 0.0])
        np.testing.assert_allclose(softmax(v + shift), softmax(v), rtol=1e-12)


class TestSigmoid(unittest.TestCase):
    def test_midpoint(self):
        self.assertEqual(float(sigmoid(0.0)), 0.5)
        self.assertEqual(float(sigmoid_deriv(0.0)), 0.25)

    def test_saturation_is_finite(self):
        vals = sigmoid(np.array([-1000.0, 1000.0]))
        np.testing.assert_allclose(vals, [0.0, 1.0], atol=1e-300)

    def test_derivative_matches_finite_difference(self):
        x = np.linspace(-4, 4, 17)
        step = 1e-6
        fd = (sigmoid(x + step) - sigmoid(x - step)) / (2 * step)
        np.testing.assert_allclose(sigmoid_deriv(x), fd, rtol=1e-7, atol=1e-10)


class TestQuadrature(unittest.TestCase):
    def test_weights_sum_to_one(self):
        self.assertEqual(len(QUAD_NODES), 16)
        self.assertAlmostEqual(float(np.sum(QUAD_WEIGHTS)), 1.0, places=14)
        self.assertTrue(np.all((QUAD_NODES > 0) & (QUAD_NODES < 1)))

    @parameterized.expand([
        ("constant", lambda th: 1.0, "plain", 1.0),
        ("linear", lambda th: th, "plain", 0.5),
        ("theta_weighted_linear", lambda th: th, "theta", 1.0 / 3.0),
        ("high_degree", lambda th: th ** 10, "plain", 1.0 / 11.0),
        ("exponential", np.exp, "plain", math.e - 1.0),
    ])
    def test_known_integrals(self, name, f, weight, expected):
        self.assertAlmostEqual(quad01(f, weight=weight), expected, places=12)

    def test_exact_for_polynomials_up_to_degree_31(self):
        for p in range(32):
            self.assertAlmostEqual(quad01(lambda th: th ** p), 1.0 / (p + 1), places=13, msg=f"degree {p}")
        # the theta weight raises the degree by one
        for p in range(31):
            self.assertAlmostEqual(quad01(lambda th: th ** p, weight="theta"), 1.0 / (p + 2), places=13,
                                   msg=f"degree {p + 1}")

    def test_non_finite_integrand_raises(self):
        with self.assertRaises(NumericError):
            quad01(lambda th: np.full_like(th, np.nan))

    def test_invalid_weight(self):
        with self.assertRaises(ValueError):
            quad01(lambda th: th, weight="cosine")


class TestRK4(unittest.TestCase):
    def test_exponential_growth_one_step(self):
        s = rk4_step(lambda t, s: s, 0.0, np.array([1.0]), 0.1)
        self.assertAlmostEqual(s[0], math.exp(0.1), places=6)

    def test_time_dependent_derivative_is_exact_for_cubics(self):
        # RK4 integrates polynomials in t of degree <= 3 exactly
        s = rk4_step(lambda t, s: np.array([3 * t ** 2]), 1.0, np.array([1.0]), 0.5)
        self.assertAlmostEqual(s[0], 1.5 ** 3, places=12)

    def test_observed_order_on_exponential_growth(self):
        """Halving the step on x' = x over [0, 1] shrinks the final error about 16 times."""
        def final_error(h):
            steps = int(round(1.0 / h))
            s = np.array([1.0])
            for i in range(steps):
                s = rk4_step(lambda t, s: s, i * h, s, h)
            return abs(s[0] - math.e)

        coarse, fine = final_error(0.05), final_error(0.025)
        self.assertGreaterEqual(math.log2(coarse / fine), 3.9)

    def test_non_finite_stage_raises(self):
        with self.assertRaises(NumericError) as ctx:
            rk4_step(lambda t, s: np.array([np.inf]), 2.0, np.array([1.0]), 0.1)
        self.assertEqual(ctx.exception.t, 2.0)

    def test_non_positive_step(self):
        with self.assertRaises(ValueError):
            rk4_step(lambda t, s: s, 0.0, np.array([1.0]), 0.0)


def test_as_vec_rejects_nan():
    with pytest.raises(NumericError, match="non-finite"):
        as_vec([1.0, np.nan], name="state")


def test_as_mat_rejects_vectors():
    with pytest.raises(DimensionError):
        as_mat([1.0, 2.0])
