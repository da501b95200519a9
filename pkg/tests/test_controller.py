# -*- coding: utf-8 -*-
"""
Created on 18 Oct 2026

Unit tests for the backstepping controller: configuration, the
state-dependent gain, one pass of the control recursion, the ideal
first-order control and the true h_k along a trajectory.

"""

import unittest
import numpy as np
import pandas as pd
import pytest
from parameterized import parameterized

from src.manncontrol.controller import (ControllerConfig, Mode, gain_K, control_step,
                                        ideal_first_order_control, true_h)
from src.manncontrol.memory import MemoryState
from src.manncontrol.nn import TwoLayerNN, zero_nn
from src.manncontrol.numerics import rk4_step
from src.manncontrol.plant import (CommandSignal, make_example1, first_order_subsystem,
                                   make_polynomial_system, state_derivative)
from src.manncontrol.helper_mods.errors import AssumptionError, ConfigError


class TestControllerConfig(unittest.TestCase):
    def test_defaults(self):
        cfg = ControllerConfig()
        self.assertEqual(cfg.mode, Mode.MANN)
        self.assertEqual((cfg.K, cfg.C_w, cfg.C_v, cfg.hidden, cfg.slots), (20.0, 10.0, 10.0, 6, 1))
        self.assertTrue(cfg.uses_memory)

    def test_mode_from_string(self):
        self.assertEqual(ControllerConfig(mode="mann-frozen").mode, Mode.MANN_FROZEN)
        self.assertFalse(ControllerConfig(mode="nn").uses_memory)

    def test_theorem_preset(self):
        cfg = ControllerConfig(K=16.0, theorem_preset=True)
        self.assertEqual(cfg.k_z, 16.0)
        self.assertEqual(cfg.kappa, 0.25)

    def test_level_overrides(self):
        cfg = ControllerConfig(level_overrides={"2": {"C_w": 1.0, "kappa": 0.1}})
        self.assertEqual(cfg.rates(1), (10.0, 10.0, 0.0))
        self.assertEqual(cfg.rates(2), (1.0, 10.0, 0.1))

    @parameterized.expand([
        ("mode", {"mode": "lstm"}),
        ("gain", {"K": 0.0}),
        ("rate", {"C_v": -1.0}),
        ("leakage", {"kappa": -0.5}),
        ("hidden", {"hidden": 0}),
        ("write_constant", {"c_w": 1.2}),
        ("override_key", {"level_overrides": {1: {"K": 3.0}}}),
    ])
    def test_invalid(self, name, kwargs):
        with self.assertRaises(ConfigError):
            ControllerConfig(**kwargs)


class TestGain(unittest.TestCase):
    def setUp(self):
        self.system = make_example1()
        self.cfg = ControllerConfig()

    def test_zero_weights_at_origin(self):
        # only the quadrature term survives: int theta * 1 dtheta = 1/2
        k = gain_K(1, 0.0, 0.0, np.zeros(2), zero_nn(3, 6), None, self.cfg, self.system, np.zeros(3))
        self.assertAlmostEqual(k, 30.0, places=12)

    def test_memory_term(self):
        rng = np.random.default_rng(5)
        nn = TwoLayerNN(rng.normal(size=(4, 6)), rng.normal(size=7))
        mem = MemoryState(rng.normal(size=(6, 1)))
        cfg = ControllerConfig(k_z=2.0)
        x_tilde = np.array([0.1, 0.1, 0.0])
        with_mem = gain_K(1, 0.05, 0.1, np.zeros(2), nn, mem, cfg, self.system, x_tilde)
        without = gain_K(1, 0.05, 0.1, np.zeros(2), nn, None, cfg, self.system, x_tilde)
        expected = 2.0 * np.linalg.norm(nn.W_aug) * np.linalg.norm(mem.mu)
        self.assertAlmostEqual(with_mem - without, expected, places=10)

    def test_gain_exceeds_base(self):
        rng = np.random.default_rng(6)
        nn = TwoLayerNN(rng.normal(size=(4, 6)), rng.normal(size=7))
        k = gain_K(1, 0.3, -0.2, np.zeros(2), nn, None, self.cfg, self.system, rng.normal(size=3))
        self.assertGreater(k, self.cfg.K)

    @parameterized.expand([
        ("example1", None),
        ("loose_bound", [{"f": [], "g": [{"coef": 1.0}],
                          "g_bound": [{"coef": 0.6}, {"coef": 1.0, "powers": [2]}], "g_lower": 0.5},
                         {"f": [], "g": [{"coef": 1.0}],
                          "g_bound": [{"coef": 0.5}, {"coef": 0.2, "powers": [0, 2]}], "g_lower": 0.5}]),
    ])
    def test_gain_respects_lower_bound(self, name, levels):
        """K_k >= K (1 + g_{k,0} / 2) whatever the weights, memory and errors."""
        system = self.system if levels is None else make_polynomial_system(levels)
        cfg = ControllerConfig(k_z=1.0)
        rng = np.random.default_rng(7)
        for _ in range(50):
            for k in (1, 2):
                nn = TwoLayerNN(rng.normal(size=(4, 6)), rng.normal(size=7))
                mem = MemoryState(rng.normal(size=(6, 1)))
                x = rng.uniform(-2.0, 2.0, size=2)
                e_k, x_kd = rng.uniform(-1.0, 1.0, size=2)
                val = gain_K(k, e_k, x_kd, x, nn, mem, cfg, system, rng.normal(size=3))
                self.assertGreaterEqual(val, cfg.K * (1.0 + system.lower_bound[k - 1] / 2.0))


class TestControlStep(unittest.TestCase):
    def setUp(self):
        self.system = make_example1()
        self.cmd = CommandSignal.constant(0.1)
        self.nns = [zero_nn(3, 6), zero_nn(36, 6)]
        self.mems = [MemoryState.zeros(6, 1), MemoryState.zeros(6, 1)]

    def test_recursion_at_rest(self):
        out = control_step(0.0, np.zeros(2), self.system, self.cmd, self.nns, self.mems,
                           ControllerConfig(mode="nn"))
        self.assertAlmostEqual(out.e[0], -0.1)
        self.assertAlmostEqual(out.gains[0], 20.0 * (1.5 + 0.001 / 12.0), places=10)
        self.assertAlmostEqual(out.x_d[1], 0.1 * out.gains[0], places=12)
        self.assertAlmostEqual(out.e[1], -out.x_d[1], places=12)
        # both known bounds equal 1 at the origin
        self.assertAlmostEqual(out.u, -out.gains[1] * out.e[1] - out.e[0], places=10)
        np.testing.assert_array_equal(out.h_hat, [0.0, 0.0])

    def test_empty_memory_matches_memory_free_network(self):
        x = np.array([0.2, -0.05])
        nn_out = control_step(1.0, x, self.system, self.cmd, self.nns, self.mems, ControllerConfig(mode="nn"))
        mann_out = control_step(1.0, x, self.system, self.cmd, self.nns, self.mems, ControllerConfig(mode="mann"))
        self.assertEqual(nn_out.u, mann_out.u)
        np.testing.assert_array_equal(mann_out.memory_read_norms, [0.0, 0.0])

    def test_bound_below_lower_bound(self):
        system = make_polynomial_system([{"f": [], "g": [{"coef": 1.0}], "g_bound": [{"coef": 0.2}],
                                          "g_lower": 0.5}])
        with self.assertRaises(AssumptionError) as ctx:
            control_step(2.0, np.zeros(1), system, self.cmd, [zero_nn(3, 6)], [MemoryState.zeros(6, 1)],
                         ControllerConfig())
        self.assertEqual(ctx.exception.level, 1)
        self.assertEqual(ctx.exception.t, 2.0)


def test_ideal_first_order_control_gives_linear_error_dynamics():
    system = make_example1()
    sub = first_order_subsystem(system)
    cmd = CommandSignal.constant(0.1)
    for x1 in (-1.0, 0.3, 1.7):
        u = ideal_first_order_control(0.0, x1, cmd, sub, 20.0)
        dx = state_derivative(sub, None, 0.0, np.array([x1]), u)
        assert dx[0] == pytest.approx(-20.0 * (x1 - 0.1), rel=1e-12, abs=1e-12)


def test_ideal_first_order_control_converges():
    """First-order plant under the ideal control: |e_1| < 1e-4 by t = 10 and non-increasing after t = 1."""
    sub = first_order_subsystem(make_example1())
    cmd = CommandSignal.constant(0.1)

    def deriv(t, s):
        u = ideal_first_order_control(t, s[0], cmd, sub, 20.0)
        return state_derivative(sub, None, t, s, u)

    h = 1e-3
    s = np.array([0.5])
    errors = []
    for i in range(10000):
        s = rk4_step(deriv, i * h, s, h)
        errors.append(abs(s[0] - 0.1))
    errors = np.array(errors)
    assert errors[-1] < 1e-4
    assert np.all(np.diff(errors[999:]) <= 1e-12)


def test_true_h_along_constant_states():
    system = make_example1()
    frame = pd.DataFrame({"t": [0.0, 0.1, 0.2], "x1": [0.3] * 3, "x2": [0.0] * 3,
                          "xd1": [0.1] * 3, "xd2": [0.0] * 3})
    # bounds equal the true gains, so beta = 1 and only the drift remains
    np.testing.assert_allclose(true_h(1, system, frame), np.full(3, 0.1 * (-0.15 + 0.09)))
    np.testing.assert_allclose(true_h(2, system, frame), np.zeros(3), atol=1e-12)


def test_true_h_needs_two_samples():
    frame = pd.DataFrame({"t": [0.0], "x1": [0.3], "x2": [0.0], "xd1": [0.1], "xd2": [0.0]})
    with pytest.raises(ValueError, match="at least two"):
        true_h(1, make_example1(), frame)


def test_true_h_with_state_dependent_gain_ratio():
    """
    Level 2 of x1' = x2, x2' = x2 + u with known bound 1 + x1^2 on g_2 = 1, so
    beta_2 = 1 + x1^2 and d(beta_2)/d(x1) = 2 x1. Along a ramp trajectory

        h_2 = (1 + x1^2) x2 + e2 x1' x1 - xd2' (1 + x1^2).
    """
    system = make_polynomial_system([
        {"f": [], "g": [{"coef": 1.0}], "g_lower": 0.5},
        {"f": [{"coef": 1.0, "powers": [0, 1]}], "g": [{"coef": 1.0}],
         "g_bound": [{"coef": 1.0}, {"coef": 1.0, "powers": [2]}], "g_lower": 0.5},
    ])
    t = np.array([0.0, 0.1, 0.2, 0.3])
    x1 = 0.5 + 2.0 * t
    x2 = 0.3 - t
    xd2 = 0.1 + 3.0 * t
    frame = pd.DataFrame({"t": t, "x1": x1, "x2": x2, "xd1": 0.1 + t, "xd2": xd2})

    beta = 1.0 + x1 ** 2
    expected = beta * x2 + (x2 - xd2) * 2.0 * x1 - 3.0 * beta
    np.testing.assert_allclose(true_h(2, system, frame), expected, rtol=1e-6)
    # level 1 has beta_1 = 1 and no drift, so only the command-derivative term is left
    np.testing.assert_allclose(true_h(1, system, frame), np.full(4, -1.0), rtol=1e-9)
