# -*- coding: utf-8 -*-
"""
Created on 18 Oct 2026

Unit tests for reading and validating JSON experiment configs.

"""

import json
import unittest
import pytest
from parameterized import parameterized

from src.manncontrol.helper_mods.config_helpers import (load_config, parse_config, build_run, read_json,
                                                        resource_path, DEFAULT_CONFIG)
from src.manncontrol.controller import Mode
from src.manncontrol.helper_mods.errors import ConfigError


class TestShippedConfigs(unittest.TestCase):
    def test_default(self):
        exp = load_config()
        self.assertEqual(exp.system.name, "example1")
        self.assertEqual(exp.script.name, "scenario1")
        self.assertEqual(exp.controller.K, 20.0)
        self.assertEqual(exp.controller.mode, Mode.MANN)
        self.assertEqual(exp.run["T"], 30.0)
        self.assertEqual(exp.metrics.band_fraction, 0.001)
        self.assertEqual(exp.validation["box"], [[-2.0, 2.0], [-2.0, 2.0]])

    @parameterized.expand([
        ("example1_scenario1.json", "scenario1"),
        ("example1_scenario2.json", "scenario2"),
        ("example1_scenario3.json", "scenario3"),
    ])
    def test_presets(self, name, scenario):
        self.assertEqual(load_config(resource_path(name)).script.name, scenario)


class TestParseConfig(unittest.TestCase):
    def setUp(self):
        self.defaults = read_json(resource_path(DEFAULT_CONFIG))

    def test_merges_controller_keys(self):
        exp = parse_config({"controller": {"K": 5.0}}, self.defaults)
        self.assertEqual(exp.controller.K, 5.0)
        self.assertEqual(exp.controller.C_w, 10.0)

    def test_polynomial_system_and_custom_events(self):
        raw = {
            "system": {"levels": [
                {"f": [{"coef": -1.0, "powers": [1]}], "g": [{"coef": 2.0}], "g_lower": 1.0},
                {"f": [], "g": [{"coef": 1.0}, {"coef": 0.5, "powers": [0, 2]}], "g_lower": 0.5},
            ]},
            "scenario": {"events": [{"time": 1.0, "kind": "scale", "coefficient": 3.0, "level": 2},
                                    {"time": 2.0, "kind": "offset", "coefficient": 0.1, "level": "all"}]},
            "command": {"sine": {"amplitude": 0.2, "frequency": 1.0}},
        }
        exp = parse_config(raw, self.defaults)
        self.assertEqual(exp.system.order, 2)
        self.assertEqual(exp.script.modifiers(1, 1.5), (1.0, 0.0))
        self.assertEqual(exp.script.modifiers(2, 1.5), (3.0, 0.0))
        self.assertEqual(exp.script.modifiers(1, 2.5), (1.0, 0.1))
        self.assertAlmostEqual(exp.command.value(0.0, 1), 0.2)

    @parameterized.expand([
        ("unknown_section", {"plots": {}}),
        ("unknown_controller_key", {"controller": {"gain": 3.0}}),
        ("unknown_system", {"system": {"name": "pendulum"}}),
        ("system_needs_one_form", {"system": {"name": "example1", "levels": []}}),
        ("event_level_above_order", {"scenario": {"events": [{"time": 1.0, "kind": "scale",
                                                               "coefficient": 2.0, "level": 3}]}}),
        ("event_missing_kind", {"scenario": {"events": [{"time": 1.0, "coefficient": 2.0}]}}),
        ("events_out_of_order", {"scenario": {"events": [{"time": 2.0, "kind": "scale", "coefficient": 2.0},
                                                          {"time": 1.0, "kind": "scale", "coefficient": 2.0}]}}),
        ("two_commands", {"command": {"constant": 0.1, "sine": {"amplitude": 1.0, "frequency": 1.0}}}),
        ("bad_mode", {"controller": {"mode": "rnn"}}),
        ("bad_step", {"run": {"h": 0.0}}),
        ("bad_initial_state", {"run": {"x0": [0.0, 0.0, 0.0]}}),
        ("bad_band", {"metrics": {"band_mode": "percent"}}),
    ])
    def test_rejects(self, name, raw):
        with self.assertRaises(ConfigError):
            parse_config(raw, self.defaults)


class TestBuildRun(unittest.TestCase):
    def test_overrides(self):
        exp = load_config()
        run = build_run(exp, mode="nn", seed=5)
        self.assertEqual(run.controller.mode, Mode.NN)
        self.assertEqual(run.seed, 5)
        self.assertEqual(exp.controller.mode, Mode.MANN)
        self.assertEqual(build_run(exp).seed, 0)

    def test_settings(self):
        run = build_run(load_config())
        self.assertEqual((run.h, run.T, run.decimation), (0.001, 30.0, 10))
        self.assertEqual(run.x0, "command")


def test_malformed_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"run": {"T": 1.0,}')
    with pytest.raises(ConfigError, match="not valid JSON"):
        load_config(str(path))


def test_load_from_file(tmp_path):
    path = tmp_path / "short.json"
    path.write_text(json.dumps({"scenario": {"preset": "none"}, "run": {"T": 2.0}}))
    exp = load_config(str(path))
    assert exp.script.events == ()
    assert exp.run["T"] == 2.0
    assert exp.run["h"] == 0.001
    assert exp.source == str(path)
