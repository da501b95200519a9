#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Reading and validating JSON experiment configs.

A config has the sections system, scenario, command, controller, run,
metrics and validation. Sections left out fall back to the shipped default
(example1_scenario1.json); inside controller, run, metrics and validation,
individual keys fall back too. Unknown keys are rejected.
"""

import json
import logging
from dataclasses import dataclass, field
import importlib_resources
from .. import __resources__
from .errors import ConfigError
from ..plant import (SYSTEMS, CommandSignal, ScenarioEvent, ScenarioScript,
                     make_polynomial_system, scenario_preset)
from ..controller import ControllerConfig
from ..metrics import SettlingSpec
from ..simulator import RunConfig

logging.basicConfig(level=logging.INFO, format='%(message)s')

DEFAULT_CONFIG = "example1_scenario1.json"

SECTION_KEYS = {
    "system": {"name", "levels"},
    "scenario": {"preset", "events"},
    "command": {"constant", "sine"},
    "controller": {"K", "k_z", "kappa", "C_w", "C_v", "hidden", "slots", "c_w",
                   "mode", "theorem_preset", "level_overrides"},
    "run": {"h", "T", "seed", "decimation", "x0", "blowup"},
    "metrics": {"band_fraction", "band_mode"},
    "validation": {"enabled", "box", "samples", "seed"},
}
MERGED_SECTIONS = ("controller", "run", "metrics", "validation")
LEVEL_KEYS = {"f", "g", "g_bound", "g_lower"}
TERM_KEYS = {"coef", "powers"}
EVENT_KEYS = {"time", "level", "kind", "coefficient"}
SINE_KEYS = {"amplitude", "frequency", "offset"}


@dataclass
class ExperimentConfig:
    """A validated experiment: the built objects plus the raw run settings."""
    system: object
    script: ScenarioScript
    command: CommandSignal
    controller: ControllerConfig
    run: dict
    metrics: SettlingSpec
    validation: dict
    source: str = DEFAULT_CONFIG
    raw: dict = field(default_factory=dict)


def resource_path(name):
    """Path to a config file shipped with the package."""
    return importlib_resources.files(__resources__) / name


def read_json(path):
    """Load a JSON file, turning parse failures into ConfigError."""
    try:
        with open(path, "r") as f:
            return json.load(f)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{path} is not valid JSON: {err}")


def _check_keys(obj, allowed, where):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be a JSON object.")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"Unknown keys in {where}: {sorted(unknown)}. Allowed keys are {sorted(allowed)}.")


def _build_system(sec):
    if ("name" in sec) == ("levels" in sec):
        raise ConfigError("system needs exactly one of 'name' or 'levels'.")
    if "name" in sec:
        if sec["name"] not in SYSTEMS:
            raise ConfigError(f"{sec['name']} is not a known system. Known systems: {sorted(SYSTEMS)}.")
        return SYSTEMS[sec["name"]]()
    levels = sec["levels"]
    if not isinstance(levels, list) or len(levels) == 0:
        raise ConfigError("system.levels must be a non-empty list.")
    for i, lvl in enumerate(levels, start=1):
        _check_keys(lvl, LEVEL_KEYS, f"system.levels[{i}]")
        for key in ("f", "g", "g_lower"):
            if key not in lvl:
                raise ConfigError(f"system.levels[{i}] is missing '{key}'.")
        for key in ("f", "g", "g_bound"):
            for term in lvl.get(key, []):
                _check_keys(term, TERM_KEYS, f"system.levels[{i}].{key} term")
                if "coef" not in term:
                    raise ConfigError(f"A term of system.levels[{i}].{key} has no 'coef'.")
    return make_polynomial_system(levels)


def _build_script(sec):
    if ("preset" in sec) == ("events" in sec):
        raise ConfigError("scenario needs exactly one of 'preset' or 'events'.")
    if "preset" in sec:
        return scenario_preset(sec["preset"])
    events = []
    for i, ev in enumerate(sec["events"], start=1):
        _check_keys(ev, EVENT_KEYS, f"scenario.events[{i}]")
        missing = {"time", "kind", "coefficient"} - set(ev)
        if missing:
            raise ConfigError(f"scenario.events[{i}] is missing {sorted(missing)}.")
        level = ev.get("level", "all")
        events.append(ScenarioEvent(time=float(ev["time"]), kind=ev["kind"],
                                    coefficient=float(ev["coefficient"]),
                                    level=None if level == "all" else int(level)))
    return ScenarioScript(events=tuple(events), name="custom")


def _build_command(sec, order):
    if len(sec) != 1:
        raise ConfigError("command needs exactly one of 'constant' or 'sine'.")
    if "constant" in sec:
        return CommandSignal.constant(float(sec["constant"]), order=order)
    sine = sec["sine"]
    _check_keys(sine, SINE_KEYS, "command.sine")
    if "amplitude" not in sine or "frequency" not in sine:
        raise ConfigError("command.sine needs 'amplitude' and 'frequency'.")
    return CommandSignal.sine(sine["amplitude"], sine["frequency"], sine.get("offset", 0.0), order=order)


def parse_config(raw, defaults=None, source="<dict>"):
    """
    Validate a config dictionary and build the objects it describes.

    Parameters
    --------
    raw: dict, the parsed JSON
    defaults: dict, the shipped defaults (read from the package when omitted)
    source: str, used in messages

    Return
    --------
    ExperimentConfig

    Raises
    --------
    ConfigError on unknown keys or invalid values.
    """
    if defaults is None:
        defaults = read_json(resource_path(DEFAULT_CONFIG))
    _check_keys(raw, set(SECTION_KEYS), "the config")

    merged = {}
    for sec in SECTION_KEYS:
        if sec in raw:
            _check_keys(raw[sec], SECTION_KEYS[sec], sec)
        if sec in MERGED_SECTIONS:
            merged[sec] = {**defaults.get(sec, {}), **raw.get(sec, {})}
        else:
            merged[sec] = raw.get(sec, defaults[sec])

    try:
        system = _build_system(merged["system"])
        script = _build_script(merged["scenario"])
        command = _build_command(merged["command"], system.order)
        controller = ControllerConfig(**merged["controller"])
        metrics = SettlingSpec(**merged["metrics"])
    except (TypeError, KeyError) as err:
        raise ConfigError(f"Invalid value in {source}: {err}")

    for level in [ev.level for ev in script.events if ev.level is not None]:
        if level > system.order:
            raise ConfigError(f"Scenario event targets level {level} but the system has order {system.order}.")

    validation = dict(merged["validation"])
    if validation.get("box") is None:
        validation["box"] = [[-2.0, 2.0]] * system.order

    exp = ExperimentConfig(system=system, script=script, command=command, controller=controller,
                           run=merged["run"], metrics=metrics, validation=validation,
                           source=str(source), raw=merged)
    # build once so run-section errors surface at load time
    build_run(exp)
    return exp


def load_config(path=None):
    """
    Load an experiment config from a JSON file, or the shipped default when path is None.

    Example
    --------
    >>> exp = load_config("my_experiment.json")
    """
    if path is None:
        path = resource_path(DEFAULT_CONFIG)
    raw = read_json(path)
    return parse_config(raw, source=path)


def build_run(exp, mode=None, seed=None, progress=False, pin_memory=False):
    """RunConfig for an experiment, optionally overriding the mode and seed."""
    controller = exp.controller
    if mode is not None:
        settings = {**exp.raw["controller"], "mode": mode}
        controller = ControllerConfig(**settings)
    r = exp.run
    try:
        return RunConfig(system=exp.system, controller=controller, script=exp.script,
                         command=exp.command, h=float(r["h"]), T=float(r["T"]),
                         decimation=int(r["decimation"]),
                         seed=int(r["seed"] if seed is None else seed),
                         x0=r.get("x0"), blowup=float(r["blowup"]),
                         pin_memory=pin_memory, progress=progress)
    except (TypeError, KeyError) as err:
        raise ConfigError(f"Invalid run settings in {exp.source}: {err}")
