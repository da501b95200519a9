#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
The strict-feedback plant

    x_i' = f_i(x_1..x_i) + g_i(x_1..x_i) x_{i+1},   i < n
    x_n' = f_n(x_1..x_n) + g_n(x_1..x_n) u

together with the known gain bounds, the command signal, and the scenario
scripts that apply abrupt changes to the drift functions f_i.

Level indices in public functions are 1-based, matching the way the plant is
written down. State-prefix functions take a sequence x and only index into it,
so the last entry may be a numpy array of quadrature points.
"""

import math
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple
import numpy as np
from .helper_mods.errors import ConfigError, NumericError

logging.basicConfig(level=logging.INFO, format='%(message)s')

PrefixFunction = Callable[[Sequence], float]


@dataclass(frozen=True)
class StrictFeedbackSystem:
    """
    Order-n strict-feedback plant.

    drift, gain and bound hold one function per level; level i reads x[0..i-1].
    lower_bound holds the positive constants g_{i,0} of the gain assumption.
    """
    name: str
    drift: Tuple[PrefixFunction, ...]
    gain: Tuple[PrefixFunction, ...]
    bound: Tuple[PrefixFunction, ...]
    lower_bound: Tuple[float, ...]

    def __post_init__(self):
        n = len(self.drift)
        if n < 1:
            raise ConfigError("A strict-feedback system needs at least one level.")
        if not (len(self.gain) == len(self.bound) == len(self.lower_bound) == n):
            raise ConfigError(
                f"System {self.name} has {n} drift functions but {len(self.gain)} gains, "
                f"{len(self.bound)} gain bounds and {len(self.lower_bound)} lower bounds.")
        if any(not g0 > 0 for g0 in self.lower_bound):
            raise ConfigError(f"Lower gain bounds must be strictly positive, got {list(self.lower_bound)}.")

    @property
    def order(self):
        return len(self.drift)


@dataclass(frozen=True)
class ScenarioEvent:
    """One abrupt change: at `time`, scale or re-offset f_level (level None means every level)."""
    time: float
    kind: str
    coefficient: float
    level: Optional[int] = None

    def applies_to(self, i):
        return self.level is None or self.level == i


@dataclass(frozen=True)
class ScenarioScript:
    """
    Ordered abrupt-change events.

    A scale event multiplies the current effective drift (drift and offset alike);
    an offset event replaces the additive offset with its coefficient.
    """
    events: Tuple[ScenarioEvent, ...] = ()
    name: str = "custom"

    def __post_init__(self):
        last = -math.inf
        for ev in self.events:
            if ev.kind not in ("scale", "offset"):
                raise ConfigError(f"{ev.kind} is not a valid event kind. Use 'scale' or 'offset'.")
            if not math.isfinite(ev.time) or not math.isfinite(ev.coefficient):
                raise ConfigError(f"Event at t = {ev.time} has a non-finite time or coefficient.")
            if ev.kind == "scale" and ev.coefficient == 0:
                raise ConfigError(f"Scale event at t = {ev.time} has a zero coefficient.")
            if ev.level is not None and ev.level < 1:
                raise ConfigError(f"Event level {ev.level} is invalid; levels start at 1.")
            if not ev.time > last:
                raise ConfigError(
                    f"Scenario event times must be strictly increasing; {ev.time} follows {last}.")
            last = ev.time

    def modifiers(self, i, t):
        """Return (scale, offset) in force on level i at time t, right-continuous at events."""
        scale = 1.0
        offset = 0.0
        for ev in self.events:
            if ev.time > t:
                break
            if not ev.applies_to(i):
                continue
            if ev.kind == "scale":
                scale = scale * ev.coefficient
                offset = offset * ev.coefficient
            else:
                offset = ev.coefficient
        return scale, offset

    def event_times(self):
        return [ev.time for ev in self.events]

    def change_times(self, horizon=math.inf):
        """Times of the abrupt changes that happen after the start of a run (0 < t <= horizon)."""
        return [ev.time for ev in self.events if 0 < ev.time <= horizon]


@dataclass(frozen=True)
class CommandSignal:
    """Command y_d with its analytic time derivatives; derivatives[k] is y_d^(k)."""
    derivatives: Tuple[Callable[[float], float], ...]
    name: str = "command"

    @classmethod
    def constant(cls, value, order=8):
        value = float(value)
        derivs = (lambda t: value,) + tuple((lambda t: 0.0) for _ in range(order))
        return cls(derivs, name=f"constant({value})")

    @classmethod
    def sine(cls, amplitude, frequency, offset=0.0, order=8):
        """y_d = offset + amplitude * sin(frequency * t), derivatives in closed form."""
        a = float(amplitude)
        w = float(frequency)
        c = float(offset)

        def nth(k):
            gain = a * w ** k
            phase = 0.5 * math.pi * k
            if k == 0:
                return lambda t: c + gain * math.sin(w * t)
            return lambda t: gain * math.sin(w * t + phase)

        return cls(tuple(nth(k) for k in range(order + 1)),
                   name=f"sine({a}, {w}, {c})")

    @property
    def max_order(self):
        return len(self.derivatives) - 1

    def value(self, t, k=0):
        if k > self.max_order:
            raise ConfigError(
                f"Command {self.name} does not supply derivative order {k} (highest is {self.max_order}).")
        return float(self.derivatives[k](t))

    def stack(self, t, upto):
        """[y_d, y_d', ..., y_d^(upto)] at time t."""
        return np.array([self.value(t, k) for k in range(upto + 1)])


@dataclass
class AssumptionReport:
    """Result of sampling the gain assumption over a box."""
    passed: bool
    samples_checked: int
    level: Optional[int] = None
    sample: Optional[np.ndarray] = None
    message: str = ""
    details: dict = field(default_factory=dict)


# %% plant evaluation


def effective_drift(system, script, i, t, x_prefix):
    """
    f_i after every scenario event with time <= t has been applied.

    Parameters
    --------
    system: StrictFeedbackSystem
    script: ScenarioScript or None
    i: int, 1-based level
    t: float, time in seconds
    x_prefix: sequence of the states x_1..x_i

    Return
    --------
    float (or array when the last prefix entry is an array)
    """
    f = system.drift[i - 1](x_prefix)
    if script is None:
        return f
    scale, offset = script.modifiers(i, t)
    return scale * f + offset


def state_derivative(system, script, t, x, u, phase_t=None):
    """
    Right-hand side of the strict-feedback plant.

    phase_t, when given, is the time at which the scenario is read; the
    simulator passes the start of the current integration segment so a step
    never straddles an abrupt change.

    Return
    --------
    numpy.ndarray of length n

    Raises
    --------
    NumericError carrying (t, level) when a component is not finite.
    """
    n = system.order
    if len(x) != n:
        raise ValueError(f"State has length {len(x)} but the system has order {n}.")
    tp = t if phase_t is None else phase_t
    dx = np.empty(n)
    for i in range(1, n + 1):
        prefix = x[:i]
        drive = x[i] if i < n else u
        dx[i - 1] = effective_drift(system, script, i, tp, prefix) + system.gain[i - 1](prefix) * drive
        if not math.isfinite(dx[i - 1]):
            raise NumericError(f"Plant derivative at level {i} is not finite at t = {t:.6g} s.",
                               t=t, level=i)
    return dx


def validate_assumption(system, sample_box, n_samples=1000, seed=0):
    """
    Check bound_i >= |g_i| > g_{i,0} > 0 on the box center and on seeded uniform samples.

    Parameters
    --------
    system: StrictFeedbackSystem
    sample_box: list of (low, high) pairs, one per state
    n_samples: int, number of random samples (>= 1)
    seed: int

    Return
    --------
    AssumptionReport; violations are reported, never raised.
    """
    box = np.asarray(sample_box, dtype=float)
    n = system.order
    if box.shape != (n, 2) or np.any(box[:, 1] < box[:, 0]):
        raise ConfigError(f"Sample box must hold {n} (low, high) pairs with low <= high.")
    if n_samples < 1:
        raise ConfigError("At least one sample is needed to check the gain assumption.")

    rng = np.random.default_rng(seed)
    samples = np.vstack([box.mean(axis=1),
                         rng.uniform(box[:, 0], box[:, 1], size=(n_samples, n))])

    for s_idx, xs in enumerate(samples):
        for i in range(1, n + 1):
            prefix = xs[:i]
            gb = float(system.bound[i - 1](prefix))
            g = float(system.gain[i - 1](prefix))
            g0 = system.lower_bound[i - 1]
            if not (gb >= abs(g) > g0 > 0):
                msg = (f"The gain assumption fails for {system.name} at level {i}, state {xs.tolist()}: "
                       f"bound = {gb:.6g}, |g| = {abs(g):.6g}, lower bound = {g0:.6g}.")
                logging.info(msg)
                return AssumptionReport(False, s_idx + 1, level=i, sample=xs, message=msg,
                                        details={"bound": gb, "gain": g, "lower_bound": g0})

    msg = f"The gain assumption holds for {system.name} on {len(samples)} sampled states."
    logging.info(msg)
    return AssumptionReport(True, len(samples), message=msg)


# %% named systems and scenarios


def _example1_f1(x):
    return 0.1 * (-0.5 * x[0] + x[0] ** 2)


def _example1_f2(x):
    return 0.1 * (-0.5 * x[1] + x[1] ** 2)


def _example1_g1(x):
    return 1.0 + 0.1 * x[0] ** 2


def _example1_g2(x):
    return 1.0 + 0.1 * x[1] ** 2


def make_example1():
    """
    Second-order example plant with known bounds equal to the true gains.

    f_1 = 0.1(-x_1/2 + x_1^2), f_2 = 0.1(-x_2/2 + x_2^2),
    g_1 = 1 + 0.1 x_1^2, g_2 = 1 + 0.1 x_2^2, g_{i,0} = 0.5.
    """
    return StrictFeedbackSystem(
        name="example1",
        drift=(_example1_f1, _example1_f2),
        gain=(_example1_g1, _example1_g2),
        bound=(_example1_g1, _example1_g2),
        lower_bound=(0.5, 0.5),
    )


def first_order_subsystem(system):
    """The level-1 plant x_1' = f_1(x_1) + g_1(x_1) u of a strict-feedback system."""
    return StrictFeedbackSystem(
        name=f"{system.name}-level1",
        drift=system.drift[:1],
        gain=system.gain[:1],
        bound=system.bound[:1],
        lower_bound=system.lower_bound[:1],
    )


def polynomial_function(terms, level):
    """
    Build a state-prefix function from monomials.

    Parameters
    --------
    terms: list of {"coef": c, "powers": [p_1, ..., p_k]} with k <= level
    level: int, the number of states the function may read

    Return
    --------
    callable x -> sum_m coef_m * prod_j x_j ** p_{m,j}
    """
    parsed = []
    for term in terms:
        powers = [int(p) for p in term.get("powers", [])]
        if len(powers) > level or any(p < 0 for p in powers):
            raise ConfigError(
                f"Monomial powers {powers} are invalid for a level-{level} function "
                f"(at most {level} non-negative integers).")
        parsed.append((float(term["coef"]), powers))

    def poly(x):
        total = 0.0
        for coef, powers in parsed:
            val = coef
            for j, p in enumerate(powers):
                if p:
                    val = val * x[j] ** p
            total = total + val
        return total

    return poly


def make_polynomial_system(levels, name="polynomial"):
    """Build a StrictFeedbackSystem from per-level monomial lists (see polynomial_function)."""
    drift, gain, bound, lower = [], [], [], []
    for i, lvl in enumerate(levels, start=1):
        drift.append(polynomial_function(lvl["f"], i))
        gain.append(polynomial_function(lvl["g"], i))
        bound.append(polynomial_function(lvl.get("g_bound", lvl["g"]), i))
        lower.append(float(lvl["g_lower"]))
    return StrictFeedbackSystem(name=name, drift=tuple(drift), gain=tuple(gain),
                                bound=tuple(bound), lower_bound=tuple(lower))


SYSTEMS = {
    "example1": make_example1,
}


def scenario_preset(name):
    """
    Named scenario scripts.

    scenario1: every f_i scaled by 20 at t=5, by 2 at t=10, by 1/40 at t=20
    scenario2: additive offset 0.001 at t=0, 0.05 at t=5, 0.1 at t=10, 0.001 at t=20
    scenario3: f_1 only, scaled by 200 at t=5, by 2 at t=10, by 1/400 at t=20
    none:      no events
    """
    if name == "scenario1":
        events = (ScenarioEvent(5.0, "scale", 20.0),
                  ScenarioEvent(10.0, "scale", 2.0),
                  ScenarioEvent(20.0, "scale", 1.0 / 40.0))
    elif name == "scenario2":
        events = (ScenarioEvent(0.0, "offset", 0.001),
                  ScenarioEvent(5.0, "offset", 0.05),
                  ScenarioEvent(10.0, "offset", 0.1),
                  ScenarioEvent(20.0, "offset", 0.001))
    elif name == "scenario3":
        events = (ScenarioEvent(5.0, "scale", 200.0, level=1),
                  ScenarioEvent(10.0, "scale", 2.0, level=1),
                  ScenarioEvent(20.0, "scale", 1.0 / 400.0, level=1))
    elif name == "none":
        events = ()
    else:
        raise ConfigError(f"{name} is not a known scenario. Known scenarios: scenario1, scenario2, scenario3, none.")
    return ScenarioScript(events=events, name=name)
