#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Closed-loop simulation: plant state, every level's weights and every level's
memory integrated together as one ODE with fixed-step RK4.

The horizon is cut into segments at the scenario event times. Inside a
segment the scenario is read at the segment start, so no step ever straddles
an abrupt change, and the change takes effect from the event time onward.

Flat state layout: x, then for each level V_aug (column-major), W_aug,
mu (column-major).
"""

import math
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Union
import numpy as np
import pandas as pd
from tqdm import tqdm
from .numerics import rk4_step
from .plant import ScenarioScript, CommandSignal, state_derivative
from .nn import TwoLayerNN, init_nn, input_dimensions, check_weights
from .memory import MemoryState, write_derivative
from .controller import ControllerConfig, Mode, control_step
from .adaptation import weight_derivatives
from .helper_mods.errors import ConfigError, DimensionError, DivergenceError, NumericError

logging.basicConfig(level=logging.INFO, format='%(message)s')

# x0 setting that starts the plant at rest on the command: x_1 = y_d(0), other states 0
X0_ON_COMMAND = "command"


@dataclass
class RunConfig:
    """Everything one simulation needs."""
    system: object
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    script: ScenarioScript = field(default_factory=ScenarioScript)
    command: Optional[CommandSignal] = None
    h: float = 1e-3
    T: float = 30.0
    decimation: int = 10
    seed: int = 0
    x0: Optional[Union[List[float], str]] = None
    blowup: float = 1e6
    pin_memory: bool = False
    progress: bool = False

    def __post_init__(self):
        if not self.h > 0:
            raise ConfigError(f"Step size h must be positive, got {self.h}.")
        if not self.T >= 0:
            raise ConfigError(f"Horizon T must be non-negative, got {self.T}.")
        if self.decimation < 1:
            raise ConfigError(f"Decimation must be at least 1, got {self.decimation}.")
        if not self.blowup > 0:
            raise ConfigError(f"Blow-up guard must be positive, got {self.blowup}.")
        n = self.system.order
        if self.command is None:
            self.command = CommandSignal.constant(0.1, order=n)
        if self.command.max_order < n:
            raise ConfigError(
                f"The command must supply derivatives up to order {n}; {self.command.name} stops at {self.command.max_order}.")
        if isinstance(self.x0, str):
            if self.x0 != X0_ON_COMMAND:
                raise ConfigError(f"{self.x0} is not a valid initial state. Use a list of {n} numbers or '{X0_ON_COMMAND}'.")
        elif self.x0 is not None and len(self.x0) != n:
            raise ConfigError(f"Initial state has length {len(self.x0)} but the system has order {n}.")


@dataclass
class ClosedLoopState:
    """Time, plant state, and per-level networks and memories."""
    t: float
    x: np.ndarray
    nns: List[TwoLayerNN]
    mems: List[MemoryState]

    @property
    def order(self):
        return len(self.x)


@dataclass
class Trajectory:
    """Recorded samples of one run; one row per recorded time."""
    frame: pd.DataFrame
    mode: str
    order: int
    hidden: int
    c_w: float
    events: List[float] = field(default_factory=list)

    @property
    def times(self):
        return self.frame["t"].to_numpy()

    @property
    def tracking_error(self):
        return (self.frame["y"] - self.frame["y_d"]).to_numpy()

    def __len__(self):
        return len(self.frame)


# %% state packing


def pack(s):
    """Flatten a ClosedLoopState into one vector (x, then per level V_aug, W_aug, mu)."""
    parts = [np.asarray(s.x, dtype=float)]
    for nn, mem in zip(s.nns, s.mems):
        parts.append(nn.V_aug.ravel(order="F"))
        parts.append(nn.W_aug)
        parts.append(mem.mu.ravel(order="F"))
    return np.concatenate(parts)


def packed_length(template):
    return len(template.x) + sum(nn.V_aug.size + nn.W_aug.size + mem.mu.size
                                 for nn, mem in zip(template.nns, template.mems))


def unpack(v, template, t=None):
    """
    Rebuild a ClosedLoopState from a flat vector laid out like pack(template).

    The weights and memories are views into v, so v must not be modified while
    the state is in use.

    Raises
    --------
    DimensionError if the length does not match the template.
    """
    v = np.asarray(v, dtype=float)
    expected = packed_length(template)
    if v.shape != (expected,):
        raise DimensionError(f"Packed state has length {v.size}, the layout needs {expected}.")
    n = len(template.x)
    pos = n
    nns, mems = [], []
    for nn, mem in zip(template.nns, template.mems):
        V = v[pos:pos + nn.V_aug.size].reshape(nn.V_aug.shape, order="F")
        pos += nn.V_aug.size
        W = v[pos:pos + nn.W_aug.size]
        pos += nn.W_aug.size
        mu = v[pos:pos + mem.mu.size].reshape(mem.mu.shape, order="F")
        pos += mem.mu.size
        nns.append(TwoLayerNN.view(V, W))
        mems.append(MemoryState.view(mu, mem.c_w))
    return ClosedLoopState(template.t if t is None else t, v[:n].copy(), nns, mems)


# %% closed loop


def init_closed_loop(run):
    """
    Initial closed-loop state: x = x0 (zero by default, or at rest on the command for
    x0 = "command"), seeded V_aug, zero W_aug, zero memory.

    In MANN_FROZEN mode the memories carry c_w = 0.
    """
    cfg = run.controller
    n = run.system.order
    rng = np.random.default_rng(run.seed)
    c_w = 0.0 if cfg.mode == Mode.MANN_FROZEN else cfg.c_w
    nns, mems = [], []
    for d in input_dimensions(n, cfg.hidden):
        nns.append(check_weights(init_nn(d, cfg.hidden, rng)))
        mems.append(MemoryState.zeros(cfg.hidden, cfg.slots, c_w))
    if run.x0 is None:
        x0 = np.zeros(n)
    elif run.x0 == X0_ON_COMMAND:
        x0 = np.zeros(n)
        x0[0] = run.command.value(0.0)
    else:
        x0 = np.asarray(run.x0, dtype=float)
    return ClosedLoopState(0.0, x0.copy(), nns, mems)


def _control(t, s, run):
    try:
        return control_step(t, s.x, run.system, run.command, s.nns, s.mems, run.controller)
    except NumericError as err:
        err.t = t
        raise


def closed_loop_parts(t, s, run, phase_t=None):
    """
    Control output and the derivative of every block of the closed-loop state.

    Return
    --------
    (ControlStepOutput, dx, [(dW_aug, dV_aug, dmu), ...])
    """
    cfg = run.controller
    out = _control(t, s, run)
    dx = state_derivative(run.system, run.script, t, s.x, out.u, phase_t=phase_t)

    blocks = []
    for j, (nn, mem) in enumerate(zip(s.nns, s.mems)):
        dW, dV = weight_derivatives(nn, out.x_tilde[j], out.e[j], cfg, level=j + 1, fwd=out.forwards[j])
        if cfg.uses_memory and not run.pin_memory:
            q = out.forwards[j].q
            dmu = write_derivative(mem, q, q, nn.W_out, out.e[j], z=out.z[j])
        else:
            dmu = np.zeros_like(mem.mu)
        blocks.append((dW, dV, dmu))
    return out, dx, blocks


def closed_loop_derivative(t, s, run, phase_t=None):
    """Flat derivative of the closed-loop state, laid out like pack(s)."""
    _, dx, blocks = closed_loop_parts(t, s, run, phase_t=phase_t)
    parts = [dx]
    for dW, dV, dmu in blocks:
        parts.append(dV.ravel(order="F"))
        parts.append(dW)
        parts.append(dmu.ravel(order="F"))
    return np.concatenate(parts)


def _segments(run):
    """(start, end, n_steps) pieces of [0, T] split at the scenario event times."""
    cuts = sorted({0.0, run.T} | {t for t in run.script.event_times() if 0 < t < run.T})
    pieces = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        steps = max(1, int(math.ceil((b - a) / run.h - 1e-9)))
        pieces.append((a, b, steps))
    return pieces


def _record(t, s, run, out):
    """One trajectory row."""
    n = s.order
    cfg = run.controller
    read_norms = out.memory_read_norms
    row = {"t": t}
    for i in range(n):
        row[f"x{i + 1}"] = s.x[i]
    row["y"] = s.x[0]
    row["y_d"] = out.x_d[0]
    for i in range(n):
        row[f"e{i + 1}"] = out.e[i]
    for i in range(n):
        row[f"xd{i + 1}"] = out.x_d[i]
    row["u"] = out.u
    for j in range(n):
        lvl = j + 1
        row[f"W_norm{lvl}"] = float(np.linalg.norm(s.nns[j].W_aug))
        row[f"V_norm{lvl}"] = float(np.linalg.norm(s.nns[j].V_aug))
        row[f"mu_norm{lvl}"] = float(np.linalg.norm(s.mems[j].mu))
        row[f"K{lvl}"] = out.gains[j]
        row[f"h_hat{lvl}"] = out.h_hat[j]
        row[f"M_r_norm{lvl}"] = read_norms[j]
        scale, offset = run.script.modifiers(lvl, t)
        row[f"scale{lvl}"] = scale
        row[f"offset{lvl}"] = offset
    q1 = out.forwards[0].q
    scaled = out.M_r[0] / s.mems[0].c_w if s.mems[0].c_w > 0 and cfg.uses_memory else np.full(cfg.hidden, np.nan)
    for j in range(cfg.hidden):
        row[f"q1_{j + 1}"] = q1[j]
    for j in range(cfg.hidden):
        row[f"mem1_{j + 1}"] = scaled[j]
    return row


def _guard(row, run, n):
    """Raise DivergenceError when a recorded norm or the state is non-finite or above the guard."""
    keys = [f"x{i + 1}" for i in range(n)] + ["u"]
    keys += [f"{name}{i + 1}" for i in range(n) for name in ("W_norm", "V_norm", "mu_norm")]
    for key in keys:
        val = row[key]
        if not math.isfinite(val) or abs(val) > run.blowup:
            msg = (f"Simulation diverged at t = {row['t']:.6g} s: {key} = {val:.6g} "
                   f"exceeds the blow-up guard {run.blowup:.3g}.")
            logging.info(msg)
            raise DivergenceError(msg, t=row["t"], quantity=key)


def simulate(run):
    """
    Integrate the closed loop over [0, T] and record every `decimation`-th step.

    Parameters
    --------
    run: RunConfig

    Return
    --------
    Trajectory

    Raises
    --------
    DivergenceError when a recorded norm exceeds run.blowup or a derivative turns non-finite.

    Example
    --------
    >>> traj = simulate(RunConfig(system=make_example1(), script=scenario_preset("scenario1")))
    """
    cfg = run.controller
    n = run.system.order
    state = init_closed_loop(run)
    template = state
    flat = pack(state)
    pieces = _segments(run)
    total = sum(p[2] for p in pieces)

    logging.info(f"Simulating {run.system.name} ({run.script.name}) in {cfg.mode.value} mode "
                 f"over {run.T:g} s ({total} steps).")

    rows = []

    def record(t, vec):
        s = unpack(vec, template, t=t)
        out = _control(t, s, run)
        row = _record(t, s, run, out)
        _guard(row, run, n)
        rows.append(row)

    record(0.0, flat)
    step = 0
    with tqdm(total=total, disable=not run.progress) as bar:
        for a, b, steps in pieces:
            hs = (b - a) / steps
            if a > 0:
                logging.debug(f"Scenario change at t = {a:g} s.")

            def deriv(tt, vec, phase=a):
                return closed_loop_derivative(tt, unpack(vec, template, t=tt), run, phase_t=phase)

            for i in range(steps):
                t0 = a + i * hs
                try:
                    flat = rk4_step(deriv, t0, flat, hs)
                except NumericError as err:
                    tt = t0 if err.t is None else err.t
                    msg = f"Simulation diverged at t = {tt:.6g} s: {err}"
                    logging.info(msg)
                    raise DivergenceError(msg, t=tt, quantity="derivative") from err
                step += 1
                t1 = b if i == steps - 1 else a + (i + 1) * hs
                if step % run.decimation == 0 or step == total:
                    record(t1, flat)
                bar.update(1)

    frame = pd.DataFrame(rows)
    return Trajectory(frame=frame, mode=cfg.mode.value, order=n, hidden=cfg.hidden,
                      c_w=template.mems[0].c_w, events=run.script.change_times(run.T))
