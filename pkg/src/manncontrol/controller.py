#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Backstepping control chain.

For k = 1..n the controller forms the tracking error e_k = x_k - x_{k,d},
the state-dependent gain K_k and the network estimate h_hat_k, and from them
the next virtual input

    x_{k+1,d} = (-K_k e_k - bound_{k-1} e_{k-1} - h_hat_k) / bound_k

with x_{1,d} = y_d. The value produced at level n is the plant input u.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional
import numpy as np
from .numerics import quad01
from .nn import forward, approximate_h, assemble_input, flatten_weights
from .memory import read, DEFAULT_WRITE_CONSTANT
from .plant import effective_drift
from .helper_mods.errors import AssumptionError, ConfigError, NumericError


class Mode(str, Enum):
    """MANN reads and writes memory; NN has no memory; MANN_FROZEN writes with c_w = 0."""
    MANN = "mann"
    NN = "nn"
    MANN_FROZEN = "mann-frozen"


@dataclass
class ControllerConfig:
    """
    Gains, learning rates and memory sizes shared by every level.

    level_overrides maps a 1-based level to {"C_w", "C_v", "kappa"} replacements.
    theorem_preset sets k_z = K and kappa = 1/sqrt(K).
    """
    K: float = 20.0
    k_z: float = 0.0
    kappa: float = 0.0
    C_w: float = 10.0
    C_v: float = 10.0
    mode: Mode = Mode.MANN
    theorem_preset: bool = False
    hidden: int = 6
    slots: int = 1
    c_w: float = DEFAULT_WRITE_CONSTANT
    level_overrides: Dict[int, Dict[str, float]] = field(default_factory=dict)

    def __post_init__(self):
        try:
            self.mode = Mode(self.mode)
        except ValueError:
            raise ConfigError(f"{self.mode} is not a valid controller mode. Use one of: nn, mann, mann-frozen.")
        if self.theorem_preset:
            self.k_z = self.K
            self.kappa = 1.0 / math.sqrt(self.K) if self.K > 0 else self.kappa
        if not self.K > 0:
            raise ConfigError(f"Base gain K must be positive, got {self.K}.")
        if not (self.C_w > 0 and self.C_v > 0):
            raise ConfigError(f"Learning rates must be positive, got C_w = {self.C_w}, C_v = {self.C_v}.")
        if self.kappa < 0 or self.k_z < 0:
            raise ConfigError(f"kappa and k_z must be non-negative, got {self.kappa} and {self.k_z}.")
        if self.hidden < 1 or self.slots < 1:
            raise ConfigError(f"Hidden width and slot count must be at least 1, got {self.hidden} and {self.slots}.")
        if not 0.0 <= self.c_w <= 1.0:
            raise ConfigError(f"Write constant c_w must lie in [0, 1], got {self.c_w}.")
        self.level_overrides = {int(k): dict(v) for k, v in self.level_overrides.items()}
        for level, rates in self.level_overrides.items():
            unknown = set(rates) - {"C_w", "C_v", "kappa"}
            if unknown:
                raise ConfigError(f"Unknown override keys for level {level}: {sorted(unknown)}.")

    def rates(self, level):
        """(C_w, C_v, kappa) for a 1-based level."""
        o = self.level_overrides.get(level, {})
        return (float(o.get("C_w", self.C_w)), float(o.get("C_v", self.C_v)),
                float(o.get("kappa", self.kappa)))

    @property
    def uses_memory(self):
        return self.mode != Mode.NN


@dataclass
class ControlStepOutput:
    """
    Errors, virtual inputs and plant input from one pass of the recursion,
    plus the per-level quantities the adaptation and memory laws reuse.
    """
    e: np.ndarray
    x_d: np.ndarray
    u: float
    gains: np.ndarray
    h_hat: np.ndarray
    x_tilde: List[np.ndarray]
    forwards: list
    M_r: List[np.ndarray]
    z: List[Optional[np.ndarray]]

    @property
    def memory_read_norms(self):
        return np.array([np.linalg.norm(m) for m in self.M_r])


def gain_K(k, e_k, x_kd, x_prefix, nn, mem, cfg, system, x_tilde, fwd=None):
    """
    State-dependent gain of level k.

    K_k = K (1 + int_0^1 theta bound_k(x_1..x_{k-1}, theta e_k + x_{k,d}) dtheta)
          + k_z ||W_aug||_F ||mu||_F
          + K (||x_e (W_aug^T sigma')||_F^2 + ||sigma' V_aug^T x_e||_2^2)

    The first norm is of the (d+1) x N outer product of x_e with the row W_aug^T sigma'.
    mem may be None (no memory), which removes the k_z term.
    """
    if fwd is None:
        fwd = forward(nn, x_tilde)
    head = list(x_prefix[:k - 1])
    bound_k = system.bound[k - 1]
    quad = quad01(lambda th: bound_k(head + [th * e_k + x_kd]), weight="theta")

    # ||x_e row||_F^2 = ||x_e||^2 ||row||^2 for the outer product
    row = nn.W_out * fwd.slope
    outer_term = float(fwd.x_e @ fwd.x_e) * float(row @ row)
    sz = fwd.slope * fwd.z
    vec_term = float(sz @ sz)
    if mem is None or cfg.k_z == 0:
        mem_term = 0.0
    else:
        mem_term = cfg.k_z * float(np.linalg.norm(nn.W_aug)) * float(np.linalg.norm(mem.mu))

    val = cfg.K * (1.0 + quad) + mem_term + cfg.K * (outer_term + vec_term)
    if not math.isfinite(val):
        raise NumericError(f"Gain K_{k} is not finite.", level=k)
    return val


def control_step(t, x, system, cmd, nns, mems, cfg):
    """
    One pass of the backstepping recursion at the current weights and memory.

    Parameters
    --------
    t: float, time in seconds
    x: plant state of length n
    system: StrictFeedbackSystem (only the known bounds are used)
    cmd: CommandSignal
    nns: list of TwoLayerNN, one per level
    mems: list of MemoryState, one per level (ignored in NN mode)
    cfg: ControllerConfig

    Return
    --------
    ControlStepOutput

    Raises
    --------
    AssumptionError when a bound is at or below its lower bound.
    """
    n = system.order
    x = np.asarray(x, dtype=float)
    cmd_values = cmd.stack(t, n)
    N = nns[0].N

    e = np.zeros(n)
    x_d = np.zeros(n)
    gains = np.zeros(n)
    h_hat = np.zeros(n)
    x_tildes, fwds, reads, zs = [], [], [], []
    flats = []
    prev_bound = 0.0
    u = 0.0

    x_d[0] = cmd_values[0]
    e[0] = x[0] - x_d[0]
    for k in range(1, n + 1):
        j = k - 1
        nn = nns[j]
        x_tilde = assemble_input(k, x, cmd_values, flats)
        fwd = forward(nn, x_tilde)

        if cfg.uses_memory:
            mem = mems[j]
            M_r, z = read(mem, fwd.q)
        else:
            mem = None
            M_r, z = np.zeros(N), None

        h_hat[j] = approximate_h(nn, x_tilde, M_r, fwd=fwd)
        gains[j] = gain_K(k, e[j], x_d[j], x, nn, mem, cfg, system, x_tilde, fwd=fwd)

        bound_k = float(system.bound[j](x[:k]))
        if not bound_k >= system.lower_bound[j]:
            raise AssumptionError(
                f"Gain bound at level {k} is {bound_k:.6g}, below its lower bound "
                f"{system.lower_bound[j]:.6g} at t = {t:.6g} s.", level=k, t=t)
        cross = prev_bound * e[j - 1] if k >= 2 else 0.0
        v = (-gains[j] * e[j] - cross - h_hat[j]) / bound_k

        if k < n:
            x_d[k] = v
            e[k] = x[k] - v
        else:
            u = v

        x_tildes.append(x_tilde)
        fwds.append(fwd)
        reads.append(M_r)
        zs.append(z)
        if k < n:
            flats.append(flatten_weights(nn))
        prev_bound = bound_k

    if not math.isfinite(u):
        raise NumericError(f"Control input is not finite at t = {t:.6g} s.", t=t)
    return ControlStepOutput(e=e, x_d=x_d, u=u, gains=gains, h_hat=h_hat,
                             x_tilde=x_tildes, forwards=fwds, M_r=reads, z=zs)


def ideal_first_order_control(t, x1, cmd, system, K, script=None):
    """
    Ideal level-1 control with the true drift and gain known.

    u* = (-K e_1 - h_1) / bound_1(x_1),
    h_1 = beta_1(x_1) f_1(x_1) - y_d' int_0^1 beta_1(theta e_1 + y_d) dtheta,
    beta_1 = bound_1 / g_1.
    """
    y_d = cmd.value(t, 0)
    y_d_dot = cmd.value(t, 1)
    e1 = x1 - y_d
    bound_1, gain_1 = system.bound[0], system.gain[0]

    def beta(xs):
        return bound_1(xs) / gain_1(xs)

    f1 = effective_drift(system, script, 1, t, [x1])
    h1 = beta([x1]) * f1 - y_d_dot * quad01(lambda th: beta([th * e1 + y_d]), weight="plain")
    return (-K * e1 - h1) / bound_1([x1])


def true_h(k, system, traj, script=None, fd_step=1e-6):
    """
    The function h_k that level k's network approximates, evaluated along a recorded trajectory.

    h_k = beta_k f_k(x_1..x_k)
          + e_k x_{k-1}' int_0^1 theta d(beta_k)/d(x_{k-1}) (x_1..x_{k-1}, theta e_k + x_{k,d}) dtheta
          - x_{k,d}' int_0^1 beta_k(x_1..x_{k-1}, theta e_k + x_{k,d}) dtheta

    Time derivatives come from finite differences of the recorded samples and
    the partial derivative of beta_k from a central difference.

    Parameters
    --------
    k: int, 1-based level
    system: StrictFeedbackSystem with the true f_k, g_k
    traj: Trajectory (needs columns t, x1..xn, xd1..xdn)
    script: ScenarioScript applied to f_k, optional

    Return
    --------
    numpy.ndarray with one value per recorded sample
    """
    frame = traj.frame if hasattr(traj, "frame") else traj
    if len(frame) < 2:
        raise ValueError("true_h needs at least two trajectory samples to differentiate.")

    times = frame["t"].to_numpy()
    xs = frame[[f"x{i}" for i in range(1, system.order + 1)]].to_numpy()
    xd_k = frame[f"xd{k}"].to_numpy()
    xd_dot = np.gradient(xd_k, times)
    x_prev_dot = np.gradient(xs[:, k - 2], times) if k >= 2 else np.zeros(len(times))

    bound_k, gain_k = system.bound[k - 1], system.gain[k - 1]

    def beta(args):
        return bound_k(args) / gain_k(args)

    out = np.empty(len(times))
    for s in range(len(times)):
        state = xs[s]
        e_k = state[k - 1] - xd_k[s]
        head = list(state[:k - 1])
        f_k = effective_drift(system, script, k, times[s], state[:k])
        val = beta(state[:k]) * f_k
        if k >= 2:
            def dbeta(th):
                last = th * e_k + xd_k[s]
                up = head[:-1] + [head[-1] + fd_step, last]
                dn = head[:-1] + [head[-1] - fd_step, last]
                return (beta(up) - beta(dn)) / (2 * fd_step)
            val += e_k * x_prev_dot[s] * quad01(dbeta, weight="theta")
        val -= xd_dot[s] * quad01(lambda th: beta(head + [th * e_k + xd_k[s]]), weight="plain")
        out[s] = val
    return out
