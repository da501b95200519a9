#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Working memory attached to each level's network.

The memory is an N x n_s matrix mu whose columns are slots. Reads and writes
are addressed by the same softmax weights z = softmax(mu^T q):

    read:   M_r = mu z
    write:  d/dt mu[:, j] = z_j (-mu[:, j] + c_w a + W_out e)

where the query q and the write vector a are both the current hidden-layer
output and W_out is the output weight vector without its bias entry.
"""

from dataclasses import dataclass
import numpy as np
from .numerics import softmax, as_mat
from .nn import hidden
from .helper_mods.errors import DimensionError, ConfigError

DEFAULT_WRITE_CONSTANT = 0.75


@dataclass
class MemoryState:
    """Slot matrix mu (N x n_s) and write constant c_w."""
    mu: np.ndarray
    c_w: float = DEFAULT_WRITE_CONSTANT

    def __post_init__(self):
        self.mu = as_mat(self.mu, name="Memory")
        if not 0.0 <= self.c_w <= 1.0:
            raise ConfigError(f"Write constant c_w must lie in [0, 1], got {self.c_w}.")

    @classmethod
    def zeros(cls, N, n_s, c_w=DEFAULT_WRITE_CONSTANT):
        return cls(np.zeros((N, n_s)), c_w)

    @property
    def N(self):
        return self.mu.shape[0]

    @property
    def slots(self):
        return self.mu.shape[1]

    def copy(self):
        return MemoryState(self.mu.copy(), self.c_w)

    @classmethod
    def view(cls, mu, c_w):
        """Wrap a slot matrix already known to be valid, without copying or checking it."""
        mem = cls.__new__(cls)
        mem.mu = mu
        mem.c_w = c_w
        return mem


def _check_slot_vector(mem, v, name):
    v = np.asarray(v, dtype=float)
    if v.shape != (mem.N,):
        raise DimensionError(f"{name} must have length {mem.N}, got {v.shape}.")
    return v


def read(mem, q):
    """
    Softmax-addressed read.

    Return
    --------
    (M_r, z): the read vector (length N) and the addressing weights (length n_s),
    which write_derivative reuses.
    """
    q = _check_slot_vector(mem, q, "Query")
    z = softmax(mem.mu.T @ q)
    return mem.mu @ z, z


def write_derivative(mem, q, a, W_out, e, z=None):
    """
    Time derivative of the slot matrix.

    Parameters
    --------
    mem: MemoryState
    q: query, length N
    a: write vector, length N
    W_out: output weights without bias, length N
    e: float, this level's tracking error
    z: addressing weights from read(mem, q); computed here when omitted

    Return
    --------
    numpy.ndarray of shape N x n_s
    """
    a = _check_slot_vector(mem, a, "Write vector")
    W_out = _check_slot_vector(mem, W_out, "Output weights")
    if z is None:
        _, z = read(mem, q)
    drive = mem.c_w * a + W_out * e
    return z[None, :] * (drive[:, None] - mem.mu)


def query(nn, x_tilde):
    """Query (and write) vector: the current hidden-layer output."""
    return hidden(nn, x_tilde)
