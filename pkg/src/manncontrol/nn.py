#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Two-layer network used at every backstepping level, in augmented-weight form.

V_aug is (d+1) x N with the hidden bias as its final row; W_aug has length
N+1 with the output bias as its final entry. With x_e = [x_tilde; 1] and
z = V_aug^T x_e the network evaluates

    sigma_hat = [sigmoid(z); 1]
    h_hat     = W_aug^T (sigma_hat + [M_r; 0])
"""

from dataclasses import dataclass
from typing import NamedTuple
import numpy as np
from .numerics import sigmoid, as_vec, as_mat
from .helper_mods.errors import DimensionError


@dataclass
class TwoLayerNN:
    """Augmented weights of one level's network."""
    V_aug: np.ndarray
    W_aug: np.ndarray

    def __post_init__(self):
        self.V_aug = as_mat(self.V_aug, name="V_aug")
        self.W_aug = as_vec(self.W_aug, name="W_aug")
        if self.V_aug.shape[0] < 2:
            raise DimensionError(f"V_aug must be (d+1) x N with d, N >= 1, got {self.V_aug.shape}.")
        if self.W_aug.shape != (self.V_aug.shape[1] + 1,):
            raise DimensionError(
                f"W_aug must have length N+1 = {self.V_aug.shape[1] + 1}, got {self.W_aug.shape}.")

    @property
    def d(self):
        return self.V_aug.shape[0] - 1

    @property
    def N(self):
        return self.V_aug.shape[1]

    @property
    def W_out(self):
        """Output weights without the bias entry."""
        return self.W_aug[:-1]

    def copy(self):
        return TwoLayerNN(self.V_aug.copy(), self.W_aug.copy())

    @classmethod
    def view(cls, V_aug, W_aug):
        """Wrap arrays already known to have matching shapes, without copying or checking them."""
        nn = cls.__new__(cls)
        nn.V_aug = V_aug
        nn.W_aug = W_aug
        return nn


class NNInput(NamedTuple):
    """Network input x_tilde and its bias-extended form x_e = [x_tilde; 1]."""
    x_tilde: np.ndarray
    x_e: np.ndarray

    @classmethod
    def from_x_tilde(cls, x_tilde):
        x_tilde = np.asarray(x_tilde, dtype=float)
        return cls(x_tilde, _with_bias(x_tilde))


def _with_bias(v):
    out = np.empty(len(v) + 1)
    out[:-1] = v
    out[-1] = 1.0
    return out


class Forward(NamedTuple):
    """
    Everything one evaluation of a network produces.

    slope holds sigmoid'(z), the diagonal of sigma'. The full (N+1) x N
    matrix is built only on request.
    """
    x_e: np.ndarray
    z: np.ndarray
    q: np.ndarray
    sigma_hat: np.ndarray
    slope: np.ndarray

    @property
    def sigma_prime(self):
        return np.vstack([np.diag(self.slope), np.zeros((1, len(self.slope)))])

    @property
    def sigma_prime_z(self):
        """sigma' z as a vector of length N+1 (final entry zero)."""
        out = np.zeros(len(self.z) + 1)
        out[:-1] = self.slope * self.z
        return out


def forward(nn, x_tilde):
    """Evaluate the hidden layer once and derive sigma_hat and its Jacobian from it."""
    inp = x_tilde if isinstance(x_tilde, NNInput) else NNInput.from_x_tilde(x_tilde)
    if inp.x_tilde.shape != (nn.d,):
        raise DimensionError(f"Network input must have length {nn.d}, got {inp.x_tilde.shape}.")
    x_e = inp.x_e
    z = nn.V_aug.T @ x_e
    q = sigmoid(z)
    return Forward(x_e, z, q, _with_bias(q), q * (1.0 - q))


def hidden(nn, x_tilde):
    """Hidden-layer output q = sigmoid(V_aug^T x_e), length N."""
    return forward(nn, x_tilde).q


def sigma_hat(nn, x_tilde):
    """Hidden output with a constant 1 appended, length N+1."""
    return forward(nn, x_tilde).sigma_hat


def sigma_prime(nn, x_tilde):
    """
    Jacobian of sigma_hat with respect to the pre-activation z, shape (N+1) x N.

    The top N x N block is diag(sigmoid'(z)); the final row is zero.
    """
    return forward(nn, x_tilde).sigma_prime


def approximate_h(nn, x_tilde, M_r, fwd=None):
    """
    Memory-modified network output W_aug^T (sigma_hat + [M_r; 0]).

    Parameters
    --------
    nn: TwoLayerNN
    x_tilde: network input of length d
    M_r: memory read of length N (zeros for the memory-free network)
    fwd: Forward, optional, a cached evaluation at x_tilde

    Return
    --------
    float
    """
    M_r = np.asarray(M_r, dtype=float)
    if M_r.shape != (nn.N,):
        raise DimensionError(f"Memory read must have length {nn.N}, got {M_r.shape}.")
    if fwd is None:
        fwd = forward(nn, x_tilde)
    return float(nn.W_aug @ fwd.sigma_hat + nn.W_out @ M_r)


def flatten_weights(nn):
    """Column-major V_aug followed by W_aug."""
    return np.concatenate([nn.V_aug.ravel(order="F"), nn.W_aug])


def input_dimensions(n, N):
    """
    Input length d_k of every level's network for an order-n plant with N hidden units.

    d_k = k states + (k+1) command derivatives + the flattened weights of levels 1..k-1.
    """
    dims = []
    weights = 0
    for k in range(1, n + 1):
        d = k + (k + 1) + weights
        dims.append(d)
        weights += (d + 1) * N + (N + 1)
    return dims


def assemble_input(k, x, cmd_values, prior_weights=()):
    """
    Network input of level k: [x_1..x_k, y_d, y_d', ..., y_d^(k), flat(Z_1), ..., flat(Z_{k-1})].

    Parameters
    --------
    k: int, 1-based level
    x: plant state (at least k entries)
    cmd_values: command derivatives y_d^(0..j) with j >= k
    prior_weights: flattened weights of levels 1..k-1, in order

    Return
    --------
    numpy.ndarray
    """
    cmd_values = np.asarray(cmd_values, dtype=float)
    if len(cmd_values) < k + 1:
        raise DimensionError(f"Level {k} needs command derivatives up to order {k}, got {len(cmd_values) - 1}.")
    if len(prior_weights) != k - 1:
        raise DimensionError(f"Level {k} needs the weights of {k - 1} earlier levels, got {len(prior_weights)}.")
    parts = [np.asarray(x[:k], dtype=float), cmd_values[:k + 1]]
    parts.extend(prior_weights)
    return np.concatenate(parts)


def init_nn(d, N, rng):
    """
    Seeded initial weights: V_aug uniform on [-0.5, 0.5], W_aug zero.
    """
    nn = zero_nn(d, N)
    nn.V_aug[:] = rng.uniform(-0.5, 0.5, size=nn.V_aug.shape)
    return nn


def zero_nn(d, N):
    """Network with every weight zero: sigmoid(0) = 1/2 on each hidden unit and zero output."""
    return TwoLayerNN(np.zeros((d + 1, N)), np.zeros(N + 1))


def check_weights(nn, name="network"):
    """Raise if any weight is non-finite."""
    as_vec(flatten_weights(nn), name=f"{name} weights")
    return nn
