#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Scalar, vector and matrix primitives used throughout the controller:
softmax, the logistic sigmoid and its derivative, Gauss-Legendre quadrature
on [0, 1], and a classical fixed-step Runge-Kutta step.

Vectors and matrices are plain numpy float64 arrays.
"""

import numpy as np
from .helper_mods.errors import DimensionError, NumericError

# 16-node Gauss-Legendre rule mapped from [-1, 1] onto [0, 1]
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
QUAD_NODES = 0.5 * (_GL_NODES + 1.0)
QUAD_WEIGHTS = 0.5 * _GL_WEIGHTS


def as_vec(values, name="vector"):
    """
    Convert values to a 1-d float64 array and check that every entry is finite.

    Parameters
    --------
    values: sequence of real numbers (or a scalar, read as a 1-vector)
    name: str, used in the error message

    Return
    --------
    numpy.ndarray of shape (len,)

    Raises
    --------
    NumericError if any entry is NaN or Inf.
    """
    v = np.atleast_1d(np.asarray(values, dtype=float))
    if v.ndim != 1:
        raise DimensionError(f"{name} must be one-dimensional, got shape {v.shape}.")
    if not np.all(np.isfinite(v)):
        raise NumericError(f"{name} contains non-finite entries.")
    return v


def as_mat(values, name="matrix"):
    """
    Convert values to a 2-d float64 array with strictly positive dimensions and finite entries.
    """
    m = np.asarray(values, dtype=float)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-d matrix, got shape {m.shape}.")
    if not np.all(np.isfinite(m)):
        raise NumericError(f"{name} contains non-finite entries.")
    return m


def softmax(v):
    """
    Softmax of a non-empty vector, computed after subtracting the maximum entry.

    Parameters
    --------
    v: array-like of finite reals

    Return
    --------
    numpy.ndarray of positive entries summing to one.

    Example
    --------
    >>> softmax([0.0, 0.0])
    array([0.5, 0.5])
    """
    v = np.asarray(v, dtype=float)
    if v.size == 0:
        raise DimensionError("softmax requires a non-empty input vector.")
    w = np.exp(v - np.max(v))
    return w / np.sum(w)


def sigmoid(x):
    """Logistic sigmoid, elementwise. Written with tanh so large |x| cannot overflow."""
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(x, dtype=float)))


def sigmoid_deriv(x):
    """Derivative of the logistic sigmoid, sigmoid(x) * (1 - sigmoid(x))."""
    s = sigmoid(x)
    return s * (1.0 - s)


def quad01(f, weight="plain"):
    """
    Integrate f over [0, 1] with a fixed 16-node Gauss-Legendre rule.

    Parameters
    --------
    f: callable
        Evaluated once on the array of quadrature nodes. A function returning a
        scalar constant is broadcast over the nodes.
    weight: str
        'plain' for the integral of f(theta), 'theta' for the integral of theta * f(theta).

    Return
    --------
    float

    Example
    --------
    >>> quad01(lambda th: th, weight="theta")   # 1/3
    """
    if weight not in ("plain", "theta"):
        raise ValueError(f"{weight} is not a valid quadrature weight. Use 'plain' or 'theta'.")

    vals = np.asarray(f(QUAD_NODES), dtype=float)
    if vals.shape != QUAD_NODES.shape:
        vals = np.broadcast_to(vals, QUAD_NODES.shape)
    if not np.all(np.isfinite(vals)):
        raise NumericError("Integrand returned a non-finite value on [0, 1].")

    if weight == "theta":
        vals = QUAD_NODES * vals
    return float(np.dot(QUAD_WEIGHTS, vals))


def rk4_step(deriv, t, s, h):
    """
    Advance the state s by one classical fourth-order Runge-Kutta step of size h.

    Parameters
    --------
    deriv: callable (t, s) -> ds/dt
    t: float, current time in seconds
    s: numpy.ndarray, flat state
    h: float, step size (> 0)

    Return
    --------
    numpy.ndarray, the state at t + h

    Raises
    --------
    NumericError carrying t if any stage derivative is non-finite.
    """
    if not h > 0:
        raise ValueError(f"Step size must be positive, got {h}.")

    def stage(tt, ss):
        d = np.asarray(deriv(tt, ss), dtype=float)
        if not np.all(np.isfinite(d)):
            raise NumericError(f"Non-finite state derivative at t = {tt:.6g} s.", t=tt)
        return d

    k1 = stage(t, s)
    k2 = stage(t + 0.5 * h, s + 0.5 * h * k1)
    k3 = stage(t + 0.5 * h, s + 0.5 * h * k2)
    k4 = stage(t + h, s + h * k3)
    return s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
