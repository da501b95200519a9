#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Weight update laws, identical at every level:

    W_aug' = C_w (sigma_hat - sigma' V_aug^T x_e) e - kappa C_w W_aug
    V_aug' = C_v x_e e (W_aug^T sigma') - kappa C_v V_aug

Memory does not enter these laws; it only changes the trajectory of e.
"""

import numpy as np
from .nn import forward


def weight_derivatives(nn, x_tilde, e, cfg, level=1, fwd=None):
    """
    Time derivatives of one level's augmented weights.

    Parameters
    --------
    nn: TwoLayerNN
    x_tilde: network input of this level
    e: float, this level's tracking error
    cfg: ControllerConfig (learning rates and sigma-modification)
    level: int, 1-based, selects per-level rate overrides
    fwd: Forward, optional cached evaluation at x_tilde

    Return
    --------
    (dW_aug, dV_aug) with the shapes of W_aug and V_aug
    """
    if fwd is None:
        fwd = forward(nn, x_tilde)
    C_w, C_v, kappa = cfg.rates(level)

    dW = C_w * (fwd.sigma_hat - fwd.sigma_prime_z) * e - kappa * C_w * nn.W_aug
    row = nn.W_out * fwd.slope
    dV = C_v * e * np.outer(fwd.x_e, row) - kappa * C_v * nn.V_aug
    return dW, dV
