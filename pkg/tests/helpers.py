"""Shared test utilities: finite differences and error measures."""

from __future__ import annotations

import numpy as np

from brownian_lstm.lstm import PARAM_KEYS, sequence_forward
from brownian_lstm.training import bce_loss, mse_loss


def rel_error(a, b, floor: float = 1e-8) -> float:
    """Norm-based relative error between two gradients."""
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    num = float(np.linalg.norm((a - b).ravel()))
    den = max(float(np.linalg.norm(a.ravel())),
              float(np.linalg.norm(b.ravel())), floor)
    return num / den


def loss_at(params, kind, inputs, targets, head, noise):
    """Loss of a frozen-noise forward pass (the function FD perturbs)."""
    pred, _ = sequence_forward(params, inputs, kind, head=head, noise=noise)
    loss_fn = bce_loss if head == "sigmoid" else mse_loss
    loss, _ = loss_fn(pred[0], targets)
    return loss


def numeric_gradients(params, kind, inputs, targets, head, noise,
                      h: float = 1e-5) -> dict:
    """Central-difference gradients of loss_at for every parameter."""
    grads: dict[str, np.ndarray | float] = {}
    for key in PARAM_KEYS:
        arr = getattr(params, key)
        g = np.zeros_like(arr)
        flat = arr.ravel()
        g_flat = g.ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = loss_at(params, kind, inputs, targets, head, noise)
            flat[i] = orig - h
            down = loss_at(params, kind, inputs, targets, head, noise)
            flat[i] = orig
            g_flat[i] = (up - down) / (2.0 * h)
        grads[key] = g
    orig = params.alpha
    params.alpha = orig + h
    up = loss_at(params, kind, inputs, targets, head, noise)
    params.alpha = orig - h
    down = loss_at(params, kind, inputs, targets, head, noise)
    params.alpha = orig
    grads["alpha"] = (up - down) / (2.0 * h)
    return grads
