"""Small numerically-stable primitives shared across modules."""

from __future__ import annotations

import numpy as np


def sigmoid(x):
    """Elementwise logistic function, stable for large |x|."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out if out.ndim else float(out)


def logit(p: float) -> float:
    """Inverse logistic. Caller is responsible for clamping p away from {0, 1}."""
    return float(np.log(p) - np.log1p(-p))


def softplus(x):
    """log(1 + exp(x)) without overflow; softplus(-x) is -log(sigmoid(x))."""
    x = np.asarray(x, dtype=np.float64)
    out = np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))
    return out if out.ndim else float(out)


def logsumexp(values) -> float:
    """Max-shifted LogSumExp of a 1-D collection of finite logits."""
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("logsumexp of empty collection")
    m = float(arr.max())
    return m + float(np.log(np.exp(arr - m).sum()))
