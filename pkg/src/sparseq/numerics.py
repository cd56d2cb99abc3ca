"""Special functions and stable reductions used by the variational updates."""

from __future__ import annotations

import numpy as np

# Asymptotic expansion of digamma: psi(x) ~ log x - 1/(2x) - sum B_2k / (2k x^2k)
_ASYMPTOTIC_COEFS = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
_RECURRENCE_FLOOR = 6.0


def digamma(x):
    """Digamma function psi(x) for x > 0.

    Shifts every argument up to ``x >= 6`` with psi(x) = psi(x + 1) - 1/x and
    evaluates the asymptotic series there. Absolute error is below 1e-10 on
    [1e-3, 1e7]. Accepts scalars or arrays; scalars come back as ``float``.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr <= 0):
        raise ValueError("digamma is only defined here for x > 0")
    z = arr.copy()
    shift = np.zeros_like(z)
    low = z < _RECURRENCE_FLOOR
    while np.any(low):
        shift[low] += 1.0 / z[low]
        z[low] += 1.0
        low = z < _RECURRENCE_FLOOR
    inv2 = 1.0 / (z * z)
    series = np.zeros_like(z)
    for c in reversed(_ASYMPTOTIC_COEFS):
        series = (series + c) * inv2
    out = np.log(z) - 0.5 / z - series - shift
    if out.ndim == 0:
        return float(out)
    return out


def log_sum_exp(v, axis=None):
    """log(sum(exp(v))) without overflow.

    Entries equal to ``-inf`` contribute zero mass. Reducing an all ``-inf``
    slice gives ``-inf``.
    """
    a = np.asarray(v, dtype=float)
    if a.size == 0:
        raise ValueError("log_sum_exp of an empty input")
    top = np.max(a, axis=axis, keepdims=True)
    top = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - top), axis=axis, keepdims=True)) + top
    if axis is None:
        return float(out.reshape(()))
    return np.squeeze(out, axis=axis)


def sigmoid(x):
    """Logistic map 1 / (1 + exp(-x)), evaluated without overflow."""
    a = np.asarray(x, dtype=float)
    pos = a >= 0
    # exp of a non-positive number only
    e = np.exp(np.where(pos, -a, a))
    out = np.where(pos, 1.0 / (1.0 + e), e / (1.0 + e))
    if out.ndim == 0:
        return float(out)
    return out


def normalize_log_weights(logw, axis=-1):
    """Exponentiate and normalize log-weights along ``axis``."""
    logw = np.asarray(logw, dtype=float)
    return np.exp(logw - np.expand_dims(log_sum_exp(logw, axis=axis), axis))
