"""Softmax Jacobian and saturation measures.

A softmax output close to a simplex vertex has a Jacobian close to zero,
which is where gradient signal dies.
"""

from __future__ import annotations

import numpy as np

SIMPLEX_ATOL = 1e-12


def _check_simplex(w) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.ndim != 1 or w.size == 0:
        raise ValueError(f"expected a nonempty 1-d weight vector, got shape {w.shape}")
    if not np.all(np.isfinite(w)) or w.min() < 0 or w.max() > 1:
        raise ValueError("weights must lie in [0, 1]")
    if abs(w.sum() - 1.0) > SIMPLEX_ATOL * max(1, w.size):
        raise ValueError(f"weights sum to {w.sum()!r}, not 1")
    return w


def softmax_jacobian(w) -> np.ndarray:
    """``J[i, j] = w_i (delta_ij - w_j)``: derivative of softmax at the point with output ``w``."""
    w = _check_simplex(w)
    return np.diag(w) - np.outer(w, w)


def gradient_norm(w) -> float:
    """Frobenius norm of the softmax Jacobian at ``w``.

    Zero exactly at the vertices. For n = 2 the uniform point is the maximum;
    for larger n it is not (two weights of 1/2 beat it), but it still sits
    far above any near-vertex point.
    """
    return float(np.linalg.norm(softmax_jacobian(w), "fro"))


def saturation_fraction(samples, epsilon: float) -> float:
    """Fraction of simplex vectors whose largest weight exceeds ``1 - epsilon``.

    ``samples`` is a sequence of weight vectors or an ``(m, n)`` array.
    """
    if not 0 < epsilon < 0.5:
        raise ValueError(f"epsilon must be in (0, 0.5), got {epsilon!r}")
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ValueError("samples must be a nonempty collection of weight vectors")
    return float(np.mean(arr.max(axis=1) > 1.0 - epsilon))
