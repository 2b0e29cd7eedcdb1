"""Dot-product attention with pluggable prescaled-softmax rescalings.

Queries, keys and values are plain float64 numpy arrays. A key set is an
``(n, d)`` array wrapped in :class:`KeySet`; scores are divided by a constant
``c`` chosen by a :class:`ScalingRule` and pushed onto the probability simplex
with a max-subtracted softmax.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np


class AttentionError(ValueError):
    """Base class for invalid attention inputs."""


class DimensionMismatchError(AttentionError):
    pass


class ZeroScaleError(AttentionError):
    """The scaling constant came out as zero (e.g. every key is the zero vector)."""


class NonPositiveScaleError(AttentionError):
    pass


def as_vector(x, name: str = "vector") -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1 or v.size == 0:
        raise AttentionError(f"{name} must be a nonempty 1-d array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise AttentionError(f"{name} has non-finite components")
    return v


@dataclass(frozen=True, eq=False)
class KeySet:
    """An ordered set of ``n`` keys sharing dimension ``d``, stored row-wise."""

    keys: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.keys, dtype=np.float64)
        if k.ndim != 2 or k.shape[0] < 1 or k.shape[1] < 1:
            raise AttentionError(f"keys must be a nonempty (n, d) array, got shape {k.shape}")
        if not np.all(np.isfinite(k)):
            raise AttentionError("keys have non-finite components")
        k.setflags(write=False)
        object.__setattr__(self, "keys", k)

    @classmethod
    def from_vectors(cls, vectors: Sequence) -> KeySet:
        rows = [as_vector(v, "key") for v in vectors]
        dims = {r.size for r in rows}
        if len(dims) > 1:
            raise DimensionMismatchError(f"keys have differing dimensions {sorted(dims)}")
        return cls(np.vstack(rows))

    @property
    def count(self) -> int:
        return self.keys.shape[0]

    @property
    def dim(self) -> int:
        return self.keys.shape[1]

    def norms(self) -> np.ndarray:
        """Euclidean length of each key; hypot keeps huge or tiny keys from over/underflowing."""
        return np.hypot.reduce(self.keys, axis=1)

    def scaled(self, factor: float) -> KeySet:
        return KeySet(self.keys * factor)

    def permuted(self, order) -> KeySet:
        return KeySet(self.keys[np.asarray(order)])


class RuleKind(str, Enum):
    SQRT_DIM = "sqrt_dim"
    KEY_LENGTH_SUM = "key_length_sum"
    MEAN_KEY_LENGTH = "mean_key_length"
    RMS_KEY_NORM = "rms_key_norm"
    LP_NORM = "lp_norm"
    N_SQRT_DIM = "n_sqrt_dim"
    UNSCALED = "unscaled"


@dataclass(frozen=True)
class ScalingRule:
    """Choice of the divisor applied to raw scores before softmax.

    ``p`` is only meaningful (and required) for :attr:`RuleKind.LP_NORM`.
    """

    kind: RuleKind
    p: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", RuleKind(self.kind))
        if self.kind is RuleKind.LP_NORM:
            if self.p is None or not math.isfinite(self.p) or self.p <= 0:
                raise AttentionError(f"lp_norm needs a finite p > 0, got {self.p!r}")
            object.__setattr__(self, "p", float(self.p))
        elif self.p is not None:
            raise AttentionError(f"{self.kind.value} takes no exponent")

    @classmethod
    def lp(cls, p: float) -> ScalingRule:
        return cls(RuleKind.LP_NORM, p)

    @property
    def name(self) -> str:
        if self.kind is RuleKind.LP_NORM:
            return f"lp_norm(p={self.p:g})"
        return self.kind.value


SQRT_DIM = ScalingRule(RuleKind.SQRT_DIM)
KEY_LENGTH_SUM = ScalingRule(RuleKind.KEY_LENGTH_SUM)
MEAN_KEY_LENGTH = ScalingRule(RuleKind.MEAN_KEY_LENGTH)
RMS_KEY_NORM = ScalingRule(RuleKind.RMS_KEY_NORM)
N_SQRT_DIM = ScalingRule(RuleKind.N_SQRT_DIM)
UNSCALED = ScalingRule(RuleKind.UNSCALED)


def dot_attention(q, k) -> float:
    q = as_vector(q, "query")
    k = as_vector(k, "key")
    if q.size != k.size:
        raise DimensionMismatchError(f"query has dim {q.size}, key has dim {k.size}")
    return float(np.dot(q, k))


def vector_attention(q, ks: KeySet) -> np.ndarray:
    """Scores ``q . k_i`` for every key, in key order."""
    q = as_vector(q, "query")
    if q.size != ks.dim:
        raise DimensionMismatchError(f"query has dim {q.size}, keys have dim {ks.dim}")
    return ks.keys @ q


def _lp_sum(norms: np.ndarray, p: float) -> float:
    top = norms.max()
    if top == 0.0:
        return 0.0
    # factor out the largest norm so large p cannot overflow
    return float(top * np.sum((norms / top) ** p) ** (1.0 / p))


def scaling_constant(rule: ScalingRule, ks: KeySet) -> float:
    """The divisor ``c`` that ``rule`` assigns to the key set ``ks``.

    Raises :class:`ZeroScaleError` when a norm-based rule meets a key set
    made entirely of zero vectors.
    """
    kind = rule.kind
    if kind is RuleKind.SQRT_DIM:
        return math.sqrt(ks.dim)
    if kind is RuleKind.N_SQRT_DIM:
        return ks.count * math.sqrt(ks.dim)
    if kind is RuleKind.UNSCALED:
        return 1.0

    norms = ks.norms()
    if kind is RuleKind.KEY_LENGTH_SUM:
        c = float(np.sum(norms))
    elif kind is RuleKind.MEAN_KEY_LENGTH:
        c = float(np.sum(norms)) / ks.count
    elif kind is RuleKind.RMS_KEY_NORM:
        c = _lp_sum(norms, 2.0)
    else:
        c = _lp_sum(norms, rule.p)
    if c == 0.0:
        raise ZeroScaleError(f"{rule.name} is zero: every key is the zero vector")
    return c


def prescaled_softmax(scores, c: float) -> np.ndarray:
    """Softmax of ``scores / c`` along the last axis.

    Works on a single score vector or on a stack of them (one per row). The
    row maximum is subtracted before exponentiating, so finite inputs never
    overflow.
    """
    if not (math.isfinite(c) and c > 0):
        raise NonPositiveScaleError(f"scale must be finite and > 0, got {c!r}")
    x = np.asarray(scores, dtype=np.float64)
    if x.ndim == 0 or x.shape[-1] == 0:
        raise AttentionError("scores must have at least one component")
    if not np.all(np.isfinite(x)):
        raise AttentionError("scores have non-finite components")
    # shifting before dividing keeps x / c from overflowing; a difference that
    # overflows to -inf just exponentiates to 0
    with np.errstate(over="ignore"):
        z = (x - x.max(axis=-1, keepdims=True)) / c
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def rescaled_vector_attention(q, ks: KeySet, rule: ScalingRule) -> np.ndarray:
    return prescaled_softmax(vector_attention(q, ks), scaling_constant(rule, ks))


def combine_values(w, values) -> np.ndarray:
    """Convex combination ``sum_i w_i v_i`` of the rows of ``values``."""
    w = as_vector(w, "weights")
    vs = np.asarray(values, dtype=np.float64)
    if vs.ndim != 2:
        raise AttentionError(f"values must be an (n, t) array, got shape {vs.shape}")
    if vs.shape[0] != w.size:
        raise DimensionMismatchError(f"{w.size} weights for {vs.shape[0]} values")
    return w @ vs


def batch_attention(queries, ks: KeySet, values, rule: ScalingRule) -> np.ndarray:
    """Attention output for each query, one row per query.

    Rows are computed independently; a failure names the offending row.
    """
    c = scaling_constant(rule, ks)
    out = []
    for i, q in enumerate(queries):
        try:
            w = prescaled_softmax(vector_attention(q, ks), c)
            out.append(combine_values(w, values))
        except AttentionError as exc:
            raise type(exc)(f"query row {i}: {exc}") from exc
    if not out:
        raise AttentionError("no queries given")
    return np.vstack(out)
