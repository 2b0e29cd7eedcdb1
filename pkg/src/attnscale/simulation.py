"""Monte Carlo experiments on the first component of vector attention.

One key set of ``n`` keys is drawn per experiment, then ``m`` queries. Keys
come from the ``(seed, keys)`` substream and query ``i`` from the
``(seed, query, i)`` substream, so changing ``m`` leaves the keys alone and
changing ``n`` leaves the queries alone.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import rng
from .attention import KeySet, ScalingRule, prescaled_softmax, scaling_constant


@dataclass(frozen=True)
class Normal:
    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.mean) and math.isfinite(self.sd)) or self.sd <= 0:
            raise ValueError(f"Normal needs finite mean and sd > 0, got {self}")

    def word_count(self, d: int) -> int:
        return rng.normal_word_count(d)

    def from_words(self, words: np.ndarray, d: int) -> np.ndarray:
        return self.mean + self.sd * rng.words_to_normal(words, d)


@dataclass(frozen=True)
class Uniform:
    lo: float = 0.0
    hi: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or self.hi <= self.lo:
            raise ValueError(f"Uniform needs finite lo < hi, got {self}")

    def word_count(self, d: int) -> int:
        return d

    def from_words(self, words: np.ndarray, d: int) -> np.ndarray:
        return self.lo + (self.hi - self.lo) * rng.words_to_uniform(words)


DistributionSpec = Union[Normal, Uniform]
STANDARD_NORMAL = Normal(0.0, 1.0)


class RawScores:
    """Marker: record the unrescaled dot product ``q . k_1`` instead of a weight."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "RAW_SCORES"

    @property
    def name(self) -> str:
        return "raw_scores"


RAW_SCORES = RawScores()

Rule = Union[ScalingRule, RawScores]


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int
    d: int
    n: int
    m: int
    rules: tuple[tuple[str, Rule], ...]
    key_dist: DistributionSpec = STANDARD_NORMAL
    query_dist: DistributionSpec = STANDARD_NORMAL
    replications: int = 100
    epsilon: float = 0.01

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple((str(lbl), r) for lbl, r in self.rules))
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        for name in ("d", "n", "m", "replications"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0 < self.epsilon < 0.5:
            raise ValueError("epsilon must be in (0, 0.5)")
        if not self.rules:
            raise ValueError("at least one rule is required")
        labels = [lbl for lbl, _ in self.rules]
        if len(set(labels)) != len(labels):
            raise ValueError(f"rule labels must be unique, got {labels}")
        for lbl, r in self.rules:
            if not isinstance(r, (ScalingRule, RawScores)):
                raise ValueError(f"rule {lbl!r} is not a scaling rule or RAW_SCORES")

    def with_seed(self, seed: int) -> ExperimentConfig:
        return dataclasses.replace(self, seed=seed)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    k_total: float
    #: label -> length-m array of recorded first components
    samples: dict[str, np.ndarray]
    #: label -> (m, n) rescaled weights; absent for raw-score rules
    weights: dict[str, np.ndarray]
    #: label -> scaling constant used; absent for raw-score rules
    scale: dict[str, float]
    rng_algorithm: str = field(default=rng.ALGORITHM)

    @property
    def n(self) -> int:
        return self.config.n

    @property
    def d(self) -> int:
        return self.config.d

    def rescaled_labels(self) -> list[str]:
        return [lbl for lbl, r in self.config.rules if not isinstance(r, RawScores)]


def sample_vector(dist: DistributionSpec, d: int, stream: rng.RandomStream) -> np.ndarray:
    """Draw ``d`` independent components from ``dist``, consuming ``stream`` in order."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return dist.from_words(stream.words(dist.word_count(d)), d)


def draw_keys(cfg: ExperimentConfig) -> KeySet:
    stream = rng.keys_stream(cfg.seed)
    return KeySet(np.vstack([sample_vector(cfg.key_dist, cfg.d, stream) for _ in range(cfg.n)]))


def draw_queries(cfg: ExperimentConfig) -> np.ndarray:
    """All ``m`` queries as rows; equal to calling :func:`sample_vector` on each query stream."""
    count = cfg.query_dist.word_count(cfg.d)
    words = np.empty((cfg.m, count), dtype=np.uint64)
    for i in range(cfg.m):
        words[i] = rng.query_stream(cfg.seed, i).words(count)
    return cfg.query_dist.from_words(words, cfg.d)


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    ks = draw_keys(cfg)
    queries = draw_queries(cfg)
    scores = queries @ ks.keys.T
    samples: dict[str, np.ndarray] = {}
    weights: dict[str, np.ndarray] = {}
    scale: dict[str, float] = {}
    for label, rule in cfg.rules:
        if isinstance(rule, RawScores):
            samples[label] = scores[:, 0].copy()
            continue
        c = scaling_constant(rule, ks)
        w = prescaled_softmax(scores, c)
        scale[label] = c
        weights[label] = w
        samples[label] = w[:, 0].copy()
    return ExperimentResult(
        config=cfg,
        k_total=float(np.sum(ks.norms())),
        samples=samples,
        weights=weights,
        scale=scale,
    )
