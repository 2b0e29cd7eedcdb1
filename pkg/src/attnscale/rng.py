"""Seeded, splittable random streams.

Every stream is a Philox4x64-10 generator keyed by a numpy ``SeedSequence``
built from the experiment seed and a spawn key naming the substream. Draws are
made from the raw 64-bit output words so the mapping to floats is fixed here
rather than left to numpy's distribution code:

* uniform on [0, 1): ``(word >> 11) * 2**-53``, one word per value;
* standard normal: Box-Muller on consecutive word pairs ``(a, b)`` with
  ``u1 = ((a >> 11) + 1) * 2**-53`` in (0, 1], ``u2 = (b >> 11) * 2**-53``,
  giving ``r cos(2 pi u2)`` then ``r sin(2 pi u2)`` where
  ``r = sqrt(-2 ln u1)``. An odd trailing sine value is discarded.
"""

from __future__ import annotations

import numpy as np

ALGORITHM = "philox4x64-10/seedsequence/box-muller-53bit"

KEYS_TAG = 0
QUERY_TAG = 1

_TWO_NEG_53 = 2.0**-53


class RandomStream:
    """A single reproducible stream of 64-bit words and the floats built from them."""

    def __init__(self, seed: int, *spawn_key: int):
        if seed < 0 or seed >= 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.spawn_key = tuple(spawn_key)
        ss = np.random.SeedSequence(seed, spawn_key=self.spawn_key)
        self._bits = np.random.Philox(ss)

    def words(self, count: int) -> np.ndarray:
        return np.asarray(self._bits.random_raw(count), dtype=np.uint64).reshape(count)

    def uniform(self, count: int) -> np.ndarray:
        return words_to_uniform(self.words(count))

    def normal(self, count: int) -> np.ndarray:
        return words_to_normal(self.words(normal_word_count(count)), count)


def keys_stream(seed: int) -> RandomStream:
    return RandomStream(seed, KEYS_TAG)


def query_stream(seed: int, index: int) -> RandomStream:
    return RandomStream(seed, QUERY_TAG, index)


def normal_word_count(count: int) -> int:
    return 2 * ((count + 1) // 2)


def words_to_uniform(words: np.ndarray) -> np.ndarray:
    return (words >> np.uint64(11)).astype(np.float64) * _TWO_NEG_53


def words_to_normal(words: np.ndarray, count: int) -> np.ndarray:
    """Box-Muller over the last axis of ``words`` (even length), truncated to ``count``."""
    a = words[..., 0::2]
    b = words[..., 1::2]
    u1 = ((a >> np.uint64(11)) + np.uint64(1)).astype(np.float64) * _TWO_NEG_53
    u2 = (b >> np.uint64(11)).astype(np.float64) * _TWO_NEG_53
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    z = np.empty(words.shape, dtype=np.float64)
    z[..., 0::2] = r * np.cos(theta)
    z[..., 1::2] = r * np.sin(theta)
    return z[..., :count]
