"""Density estimates and distribution-shape summaries for sample vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEFAULT_GRID_SIZE = 512


class DegenerateSampleError(ValueError):
    """Samples have no spread (or too few points) for the requested statistic."""


@dataclass(frozen=True, eq=False)
class KdeCurve:
    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def mass(self) -> float:
        return float(np.trapezoid(self.density, self.grid))


@dataclass(frozen=True)
class ShapeSummary:
    count: int
    mean: float
    sd: float
    skewness: float
    excess_kurtosis: float
    min: float
    max: float


def _as_samples(samples, minimum: int = 2) -> np.ndarray:
    x = np.asarray(samples, dtype=np.float64).ravel()
    if x.size < minimum:
        raise DegenerateSampleError(f"need at least {minimum} samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DegenerateSampleError("samples contain non-finite values")
    return x


def silverman_bandwidth(samples) -> float:
    """``0.9 * min(sd, IQR / 1.34) * m**(-1/5)``.

    Falls back to the sd when the IQR is zero but the sample still has spread.
    """
    x = _as_samples(samples)
    sd = float(np.std(x, ddof=1))
    if sd == 0.0:
        raise DegenerateSampleError("all samples are equal")
    q75, q25 = np.percentile(x, [75, 25])
    spread = min(sd, (q75 - q25) / 1.34)
    if spread <= 0.0:
        spread = sd
    return 0.9 * spread * x.size ** (-0.2)


def kde(samples, grid_size: int = DEFAULT_GRID_SIZE) -> KdeCurve:
    """Gaussian kernel density estimate on ``[min - 3h, max + 3h]``."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    x = _as_samples(samples)
    h = silverman_bandwidth(x)
    grid = np.linspace(x.min() - 3 * h, x.max() + 3 * h, grid_size)
    density = np.zeros(grid_size)
    # chunk over samples to bound the (grid, chunk) temporary
    for start in range(0, x.size, 4096):
        u = (grid[:, None] - x[None, start:start + 4096]) / h
        density += np.exp(-0.5 * u * u).sum(axis=1)
    density /= x.size * h * math.sqrt(2 * math.pi)
    return KdeCurve(grid=grid, density=density, bandwidth=h)


def shape_summary(samples) -> ShapeSummary:
    """Mean, sd (ddof=1), moment skewness and excess kurtosis, range.

    Skewness and kurtosis use the biased central moments ``m3 / m2**1.5`` and
    ``m4 / m2**2 - 3``; both are reported as 0 when the sample has no spread.
    """
    x = _as_samples(samples)
    mean = float(np.mean(x))
    dev = x - mean
    spread = float(np.abs(dev).max())
    m2 = 0.0
    if spread > 0.0:
        # the moment ratios are scale-free; normalizing keeps m2**1.5 from underflowing
        dev = dev / spread
        m2 = float(np.mean(dev**2))
    if m2 == 0.0:
        skew = kurt = 0.0
    else:
        skew = float(np.mean(dev**3)) / m2**1.5
        kurt = float(np.mean(dev**4)) / m2**2 - 3.0
    return ShapeSummary(
        count=x.size,
        # summation rounding can push the mean of near-constant data an ulp outside the range
        mean=min(max(mean, float(x.min())), float(x.max())),
        sd=float(np.std(x, ddof=1)),
        skewness=skew,
        excess_kurtosis=kurt,
        min=float(x.min()),
        max=float(x.max()),
    )


def standardize(samples) -> np.ndarray:
    x = _as_samples(samples)
    sd = float(np.std(x, ddof=1))
    if sd == 0.0:
        raise DegenerateSampleError("cannot standardize samples with zero spread")
    return (x - x.mean()) / sd


def ks_statistic(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic: sup |F_a(t) - F_b(t)|."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise DegenerateSampleError("both samples must be nonempty")
    points = np.concatenate([a, b])
    count_a = np.searchsorted(a, points, side="right")
    count_b = np.searchsorted(b, points, side="right")
    # exact integer gap, divided once
    gap = np.max(np.abs(count_a * b.size - count_b * a.size))
    return float(gap / (a.size * b.size))


def shape_distortion(pre, post) -> float:
    """KS distance between the two sample sets after standardizing each one.

    Scale and location are removed first, so only the shape is compared.
    """
    return ks_statistic(standardize(pre), standardize(post))
