"""Seed-replicated comparison of rescaling rules against the raw scores."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .gradients import saturation_fraction
from .simulation import ExperimentConfig, RawScores, run_experiment
from .stats import shape_distortion

THREADS_ENV = "ATTNSCALE_THREADS"


class CompareError(ValueError):
    pass


@dataclass
class ComparisonReport:
    raw_label: str
    labels: list[str]
    seeds: list[int]
    #: (replications, rules) shape distortion against the raw scores
    distortion: np.ndarray
    #: (replications, rules) saturation fraction
    saturation: np.ndarray
    epsilon: float

    @property
    def replications(self) -> int:
        return len(self.seeds)

    def wins(self, a: str, b: str) -> float:
        """Replications in which ``a`` distorts less than ``b``; exact ties count half."""
        da = self.distortion[:, self.labels.index(a)]
        db = self.distortion[:, self.labels.index(b)]
        return float(np.sum(da < db) + 0.5 * np.sum(da == db))

    def win_rate(self, a: str, b: str) -> float:
        return self.wins(a, b) / self.replications

    def saturation_wins(self, a: str, b: str) -> int:
        """Replications in which ``a`` saturates strictly more often than ``b``."""
        sa = self.saturation[:, self.labels.index(a)]
        sb = self.saturation[:, self.labels.index(b)]
        return int(np.sum(sa > sb))

    def format_table(self) -> str:
        lines = [
            f"replications: {self.replications} (seeds {self.seeds[0]}..{self.seeds[-1]}), "
            f"epsilon: {self.epsilon:g}",
            "",
            f"{'rule':<24}{'distortion mean':>16}{'distortion sd':>15}{'saturation mean':>17}",
        ]
        for j, label in enumerate(self.labels):
            d = self.distortion[:, j]
            s = self.saturation[:, j]
            sd = d.std(ddof=1) if d.size > 1 else 0.0
            lines.append(f"{label:<24}{d.mean():>16.6f}{sd:>15.6f}{s.mean():>17.6f}")
        lines += ["", "win rate (row distorts less than column):"]
        header = " " * 24 + "".join(f"{lbl[:14]:>15}" for lbl in self.labels)
        lines.append(header)
        for a in self.labels:
            cells = "".join(
                f"{'-':>15}" if a == b else f"{self.win_rate(a, b):>15.2%}" for b in self.labels
            )
            lines.append(f"{a:<24}{cells}")
        return "\n".join(lines)


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


def _replicate(cfg: ExperimentConfig, raw_label: str, labels: list[str]):
    result = run_experiment(cfg)
    raw = result.samples[raw_label]
    dist = [shape_distortion(raw, result.samples[lbl]) for lbl in labels]
    sat = [saturation_fraction(result.weights[lbl], cfg.epsilon) for lbl in labels]
    return dist, sat


def compare(cfg: ExperimentConfig, replications: int | None = None,
            threads: int | None = None) -> ComparisonReport:
    """Run ``replications`` experiments with seeds ``cfg.seed + i``.

    The config must contain one raw-score rule and at least two rescaling rules.
    """
    raw = [lbl for lbl, r in cfg.rules if isinstance(r, RawScores)]
    if not raw:
        raise CompareError("config has no raw_scores rule to compare against")
    labels = [lbl for lbl, r in cfg.rules if not isinstance(r, RawScores)]
    if len(labels) < 2:
        raise CompareError("need at least two rescaling rules to compare")
    reps = cfg.replications if replications is None else replications
    if reps < 1:
        raise CompareError("replications must be >= 1")
    seeds = [cfg.seed + i for i in range(reps)]
    if seeds[-1] >= 2**64:
        raise CompareError("seed + replications overflows 64 bits")
    configs = [cfg.with_seed(s) for s in seeds]

    workers = threads or thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda c: _replicate(c, raw[0], labels), configs))
    else:
        rows = [_replicate(c, raw[0], labels) for c in configs]
    return ComparisonReport(
        raw_label=raw[0],
        labels=labels,
        seeds=seeds,
        distortion=np.array([r[0] for r in rows]),
        saturation=np.array([r[1] for r in rows]),
        epsilon=cfg.epsilon,
    )
