"""CSV and file helpers for experiment outputs.

Floats are written with ``repr``, the shortest text that parses back to the
same double, so reruns produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path

from .simulation import ExperimentResult, RawScores
from .stats import DegenerateSampleError, shape_summary

SAMPLE_COLUMNS = ("query_index", "rule_label", "value")
SUMMARY_COLUMNS = ("rule_label", "rule", "scale", "k_total", "count", "mean", "sd",
                   "skewness", "excess_kurtosis", "min", "max")


class MissingColumnsError(ValueError):
    pass


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, int):
        return str(x)
    return repr(float(x))


def atomic_write_text(path, text: str) -> None:
    """Write to a temp file beside ``path`` then rename it into place."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def samples_csv(result: ExperimentResult) -> str:
    rows = []
    for label, _ in result.config.rules:
        for i, value in enumerate(result.samples[label]):
            rows.append((i, label, fmt(value)))
    return _csv_text(SAMPLE_COLUMNS, rows)


def summary_csv(result: ExperimentResult) -> str:
    rows = []
    for label, rule in result.config.rules:
        values = result.samples[label]
        scale = None if isinstance(rule, RawScores) else result.scale[label]
        try:
            s = shape_summary(values)
            stats = (s.count, s.mean, s.sd, s.skewness, s.excess_kurtosis, s.min, s.max)
        except DegenerateSampleError:
            # a single query: only the location fields are defined
            v = float(values[0])
            stats = (len(values), v, None, None, None, v, v)
        rows.append((label, rule.name, fmt(scale), fmt(result.k_total), *map(fmt, stats)))
    return _csv_text(SUMMARY_COLUMNS, rows)


def read_samples_csv(path) -> dict[str, list[float]]:
    """Series keyed by rule label, in order of first appearance and query index."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in SAMPLE_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise MissingColumnsError(f"{path}: missing column(s) {', '.join(missing)}")
        series: dict[str, list[tuple[int, float]]] = {}
        for lineno, row in enumerate(reader, start=2):
            try:
                item = (int(row["query_index"]), float(row["value"]))
            except (TypeError, ValueError):
                raise MissingColumnsError(f"{path}:{lineno}: malformed row {row}") from None
            series.setdefault(row["rule_label"], []).append(item)
    return {label: [v for _, v in sorted(items)] for label, items in series.items()}
