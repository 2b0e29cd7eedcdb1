"""Kernel density panels rendered to deterministic SVG."""

from __future__ import annotations

import io
from typing import Mapping, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .stats import kde  # noqa: E402

_RC = {
    "svg.hashsalt": "attnscale",
    "svg.fonttype": "none",
    "font.size": 9,
}


def density_svg(samples: Mapping[str, Sequence[float]], grid_size: int = 512) -> str:
    """One KDE panel per entry of ``samples``, side by side, as SVG text.

    Identical input gives byte-identical output; the SVG carries no date.
    Raises :class:`~attnscale.stats.DegenerateSampleError` for a constant series.
    """
    curves = [(label, kde(values, grid_size)) for label, values in samples.items()]
    if not curves:
        raise ValueError("nothing to plot")
    with matplotlib.rc_context(_RC):
        fig, axes = plt.subplots(1, len(curves), figsize=(3.2 * len(curves), 2.8), squeeze=False)
        for i, (ax, (label, curve)) in enumerate(zip(axes[0], curves)):
            ax.plot(curve.grid, curve.density, color="black", linewidth=1.0)
            ax.set_title(f"({chr(ord('a') + i % 26)}) {label}")
            ax.set_xlabel("value")
            ax.set_ylabel("density")
            ax.set_ylim(bottom=0)
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
        plt.close(fig)
    return buf.getvalue()
