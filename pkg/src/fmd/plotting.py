"""PNG rendering of predictive and density curves.

Uses the non-interactive Agg backend and strips PNG metadata, so identical
inputs give byte-identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .scenarios import Curve  # noqa: E402

__all__ = ["plot_curves"]

_YLABEL = {
    "predictive": r"$P(E_{N+1} \mid S_N = a)$",
    "density": "density",
}
_XLABEL = {
    "predictive": r"$a / N$",
    "density": r"$a / (N+1)$",
}


def plot_curves(
    curves: Sequence[Curve],
    path: str | Path,
    title: str = "",
    log_density: bool = False,
) -> Path:
    """Draw predictive curves (top) and/or density curves (bottom) to ``path``.

    Args:
        curves: Series to draw; grouped into one panel per ``kind``.
        path: Output PNG path.
        title: Figure title.
        log_density: Use a logarithmic ordinate for density panels.
    """
    kinds = [k for k in ("predictive", "density") if any(c.kind == k for c in curves)]
    if not kinds:
        raise ValueError("nothing to plot")
    fig, axes = plt.subplots(len(kinds), 1, figsize=(7.0, 3.2 * len(kinds)), squeeze=False)
    for ax, kind in zip(axes[:, 0], kinds):
        for curve in (c for c in curves if c.kind == kind):
            ax.plot(curve.x, curve.y, label=curve.label, linewidth=1.0)
        ax.set_xlim(0.0, 1.0)
        ax.set_xlabel(_XLABEL[kind])
        ax.set_ylabel(_YLABEL[kind])
        if kind == "density" and log_density:
            ax.set_yscale("log")
        ax.grid(True, linewidth=0.3, alpha=0.5)
        ax.legend(fontsize="x-small", loc="best")
    if title:
        fig.suptitle(title, fontsize="medium")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=110, format="png", metadata={"Software": None})
    plt.close(fig)
    return path
