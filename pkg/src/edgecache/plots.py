"""Matplotlib rendering of outage curves next to the delimited reports."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_MARKERS = ("o", "s", "^", "d", "v", "<", ">", "p", "h")


def render_outage_curves(
    curves: Sequence[tuple[str, Sequence[float], Sequence[float], dict]],
    path: str | Path,
    *,
    title: str = "System outage probability",
    ylabel: str = "Average outage probability",
    dpi: int = 150,
) -> Path:
    """Save a semilog outage-vs-SNR figure.

    curves is a sequence of (label, snr_db, values, style_overrides); style
    overrides are passed straight to plot().
    """
    path = Path(path)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for i, (label, snr_db, values, style) in enumerate(curves):
        kwargs = {"marker": _MARKERS[i % len(_MARKERS)], "markersize": 4, "linewidth": 1.2}
        kwargs.update(style)
        ax.semilogy(snr_db, values, label=label, **kwargs)
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, which="both", linestyle="--", alpha=0.3)
    ax.legend(fontsize=8, ncol=2)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
    return path


def scheme_style(scheme: str, series_index: int) -> dict:
    """House style: proposed curves solid, baseline curves dashed, color by series."""
    color = f"C{series_index % 10}"
    if scheme == "baseline":
        return {"linestyle": "--", "color": color, "markerfacecolor": "none"}
    return {"linestyle": "-", "color": color}
