"""Static figures written next to the CSV reports."""

from __future__ import annotations

from collections import defaultdict
from collections.abc import Sequence
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .experiments import CensusReport, EstimateRow  # noqa: E402

_RATE_LABEL = {
    "cert": "certificate feasible",
    "count": "Alice > phi * Bob",
}


def _rate_label(model: str) -> str:
    return _RATE_LABEL.get(model.split("-")[0], "draw rate")


def plot_sweep(rows: Sequence[EstimateRow], path: str | Path, title: str | None = None) -> Path:
    """Rate against n with Wilson error bars, one line per bias ratio."""
    series: dict[str, list[EstimateRow]] = defaultdict(list)
    for row in rows:
        series[row.r].append(row)
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for r, group in series.items():
        group.sort(key=lambda row: row.n)
        ns = [row.n for row in group]
        rates = [row.rate for row in group]
        err = [[row.rate - row.ci_lo for row in group], [row.ci_hi - row.rate for row in group]]
        ax.errorbar(ns, rates, yerr=err, marker="o", capsize=3, label=f"r = {r}")
    ns = [row.n for row in rows]
    if ns and max(ns) / max(min(ns), 1) > 100:
        ax.set_xscale("log")
    ax.set_xlabel("cards dealt n")
    ax.set_ylabel(_rate_label(rows[0].model) if rows else "rate")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(alpha=0.3)
    ax.legend(frameon=False)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_census(reports: Sequence[CensusReport], path: str | Path) -> Path:
    """Stacked outcome shares of the exhaustive census for each n."""
    ns = [rep.n for rep in reports]
    shares = {
        "Alice wins": [rep.alice_win / rep.total for rep in reports],
        "Bob wins": [rep.bob_win / rep.total for rep in reports],
        "draw": [rep.draw / rep.total for rep in reports],
    }
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    bottom = [0.0] * len(ns)
    for label, values in shares.items():
        ax.bar(ns, values, bottom=bottom, label=label)
        bottom = [b + v for b, v in zip(bottom, values)]
    ax.set_xlabel("cards dealt n")
    ax.set_ylabel("share of deals")
    ax.legend(frameon=False, loc="lower left")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
