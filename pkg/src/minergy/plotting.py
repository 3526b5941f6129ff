"""Figures written next to the CSV output of ``sweep`` and ``sinr-schedule``."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

FIGSIZE = (7.0, 4.0)


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_sweep(rows: Sequence[dict], param: str, path, thresholds: Sequence[tuple[str, float]] = ()):
    """Energy against the swept parameter, one colour per chosen graph.

    Uncertified points are drawn hollow; ``thresholds`` become dashed
    vertical lines labelled with their name.
    """
    fig, ax = plt.subplots(figsize=FIGSIZE)
    labels = list(dict.fromkeys(r["graph"] for r in rows))
    cmap = plt.get_cmap("tab10")
    for idx, label in enumerate(labels):
        color = cmap(idx % 10)
        for certified in (True, False):
            pts = [r for r in rows if r["graph"] == label and r["certified"] == certified]
            if not pts:
                continue
            ax.plot([r["value"] for r in pts], [r["energy"] for r in pts], "o",
                    color=color, markerfacecolor=color if certified else "none",
                    label=label if certified or not any(
                        r["graph"] == label and r["certified"] for r in rows) else None)
    lo = min(r["value"] for r in rows)
    hi = max(r["value"] for r in rows)
    for name, value in thresholds:
        if lo <= value <= hi:
            ax.axvline(value, color="0.5", linestyle="--", linewidth=0.8)
            ax.annotate(name, (value, 1.0), xycoords=("data", "axes fraction"),
                        rotation=90, va="top", ha="right", fontsize=8, color="0.3")
    ax.set_xlabel(param)
    ax.set_ylabel("total energy")
    ax.legend(title="graph", fontsize=8, frameon=False)
    return _save(fig, path)


def plot_schedule(schedule, path):
    """Gantt chart of a sequential schedule, one row per sender."""
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for s in schedule.slots:
        ax.broken_barh([(s.start, s.duration)], (s.sender - 0.4, 0.8),
                       facecolors="tab:blue", edgecolors="k", linewidth=0.5)
        ax.annotate(f"{s.sender}→{s.receiver}", (s.start + s.duration / 2, s.sender),
                    ha="center", va="center", fontsize=7, color="w")
    senders = sorted({s.sender for s in schedule.slots})
    ax.set_yticks(senders)
    ax.set_ylabel("sender")
    ax.set_xlabel("time")
    return _save(fig, path)
