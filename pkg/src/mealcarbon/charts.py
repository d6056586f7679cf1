"""Static chart rendering for the CLI report path."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_bar_chart(vis: dict, path: str | Path, title: str = "Carbon footprint by ingredient") -> None:
    """Horizontal bar chart of ingredient midpoints."""
    labels = vis["ingredients"]
    impacts = vis["impacts"]
    fig, ax = plt.subplots(figsize=(8, max(2.5, 0.5 * len(labels) + 1)))
    pos = range(len(labels))
    ax.barh(pos, impacts, color="#4c8c2b")
    ax.set_yticks(list(pos))
    ax.set_yticklabels(labels)
    ax.invert_yaxis()
    ax.set_xlabel("kg CO2-eq")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)


def render_pie_chart(vis: dict, path: str | Path, title: str = "Share of total impact") -> None:
    labels = vis["ingredients"]
    impacts = vis["impacts"]
    fig, ax = plt.subplots(figsize=(6, 6))
    if sum(impacts) > 0:
        ax.pie(impacts, labels=labels, autopct="%1.0f%%", startangle=90)
    else:
        ax.text(0.5, 0.5, "No impact data", ha="center", va="center")
        ax.set_axis_off()
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=100)
    plt.close(fig)
