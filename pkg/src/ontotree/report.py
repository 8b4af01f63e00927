"""Figure rendering for evaluation outputs.

Report-style commands write a figure next to each delimited output so runs
can be eyeballed without a notebook. Rendering is headless (Agg).
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def save_perplexity_plot(trace: list[float], path: str | Path,
                         title: str = "Perplexity by sweep") -> None:
    """Line plot of perplexity against sweep index."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(range(1, len(trace) + 1), trace, lw=1.5)
    ax.set_xlabel("sweep")
    ax.set_ylabel("perplexity")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_prf_plot(report, path: str | Path, title: str = "Gold-standard comparison") -> None:
    """Bar chart of precision, recall, and F-measure."""
    fig, ax = plt.subplots(figsize=(4.8, 4.0))
    names = ["precision", "recall", "f-measure"]
    values = [report.precision, report.recall, report.f_measure]
    ax.bar(names, values, color=["#4878d0", "#ee854a", "#6acc64"])
    for x, v in enumerate(values):
        ax.text(x, v + 0.02, f"{v:.3f}", ha="center", fontsize=9)
    ax.set_ylim(0, 1.1)
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
