"""Figure rendering for cutting-plane runs (lower bound vs iteration)."""

from __future__ import annotations

from collections.abc import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .cutplane import IterationLog


def render_bound_progress(
    runs: Sequence[tuple[str, IterationLog]],
    out_path: str,
    title: str | None = None,
) -> str:
    """Step plot of the lower bound across LP solves, one line per run.

    The file format follows the extension (png, pdf, svg). Returns the path.
    """
    if not runs:
        raise ValueError("nothing to plot")
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for label, log in runs:
        xs = [rec.iteration for rec in log.records]
        ys = [rec.lower_bound for rec in log.records]
        ax.step(xs, ys, where="post", label=label, linewidth=1.5)
    ax.set_xlabel("LP solves")
    ax.set_ylabel("lower bound")
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.35)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
