"""Figure rendering for the report command.

Both renderers write PNG files and stay off any interactive backend so
they run headless.  Ordinal-labelled axes use the text form of each
ordinal; positions are just list indices.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .coloring import LimitStepTrace
from .ordinals import Ordinal, format_ordinal
from .pr1 import PairColoring

__all__ = ["render_ladder_windows", "render_pi_heatmap"]


def render_pi_heatmap(pi: PairColoring, path: str | Path) -> None:
    """Upper-triangular grid of pair colors along the branch."""
    levels = pi.levels
    n = len(levels)
    grid = [[float("nan")] * n for _ in range(n)]
    for (a, b), v in pi.values.items():
        i = levels.index(a)
        j = levels.index(b)
        grid[i][j] = v
    fig, ax = plt.subplots(figsize=(max(4, n * 0.4), max(3.2, n * 0.4)))
    im = ax.imshow(grid, cmap="coolwarm", vmin=0, vmax=1, interpolation="nearest")
    labels = [format_ordinal(g) for g in levels]
    step = max(1, n // 24)
    ticks = list(range(0, n, step))
    ax.set_xticks(ticks)
    ax.set_xticklabels([labels[i] for i in ticks], rotation=90, fontsize=7)
    ax.set_yticks(ticks)
    ax.set_yticklabels([labels[i] for i in ticks], fontsize=7)
    ax.set_xlabel("upper level")
    ax.set_ylabel("lower level")
    ax.set_title("branch pair coloring")
    fig.colorbar(im, ax=ax, ticks=[0, 1], shrink=0.7)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def render_ladder_windows(
    traces: dict[Ordinal, LimitStepTrace], path: str | Path
) -> None:
    """Per limit level: rung windows with fence sizes and recolor sizes."""
    items = sorted(traces.items())
    fig, axes = plt.subplots(
        len(items), 1, figsize=(7, 2.2 * len(items)), squeeze=False
    )
    for ax, (level, trace) in zip(axes[:, 0], items):
        steps = trace.steps
        ks = list(range(steps + 1))
        fences = [len(f) for f in trace.ladder.fences]
        ax.bar(ks, fences, width=0.35, label="fence size", color="#4878a8")
        xs = [len(r.x_set) for r in trace.rungs]
        ax.bar(
            [k + 0.35 for k in ks[: len(xs)]],
            xs,
            width=0.35,
            label="recolored set",
            color="#c46a4a",
        )
        ax.set_xticks(ks)
        ax.set_xticklabels(
            [format_ordinal(a) for a in trace.ladder.alphas], rotation=45, fontsize=7
        )
        ax.set_ylabel("blocks / nodes")
        ax.set_title(f"ladder at {format_ordinal(level)}", fontsize=9)
        ax.legend(fontsize=7)
    axes[-1, 0].set_xlabel("rung start")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
