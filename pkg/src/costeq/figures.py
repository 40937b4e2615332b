"""Matplotlib rendering of cost equivalent curves to image files (PNG, PDF, ...)."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .cec import CostEquivalentCurve
from .errors import ValidationError
from .isotonic import Flag
from .svg import COLORS, PlotStyle, format_benefit, top_ticks


def save_figure(curves: Sequence[CostEquivalentCurve], path: str | Path, style: PlotStyle = PlotStyle()) -> Path:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    curves = list(curves)
    if not curves:
        raise ValidationError("nothing to plot: no cost equivalent curves")
    path = Path(path)
    dpi = 100
    fig, ax = plt.subplots(figsize=(style.width / dpi, style.height / dpi), dpi=dpi)
    try:
        values = [v for c in curves for v in (*c.grid, *c.equivalent_costs)]
        lo, hi = min(values), max(values)
        if style.log_scale:
            ax.set_xscale("log")
            ax.set_yscale("log")
        if style.show_diagonal:
            ax.plot([lo, hi], [lo, hi], color="#888888", linewidth=1, zorder=1)

        labels = list(style.labels) + [c.label for c in curves[len(style.labels):]]
        for i, (curve, label) in enumerate(zip(curves, labels)):
            color = COLORS[i % len(COLORS)]
            xs, ys, flags = curve.grid, curve.equivalent_costs, curve.flags
            if len(xs) == 1:
                ax.plot(xs, ys, "o", color=color, label=label or f"treatment {i + 1}")
                continue
            first = True
            for k in range(len(xs) - 1):
                extrapolated = flags[k] is not Flag.IN_RANGE or flags[k + 1] is not Flag.IN_RANGE
                ax.plot(
                    xs[k : k + 2],
                    ys[k : k + 2],
                    color=color,
                    linewidth=2,
                    linestyle="--" if extrapolated and style.dashed_extrapolation else "-",
                    label=(label or f"treatment {i + 1}") if first else None,
                )
                first = False

        ax.set_xlim(lo, hi)
        ax.set_ylim(lo, hi)
        ax.set_xlabel(style.x_label)
        ax.set_ylabel(style.y_label)
        if style.show_top_axis:
            top = ax.twiny()
            top.set_xscale(ax.get_xscale())
            top.set_xlim(ax.get_xlim())
            ticks = top_ticks(curves[0])
            top.set_xticks([x for x, _ in ticks])
            top.set_xticklabels([format_benefit(b) for _, b in ticks])
            top.set_xlabel(style.top_label)
        if style.title:
            fig.suptitle(style.title)
        ax.legend(loc="upper left", frameon=False)
        fig.tight_layout()
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path)
    finally:
        plt.close(fig)
    return path
