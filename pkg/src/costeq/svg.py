"""Dependency-free SVG rendering of cost equivalent curves.

Both axes share one data range so the ``y = x`` reference is a straight line
through the plot corners and a curve equal to the identity lies on it.
Flagged (extrapolated) stretches of a curve are drawn dashed through a
computed ``stroke-dasharray`` so each treatment stays a single polyline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence
from xml.sax.saxutils import escape, quoteattr

from .cec import CostEquivalentCurve
from .errors import ValidationError
from .isotonic import Flag

SVG_NS = "http://www.w3.org/2000/svg"

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f")

DASH_ON = 6.0
DASH_OFF = 4.0


@dataclass(frozen=True)
class PlotStyle:
    width: int = 640
    height: int = 480
    show_diagonal: bool = True
    show_top_axis: bool = True
    dashed_extrapolation: bool = True
    log_scale: bool = False
    labels: tuple[str, ...] = ()
    title: str = ""
    x_label: str = "control cost (examples)"
    y_label: str = "equivalent treatment cost (examples)"
    top_label: str = "control benefit"

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValidationError("plot dimensions must be positive")


@dataclass(frozen=True)
class Frame:
    """Maps data values to pixels; identical transform on both axes."""

    left: float
    top: float
    right: float
    bottom: float
    lo: float
    hi: float
    log: bool

    def _unit(self, v: float) -> float:
        if self.log:
            return (math.log10(v) - math.log10(self.lo)) / (math.log10(self.hi) - math.log10(self.lo))
        return (v - self.lo) / (self.hi - self.lo)

    def px(self, v: float) -> float:
        return self.left + self._unit(v) * (self.right - self.left)

    def py(self, v: float) -> float:
        return self.bottom - self._unit(v) * (self.bottom - self.top)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _fmt_count(v: float) -> str:
    if abs(v) >= 1000:
        return f"{v / 1000:g}k"
    return f"{v:g}"


def format_benefit(b: float) -> str:
    if 0.0 <= b <= 1.0:
        return f"{100 * b:.3g}%"
    return f"{b:.3g}"


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    k = 0
    while first + k * step <= hi + 1e-9 * step:
        ticks.append(round(first + k * step, 12))
        k += 1
    return ticks


def log_ticks(lo: float, hi: float) -> list[float]:
    return [10.0**e for e in range(math.ceil(math.log10(lo) - 1e-12), math.floor(math.log10(hi) + 1e-12) + 1)]


def dash_array(lengths: Sequence[float], dashed: Sequence[bool], on: float = DASH_ON, off: float = DASH_OFF) -> list[float]:
    """Dash/gap lengths that keep plain segments solid and dash flagged ones.

    The result alternates dash, gap, dash, ... and has even length so the
    pattern never inverts when a renderer repeats it.
    """
    out: list[float] = []

    def push(solid: bool, length: float) -> None:
        if length <= 0:
            return
        parity = 0 if solid else 1
        if out and (len(out) - 1) % 2 == parity:
            out[-1] += length
            return
        if not out and not solid:
            out.append(0.0)
        out.append(length)

    for length, flagged in zip(lengths, dashed):
        if not flagged:
            push(True, length)
            continue
        pos, solid = 0.0, True
        while pos < length - 1e-12:
            piece = min(on if solid else off, length - pos)
            push(solid, piece)
            pos += piece
            solid = not solid
    if len(out) % 2:
        out.append(0.0)
    return out


def _frame(curves: Sequence[CostEquivalentCurve], style: PlotStyle) -> Frame:
    values = [v for c in curves for v in (*c.grid, *c.equivalent_costs)]
    if style.log_scale:
        if any(v <= 0 for v in values):
            raise ValidationError("log scale needs strictly positive costs")
    lo, hi = min(values), max(values)
    if hi == lo:
        if style.log_scale:
            lo, hi = lo / 2, hi * 2
        else:
            pad = abs(lo) * 0.5 or 1.0
            lo, hi = lo - pad, hi + pad
    top = 64.0 if style.show_top_axis else 36.0
    if style.title:
        top += 20
    return Frame(left=72.0, top=top, right=style.width - 24.0, bottom=style.height - 56.0, lo=lo, hi=hi, log=style.log_scale)


def _axis_ticks(frame: Frame) -> list[float]:
    if frame.log:
        return log_ticks(frame.lo, frame.hi)
    return nice_ticks(frame.lo, frame.hi)


def _line(x1: float, y1: float, x2: float, y2: float, **attrs: str) -> str:
    extra = "".join(f" {k.replace('_', '-')}={quoteattr(v)}" for k, v in attrs.items())
    return f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}"{extra}/>'


def _text(x: float, y: float, body: str, **attrs: str) -> str:
    extra = "".join(f" {k.replace('_', '-')}={quoteattr(v)}" for k, v in attrs.items())
    return f'<text x="{_fmt(x)}" y="{_fmt(y)}"{extra}>{escape(body)}</text>'


def top_ticks(curve: CostEquivalentCurve, max_ticks: int = 8) -> list[tuple[float, float]]:
    pairs = list(zip(curve.grid, curve.benefits))
    if len(pairs) <= max_ticks:
        return pairs
    step = (len(pairs) - 1) / (max_ticks - 1)
    return [pairs[round(i * step)] for i in range(max_ticks)]


def render_svg(curves: Sequence[CostEquivalentCurve], style: PlotStyle = PlotStyle()) -> str:
    """Render one or more curves as a standalone SVG document."""
    curves = list(curves)
    if not curves:
        raise ValidationError("nothing to plot: no cost equivalent curves")
    frame = _frame(curves, style)
    w, h = style.width, style.height
    parts = [
        f'<svg xmlns="{SVG_NS}" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>',
    ]
    if style.title:
        parts.append(_text(w / 2, 22, style.title, text_anchor="middle", font_size="15", **{"class": "title"}))

    # axes box
    parts.append(
        f'<rect class="plot-area" x="{_fmt(frame.left)}" y="{_fmt(frame.top)}" '
        f'width="{_fmt(frame.right - frame.left)}" height="{_fmt(frame.bottom - frame.top)}" '
        f'fill="none" stroke="#000000" stroke-width="1"/>'
    )
    ticks = _axis_ticks(frame)
    parts.append('<g class="x-axis">')
    for t in ticks:
        x = frame.px(t)
        parts.append(_line(x, frame.bottom, x, frame.bottom + 5, stroke="#000000"))
        parts.append(_text(x, frame.bottom + 18, _fmt_count(t), text_anchor="middle"))
    parts.append(_text((frame.left + frame.right) / 2, h - 14, style.x_label, text_anchor="middle"))
    parts.append("</g>")
    parts.append('<g class="y-axis">')
    for t in ticks:
        y = frame.py(t)
        parts.append(_line(frame.left - 5, y, frame.left, y, stroke="#000000"))
        parts.append(_text(frame.left - 8, y + 4, _fmt_count(t), text_anchor="end"))
    mid = (frame.top + frame.bottom) / 2
    parts.append(_text(16, mid, style.y_label, text_anchor="middle", transform=f"rotate(-90 16 {_fmt(mid)})"))
    parts.append("</g>")

    if style.show_top_axis:
        parts.append('<g class="top-axis">')
        for x_val, b in top_ticks(curves[0]):
            x = frame.px(x_val)
            parts.append(_line(x, frame.top - 5, x, frame.top, stroke="#000000"))
            parts.append(_text(x, frame.top - 9, format_benefit(b), text_anchor="middle", **{"class": "benefit"}))
        parts.append(_text((frame.left + frame.right) / 2, frame.top - 28, style.top_label, text_anchor="middle"))
        parts.append("</g>")

    if style.show_diagonal:
        parts.append(
            _line(
                frame.px(frame.lo), frame.py(frame.lo), frame.px(frame.hi), frame.py(frame.hi),
                stroke="#888888", stroke_width="1", **{"class": "diagonal"},
            )
        )

    labels = list(style.labels) + [c.label for c in curves[len(style.labels):]]
    for i, (curve, label) in enumerate(zip(curves, labels)):
        label = label or f"treatment {i + 1}"
        color = COLORS[i % len(COLORS)]
        pts = [(frame.px(x), frame.py(g)) for x, g in zip(curve.grid, curve.equivalent_costs)]
        attrs = {
            "class": "cec-curve",
            "data-label": label,
            "fill": "none",
            "stroke": color,
            "stroke-width": "2",
        }
        flagged = [f is not Flag.IN_RANGE for f in curve.flags]
        if any(flagged):
            attrs["data-flagged"] = ",".join(str(k) for k, f in enumerate(flagged) if f)
            if style.dashed_extrapolation and len(pts) > 1:
                lengths = [math.dist(a, b) for a, b in zip(pts, pts[1:])]
                seg_flags = [a or b for a, b in zip(flagged, flagged[1:])]
                attrs["stroke-dasharray"] = " ".join(_fmt(v) for v in dash_array(lengths, seg_flags))
        points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        attr_text = "".join(f" {k}={quoteattr(v)}" for k, v in attrs.items())
        parts.append(f'<polyline points="{points}"{attr_text}><title>{escape(label)}</title></polyline>')
        ly = frame.top + 16 + 16 * i
        parts.append(_line(frame.left + 10, ly - 4, frame.left + 30, ly - 4, stroke=color, stroke_width="2"))
        parts.append(_text(frame.left + 36, ly, label, **{"class": "legend"}))

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def pixel_transform(curves: Sequence[CostEquivalentCurve], style: PlotStyle = PlotStyle()) -> Callable[[float, float], tuple[float, float]]:
    """The data-to-pixel map :func:`render_svg` uses for these curves."""
    frame = _frame(list(curves), style)
    return lambda x, y: (frame.px(x), frame.py(y))
