"""Minimal SVG line charts; output is deterministic text with no plotting dependency."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence


def _esc(text: str) -> str:
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    """Round tick values covering ``[lo, hi]``, about ``count`` of them."""
    if not hi > lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(count, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    first = math.floor(lo / step) * step
    ticks = []
    v = first
    while v <= hi + step * 1e-9:
        ticks.append(round(v, 10))
        v += step
    if ticks[-1] < hi:
        ticks.append(round(ticks[-1] + step, 10))
    return ticks


def _fmt_tick(v: float) -> str:
    if v == int(v):
        return f"{int(v):,}"
    return f"{v:,.2f}".rstrip("0").rstrip(".")


@dataclass(frozen=True)
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    color: str = "#1f77b4"
    dashed: bool = False


def line_chart(
    title: str,
    series: Sequence[Series],
    x_labels: dict[float, str] | None = None,
    y_label: str = "",
    marker_x: float | None = None,
    width: int = 900,
    height: int = 420,
) -> str:
    """Render ``series`` as polylines with axes, ticks and a legend.

    ``x_labels`` maps x positions to tick labels; ``marker_x`` draws a
    vertical guide (the last observed month, say).
    """
    left, right, top, bottom = 80, 20, 40, 60
    plot_w = width - left - right
    plot_h = height - top - bottom
    xs = [v for s in series for v in s.x]
    ys = [v for s in series for v in s.y]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">',
        f"<title>{_esc(title)}</title>",
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" font-size="16">{_esc(title)}</text>',
    ]
    if not xs:
        parts.append(
            f'<text x="{width / 2:.1f}" y="{height / 2:.1f}" text-anchor="middle" font-size="12" fill="#666">no data</text>'
        )
        parts.append("</svg>")
        return "\n".join(parts) + "\n"

    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    y_min, y_max = min(ys), max(ys)
    # anchor at zero unless the data sit far above it
    yticks = nice_ticks(0.0 if 0 <= y_min < 0.2 * y_max else y_min, y_max)
    y_lo, y_hi = yticks[0], yticks[-1]

    def px(x):
        return left + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return top + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts.append('<g stroke="#ddd" stroke-width="1">')
    for t in yticks:
        parts.append(f'<line x1="{left}" y1="{py(t):.2f}" x2="{left + plot_w}" y2="{py(t):.2f}"/>')
    parts.append("</g>")
    parts.append('<g font-size="11" fill="#333" text-anchor="end">')
    for t in yticks:
        parts.append(f'<text x="{left - 6}" y="{py(t) + 4:.2f}">{_fmt_tick(t)}</text>')
    parts.append("</g>")
    if x_labels:
        parts.append('<g font-size="11" fill="#333" text-anchor="middle">')
        for x, label in sorted(x_labels.items()):
            if x_lo <= x <= x_hi:
                parts.append(f'<line x1="{px(x):.2f}" y1="{top + plot_h}" x2="{px(x):.2f}" y2="{top + plot_h + 5}" stroke="#333"/>')
                parts.append(f'<text x="{px(x):.2f}" y="{top + plot_h + 18}">{_esc(label)}</text>')
        parts.append("</g>")
    parts.append(
        f'<path d="M{left},{top} V{top + plot_h} H{left + plot_w}" fill="none" stroke="#333" stroke-width="1"/>'
    )
    if y_label:
        parts.append(
            f'<text x="18" y="{top + plot_h / 2:.1f}" font-size="12" text-anchor="middle" '
            f'transform="rotate(-90 18 {top + plot_h / 2:.1f})">{_esc(y_label)}</text>'
        )
    if marker_x is not None and x_lo <= marker_x <= x_hi:
        parts.append(
            f'<line x1="{px(marker_x):.2f}" y1="{top}" x2="{px(marker_x):.2f}" y2="{top + plot_h}" '
            'stroke="#999" stroke-dasharray="2,3"/>'
        )
    for s in series:
        if not len(s.x):
            continue
        d = " ".join(f"{'M' if i == 0 else 'L'}{px(x):.2f},{py(y):.2f}" for i, (x, y) in enumerate(zip(s.x, s.y)))
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        parts.append(f'<path d="{d}" fill="none" stroke="{s.color}" stroke-width="1.6"{dash}/>')
    for i, s in enumerate(series):
        ly = top + 12 + 16 * i
        lx = left + 12
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        parts.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{s.color}" stroke-width="2"{dash}/>')
        parts.append(f'<text x="{lx + 30}" y="{ly + 4}" font-size="12">{_esc(s.label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def projection_chart(projection, state: str) -> str:
    """Actual vs predicted consumption for one state."""
    from fueltax.forecast import ACTUAL, PREDICTED

    act_m, act_v = projection.series(state, ACTUAL)
    pred_m, pred_v = projection.series(state, PREDICTED)
    months = sorted(set(act_m) | set(pred_m))
    if not months:
        return line_chart(f"{state}: actual vs predicted {projection.kind.replace('_', ' ')}", [])
    origin = months[0].index
    labels = {float(m.index - origin): str(m.year) for m in months if m.month == 1}
    series = [
        Series("actual", [float(m.index - origin) for m in act_m], list(act_v), "#1f77b4"),
        Series("predicted", [float(m.index - origin) for m in pred_m], list(pred_v), "#d62728", dashed=True),
    ]
    marker = None if projection.last_actual is None else float(projection.last_actual.index - origin)
    return line_chart(
        f"{state}: actual vs predicted {projection.kind.replace('_', ' ')}",
        series,
        labels,
        "million gallons",
        marker,
    )
