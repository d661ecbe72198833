"""Standalone SVG line charts of emotion arcs (no plotting dependency)."""

from __future__ import annotations

import json
from typing import Optional, Sequence
from xml.sax.saxutils import escape, quoteattr

from .arcs import Arc
from .errors import ConfigError

WIDTH, HEIGHT = 800, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 150, 40, 50
Y_TICKS = 5

COLORS = {
    "anger": "#d62728",
    "anticipation": "#ff7f0e",
    "disgust": "#8c564b",
    "fear": "#2ca02c",
    "joy": "#e6b800",
    "sadness": "#1f77b4",
    "surprise": "#17becf",
    "trust": "#9467bd",
}
_FALLBACK = ["#7f7f7f", "#bcbd22", "#e377c2", "#393b79"]


def _fmt(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def render_arc_svg(
    arc: Arc,
    emotions: Sequence[str],
    title: Optional[str] = None,
    metadata: Optional[dict] = None,
    smoothed: Optional[bool] = None,
) -> str:
    """One polyline per selected emotion over chunk index.

    Uses the smoothed series when the arc has one (unless ``smoothed`` says
    otherwise). ``metadata`` is embedded as JSON in a ``<metadata>`` element.
    """
    emotions = list(emotions)
    if not emotions:
        raise ConfigError("select at least one emotion to plot")
    unknown = [e for e in emotions if e not in arc.emotions]
    if unknown:
        raise ConfigError(f"unknown emotions {unknown}; arc has {list(arc.emotions)}")
    if len(arc) == 0:
        raise ConfigError("arc has no chunks")
    use_smoothed = arc.smoothed is not None if smoothed is None else smoothed
    series = {e: arc.series(e, smoothed=use_smoothed) for e in emotions}

    y_max = max((v for s in series.values() for v in s), default=0.0)
    y_max = y_max if y_max > 0 else 1.0
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B
    n = len(arc)

    def x_of(i):
        return MARGIN_L + (plot_w * i / (n - 1) if n > 1 else plot_w / 2)

    def y_of(v):
        return MARGIN_T + plot_h - plot_h * v / y_max

    title = title if title is not None else arc.doc_id
    label = "smoothed per-10k intensity" if use_smoothed else "per-10k intensity"
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
    ]
    if metadata is not None:
        out.append(f"<metadata>{escape(json.dumps(metadata, ensure_ascii=False, sort_keys=True))}</metadata>")
    out.append(f"<title>{escape(title)}</title>")
    out.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    out.append(
        f'<text x="{WIDTH / 2:.0f}" y="{MARGIN_T / 2 + 5:.0f}" text-anchor="middle" font-size="15">{escape(title)}</text>'
    )

    # axes
    x0, y0 = MARGIN_L, MARGIN_T + plot_h
    out.append(f'<g class="axes" stroke="black" stroke-width="1">')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0 + plot_w}" y2="{y0}"/>')
    out.append(f'<line x1="{x0}" y1="{MARGIN_T}" x2="{x0}" y2="{y0}"/>')
    out.append("</g>")
    out.append('<g class="ticks" fill="black">')
    for k in range(Y_TICKS + 1):
        v = y_max * k / Y_TICKS
        y = y_of(v)
        out.append(f'<line x1="{x0 - 4}" y1="{_fmt(y)}" x2="{x0}" y2="{_fmt(y)}" stroke="black"/>')
        out.append(f'<text x="{x0 - 6}" y="{_fmt(y + 4)}" text-anchor="end">{v:.0f}</text>')
    step = max(1, (n - 1) // 10) if n > 1 else 1
    for i in range(0, n, step):
        x = x_of(i)
        out.append(f'<line x1="{_fmt(x)}" y1="{y0}" x2="{_fmt(x)}" y2="{y0 + 4}" stroke="black"/>')
        out.append(f'<text x="{_fmt(x)}" y="{y0 + 17}" text-anchor="middle">{i}</text>')
    out.append("</g>")
    out.append(f'<text x="{x0 + plot_w / 2:.0f}" y="{HEIGHT - 10}" text-anchor="middle">chunk</text>')
    out.append(
        f'<text x="15" y="{MARGIN_T + plot_h / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 15 {MARGIN_T + plot_h / 2:.0f})">{escape(label)}</text>'
    )

    # data
    for j, e in enumerate(emotions):
        color = COLORS.get(e, _FALLBACK[j % len(_FALLBACK)])
        pts = " ".join(f"{_fmt(x_of(i))},{_fmt(y_of(v))}" for i, v in enumerate(series[e]))
        out.append(
            f'<polyline class="series" data-emotion={quoteattr(e)} fill="none" stroke="{color}" '
            f'stroke-width="1.5" points="{pts}"/>'
        )

    # legend
    lx = MARGIN_L + plot_w + 15
    out.append('<g class="legend">')
    for j, e in enumerate(emotions):
        color = COLORS.get(e, _FALLBACK[j % len(_FALLBACK)])
        ly = MARGIN_T + 10 + 18 * j
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="3"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(e)}</text>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
