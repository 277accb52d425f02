"""Minimal static SVG writer for convergence plots (no plotting dependency).

Draws an axes box with ticks, one polyline per series (log10 on the y axis,
linear or log10 on the x axis), dashed reference lines, and a text legend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

WIDTH, HEIGHT = 840, 560
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 210, 40, 60

PALETTE = (
    "#c23b22",  # red
    "#1f5fa8",  # blue
    "#2e8b57",  # green
    "#8a5ab8",  # purple
    "#b8860b",  # dark gold
    "#008b8b",  # teal
    "#d2691e",  # chocolate
    "#555555",
)


@dataclass(frozen=True)
class Series:
    name: str
    xs: Sequence[float]
    ys: Sequence[float]  # raw positive values; plotted as log10
    dashed: bool = False
    marker: bool = True


@dataclass(frozen=True)
class RefLine:
    """Dashed guide y = scale * x^slope (log x) or y = scale * base^x (linear x)."""

    label: str
    slope: float
    scale: float
    kind: str = "algebraic"  # or "exponential" (slope = log10 factor per unit x)


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def render_convergence_svg(
    path: str,
    title: str,
    series: Sequence[Series],
    references: Sequence[RefLine] = (),
    x_mode: str = "log",
    x_label: str = "N",
    y_label: str = "error",
) -> None:
    xs_all = [float(x) for s in series for x in s.xs]
    ys_all = [max(float(y), 1e-300) for s in series for y in s.ys]
    if not xs_all:
        raise ValueError("nothing to plot")
    fx = (lambda v: math.log10(v)) if x_mode == "log" else (lambda v: float(v))
    x_lo, x_hi = min(map(fx, xs_all)), max(map(fx, xs_all))
    y_lo = math.floor(min(math.log10(y) for y in ys_all)) - 0.2
    y_hi = math.ceil(max(math.log10(y) for y in ys_all)) + 0.2
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(v: float) -> float:
        return MARGIN_L + (fx(v) - x_lo) / (x_hi - x_lo) * plot_w

    def py(logy: float) -> float:
        return MARGIN_T + (y_hi - logy) / (y_hi - y_lo) * plot_h

    out: list[str] = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    out.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    out.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#222" stroke-width="1"/>'
    )
    out.append(
        f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>'
    )
    # y ticks at integer decades
    step = max(1, int((y_hi - y_lo) // 10))
    dec = math.ceil(y_lo)
    while dec <= y_hi:
        y = py(dec)
        out.append(
            f'<line x1="{MARGIN_L - 4}" y1="{y:.1f}" x2="{MARGIN_L}" y2="{y:.1f}" stroke="#222"/>'
        )
        out.append(
            f'<text x="{MARGIN_L - 8}" y="{y + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">1e{dec}</text>'
        )
        out.append(
            f'<line x1="{MARGIN_L}" y1="{y:.1f}" x2="{MARGIN_L + plot_w}" y2="{y:.1f}" '
            f'stroke="#eee" stroke-width="0.7"/>'
        )
        dec += step
    # x ticks on the data abscissae (thinned)
    uniq = sorted(set(xs_all))
    keep = uniq if len(uniq) <= 8 else uniq[:: max(1, len(uniq) // 8)]
    for v in keep:
        x = px(v)
        out.append(
            f'<line x1="{x:.1f}" y1="{MARGIN_T + plot_h}" x2="{x:.1f}" '
            f'y2="{MARGIN_T + plot_h + 4}" stroke="#222"/>'
        )
        out.append(
            f'<text x="{x:.1f}" y="{MARGIN_T + plot_h + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(v)}</text>'
        )
    out.append(
        f'<text x="{MARGIN_L + plot_w / 2:.0f}" y="{HEIGHT - 16}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{x_label}</text>'
    )
    out.append(
        f'<text x="18" y="{MARGIN_T + plot_h / 2:.0f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 18 {MARGIN_T + plot_h / 2:.0f})">{y_label}</text>'
    )
    # reference guide lines anchored at the data's upper-left
    for ref in references:
        xr0, xr1 = min(xs_all), max(xs_all)
        if ref.kind == "algebraic":
            y0 = math.log10(ref.scale) + ref.slope * math.log10(xr0)
            y1 = math.log10(ref.scale) + ref.slope * math.log10(xr1)
        else:
            y0 = math.log10(ref.scale) + ref.slope * xr0
            y1 = math.log10(ref.scale) + ref.slope * xr1
        out.append(
            f'<line x1="{px(xr0):.1f}" y1="{py(y0):.1f}" x2="{px(xr1):.1f}" y2="{py(y1):.1f}" '
            f'stroke="#111" stroke-width="1" stroke-dasharray="6 4"/>'
        )
        out.append(
            f'<text x="{px(xr1) + 4:.1f}" y="{py(y1):.1f}" font-family="sans-serif" '
            f'font-size="10" fill="#111">{ref.label}</text>'
        )
    # series
    legend_y = MARGIN_T + 10
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        pts = [
            (px(float(x)), py(math.log10(max(float(y), 1e-300))))
            for x, y in zip(s.xs, s.ys)
        ]
        path_d = " ".join(f"{x:.1f},{y:.1f}" for x, y in pts)
        dash = ' stroke-dasharray="5 4"' if s.dashed else ""
        out.append(
            f'<polyline points="{path_d}" fill="none" stroke="{color}" stroke-width="1.6"{dash}/>'
        )
        if s.marker:
            for x, y in pts:
                out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="2.4" fill="{color}"/>')
        out.append(
            f'<line x1="{WIDTH - MARGIN_R + 12}" y1="{legend_y}" x2="{WIDTH - MARGIN_R + 34}" '
            f'y2="{legend_y}" stroke="{color}" stroke-width="2"{dash}/>'
        )
        out.append(
            f'<text x="{WIDTH - MARGIN_R + 40}" y="{legend_y + 4}" font-family="sans-serif" '
            f'font-size="11">{s.name}</text>'
        )
        legend_y += 18
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")
