"""Minimal self-contained SVG line plots (no plotting dependency)."""

from __future__ import annotations

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
           "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2")
_W, _H = 720, 460
_ML, _MR, _MT, _MB = 64, 20, 40, 48


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def line_plot(curves, title: str = "", xlabel: str = "",
              ylabel: str = "") -> str:
    """Render labelled (xs, ys) polylines to an SVG document string.

    curves is an iterable of (label, xs, ys) with equal-length arrays.
    """
    curves = [(str(label), np.asarray(xs, dtype=np.float64).ravel(),
               np.asarray(ys, dtype=np.float64).ravel())
              for label, xs, ys in curves]
    if not curves:
        raise ValueError("line_plot needs at least one curve")
    for label, xs, ys in curves:
        if xs.size != ys.size or xs.size < 2:
            raise ValueError(f"curve '{label}' needs >= 2 matched points")
    x_lo = min(float(xs.min()) for _, xs, _ in curves)
    x_hi = max(float(xs.max()) for _, xs, _ in curves)
    y_lo = min(float(ys.min()) for _, _, ys in curves)
    y_hi = max(float(ys.max()) for _, _, ys in curves)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi, y_lo = y_lo + 0.5, y_lo - 0.5
    pad = 0.04 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad
    plot_w = _W - _ML - _MR
    plot_h = _H - _MT - _MB

    def sx(x):
        return _ML + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return _MT + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
        f'height="{_H}" viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="22" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
    ]
    # Axes, ticks, grid.
    parts.append(
        f'<rect x="{_ML}" y="{_MT}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333" stroke-width="1"/>')
    for k in range(5):
        fx = x_lo + (x_hi - x_lo) * k / 4
        fy = y_lo + (y_hi - y_lo) * k / 4
        px, py = sx(fx), sy(fy)
        parts.append(
            f'<line x1="{px:.1f}" y1="{_MT}" x2="{px:.1f}" '
            f'y2="{_MT + plot_h}" stroke="#ddd" stroke-width="0.5"/>')
        parts.append(
            f'<line x1="{_ML}" y1="{py:.1f}" x2="{_ML + plot_w}" '
            f'y2="{py:.1f}" stroke="#ddd" stroke-width="0.5"/>')
        parts.append(
            f'<text x="{px:.1f}" y="{_MT + plot_h + 16}" '
            f'text-anchor="middle" font-family="sans-serif" '
            f'font-size="11">{_fmt(fx)}</text>')
        parts.append(
            f'<text x="{_ML - 6}" y="{py + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{_fmt(fy)}</text>')
    if y_lo < 0.0 < y_hi:
        zy = sy(0.0)
        parts.append(
            f'<line x1="{_ML}" y1="{zy:.1f}" x2="{_ML + plot_w}" '
            f'y2="{zy:.1f}" stroke="#999" stroke-width="0.8" '
            f'stroke-dasharray="4 3"/>')
    parts.append(
        f'<text x="{_ML + plot_w / 2}" y="{_H - 10}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{xlabel}</text>')
    parts.append(
        f'<text x="16" y="{_MT + plot_h / 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 16 {_MT + plot_h / 2})">{ylabel}</text>')
    for c_idx, (label, xs, ys) in enumerate(curves):
        color = PALETTE[c_idx % len(PALETTE)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="1.5"/>')
        ly = _MT + 14 + 16 * c_idx
        lx = _ML + plot_w - 150
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>')
        parts.append(
            f'<text x="{lx + 28}" y="{ly}" font-family="sans-serif" '
            f'font-size="11">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
