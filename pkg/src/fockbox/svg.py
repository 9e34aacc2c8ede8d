"""Minimal dependency-free SVG line charts for experiment output."""

from __future__ import annotations

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
_W, _H, _PAD = 640, 400, 56


def _scale(vals, lo, hi, out_lo, out_hi):
    span = hi - lo or 1.0
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in vals]


def write_line_chart(path, series: dict, title: str, xlabel: str, ylabel: str) -> None:
    """series maps label -> (xs, ys); all drawn on shared axes."""
    xs_all = [x for xs, _ in series.values() for x in xs]
    ys_all = [y for _, ys in series.values() for y in ys]
    if not xs_all:
        xs_all, ys_all = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W/2}" y="24" text-anchor="middle" font-size="16">{title}</text>',
        f'<text x="{_W/2}" y="{_H-8}" text-anchor="middle" font-size="12">{xlabel}</text>',
        f'<text x="16" y="{_H/2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {_H/2})">{ylabel}</text>',
        f'<rect x="{_PAD}" y="{_PAD}" width="{_W-2*_PAD}" height="{_H-2*_PAD}" '
        f'fill="none" stroke="#888"/>',
    ]
    for tick in range(5):
        fy = y_lo + (y_hi - y_lo) * tick / 4
        py = _H - _PAD - (_H - 2 * _PAD) * tick / 4
        parts.append(
            f'<text x="{_PAD-6}" y="{py+4}" text-anchor="end" font-size="10">{fy:.3g}</text>'
        )
        fx = x_lo + (x_hi - x_lo) * tick / 4
        px = _PAD + (_W - 2 * _PAD) * tick / 4
        parts.append(
            f'<text x="{px}" y="{_H-_PAD+16}" text-anchor="middle" font-size="10">{fx:.3g}</text>'
        )
    for i, (label, (xs, ys)) in enumerate(series.items()):
        color = _PALETTE[i % len(_PALETTE)]
        px = _scale(xs, x_lo, x_hi, _PAD, _W - _PAD)
        py = _scale(ys, y_lo, y_hi, _H - _PAD, _PAD)
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(px, py))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{_W-_PAD-8}" y="{_PAD+16+14*i}" text-anchor="end" '
            f'font-size="11" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts))
