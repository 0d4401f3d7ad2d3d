"""Self-contained SVG heatmaps for abstraction grids.

No plotting dependency: the SVG is assembled as text so that identical
input bytes produce identical output bytes.  Cell color interpolates
linearly between a fixed light color at 0.0 and a fixed dark blue at 1.0
(values are clamped to [0, 1] for coloring); each cell is annotated with
its value to two decimals, in white on dark cells and near-black on light
ones.
"""

from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

LOW_COLOR = (247, 251, 255)
HIGH_COLOR = (8, 48, 107)
TEXT_FLIP_THRESHOLD = 0.5  # above this the annotation switches to white

CELL_W = 84
CELL_H = 56
MARGIN_LEFT = 150
MARGIN_TOP = 96
MARGIN_RIGHT = 24
MARGIN_BOTTOM = 24
FONT = "sans-serif"


def _cell_color(value: float) -> str:
    t = min(max(float(value), 0.0), 1.0)
    channels = (
        round(lo + (hi - lo) * t) for lo, hi in zip(LOW_COLOR, HIGH_COLOR)
    )
    return "#{:02x}{:02x}{:02x}".format(*channels)


def render_heatmap_svg(
    row_labels: Sequence[str],
    col_labels: Sequence[str],
    matrix,
    title: str = "",
) -> str:
    """Render a probability matrix to an SVG string (one trailing newline)."""
    values = np.asarray(matrix, dtype=float)
    if values.ndim != 2:
        raise ValueError(f"matrix must be 2-dimensional, got shape {values.shape}")
    m, n = values.shape
    if len(row_labels) != m or len(col_labels) != n:
        raise ValueError(
            f"label counts ({len(row_labels)} rows, {len(col_labels)} cols) "
            f"do not match matrix shape {m}x{n}"
        )
    width = MARGIN_LEFT + n * CELL_W + MARGIN_RIGHT
    height = MARGIN_TOP + m * CELL_H + MARGIN_BOTTOM

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if title:
        out.append(
            f'<text x="{MARGIN_LEFT}" y="24" font-family="{FONT}" font-size="15" '
            f'font-weight="bold" fill="#1a1a1a">{escape(title)}</text>'
        )
    for j, label in enumerate(col_labels):
        x = MARGIN_LEFT + j * CELL_W + CELL_W // 2
        y = MARGIN_TOP - 10
        out.append(
            f'<text x="{x}" y="{y}" font-family="{FONT}" font-size="13" '
            f'fill="#1a1a1a" text-anchor="end" '
            f'transform="rotate(-35 {x} {y})">{escape(label)}</text>'
        )
    for i, label in enumerate(row_labels):
        x = MARGIN_LEFT - 8
        y = MARGIN_TOP + i * CELL_H + CELL_H // 2 + 5
        out.append(
            f'<text x="{x}" y="{y}" font-family="{FONT}" font-size="13" '
            f'fill="#1a1a1a" text-anchor="end">{escape(label)}</text>'
        )
    for i in range(m):
        for j in range(n):
            v = float(values[i, j])
            x = MARGIN_LEFT + j * CELL_W
            y = MARGIN_TOP + i * CELL_H
            out.append(
                f'<rect x="{x}" y="{y}" width="{CELL_W}" height="{CELL_H}" '
                f'fill="{_cell_color(v)}" stroke="#ffffff" stroke-width="1"/>'
            )
            text_fill = "#ffffff" if v > TEXT_FLIP_THRESHOLD else "#1a1a1a"
            out.append(
                f'<text x="{x + CELL_W // 2}" y="{y + CELL_H // 2 + 5}" '
                f'font-family="{FONT}" font-size="13" fill="{text_fill}" '
                f'text-anchor="middle">{v:.2f}</text>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"
