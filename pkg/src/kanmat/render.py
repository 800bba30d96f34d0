"""Serialize association matrices to canonical JSON and render them as SVG.

The JSON document is the contract consumed by the web UI: sorted keys,
floats at 9 significant digits, cells in row-major label order, so identical
matrices serialize to identical bytes. The SVG is a plain grid: one rect per
cell colored by strength on a white-to-dark-red ramp, one polyline per
functional-form curve, value text for the baseline matrices, and a colorbar.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import KanmatError
from .matrix import AssociationMatrix, MatrixCell
from .util import canonical_float

RAMP_LOW = (255, 255, 255)   # strength 0
RAMP_HIGH = (139, 0, 0)      # strength 1 (#8B0000)
CURVE_GREY = "#666666"


@dataclass(frozen=True)
class RenderStyle:
    cell_px: int = 64
    font_px: int = 11
    label_margin_left: int = 120
    label_margin_top: int = 96
    pad: int = 12
    curve_width: float = 1.5
    legend_width: int = 14

    def __post_init__(self):
        if self.cell_px < 16:
            raise KanmatError("cell_px must be >= 16")


def strength_color(s: float) -> str:
    """Linear RGB interpolation from white (0) to dark red (1)."""
    s = min(max(float(s), 0.0), 1.0)
    r = round(RAMP_LOW[0] + (RAMP_HIGH[0] - RAMP_LOW[0]) * s)
    g = round(RAMP_LOW[1] + (RAMP_HIGH[1] - RAMP_LOW[1]) * s)
    b = round(RAMP_LOW[2] + (RAMP_HIGH[2] - RAMP_LOW[2]) * s)
    return f"#{r:02X}{g:02X}{b:02X}"


def background_luminance(s: float) -> float:
    s = min(max(float(s), 0.0), 1.0)
    r = RAMP_LOW[0] + (RAMP_HIGH[0] - RAMP_LOW[0]) * s
    g = RAMP_LOW[1] + (RAMP_HIGH[1] - RAMP_LOW[1]) * s
    b = RAMP_LOW[2] + (RAMP_HIGH[2] - RAMP_LOW[2]) * s
    return (0.2126 * r + 0.7152 * g + 0.0722 * b) / 255.0


def curve_color(s: float) -> str:
    """White curve on dark backgrounds, grey on light ones."""
    return "#FFFFFF" if background_luminance(s) < 0.5 else CURVE_GREY


def _canon(obj):
    if isinstance(obj, float):
        return canonical_float(obj)
    if isinstance(obj, dict):
        return {k: _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return _canon(obj.item())
    return obj


def matrix_to_doc(m: AssociationMatrix) -> dict:
    cells = []
    for row in m.row_labels:
        for col in m.labels:
            cell = m.cell(row, col)
            cells.append(
                {
                    "row": row,
                    "col": col,
                    "strength": cell.strength,
                    "curve": [[u, v] for u, v in cell.curve] if cell.curve is not None else None,
                    "raw": cell.raw,
                }
            )
    return {
        "kind": m.kind,
        "labels": list(m.labels),
        "excluded_targets": sorted(m.excluded_targets),
        "seed": m.seed,
        "config": m.config,
        "cells": cells,
    }


def export_json(m: AssociationMatrix) -> str:
    """Canonical JSON document; byte-stable for identical matrices."""
    doc = _canon(matrix_to_doc(m))
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def matrix_from_json(text: str) -> AssociationMatrix:
    doc = json.loads(text)
    for key in ("kind", "labels", "cells"):
        if key not in doc:
            raise KanmatError(f"matrix document missing {key!r}")
    cells = {}
    for c in doc["cells"]:
        curve = [(u, v) for u, v in c["curve"]] if c["curve"] is not None else None
        cells[(c["row"], c["col"])] = MatrixCell(
            row_name=c["row"], col_name=c["col"], strength=c["strength"],
            curve=curve, raw=c.get("raw", {}),
        )
    return AssociationMatrix(
        kind=doc["kind"],
        labels=tuple(doc["labels"]),
        excluded_targets=tuple(doc.get("excluded_targets", ())),
        cells=cells,
        config=doc.get("config", {}),
        seed=int(doc.get("seed", 0)),
    )


def _esc(text: str) -> str:
    return (
        text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
    )


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _curve_points(curve, x0, y0, w, h) -> str:
    vs = [v for _, v in curve]
    vmin = min(vs)
    vmax = max(vs)
    span = vmax - vmin
    pts = []
    for u, v in curve:
        px = x0 + u * w
        if span > 0:
            frac = (v - vmin) / span
        else:
            frac = 0.5
        # value range occupies the middle 90% of the cell, high values up
        py = y0 + h * (0.95 - 0.9 * frac)
        pts.append(f"{_fmt(px)},{_fmt(py)}")
    return " ".join(pts)


def render_svg(m: AssociationMatrix, style: RenderStyle | None = None) -> str:
    """Draw the matrix grid; returns the SVG document text."""
    style = style or RenderStyle()
    rows = m.row_labels
    cols = m.labels
    cell = style.cell_px
    x_grid = style.label_margin_left
    y_grid = style.label_margin_top
    grid_w = cell * len(cols)
    grid_h = cell * len(rows)
    legend_x = x_grid + grid_w + 2 * style.pad
    width = legend_x + style.legend_width + 44
    height = y_grid + grid_h + style.pad
    show_values = m.kind in ("PEARSON", "NMI")

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif">'
    )
    out.append("<defs>")
    out.append('<linearGradient id="strength-ramp" x1="0" y1="1" x2="0" y2="0">')
    out.append(f'<stop offset="0" stop-color="{strength_color(0.0)}"/>')
    out.append(f'<stop offset="1" stop-color="{strength_color(1.0)}"/>')
    out.append("</linearGradient>")
    out.append("</defs>")
    out.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="#FFFFFF"/>')
    out.append(
        f'<text x="{style.pad}" y="{style.font_px + 4}" font-size="{style.font_px + 2}" '
        f'font-weight="bold">{_esc(m.kind)}</text>'
    )

    for j, col in enumerate(cols):
        cx = x_grid + j * cell + cell / 2
        out.append(
            f'<text x="{_fmt(cx)}" y="{_fmt(y_grid - 6)}" font-size="{style.font_px}" '
            f'text-anchor="start" transform="rotate(-45 {_fmt(cx)} {_fmt(y_grid - 6)})">'
            f"{_esc(col)}</text>"
        )
    for i, row in enumerate(rows):
        cy = y_grid + i * cell + cell / 2 + style.font_px / 3
        out.append(
            f'<text x="{_fmt(x_grid - 8)}" y="{_fmt(cy)}" font-size="{style.font_px}" '
            f'text-anchor="end">{_esc(row)}</text>'
        )

    for i, row in enumerate(rows):
        for j, col in enumerate(cols):
            c = m.cell(row, col)
            x0 = x_grid + j * cell
            y0 = y_grid + i * cell
            out.append(
                f'<rect class="cell" x="{x0}" y="{y0}" width="{cell}" height="{cell}" '
                f'fill="{strength_color(c.strength)}" stroke="#DDDDDD" stroke-width="0.5"/>'
            )
            if show_values:
                text = f'{c.raw.get("r", c.strength):.3f}' if m.kind == "PEARSON" else f"{c.strength:.3f}"
                out.append(
                    f'<text class="value" x="{_fmt(x0 + cell / 2)}" y="{_fmt(y0 + cell / 2 + style.font_px / 3)}" '
                    f'font-size="{style.font_px}" text-anchor="middle" '
                    f'fill="{curve_color(c.strength)}">{text}</text>'
                )
            elif c.curve is not None:
                out.append(
                    f'<polyline class="curve" points="{_curve_points(c.curve, x0, y0, cell, cell)}" '
                    f'fill="none" stroke="{curve_color(c.strength)}" '
                    f'stroke-width="{style.curve_width}"/>'
                )

    out.append(
        f'<rect class="colorbar" x="{legend_x}" y="{y_grid}" width="{style.legend_width}" '
        f'height="{grid_h}" fill="url(#strength-ramp)" stroke="#999999" stroke-width="0.5"/>'
    )
    out.append(
        f'<text x="{legend_x + style.legend_width + 4}" y="{_fmt(y_grid + style.font_px / 2)}" '
        f'font-size="{style.font_px}">1.0</text>'
    )
    out.append(
        f'<text x="{legend_x + style.legend_width + 4}" y="{_fmt(y_grid + grid_h)}" '
        f'font-size="{style.font_px}">0.0</text>'
    )
    out.append("</svg>")
    return "\n".join(out) + "\n"
