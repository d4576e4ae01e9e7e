"""SVG rendering of a template's convex layers."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..templates import Template

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf")


def _fmt(v: float) -> str:
    return f"{v:.6f}"


def template_svg(template: Template, size_px: int = 400) -> str:
    """One closed ``<path class="layer">`` per layer, outermost first; residual points as dots.

    The y axis is flipped so the picture reads in the usual math orientation.
    """
    stack = template.layers
    rings = [layer.xy * (1.0, -1.0) for layer in stack.layers]
    residual = stack.residual.xy * (1.0, -1.0)
    pts = np.vstack(rings + [residual]) if rings or len(residual) else np.zeros((1, 2))
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    extent = float(max(hi[0] - lo[0], hi[1] - lo[1])) or 1.0
    margin = 0.05 * extent
    x0, y0 = lo - margin
    w = hi[0] - lo[0] + 2 * margin
    h = hi[1] - lo[1] + 2 * margin
    stroke = extent / 200.0

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size_px}" height="{size_px}" '
        f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">',
        f"<title>template {template.id}: {len(rings)} layers, {template.member_count} members</title>",
    ]
    for i, ring in enumerate(rings):
        cmds = [f"M {_fmt(ring[0, 0])} {_fmt(ring[0, 1])}"]
        cmds += [f"L {_fmt(x)} {_fmt(y)}" for x, y in ring[1:]]
        cmds.append("Z")
        color = _COLORS[i % len(_COLORS)]
        out.append(
            f'<path class="layer" data-layer="{i}" d="{" ".join(cmds)}" fill="none" '
            f'stroke="{color}" stroke-width="{_fmt(stroke)}"/>'
        )
    for x, y in residual:
        out.append(f'<circle class="residual" cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(2 * stroke)}" fill="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_template_svg(template: Template, path: str | Path) -> None:
    Path(path).write_text(template_svg(template), encoding="utf-8")
