"""SVG drawings of d=3 patches projected onto the antidiagonal plane."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .patch import Patch, unit, vadd


@dataclass(frozen=True)
class RenderConfig:
    scale: float = 20.0
    palette: tuple[str, str, str] = ("#e8c547", "#5c80bc", "#cd5334")
    stroke: str = "#222222"
    stroke_width: float = 0.8
    margin: float = 10.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("scale must be positive")
        if len(self.palette) != 3:
            raise ValueError("palette needs one color per face type")


# images of e1, e2, e3 in the drawing: unit vectors at 90, 210 and 330 degrees
_BASIS = tuple((math.cos(math.radians(t)), math.sin(math.radians(t))) for t in (90, 210, 330))


def project(v) -> tuple[float, float]:
    """Drawing coordinates of a point of R^3 (y axis pointing up)."""
    x = sum(c * b[0] for c, b in zip(v, _BASIS))
    y = sum(c * b[1] for c, b in zip(v, _BASIS))
    return x, y


def face_polygon(x, i: int) -> list[tuple[int, ...]]:
    """Corners of the face ``(x, i)`` in cyclic order."""
    j, k = [m for m in (1, 2, 3) if m != i]
    p = vadd(x, unit(3, i))
    return [p, vadd(p, unit(3, j)), vadd(vadd(p, unit(3, j)), unit(3, k)), vadd(p, unit(3, k))]


def _num(v: float) -> str:
    s = f"{v:.6f}"
    return "0.000000" if s == "-0.000000" else s


def render_svg(a: Patch, cfg: RenderConfig = RenderConfig(), show_defects: bool = False) -> str:
    """Projected rhombi of the weight-1 faces; weight -1 faces are drawn dashed
    when ``show_defects`` is set and rejected otherwise."""
    if a.d != 3:
        raise ValueError("rendering supports d = 3 only")
    drawn = []
    for f, w in a.items():
        if w == 1:
            drawn.append((f, False))
        elif w == -1 and show_defects:
            drawn.append((f, True))
        else:
            raise ValueError(f"cannot draw weight {w} at {f}"
                             + ("" if show_defects else " (use show_defects for -1 faces)"))
    polys = []
    for f, dashed in drawn:
        pts = [project(v) for v in face_polygon(f.x, f.t)]
        polys.append((f, dashed, [(px * cfg.scale, -py * cfg.scale) for px, py in pts]))
    if polys:
        xs = [p[0] for _, _, pts in polys for p in pts]
        ys = [p[1] for _, _, pts in polys for p in pts]
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    else:
        x0 = x1 = y0 = y1 = 0.0
    m = cfg.margin
    width, height = x1 - x0 + 2 * m, y1 - y0 + 2 * m
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" height="{_num(height)}" '
        f'viewBox="{_num(x0 - m)} {_num(y0 - m)} {_num(width)} {_num(height)}">',
        f'<g stroke="{cfg.stroke}" stroke-width="{_num(cfg.stroke_width)}" stroke-linejoin="round">',
    ]
    for f, dashed, pts in polys:
        path = " ".join(f"{_num(px)},{_num(py)}" for px, py in pts)
        label = f'x="{",".join(map(str, f.x))}" t="{f.t}"'
        if dashed:
            lines.append(f'<polygon data-{label.replace(" ", " data-")} points="{path}" '
                         f'fill="none" stroke-dasharray="4,3"/>')
        else:
            lines.append(f'<polygon data-{label.replace(" ", " data-")} points="{path}" '
                         f'fill="{cfg.palette[f.t - 1]}"/>')
    lines += ["</g>", "</svg>", ""]
    return "\n".join(lines)
