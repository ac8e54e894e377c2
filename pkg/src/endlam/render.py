"""Disk pictures as SVG: geodesic arcs orthogonal to the unit circle.

A geodesic with boundary angles u, v is drawn as the arc of the circle
through both points that meets the unit circle at right angles; its
Euclidean center is (u + v)/(1 + u.v) (unit vectors, real dot product),
so |C|^2 - r^2 = 1.  Output is deterministic: fixed element order and
nine-decimal coordinates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import ValidationError
from .group import LimitSetSample
from .hyperbolic import TWO_PI, Geodesic
from .lamination import GeodesicFamily, LaminationApprox, MeagerInvariantSet

# Endpoint pairs this close to antipodal are drawn as straight chords:
# the orthogonal circle's radius would exceed ~1e3, where nine-decimal
# coordinate quantization can no longer certify orthogonality (and the
# sagitta is far below one pixel anyway).
ANTIPODAL_DOT = 1e-6

PALETTE = ("#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#d35400",
           "#16a085", "#7f8c8d")


@dataclass
class RenderStyle:
    size: int = 1000
    margin: float = 10.0
    stroke_width: float = 1.5
    boundary_width: float = 1.0
    point_radius: float = 2.5
    boundary_point_radius: float = 3.5
    draw_boundary: bool = True
    boundary_color: str = "#222222"
    colors: tuple[str, ...] = PALETTE

    def __post_init__(self):
        if self.size <= 0 or self.margin < 0:
            raise ValidationError("canvas dimensions must be positive")
        if self.margin >= self.size / 2:
            raise ValidationError("margin swallows the whole canvas")


@dataclass
class _Layer:
    label: str
    geodesics: list[Geodesic] = field(default_factory=list)
    points: list[tuple[float, float]] = field(default_factory=list)
    boundary_angles: list[float] = field(default_factory=list)


def _coerce_layer(label, payload) -> _Layer:
    layer = _Layer(label=label)
    if isinstance(payload, GeodesicFamily):
        layer.geodesics = payload.geodesics()
    elif isinstance(payload, LaminationApprox):
        layer.geodesics = list(payload.leaves)
    elif isinstance(payload, MeagerInvariantSet):
        layer.points = [(rec.x, rec.y) for rec in payload.points]
    elif isinstance(payload, LimitSetSample):
        layer.points = list(payload.orbit)
        layer.boundary_angles = [p.theta for p in payload.fixed_points]
    elif isinstance(payload, (list, tuple)):
        for item in payload:
            if isinstance(item, Geodesic):
                layer.geodesics.append(item)
            elif isinstance(item, (list, tuple)) and len(item) == 2:
                layer.points.append((float(item[0]), float(item[1])))
            else:
                raise ValidationError(
                    f"cannot render item of type {type(item).__name__}"
                )
    else:
        raise ValidationError(
            f"cannot render family of type {type(payload).__name__}"
        )
    return layer


def _fmt(value: float) -> str:
    if value == 0.0:
        value = 0.0  # normalize -0.0
    return f"{value:.9f}"


class _Canvas:
    def __init__(self, style: RenderStyle):
        self.cx = style.size / 2.0
        self.cy = style.size / 2.0
        self.scale = style.size / 2.0 - style.margin

    def point(self, x: float, y: float) -> tuple[float, float]:
        return (self.cx + self.scale * x, self.cy - self.scale * y)


def _geodesic_path(geo: Geodesic, canvas: _Canvas) -> str:
    ta, tb = geo.a.theta, geo.b.theta
    ux, uy = math.cos(ta), math.sin(ta)
    vx, vy = math.cos(tb), math.sin(tb)
    x1, y1 = canvas.point(ux, uy)
    x2, y2 = canvas.point(vx, vy)
    dot = ux * vx + uy * vy
    if 1.0 + dot <= ANTIPODAL_DOT:
        return (f'<path d="M {_fmt(x1)} {_fmt(y1)} '
                f'L {_fmt(x2)} {_fmt(y2)}"/>')
    cx = (ux + vx) / (1.0 + dot)
    cy = (uy + vy) / (1.0 + dot)
    r = math.sqrt(cx * cx + cy * cy - 1.0)
    # Central angle from u to v; the minor arc is the one inside the disk.
    # Emit it as two half-arcs split at its deepest point, keeping every
    # segment's central angle below pi/2 so the coordinates re-determine
    # the center in a well-conditioned way.
    alpha_u = math.atan2(uy - cy, ux - cx)
    alpha_v = math.atan2(vy - cy, vx - cx)
    delta = (alpha_v - alpha_u + math.pi) % TWO_PI - math.pi
    alpha_m = alpha_u + delta / 2.0
    xm, ym = canvas.point(cx + r * math.cos(alpha_m),
                          cy + r * math.sin(alpha_m))
    sweep = 1 if delta < 0 else 0  # canvas y points down
    r_canvas = r * canvas.scale
    arc = f'A {_fmt(r_canvas)} {_fmt(r_canvas)} 0 0 {sweep} '
    return (f'<path d="M {_fmt(x1)} {_fmt(y1)} '
            f'{arc}{_fmt(xm)} {_fmt(ym)} '
            f'{arc}{_fmt(x2)} {_fmt(y2)}"/>')


def render_svg(families, style: RenderStyle | None = None) -> str:
    """Render labeled families of geodesics and points over the unit disk.

    ``families`` is a sequence of (label, payload) pairs; a payload may be
    a GeodesicFamily, a LaminationApprox, a MeagerInvariantSet, a
    LimitSetSample, or a plain list of Geodesic/point entries.  Bare
    payloads get positional labels.
    """
    style = style or RenderStyle()
    canvas = _Canvas(style)
    layers = []
    for idx, item in enumerate(families):
        if isinstance(item, tuple) and len(item) == 2 \
                and isinstance(item[0], str):
            label, payload = item
        else:
            label, payload = f"family-{idx}", item
        layers.append(_coerce_layer(label, payload))

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.size}" '
        f'height="{style.size}" '
        f'viewBox="0 0 {style.size} {style.size}">',
    ]
    if style.draw_boundary:
        lines.append(
            f'<circle cx="{_fmt(canvas.cx)}" cy="{_fmt(canvas.cy)}" '
            f'r="{_fmt(canvas.scale)}" fill="none" '
            f'stroke="{style.boundary_color}" '
            f'stroke-width="{_fmt(style.boundary_width)}"/>'
        )
    for idx, layer in enumerate(layers):
        color = style.colors[idx % len(style.colors)]
        lines.append(f'<g id="{layer.label}" stroke="{color}" fill="none" '
                     f'stroke-width="{_fmt(style.stroke_width)}">')
        for geo in layer.geodesics:
            lines.append(_geodesic_path(geo, canvas))
        lines.append('</g>')
        if layer.points or layer.boundary_angles:
            lines.append(f'<g id="{layer.label}-points" fill="{color}" '
                         f'stroke="none">')
            for x, y in layer.points:
                px, py = canvas.point(x, y)
                lines.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" '
                             f'r="{_fmt(style.point_radius)}"/>')
            for theta in layer.boundary_angles:
                px, py = canvas.point(math.cos(theta), math.sin(theta))
                lines.append(
                    f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" '
                    f'r="{_fmt(style.boundary_point_radius)}"/>'
                )
            lines.append('</g>')
    lines.append('</svg>')
    return "\n".join(lines) + "\n"
