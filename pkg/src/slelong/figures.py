"""SVG figures: polytope with its Gamma-hull, normal-cone wedges, and the cone Gamma."""
from __future__ import annotations

from dataclasses import dataclass
import math
from xml.sax.saxutils import escape

import numpy as np

from .cones import AngularCone, HullRegion, cone_arc
from .geometry import GeometryError, Polytope

__all__ = ["FigureSpec", "emit_figure", "figure_svg"]

KINDS = ("all", "hull", "fan", "cone")


@dataclass(frozen=True)
class FigureSpec:
    what: str = "all"
    scale: float = 80.0          # pixels per unit
    annotations: bool = True

    def __post_init__(self):
        if self.what not in KINDS:
            raise ValueError(f"figure kind must be one of {KINDS}")
        if self.scale <= 0:
            raise ValueError("scale must be > 0")


def _fmt(x):
    return f"{x:.3f}".rstrip("0").rstrip(".") if x == x else "nan"


class _Canvas:
    def __init__(self, lo, hi, scale, pad=40):
        self.lo, self.hi, self.s, self.pad = np.asarray(lo, float), np.asarray(hi, float), scale, pad
        self.width = (self.hi[0] - self.lo[0]) * scale + 2 * pad
        self.height = (self.hi[1] - self.lo[1]) * scale + 2 * pad
        self.items = []

    def xy(self, p):
        return (self.pad + (p[0] - self.lo[0]) * self.s,
                self.pad + (self.hi[1] - p[1]) * self.s)

    def polygon(self, pts, **style):
        d = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in (self.xy(p) for p in pts))
        self.items.append(f'<polygon points="{d}" {_attrs(style)}/>')

    def line(self, p, q, **style):
        (x1, y1), (x2, y2) = self.xy(p), self.xy(q)
        self.items.append(f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" '
                          f'y2="{_fmt(y2)}" {_attrs(style)}/>')

    def path(self, d, **style):
        self.items.append(f'<path d="{d}" {_attrs(style)}/>')

    def text(self, p, s, dx=6, dy=-6, **style):
        x, y = self.xy(p)
        self.items.append(f'<text x="{_fmt(x + dx)}" y="{_fmt(y + dy)}" {_attrs(style)}>'
                          f"{escape(s)}</text>")

    def render(self, title):
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(self.width)}" '
                f'height="{_fmt(self.height)}" viewBox="0 0 {_fmt(self.width)} {_fmt(self.height)}">')
        defs = ('<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" '
                'markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#222"/></marker></defs>')
        body = "\n".join(self.items)
        return f'<?xml version="1.0" encoding="UTF-8"?>\n{head}\n<title>{escape(title)}</title>\n{defs}\n{body}\n</svg>\n'


def _attrs(style):
    return " ".join(f'{k.replace("_", "-")}="{v}"' for k, v in style.items())


def _fan_wedges(P: np.ndarray):
    """(vertex, angle_from, angle_to) for a CCW polygon; outward edge normals bound each cell."""
    k = len(P)
    out = []
    for i in range(k):
        prev, v, nxt = P[i - 1], P[i], P[(i + 1) % k]
        e1, e2 = v - prev, nxt - v
        a1 = math.atan2(-e1[0], e1[1])
        a2 = math.atan2(-e2[0], e2[1])
        while a2 < a1:
            a2 += 2 * math.pi
        out.append((v, a1, a2))
    return out


def _wedge_path(canvas, apex, a1, a2, r):
    steps = max(2, int((a2 - a1) / (math.pi / 36)) + 1)
    ts = np.linspace(a1, a2, steps)
    pts = [apex] + [apex + r * np.array([math.cos(t), math.sin(t)]) for t in ts]
    return " ".join(("M" if i == 0 else "L") + f"{_fmt(x)},{_fmt(y)}"
                    for i, (x, y) in enumerate(canvas.xy(p) for p in pts)) + " Z"


def figure_svg(S: Polytope, region: HullRegion | None = None, cone=None, labels=None,
               spec: FigureSpec = FigureSpec(), title="polytope") -> str:
    """SVG of S (already scaled), optional hull overlay, fan wedges and Gamma.

    ``labels`` maps vertex tuples to strings; unlabeled vertices show their
    coordinates when annotations are on.
    """
    if S.dim != 2:
        raise GeometryError("figures are 2D only")
    if cone is not None and cone.dim != 2:
        raise GeometryError("figures are 2D only")
    P = S.V
    pts = [P]
    hull = None
    if region is not None and region.polygon is not None and len(region.polygon):
        hull = np.asarray(region.polygon, dtype=float) + 0.0
        pts.append(hull)
    allp = np.vstack(pts)
    span = max(float(np.ptp(allp[:, 0])), float(np.ptp(allp[:, 1])), 1e-9)
    r = 0.22 * span
    lo = allp.min(axis=0) - r
    hi = allp.max(axis=0) + r
    canvas = _Canvas(lo, hi, spec.scale * 4 / max(span, 1e-9) if span > 4 else spec.scale)
    what = spec.what

    if what in ("all", "fan") and len(P) >= 3:
        for v, a1, a2 in _fan_wedges(P):
            canvas.path(_wedge_path(canvas, v, a1, a2, r), fill="#9ecae1", fill_opacity="0.35",
                        stroke="#3182bd", stroke_width="0.8")
    if what in ("all", "hull", "fan"):
        if len(P) >= 3:
            canvas.polygon(P, fill="#fdd0a2", stroke="#d94801", stroke_width="1.5")
        elif len(P) == 2:
            canvas.line(P[0], P[1], stroke="#d94801", stroke_width="2")
    if what in ("all", "hull") and hull is not None and len(hull) >= 3:
        canvas.polygon(hull, fill="none", stroke="#31a354", stroke_width="1.5",
                       stroke_dasharray="6,3")
    if what in ("all", "cone") and isinstance(cone, AngularCone):
        start, width = cone_arc(cone)
        apex = np.array(lo) + r
        rr = 0.8 * r
        canvas.path(_wedge_path(canvas, apex, start, start + width, rr), fill="#dadaeb",
                    fill_opacity="0.6", stroke="#756bb1", stroke_width="1")
        canvas.line(apex, apex + rr * np.array([1, 1]) / math.sqrt(2), stroke="#222",
                    stroke_width="1.2", marker_end="url(#arrow)")
        if spec.annotations:
            canvas.text(apex + rr * np.array([1, 1]) / math.sqrt(2), "1", font_size="12")
            canvas.text(apex, f"theta = {math.degrees(cone.half_angle):.2f} deg", dx=-30, dy=18,
                        font_size="11")
    if spec.annotations and what != "cone":
        labels = labels or {}
        for v in S.vertices:
            key = tuple(v)
            text = labels.get(key)
            if text is None:
                text = "(" + ", ".join(_fmt(float(c)) for c in v) + ")"
            canvas.text(np.array([float(c) for c in v]), text, font_size="12",
                        font_family="sans-serif")
            canvas.items.append(f'<circle cx="{_fmt(canvas.xy([float(c) for c in v])[0])}" '
                                f'cy="{_fmt(canvas.xy([float(c) for c in v])[1])}" r="2.5" fill="#222"/>')
    return canvas.render(title)


def emit_figure(spec: FigureSpec, data: dict) -> str:
    """``data`` carries ``S`` and optionally ``region``, ``cone``, ``labels``, ``title``."""
    return figure_svg(data["S"], data.get("region"), data.get("cone"), data.get("labels"),
                      spec, data.get("title", "polytope"))
