"""Metro-map style SVG output and layout JSON export."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from typing import Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

from ._runtime import gc_paused
from .placement import Layout

__all__ = [
    "NAMED_COLORS",
    "StyleConfig",
    "RenderDoc",
    "Storyline",
    "Arc",
    "Cap",
    "Label",
    "Title",
    "assign_colors",
    "build_render_doc",
    "render_svg",
    "export_layout_json",
    "parse_layout_json",
]

# qualitative palette of colours people can name
NAMED_COLORS = {
    "red": "#e41a1c",
    "blue": "#377eb8",
    "green": "#4daf4a",
    "purple": "#984ea3",
    "orange": "#ff7f00",
    "brown": "#a65628",
    "pink": "#f781bf",
    "teal": "#1b9e9e",
    "olive": "#808000",
    "navy": "#1f2f7a",
    "maroon": "#800000",
    "gold": "#d4a017",
    "lightgray": "#c8c8c8",
}


def to_hex(color: str) -> str:
    if color.startswith("#"):
        return color.lower()
    try:
        return NAMED_COLORS[color]
    except KeyError:
        raise ValueError(f"unknown colour name {color!r}") from None


@dataclass(frozen=True)
class StyleConfig:
    palette: tuple[str, ...] = tuple(k for k in NAMED_COLORS if k != "lightgray")
    gray: str = "lightgray"
    named_count: int = 12
    line_width: float = 3.0
    bend_radius: float = 8.0
    cap_radius: float = 4.0
    font_size: float = 10.0
    margin: float = 24.0
    level_pitch: float = 18.0
    window_gutter: float = 18.0
    edge_opacity: float = 0.4
    bulge: float = 0.35

    def __post_init__(self):
        if self.named_count < 0 or self.named_count > len(self.palette):
            raise ValueError("named_count must be between 0 and the palette size")
        for f in ("line_width", "bend_radius", "cap_radius", "font_size", "margin", "level_pitch"):
            if not getattr(self, f) > 0:
                raise ValueError(f"{f} must be positive")
        for c in (*self.palette, self.gray):
            to_hex(c)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "StyleConfig":
        """Accepts camelCase keys as used in style JSON files."""
        names = {f.name for f in fields(cls)}
        kw = {}
        for key, value in doc.items():
            snake = "".join("_" + c.lower() if c.isupper() else c for c in key)
            if snake not in names:
                raise ValueError(f"unknown style option {key!r}")
            kw[snake] = tuple(value) if snake == "palette" else value
        if "palette" in kw and "named_count" not in kw:
            kw["named_count"] = min(cls.named_count, len(kw["palette"]))
        return cls(**kw)


# ---------------------------------------------------------------------------
# Colours
# ---------------------------------------------------------------------------


def assign_colors(layout: Layout, style: StyleConfig = StyleConfig()) -> dict[str, str]:
    """Palette colours for the most frequent nodes, gray for the rest.

    Frequency is the number of window appearances; ties go to higher total
    degree, then node id.
    """
    count: dict[str, int] = {}
    for p in layout.nodes:
        count[p.id] = count.get(p.id, 0) + 1
    degree = dict.fromkeys(count, 0)
    for e in layout.edges:
        degree[e.u] = degree.get(e.u, 0) + 1
        degree[e.v] = degree.get(e.v, 0) + 1
    ranked = sorted(count, key=lambda v: (-count[v], -degree[v], v))
    gray = to_hex(style.gray)
    colors = dict.fromkeys(ranked, gray)
    for v, c in zip(ranked[: style.named_count], style.palette):
        colors[v] = to_hex(c)
    return colors


def blend(a: str, b: str) -> str:
    ra, rb = int(a[1:], 16), int(b[1:], 16)
    chans = [((ra >> s & 255) + (rb >> s & 255)) // 2 for s in (16, 8, 0)]
    return "#" + "".join(f"{c:02x}" for c in chans)


# ---------------------------------------------------------------------------
# Render document
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Storyline:
    node: str
    color: str
    points: tuple[tuple[float, float], ...]
    width: float
    radius: float


@dataclass(frozen=True)
class Arc:
    u: str
    v: str
    x: float
    y0: float
    y1: float
    bulge: float
    color: str
    opacity: float
    width: float


@dataclass(frozen=True)
class Cap:
    node: str
    kind: str  # "circle" or "arrow"
    side: str  # "start" or "end"
    x: float
    y: float
    r: float
    color: str


@dataclass(frozen=True)
class Label:
    text: str
    x: float
    y: float
    size: float


@dataclass(frozen=True)
class Title:
    text: str
    x: float
    y: float
    size: float


@dataclass
class RenderDoc:
    width: float
    height: float
    draw: list = field(default_factory=list)

    def of_type(self, kind) -> list:
        return [p for p in self.draw if isinstance(p, kind)]


def _runs(windows: Sequence[int]) -> list[tuple[int, int]]:
    runs = []
    start = prev = windows[0]
    for w in windows[1:]:
        if w != prev + 1:
            runs.append((start, prev))
            start = w
        prev = w
    runs.append((start, prev))
    return runs


def build_render_doc(layout: Layout, colors: Mapping[str, str], style: StyleConfig = StyleConfig()) -> RenderDoc:
    m = style.margin
    # title row plus room for the labels of level-0 storylines
    head = 2 * style.font_size + 8
    n_win = len(layout.windows)
    x_end = max((b.x1 for b in layout.windows), default=0.0)
    width = 2 * m + x_end
    height = 2 * m + head + (style.level_pitch * layout.max_level if layout.nodes else 0.0)
    doc = RenderDoc(width, height)
    if not layout.nodes and not n_win:
        return doc

    def Y(level: int) -> float:
        return m + head + level * style.level_pitch

    gray = to_hex(style.gray)

    # within-window edges sit underneath the storylines
    for e in layout.edges:
        box = layout.windows[e.window]
        y0, y1 = Y(layout.y(e.window, e.u)), Y(layout.y(e.window, e.v))
        bulge = min(style.bulge * abs(y1 - y0), (box.x1 - box.x0) / 2)
        if e.x > (box.x0 + box.x1) / 2:
            bulge = -bulge
        c = blend(to_hex(colors.get(e.u, gray)), to_hex(colors.get(e.v, gray)))
        doc.draw.append(Arc(e.u, e.v, m + e.x, y0, y1, bulge, c, style.edge_opacity, max(1.0, style.line_width / 2)))

    apps = layout.appearances()
    starts = []
    for v, ws in apps.items():
        for a, b in _runs(ws):
            starts.append((a, layout.y(a, v), v, b))
    starts.sort()

    lines, caps, labels = [], [], []
    for a, ya, v, b in starts:
        color = to_hex(colors.get(v, gray))
        g = min(style.window_gutter, (layout.windows[a].x1 - layout.windows[a].x0) / 4)
        pts = [(m + layout.windows[a].x0 + g, Y(ya))]
        for k in range(a, b):
            yk, yn = Y(layout.y(k, v)), Y(layout.y(k + 1, v))
            pts.append((m + layout.windows[k].x1 - g, yk))
            pts.append((m + layout.windows[k + 1].x0 + g, yn))
        pts.append((m + layout.windows[b].x1 - g, Y(layout.y(b, v))))
        lines.append(Storyline(v, color, tuple(pts), style.line_width, style.bend_radius))
        ws = apps[v]
        before = ws[0] < a
        after = ws[-1] > b
        caps.append(Cap(v, "arrow" if before else "circle", "start", *pts[0], style.cap_radius, color))
        caps.append(Cap(v, "arrow" if after else "circle", "end", *pts[-1], style.cap_radius, color))
        labels.append(Label(v, pts[0][0] + style.cap_radius + 2, pts[0][1] - style.cap_radius - 1, style.font_size))

    doc.draw.extend(lines)
    doc.draw.extend(caps)
    doc.draw.extend(labels)
    for b in layout.windows:
        doc.draw.append(Title(b.label, m + (b.x0 + b.x1) / 2, m + style.font_size, style.font_size))
    return doc


# ---------------------------------------------------------------------------
# SVG serialisation
# ---------------------------------------------------------------------------


def _num(x: float) -> str:
    s = f"{x:.2f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _rounded_path(points: Sequence[tuple[float, float]], radius: float) -> str:
    pts = [p for k, p in enumerate(points) if k == 0 or p != points[k - 1]]
    d = [f"M{_num(pts[0][0])},{_num(pts[0][1])}"]
    for k in range(1, len(pts) - 1):
        (ax, ay), (bx, by), (cx, cy) = pts[k - 1], pts[k], pts[k + 1]
        l1, l2 = math.hypot(bx - ax, by - ay), math.hypot(cx - bx, cy - by)
        cross = (bx - ax) * (cy - by) - (by - ay) * (cx - bx)
        if abs(cross) < 1e-9:
            continue
        r = min(radius, l1 / 2, l2 / 2)
        p1 = (bx - (bx - ax) / l1 * r, by - (by - ay) / l1 * r)
        p2 = (bx + (cx - bx) / l2 * r, by + (cy - by) / l2 * r)
        d.append(f"L{_num(p1[0])},{_num(p1[1])}")
        d.append(f"Q{_num(bx)},{_num(by)} {_num(p2[0])},{_num(p2[1])}")
    d.append(f"L{_num(pts[-1][0])},{_num(pts[-1][1])}")
    return " ".join(d)


def _arrow(cap: Cap) -> str:
    # both ends point along the time axis
    r = cap.r * 1.5
    x, y = cap.x, cap.y
    pts = [(x - r, y - r), (x + r, y), (x - r, y + r)]
    return " ".join(f"{_num(a)},{_num(b)}" for a, b in pts)


def _svg_element(p) -> str:
    if isinstance(p, Storyline):
        return (f'<path class="storyline" data-node={quoteattr(p.node)} d="{_rounded_path(p.points, p.radius)}" '
                f'fill="none" stroke="{p.color}" stroke-width="{_num(p.width)}" '
                f'stroke-linecap="round" stroke-linejoin="round"/>')
    if isinstance(p, Arc):
        cx = p.x + p.bulge
        return (f'<path class="arc" d="M{_num(p.x)},{_num(p.y0)} C{_num(cx)},{_num(p.y0)} '
                f'{_num(cx)},{_num(p.y1)} {_num(p.x)},{_num(p.y1)}" fill="none" stroke="{p.color}" '
                f'stroke-opacity="{_num(p.opacity)}" stroke-width="{_num(p.width)}"/>')
    if isinstance(p, Cap):
        if p.kind == "circle":
            return (f'<circle class="cap" cx="{_num(p.x)}" cy="{_num(p.y)}" r="{_num(p.r)}" '
                    f'fill="#ffffff" stroke="{p.color}" stroke-width="2"/>')
        return f'<polygon class="cap arrow" points="{_arrow(p)}" fill="{p.color}"/>'
    if isinstance(p, Label):
        return (f'<text class="label" x="{_num(p.x)}" y="{_num(p.y)}" font-size="{_num(p.size)}">'
                f"{escape(p.text)}</text>")
    if isinstance(p, Title):
        return (f'<text class="window-title" x="{_num(p.x)}" y="{_num(p.y)}" font-size="{_num(p.size)}" '
                f'text-anchor="middle">{escape(p.text)}</text>')
    raise TypeError(type(p))


def serialize_svg(doc: RenderDoc) -> bytes:
    w, h = _num(doc.width), _num(doc.height)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        '<g font-family="Helvetica, Arial, sans-serif" fill="#333333">',
    ]
    out.extend(_svg_element(p) for p in doc.draw)
    out.append("</g>")
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def render_svg(layout: Layout, colors: Mapping[str, str] | None = None, style: StyleConfig = StyleConfig()) -> bytes:
    with gc_paused():
        if colors is None:
            colors = assign_colors(layout, style)
        return serialize_svg(build_render_doc(layout, colors, style))


# ---------------------------------------------------------------------------
# Layout JSON
# ---------------------------------------------------------------------------


def export_layout_json(layout: Layout, colors: Mapping[str, str] | None = None) -> bytes:
    doc = layout.to_dict(dict(colors) if colors is not None else None)
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def parse_layout_json(data: bytes | str) -> tuple[Layout, dict[str, str]]:
    doc = json.loads(data)
    colors = {str(p["id"]): p["color"] for p in doc.get("nodes", []) if "color" in p}
    return Layout.from_dict(doc), colors
