"""Chart composition, vector rendering, and ground-truth meta records.

Rendering is a pure function from a ChartSpec to SVG bytes plus a ChartMeta
record holding every element's bounding box and every data point's position
in both data and canvas units.  No font engine is consulted: text extents
come from a fixed-metrics model (width 0.6 * font_size per codepoint,
height 1.2 * font_size), which is what makes the bounding boxes exact and
the output byte-identical everywhere.

Canvas is fixed at 640x480 units, origin top-left, y growing downward.
The plot rectangle inside it varies with label sizes and is recorded in
the meta.  All canvas coordinates in the SVG and the meta are rounded to
two decimals.
"""

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from .catalog import DataSeries, _parse_years
from .rng import Rng
from .trend import ParameterError, TrendClass, classify_trend

CANVAS_W = 640
CANVAS_H = 480

TITLE_FS = 16.0
AXIS_FS = 13.0
TICK_FS = 11.0
LEGEND_FS = 11.0

MARGIN = 10.0
TITLE_GAP = 8.0
LABEL_GAP = 6.0
TICK_LEN = 4.0
TICK_GAP = 4.0
RIGHT_PAD = 14.0
LEGEND_INSET = 12.0

MARKER_SHAPES = (
    "circle", "square", "triangle-up", "triangle-down", "diamond",
    "plus", "cross", "star", "pentagon", "hexagon",
)

# name, hex — exactly twenty
COLOR_PALETTE = (
    ("steel blue", "#4682B4"), ("firebrick", "#B22222"),
    ("forest green", "#228B22"), ("dark orange", "#FF8C00"),
    ("medium purple", "#9370DB"), ("saddle brown", "#8B4513"),
    ("orchid", "#DA70D6"), ("gray", "#7F7F7F"),
    ("olive", "#808000"), ("teal", "#008080"),
    ("navy", "#000080"), ("crimson", "#DC143C"),
    ("dark cyan", "#008B8B"), ("goldenrod", "#DAA520"),
    ("indigo", "#4B0082"), ("salmon", "#FA8072"),
    ("sea green", "#2E8B57"), ("slate blue", "#6A5ACD"),
    ("chocolate", "#D2691E"), ("deep pink", "#FF1493"),
)

LINE_STYLES = ("solid", "dashed", "dotted", "dash-dot")
_DASH_PATTERNS = {"solid": None, "dashed": "8 5", "dotted": "2 4", "dash-dot": "9 4 2 4"}

LEGEND_POSITIONS = ("top-right", "top-left", "bottom-right", "bottom-left")


class ChartKind(str, Enum):
    SCATTER = "scatter"
    LINE = "line"
    VERTICAL_BAR = "vertical-bar"
    HORIZONTAL_BAR = "horizontal-bar"

    @property
    def is_bar(self) -> bool:
        return self in (ChartKind.VERTICAL_BAR, ChartKind.HORIZONTAL_BAR)


class ArityError(ValueError):
    """Series count or series shapes are inconsistent."""


class NegativeBarValueError(ValueError):
    """Bar charts draw from a zero baseline and need non-negative data."""


@dataclass(frozen=True)
class StyleSpec:
    marker_shape: int
    colors: Tuple[int, ...]
    bar_thickness: float
    line_style: str
    legend_position: str

    def __post_init__(self):
        if not (0 <= self.marker_shape < len(MARKER_SHAPES)):
            raise ParameterError(f"marker_shape: index {self.marker_shape} out of range")
        if not self.colors or len(self.colors) > 2:
            raise ParameterError("colors: need one or two palette indexes")
        if any(not (0 <= c < len(COLOR_PALETTE)) for c in self.colors):
            raise ParameterError("colors: palette index out of range")
        if len(set(self.colors)) != len(self.colors):
            raise ParameterError("colors: two series need distinct colors")
        if not (0.4 <= self.bar_thickness <= 0.9):
            raise ParameterError(f"bar_thickness: {self.bar_thickness} outside [0.4, 0.9]")
        if self.line_style not in LINE_STYLES:
            raise ParameterError(f"line_style: unknown style {self.line_style!r}")
        if self.legend_position not in LEGEND_POSITIONS:
            raise ParameterError(f"legend_position: unknown position {self.legend_position!r}")


@dataclass
class ChartSpec:
    kind: ChartKind
    series: List[DataSeries]
    title: str
    x_label: str
    y_label: str
    style: StyleSpec
    image_index: int = 0

    def __post_init__(self):
        if not (1 <= len(self.series) <= 2):
            raise ArityError(f"need 1 or 2 series, got {len(self.series)}")
        labels = self.series[0].x_labels
        for s in self.series[1:]:
            if s.x_labels != labels:
                raise ArityError("all series in one chart must share x_labels")
        if len(self.style.colors) != len(self.series):
            raise ArityError("style needs one color per series")


@dataclass
class BBox:
    x: float
    y: float
    w: float
    h: float

    def within_canvas(self) -> bool:
        return (self.x >= 0 and self.y >= 0
                and self.x + self.w <= CANVAS_W
                and self.y + self.h <= CANVAS_H
                and self.w > 0 and self.h > 0)

    def overlaps(self, other: "BBox") -> bool:
        return not (self.x + self.w <= other.x or other.x + other.w <= self.x
                    or self.y + self.h <= other.y or other.y + other.h <= self.y)

    def to_dict(self) -> Dict[str, float]:
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}

    @staticmethod
    def from_dict(d: Dict[str, float]) -> "BBox":
        return BBox(d["x"], d["y"], d["w"], d["h"])


@dataclass
class LabeledText:
    text: str
    bbox: BBox

    def to_dict(self):
        return {"text": self.text, "bbox": self.bbox.to_dict()}

    @staticmethod
    def from_dict(d):
        return LabeledText(d["text"], BBox.from_dict(d["bbox"]))


@dataclass
class TickMark:
    label: str
    bbox: BBox
    value: Optional[float]  # numeric tick value; None for category ticks

    def to_dict(self):
        return {"label": self.label, "bbox": self.bbox.to_dict(), "value": self.value}

    @staticmethod
    def from_dict(d):
        return TickMark(d["label"], BBox.from_dict(d["bbox"]), d["value"])


@dataclass
class LegendEntry:
    name: str
    name_bbox: BBox
    marker_bbox: BBox

    def to_dict(self):
        return {"name": self.name, "name_bbox": self.name_bbox.to_dict(),
                "marker_bbox": self.marker_bbox.to_dict()}

    @staticmethod
    def from_dict(d):
        return LegendEntry(d["name"], BBox.from_dict(d["name_bbox"]),
                           BBox.from_dict(d["marker_bbox"]))


@dataclass
class PointRecord:
    x_label: str
    x_index: int
    value: float  # data units, full precision
    x_canvas: float
    y_canvas: float

    def to_dict(self):
        return {"x_label": self.x_label, "x_index": self.x_index, "value": self.value,
                "x_canvas": self.x_canvas, "y_canvas": self.y_canvas}

    @staticmethod
    def from_dict(d):
        return PointRecord(d["x_label"], d["x_index"], d["value"],
                           d["x_canvas"], d["y_canvas"])


@dataclass
class SeriesMeta:
    name: str
    trend_class: Optional[str]
    points: List[PointRecord]

    def to_dict(self):
        return {"name": self.name, "trend_class": self.trend_class,
                "points": [p.to_dict() for p in self.points]}

    @staticmethod
    def from_dict(d):
        return SeriesMeta(d["name"], d["trend_class"],
                          [PointRecord.from_dict(p) for p in d["points"]])


@dataclass
class AxisTransform:
    """Linear map between the value axis and one canvas axis.

    orientation is the canvas axis that carries the value scale: "y" for
    vertical charts, "x" for horizontal bars.
    """

    orientation: str
    lo: float
    hi: float
    canvas_lo: float
    canvas_hi: float

    def to_canvas(self, v: float) -> float:
        t = (v - self.lo) / (self.hi - self.lo)
        return self.canvas_lo + t * (self.canvas_hi - self.canvas_lo)

    def to_data(self, c: float) -> float:
        t = (c - self.canvas_lo) / (self.canvas_hi - self.canvas_lo)
        return self.lo + t * (self.hi - self.lo)

    def to_dict(self):
        return {"orientation": self.orientation, "lo": self.lo, "hi": self.hi,
                "canvas_lo": self.canvas_lo, "canvas_hi": self.canvas_hi}

    @staticmethod
    def from_dict(d):
        return AxisTransform(d["orientation"], d["lo"], d["hi"],
                             d["canvas_lo"], d["canvas_hi"])


@dataclass
class ChartMeta:
    """Ground truth for one rendered chart; serializes to a JSON document."""

    image_index: int
    chart_kind: str
    category: str  # temporal-trend | temporal-random | categorical
    title: LabeledText
    x_label: LabeledText
    y_label: LabeledText
    y_unit: str
    x_ticks: List[TickMark]
    y_ticks: List[TickMark]
    legend_bbox: BBox
    legend_entries: List[LegendEntry]
    series: List[SeriesMeta]
    plot_area: BBox
    value_axis: AxisTransform
    canvas_width: int = CANVAS_W
    canvas_height: int = CANVAS_H

    def to_dict(self):
        return {
            "image_index": self.image_index,
            "chart_kind": self.chart_kind,
            "category": self.category,
            "title": self.title.to_dict(),
            "x_label": self.x_label.to_dict(),
            "y_label": self.y_label.to_dict(),
            "y_unit": self.y_unit,
            "x_ticks": [t.to_dict() for t in self.x_ticks],
            "y_ticks": [t.to_dict() for t in self.y_ticks],
            "legend": {
                "bbox": self.legend_bbox.to_dict(),
                "entries": [e.to_dict() for e in self.legend_entries],
            },
            "series": [s.to_dict() for s in self.series],
            "plot_area": self.plot_area.to_dict(),
            "value_axis": self.value_axis.to_dict(),
            "canvas": {"width": self.canvas_width, "height": self.canvas_height},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @staticmethod
    def from_dict(d) -> "ChartMeta":
        return ChartMeta(
            image_index=d["image_index"],
            chart_kind=d["chart_kind"],
            category=d["category"],
            title=LabeledText.from_dict(d["title"]),
            x_label=LabeledText.from_dict(d["x_label"]),
            y_label=LabeledText.from_dict(d["y_label"]),
            y_unit=d["y_unit"],
            x_ticks=[TickMark.from_dict(t) for t in d["x_ticks"]],
            y_ticks=[TickMark.from_dict(t) for t in d["y_ticks"]],
            legend_bbox=BBox.from_dict(d["legend"]["bbox"]),
            legend_entries=[LegendEntry.from_dict(e) for e in d["legend"]["entries"]],
            series=[SeriesMeta.from_dict(s) for s in d["series"]],
            plot_area=BBox.from_dict(d["plot_area"]),
            value_axis=AxisTransform.from_dict(d["value_axis"]),
            canvas_width=d["canvas"]["width"],
            canvas_height=d["canvas"]["height"],
        )

    @staticmethod
    def from_json(text: str) -> "ChartMeta":
        return ChartMeta.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# text metrics and ticks

def estimate_text_bbox(text: str, font_size: float) -> Tuple[float, float]:
    """Fixed-metrics text extent: (0.6 * font_size * codepoints, 1.2 * font_size)."""
    if font_size <= 0:
        raise ParameterError(f"font_size: must be positive, got {font_size}")
    return (0.6 * font_size * len(text), 1.2 * font_size)


def nice_ticks(lo: float, hi: float, target_count: int = 5) -> List[float]:
    """Ticks at multiples of {1, 2, 2.5, 5} * 10^k covering [lo, hi], with
    count in [target_count - 1, target_count + 2].  A degenerate lo == hi
    is padded by one unit each way."""
    if lo > hi:
        raise ParameterError(f"lo: {lo} exceeds hi {hi}")
    if not (3 <= target_count <= 8):
        raise ParameterError(f"target_count: {target_count} outside [3, 8]")
    if lo == hi:
        lo, hi = lo - 1.0, hi + 1.0
    span = hi - lo
    k = math.floor(math.log10(span / target_count))
    steps = []
    for e in range(k - 1, k + 4):
        for m in (1.0, 2.0, 2.5, 5.0):
            steps.append(m * 10.0 ** e)
    steps.sort()
    for step in steps:
        # snap quotients that sit within float noise of an integer
        q = lo / step
        fi = math.floor(q)
        if q - fi > 1 - 1e-9:
            fi += 1
        q = hi / step
        li = math.ceil(q)
        if li - q > 1 - 1e-9:
            li -= 1
        count = li - fi + 1
        if count <= target_count + 2:
            # a minimal cover may undershoot the window when counts halve
            # across a coarse step; pad with headroom ticks above the data
            li += max(0, (target_count - 1) - count)
            count = li - fi + 1
            return [(fi + i) * step for i in range(count)]
    # unreachable: step grows until the minimal cover fits under the cap
    raise AssertionError("tick search failed")  # pragma: no cover


def _fmt_tick(v: float) -> str:
    """Compact tick label: integers plain, large/small values scientific."""
    if v == int(v) and abs(v) < 1e6:
        return str(int(v))
    return f"{v:g}"


# ---------------------------------------------------------------------------
# spec building

def build_chart_spec(series: List[DataSeries], kind: ChartKind, rng: Rng,
                     image_index: int = 0) -> ChartSpec:
    """Randomized style + composed title and axis labels for the series."""
    if not (1 <= len(series) <= 2):
        raise ArityError(f"need 1 or 2 series, got {len(series)}")
    first = series[0]
    for s in series[1:]:
        if s.x_labels != first.x_labels:
            raise ArityError("series do not share x_labels")

    marker_shape = rng.randint(len(MARKER_SHAPES))
    if len(series) == 1:
        colors: Tuple[int, ...] = (rng.randint(len(COLOR_PALETTE)),)
    else:
        colors = tuple(rng.sample(range(len(COLOR_PALETTE)), 2))
    bar_thickness = 0.4 + 0.5 * rng.random()
    line_style = LINE_STYLES[rng.randint(len(LINE_STYLES))]
    legend_position = LEGEND_POSITIONS[rng.randint(len(LEGEND_POSITIONS))]
    style = StyleSpec(marker_shape, colors, bar_thickness, line_style, legend_position)

    indicator = first.indicator_name or first.y_unit or "value"
    if first.temporal:
        who = series[0].series_name if len(series) == 1 else \
            f"{series[0].series_name} and {series[1].series_name}"
        title = f"{indicator} of {who}, {first.x_labels[0]}–{first.x_labels[-1]}"
        cat_label = "Year"
    else:
        kind_word = first.entity_kind or "category"
        title = f"{indicator} by {kind_word}"
        cat_label = kind_word.capitalize()

    if kind is ChartKind.HORIZONTAL_BAR:
        x_label, y_label = indicator, cat_label
    else:
        x_label, y_label = cat_label, indicator

    return ChartSpec(kind, list(series), title, x_label, y_label, style, image_index)


# ---------------------------------------------------------------------------
# rendering

def _r2(v: float) -> float:
    return round(v, 2)


def _clamp_box(x: float, y: float, w: float, h: float) -> BBox:
    """Shift a box fully into the canvas (with a small safety margin) and
    round its coordinates."""
    w = min(w, CANVAS_W - 0.2)
    h = min(h, CANVAS_H - 0.2)
    x = min(max(x, 0.1), CANVAS_W - 0.1 - w)
    y = min(max(y, 0.1), CANVAS_H - 0.1 - h)
    return BBox(_r2(x), _r2(y), _r2(w), _r2(h))


class _Svg:
    """Tiny SVG writer with fixed number formatting."""

    def __init__(self):
        self.parts: List[str] = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS_W}" '
            f'height="{CANVAS_H}" viewBox="0 0 {CANVAS_W} {CANVAS_H}">'
        ]

    @staticmethod
    def esc(text: str) -> str:
        return (text.replace("&", "&amp;").replace("<", "&lt;")
                .replace(">", "&gt;").replace('"', "&quot;"))

    def rect(self, x, y, w, h, fill="none", stroke=None, stroke_width=1.0):
        s = f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" fill="{fill}"'
        if stroke:
            s += f' stroke="{stroke}" stroke-width="{stroke_width:.2f}"'
        self.parts.append(s + "/>")

    def line(self, x1, y1, x2, y2, stroke="#000000", width=1.0, dash=None):
        s = (f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
             f'stroke="{stroke}" stroke-width="{width:.2f}"')
        if dash:
            s += f' stroke-dasharray="{dash}"'
        self.parts.append(s + "/>")

    def polyline(self, pts, stroke, width=2.0, dash=None):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        s = f'<polyline points="{coords}" fill="none" stroke="{stroke}" stroke-width="{width:.2f}"'
        if dash:
            s += f' stroke-dasharray="{dash}"'
        self.parts.append(s + "/>")

    def polygon(self, pts, fill):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        self.parts.append(f'<polygon points="{coords}" fill="{fill}"/>')

    def circle(self, cx, cy, r, fill):
        self.parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{r:.2f}" fill="{fill}"/>')

    def path(self, d, stroke, width=2.0):
        self.parts.append(f'<path d="{d}" stroke="{stroke}" stroke-width="{width:.2f}" fill="none"/>')

    def text(self, cx, cy, content, font_size, anchor="middle", rotate=None,
             fill="#000000"):
        """Text centered on (cx, cy) under the fixed-metrics model: the
        baseline sits 0.35 * font_size below the box center."""
        y = cy + 0.35 * font_size
        attrs = (f'x="{cx:.2f}" y="{y:.2f}" font-size="{font_size:.2f}" '
                 f'font-family="Helvetica, Arial, sans-serif" text-anchor="{anchor}" '
                 f'fill="{fill}"')
        if rotate is not None:
            attrs += f' transform="rotate({rotate:.0f} {cx:.2f} {cy:.2f})"'
        self.parts.append(f"<text {attrs}>{self.esc(content)}</text>")

    def marker(self, shape: str, cx, cy, r, color):
        if shape == "circle":
            self.circle(cx, cy, r, color)
        elif shape == "square":
            self.rect(cx - r, cy - r, 2 * r, 2 * r, fill=color)
        elif shape == "triangle-up":
            self.polygon([(cx, cy - r), (cx - 0.87 * r, cy + 0.5 * r),
                          (cx + 0.87 * r, cy + 0.5 * r)], color)
        elif shape == "triangle-down":
            self.polygon([(cx, cy + r), (cx - 0.87 * r, cy - 0.5 * r),
                          (cx + 0.87 * r, cy - 0.5 * r)], color)
        elif shape == "diamond":
            self.polygon([(cx, cy - r), (cx + r, cy), (cx, cy + r), (cx - r, cy)], color)
        elif shape == "plus":
            self.path(f"M {cx - r:.2f} {cy:.2f} H {cx + r:.2f} "
                      f"M {cx:.2f} {cy - r:.2f} V {cy + r:.2f}", color)
        elif shape == "cross":
            d = 0.71 * r
            self.path(f"M {cx - d:.2f} {cy - d:.2f} L {cx + d:.2f} {cy + d:.2f} "
                      f"M {cx - d:.2f} {cy + d:.2f} L {cx + d:.2f} {cy - d:.2f}", color)
        elif shape == "star":
            pts = []
            for i in range(10):
                rr = r if i % 2 == 0 else 0.4 * r
                a = -math.pi / 2 + i * math.pi / 5
                pts.append((cx + rr * math.cos(a), cy + rr * math.sin(a)))
            self.polygon(pts, color)
        elif shape == "pentagon":
            pts = []
            for i in range(5):
                a = -math.pi / 2 + i * 2 * math.pi / 5
                pts.append((cx + r * math.cos(a), cy + r * math.sin(a)))
            self.polygon(pts, color)
        elif shape == "hexagon":
            pts = []
            for i in range(6):
                a = i * math.pi / 3
                pts.append((cx + r * math.cos(a), cy + r * math.sin(a)))
            self.polygon(pts, color)
        else:  # pragma: no cover
            raise ParameterError(f"marker_shape: unknown shape {shape!r}")

    def finish(self) -> bytes:
        self.parts.append("</svg>")
        return "\n".join(self.parts).encode("utf-8")


def _fit_font(text: str, font_size: float, max_w: float) -> float:
    """Shrink the font until the fixed-metrics width fits max_w."""
    if not text:
        return font_size
    w = 0.6 * font_size * len(text)
    if w <= max_w:
        return font_size
    return max_w / (0.6 * len(text))


def _series_trend(s: DataSeries) -> Optional[str]:
    if not s.temporal or len(s.y_values) < 3:
        return None
    return classify_trend(s.y_values).value


def _chart_category(series: List[DataSeries]) -> str:
    if not series[0].temporal:
        return "categorical"
    trends = [_series_trend(s) for s in series]
    flat = {TrendClass.RANDOM_FLUCTUATION.value, TrendClass.PLATEAU.value, None}
    if any(t not in flat for t in trends):
        return "temporal-trend"
    return "temporal-random"


def render(spec: ChartSpec) -> Tuple[bytes, ChartMeta]:
    """Render a chart spec to (svg_bytes, meta).  Pure and deterministic."""
    kind = spec.kind
    series = spec.series
    n_ser = len(series)
    k = len(series[0].x_labels)
    values = [v for s in series for v in s.y_values]
    if kind.is_bar and min(values) < 0:
        raise NegativeBarValueError(
            f"bar charts draw from zero; got negative value {min(values)}"
        )

    # value-axis ticks; bars anchor the axis at zero
    v_lo, v_hi = min(values), max(values)
    if kind.is_bar:
        v_lo = 0.0
    if v_lo == v_hi:
        v_lo, v_hi = v_lo - 1.0, v_hi + 1.0  # degenerate range padded
    vticks = nice_ticks(v_lo, v_hi, 5)
    vtick_labels = [_fmt_tick(t) for t in vticks]

    horizontal = kind is ChartKind.HORIZONTAL_BAR
    cat_labels = series[0].x_labels

    # --- layout ---------------------------------------------------------
    title_fs = _fit_font(spec.title, TITLE_FS, CANVAS_W - 2 * MARGIN)
    title_w, title_h = estimate_text_bbox(spec.title, title_fs)
    title_bbox = _clamp_box((CANVAS_W - title_w) / 2, MARGIN, max(title_w, 1.0), title_h)

    ylab_fs = _fit_font(spec.y_label, AXIS_FS, CANVAS_H * 0.6)
    xlab_fs = _fit_font(spec.x_label, AXIS_FS, CANVAS_W * 0.7)
    ylab_w, ylab_h = estimate_text_bbox(spec.y_label, ylab_fs)
    xlab_w, xlab_h = estimate_text_bbox(spec.x_label, xlab_fs)

    if horizontal:
        left_tick_texts = cat_labels
    else:
        left_tick_texts = vtick_labels
    max_left_w = max(estimate_text_bbox(t, TICK_FS)[0] for t in left_tick_texts)
    tick_h = 1.2 * TICK_FS

    plot_left = MARGIN + ylab_h + LABEL_GAP + max_left_w + TICK_GAP + TICK_LEN
    plot_right = CANVAS_W - RIGHT_PAD
    plot_top = MARGIN + title_h + TITLE_GAP
    plot_bottom = CANVAS_H - (MARGIN + xlab_h + TICK_GAP + tick_h + TICK_GAP + TICK_LEN)
    plot = BBox(_r2(plot_left), _r2(plot_top),
                _r2(plot_right - plot_left), _r2(plot_bottom - plot_top))

    if horizontal:
        axis = AxisTransform("x", vticks[0], vticks[-1], _r2(plot_left), _r2(plot_right))
        slot = (plot_bottom - plot_top) / k
        cat_center = [plot_top + (i + 0.5) * slot for i in range(k)]
    else:
        axis = AxisTransform("y", vticks[0], vticks[-1], _r2(plot_bottom), _r2(plot_top))
        slot = (plot_right - plot_left) / k
        cat_center = [plot_left + (i + 0.5) * slot for i in range(k)]

    # --- meta: ticks ------------------------------------------------------
    cat_ticks: List[TickMark] = []
    years = _parse_years(cat_labels) if series[0].temporal else None
    for i, lab in enumerate(cat_labels):
        tw, th = estimate_text_bbox(lab, TICK_FS)
        tw = max(tw, 1.0)
        if horizontal:
            bb = _clamp_box(plot_left - TICK_LEN - TICK_GAP - tw,
                            cat_center[i] - th / 2, tw, th)
        else:
            bb = _clamp_box(cat_center[i] - tw / 2,
                            plot_bottom + TICK_LEN + TICK_GAP, tw, th)
        val = float(years[i]) if years else None
        cat_ticks.append(TickMark(lab, bb, val))

    val_ticks: List[TickMark] = []
    for t, lab in zip(vticks, vtick_labels):
        tw, th = estimate_text_bbox(lab, TICK_FS)
        tw = max(tw, 1.0)
        c = axis.to_canvas(t)
        if horizontal:
            bb = _clamp_box(c - tw / 2, plot_bottom + TICK_LEN + TICK_GAP, tw, th)
        else:
            bb = _clamp_box(plot_left - TICK_LEN - TICK_GAP - tw, c - th / 2, tw, th)
        val_ticks.append(TickMark(lab, bb, t))

    x_ticks = val_ticks if horizontal else cat_ticks
    y_ticks = cat_ticks if horizontal else val_ticks

    # --- meta: points -----------------------------------------------------
    series_meta: List[SeriesMeta] = []
    point_canvas: List[Tuple[float, float]] = []
    for si, s in enumerate(series):
        pts: List[PointRecord] = []
        for i, v in enumerate(s.y_values):
            vc = axis.to_canvas(v)
            if horizontal:
                # grouped rows for two series
                cy = cat_center[i] + (si - (n_ser - 1) / 2) * slot * 0.5 * 0.8
                pr = PointRecord(cat_labels[i], i, v, _r2(vc), _r2(cy))
            else:
                cx = cat_center[i] + (si - (n_ser - 1) / 2) * slot * 0.5 * 0.8 \
                    if kind.is_bar else cat_center[i]
                pr = PointRecord(cat_labels[i], i, v, _r2(cx), _r2(vc))
            pts.append(pr)
            point_canvas.append((pr.x_canvas, pr.y_canvas))
        series_meta.append(SeriesMeta(s.series_name, _series_trend(s), pts))

    # --- legend -----------------------------------------------------------
    swatch_w, swatch_h = 16.0, 10.0
    name_ws = [estimate_text_bbox(s.series_name, LEGEND_FS)[0] for s in series]
    row_h = 16.0
    leg_w = 6 + swatch_w + 4 + max(name_ws) + 6
    leg_h = 5 + row_h * n_ser + 5
    corners = [spec.style.legend_position] + [
        c for c in LEGEND_POSITIONS if c != spec.style.legend_position
    ]

    def corner_box(corner: str) -> Tuple[float, float]:
        lx = plot_left + LEGEND_INSET if "left" in corner else plot_right - LEGEND_INSET - leg_w
        ly = plot_top + LEGEND_INSET if "top" in corner else plot_bottom - LEGEND_INSET - leg_h
        return lx, ly

    def overlap_count(lx: float, ly: float) -> int:
        return sum(1 for (px, py) in point_canvas
                   if lx <= px <= lx + leg_w and ly <= py <= ly + leg_h)

    chosen = corners[0]
    best_overlap = None
    for c in corners:
        ov = overlap_count(*corner_box(c))
        if ov == 0:
            chosen = c
            best_overlap = 0
            break
        if best_overlap is None or ov < best_overlap:
            chosen, best_overlap = c, ov
    leg_x, leg_y = corner_box(chosen)
    legend_bbox = _clamp_box(leg_x, leg_y, leg_w, leg_h)

    legend_entries: List[LegendEntry] = []
    for si, s in enumerate(series):
        row_y = legend_bbox.y + 5 + si * row_h
        marker_bbox = BBox(_r2(legend_bbox.x + 6), _r2(row_y + (row_h - swatch_h) / 2),
                           swatch_w, swatch_h)
        nw, nh = estimate_text_bbox(s.series_name, LEGEND_FS)
        name_bbox = BBox(_r2(legend_bbox.x + 6 + swatch_w + 4),
                         _r2(row_y + (row_h - nh) / 2), _r2(max(nw, 1.0)), _r2(nh))
        legend_entries.append(LegendEntry(s.series_name, name_bbox, marker_bbox))

    # --- draw -------------------------------------------------------------
    svg = _Svg()
    svg.rect(0, 0, CANVAS_W, CANVAS_H, fill="#FFFFFF")
    svg.rect(plot.x, plot.y, plot.w, plot.h, fill="none", stroke="#CCCCCC")
    for t in vticks:
        c = axis.to_canvas(t)
        if horizontal:
            svg.line(c, plot_top, c, plot_bottom, stroke="#E6E6E6")
        else:
            svg.line(plot_left, c, plot_right, c, stroke="#E6E6E6")

    colors = [COLOR_PALETTE[ci][1] for ci in spec.style.colors]
    dash = _DASH_PATTERNS[spec.style.line_style]
    marker_name = MARKER_SHAPES[spec.style.marker_shape]
    zero_c = axis.to_canvas(max(vticks[0], 0.0)) if kind.is_bar else None

    for si, sm in enumerate(series_meta):
        color = colors[si]
        if kind is ChartKind.LINE:
            svg.polyline([(p.x_canvas, p.y_canvas) for p in sm.points], color, dash=dash)
            for p in sm.points:
                svg.circle(p.x_canvas, p.y_canvas, 3.0, color)
        elif kind is ChartKind.SCATTER:
            for p in sm.points:
                svg.marker(marker_name, p.x_canvas, p.y_canvas, 4.5, color)
        elif kind is ChartKind.VERTICAL_BAR:
            bar_w = slot * spec.style.bar_thickness / n_ser
            for p in sm.points:
                top = min(p.y_canvas, zero_c)
                svg.rect(p.x_canvas - bar_w / 2, top, bar_w, abs(zero_c - p.y_canvas),
                         fill=color)
        else:  # horizontal bar
            bar_h = slot * spec.style.bar_thickness / n_ser
            for p in sm.points:
                left = min(p.x_canvas, zero_c)
                svg.rect(left, p.y_canvas - bar_h / 2, abs(p.x_canvas - zero_c), bar_h,
                         fill=color)

    # axes and ticks on top of data
    svg.line(plot_left, plot_bottom, plot_right, plot_bottom, width=1.5)
    svg.line(plot_left, plot_top, plot_left, plot_bottom, width=1.5)
    for i, tm in enumerate(cat_ticks):
        if horizontal:
            svg.line(plot_left - TICK_LEN, cat_center[i], plot_left, cat_center[i])
        else:
            svg.line(cat_center[i], plot_bottom, cat_center[i], plot_bottom + TICK_LEN)
        svg.text(tm.bbox.x + tm.bbox.w / 2, tm.bbox.y + tm.bbox.h / 2, tm.label, TICK_FS)
    for tm in val_ticks:
        c = axis.to_canvas(tm.value)
        if horizontal:
            svg.line(c, plot_bottom, c, plot_bottom + TICK_LEN)
        else:
            svg.line(plot_left - TICK_LEN, c, plot_left, c)
        svg.text(tm.bbox.x + tm.bbox.w / 2, tm.bbox.y + tm.bbox.h / 2, tm.label, TICK_FS)

    svg.text(title_bbox.x + title_bbox.w / 2, title_bbox.y + title_bbox.h / 2,
             spec.title, title_fs)
    xlab_bbox = _clamp_box(plot_left + (plot_right - plot_left - xlab_w) / 2,
                           CANVAS_H - MARGIN - xlab_h, max(xlab_w, 1.0), xlab_h)
    svg.text(xlab_bbox.x + xlab_bbox.w / 2, xlab_bbox.y + xlab_bbox.h / 2,
             spec.x_label, xlab_fs)
    # rotated y label: box dimensions swap
    ylab_bbox = _clamp_box(MARGIN, plot_top + (plot_bottom - plot_top - ylab_w) / 2,
                           ylab_h, max(ylab_w, 1.0))
    svg.text(ylab_bbox.x + ylab_bbox.w / 2, ylab_bbox.y + ylab_bbox.h / 2,
             spec.y_label, ylab_fs, rotate=-90)

    svg.rect(legend_bbox.x, legend_bbox.y, legend_bbox.w, legend_bbox.h,
             fill="#FFFFFF", stroke="#999999")
    for si, entry in enumerate(legend_entries):
        color = colors[si]
        mb = entry.marker_bbox
        mcx, mcy = mb.x + mb.w / 2, mb.y + mb.h / 2
        if kind is ChartKind.LINE:
            svg.line(mb.x, mcy, mb.x + mb.w, mcy, stroke=color, width=2.0, dash=dash)
            svg.circle(mcx, mcy, 2.5, color)
        elif kind is ChartKind.SCATTER:
            svg.marker(marker_name, mcx, mcy, 4.0, color)
        else:
            svg.rect(mb.x + 2, mb.y + 1, mb.w - 4, mb.h - 2, fill=color)
        svg.text(entry.name_bbox.x + entry.name_bbox.w / 2,
                 entry.name_bbox.y + entry.name_bbox.h / 2,
                 entry.name, LEGEND_FS, anchor="middle")

    meta = ChartMeta(
        image_index=spec.image_index,
        chart_kind=kind.value,
        category=_chart_category(series),
        title=LabeledText(spec.title, title_bbox),
        x_label=LabeledText(spec.x_label, xlab_bbox),
        y_label=LabeledText(spec.y_label, ylab_bbox),
        y_unit=series[0].y_unit,
        x_ticks=x_ticks,
        y_ticks=y_ticks,
        legend_bbox=legend_bbox,
        legend_entries=legend_entries,
        series=series_meta,
        plot_area=plot,
        value_axis=axis,
    )
    return svg.finish(), meta
