"""Analytical text generation for rendered charts.

The pipeline is: extract a fact table from chart metadata, plan an ordered
sequence of rhetorical moves, then realize one template per move with every
slot filled from the fact table.  All randomness flows through a single Rng,
so a (chart, seed) pair always yields byte-identical text.

Move tags and their ordering contract:

  M1    overview of what the chart shows          (obligatory, opens)
  M2    chart configuration remark                (optional, before any M3)
  M3    trend or comparison interpretation        (obligatory, >= 1)
  M3_1  numeric support for the preceding M3      (follows M3 or M3_1)
  M4    evaluative comment                        (optional, after an M3 block)
  M5    conclusion                                (obligatory, closes)
"""

import json
import math
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .catalog import DataSeries
from .chartgen import ChartMeta
from .evalmetrics import tokenize
from .rng import Rng, derive_seed, TAG_DESCRIPTION, TAG_BASELINE
from .templatebank import Template, TemplateBank, query

__all__ = [
    "PlanParams", "DEFAULT_PLAN_PARAMS",
    "SeriesFacts", "CrossFacts", "ChartFacts", "extract_facts",
    "format_number", "MovePlan", "plan_moves", "realize",
    "Sentence", "Description", "generate_description",
    "generate_description_set", "baseline_generate", "check_move_order",
    "fact_digit_tokens", "hallucination_check",
    "RealizationError", "FactsConsistencyError",
    "TREND_PHRASES", "COMPARISON_PHRASES", "QUALIFIERS", "KIND_PHRASES",
]


class RealizationError(ValueError):
    """A template slot could not be filled from the available facts."""

    def __init__(self, slot: str, reason: str):
        super().__init__(f"slot {{{slot}}}: {reason}")
        self.slot = slot


class FactsConsistencyError(ValueError):
    """Chart metadata and the supplied raw series disagree."""


KIND_PHRASES = {
    "scatter": "scatter chart",
    "line": "line chart",
    "vertical-bar": "vertical bar chart",
    "horizontal-bar": "horizontal bar chart",
}

QUALIFIERS = ("about", "approximately", "nearly", "around")

# One phrase set per trend class.  Every phrase is unique across classes so
# a description can never be read as claiming a different trend than the
# classifier assigned.
TREND_PHRASES: Dict[str, Tuple[str, ...]] = {
    "linear-increase": (
        "a steady linear climb",
        "a consistent upward march",
        "a near-linear rise",
    ),
    "linear-decrease": (
        "a steady linear decline",
        "a consistent downward drift",
        "a near-linear fall",
    ),
    "convex-increase": (
        "an accelerating climb",
        "growth that steepens over time",
        "an ever-faster rise",
    ),
    "convex-decrease": (
        "a sharp initial drop that levels off",
        "a fall that flattens toward the end",
        "an easing decline",
    ),
    "concave-increase": (
        "a rapid early rise that levels off",
        "gains that taper toward the end",
        "a climb that flattens out",
    ),
    "concave-decrease": (
        "a slide that keeps steepening",
        "losses that accelerate toward the end",
        "an ever-faster drop",
    ),
    "random-fluctuation": (
        "an erratic up-and-down pattern",
        "volatile swings with no clear direction",
        "irregular fluctuations",
    ),
    "plateau": (
        "an essentially flat profile",
        "a stable plateau",
        "little to no movement",
    ),
}

# Keyed by the dominance relation as seen from the sentence's focal series.
COMPARISON_PHRASES: Dict[str, Tuple[str, ...]] = {
    "above": ("consistently higher than", "clearly ahead of"),
    "below": ("consistently lower than", "clearly behind"),
    "tie": ("exactly level with",),
    "mixed": ("trading places with", "crossing paths with"),
}

_SLOT_RE = re.compile(r"\{([A-Za-z0-9_]+)\}")


# ---------------------------------------------------------------------------
# fact extraction


@dataclass(frozen=True)
class SeriesFacts:
    """Per-series values a template may reference."""

    name: str
    n_points: int
    x_first: str
    x_last: str
    x_at_max: str  # label at the maximum value; ties keep the earliest
    x_at_min: str
    y_first: float
    y_last: float
    y_max: float
    y_min: float
    y_mean: float
    delta: float  # absolute change |y_last - y_first|
    trend_class: Optional[str]


@dataclass(frozen=True)
class CrossFacts:
    """Two-series relations; dominance is from the first series' viewpoint."""

    dominance: str  # first | second | tie | mixed
    gap_first: float
    gap_last: float
    crossings: Tuple[Tuple[str, str], ...]


@dataclass(frozen=True)
class ChartFacts:
    image_index: int
    category: str
    kind_phrase: str
    title: str
    x_label: str
    y_label: str
    unit: str
    n_categories: int
    entity_list: Tuple[str, ...]
    series: Tuple[SeriesFacts, ...]
    cross: Optional[CrossFacts]


def _check_consistency(meta: ChartMeta, series: Sequence[DataSeries]) -> None:
    if len(series) != len(meta.series):
        raise FactsConsistencyError(
            f"series: metadata has {len(meta.series)} series, got {len(series)}"
        )
    for i, (sm, ds) in enumerate(zip(meta.series, series)):
        if sm.name != ds.series_name:
            raise FactsConsistencyError(
                f"series[{i}]: name {ds.series_name!r} != metadata {sm.name!r}"
            )
        labels = [p.x_label for p in sm.points]
        values = [p.value for p in sm.points]
        if labels != list(ds.x_labels):
            raise FactsConsistencyError(f"series[{i}]: x labels disagree")
        if values != list(ds.y_values):
            raise FactsConsistencyError(f"series[{i}]: y values disagree")


def extract_facts(meta: ChartMeta,
                  series: Optional[Sequence[DataSeries]] = None) -> ChartFacts:
    """Build the fact table for one chart.

    Works from metadata alone; passing the raw series additionally verifies
    that metadata and data agree.  Axis labels are normalized so y_label is
    always the value axis, whatever the chart orientation.
    """
    if series is not None:
        _check_consistency(meta, series)
    if meta.value_axis.orientation == "x":
        value_label, cat_label = meta.x_label.text, meta.y_label.text
    else:
        value_label, cat_label = meta.y_label.text, meta.x_label.text

    per_series: List[SeriesFacts] = []
    for sm in meta.series:
        values = [p.value for p in sm.points]
        labels = [p.x_label for p in sm.points]
        n = len(values)
        imax = max(range(n), key=values.__getitem__)
        imin = min(range(n), key=values.__getitem__)
        per_series.append(SeriesFacts(
            name=sm.name,
            n_points=n,
            x_first=labels[0],
            x_last=labels[-1],
            x_at_max=labels[imax],
            x_at_min=labels[imin],
            y_first=values[0],
            y_last=values[-1],
            y_max=values[imax],
            y_min=values[imin],
            y_mean=sum(values) / n,
            delta=abs(values[-1] - values[0]),
            trend_class=sm.trend_class,
        ))

    cross: Optional[CrossFacts] = None
    if len(meta.series) == 2:
        a = [p.value for p in meta.series[0].points]
        b = [p.value for p in meta.series[1].points]
        labels = [p.x_label for p in meta.series[0].points]
        if len(a) == len(b):
            diffs = [x - y for x, y in zip(a, b)]
            if all(d == 0 for d in diffs):
                dominance = "tie"
            elif all(d >= 0 for d in diffs):
                dominance = "first"
            elif all(d <= 0 for d in diffs):
                dominance = "second"
            else:
                dominance = "mixed"
            crossings = tuple(
                (labels[i], labels[i + 1])
                for i in range(len(diffs) - 1)
                if diffs[i] * diffs[i + 1] < 0
            )
            cross = CrossFacts(dominance, abs(diffs[0]), abs(diffs[-1]), crossings)

    first = meta.series[0]
    return ChartFacts(
        image_index=meta.image_index,
        category=meta.category,
        kind_phrase=KIND_PHRASES[meta.chart_kind],
        title=meta.title.text,
        x_label=cat_label,
        y_label=value_label,
        unit=meta.y_unit,
        n_categories=len(first.points),
        entity_list=tuple(p.x_label for p in first.points),
        series=tuple(per_series),
        cross=cross,
    )


# ---------------------------------------------------------------------------
# number formatting


def _round_2sf(v: float) -> float:
    if v == 0:
        return 0.0
    return round(v, 1 - int(math.floor(math.log10(abs(v)))))


def _trim(v: float) -> str:
    if float(v).is_integer():
        return str(int(v))
    return f"{v:.12f}".rstrip("0").rstrip(".")


_SCALES = (
    (1e15, "quadrillion"),
    (1e12, "trillion"),
    (1e9, "billion"),
    (1e6, "million"),
)


def _plain_number(v: float) -> str:
    """Render an already-rounded value: large magnitudes get a scale word,
    five-digit integers get thousands separators, the rest print bare."""
    a = abs(v)
    for scale, word in _SCALES:
        if a >= scale:
            return f"{_trim(v / scale)} {word}"
    if a >= 1e4 and float(v).is_integer():
        return f"{int(v):,}"
    return _trim(v)


def format_number(value: float, rng: Rng) -> str:
    """Round to two significant figures; when rounding moved the value,
    prepend a sampled approximation qualifier so the text never overstates
    its own precision."""
    if not math.isfinite(value):
        raise ValueError(f"value: expected a finite number, got {value!r}")
    rounded = _round_2sf(float(value))
    text = _plain_number(rounded)
    if abs(rounded - value) > 1e-12 * max(1.0, abs(value)):
        text = f"{rng.choice(QUALIFIERS)} {text}"
    return text


# ---------------------------------------------------------------------------
# move planning


@dataclass(frozen=True)
class PlanParams:
    """Tunable knobs of the move planner.

    The defaults reproduce the standard behavior: optional moves appear
    with probability one half and both repeat counts are uniform on {1, 2}.
    """

    p_move2: float = 0.5
    p_move4: float = 0.5
    m3_min: int = 1
    m3_max: int = 2
    m31_min: int = 1
    m31_max: int = 2

    def __post_init__(self):
        for name in ("p_move2", "p_move4"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name}: probability {p} outside [0, 1]")
        for lo_name, hi_name in (("m3_min", "m3_max"), ("m31_min", "m31_max")):
            lo, hi = getattr(self, lo_name), getattr(self, hi_name)
            if not 1 <= lo <= hi:
                raise ValueError(
                    f"{lo_name}/{hi_name}: need 1 <= {lo} <= {hi}")


DEFAULT_PLAN_PARAMS = PlanParams()


@dataclass(frozen=True)
class MovePlan:
    """Ordered move tags plus, per move, the series the sentence focuses on."""

    moves: Tuple[str, ...]
    targets: Tuple[int, ...]

    def __post_init__(self):
        if len(self.moves) != len(self.targets):
            raise ValueError(
                f"targets: {len(self.targets)} targets for {len(self.moves)} moves"
            )

    def __len__(self) -> int:
        return len(self.moves)


def plan_moves(category: str, rng: Rng, n_series: int = 1,
               params: PlanParams = DEFAULT_PLAN_PARAMS) -> MovePlan:
    """Draw a move sequence.

    Fixed draw order: the M2 coin, the M3 block counts (one per series for
    temporal charts, a single total for categorical), one M3_1 count per
    block, the M4 coin, and finally the M4 insertion point.  Temporal charts
    walk their series in order; categorical blocks alternate focus.
    """
    if category not in ("temporal-trend", "temporal-random", "categorical"):
        raise ValueError(f"category: unknown category {category!r}")
    if n_series not in (1, 2):
        raise ValueError(f"n_series: expected 1 or 2, got {n_series}")

    def draw_count(lo: int, hi: int) -> int:
        return lo + rng.randint(hi - lo + 1)

    moves: List[str] = ["M1"]
    targets: List[int] = [0]
    if rng.random() < params.p_move2:
        moves.append("M2")
        targets.append(0)

    block_focus: List[int] = []
    if category.startswith("temporal"):
        for s in range(n_series):
            for _ in range(draw_count(params.m3_min, params.m3_max)):
                block_focus.append(s)
    else:
        for b in range(draw_count(params.m3_min, params.m3_max)):
            block_focus.append(b % n_series)

    blocks: List[List[Tuple[str, int]]] = []
    for focus in block_focus:
        entry = [("M3", focus)]
        entry.extend(("M3_1", focus)
                     for _ in range(draw_count(params.m31_min, params.m31_max)))
        blocks.append(entry)

    m4_after = 0
    if rng.random() < params.p_move4:
        m4_after = 1 + rng.randint(len(blocks))

    for i, entry in enumerate(blocks, start=1):
        for move, focus in entry:
            moves.append(move)
            targets.append(focus)
        if m4_after == i:
            moves.append("M4")
            targets.append(entry[0][1])

    moves.append("M5")
    targets.append(0)
    return MovePlan(tuple(moves), tuple(targets))


# ---------------------------------------------------------------------------
# realization


def _oxford_join(items: Sequence[str]) -> str:
    if not items:
        return ""
    if len(items) == 1:
        return items[0]
    if len(items) == 2:
        return f"{items[0]} and {items[1]}"
    return ", ".join(items[:-1]) + f", and {items[-1]}"


def _comparison_phrase(facts: ChartFacts, series_index: int, rng: Rng) -> str:
    if facts.cross is None:
        raise RealizationError("comparison_phrase", "chart has a single series")
    dominance = facts.cross.dominance
    if dominance == "first":
        key = "above" if series_index == 0 else "below"
    elif dominance == "second":
        key = "below" if series_index == 0 else "above"
    else:
        key = dominance
    return rng.choice(COMPARISON_PHRASES[key])


def _slot_value(slot: str, facts: ChartFacts, series_index: int, rng: Rng) -> str:
    if not 0 <= series_index < len(facts.series):
        raise RealizationError(slot, f"series index {series_index} out of range")
    sf = facts.series[series_index]

    if slot == "title":
        return facts.title
    if slot == "chart_kind_phrase":
        return facts.kind_phrase
    if slot == "y_label":
        return facts.y_label
    if slot == "x_label":
        return facts.x_label
    if slot == "unit":
        return facts.unit
    if slot == "series_name":
        return sf.name
    if slot == "series_name_2":
        if len(facts.series) < 2:
            raise RealizationError(slot, "chart has a single series")
        return facts.series[1 - series_index].name
    if slot in ("x_first", "x_last", "x_at_max", "x_at_min"):
        return getattr(sf, slot)
    if slot in ("y_first", "y_last", "y_max", "y_min", "y_mean", "delta"):
        return format_number(getattr(sf, slot), rng)
    if slot == "trend_phrase":
        if sf.trend_class is None:
            raise RealizationError(slot, f"series {sf.name!r} has no trend class")
        return rng.choice(TREND_PHRASES[sf.trend_class])
    if slot == "comparison_phrase":
        return _comparison_phrase(facts, series_index, rng)
    if slot == "n_categories":
        return str(facts.n_categories)
    if slot == "entity_list":
        return _oxford_join(facts.entity_list)
    raise RealizationError(slot, "not a recognized slot")


def realize(template: Template, facts: ChartFacts, series_index: int,
            rng: Rng) -> str:
    """Fill every slot of a template; slots are filled left to right so the
    rng draw order is fixed."""
    def fill(m: "re.Match[str]") -> str:
        return _slot_value(m.group(1), facts, series_index, rng)

    text = _SLOT_RE.sub(fill, template.text)
    text = re.sub(r"\s+", " ", text).strip()
    text = text.replace(" %", "%")
    if text and text[0].islower():
        text = text[0].upper() + text[1:]
    return text


# ---------------------------------------------------------------------------
# descriptions


@dataclass(frozen=True)
class Sentence:
    move: str
    template_id: str
    text: str


@dataclass(frozen=True)
class Description:
    image_index: int
    variant_index: int
    sentences: Tuple[Sentence, ...]

    @property
    def text(self) -> str:
        return " ".join(s.text for s in self.sentences)

    @property
    def moves(self) -> Tuple[str, ...]:
        return tuple(s.move for s in self.sentences)

    def to_json_line(self) -> str:
        doc = {
            "image_index": self.image_index,
            "variant_index": self.variant_index,
            "sentences": [
                {"move": s.move, "template_id": s.template_id, "text": s.text}
                for s in self.sentences
            ],
            "text": self.text,
        }
        return json.dumps(doc, ensure_ascii=False)

    @classmethod
    def from_json_line(cls, line: str) -> "Description":
        doc = json.loads(line)
        return cls(
            image_index=doc["image_index"],
            variant_index=doc["variant_index"],
            sentences=tuple(
                Sentence(s["move"], s["template_id"], s["text"])
                for s in doc["sentences"]
            ),
        )


def generate_description(meta: ChartMeta,
                         series: Optional[Sequence[DataSeries]],
                         bank: TemplateBank,
                         variant_index: int,
                         rng: Rng,
                         params: PlanParams = DEFAULT_PLAN_PARAMS) -> Description:
    """One move-structured description for one chart.

    Per move the applicable templates are queried with the focal series'
    trend class; templates already used in this description are avoided
    until the pool runs dry.
    """
    facts = extract_facts(meta, series)
    plan = plan_moves(facts.category, rng, n_series=len(facts.series),
                      params=params)
    arity = len(facts.series)
    used: Set[str] = set()
    sentences: List[Sentence] = []
    for move, target in zip(plan.moves, plan.targets):
        trend = facts.series[target].trend_class
        hits = query(bank, move, facts.category, trend, arity)
        if move == "M1" and arity == 2:
            # the opening overview of a comparison chart must name both
            # series, so arity-exact templates win when available
            exact = [t for t in hits if t.series_arity == 2]
            hits = exact if exact else hits
        fresh = [t for t in hits if t.id not in used]
        pool = fresh if fresh else hits
        template = pool[rng.randint(len(pool))]
        used.add(template.id)
        sentences.append(Sentence(move, template.id,
                                  realize(template, facts, target, rng)))
    return Description(meta.image_index, variant_index, tuple(sentences))


def generate_description_set(meta: ChartMeta,
                             series: Optional[Sequence[DataSeries]],
                             bank: TemplateBank,
                             rng: Rng,
                             n_variants: int = 3,
                             params: PlanParams = DEFAULT_PLAN_PARAMS,
                             ) -> List[Description]:
    """Up to n_variants descriptions for one chart, deduplicated on exact
    text; at least one always survives."""
    if n_variants < 1:
        raise ValueError(f"n_variants: must be >= 1, got {n_variants}")
    base = rng.next_raw()
    out: List[Description] = []
    seen: Set[str] = set()
    for v in range(n_variants):
        sub = Rng(derive_seed(base, TAG_DESCRIPTION, v))
        desc = generate_description(meta, series, bank, v, sub, params=params)
        if desc.text not in seen:
            seen.add(desc.text)
            out.append(desc)
    return out


def baseline_generate(meta: ChartMeta,
                      series: Optional[Sequence[DataSeries]],
                      bank: TemplateBank,
                      rng: Rng) -> Description:
    """Unstructured control: sample templates with replacement from every
    move's applicable pool, ignoring move order entirely."""
    facts = extract_facts(meta, series)
    arity = len(facts.series)
    k = 4 + rng.randint(7)
    sentences: List[Sentence] = []
    for _ in range(k):
        target = rng.randint(arity)
        trend = facts.series[target].trend_class
        pool = [
            t for t in bank.templates
            if t.matches(t.move, facts.category, trend, arity)
        ]
        template = pool[rng.randint(len(pool))]
        sentences.append(Sentence(template.move, template.id,
                                  realize(template, facts, target, rng)))
    return Description(meta.image_index, 0, tuple(sentences))


# ---------------------------------------------------------------------------
# validity checks


_MOVE_RANK = {"M1": 0, "M2": 1, "M3": 2, "M3_1": 2, "M4": 2, "M5": 3}


def check_move_order(moves: Sequence[str]) -> List[str]:
    """Return every move-order violation; an empty list means valid."""
    violations: List[str] = []
    if not moves:
        return ["description has no sentences"]
    for m in moves:
        if m not in _MOVE_RANK:
            violations.append(f"unknown move tag {m!r}")
    if any(m not in _MOVE_RANK for m in moves):
        return violations
    if moves[0] != "M1":
        violations.append("does not open with an M1 overview")
    if "M1" in moves[1:]:
        violations.append("M1 appears after the opening position")
    if moves[-1] != "M5":
        violations.append("does not close with an M5 conclusion")
    if "M5" in moves[:-1]:
        violations.append("M5 appears before the final position")
    if "M3" not in moves:
        violations.append("contains no M3 interpretation")
    prev = -1
    for i, m in enumerate(moves):
        rank = _MOVE_RANK[m]
        if rank < prev:
            violations.append(f"{m} at position {i} follows a later-stage move")
        prev = max(prev, rank)
    for i, m in enumerate(moves):
        if m == "M3_1" and (i == 0 or moves[i - 1] not in ("M3", "M3_1")):
            violations.append(f"M3_1 at position {i} does not follow an M3")
    if "M4" in moves:
        first_m4 = moves.index("M4")
        if "M3" not in moves[:first_m4]:
            violations.append("M4 appears before any M3")
    return violations


def fact_digit_tokens(facts: ChartFacts) -> Set[str]:
    """Every digit-bearing token that a faithful description could contain."""
    allowed: Set[str] = set()

    def add(text: str) -> None:
        for tok in tokenize(text):
            if any(c.isdigit() for c in tok):
                allowed.add(tok)

    add(facts.title)
    add(facts.x_label)
    add(facts.y_label)
    add(facts.unit)
    add(str(facts.n_categories))
    for label in facts.entity_list:
        add(label)
    for sf in facts.series:
        add(sf.name)
        for label in (sf.x_first, sf.x_last, sf.x_at_max, sf.x_at_min):
            add(label)
        for v in (sf.y_first, sf.y_last, sf.y_max, sf.y_min, sf.y_mean, sf.delta):
            add(_plain_number(_round_2sf(v)))
    if facts.cross is not None:
        for v in (facts.cross.gap_first, facts.cross.gap_last):
            add(_plain_number(_round_2sf(v)))
    return allowed


def hallucination_check(text: str, facts: ChartFacts) -> List[str]:
    """Digit-bearing tokens in the text that match no value in the facts."""
    allowed = fact_digit_tokens(facts)
    return [
        tok for tok in tokenize(text)
        if any(c.isdigit() for c in tok) and tok not in allowed
    ]
