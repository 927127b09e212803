"""Slotted sentence templates annotated with rhetorical moves.

A template is one sentence with `{slot}` markers plus applicability
conditions: which rhetorical move it serves (M1 overview, M2 chart
configuration, M3 interpretation, M3_1 numeric support, M4 evaluative
comment, M5 conclusion), which chart category it suits, which trend
classes it may describe, and how many series it expects.

Banks load from a tab-separated file, one record per line; the shipped
seed bank lives in the package's data directory.  Loading validates slot
vocabulary, move tags, and coverage of every (move, category, trend,
arity) cell the description planner can request.
"""

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .trend import TrendClass

MOVES = ("M1", "M2", "M3", "M3_1", "M4", "M5")
OBLIGATORY_MOVES = ("M1", "M3", "M5")
CATEGORIES = ("temporal-trend", "temporal-random", "categorical")

SLOT_VOCABULARY = frozenset({
    "title", "chart_kind_phrase", "y_label", "x_label", "unit",
    "series_name", "series_name_2", "x_first", "x_last", "x_at_max",
    "x_at_min", "y_first", "y_last", "y_max", "y_min", "y_mean", "delta",
    "trend_phrase", "comparison_phrase", "n_categories", "entity_list",
})

BANK_HEADER = "# template-bank v1"

_SLOT_RE = re.compile(r"\{([A-Za-z0-9_]+)\}")

_DIRECTIONAL = tuple(
    c.value for c in TrendClass
    if c not in (TrendClass.RANDOM_FLUCTUATION, TrendClass.PLATEAU)
)
_FLAT = (TrendClass.RANDOM_FLUCTUATION.value, TrendClass.PLATEAU.value)

# Every (category, trend, arity) combination the planner can ask for.
# temporal-trend charts include flat trends: a two-series chart is in that
# category as soon as one series is directional, and a sentence may focus
# on the other one.
REACHABLE_CELLS: Tuple[Tuple[str, Optional[str], int], ...] = tuple(
    (category, trend, arity)
    for category, trends in (
        ("temporal-trend", _DIRECTIONAL + _FLAT),
        ("temporal-random", _FLAT),
        ("categorical", (None,)),
    )
    for trend in trends
    for arity in (1, 2)
)


class BankFormatError(ValueError):
    """Malformed bank file (field counts, enums, duplicate ids)."""


class UnknownSlotError(BankFormatError):
    """Template text references a slot outside the vocabulary."""


class UnknownMoveError(BankFormatError):
    """Template declares a move tag outside M1..M5."""


class CoverageError(ValueError):
    """Bank leaves some reachable (move, category, trend, arity) cell empty."""

    def __init__(self, holes: Sequence[Tuple[str, str, Optional[str], int]]):
        self.holes = list(holes)
        cells = "; ".join(
            f"({m}, {c}, {t or 'any'}, arity={a})" for m, c, t, a in self.holes[:8]
        )
        more = "" if len(self.holes) <= 8 else f" and {len(self.holes) - 8} more"
        super().__init__(f"bank has {len(self.holes)} coverage holes: {cells}{more}")


class EmptyQueryError(LookupError):
    """A query on a validated bank returned nothing."""


@dataclass(frozen=True)
class Template:
    id: str
    move: str
    category: str  # one of CATEGORIES or "any"
    trend_applicability: FrozenSet[str]  # empty set means any
    series_arity: int  # 1, 2, or 0 meaning any
    origin: str  # human | paraphrase
    text: str

    def slots(self) -> List[str]:
        return _SLOT_RE.findall(self.text)

    def matches(self, move: str, category: str, trend: Optional[str],
                arity: int) -> bool:
        if self.move != move:
            return False
        if self.category != "any" and self.category != category:
            return False
        if self.trend_applicability:
            if trend is None or trend not in self.trend_applicability:
                return False
        if self.series_arity and self.series_arity != arity:
            return False
        return True

    def wildcard_count(self) -> int:
        return ((self.category == "any")
                + (not self.trend_applicability)
                + (self.series_arity == 0))


@dataclass
class TemplateBank:
    templates: Tuple[Template, ...]

    def census(self) -> Dict[str, Dict[str, int]]:
        """Template counts by move and by origin."""
        by_move: Dict[str, int] = {m: 0 for m in MOVES}
        by_origin: Dict[str, int] = {}
        for t in self.templates:
            by_move[t.move] += 1
            by_origin[t.origin] = by_origin.get(t.origin, 0) + 1
        return {"by_move": by_move, "by_origin": by_origin}


def _validate_template(t: Template) -> None:
    if t.move not in MOVES:
        raise UnknownMoveError(f"template {t.id}: unknown move {t.move!r}")
    if t.category not in CATEGORIES + ("any",):
        raise BankFormatError(f"template {t.id}: unknown category {t.category!r}")
    if t.series_arity not in (0, 1, 2):
        raise BankFormatError(f"template {t.id}: arity must be 1, 2, or any")
    if t.origin not in ("human", "paraphrase"):
        raise BankFormatError(f"template {t.id}: unknown origin {t.origin!r}")
    for cls in t.trend_applicability:
        try:
            TrendClass(cls)
        except ValueError:
            raise BankFormatError(
                f"template {t.id}: unknown trend class {cls!r}"
            ) from None
    for slot in t.slots():
        if slot not in SLOT_VOCABULARY:
            raise UnknownSlotError(f"template {t.id}: unknown slot {{{slot}}}")
    stripped = _SLOT_RE.sub("", t.text)
    if "{" in stripped or "}" in stripped:
        raise BankFormatError(f"template {t.id}: stray brace in text")
    if t.move in ("M3", "M4") and "{trend_phrase}" in t.text \
            and not t.trend_applicability:
        raise BankFormatError(
            f"template {t.id}: {t.move} mentions a trend phrase but declares "
            f"trend applicability 'any'"
        )


def _validate_coverage(bank: TemplateBank) -> None:
    holes = []
    for category, trend, arity in REACHABLE_CELLS:
        for move in MOVES:
            if not any(t.matches(move, category, trend, arity)
                       for t in bank.templates):
                holes.append((move, category, trend, arity))
    if holes:
        raise CoverageError(holes)


def parse_bank(text: str, source: str = "<bank>") -> TemplateBank:
    """Parse and validate bank records from tab-separated text."""
    templates: List[Template] = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 7:
            raise BankFormatError(
                f"{source}:{lineno}: expected 7 tab-separated fields, "
                f"got {len(fields)}"
            )
        tid, move, category, trend_s, arity_s, origin, body = fields
        if tid in seen:
            raise BankFormatError(f"{source}:{lineno}: duplicate template id {tid!r}")
        seen.add(tid)
        if trend_s == "any":
            trend: FrozenSet[str] = frozenset()
        else:
            trend = frozenset(p.strip() for p in trend_s.split(",") if p.strip())
            if not trend:
                raise BankFormatError(f"{source}:{lineno}: empty trend list")
        if arity_s == "any":
            arity = 0
        elif arity_s in ("1", "2"):
            arity = int(arity_s)
        else:
            raise BankFormatError(f"{source}:{lineno}: bad arity {arity_s!r}")
        t = Template(tid, move, category, trend, arity, origin, body)
        try:
            _validate_template(t)
        except BankFormatError as exc:
            raise type(exc)(f"{source}:{lineno}: {exc}") from None
        templates.append(t)
    if not templates:
        raise BankFormatError(f"{source}: no templates found")
    bank = TemplateBank(tuple(templates))
    _validate_coverage(bank)
    return bank


def load_bank(path) -> TemplateBank:
    """Load and validate a bank file."""
    p = Path(path)
    return parse_bank(p.read_text(encoding="utf-8"), source=str(p))


def load_default_bank() -> TemplateBank:
    """Load the seed bank shipped inside the package."""
    text = resources.files("chartscribe").joinpath("data/seed_bank.tsv") \
        .read_text(encoding="utf-8")
    return parse_bank(text, source="seed_bank.tsv")


def serialize_bank(bank: TemplateBank) -> str:
    """Bank back to its file format, records in bank order."""
    lines = [BANK_HEADER,
             "# fields: id, move, category, trend, arity, origin, text"]
    for t in bank.templates:
        trend_s = "any" if not t.trend_applicability \
            else ",".join(sorted(t.trend_applicability))
        arity_s = "any" if t.series_arity == 0 else str(t.series_arity)
        lines.append("\t".join(
            (t.id, t.move, t.category, trend_s, arity_s, t.origin, t.text)
        ))
    return "\n".join(lines) + "\n"


def query(bank: TemplateBank, move: str, category: str,
          trend: Optional[str], arity: int) -> List[Template]:
    """Templates matching the request; exact matches before `any` matches,
    ties broken by template id.  Never empty on a validated bank."""
    if move not in MOVES:
        raise UnknownMoveError(f"unknown move {move!r}")
    hits = [t for t in bank.templates if t.matches(move, category, trend, arity)]
    hits.sort(key=lambda t: (t.wildcard_count(), t.id))
    if not hits:
        raise EmptyQueryError(
            f"no template for (move={move}, category={category}, "
            f"trend={trend}, arity={arity})"
        )
    return hits
