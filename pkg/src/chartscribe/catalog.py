"""Indicator/entity statistical data: file ingest, synthesis, sampling.

A catalog maps (indicator, entity, year) to a value, with per-indicator
value kinds constraining the range.  Catalogs come from a delimited file
pair (data + dictionary, both with versioned headers) or from the
deterministic synthesizer.  Series sampled from a catalog feed the chart
builder either raw or perturbed toward a requested trend class.
"""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from .rng import Rng, derive_seed
from .trend import (
    ParameterError,
    TrendClass,
    TrendSpec,
    synth_trend_series,
)

YEAR_MIN = 1950
YEAR_MAX = 2016
VALUE_CAP = 3.5e15

VALUE_KINDS = ("positive-integer", "float", "percentage")

# inclusive (lo, hi) per value kind
VALUE_KIND_BOUNDS = {
    "positive-integer": (0.0, VALUE_CAP),
    "float": (0.0, VALUE_CAP),
    "percentage": (0.0, 100.0),
}

DATA_HEADER = "# catalog-data v1"
DICT_HEADER = "# catalog-dict v1"

MIN_TICKS = 2
MAX_TICKS = 8

_TAG_INDICATOR = 0x494E4443
_TAG_PAIR = 0x50414952
_TAG_PERTURB = 0x50455254


class CatalogFormatError(ValueError):
    """Malformed catalog file; message carries file and line number."""


class InsufficientCoverageError(RuntimeError):
    """No (indicator, entity) pair in the catalog supports the request."""


@dataclass(frozen=True)
class Indicator:
    id: str
    name: str
    unit: str
    value_kind: str

    def __post_init__(self):
        if self.value_kind not in VALUE_KINDS:
            raise ParameterError(
                f"value_kind: unknown kind {self.value_kind!r} for indicator {self.id!r}"
            )

    @property
    def bounds(self) -> Tuple[float, float]:
        return VALUE_KIND_BOUNDS[self.value_kind]


@dataclass(frozen=True)
class Entity:
    id: str
    name: str
    kind: str

    def __post_init__(self):
        if not self.name:
            raise ParameterError(f"name: entity {self.id!r} has an empty name")


@dataclass
class DataSeries:
    """A named sequence of chartable points.

    x_labels are year strings for temporal series and entity names for
    categorical ones; the temporal flag must agree with the labels.
    indicator_name/entity_kind/value_kind carry context the chart builder
    and the perturbation step need (titles, bound clipping).
    """

    series_name: str
    x_labels: List[str]
    y_values: List[float]
    y_unit: str
    temporal: bool
    indicator_name: str = ""
    entity_kind: str = ""
    value_kind: str = "float"

    def __post_init__(self):
        if len(self.x_labels) != len(self.y_values):
            raise ParameterError(
                f"x_labels: {len(self.x_labels)} labels vs {len(self.y_values)} values"
            )
        if not (MIN_TICKS <= len(self.x_labels) <= MAX_TICKS):
            raise ParameterError(
                f"x_labels: series length {len(self.x_labels)} outside [{MIN_TICKS}, {MAX_TICKS}]"
            )
        years = _parse_years(self.x_labels)
        if self.temporal and years is None:
            raise ParameterError("temporal: x_labels are not ordered years")
        if not self.temporal and years is not None:
            raise ParameterError("temporal: x_labels parse as ordered years, flag must be True")


def _parse_years(labels: Sequence[str]) -> Optional[List[int]]:
    """List of years if every label is an integer and they strictly
    increase, else None."""
    try:
        years = [int(lab) for lab in labels]
    except (TypeError, ValueError):
        return None
    if all(a < b for a, b in zip(years, years[1:])):
        return years
    return None


@dataclass
class Catalog:
    """Immutable-after-construction observation store.

    observations: (indicator_id, entity_id) -> {year: value}.  Every value
    is bound-checked against its indicator's value kind on construction.
    """

    indicators: Dict[str, Indicator]
    entities: Dict[str, Entity]
    observations: Dict[Tuple[str, str], Dict[int, float]]
    year_range: Tuple[int, int] = (YEAR_MIN, YEAR_MAX)
    _index: Optional[Dict[str, List[str]]] = field(
        default=None, repr=False, compare=False
    )

    def __post_init__(self):
        for (ind_id, ent_id), by_year in self.observations.items():
            if ind_id not in self.indicators:
                raise CatalogFormatError(f"observation references unknown indicator {ind_id!r}")
            if ent_id not in self.entities:
                raise CatalogFormatError(f"observation references unknown entity {ent_id!r}")
            lo, hi = self.indicators[ind_id].bounds
            for year, value in by_year.items():
                if not (self.year_range[0] <= year <= self.year_range[1]):
                    raise CatalogFormatError(
                        f"year {year} outside [{self.year_range[0]}, {self.year_range[1]}] "
                        f"for ({ind_id}, {ent_id})"
                    )
                if not (lo <= value <= hi):
                    raise CatalogFormatError(
                        f"value {value} outside [{lo}, {hi}] for "
                        f"{self.indicators[ind_id].value_kind} indicator {ind_id!r}"
                    )

    def stats(self) -> Dict[str, int]:
        n_obs = sum(len(v) for v in self.observations.values())
        return {
            "indicators": len(self.indicators),
            "entities": len(self.entities),
            "observations": n_obs,
        }

    def years_for(self, ind_id: str, ent_id: str) -> List[int]:
        return sorted(self.observations.get((ind_id, ent_id), ()))

    def covered_indicators(self) -> List[str]:
        self._ensure_index()
        return sorted(self._index)

    def entities_for(self, ind_id: str) -> List[str]:
        self._ensure_index()
        return self._index.get(ind_id, [])

    def _ensure_index(self):
        if self._index is None:
            index: Dict[str, List[str]] = {}
            for (ind_id, ent_id) in self.observations:
                index.setdefault(ind_id, []).append(ent_id)
            for ents in index.values():
                ents.sort()
            self._index = index


# ---------------------------------------------------------------------------
# file formats

def load_catalog(path) -> Catalog:
    """Read a catalog from its data file; the dictionary file is expected
    next to it with a .dict.csv suffix."""
    path = Path(path)
    dict_path = path.with_suffix(".dict.csv")
    if not path.exists():
        raise FileNotFoundError(f"catalog data file not found: {path}")
    if not dict_path.exists():
        raise FileNotFoundError(f"catalog dictionary file not found: {dict_path}")

    indicators: Dict[str, Indicator] = {}
    entities: Dict[str, Entity] = {}
    with open(dict_path, newline="", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != DICT_HEADER:
            raise CatalogFormatError(f"{dict_path}:1: expected {DICT_HEADER!r}, got {header!r}")
        for lineno, row in enumerate(csv.reader(fh), start=2):
            if not row:
                continue
            kind = row[0]
            if kind == "I":
                if len(row) != 5:
                    raise CatalogFormatError(f"{dict_path}:{lineno}: indicator row needs 5 fields")
                try:
                    indicators[row[1]] = Indicator(row[1], row[2], row[3], row[4])
                except ParameterError as exc:
                    raise CatalogFormatError(f"{dict_path}:{lineno}: {exc}") from exc
            elif kind == "E":
                if len(row) != 4:
                    raise CatalogFormatError(f"{dict_path}:{lineno}: entity row needs 4 fields")
                try:
                    entities[row[1]] = Entity(row[1], row[2], row[3])
                except ParameterError as exc:
                    raise CatalogFormatError(f"{dict_path}:{lineno}: {exc}") from exc
            else:
                raise CatalogFormatError(
                    f"{dict_path}:{lineno}: unknown record type {kind!r} (want I or E)"
                )

    observations: Dict[Tuple[str, str], Dict[int, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header != DATA_HEADER:
            raise CatalogFormatError(f"{path}:1: expected {DATA_HEADER!r}, got {header!r}")
        for lineno, row in enumerate(csv.reader(fh), start=2):
            if not row:
                continue
            if len(row) != 4:
                raise CatalogFormatError(f"{path}:{lineno}: data row needs 4 fields, got {len(row)}")
            ind_id, ent_id, year_s, value_s = row
            if ind_id not in indicators:
                raise CatalogFormatError(f"{path}:{lineno}: unknown indicator id {ind_id!r}")
            if ent_id not in entities:
                raise CatalogFormatError(f"{path}:{lineno}: unknown entity id {ent_id!r}")
            try:
                year = int(year_s)
                value = float(value_s)
            except ValueError as exc:
                raise CatalogFormatError(f"{path}:{lineno}: {exc}") from exc
            if not (YEAR_MIN <= year <= YEAR_MAX):
                raise CatalogFormatError(
                    f"{path}:{lineno}: year {year} outside [{YEAR_MIN}, {YEAR_MAX}]"
                )
            lo, hi = indicators[ind_id].bounds
            if not (lo <= value <= hi):
                raise CatalogFormatError(
                    f"{path}:{lineno}: value {value} outside [{lo}, {hi}] for "
                    f"{indicators[ind_id].value_kind} indicator {ind_id!r}"
                )
            observations.setdefault((ind_id, ent_id), {})[year] = value

    return Catalog(indicators, entities, observations)


def write_catalog(catalog: Catalog, path) -> None:
    """Write the data file at path and the dictionary file next to it.
    Floats use repr, so load_catalog round-trips values exactly."""
    path = Path(path)
    dict_path = path.with_suffix(".dict.csv")
    with open(dict_path, "w", newline="", encoding="utf-8") as fh:
        fh.write(DICT_HEADER + "\n")
        writer = csv.writer(fh)
        for ind in sorted(catalog.indicators.values(), key=lambda x: x.id):
            writer.writerow(["I", ind.id, ind.name, ind.unit, ind.value_kind])
        for ent in sorted(catalog.entities.values(), key=lambda x: x.id):
            writer.writerow(["E", ent.id, ent.name, ent.kind])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(DATA_HEADER + "\n")
        writer = csv.writer(fh)
        for (ind_id, ent_id) in sorted(catalog.observations):
            by_year = catalog.observations[(ind_id, ent_id)]
            for year in sorted(by_year):
                writer.writerow([ind_id, ent_id, year, repr(by_year[year])])


# ---------------------------------------------------------------------------
# synthesis

_SUBJECTS = [
    "coffee", "wheat", "rice", "maize", "steel", "aluminium", "copper",
    "cement", "timber", "cotton", "sugar", "beef", "poultry", "dairy",
    "fish", "crude oil", "natural gas", "coal", "electricity", "solar power",
    "wind power", "fertilizer", "plastic", "paper", "textile", "automobile",
    "bicycle", "smartphone", "computer", "semiconductor", "pharmaceutical",
    "chemical", "rubber", "glass", "footwear", "furniture", "wine", "beer",
    "tea", "cocoa", "banana", "citrus", "potato", "soybean", "palm oil",
    "tobacco", "gold", "silver", "iron ore", "nickel", "zinc", "tin",
    "lithium", "uranium", "freight", "passenger", "tourist", "internet",
    "mobile subscription", "broadband",
]

_MEASURES = [
    "production", "consumption", "exports", "imports", "reserves",
    "output", "sales", "usage", "trade volume", "investment",
    "capacity", "demand",
]

_PCT_MEASURES = [
    "growth rate", "market share", "employment share", "import share",
    "export share", "coverage rate", "adoption rate", "utilization rate",
]

_FLOAT_UNITS = ["kt", "tonnes", "million USD", "GWh", "thousand barrels",
                "billion cubic meters", "USD per capita", "kg per capita"]
_INT_UNITS = ["units", "people", "head", "vehicles", "devices", "subscriptions"]

_COUNTRIES = [
    "Afghanistan", "Albania", "Algeria", "Angola", "Argentina", "Armenia",
    "Australia", "Austria", "Azerbaijan", "Bahrain", "Bangladesh", "Belarus",
    "Belgium", "Benin", "Bolivia", "Botswana", "Brazil", "Bulgaria",
    "Cambodia", "Cameroon", "Canada", "Chad", "Chile", "China", "Colombia",
    "Costa Rica", "Croatia", "Cuba", "Cyprus", "Denmark", "Ecuador", "Egypt",
    "Estonia", "Ethiopia", "Fiji", "Finland", "France", "Gabon", "Georgia",
    "Germany", "Ghana", "Greece", "Guatemala", "Guinea", "Haiti", "Honduras",
    "Hungary", "Iceland", "India", "Indonesia", "Iraq", "Ireland", "Israel",
    "Italy", "Jamaica", "Japan", "Jordan", "Kazakhstan", "Kenya", "Kuwait",
    "Laos", "Latvia", "Lebanon", "Liberia", "Libya", "Lithuania",
    "Luxembourg", "Madagascar", "Malawi", "Malaysia", "Mali", "Malta",
    "Mauritius", "Mexico", "Moldova", "Mongolia", "Morocco", "Mozambique",
    "Myanmar", "Namibia", "Nepal", "Netherlands", "New Zealand", "Nicaragua",
    "Niger", "Nigeria", "Norway", "Oman", "Pakistan", "Panama", "Paraguay",
    "Peru", "Philippines", "Poland", "Portugal", "Qatar", "Romania",
    "Rwanda", "Senegal", "Serbia", "Singapore", "Slovakia", "Slovenia",
    "Somalia", "South Africa", "Spain", "Sri Lanka", "Sudan", "Sweden",
    "Switzerland", "Tanzania", "Thailand", "Togo", "Tunisia", "Turkey",
    "Uganda", "Ukraine", "Uruguay", "Uzbekistan", "Venezuela", "Vietnam",
    "Yemen", "Zambia", "Zimbabwe",
]

_SPAN_MIN = 8
_SPAN_MAX = 40


def _slug(name: str) -> str:
    return name.lower().replace(" ", "-")


def synth_catalog(seed: int, n_indicators: int, n_entities: int,
                  coverage: float = 0.6) -> Catalog:
    """Deterministic synthetic catalog.

    Indicator names combine bundled subject and measure word lists; value
    magnitudes are log-uniform over the allowed range per indicator.  Each
    (indicator, entity) pair is covered with the given probability and, if
    covered, holds a contiguous span of at least 8 years, so any covered
    pair supports the full 2..8 tick range.
    """
    if n_indicators < 1:
        raise ParameterError(f"n_indicators: must be >= 1, got {n_indicators}")
    if n_entities < 1:
        raise ParameterError(f"n_entities: must be >= 1, got {n_entities}")
    max_names = len(_SUBJECTS) * (len(_MEASURES) + len(_PCT_MEASURES))
    if n_indicators > max_names:
        raise ParameterError(f"n_indicators: name pool supports at most {max_names}")

    roster = Rng(derive_seed(seed, _TAG_INDICATOR))
    indicators: Dict[str, Indicator] = {}
    ind_order: List[str] = []
    seen_names = set()
    while len(indicators) < n_indicators:
        r = roster.random()
        subject = roster.choice(_SUBJECTS)
        if r < 0.2:
            kind = "percentage"
            name = f"{subject} {roster.choice(_PCT_MEASURES)}"
            unit = "%"
        elif r < 0.6:
            kind = "positive-integer"
            name = f"{subject} {roster.choice(_MEASURES)}"
            unit = roster.choice(_INT_UNITS)
        else:
            kind = "float"
            name = f"{subject} {roster.choice(_MEASURES)}"
            unit = roster.choice(_FLOAT_UNITS)
        if name in seen_names:
            continue
        seen_names.add(name)
        ind = Indicator(_slug(name), name, unit, kind)
        indicators[ind.id] = ind
        ind_order.append(ind.id)

    entities: Dict[str, Entity] = {}
    ent_order: List[str] = []
    pool = _COUNTRIES + [f"Territory {k}" for k in range(1, 1001)]
    for name in pool[:n_entities]:
        ent = Entity(_slug(name), name, "country")
        entities[ent.id] = ent
        ent_order.append(ent.id)

    # per-indicator magnitude scale, log-uniform over [1, VALUE_CAP]
    scales: Dict[str, float] = {}
    for idx, ind_id in enumerate(ind_order):
        r = Rng(derive_seed(seed, _TAG_INDICATOR, idx + 1))
        scales[ind_id] = math.exp(r.random() * math.log(VALUE_CAP))

    observations: Dict[Tuple[str, str], Dict[int, float]] = {}
    for i, ind_id in enumerate(ind_order):
        ind = indicators[ind_id]
        for j, ent_id in enumerate(ent_order):
            pair_rng = Rng(derive_seed(seed, _TAG_PAIR, i, j))
            if pair_rng.random() >= coverage:
                continue
            span = _SPAN_MIN + pair_rng.randint(_SPAN_MAX - _SPAN_MIN + 1)
            start = YEAR_MIN + pair_rng.randint(YEAR_MAX - YEAR_MIN + 1 - span + 1)
            by_year: Dict[int, float] = {}
            if ind.value_kind == "percentage":
                v = 5.0 + 90.0 * pair_rng.random()
                for year in range(start, start + span):
                    by_year[year] = v
                    v = min(100.0, max(0.0, v + (pair_rng.random() - 0.5) * 6.0))
            else:
                v = scales[ind_id] * (0.5 + pair_rng.random())
                for year in range(start, start + span):
                    out = min(VALUE_CAP, max(0.0, v))
                    if ind.value_kind == "positive-integer":
                        out = float(round(out))
                    by_year[year] = out
                    v = v * math.exp(0.08 * pair_rng.normal())
            observations[(ind_id, ent_id)] = by_year

    return Catalog(indicators, entities, observations)


# ---------------------------------------------------------------------------
# sampling

def _runs(years: List[int]) -> List[List[int]]:
    """Maximal runs of consecutive years."""
    runs: List[List[int]] = []
    for y in years:
        if runs and runs[-1][-1] == y - 1:
            runs[-1].append(y)
        else:
            runs.append([y])
    return runs


def _series_from(ind: Indicator, ent: Entity, years: List[int],
                 values: List[float]) -> DataSeries:
    return DataSeries(
        series_name=ent.name,
        x_labels=[str(y) for y in years],
        y_values=values,
        y_unit=ind.unit,
        temporal=True,
        indicator_name=ind.name,
        entity_kind=ent.kind,
        value_kind=ind.value_kind,
    )


def sample_series(catalog: Catalog, temporal: bool, arity: int, rng: Rng,
                  min_len: int = MIN_TICKS) -> List[DataSeries]:
    """Sample one or two series from the catalog.

    Temporal sampling picks consecutive covered years for one indicator
    and one or two entities; categorical sampling picks 2..8 entities at a
    single year.  min_len raises the lower bound on the point count
    (callers that will perturb toward a trend need longer series).
    """
    if arity not in (1, 2):
        raise ParameterError(f"arity: must be 1 or 2, got {arity}")
    if not (MIN_TICKS <= min_len <= MAX_TICKS):
        raise ParameterError(f"min_len: {min_len} outside [{MIN_TICKS}, {MAX_TICKS}]")
    if not catalog.observations:
        raise InsufficientCoverageError("catalog has no observations")

    ind_ids = catalog.covered_indicators()
    sampler = _sample_temporal if temporal else _sample_categorical
    # random picks first; exhaustive sorted scan as the fallback so a
    # sparse catalog still gets searched completely
    tried = set()
    for _ in range(10):
        ind_id = ind_ids[rng.randint(len(ind_ids))]
        if ind_id in tried:
            continue
        tried.add(ind_id)
        got = sampler(catalog, ind_id, arity, rng, min_len)
        if got is not None:
            return got
    for ind_id in ind_ids:
        if ind_id in tried:
            continue
        got = sampler(catalog, ind_id, arity, rng, min_len)
        if got is not None:
            return got
    raise InsufficientCoverageError(
        f"no indicator supports temporal={temporal} arity={arity} min_len={min_len}"
    )


def _sample_temporal(catalog: Catalog, ind_id: str, arity: int, rng: Rng,
                     min_len: int) -> Optional[List[DataSeries]]:
    ind = catalog.indicators[ind_id]
    usable = []
    for ent_id in catalog.entities_for(ind_id):
        runs = [r for r in _runs(catalog.years_for(ind_id, ent_id)) if len(r) >= min_len]
        if runs:
            usable.append((ent_id, runs))
    if arity == 1:
        if not usable:
            return None
        ent_id, runs = usable[rng.randint(len(usable))]
        run = runs[rng.randint(len(runs))]
        k = min_len + rng.randint(min(MAX_TICKS, len(run)) - min_len + 1)
        start = rng.randint(len(run) - k + 1)
        years = run[start:start + k]
        ent = catalog.entities[ent_id]
        values = [catalog.observations[(ind_id, ent_id)][y] for y in years]
        return [_series_from(ind, ent, years, values)]

    if len(usable) < 2:
        return None
    # random pairs first, then exhaustive scan, for overlapping year runs
    candidates = []
    for _ in range(20):
        a, b = rng.sample(range(len(usable)), 2)
        candidates.append((min(a, b), max(a, b)))
    candidates += [(a, b) for a in range(len(usable)) for b in range(a + 1, len(usable))]
    for a, b in candidates:
        ya = set(catalog.years_for(ind_id, usable[a][0]))
        yb = set(catalog.years_for(ind_id, usable[b][0]))
        common = [r for r in _runs(sorted(ya & yb)) if len(r) >= min_len]
        if not common:
            continue
        run = common[rng.randint(len(common))]
        k = min_len + rng.randint(min(MAX_TICKS, len(run)) - min_len + 1)
        start = rng.randint(len(run) - k + 1)
        years = run[start:start + k]
        out = []
        for idx in (a, b):
            ent_id = usable[idx][0]
            ent = catalog.entities[ent_id]
            values = [catalog.observations[(ind_id, ent_id)][y] for y in years]
            out.append(_series_from(ind, ent, years, values))
        return out
    return None


def _sample_categorical(catalog: Catalog, ind_id: str, arity: int, rng: Rng,
                        min_len: int) -> Optional[List[DataSeries]]:
    ind = catalog.indicators[ind_id]
    by_year: Dict[int, List[str]] = {}
    for ent_id in catalog.entities_for(ind_id):
        for y in catalog.observations[(ind_id, ent_id)]:
            by_year.setdefault(y, []).append(ent_id)
    for ents in by_year.values():
        ents.sort()

    if arity == 1:
        years = sorted(y for y, ents in by_year.items() if len(ents) >= min_len)
        if not years:
            return None
        year = years[rng.randint(len(years))]
        ents = by_year[year]
        k = min_len + rng.randint(min(MAX_TICKS, len(ents)) - min_len + 1)
        chosen = rng.sample(ents, k)
        ent_kind = catalog.entities[chosen[0]].kind
        return [DataSeries(
            series_name=ind.name,
            x_labels=[catalog.entities[e].name for e in chosen],
            y_values=[catalog.observations[(ind_id, e)][year] for e in chosen],
            y_unit=ind.unit,
            temporal=False,
            indicator_name=ind.name,
            entity_kind=ent_kind,
            value_kind=ind.value_kind,
        )]

    # arity 2: one indicator at two years over a shared entity set
    years = sorted(by_year)
    if len(years) < 2:
        return None
    pair = None
    for _ in range(20):
        a, b = rng.sample(range(len(years)), 2)
        y1, y2 = years[min(a, b)], years[max(a, b)]
        common = sorted(set(by_year[y1]) & set(by_year[y2]))
        if len(common) >= min_len:
            pair = (y1, y2, common)
            break
    if pair is None:
        for ai in range(len(years)):
            for bi in range(ai + 1, len(years)):
                common = sorted(set(by_year[years[ai]]) & set(by_year[years[bi]]))
                if len(common) >= min_len:
                    pair = (years[ai], years[bi], common)
                    break
            if pair is not None:
                break
    if pair is None:
        return None
    y1, y2, common = pair
    k = min_len + rng.randint(min(MAX_TICKS, len(common)) - min_len + 1)
    chosen = rng.sample(common, k)
    ent_kind = catalog.entities[chosen[0]].kind
    out = []
    for year in (y1, y2):
        out.append(DataSeries(
            series_name=f"{ind.name} ({year})",
            x_labels=[catalog.entities[e].name for e in chosen],
            y_values=[catalog.observations[(ind_id, e)][year] for e in chosen],
            y_unit=ind.unit,
            temporal=False,
            indicator_name=ind.name,
            entity_kind=ent_kind,
            value_kind=ind.value_kind,
        ))
    return out


# ---------------------------------------------------------------------------
# perturbation

def perturb_to_trend(series: DataSeries, spec: TrendSpec, rng: Rng) -> DataSeries:
    """Replace y_values with a synthesized trend series rescaled into an
    envelope derived from the original values.

    The envelope is the original [min, max] when that range is wide enough
    for the classifier to see the shape; otherwise it is widened around
    the series mean (and for plateau it is always a narrow band around the
    mean, so the output reads as flat).  The envelope is clipped to the
    series' value-kind bounds before rescaling, which keeps every output
    value in bounds without distorting the shape.  An all-zero series is
    treated as sitting at unit level.
    """
    if spec.params.n_points != len(series.y_values):
        raise ParameterError(
            f"n_points: spec has {spec.params.n_points}, series has {len(series.y_values)}"
        )
    seed = derive_seed(rng.next_raw(), _TAG_PERTURB)
    path = synth_trend_series(spec, seed)

    mean = sum(series.y_values) / len(series.y_values)
    m = mean if mean > 0 else 1.0
    lo0, hi0 = min(series.y_values), max(series.y_values)
    rel = (hi0 - lo0) / m
    if spec.trend_class is TrendClass.PLATEAU:
        lo, hi = m * 0.985, m * 1.015
    elif rel < 0.06:
        lo, hi = m * 0.9, m * 1.1
    else:
        lo, hi = lo0, hi0
    blo, bhi = VALUE_KIND_BOUNDS[series.value_kind]
    lo, hi = max(lo, blo), min(hi, bhi)

    plo, phi = min(path), max(path)
    if phi > plo:
        scale = (hi - lo) / (phi - plo)
        values = [lo + (y - plo) * scale for y in path]
    else:
        values = [(lo + hi) / 2.0 for _ in path]

    return DataSeries(
        series_name=series.series_name,
        x_labels=list(series.x_labels),
        y_values=values,
        y_unit=series.y_unit,
        temporal=series.temporal,
        indicator_name=series.indicator_name,
        entity_kind=series.entity_kind,
        value_kind=series.value_kind,
    )
