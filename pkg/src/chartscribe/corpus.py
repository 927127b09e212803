"""Corpus assembly: configuration, per-record generation, manifest, checks.

A corpus is a directory of per-chart triples plus a root manifest:

    charts/NNNNNN.svg          rendered chart
    meta/NNNNNN.json           ground-truth metadata
    descriptions/NNNNNN.txt    JSON lines, one description per line
    manifest.json              config echo, cell grid, per-record index

Determinism contract: the corpus bytes are a pure function of the config.
Each record's seed mixes (global seed, category code, kind code, position
within the cell), so any record can be regenerated in isolation and records
can be built concurrently.
"""

import json
import logging
import math
import re
import xml.etree.ElementTree as ET
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from .catalog import (
    Catalog, DataSeries, load_catalog, perturb_to_trend, sample_series,
    synth_catalog,
)
from .chartgen import ChartKind, ChartMeta, render, build_chart_spec
from .narrate import (
    DEFAULT_PLAN_PARAMS, PlanParams, Description, check_move_order,
    extract_facts, generate_description_set, hallucination_check,
)
from .rng import (
    Rng, TAG_DESCRIPTION, TAG_RETRY, TAG_TREND_RESAMPLE, derive_seed,
)
from .templatebank import TemplateBank, load_bank, load_default_bank
from .trend import (
    DIRECTIONAL_CLASSES, FLAT_CLASSES, TrendClass, TrendUnrealizableError,
    classify_trend, preset,
)

log = logging.getLogger(__name__)

FORMAT_VERSION = 1
MANIFEST_NAME = "manifest.json"

CATEGORIES = ("temporal-trend", "temporal-random", "categorical")
KINDS = ("scatter", "line", "vertical-bar", "horizontal-bar")
CATEGORY_CODES = {"temporal-trend": 1, "temporal-random": 2, "categorical": 3}
KIND_CODES = {"scatter": 1, "line": 2, "vertical-bar": 3, "horizontal-bar": 4}

# default chart grid: category rows x kind columns
DEFAULT_CELL_COUNTS: Dict[Tuple[str, str], int] = {
    ("temporal-trend", "line"): 880,
    ("temporal-trend", "horizontal-bar"): 480,
    ("temporal-trend", "vertical-bar"): 880,
    ("temporal-trend", "scatter"): 880,
    ("temporal-random", "line"): 1049,
    ("temporal-random", "horizontal-bar"): 676,
    ("temporal-random", "vertical-bar"): 1049,
    ("temporal-random", "scatter"): 1049,
    ("categorical", "line"): 951,
    ("categorical", "horizontal-bar"): 436,
    ("categorical", "vertical-bar"): 951,
    ("categorical", "scatter"): 951,
}

# trend cells need room for curvature to register; random cells do not
TREND_MIN_LEN = 5
RANDOM_MIN_LEN = 3

_TAG_CATALOG = 0x4341544C  # catalog-construction seed word
_PERTURB_ATTEMPTS = 8
_RAW_SAMPLE_ATTEMPTS = 40
_RECORD_ATTEMPTS = 6  # first try plus five retries

_SYNTH_RE = re.compile(r"^synthetic\(\s*(\d+)\s*,\s*(\d+)\s*\)$")


class ConfigError(ValueError):
    """Malformed corpus configuration."""


class CorpusGenerationError(RuntimeError):
    """A record kept failing after every retry."""


class _RecordError(RuntimeError):
    """One record attempt failed; the caller retries with a fresh seed."""


@dataclass(frozen=True)
class CorpusConfig:
    """Everything generate_corpus needs; the manifest echoes it verbatim."""

    seed: int
    output_dir: str = "corpus_out"
    cell_counts: Dict[Tuple[str, str], int] = field(
        default_factory=lambda: dict(DEFAULT_CELL_COUNTS))
    count_scale: float = 1.0
    catalog_source: str = "synthetic(24, 30)"
    template_bank: str = "builtin"
    descriptions_per_chart: int = 3
    plan_params: PlanParams = DEFAULT_PLAN_PARAMS

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed: {self.seed} outside 64-bit range")
        if self.count_scale <= 0:
            raise ConfigError(f"count_scale: must be > 0, got {self.count_scale}")
        if self.descriptions_per_chart < 1:
            raise ConfigError("descriptions_per_chart: must be >= 1")
        for (category, kind), count in self.cell_counts.items():
            if category not in CATEGORIES or kind not in KINDS:
                raise ConfigError(f"cell_counts: unknown cell {category}/{kind}")
            if count < 0:
                raise ConfigError(f"cell_counts: {category}/{kind} count {count} < 0")
        if self.template_bank != "builtin" and not Path(self.template_bank).exists():
            raise ConfigError(f"template_bank: no file at {self.template_bank}")
        if not _SYNTH_RE.match(self.catalog_source) \
                and not Path(self.catalog_source).exists():
            raise ConfigError(
                f"catalog_source: neither synthetic(nI, nE) nor a file: "
                f"{self.catalog_source}")

    def scaled_count(self, category: str, kind: str) -> int:
        """Per-cell count under count_scale: floor, but never below 1."""
        base = self.cell_counts.get((category, kind), 0)
        if base == 0:
            return 0
        return max(1, math.floor(base * self.count_scale))

    def to_dict(self) -> dict:
        # output_dir is deliberately not echoed: the corpus bytes must not
        # depend on where the corpus lives
        return {
            "seed": self.seed,
            "cell_counts": {
                f"{category}/{kind}": count
                for (category, kind), count in sorted(self.cell_counts.items())
            },
            "count_scale": self.count_scale,
            "catalog_source": self.catalog_source,
            "template_bank": self.template_bank,
            "descriptions_per_chart": self.descriptions_per_chart,
            "plan_params": {
                "p_move2": self.plan_params.p_move2,
                "p_move4": self.plan_params.p_move4,
                "m3_min": self.plan_params.m3_min,
                "m3_max": self.plan_params.m3_max,
                "m31_min": self.plan_params.m31_min,
                "m31_max": self.plan_params.m31_max,
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CorpusConfig":
        cells = {}
        for key, count in doc["cell_counts"].items():
            category, kind = key.split("/", 1)
            cells[(category, kind)] = int(count)
        return cls(
            seed=int(doc["seed"]),
            output_dir=doc.get("output_dir", "corpus_out"),
            cell_counts=cells,
            count_scale=float(doc.get("count_scale", 1.0)),
            catalog_source=doc.get("catalog_source", "synthetic(24, 30)"),
            template_bank=doc.get("template_bank", "builtin"),
            descriptions_per_chart=int(doc.get("descriptions_per_chart", 3)),
            plan_params=PlanParams(**doc.get("plan_params", {})),
        )


def default_config(seed: int, output_dir: str = "corpus_out") -> CorpusConfig:
    return CorpusConfig(seed=seed, output_dir=output_dir)


def load_config(path) -> CorpusConfig:
    """Read an INI config file; see docs/config.md for the commented example."""
    import configparser

    parser = configparser.ConfigParser()
    read = parser.read(str(path))
    if not read:
        raise ConfigError(f"config: cannot read {path}")
    if "corpus" not in parser:
        raise ConfigError("config: missing [corpus] section")
    corpus = parser["corpus"]
    if "seed" not in corpus:
        raise ConfigError("config: [corpus] must set seed")

    cells = dict(DEFAULT_CELL_COUNTS)
    if "cells" in parser:
        for key, value in parser["cells"].items():
            if "." not in key:
                raise ConfigError(f"config: cell key {key!r} is not category.kind")
            category, kind = key.rsplit(".", 1)
            cells[(category, kind)] = int(value)

    plan_kwargs = {}
    if "generator" in parser:
        gen = parser["generator"]
        for ini_key, attr in (("p_move2", "p_move2"), ("p_move4", "p_move4"),
                              ("m3_min", "m3_min"), ("m3_max", "m3_max"),
                              ("m31_min", "m31_min"), ("m31_max", "m31_max")):
            if ini_key in gen:
                cast = float if ini_key.startswith("p_") else int
                plan_kwargs[attr] = cast(gen[ini_key])

    try:
        params = PlanParams(**plan_kwargs)
    except ValueError as exc:
        raise ConfigError(f"config: [generator] {exc}") from exc

    descriptions = corpus.getint(
        "descriptions_per_chart",
        parser.getint("generator", "descriptions_per_chart", fallback=3)
        if "generator" in parser else 3)

    return CorpusConfig(
        seed=corpus.getint("seed"),
        output_dir=corpus.get("output_dir", "corpus_out"),
        cell_counts=cells,
        count_scale=corpus.getfloat("count_scale", 1.0),
        catalog_source=corpus.get("catalog_source", "synthetic(24, 30)"),
        template_bank=corpus.get("template_bank", "builtin"),
        descriptions_per_chart=descriptions,
        plan_params=params,
    )


def _build_catalog(config: CorpusConfig) -> Catalog:
    m = _SYNTH_RE.match(config.catalog_source)
    if m:
        return synth_catalog(derive_seed(config.seed, _TAG_CATALOG),
                             int(m.group(1)), int(m.group(2)))
    return load_catalog(config.catalog_source)


def _build_bank(config: CorpusConfig) -> TemplateBank:
    if config.template_bank == "builtin":
        return load_default_bank()
    return load_bank(config.template_bank)


# ---------------------------------------------------------------------------
# record planning and generation


@dataclass(frozen=True)
class RecordPlan:
    image_index: int
    category: str
    kind: str
    cell_index: int  # position within the (category, kind) cell
    seed: int


@dataclass(frozen=True)
class RecordPayload:
    image_index: int
    svg: bytes
    meta_json: str
    descriptions: str  # JSON lines, trailing newline
    entry: dict


def build_plans(config: CorpusConfig) -> List[RecordPlan]:
    """The full record list in generation order: categories then kinds, as
    declared in CATEGORIES and KINDS, with cell-local indices."""
    plans: List[RecordPlan] = []
    image_index = 0
    for category in CATEGORIES:
        for kind in KINDS:
            for cell_index in range(config.scaled_count(category, kind)):
                seed = derive_seed(config.seed, CATEGORY_CODES[category],
                                   KIND_CODES[kind], cell_index)
                plans.append(RecordPlan(image_index, category, kind,
                                        cell_index, seed))
                image_index += 1
    return plans


def _gate_perturb(series: DataSeries, target: TrendClass, attempt_seed: int,
                  slot: int) -> DataSeries:
    """Perturb until the output classifies back to the requested class."""
    for attempt in range(_PERTURB_ATTEMPTS):
        sub = Rng(derive_seed(attempt_seed, TAG_TREND_RESAMPLE, slot, attempt))
        try:
            out = perturb_to_trend(series, preset(target, len(series.y_values)),
                                   sub)
        except TrendUnrealizableError:
            continue
        if classify_trend(out.y_values) is target:
            return out
    raise _RecordError(
        f"could not realize {target.value} in {_PERTURB_ATTEMPTS} perturbations")


def _build_series(plan: RecordPlan, attempt_seed: int, rng: Rng,
                  catalog: Catalog) -> List[DataSeries]:
    """Draw the data for one record.

    Draw order is fixed: the arity coin first, then category-specific
    draws.  Trend cells cycle the six directional classes by cell position;
    random cells flip between flat perturbation and raw data accepted only
    when every series classifies flat.
    """
    arity = 2 if rng.random() < 0.5 else 1

    if plan.category == "temporal-trend":
        targets = [DIRECTIONAL_CLASSES[plan.cell_index % len(DIRECTIONAL_CLASSES)]]
        if arity == 2:
            targets.append(DIRECTIONAL_CLASSES[rng.randint(len(DIRECTIONAL_CLASSES))])
        base = sample_series(catalog, temporal=True, arity=arity, rng=rng,
                             min_len=TREND_MIN_LEN)
        return [
            _gate_perturb(s, target, attempt_seed, slot)
            for slot, (s, target) in enumerate(zip(base, targets))
        ]

    if plan.category == "temporal-random":
        if rng.random() < 0.5:
            targets = [FLAT_CLASSES[rng.randint(len(FLAT_CLASSES))]
                       for _ in range(arity)]
            base = sample_series(catalog, temporal=True, arity=arity, rng=rng,
                                 min_len=RANDOM_MIN_LEN)
            return [
                _gate_perturb(s, target, attempt_seed, slot)
                for slot, (s, target) in enumerate(zip(base, targets))
            ]
        for _ in range(_RAW_SAMPLE_ATTEMPTS):
            candidate = sample_series(catalog, temporal=True, arity=arity,
                                      rng=rng, min_len=RANDOM_MIN_LEN)
            if all(classify_trend(s.y_values) in FLAT_CLASSES
                   for s in candidate):
                return candidate
        raise _RecordError(
            f"no flat raw sample in {_RAW_SAMPLE_ATTEMPTS} attempts")

    return sample_series(catalog, temporal=False, arity=arity, rng=rng)


def _record_name(image_index: int) -> str:
    return f"{image_index:06d}"


def _attempt_record(plan: RecordPlan, attempt_seed: int, attempt: int,
                    catalog: Catalog, bank: TemplateBank,
                    config: CorpusConfig) -> RecordPayload:
    rng = Rng(attempt_seed)
    series = _build_series(plan, attempt_seed, rng, catalog)
    spec = build_chart_spec(series, ChartKind(plan.kind), rng,
                            image_index=plan.image_index)
    svg, meta = render(spec)
    if meta.category != plan.category:
        raise _RecordError(
            f"chart classified as {meta.category}, cell wants {plan.category}")

    desc_rng = Rng(derive_seed(attempt_seed, TAG_DESCRIPTION))
    descriptions = generate_description_set(
        meta, series, bank, desc_rng,
        n_variants=config.descriptions_per_chart,
        params=config.plan_params)

    name = _record_name(plan.image_index)
    entry = {
        "image_index": plan.image_index,
        "category": plan.category,
        "kind": plan.kind,
        "cell_index": plan.cell_index,
        "seed": plan.seed,
        "attempt": attempt,
        "arity": len(series),
        "trend_classes": [sm.trend_class for sm in meta.series],
        "n_descriptions": len(descriptions),
        "files": {
            "chart": f"charts/{name}.svg",
            "meta": f"meta/{name}.json",
            "descriptions": f"descriptions/{name}.txt",
        },
    }
    desc_text = "".join(d.to_json_line() + "\n" for d in descriptions)
    return RecordPayload(plan.image_index, svg, meta.to_json(), desc_text, entry)


def build_record(plan: RecordPlan, catalog: Catalog, bank: TemplateBank,
                 config: CorpusConfig) -> RecordPayload:
    """Generate one record, retrying with freshly derived seeds on failure."""
    last: Optional[Exception] = None
    for attempt in range(_RECORD_ATTEMPTS):
        attempt_seed = (plan.seed if attempt == 0
                        else derive_seed(plan.seed, TAG_RETRY, attempt))
        try:
            return _attempt_record(plan, attempt_seed, attempt, catalog, bank,
                                   config)
        except (ValueError, RuntimeError) as exc:
            log.warning("record %06d attempt %d failed: %s",
                        plan.image_index, attempt, exc)
            last = exc
    raise CorpusGenerationError(
        f"record {plan.image_index:06d} failed {_RECORD_ATTEMPTS} attempts: {last}")


# worker-process state for parallel generation; each process builds the
# catalog and bank once from the (picklable) config dict
_worker_state: dict = {}


def _worker_init(config_doc: dict) -> None:
    config = CorpusConfig.from_dict(config_doc)
    _worker_state["config"] = config
    _worker_state["catalog"] = _build_catalog(config)
    _worker_state["bank"] = _build_bank(config)


def _worker_build(plan: RecordPlan) -> RecordPayload:
    return build_record(plan, _worker_state["catalog"], _worker_state["bank"],
                        _worker_state["config"])


def _write_payload(root: Path, payload: RecordPayload) -> None:
    files = payload.entry["files"]
    (root / files["chart"]).write_bytes(payload.svg)
    (root / files["meta"]).write_text(payload.meta_json, encoding="utf-8")
    (root / files["descriptions"]).write_text(payload.descriptions,
                                              encoding="utf-8")


def generate_corpus(config: CorpusConfig, jobs: int = 1) -> dict:
    """Generate the full corpus tree and return the manifest document."""
    if jobs < 1:
        raise ValueError(f"jobs: must be >= 1, got {jobs}")
    root = Path(config.output_dir)
    for sub in ("charts", "meta", "descriptions"):
        (root / sub).mkdir(parents=True, exist_ok=True)

    plans = build_plans(config)
    entries: List[dict] = []
    if jobs == 1:
        catalog = _build_catalog(config)
        bank = _build_bank(config)
        for plan in plans:
            payload = build_record(plan, catalog, bank, config)
            _write_payload(root, payload)
            entries.append(payload.entry)
    else:
        chunk = max(1, len(plans) // (jobs * 8))
        with ProcessPoolExecutor(max_workers=jobs, initializer=_worker_init,
                                 initargs=(config.to_dict(),)) as pool:
            for payload in pool.map(_worker_build, plans, chunksize=chunk):
                _write_payload(root, payload)
                entries.append(payload.entry)

    cells = [
        {"category": category, "kind": kind,
         "count": config.scaled_count(category, kind)}
        for category in CATEGORIES for kind in KINDS
    ]
    manifest = {
        "format_version": FORMAT_VERSION,
        "config": config.to_dict(),
        "totals": {
            "charts": len(entries),
            "descriptions": sum(e["n_descriptions"] for e in entries),
        },
        "cells": cells,
        "records": entries,
    }
    (root / MANIFEST_NAME).write_text(
        json.dumps(manifest, indent=1, ensure_ascii=False) + "\n",
        encoding="utf-8")
    return manifest


def load_manifest(corpus_dir) -> dict:
    path = Path(corpus_dir) / MANIFEST_NAME
    if not path.exists():
        raise FileNotFoundError(f"no {MANIFEST_NAME} in {corpus_dir}")
    return json.loads(path.read_text(encoding="utf-8"))


def regenerate_record(corpus_dir, image_index: int) -> List[str]:
    """Rebuild one record's three files from the manifest alone; returns the
    relative paths written."""
    root = Path(corpus_dir)
    manifest = load_manifest(root)
    config = CorpusConfig.from_dict(manifest["config"])
    entry = next((e for e in manifest["records"]
                  if e["image_index"] == image_index), None)
    if entry is None:
        raise KeyError(f"image_index {image_index} not in manifest")
    plan = RecordPlan(image_index, entry["category"], entry["kind"],
                      entry["cell_index"], entry["seed"])
    payload = build_record(plan, _build_catalog(config), _build_bank(config),
                           config)
    _write_payload(root, payload)
    return list(payload.entry["files"].values())


# ---------------------------------------------------------------------------
# stats


def stats(corpus_dir) -> Tuple[dict, str]:
    """Category x kind grid plus description totals, as a dict and an
    aligned text table."""
    manifest = load_manifest(corpus_dir)
    grid = {(category, kind): 0 for category in CATEGORIES for kind in KINDS}
    descriptions = 0
    for entry in manifest["records"]:
        grid[(entry["category"], entry["kind"])] += 1
        descriptions += entry["n_descriptions"]
    charts = len(manifest["records"])

    doc = {
        "charts": charts,
        "descriptions": descriptions,
        "descriptions_per_chart": descriptions / charts if charts else 0.0,
        "grid": {f"{category}/{kind}": count
                 for (category, kind), count in sorted(grid.items())},
    }

    name_w = max(len(c) for c in CATEGORIES + ("total",))
    col_w = max(len(k) for k in KINDS + ("total",)) + 2
    header = " " * name_w + "".join(f"{k:>{col_w}}" for k in KINDS + ("total",))
    lines = [header]
    for category in CATEGORIES:
        row = [grid[(category, kind)] for kind in KINDS]
        cells = "".join(f"{v:>{col_w}}" for v in row + [sum(row)])
        lines.append(f"{category:<{name_w}}{cells}")
    col_totals = [sum(grid[(c, k)] for c in CATEGORIES) for k in KINDS]
    cells = "".join(f"{v:>{col_w}}" for v in col_totals + [charts])
    lines.append(f"{'total':<{name_w}}{cells}")
    lines.append("")
    lines.append(f"charts: {charts}")
    lines.append(f"descriptions: {descriptions}")
    if charts:
        lines.append(f"descriptions per chart: {descriptions / charts:.2f}")
    return doc, "\n".join(lines)


# ---------------------------------------------------------------------------
# validation


def _iter_bboxes(meta: ChartMeta):
    yield "title", meta.title.bbox
    yield "x_label", meta.x_label.bbox
    yield "y_label", meta.y_label.bbox
    for i, tick in enumerate(meta.x_ticks):
        yield f"x_tick[{i}]", tick.bbox
    for i, tick in enumerate(meta.y_ticks):
        yield f"y_tick[{i}]", tick.bbox
    yield "legend", meta.legend_bbox
    for i, entry in enumerate(meta.legend_entries):
        yield f"legend_entry[{i}].name", entry.name_bbox
        yield f"legend_entry[{i}].marker", entry.marker_bbox
    yield "plot_area", meta.plot_area


def _validate_record(root: Path, entry: dict, seen_counts: dict) -> List[str]:
    problems: List[str] = []
    idx = entry["image_index"]
    tag = f"record {idx:06d}"
    files = entry["files"]

    svg_path = root / files["chart"]
    meta_path = root / files["meta"]
    desc_path = root / files["descriptions"]
    for label, path in (("chart", svg_path), ("meta", meta_path),
                        ("descriptions", desc_path)):
        if not path.exists():
            problems.append(f"{tag}: missing {label} file {path.name}")
    if problems:
        return problems

    try:
        ET.fromstring(svg_path.read_bytes())
    except ET.ParseError as exc:
        problems.append(f"{tag}: chart svg does not parse: {exc}")

    try:
        meta = ChartMeta.from_json(meta_path.read_text(encoding="utf-8"))
    except (ValueError, KeyError, TypeError) as exc:
        problems.append(f"{tag}: meta does not parse: {exc}")
        return problems

    if meta.image_index != idx:
        problems.append(f"{tag}: meta image_index {meta.image_index} mismatch")
    if meta.category != entry["category"]:
        problems.append(f"{tag}: meta category {meta.category!r} mismatch, "
                        f"manifest says {entry['category']!r}")
    if meta.chart_kind != entry["kind"]:
        problems.append(f"{tag}: meta kind {meta.chart_kind!r} mismatch, "
                        f"manifest says {entry['kind']!r}")

    for name, bbox in _iter_bboxes(meta):
        if not bbox.within_canvas():
            problems.append(f"{tag}: {name} bbox outside canvas: {bbox.to_dict()}")

    axis = meta.value_axis
    for s, sm in enumerate(meta.series):
        for p_i, point in enumerate(sm.points):
            coord = point.x_canvas if axis.orientation == "x" else point.y_canvas
            expected = axis.to_canvas(point.value)
            if abs(expected - coord) > 0.5:
                problems.append(
                    f"{tag}: series[{s}].points[{p_i}] canvas coordinate "
                    f"{coord} is {abs(expected - coord):.3f} units from the "
                    f"value transform")
            if not (-0.5 <= point.x_canvas <= meta.canvas_width + 0.5
                    and -0.5 <= point.y_canvas <= meta.canvas_height + 0.5):
                problems.append(
                    f"{tag}: series[{s}].points[{p_i}] plotted off canvas")

    try:
        facts = extract_facts(meta)
    except (ValueError, KeyError) as exc:
        problems.append(f"{tag}: facts not extractable: {exc}")
        facts = None

    lines = desc_path.read_text(encoding="utf-8").splitlines()
    if not lines:
        problems.append(f"{tag}: description file is empty")
    if len(lines) != entry["n_descriptions"]:
        problems.append(
            f"{tag}: {len(lines)} description lines, manifest says "
            f"{entry['n_descriptions']}")
    for line_no, line in enumerate(lines):
        try:
            desc = Description.from_json_line(line)
        except (ValueError, KeyError, TypeError) as exc:
            problems.append(
                f"{tag}: description line {line_no} does not parse: {exc}")
            continue
        if desc.image_index != idx:
            problems.append(
                f"{tag}: description line {line_no} image_index "
                f"{desc.image_index} mismatch")
        if "{" in desc.text or "}" in desc.text:
            problems.append(
                f"{tag}: description line {line_no} has residual slots")
        violations = check_move_order(desc.moves)
        for violation in violations:
            problems.append(
                f"{tag}: description line {line_no} move order: {violation}")
        if facts is not None:
            for token in hallucination_check(desc.text, facts):
                problems.append(
                    f"{tag}: description line {line_no} digit token "
                    f"{token!r} matches no chart fact")

    seen_counts["charts"] += 1
    seen_counts["descriptions"] += len(lines)
    seen_counts["cells"][(entry["category"], entry["kind"])] = \
        seen_counts["cells"].get((entry["category"], entry["kind"]), 0) + 1
    return problems


def validate_corpus(corpus_dir) -> List[str]:
    """Re-check every invariant checkable from disk; empty list means clean.

    Never aborts early: all violations across all records are collected.
    """
    root = Path(corpus_dir)
    try:
        manifest = load_manifest(root)
    except (FileNotFoundError, json.JSONDecodeError) as exc:
        return [f"manifest: {exc}"]
    problems: List[str] = []
    if manifest.get("format_version") != FORMAT_VERSION:
        problems.append(
            f"manifest: unknown format_version {manifest.get('format_version')}")

    seen = {"charts": 0, "descriptions": 0, "cells": {}}
    indices = set()
    for entry in manifest.get("records", []):
        idx = entry["image_index"]
        if idx in indices:
            problems.append(f"manifest: duplicate image_index {idx}")
        indices.add(idx)
        problems.extend(_validate_record(root, entry, seen))

    totals = manifest.get("totals", {})
    if totals.get("charts") != seen["charts"]:
        problems.append(
            f"manifest: totals.charts {totals.get('charts')} but "
            f"{seen['charts']} records validated")
    if totals.get("descriptions") != seen["descriptions"]:
        problems.append(
            f"manifest: totals.descriptions {totals.get('descriptions')} but "
            f"{seen['descriptions']} description lines on disk")
    for cell in manifest.get("cells", []):
        key = (cell["category"], cell["kind"])
        actual = seen["cells"].get(key, 0)
        if cell["count"] != actual:
            problems.append(
                f"manifest: cell {key[0]}/{key[1]} declares {cell['count']} "
                f"records, found {actual}")

    for sub, suffix in (("charts", ".svg"), ("meta", ".json"),
                        ("descriptions", ".txt")):
        folder = root / sub
        if not folder.is_dir():
            problems.append(f"layout: missing directory {sub}/")
            continue
        on_disk = {p.name for p in folder.iterdir()}
        expected = {_record_name(i) + suffix for i in indices}
        for orphan in sorted(on_disk - expected):
            problems.append(f"layout: {sub}/{orphan} not in manifest")
    return problems
