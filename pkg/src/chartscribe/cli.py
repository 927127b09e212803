"""Command-line interface.

Five subcommands cover the corpus life cycle:

    chartscribe generate --config corpus.ini [--seed N] [--count-scale F]
                         [--out DIR] [--jobs N]
    chartscribe stats CORPUS_DIR
    chartscribe validate CORPUS_DIR
    chartscribe describe --meta META_JSON [--bank BANK] [--seed N]
                         [--variants N]
    chartscribe eval --hyp FILE --ref FILE [--ref FILE ...]
                     [--by-kind MANIFEST] [--json-out FILE]

`validate` exits nonzero when violations are found; everything else exits
nonzero only on usage or I/O errors.
"""

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from .chartgen import ChartMeta
from .corpus import (
    ConfigError, CorpusConfig, default_config, generate_corpus, load_config,
    load_manifest, stats, validate_corpus,
)
from .evalmetrics import corpus_report, format_report, score_pair
from .narrate import generate_description_set
from .rng import Rng
from .templatebank import load_bank, load_default_bank


class CliError(Exception):
    """User-facing failure; main() prints it and exits 2."""


def _cmd_generate(args) -> int:
    if args.config is None and args.seed is None:
        raise CliError("generate: need --config or --seed")
    if args.config is not None:
        config = load_config(args.config)
    else:
        config = default_config(seed=args.seed)
    overrides = {}
    if args.config is not None and args.seed is not None:
        overrides["seed"] = args.seed
    if args.count_scale is not None:
        overrides["count_scale"] = args.count_scale
    if args.out is not None:
        overrides["output_dir"] = args.out
    if overrides:
        config = dataclasses.replace(config, **overrides)
    manifest = generate_corpus(config, jobs=args.jobs)
    totals = manifest["totals"]
    print(f"wrote {totals['charts']} charts, {totals['descriptions']} "
          f"descriptions to {config.output_dir}")
    return 0


def _cmd_stats(args) -> int:
    _, table = stats(args.corpus_dir)
    print(table)
    return 0


def _cmd_validate(args) -> int:
    problems = validate_corpus(args.corpus_dir)
    for problem in problems:
        print(problem)
    if problems:
        print(f"{len(problems)} violation(s)")
        return 1
    manifest = load_manifest(args.corpus_dir)
    print(f"ok: {manifest['totals']['charts']} charts, "
          f"{manifest['totals']['descriptions']} descriptions, 0 violations")
    return 0


def _cmd_describe(args) -> int:
    meta_path = Path(args.meta)
    if not meta_path.exists():
        raise CliError(f"describe: no meta file at {args.meta}")
    meta = ChartMeta.from_json(meta_path.read_text(encoding="utf-8"))
    bank = (load_default_bank() if args.bank == "builtin"
            else load_bank(args.bank))
    descriptions = generate_description_set(
        meta, None, bank, Rng(args.seed), n_variants=args.variants)
    for desc in descriptions:
        print(desc.to_json_line())
    return 0


def _read_scored_lines(path) -> Dict[object, List[str]]:
    """Parse an eval input file into {key: [text, ...]}.

    Lines that parse as JSON objects are keyed by their image_index and
    contribute their "text" field; anything else is a plain text line
    keyed by line number.  A file must not mix the two styles.
    """
    texts: Dict[object, List[str]] = {}
    styles = set()
    raw = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(raw.splitlines()):
        if not line.strip():
            continue
        key: object
        try:
            doc = json.loads(line)
        except json.JSONDecodeError:
            doc = None
        if isinstance(doc, dict) and "text" in doc:
            key = doc.get("image_index", line_no)
            text = doc["text"]
            styles.add("json")
        else:
            key = line_no
            text = line
            styles.add("plain")
        texts.setdefault(key, []).append(text)
    if len(styles) > 1:
        raise CliError(f"eval: {path} mixes JSON and plain-text lines")
    if not texts:
        raise CliError(f"eval: {path} is empty")
    return texts


def _kind_lookup(manifest_path) -> Dict[int, str]:
    manifest = json.loads(Path(manifest_path).read_text(encoding="utf-8"))
    return {entry["image_index"]: entry["kind"]
            for entry in manifest["records"]}


def _cmd_eval(args) -> int:
    hyps = _read_scored_lines(args.hyp)
    refs: Dict[object, List[str]] = {}
    for ref_path in args.ref:
        for key, texts in _read_scored_lines(ref_path).items():
            refs.setdefault(key, []).extend(texts)

    kinds: Optional[Dict[int, str]] = None
    if args.by_kind is not None:
        kinds = _kind_lookup(args.by_kind)

    pairs = []
    missing = [key for key in hyps if key not in refs]
    if missing:
        raise CliError(
            f"eval: {len(missing)} hypothesis key(s) have no reference, "
            f"first: {missing[0]!r}")
    for key, hyp_texts in sorted(hyps.items(), key=lambda kv: str(kv[0])):
        kind = "all"
        if kinds is not None:
            if not isinstance(key, int) or key not in kinds:
                raise CliError(f"eval: key {key!r} not in --by-kind manifest")
            kind = kinds[key]
        for hyp_text in hyp_texts:
            pairs.append(score_pair(hyp_text, refs[key], kind=kind))

    report = corpus_report(pairs)
    print(format_report(report))
    if args.json_out is not None:
        Path(args.json_out).write_text(
            json.dumps(report, indent=1, sort_keys=True) + "\n",
            encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chartscribe",
        description="Deterministic chart and description corpus generator.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a corpus")
    p.add_argument("--config", help="INI config file")
    p.add_argument("--seed", type=int, help="global seed (overrides config)")
    p.add_argument("--count-scale", type=float, dest="count_scale",
                   help="scale every cell count (floor, min 1)")
    p.add_argument("--out", help="output directory (overrides config)")
    p.add_argument("--jobs", type=int, default=1,
                   help="worker processes (default 1)")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("stats", help="print the category/kind grid")
    p.add_argument("corpus_dir")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("validate", help="check a corpus on disk")
    p.add_argument("corpus_dir")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("describe",
                       help="generate descriptions for one chart's metadata")
    p.add_argument("--meta", required=True, help="chart metadata JSON file")
    p.add_argument("--bank", default="builtin",
                   help="template bank TSV, or 'builtin'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--variants", type=int, default=3)
    p.set_defaults(func=_cmd_describe)

    p = sub.add_parser("eval", help="score hypotheses against references")
    p.add_argument("--hyp", required=True,
                   help="hypothesis file (JSON lines or plain text)")
    p.add_argument("--ref", required=True, action="append",
                   help="reference file; repeatable")
    p.add_argument("--by-kind", dest="by_kind",
                   help="corpus manifest, groups scores by chart kind")
    p.add_argument("--json-out", dest="json_out",
                   help="also write the report as JSON")
    p.set_defaults(func=_cmd_eval)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, ConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
