"""Tokenization and n-gram overlap metrics for description quality.

The tokenizer is frozen because every metric value depends on it:
lowercase, split on whitespace, and detach punctuation as single-character
tokens, except that '.' and ',' sitting directly between two digits stay
inside the token (decimals like 3.5 and groupings like 120,000 survive).

Scores are reported on a 0..100 scale.
"""

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

Tokens = Tuple[str, ...]


class EmptyReportError(ValueError):
    """corpus_report called with no scored pairs."""


def tokenize(text: str) -> List[str]:
    """Lowercase, whitespace-split, punctuation detached; '.'/',' kept
    when both neighbors are digits."""
    s = text.lower()
    out: List[str] = []
    buf: List[str] = []
    n = len(s)
    for i, ch in enumerate(s):
        if ch.isspace():
            if buf:
                out.append("".join(buf))
                buf = []
        elif ch.isalnum():
            buf.append(ch)
        elif ch in ".," and 0 < i < n - 1 and s[i - 1].isdigit() \
                and s[i + 1].isdigit():
            buf.append(ch)
        else:
            if buf:
                out.append("".join(buf))
                buf = []
            out.append(ch)
    if buf:
        out.append("".join(buf))
    return out


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(hyp: Sequence[str], refs: Sequence[Sequence[str]], max_n: int = 4) -> float:
    """BLEU with uniform weights, brevity penalty, and add-one smoothing
    applied to n >= 2 orders that have zero matches.  Zero unigram overlap
    scores 0."""
    if max_n < 1:
        raise ValueError(f"max_n: must be >= 1, got {max_n}")
    if not refs:
        raise ValueError("refs: need at least one reference")
    c = len(hyp)
    if c == 0:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        hyp_counts = _ngrams(hyp, n)
        total = max(c - n + 1, 0)
        best: Counter = Counter()
        for ref in refs:
            for gram, cnt in _ngrams(ref, n).items():
                if cnt > best[gram]:
                    best[gram] = cnt
        matched = sum(min(cnt, best[gram]) for gram, cnt in hyp_counts.items())
        if n == 1 and matched == 0:
            return 0.0
        if matched == 0 and n >= 2:
            p = (matched + 1) / (total + 1)
        else:
            p = matched / total
        log_sum += math.log(p)
    # brevity penalty against the reference length closest to c (ties: shorter)
    r = min((abs(len(ref) - c), len(ref)) for ref in refs)[1]
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)
    return 100.0 * bp * math.exp(log_sum / max_n)


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def rouge_n(hyp: Sequence[str], refs: Sequence[Sequence[str]], n: int) -> float:
    """ROUGE-N F1, maximum over references."""
    if n < 1:
        raise ValueError(f"n: must be >= 1, got {n}")
    if not refs:
        raise ValueError("refs: need at least one reference")
    hyp_counts = _ngrams(hyp, n)
    hyp_total = max(len(hyp) - n + 1, 0)
    best = 0.0
    for ref in refs:
        ref_counts = _ngrams(ref, n)
        ref_total = max(len(ref) - n + 1, 0)
        if hyp_total == 0 or ref_total == 0:
            continue
        overlap = sum(min(cnt, ref_counts[gram])
                      for gram, cnt in hyp_counts.items())
        best = max(best, _f1(overlap / hyp_total, overlap / ref_total))
    return 100.0 * best


def _lcs_len(a: Sequence[str], b: Sequence[str]) -> int:
    """Longest common subsequence length, two-row dynamic program."""
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        append = cur.append
        best = 0
        for j, y in enumerate(b):
            if x == y:
                v = prev[j] + 1
            else:
                v = cur[j] if cur[j] >= prev[j + 1] else prev[j + 1]
            append(v)
        prev = cur
    return prev[-1]


def rouge_l(hyp: Sequence[str], refs: Sequence[Sequence[str]]) -> float:
    """ROUGE-L F1 from LCS length, maximum over references."""
    if not refs:
        raise ValueError("refs: need at least one reference")
    if not hyp:
        return 0.0
    best = 0.0
    for ref in refs:
        if not ref:
            continue
        lcs = _lcs_len(hyp, ref)
        best = max(best, _f1(lcs / len(hyp), lcs / len(ref)))
    return 100.0 * best


@dataclass
class ScoredPair:
    hypothesis: Tokens
    references: Tuple[Tokens, ...]
    scores: Dict[str, float] = field(default_factory=dict)
    kind: str = ""


DEFAULT_METRICS = ("bleu4", "rouge1", "rouge2", "rougeL")


def score_pair(hyp_text: str, ref_texts: Sequence[str], kind: str = "",
               metrics: Sequence[str] = DEFAULT_METRICS) -> ScoredPair:
    """Tokenize and score one hypothesis against its references."""
    hyp = tuple(tokenize(hyp_text))
    refs = tuple(tuple(tokenize(r)) for r in ref_texts)
    scores: Dict[str, float] = {}
    for m in metrics:
        if m == "bleu4":
            scores[m] = bleu(hyp, refs, 4)
        elif m == "rouge1":
            scores[m] = rouge_n(hyp, refs, 1)
        elif m == "rouge2":
            scores[m] = rouge_n(hyp, refs, 2)
        elif m == "rougeL":
            scores[m] = rouge_l(hyp, refs)
        else:
            raise ValueError(f"metrics: unknown metric {m!r}")
    return ScoredPair(hyp, refs, scores, kind)


def corpus_report(pairs: Sequence[ScoredPair]) -> Dict[str, Dict[str, float]]:
    """Mean score per chart kind plus an unweighted overall row."""
    if not pairs:
        raise EmptyReportError("no scored pairs to report")
    metrics: List[str] = sorted({m for p in pairs for m in p.scores})
    rows: Dict[str, Dict[str, float]] = {}
    kinds = sorted({p.kind for p in pairs})
    for kind in kinds + ["overall"]:
        group = pairs if kind == "overall" else [p for p in pairs if p.kind == kind]
        rows[kind] = {
            m: sum(p.scores.get(m, 0.0) for p in group) / len(group)
            for m in metrics
        }
    return rows


def format_report(rows: Dict[str, Dict[str, float]]) -> str:
    """Aligned text table for a corpus_report result."""
    metrics = sorted({m for r in rows.values() for m in r})
    name_w = max(len(k) for k in rows)
    header = " " * name_w + "  " + "  ".join(f"{m:>8}" for m in metrics)
    lines = [header]
    for kind, row in rows.items():
        cells = "  ".join(f"{row[m]:8.2f}" for m in metrics)
        lines.append(f"{kind:<{name_w}}  {cells}")
    return "\n".join(lines)
