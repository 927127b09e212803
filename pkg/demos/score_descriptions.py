"""Score structured descriptions against a shuffled baseline."""

from chartscribe import (
    ChartKind, Rng, baseline_generate, build_chart_spec, check_move_order,
    derive_seed, generate_description, load_default_bank, sample_series,
    score_pair, synth_catalog, render,
)

catalog = synth_catalog(seed=11, n_indicators=14, n_entities=18)
bank = load_default_bank()

kinds = [ChartKind.LINE, ChartKind.SCATTER, ChartKind.VERTICAL_BAR]
s_scores, b_scores = [], []
for i in range(12):
    rng = Rng(derive_seed(777, i))
    series = sample_series(catalog, temporal=True, arity=1 + i % 2, rng=rng,
                           min_len=3)
    spec = build_chart_spec(series, kinds[i % 3], rng, image_index=i)
    _, meta = render(spec)

    # Ten pseudo-references per chart, then one structured and one
    # baseline hypothesis scored against them
    refs = [generate_description(meta, series, bank, variant_index=v,
                                 rng=Rng(derive_seed(888, i, v))).text
            for v in range(10)]
    structured = generate_description(meta, series, bank, variant_index=99,
                                      rng=Rng(derive_seed(999, i)))
    baseline = baseline_generate(meta, series, bank, Rng(derive_seed(111, i)))

    s = score_pair(structured.text, refs, kind=meta.chart_kind)
    b = score_pair(baseline.text, refs, kind=meta.chart_kind)
    s_scores.append(s.scores)
    b_scores.append(b.scores)
    print(f"chart {i:2d} ({meta.chart_kind:<14})  "
          f"structured BLEU {s.scores['bleu4']:5.1f}  "
          f"baseline BLEU {b.scores['bleu4']:5.1f}  "
          f"order violations: structured={len(check_move_order(structured.moves))} "
          f"baseline={len(check_move_order(baseline.moves))}")

mean = lambda rows, m: sum(r[m] for r in rows) / len(rows)
print("\n              bleu4   rougeL")
print(f"structured   {mean(s_scores, 'bleu4'):6.2f}   {mean(s_scores, 'rougeL'):6.2f}")
print(f"baseline     {mean(b_scores, 'bleu4'):6.2f}   {mean(b_scores, 'rougeL'):6.2f}")
