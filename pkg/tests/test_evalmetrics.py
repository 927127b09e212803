"""Tokenizer and overlap-metric behavior, including the frozen oracle values."""

import math

import pytest

from chartscribe.evalmetrics import (
    EmptyReportError, ScoredPair, bleu, corpus_report, format_report,
    rouge_l, rouge_n, score_pair, tokenize,
)


def toks(text):
    return tokenize(text)


class TestTokenize:
    """Lowercasing, punctuation detachment, and the digit-interior exception."""

    def test_basic_sentence(self):
        assert toks("The cat sat.") == ["the", "cat", "sat", "."]

    def test_comma_detached_after_word(self):
        assert toks("In 1970, values rose") == ["in", "1970", ",", "values", "rose"]

    def test_decimal_point_kept_between_digits(self):
        assert toks("roughly 3.5 million") == ["roughly", "3.5", "million"]

    def test_thousands_comma_kept_between_digits(self):
        assert toks("about 120,000 tonnes") == ["about", "120,000", "tonnes"]

    def test_trailing_period_after_digits_detached(self):
        assert toks("ended in 2015.") == ["ended", "in", "2015", "."]

    def test_percent_sign_detached(self):
        assert toks("rose to 45%") == ["rose", "to", "45", "%"]

    def test_parentheses_detached(self):
        assert toks("(net)") == ["(", "net", ")"]

    def test_en_dash_is_own_token(self):
        assert toks("1994–1996") == ["1994", "–", "1996"]

    def test_empty_and_whitespace(self):
        assert toks("") == []
        assert toks("   \t\n") == []

    def test_lowercases(self):
        assert toks("Coffee EXPORTS") == ["coffee", "exports"]

    def test_unit_suffix_stays_attached(self):
        assert toks("300g per week") == ["300g", "per", "week"]


class TestBleu:
    """BLEU-4 with add-one smoothing and the closest-length brevity penalty."""

    def test_oracle_value(self):
        # all precisions 1 except the smoothed 4-gram order; c=3, r=4
        score = bleu(toks("the cat sat"), [toks("the cat sat down")], 4)
        assert abs(score - 100.0 * math.exp(1.0 - 4.0 / 3.0)) < 1e-9
        assert abs(score - 71.65) < 0.01

    def test_identity_scores_100(self):
        h = toks("a steady rise across the window")
        assert bleu(h, [list(h)], 4) == pytest.approx(100.0)

    def test_zero_unigram_overlap_scores_zero(self):
        assert bleu(toks("x y z"), [toks("p q r")], 4) == 0.0

    def test_empty_hypothesis_scores_zero(self):
        assert bleu([], [toks("a b")], 4) == 0.0

    def test_length_tie_picks_shorter_reference(self):
        # refs of length 2 and 4 are equally far from c=3; r=2 keeps BP=1
        score = bleu(toks("a b c"), [toks("a b"), toks("a b c d")], 4)
        assert score == pytest.approx(100.0)

    def test_smoothing_values_by_hand(self):
        # p1=3/5, p2=(0+1)/(4+1), p3=1/4, p4=1/3, BP=1
        score = bleu(toks("a x b y c"), [toks("a p b q c")], 4)
        expected = 100.0 * (0.6 * 0.2 * 0.25 * (1.0 / 3.0)) ** 0.25
        assert score == pytest.approx(expected)

    def test_longer_hypothesis_no_brevity_penalty(self):
        short = bleu(toks("a b c d"), [toks("a b c d")], 2)
        padded = bleu(toks("a b c d e"), [toks("a b c d")], 2)
        assert short == pytest.approx(100.0)
        assert padded < 100.0  # precision drops but BP stays 1

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            bleu(toks("a"), [], 4)
        with pytest.raises(ValueError):
            bleu(toks("a"), [toks("a")], 0)


class TestRougeN:
    """Clipped n-gram F1, maximized over references."""

    def test_identity(self):
        h = toks("values rose sharply after 2004")
        assert rouge_n(h, [list(h)], 1) == pytest.approx(100.0)
        assert rouge_n(h, [list(h)], 2) == pytest.approx(100.0)

    def test_disjoint(self):
        assert rouge_n(toks("a b"), [toks("c d")], 1) == 0.0

    def test_clipping(self):
        # hyp repeats a token the reference has once: overlap clips to 1
        score = rouge_n(toks("a a a"), [toks("a")], 1)
        assert score == pytest.approx(100.0 * 0.5)  # P=1/3, R=1, F1=0.5

    def test_max_over_references(self):
        h = toks("a b c")
        weak, strong = toks("a z z"), toks("a b c")
        assert rouge_n(h, [weak, strong], 1) == pytest.approx(100.0)

    def test_short_hypothesis_zero_for_high_order(self):
        assert rouge_n(toks("a"), [toks("a b")], 2) == 0.0


class TestRougeL:
    """LCS-based F1, maximized over references."""

    def test_oracle_value(self):
        assert rouge_l(toks("a b c"), [toks("a c")]) == pytest.approx(80.0)

    def test_identity(self):
        h = toks("the trend is flat")
        assert rouge_l(h, [list(h)]) == pytest.approx(100.0)

    def test_disjoint(self):
        assert rouge_l(toks("a b"), [toks("c d")]) == 0.0

    def test_non_contiguous_subsequence(self):
        # LCS=3, P=3/5, R=1, F1=0.75
        assert rouge_l(toks("a x b y c"), [toks("a b c")]) == pytest.approx(75.0)

    def test_empty_hypothesis(self):
        assert rouge_l([], [toks("a")]) == 0.0


class TestScoringAndReport:
    """score_pair convenience wrapper and the per-kind report."""

    def test_score_pair_identity(self):
        pair = score_pair("A steady rise.", ["A steady rise."], kind="line")
        for metric in ("bleu4", "rouge1", "rouge2", "rougeL"):
            assert pair.scores[metric] == pytest.approx(100.0)

    def test_score_pair_unknown_metric(self):
        with pytest.raises(ValueError):
            score_pair("a", ["a"], metrics=("bleu3",))

    def test_permutation_keeps_rouge1_drops_bleu(self):
        ref = "the value climbs steadily over the years shown"
        hyp = "shown years the over steadily climbs value the"
        pair = score_pair(hyp, [ref])
        assert pair.scores["rouge1"] == pytest.approx(100.0)
        assert pair.scores["bleu4"] < pair.scores["rouge1"]

    def test_report_groups_and_overall(self):
        pairs = [
            ScoredPair((), (), {"bleu4": 80.0}, "line"),
            ScoredPair((), (), {"bleu4": 60.0}, "line"),
            ScoredPair((), (), {"bleu4": 40.0}, "scatter"),
        ]
        rows = corpus_report(pairs)
        assert rows["line"]["bleu4"] == pytest.approx(70.0)
        assert rows["scatter"]["bleu4"] == pytest.approx(40.0)
        assert rows["overall"]["bleu4"] == pytest.approx(60.0)

    def test_report_rejects_empty(self):
        with pytest.raises(EmptyReportError):
            corpus_report([])

    def test_format_report_is_aligned_text(self):
        rows = corpus_report([ScoredPair((), (), {"bleu4": 50.0}, "line")])
        out = format_report(rows)
        assert "line" in out and "overall" in out and "bleu4" in out
