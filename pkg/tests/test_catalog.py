"""Tests for catalog ingest, synthesis, sampling, and perturbation."""

import pytest

from chartscribe.catalog import (
    Catalog,
    CatalogFormatError,
    DataSeries,
    Entity,
    Indicator,
    InsufficientCoverageError,
    load_catalog,
    perturb_to_trend,
    sample_series,
    synth_catalog,
    write_catalog,
)
from chartscribe.rng import Rng
from chartscribe.trend import ParameterError, TrendClass, classify_trend, preset


def small_catalog():
    inds = {
        "co2": Indicator("co2", "CO2 emission", "kt", "float"),
        "lit": Indicator("lit", "literacy rate", "%", "percentage"),
    }
    ents = {
        "usa": Entity("usa", "United States", "country"),
        "sgp": Entity("sgp", "Singapore", "country"),
        "bra": Entity("bra", "Brazil", "country"),
    }
    obs = {
        ("co2", "usa"): {y: 5000.0 + 10 * (y - 1990) for y in range(1990, 2008)},
        ("co2", "sgp"): {y: 40.0 + (y - 1992) for y in range(1992, 2010)},
        ("co2", "bra"): {y: 400.0 + 5 * (y - 1990) for y in range(1990, 2006)},
        ("lit", "usa"): {y: 95.0 for y in range(2000, 2012)},
        ("lit", "sgp"): {y: 90.0 + 0.1 * (y - 2000) for y in range(2000, 2012)},
    }
    return Catalog(inds, ents, obs)


class TestCatalogValidation:
    def test_value_out_of_bounds_rejected(self):
        inds = {"p": Indicator("p", "share", "%", "percentage")}
        ents = {"e": Entity("e", "Erewhon", "country")}
        with pytest.raises(CatalogFormatError, match="outside"):
            Catalog(inds, ents, {("p", "e"): {2000: 123.0}})

    def test_year_out_of_range_rejected(self):
        inds = {"c": Indicator("c", "count", "units", "float")}
        ents = {"e": Entity("e", "Erewhon", "country")}
        with pytest.raises(CatalogFormatError, match="year"):
            Catalog(inds, ents, {("c", "e"): {1900: 5.0}})

    def test_unknown_indicator_rejected(self):
        ents = {"e": Entity("e", "Erewhon", "country")}
        with pytest.raises(CatalogFormatError, match="unknown indicator"):
            Catalog({}, ents, {("x", "e"): {2000: 1.0}})

    def test_stats(self):
        cat = small_catalog()
        s = cat.stats()
        assert s["indicators"] == 2
        assert s["entities"] == 3
        assert s["observations"] == sum(len(v) for v in cat.observations.values())


class TestFileFormat:
    def test_round_trip(self, tmp_path):
        cat = small_catalog()
        path = tmp_path / "cat.csv"
        write_catalog(cat, path)
        assert load_catalog(path) == cat

    def test_three_row_file(self, tmp_path):
        (tmp_path / "c.dict.csv").write_text(
            "# catalog-dict v1\n"
            "I,pop,population,people,positive-integer\n"
            "E,nor,Norway,country\n"
        )
        (tmp_path / "c.csv").write_text(
            "# catalog-data v1\n"
            "pop,nor,2000,4478497\n"
            "pop,nor,2001,4503436\n"
            "pop,nor,2002,4524066\n"
        )
        cat = load_catalog(tmp_path / "c.csv")
        assert cat.stats()["observations"] == 3
        assert cat.observations[("pop", "nor")][2001] == 4503436.0

    def test_percentage_overflow_names_line(self, tmp_path):
        (tmp_path / "c.dict.csv").write_text(
            "# catalog-dict v1\nI,sh,share,%,percentage\nE,nor,Norway,country\n"
        )
        (tmp_path / "c.csv").write_text(
            "# catalog-data v1\nsh,nor,2000,50.0\nsh,nor,2001,123.0\n"
        )
        with pytest.raises(CatalogFormatError, match=":3:"):
            load_catalog(tmp_path / "c.csv")

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_catalog(tmp_path / "absent.csv")

    def test_malformed_row(self, tmp_path):
        (tmp_path / "c.dict.csv").write_text(
            "# catalog-dict v1\nI,sh,share,kt,float\nE,nor,Norway,country\n"
        )
        (tmp_path / "c.csv").write_text("# catalog-data v1\nsh,nor,2000\n")
        with pytest.raises(CatalogFormatError, match="4 fields"):
            load_catalog(tmp_path / "c.csv")

    def test_bad_header(self, tmp_path):
        (tmp_path / "c.dict.csv").write_text("# catalog-dict v1\n")
        (tmp_path / "c.csv").write_text("indicator,entity,year,value\n")
        with pytest.raises(CatalogFormatError, match=":1:"):
            load_catalog(tmp_path / "c.csv")

    def test_names_with_commas_round_trip(self, tmp_path):
        inds = {"g": Indicator("g", "GDP, nominal", "million USD", "float")}
        ents = {"e": Entity("e", "Province, North", "state")}
        cat = Catalog(inds, ents, {("g", "e"): {2000: 1.5, 2001: 2.5}})
        write_catalog(cat, tmp_path / "c.csv")
        assert load_catalog(tmp_path / "c.csv") == cat


class TestSynthCatalog:
    def test_deterministic(self):
        assert synth_catalog(7, 2, 2) == synth_catalog(7, 2, 2)

    def test_seed_changes_output(self):
        assert synth_catalog(7, 2, 2) != synth_catalog(8, 2, 2)

    def test_requested_counts(self):
        cat = synth_catalog(7, 12, 9)
        assert len(cat.indicators) == 12
        assert len(cat.entities) == 9

    def test_large_scale_counts(self):
        cat = synth_catalog(7, 346, 76)
        s = cat.stats()
        assert s["indicators"] == 346
        assert s["entities"] == 76
        assert s["observations"] > 0

    def test_percentage_bounds(self):
        cat = synth_catalog(3, 40, 10)
        for (ind_id, _), by_year in cat.observations.items():
            if cat.indicators[ind_id].value_kind != "percentage":
                continue
            assert all(0.0 <= v <= 100.0 for v in by_year.values())

    def test_zero_counts_rejected(self):
        with pytest.raises(ParameterError):
            synth_catalog(1, 0, 5)
        with pytest.raises(ParameterError):
            synth_catalog(1, 5, 0)

    def test_synth_round_trips_through_files(self, tmp_path):
        cat = synth_catalog(11, 6, 5)
        write_catalog(cat, tmp_path / "c.csv")
        assert load_catalog(tmp_path / "c.csv") == cat


class TestSampleSeries:
    def test_temporal_single(self):
        cat = small_catalog()
        got = sample_series(cat, temporal=True, arity=1, rng=Rng(1))
        assert len(got) == 1
        s = got[0]
        assert s.temporal
        assert 2 <= len(s.x_labels) <= 8
        assert s.series_name in {"United States", "Singapore", "Brazil"}

    def test_temporal_years_consecutive(self):
        cat = synth_catalog(5, 20, 10)
        rng = Rng(2)
        for _ in range(100):
            (s,) = sample_series(cat, temporal=True, arity=1, rng=rng)
            years = [int(x) for x in s.x_labels]
            assert all(b - a == 1 for a, b in zip(years, years[1:]))

    def test_arity_two_shares_labels_and_unit(self):
        cat = synth_catalog(5, 20, 10)
        rng = Rng(3)
        for temporal in (True, False):
            for _ in range(20):
                a, b = sample_series(cat, temporal=temporal, arity=2, rng=rng)
                assert a.x_labels == b.x_labels
                assert a.y_unit == b.y_unit
                assert a.series_name != b.series_name

    def test_tick_counts_cover_full_range(self):
        cat = synth_catalog(5, 20, 10)
        rng = Rng(4)
        seen = set()
        for _ in range(1000):
            (s,) = sample_series(cat, temporal=True, arity=1, rng=rng)
            seen.add(len(s.x_labels))
        assert seen == {2, 3, 4, 5, 6, 7, 8}

    def test_categorical_labels_are_entity_names(self):
        cat = synth_catalog(5, 20, 12)
        rng = Rng(5)
        names = {e.name for e in cat.entities.values()}
        for _ in range(50):
            (s,) = sample_series(cat, temporal=False, arity=1, rng=rng)
            assert not s.temporal
            assert set(s.x_labels) <= names
            assert len(set(s.x_labels)) == len(s.x_labels)

    def test_min_len_respected(self):
        cat = synth_catalog(5, 20, 10)
        rng = Rng(6)
        for _ in range(100):
            (s,) = sample_series(cat, temporal=True, arity=1, rng=rng, min_len=5)
            assert len(s.x_labels) >= 5

    def test_single_pair_catalog(self):
        inds = {"c": Indicator("c", "counts", "units", "float")}
        ents = {"e": Entity("e", "Erewhon", "country")}
        obs = {("c", "e"): {y: float(y) - 1980.0 for y in range(1990, 1998)}}
        cat = Catalog(inds, ents, obs)
        (s,) = sample_series(cat, temporal=True, arity=1, rng=Rng(1))
        assert s.series_name == "Erewhon"
        assert set(int(x) for x in s.x_labels) <= set(range(1990, 1998))

    def test_insufficient_coverage(self):
        inds = {"c": Indicator("c", "counts", "units", "float")}
        ents = {"e": Entity("e", "Erewhon", "country")}
        obs = {("c", "e"): {2000: 1.0}}
        cat = Catalog(inds, ents, obs)
        with pytest.raises(InsufficientCoverageError):
            sample_series(cat, temporal=True, arity=1, rng=Rng(1))

    def test_deterministic_given_rng(self):
        cat = synth_catalog(5, 20, 10)
        assert sample_series(cat, True, 1, Rng(9)) == sample_series(cat, True, 1, Rng(9))

    def test_values_within_kind_bounds(self):
        cat = synth_catalog(5, 30, 10)
        rng = Rng(10)
        for _ in range(100):
            (s,) = sample_series(cat, temporal=True, arity=1, rng=rng)
            if s.value_kind == "percentage":
                assert all(0 <= v <= 100 for v in s.y_values)
            else:
                assert all(0 <= v <= 3.5e15 for v in s.y_values)


class TestPerturbToTrend:
    def base_series(self, values, value_kind="float"):
        years = [str(1990 + i) for i in range(len(values))]
        return DataSeries("Singapore", years, values, "kt", True,
                          indicator_name="CO2 emission", value_kind=value_kind)

    def test_plateau_output_is_flat(self):
        s = self.base_series([10.0, 220.0, 40.0, 160.0, 90.0, 130.0])
        spec = preset(TrendClass.PLATEAU, n_points=6)
        out = perturb_to_trend(s, spec, Rng(1))
        mean = sum(out.y_values) / len(out.y_values)
        assert (max(out.y_values) - min(out.y_values)) / mean < 0.05

    def test_percentage_stays_in_bounds(self):
        s = self.base_series([55.0, 60.0, 58.0, 90.0, 99.0, 97.0], "percentage")
        for cls in TrendClass:
            spec = preset(cls, n_points=6)
            out = perturb_to_trend(s, spec, Rng(2))
            assert all(0.0 <= v <= 100.0 for v in out.y_values)

    def test_output_classifies_as_requested(self):
        s = self.base_series([30.0, 45.0, 80.0, 50.0, 70.0, 20.0])
        for cls in TrendClass:
            for seed in range(20):
                out = perturb_to_trend(s, preset(cls, n_points=6), Rng(seed))
                assert classify_trend(out.y_values) is cls

    def test_narrow_series_still_realizes_trends(self):
        # original range far below the classifier's plateau cutoff
        s = self.base_series([1000.0, 1000.5, 1001.0, 1000.2, 1000.8])
        out = perturb_to_trend(s, preset(TrendClass.CONVEX_INCREASE, n_points=5), Rng(3))
        assert classify_trend(out.y_values) is TrendClass.CONVEX_INCREASE

    def test_labels_and_names_unchanged(self):
        s = self.base_series([30.0, 45.0, 80.0, 50.0, 70.0, 20.0])
        out = perturb_to_trend(s, preset(TrendClass.LINEAR_DECREASE, n_points=6), Rng(4))
        assert out.x_labels == s.x_labels
        assert out.series_name == s.series_name
        assert out.y_unit == s.y_unit
        assert out.indicator_name == s.indicator_name

    def test_directional_output_within_original_envelope(self):
        s = self.base_series([30.0, 45.0, 80.0, 50.0, 70.0, 20.0])
        out = perturb_to_trend(s, preset(TrendClass.LINEAR_INCREASE, n_points=6), Rng(5))
        assert min(out.y_values) >= 20.0 - 1e-9
        assert max(out.y_values) <= 80.0 + 1e-9

    def test_length_mismatch_rejected(self):
        s = self.base_series([1.0, 2.0, 3.0])
        with pytest.raises(ParameterError, match="n_points"):
            perturb_to_trend(s, preset(TrendClass.PLATEAU, n_points=6), Rng(1))

    def test_deterministic(self):
        s = self.base_series([30.0, 45.0, 80.0, 50.0, 70.0, 20.0])
        spec = preset(TrendClass.CONCAVE_INCREASE, n_points=6)
        a = perturb_to_trend(s, spec, Rng(6))
        b = perturb_to_trend(s, spec, Rng(6))
        assert a == b


class TestDataSeriesInvariants:
    def test_length_bounds(self):
        with pytest.raises(ParameterError):
            DataSeries("x", ["2000"], [1.0], "kt", True)
        with pytest.raises(ParameterError):
            DataSeries("x", [str(2000 + i) for i in range(9)],
                       [float(i) for i in range(9)], "kt", True)

    def test_label_value_mismatch(self):
        with pytest.raises(ParameterError):
            DataSeries("x", ["2000", "2001"], [1.0], "kt", True)

    def test_temporal_flag_must_match_labels(self):
        with pytest.raises(ParameterError):
            DataSeries("x", ["France", "Spain"], [1.0, 2.0], "kt", True)
        with pytest.raises(ParameterError):
            DataSeries("x", ["2000", "2001"], [1.0, 2.0], "kt", False)
