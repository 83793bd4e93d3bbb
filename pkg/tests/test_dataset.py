"""Tri-state matrix construction, union aggregation, and CSV round-trips."""

import logging

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import matrix_from
from typospace import (
    ABSENT,
    MISSING,
    PRESENT,
    DataError,
    ReferencePairs,
    TriStateMatrix,
    load_feature_csv,
    load_labels_csv,
    load_reference_csv,
    union_aggregate,
    write_feature_csv,
)


class TestTriStateMatrix:
    def test_shape_mismatch_rejected(self):
        with pytest.raises(DataError, match="shape"):
            TriStateMatrix(languages=["a", "b"], features=["F_1"], values=np.zeros((2, 2), dtype=np.int8))

    def test_duplicate_language_rejected(self):
        with pytest.raises(DataError, match="'dup'"):
            matrix_from([[1], [0]], languages=["dup", "dup"])

    def test_duplicate_feature_rejected(self):
        with pytest.raises(DataError, match="'F_same'"):
            matrix_from([[1, 0]], features=["F_same", "F_same"])

    def test_invalid_cell_value_rejected(self):
        with pytest.raises(DataError, match="invalid cell values"):
            matrix_from([[2]])

    def test_observed_mask_and_missing_fraction(self):
        m = matrix_from([[1, -1], [0, -1]])
        assert m.observed.tolist() == [[True, False], [True, False]]
        assert m.missing_fraction() == 0.5

    def test_select_features_out_of_range(self):
        m = matrix_from([[1, 0]])
        with pytest.raises(DataError, match="out of range"):
            m.select_features([2])

    def test_restrict_languages_unknown_code(self):
        m = matrix_from([[1], [0]], languages=["aaa", "bbb"])
        with pytest.raises(DataError, match="ccc"):
            m.restrict_languages(["aaa", "ccc"])

    def test_sorted_is_canonical(self):
        m = TriStateMatrix(
            languages=["bbb", "aaa"],
            features=["F_2", "F_1"],
            values=np.array([[1, 0], [-1, 1]], dtype=np.int8),
        )
        s = m.sorted()
        assert s.languages == ["aaa", "bbb"]
        assert s.features == ["F_1", "F_2"]
        assert s.values.tolist() == [[1, -1], [0, 1]]


class TestUnionAggregate:
    def test_present_beats_missing(self):
        a = matrix_from([[PRESENT]], languages=["x"], features=["F_1"])
        b = matrix_from([[MISSING]], languages=["x"], features=["F_1"])
        merged = union_aggregate([a, b])
        assert merged.values[0, 0] == PRESENT

    def test_absent_beats_missing(self):
        a = matrix_from([[ABSENT]], languages=["x"], features=["F_1"])
        b = matrix_from([[MISSING]], languages=["x"], features=["F_1"])
        merged = union_aggregate([a, b])
        assert merged.values[0, 0] == ABSENT

    def test_present_beats_absent_and_is_logged(self, caplog):
        a = matrix_from([[PRESENT]], languages=["x"], features=["F_1"])
        b = matrix_from([[ABSENT]], languages=["x"], features=["F_1"])
        with caplog.at_level(logging.INFO, logger="typospace.dataset"):
            merged = union_aggregate([a, b])
        assert merged.values[0, 0] == PRESENT
        assert any("conflict" in record.message for record in caplog.records)

    def test_conflict_matches_per_cell_fold(self):
        # fold rule applied cell by cell must agree with the vectorized merge
        rng = np.random.default_rng(11)
        sources = []
        for _ in range(3):
            vals = rng.integers(-1, 2, size=(4, 3)).astype(np.int8)
            sources.append(matrix_from(vals, languages=["a", "b", "c", "d"],
                                       features=["F_1", "F_2", "F_3"]))
        merged = union_aggregate(sources)
        for i, code in enumerate(merged.languages):
            for j, name in enumerate(merged.features):
                cells = []
                for src in sources:
                    cells.append(src.values[src.languages.index(code),
                                            src.features.index(name)])
                if PRESENT in cells:
                    expected = PRESENT
                elif ABSENT in cells:
                    expected = ABSENT
                else:
                    expected = MISSING
                assert merged.values[i, j] == expected

    def test_union_of_language_and_feature_sets(self):
        a = matrix_from([[1, 0]], languages=["aaa"], features=["F_1", "F_2"])
        b = matrix_from([[1], [0]], languages=["bbb", "ccc"], features=["F_3"])
        merged = union_aggregate([a, b])
        assert merged.languages == ["aaa", "bbb", "ccc"]
        assert merged.features == ["F_1", "F_2", "F_3"]

    def test_all_missing_language_dropped_with_warning(self, caplog):
        a = matrix_from([[1], [-1]], languages=["kept", "gone"], features=["F_1"])
        with caplog.at_level(logging.WARNING, logger="typospace.dataset"):
            merged = union_aggregate([a])
        assert merged.languages == ["kept"]
        assert any("gone" in record.message for record in caplog.records)

    def test_all_missing_feature_dropped_with_warning(self, caplog):
        a = matrix_from([[1, -1]], languages=["x"], features=["F_keep", "F_gone"])
        with caplog.at_level(logging.WARNING, logger="typospace.dataset"):
            merged = union_aggregate([a])
        assert merged.features == ["F_keep"]
        assert any("F_gone" in record.message for record in caplog.records)

    def test_idempotent_on_single_source(self):
        m = matrix_from([[1, 0], [-1, 1]], languages=["bbb", "aaa"],
                        features=["F_2", "F_1"])
        merged = union_aggregate([m])
        expected = m.sorted()
        assert merged.languages == expected.languages
        assert merged.features == expected.features
        assert np.array_equal(merged.values, expected.values)

    def test_order_insensitive(self):
        rng = np.random.default_rng(5)
        sources = [
            matrix_from(rng.integers(-1, 2, size=(3, 2)).astype(np.int8),
                        languages=[f"l{i}" for i in range(3)],
                        features=["F_1", "F_2"]),
            matrix_from(rng.integers(-1, 2, size=(2, 2)).astype(np.int8),
                        languages=["l1", "l5"],
                        features=["F_2", "F_3"]),
        ]
        forward = union_aggregate(sources)
        backward = union_aggregate(sources[::-1])
        assert forward.languages == backward.languages
        assert forward.features == backward.features
        assert np.array_equal(forward.values, backward.values)

    def test_every_retained_row_and_column_observed(self):
        rng = np.random.default_rng(17)
        vals = rng.integers(-1, 2, size=(8, 5)).astype(np.int8)
        merged = union_aggregate([matrix_from(vals)])
        observed = merged.values != MISSING
        assert observed.any(axis=1).all()
        assert observed.any(axis=0).all()

    def test_empty_source_list_rejected(self):
        with pytest.raises(DataError, match="at least one source"):
            union_aggregate([])


class TestFeatureCsv:
    def test_cell_parsing(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("language,F_1,F_2,F_3,F_4\nlng,1,0,-1,\n", encoding="utf-8")
        m = load_feature_csv(path)
        assert m.values.tolist() == [[PRESENT, ABSENT, MISSING, MISSING]]

    def test_non_rectangular_row_reports_line(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("language,F_1,F_2\nl1,1,0\nl2,1\n", encoding="utf-8")
        with pytest.raises(DataError, match="row 3"):
            load_feature_csv(path)

    def test_unparseable_cell_reports_location(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("language,F_1,F_2\nl1,1,x\n", encoding="utf-8")
        with pytest.raises(DataError, match="row 2.*'F_2'"):
            load_feature_csv(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("", encoding="utf-8")
        with pytest.raises(DataError, match="header"):
            load_feature_csv(path)

    def test_duplicate_language_in_file_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("language,F_1\nl1,1\nl1,0\n", encoding="utf-8")
        with pytest.raises(DataError, match="'l1'"):
            load_feature_csv(path)

    def test_round_trip(self, tmp_path):
        m = matrix_from([[1, -1, 0], [0, 1, -1]], languages=["bbb", "aaa"],
                        features=["F_2", "F_1", "F_3"])
        path = tmp_path / "m.csv"
        write_feature_csv(m, path)
        back = load_feature_csv(path)
        expected = m.sorted()
        assert back.languages == expected.languages
        assert back.features == expected.features
        assert np.array_equal(back.values, expected.values)

    @settings(max_examples=50, deadline=None)
    @given(data=st.data())
    def test_round_trip_random(self, data, tmp_path_factory):
        n_rows = data.draw(st.integers(1, 8))
        n_cols = data.draw(st.integers(1, 6))
        cells = data.draw(
            st.lists(
                st.lists(st.sampled_from([1, 0, -1]), min_size=n_cols, max_size=n_cols),
                min_size=n_rows,
                max_size=n_rows,
            )
        )
        m = matrix_from(cells)
        path = tmp_path_factory.mktemp("csv") / "m.csv"
        write_feature_csv(m, path)
        back = load_feature_csv(path)
        assert np.array_equal(back.values, m.sorted().values)


class TestLabelAndReferenceCsv:
    def test_labels_loaded(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("language,family\neng,Indo-European\n", encoding="utf-8")
        labels = load_labels_csv(path)
        assert labels.families == {"eng": "Indo-European"}

    def test_labels_duplicate_code_rejected(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("language,family\neng,A\neng,B\n", encoding="utf-8")
        with pytest.raises(DataError, match="'eng'.*row 3"):
            load_labels_csv(path)

    def test_labels_empty_file_is_valid(self, tmp_path):
        path = tmp_path / "labels.csv"
        path.write_text("", encoding="utf-8")
        assert load_labels_csv(path).families == {}

    def test_unmatched_labels_are_reported_not_dropped(self):
        from typospace import ClassLabels

        labels = ClassLabels(families={"aaa": "f1", "zzz": "f2"})
        idx, names, unmatched = labels.family_indices(["aaa", "bbb"])
        assert idx.tolist() == [0, -1]
        assert names == ["f1"]
        assert unmatched == ["zzz"]

    def test_reference_loaded(self, tmp_path):
        path = tmp_path / "ref.csv"
        path.write_text("lang_a,lang_b,score\naaa,bbb,0.25\n", encoding="utf-8")
        ref = load_reference_csv(path)
        assert ref.pairs == [("aaa", "bbb", 0.25)]
        assert ref.languages() == ["aaa", "bbb"]

    def test_reference_duplicate_unordered_pair_rejected(self, tmp_path):
        path = tmp_path / "ref.csv"
        path.write_text("a,b,s\naaa,bbb,0.1\nbbb,aaa,0.2\n", encoding="utf-8")
        with pytest.raises(DataError, match="duplicate language pair"):
            load_reference_csv(path)

    def test_reference_self_pair_rejected(self):
        with pytest.raises(DataError, match="self-pair"):
            ReferencePairs(pairs=[("aaa", "aaa", 0.0)])

    def test_reference_bad_score_reports_line(self, tmp_path):
        path = tmp_path / "ref.csv"
        path.write_text("a,b,s\naaa,bbb,oops\n", encoding="utf-8")
        with pytest.raises(DataError, match="row 2"):
            load_reference_csv(path)

    def test_reference_empty_file_is_valid(self, tmp_path):
        path = tmp_path / "ref.csv"
        path.write_text("", encoding="utf-8")
        assert len(load_reference_csv(path)) == 0
