"""Angular distance and the pairwise distance matrix."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

import oracles
from typospace import (
    DataError,
    UndefinedDistanceError,
    angular_distance,
    distance_matrix,
)
from typospace.distance import write_distance_long_csv, write_distance_square_csv

positive_vectors = hnp.arrays(
    np.float64,
    st.integers(2, 8),
    elements=st.floats(0.0, 5.0, allow_nan=False),
).filter(lambda v: np.linalg.norm(v) > 1e-6)


class TestAngularDistance:
    def test_half_for_forty_five_degrees(self):
        d = angular_distance(np.array([1.0, 1.0, 0.0]), np.array([1.0, 0.0, 0.0]))
        assert d == pytest.approx(0.5, abs=1e-12)
        assert d == pytest.approx(
            oracles.angular_distance_oracle([1, 1, 0], [1, 0, 0]), abs=1e-15
        )

    def test_identical_vectors_at_zero(self):
        v = np.array([0.2, 0.7, 0.1])
        assert angular_distance(v, v) == 0.0

    def test_disjoint_support_at_one(self):
        d = angular_distance(np.array([1.0, 1.0, 0.0, 0.0]), np.array([0.0, 0.0, 1.0, 1.0]))
        assert d == pytest.approx(1.0, abs=1e-12)

    def test_zero_vector_rejected(self):
        with pytest.raises(UndefinedDistanceError, match="zero"):
            angular_distance(np.zeros(3), np.array([1.0, 0.0, 0.0]))
        with pytest.raises(UndefinedDistanceError, match="zero"):
            angular_distance(np.array([1.0, 0.0, 0.0]), np.zeros(3))

    def test_shape_mismatch_rejected(self):
        with pytest.raises(DataError, match="equal length"):
            angular_distance(np.ones(3), np.ones(4))
        with pytest.raises(DataError, match="1-d"):
            angular_distance(np.ones((2, 2)), np.ones((2, 2)))

    @settings(max_examples=200, deadline=None)
    @given(x=positive_vectors)
    def test_self_distance_near_zero(self, x):
        # arccos amplifies ulp-level cosine noise near 1 to ~1e-8
        assert angular_distance(x, x) <= 1e-7

    @settings(max_examples=200, deadline=None)
    @given(data=st.data())
    def test_symmetry_and_range(self, data):
        x = data.draw(positive_vectors)
        y = data.draw(
            hnp.arrays(
                np.float64,
                len(x),
                elements=st.floats(0.0, 5.0, allow_nan=False),
            ).filter(lambda v: np.linalg.norm(v) > 1e-6)
        )
        d = angular_distance(x, y)
        assert d == angular_distance(y, x)
        assert 0.0 <= d <= 1.0

    @settings(max_examples=200, deadline=None)
    @given(data=st.data(), scale=st.floats(0.01, 100.0))
    def test_scale_invariance(self, data, scale):
        x = data.draw(positive_vectors)
        y = data.draw(
            hnp.arrays(
                np.float64,
                len(x),
                elements=st.floats(0.0, 5.0, allow_nan=False),
            ).filter(lambda v: np.linalg.norm(v) > 1e-6)
        )
        # colinear draws hit the same arccos amplification as self-distance
        assert angular_distance(scale * x, y) == pytest.approx(
            angular_distance(x, y), abs=1e-7
        )

    def test_triangle_inequality_on_random_triples(self):
        rng = np.random.default_rng(31)
        for _ in range(2000):
            x, y, z = rng.random((3, 6)) + 1e-3
            dxy = angular_distance(x, y)
            dyz = angular_distance(y, z)
            dxz = angular_distance(x, z)
            assert dxz <= dxy + dyz + 1e-9

    def test_matches_pure_math_oracle(self):
        rng = np.random.default_rng(32)
        for _ in range(200):
            x, y = rng.random((2, 5)) + 1e-3
            assert angular_distance(x, y) == pytest.approx(
                oracles.angular_distance_oracle(x, y), abs=1e-12
            )


class TestDistanceMatrix:
    def vectors(self):
        return np.array([
            [1.0, 1.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0],
        ])

    def test_pairwise_values(self):
        dm = distance_matrix(self.vectors(), ["aa", "bb", "cc"])
        assert dm.values[0, 1] == pytest.approx(0.5, abs=1e-12)
        assert dm.values[0, 2] == pytest.approx(1.0, abs=1e-12)
        assert dm.values[1, 2] == pytest.approx(1.0, abs=1e-12)
        assert dm.defined.all()
        assert np.array_equal(dm.values, dm.values.T)
        assert (np.diag(dm.values) == 0.0).all()

    def test_lookup_by_name(self):
        dm = distance_matrix(self.vectors(), ["aa", "bb", "cc"])
        assert dm.lookup("aa", "bb") == pytest.approx(0.5, abs=1e-12)
        assert dm.lookup("bb", "aa") == dm.lookup("aa", "bb")
        with pytest.raises(DataError, match="'zz'"):
            dm.lookup("aa", "zz")

    def test_zero_vector_rows_marked_undefined(self):
        vectors = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0]])
        dm = distance_matrix(vectors, ["aa", "bb", "cc"])
        assert not dm.defined[0, 1] and not dm.defined[1, 1] and not dm.defined[1, 2]
        assert dm.defined[0, 2]
        assert np.isnan(dm.values[0, 1])
        assert dm.values[0, 2] == pytest.approx(1.0, abs=1e-12)

    def test_single_language(self):
        dm = distance_matrix(np.array([[1.0, 2.0]]), ["aa"])
        assert dm.n_languages == 1
        assert dm.values[0, 0] == 0.0
        assert dm.defined[0, 0]

    def test_row_count_mismatch_rejected(self):
        with pytest.raises(DataError, match="one row per language"):
            distance_matrix(np.ones((2, 3)), ["aa"])

    def test_slicing_commutes_with_computation(self):
        rng = np.random.default_rng(33)
        vectors = rng.random((8, 5)) + 1e-3
        names = [f"l{i}" for i in range(8)]
        full = distance_matrix(vectors, names)
        keep = [1, 3, 6]
        sub = distance_matrix(vectors[keep], [names[i] for i in keep])
        assert sub.values == pytest.approx(full.values[np.ix_(keep, keep)], abs=1e-12)

    def test_matches_elementwise_route(self):
        rng = np.random.default_rng(34)
        vectors = rng.random((6, 4)) + 1e-3
        dm = distance_matrix(vectors, [f"l{i}" for i in range(6)])
        for i in range(6):
            for j in range(6):
                if i == j:
                    continue
                assert dm.values[i, j] == pytest.approx(
                    angular_distance(vectors[i], vectors[j]), abs=1e-9
                )


class TestDistanceCsv:
    def build(self):
        vectors = np.array([[1.0, 1.0], [1.0, 0.0], [0.0, 0.0]])
        return distance_matrix(vectors, ["bbb", "aaa", "zzz"])

    def test_square_layout_sorted_with_empty_undefined(self, tmp_path):
        path = tmp_path / "square.csv"
        write_distance_square_csv(path, self.build())
        rows = path.read_text(encoding="utf-8").splitlines()
        assert rows[0] == "language,aaa,bbb,zzz"
        assert rows[1].startswith("aaa,0,0.5,")
        assert rows[1].endswith(",")  # undefined pair with zzz left empty
        assert rows[3] == "zzz,,,"

    def test_long_layout_defined_pairs_only(self, tmp_path):
        path = tmp_path / "long.csv"
        write_distance_long_csv(path, self.build())
        rows = path.read_text(encoding="utf-8").splitlines()
        assert rows[0] == "language_a,language_b,distance"
        assert len(rows) == 2  # only aaa-bbb is defined
        assert rows[1].startswith("aaa,bbb,0.5")
