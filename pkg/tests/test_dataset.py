import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from datacopy.dataset import PointSet, generate_moons, load_point_set, save_point_set, split

finite_matrices = arrays(
    dtype=np.float64,
    shape=st.tuples(st.integers(1, 12), st.integers(1, 4)),
    elements=st.floats(-1e12, 1e12, allow_nan=False, allow_infinity=False),
)


class TestPointSet:
    def test_rejects_nan_and_inf(self):
        with pytest.raises(ValueError, match="NaN or infinite"):
            PointSet(np.array([[0.0, np.nan]]))
        with pytest.raises(ValueError, match="NaN or infinite"):
            PointSet(np.array([[np.inf, 1.0]]))

    def test_rejects_empty_and_non_2d(self):
        with pytest.raises(ValueError):
            PointSet(np.empty((0, 2)))
        with pytest.raises(ValueError):
            PointSet(np.array([1.0, 2.0]))

    def test_rejects_unknown_role(self):
        with pytest.raises(ValueError, match="role"):
            PointSet(np.zeros((1, 1)), "bogus")

    def test_immutable_after_construction(self):
        ps = PointSet(np.zeros((2, 2)))
        with pytest.raises(ValueError):
            ps.points[0, 0] = 1.0

    def test_dim_and_n(self):
        ps = PointSet(np.zeros((3, 2)), "test")
        assert (ps.n, ps.dim) == (3, 2)


class TestCsv:
    def test_basic_parse(self, tmp_path):
        p = tmp_path / "a.csv"
        p.write_text("0,0\n1,2\n")
        ps = load_point_set(str(p), "train")
        np.testing.assert_array_equal(ps.points, [[0, 0], [1, 2]])

    def test_header_skipped(self, tmp_path):
        p = tmp_path / "h.csv"
        p.write_text("x,y\n0,0\n")
        ps = load_point_set(str(p))
        assert ps.points.shape == (1, 2)

    def test_ragged_row_names_line(self, tmp_path):
        p = tmp_path / "r.csv"
        p.write_text("0,0\n1\n")
        with pytest.raises(ValueError, match="line 2"):
            load_point_set(str(p))

    def test_non_numeric_cell_names_line_and_column(self, tmp_path):
        p = tmp_path / "c.csv"
        p.write_text("0,0\n1,zap\n")
        with pytest.raises(ValueError, match="line 2, column 2"):
            load_point_set(str(p))

    def test_empty_file_rejected(self, tmp_path):
        p = tmp_path / "e.csv"
        p.write_text("")
        with pytest.raises(ValueError, match="no data rows"):
            load_point_set(str(p))

    def test_single_value_shortest_repr(self, tmp_path):
        p = tmp_path / "one.csv"
        save_point_set(PointSet(np.array([[0.1]])), str(p))
        assert p.read_text() == "0.1\n"
        assert load_point_set(str(p)).points[0, 0] == 0.1

    def test_two_by_two_format(self, tmp_path):
        p = tmp_path / "two.csv"
        save_point_set(PointSet(np.array([[1.5, -2.0], [0.25, 3.0]])), str(p))
        lines = p.read_text().splitlines()
        assert len(lines) == 2
        assert all(len(line.split(",")) == 2 for line in lines)

    @settings(max_examples=40, deadline=None)
    @given(finite_matrices)
    def test_round_trip_exact(self, tmp_path_factory, mat):
        p = tmp_path_factory.mktemp("rt") / "x.csv"
        save_point_set(PointSet(mat), str(p))
        back = load_point_set(str(p))
        np.testing.assert_array_equal(back.points, mat)


class TestSplit:
    def test_floor_remainder_rule(self):
        ps = PointSet(np.arange(20.0).reshape(10, 2))
        a, b = split(ps, (0.55, 0.45), seed=3)
        assert (a.n, b.n) == (6, 4)

    def test_even_split_disjoint_cover(self):
        ps = PointSet(np.arange(20.0).reshape(10, 2))
        a, b = split(ps, (0.5, 0.5), seed=0)
        assert (a.n, b.n) == (5, 5)
        merged = np.vstack([a.points, b.points])
        assert sorted(map(tuple, merged)) == sorted(map(tuple, ps.points))

    def test_identity_fraction(self):
        ps = PointSet(np.arange(10.0).reshape(5, 2))
        (only,) = split(ps, (1.0,), seed=9)
        assert sorted(map(tuple, only.points)) == sorted(map(tuple, ps.points))

    def test_deterministic(self):
        ps = PointSet(np.arange(40.0).reshape(20, 2))
        a1, _ = split(ps, (0.5, 0.5), seed=7)
        a2, _ = split(ps, (0.5, 0.5), seed=7)
        np.testing.assert_array_equal(a1.points, a2.points)

    def test_bad_fractions(self):
        ps = PointSet(np.zeros((4, 1)))
        with pytest.raises(ValueError, match="sum to 1"):
            split(ps, (0.5, 0.4), seed=0)
        with pytest.raises(ValueError, match="positive"):
            split(ps, (1.5, -0.5), seed=0)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32), st.integers(4, 30))
    def test_parts_are_a_permutation_of_input(self, seed, n):
        ps = PointSet(np.random.default_rng(n).normal(size=(n, 2)))
        parts = split(ps, (0.5, 0.25, 0.25), seed=seed)
        merged = np.vstack([p.points for p in parts])
        assert sorted(map(tuple, merged)) == sorted(map(tuple, ps.points))


def arc_distances(pts: np.ndarray, arc: int) -> np.ndarray:
    """Exact distance to arc A (upper unit semicircle at origin) or arc B
    (lower unit semicircle at (1, 0.5)), endpoints included."""
    if arc == 0:
        d = pts
        on = d[:, 1] >= 0
        ends = np.minimum(np.hypot(d[:, 0] - 1, d[:, 1]), np.hypot(d[:, 0] + 1, d[:, 1]))
    else:
        d = pts - np.array([1.0, 0.5])
        on = d[:, 1] <= 0
        ends = np.minimum(np.hypot(d[:, 0] - 1, d[:, 1]), np.hypot(d[:, 0] + 1, d[:, 1]))
    radial = np.abs(np.hypot(d[:, 0], d[:, 1]) - 1.0)
    return np.where(on, radial, ends)


def moons_rms_to_arc(ps, n: int) -> float:
    n_a = (n + 1) // 2
    da = arc_distances(ps.points[:n_a], 0)
    db = arc_distances(ps.points[n_a:], 1)
    return float(np.sqrt(np.mean(np.concatenate([da, db]) ** 2)))


class TestMoons:
    def test_zero_noise_on_arcs(self):
        ps = generate_moons(4, noise=0.0, seed=0)
        assert moons_rms_to_arc(ps, 4) <= 1e-12

    def test_deterministic(self):
        a = generate_moons(100, 0.1, seed=5)
        b = generate_moons(100, 0.1, seed=5)
        np.testing.assert_array_equal(a.points, b.points)

    def test_class_balance(self):
        # odd n puts the extra point on arc A
        ps = generate_moons(7, noise=0.0, seed=1)
        assert np.all(arc_distances(ps.points[:4], 0) <= 1e-12)
        assert np.all(arc_distances(ps.points[4:], 1) <= 1e-12)

    def test_n_too_small(self):
        with pytest.raises(ValueError):
            generate_moons(1, 0.1, seed=0)

    def test_negative_noise(self):
        with pytest.raises(ValueError):
            generate_moons(10, -0.1, seed=0)

    def test_noise_band_against_monte_carlo_oracle(self):
        # oracle: large-sample rms distance-to-arc under the stated generator
        oracle = moons_rms_to_arc(generate_moons(400_000, 0.1, seed=101), 400_000)
        obs = moons_rms_to_arc(generate_moons(10_000, 0.1, seed=42), 10_000)
        assert 0.9 * oracle <= obs <= 1.1 * oracle
