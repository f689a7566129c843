import math

import numpy as np
import pytest

from datacopy.dataset import PointSet, generate_moons
from datacopy.kde import (
    KdeModel,
    lemma1_check,
    log_densities,
    log_density,
    mle_bandwidth,
    posterior,
    sample,
)


def brute_log_density(model, x):
    x = np.asarray(x, dtype=float)
    d = model.dim
    total = 0.0
    for t in model.train.points:
        total += math.exp(-float(((x - t) ** 2).sum()) / (2 * model.sigma**2))
    return math.log(total / (model.train.n * (2 * math.pi) ** (d / 2) * model.sigma**d))


class TestLogDensity:
    def test_single_center_at_origin(self):
        model = KdeModel(PointSet(np.array([[0.0]])), sigma=1.0)
        assert log_density(model, [0.0]) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-12)
        assert log_density(model, [0.0]) == pytest.approx(-0.918939, abs=1e-6)

    def test_single_center_offset(self):
        model = KdeModel(PointSet(np.array([[0.0]])), sigma=1.0)
        base = log_density(model, [0.0])
        assert log_density(model, [3.0]) == pytest.approx(base - 4.5, abs=1e-12)

    def test_translation_invariance(self):
        rng = np.random.default_rng(0)
        centers = rng.normal(size=(20, 3))
        x = rng.normal(size=3)
        shift = np.array([5.0, -7.0, 2.0])
        m1 = KdeModel(PointSet(centers), 0.7)
        m2 = KdeModel(PointSet(centers + shift), 0.7)
        assert log_density(m2, x + shift) == pytest.approx(log_density(m1, x), abs=1e-9)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(1)
        model = KdeModel(PointSet(rng.normal(size=(15, 2))), 0.8)
        for x in rng.normal(size=(10, 2)):
            assert log_density(model, x) == pytest.approx(
                brute_log_density(model, x), rel=1e-10
            )

    def test_extreme_sigma_stable(self):
        rng = np.random.default_rng(2)
        model = KdeModel(PointSet(rng.normal(size=(30, 2))), 1e-8)
        vals = log_densities(model, rng.normal(size=(5, 2)))
        assert np.all(np.isfinite(vals))

    def test_sigma_validation(self):
        with pytest.raises(ValueError):
            KdeModel(PointSet(np.zeros((1, 1))), 0.0)

    def test_density_integrates_to_one_1d(self):
        rng = np.random.default_rng(3)
        model = KdeModel(PointSet(rng.normal(size=(12, 1))), 0.4)
        xs = np.linspace(-8.0, 8.0, 4001).reshape(-1, 1)
        mass = np.trapezoid(np.exp(log_densities(model, xs)), xs[:, 0])
        assert mass == pytest.approx(1.0, abs=1e-6)


class TestSample:
    def test_bootstrap_limit(self):
        train = generate_moons(200, 0.1, seed=3)
        model = KdeModel(train, 1e-12)
        draws = sample(model, 100, seed=4)
        from datacopy._kernels import min_sq_dists

        assert np.sqrt(min_sq_dists(draws.points, train.points)).max() <= 1e-9

    def test_deterministic(self):
        model = KdeModel(generate_moons(50, 0.1, seed=5), 0.3)
        a = sample(model, 40, seed=6)
        b = sample(model, 40, seed=6)
        np.testing.assert_array_equal(a.points, b.points)

    def test_clt_mean_bound(self):
        train = generate_moons(500, 0.1, seed=7)
        sigma = 0.2
        model = KdeModel(train, sigma)
        m = 100_000
        draws = sample(model, m, seed=8)
        center_var = train.points.var(axis=0)
        tol = 4.0 * np.sqrt((center_var + sigma**2) / m)
        diff = np.abs(draws.points.mean(axis=0) - train.points.mean(axis=0))
        assert np.all(diff <= tol)

    def test_m_validation(self):
        model = KdeModel(PointSet(np.zeros((1, 1))), 1.0)
        with pytest.raises(ValueError):
            sample(model, 0, seed=0)


class TestPosterior:
    def test_equidistant_centers(self):
        model = KdeModel(PointSet(np.array([[-1.0], [1.0]])), 0.5)
        w = posterior(model, [0.0])
        np.testing.assert_allclose(w, [0.5, 0.5], atol=1e-12)

    def test_concentrates_on_nearby_center(self):
        sigma = 0.1
        centers = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 3.0]])  # others >= 10 sigma away
        model = KdeModel(PointSet(centers), sigma)
        w = posterior(model, [0.0, 0.0])
        assert w[0] >= 1.0 - 1e-10

    def test_sums_to_one(self):
        rng = np.random.default_rng(9)
        model = KdeModel(PointSet(rng.normal(size=(25, 3))), 0.6)
        for x in rng.normal(size=(8, 3)):
            assert posterior(model, x).sum() == pytest.approx(1.0, abs=1e-12)


class TestBandwidthSelection:
    def test_paper_grid_middle_point_wins(self):
        train = generate_moons(2000, 0.1, seed=10)
        val = generate_moons(1000, 0.1, seed=11, role="validation")
        sigma, table = mle_bandwidth(train, val, [0.01, 0.13, 10.0])
        assert sigma == 0.13
        assert len(table) == 3

    def test_validation_equal_train_degenerates(self):
        train = generate_moons(200, 0.1, seed=12)
        sigma, _ = mle_bandwidth(train, train.with_role("validation"), [1e-6, 1.0])
        assert sigma == 1e-6

    def test_single_sigma_grid(self):
        train = generate_moons(50, 0.1, seed=13)
        val = generate_moons(30, 0.1, seed=14, role="validation")
        sigma, _ = mle_bandwidth(train, val, [0.37])
        assert sigma == 0.37

    def test_duplicate_sigma_tie_goes_to_value(self):
        train = generate_moons(50, 0.1, seed=15)
        val = generate_moons(30, 0.1, seed=16, role="validation")
        sigma, _ = mle_bandwidth(train, val, [0.2, 0.2])
        assert sigma == 0.2

    def test_grid_validation(self):
        train = generate_moons(50, 0.1, seed=17)
        val = generate_moons(30, 0.1, seed=18, role="validation")
        with pytest.raises(ValueError):
            mle_bandwidth(train, val, [])
        with pytest.raises(ValueError):
            mle_bandwidth(train, val, [0.5, -1.0])

    def test_argmax_is_local_max_on_fine_grid(self):
        train = generate_moons(1000, 0.1, seed=19)
        val = generate_moons(500, 0.1, seed=20, role="validation")
        grid = np.geomspace(0.02, 0.2, 21)
        sigma, table = mle_bandwidth(train, val, grid)
        lls = [ll for _, ll in table]
        idx = int(np.argmin(np.abs(grid - sigma)))
        assert 0 < idx < len(grid) - 1, "argmax should be interior for this grid"
        assert lls[idx - 1] < lls[idx] > lls[idx + 1]


class TestLemma1:
    def test_single_center_posterior_is_one(self):
        train = PointSet(np.array([[1.0, 2.0]]))
        model = KdeModel(train, 0.5)
        rng = np.random.default_rng(21)
        p = PointSet(rng.normal(size=(200, 2)), "test")
        rec = lemma1_check(model, p, draws=500, seed=22)
        expect = float(((p.points - train.points[0]) ** 2).sum(axis=1).mean())
        assert rec["lhs"] == pytest.approx(expect, rel=1e-12)

    def test_rhs_matches_closed_form_within_5_se(self):
        train = generate_moons(300, 0.1, seed=23)
        model = KdeModel(train, 0.15)
        p = generate_moons(200, 0.1, seed=24, role="test")
        rec = lemma1_check(model, p, draws=4000, seed=25)
        assert abs(rec["rhs"] - rec["rhs_closed_form"]) <= 5 * rec["rhs_stderr"]
        assert rec["rhs_closed_form"] == pytest.approx(2 * 0.15**2, abs=1e-15)

    def test_default_draw_count(self):
        train = generate_moons(100, 0.1, seed=26)
        model = KdeModel(train, 0.2)
        p = generate_moons(50, 0.1, seed=27, role="test")
        rec = lemma1_check(model, p, seed=28)  # draws defaults to 10 * |p|
        assert set(rec) == {"lhs", "rhs", "rhs_closed_form", "rhs_stderr"}

    def test_draws_validation(self):
        model = KdeModel(PointSet(np.zeros((1, 1))), 1.0)
        with pytest.raises(ValueError):
            lemma1_check(model, PointSet(np.zeros((1, 1)), "test"), draws=0)

    def test_stationarity_sign_flip_at_grid_argmax(self):
        from datacopy.kde import _posterior_weighted_sq_dist

        train = generate_moons(1000, 0.1, seed=29)
        val = generate_moons(500, 0.1, seed=31, role="validation")
        grid = np.geomspace(0.02, 0.2, 21)
        sigma, _ = mle_bandwidth(train, val, grid)
        idx = int(np.argmin(np.abs(grid - sigma)))
        assert 0 < idx < len(grid) - 1

        def gap(s):
            model = KdeModel(train, float(s))
            lhs = float(_posterior_weighted_sq_dist(model, val.points).mean())
            return lhs - model.dim * float(s) ** 2

        assert np.sign(gap(grid[idx - 1])) != np.sign(gap(grid[idx + 1]))
