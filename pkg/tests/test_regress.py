import numpy as np
import pytest

from radarmag import (BandSpec, Dataset, fit_ols, fit_rf, kfold_mae,
                      load_model, save_model, simulate, temporal_fft_baseline)

from scenes import BREATHER_ROI, breather_scene


def linear_dataset(n=120, seed=0, noise=0.0):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, 2))
    y = 3.0 * X[:, 0] - 2.0 * X[:, 1] + 1.0
    if noise:
        y = y + noise * rng.standard_normal(n)
    return Dataset(X, y)


class TestOls:
    def test_exact_recovery(self):
        model = fit_ols(linear_dataset(), ridge=0.0)
        assert np.allclose(model.weights, [3.0, -2.0], atol=1e-8)
        assert model.intercept == pytest.approx(1.0, abs=1e-8)

    def test_constant_labels(self):
        rng = np.random.default_rng(1)
        data = Dataset(rng.standard_normal((50, 3)), np.full(50, 7.5))
        model = fit_ols(data)
        assert np.allclose(model.weights, 0.0, atol=1e-10)
        assert model.intercept == pytest.approx(7.5)

    def test_collinear_features_with_ridge(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal(80)
        X = np.column_stack([x, x])  # duplicated column
        y = 2.0 * x + 0.01 * rng.standard_normal(80)
        model = fit_ols(Dataset(X, y), ridge=1e-3)
        assert np.isfinite(model.weights).all()
        mae = np.mean(np.abs(model.predict(X) - y))
        assert mae < 0.01

    def test_singular_at_zero_ridge_falls_back(self):
        rng = np.random.default_rng(3)
        x = rng.standard_normal(40)
        X = np.column_stack([x, x])
        y = x.copy()
        with pytest.warns(UserWarning, match="singular"):
            model = fit_ols(Dataset(X, y), ridge=0.0)
        assert np.isfinite(model.weights).all()

    def test_residual_orthogonality(self):
        data = linear_dataset(n=200, noise=0.3, seed=4)
        model = fit_ols(data, ridge=0.0)
        residual = data.y - model.predict(data.X)
        assert np.max(np.abs(data.X.T @ residual)) <= 1e-6 * np.linalg.norm(data.y)


class TestForest:
    def test_constant_labels(self):
        rng = np.random.default_rng(5)
        data = Dataset(rng.standard_normal((60, 4)), np.full(60, 3.25))
        model = fit_rf(data, n_trees=10, seed=0)
        assert np.allclose(model.predict(data.X), 3.25)

    def test_step_function(self):
        rng = np.random.default_rng(6)
        x = rng.uniform(0, 1, 200)
        data = Dataset(x[:, None], (x > 0.5).astype(float))
        model = fit_rf(data, n_trees=50, max_depth=3, seed=1)
        mae = np.mean(np.abs(model.predict(data.X) - data.y))
        assert mae < 0.05

    def test_forest_is_mean_of_trees(self):
        data = linear_dataset(n=80, noise=0.2, seed=7)
        model = fit_rf(data, n_trees=7, seed=2)
        per_tree = np.stack([model.predict_tree(t, data.X) for t in model.trees])
        assert np.allclose(model.predict(data.X), per_tree.mean(axis=0), atol=1e-12)

    def test_predictions_bounded_by_training_labels(self):
        rng = np.random.default_rng(8)
        data = Dataset(rng.standard_normal((100, 3)), rng.uniform(40, 90, 100))
        model = fit_rf(data, n_trees=20, seed=3)
        query = rng.standard_normal((50, 3)) * 10
        predictions = model.predict(query)
        assert predictions.min() >= data.y.min() - 1e-12
        assert predictions.max() <= data.y.max() + 1e-12

    def test_deterministic_given_seed(self):
        data = linear_dataset(n=60, noise=0.5, seed=9)
        a = fit_rf(data, n_trees=15, seed=4).predict(data.X)
        b = fit_rf(data, n_trees=15, seed=4).predict(data.X)
        assert np.array_equal(a, b)


class TestKfold:
    def test_perfect_linear_data(self):
        report = kfold_mae(linear_dataset(n=100), k=10, model="ols", seed=0, ridge=0.0)
        assert report.mean_mae <= 1e-6
        assert len(report.fold_maes) == 10

    def test_mean_is_arithmetic_mean(self):
        report = kfold_mae(linear_dataset(n=100, noise=1.0), k=5, model="ols", seed=0)
        assert report.mean_mae == pytest.approx(np.mean(report.fold_maes))

    def test_shuffled_labels_hit_sanity_ceiling(self):
        rng = np.random.default_rng(10)
        data = linear_dataset(n=200, noise=0.1, seed=10)
        shuffled = Dataset(data.X, rng.permutation(data.y))
        report = kfold_mae(shuffled, k=10, model="ols", seed=0, ridge=1e-6)
        mean_mae = np.mean(np.abs(shuffled.y - shuffled.y.mean()))
        assert report.mean_mae > 0.5 * mean_mae

    def test_determinism(self):
        data = linear_dataset(n=90, noise=0.4, seed=11)
        a = kfold_mae(data, k=9, model="rf", seed=5, n_trees=10)
        b = kfold_mae(data, k=9, model="rf", seed=5, n_trees=10)
        assert a == b

    def test_folds_partition_exactly(self):
        n, k = 97, 10
        order = np.random.default_rng(3).permutation(n)
        folds = np.array_split(order, k)
        joined = np.sort(np.concatenate(folds))
        assert np.array_equal(joined, np.arange(n))
        sizes = {len(f) for f in folds}
        assert max(sizes) - min(sizes) <= 1

    def test_k_exceeding_rows_rejected(self):
        with pytest.raises(ValueError):
            kfold_mae(linear_dataset(n=5), k=10, model="ols")

    def test_group_report(self):
        data = linear_dataset(n=60, noise=0.3, seed=12)
        data.groups = np.array(["a", "b"] * 30)
        report = kfold_mae(data, k=5, model="ols", seed=1)
        assert set(report.per_group) == {"a", "b"}


class TestBaseline:
    def test_breather_rate(self):
        r, _ = simulate(breather_scene(0.25, 0.5, duration_s=30.0), seed=0)
        bpm = temporal_fft_baseline(r, BREATHER_ROI, BandSpec(0.1, 0.7))
        assert bpm == pytest.approx(15.0, abs=1.0)

    def test_static_scene_rejected(self):
        from radarmag import SceneSpec, TargetSpec
        scene = SceneSpec(duration_s=30.0, fps=20.0, n_bins=96, bin_spacing=0.01,
                          targets=(TargetSpec("static", 0.48, 1.0),))
        r, _ = simulate(scene, seed=0)
        with pytest.raises(ValueError):
            temporal_fft_baseline(r, BREATHER_ROI, BandSpec(0.1, 0.7))


class TestPersistence:
    def test_ols_round_trip(self, tmp_path):
        model = fit_ols(linear_dataset(), ridge=0.5)
        path = str(tmp_path / "m.bin")
        save_model(model, path)
        back = load_model(path)
        assert np.array_equal(back.weights, model.weights)
        assert back.intercept == model.intercept
        assert back.ridge == model.ridge

    def test_rf_round_trip(self, tmp_path):
        data = linear_dataset(n=50, noise=0.2, seed=13)
        model = fit_rf(data, n_trees=5, seed=6)
        path = str(tmp_path / "m.bin")
        save_model(model, path)
        back = load_model(path)
        assert np.array_equal(back.predict(data.X), model.predict(data.X))

    def test_save_is_byte_deterministic(self, tmp_path):
        data = linear_dataset(n=50, noise=0.2, seed=14)
        model = fit_rf(data, n_trees=5, seed=7)
        p1, p2 = str(tmp_path / "a.bin"), str(tmp_path / "b.bin")
        save_model(model, p1)
        save_model(model, p2)
        assert open(p1, "rb").read() == open(p2, "rb").read()

    def test_bad_file_rejected(self, tmp_path):
        path = tmp_path / "junk.bin"
        path.write_bytes(b"not a model")
        with pytest.raises(ValueError):
            load_model(str(path))


class TestGroupSplit:
    def test_groups_stay_together(self):
        from radarmag.regress import _group_folds
        groups = np.repeat(np.arange(12), 5)
        folds = _group_folds(groups, k=4, seed=0)
        joined = np.sort(np.concatenate(folds))
        assert np.array_equal(joined, np.arange(60))
        for fold in folds:
            for g in np.unique(groups[fold]):
                assert np.isin(np.where(groups == g)[0], fold).all()

    def test_kfold_with_group_split(self):
        data = linear_dataset(n=60, noise=0.3, seed=15)
        data.groups = np.repeat(np.arange(10), 6)
        report = kfold_mae(data, k=5, model="ols", seed=2, group_split=True, ridge=1e-8)
        assert len(report.fold_maes) == 5

    def test_group_split_requires_tags(self):
        with pytest.raises(ValueError, match="group"):
            kfold_mae(linear_dataset(n=30), k=3, model="ols", group_split=True)
