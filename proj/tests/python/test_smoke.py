"""Smoke tests for the python bindings: every exposed operation runs end to
end on small synthetic data and agrees with its documented behaviour."""

import json

import numpy as np
import pytest

import flowlabel as fl


def clouds(n_base, n_far, dim, shift, seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n_base + n_far, dim))
    X[n_base:] += shift
    y = np.zeros(n_base + n_far, dtype=int)
    y[n_base:] = 1
    return X, y


def test_package_surface():
    assert fl.__version__ == "0.1.0"
    for name in (
        "scale",
        "pearson_cof",
        "lasso_fit",
        "cross_validate_alpha",
        "alpha_grid",
        "select_features",
        "kmeans",
        "fcm",
        "optics",
        "optics_run",
        "ensemble_label",
        "weighted_vote",
        "confusion",
        "classification_report",
        "classification_report_from_counts",
        "clustering_report",
        "roc_curve",
        "pr_curve",
        "Mlp",
    ):
        assert hasattr(fl, name), name


def test_scale_centres_to_unit_population_variance():
    rng = np.random.default_rng(0)
    X = rng.normal(loc=3.0, scale=2.0, size=(200, 3))
    out = fl.scale(X)
    S = out["scaled"]
    assert S.shape == (200, 3)
    assert np.allclose(S.mean(axis=0), 0.0, atol=1e-9)
    assert np.allclose(S.var(axis=0), 1.0, atol=1e-9)
    assert np.allclose(out["mean"], X.mean(axis=0))
    # a constant column scales to all zeros rather than dividing by zero
    C = np.full((10, 1), 7.5)
    assert np.all(fl.scale(C)["scaled"] == 0.0)


def test_pearson_endpoints():
    x = [1.0, 2.0, 3.0, 4.0]
    assert fl.pearson_cof(x, [2.0, 4.0, 6.0, 8.0]) == pytest.approx(1.0)
    assert fl.pearson_cof(x, [9.0, 7.0, 5.0, 3.0]) == pytest.approx(-1.0)


def test_lasso_shrinks_and_grid_is_inclusive():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(80, 3))
    beta = np.array([2.0, 0.0, -1.5])
    y = X @ beta
    fit = fl.lasso_fit(X, y.tolist(), alpha=0.5)
    assert fit["converged"]
    assert abs(fit["beta"][0]) > 0.5
    assert abs(fit["beta"][1]) < 0.1
    grid = fl.alpha_grid(0.1, 8.0, 0.01)
    assert len(grid) == 791
    assert grid[0] == pytest.approx(0.1)
    assert grid[-1] == pytest.approx(8.0)


def test_select_features_finds_planted_columns():
    rng = np.random.default_rng(2)
    n = 400
    y = (np.arange(n) % 2).astype(int)
    X = rng.normal(size=(n, 6))
    X[:, 2] += 3.0 * y
    X[:, 4] -= 3.0 * y
    out = fl.select_features(
        X, y.tolist(), alpha_start=0.1, alpha_stop=1.0, alpha_step=0.3, cv_folds=4, seed=5
    )
    assert {2, 4} <= set(out["indices"])
    assert out["delta"] == pytest.approx(0.4)
    assert 0.0 <= out["reduction_rate"] <= 1.0
    for f in out["features"]:
        assert f["provenance"] in ("correlation", "lasso", "both")


def test_kmeans_and_fcm_split_two_clouds():
    X, truth = clouds(100, 50, 3, 7.0, 4)
    km = fl.kmeans(X, seed=1)
    assert fl.clustering_report(truth.tolist(), np.asarray(km["labels"]).tolist())["ari"] > 0.95
    fc = fl.fcm(X, seed=1)
    assert fl.clustering_report(truth.tolist(), np.asarray(fc["labels"]).tolist())["ari"] > 0.95
    # fuzzy memberships sum to one and the objective never increases
    assert np.allclose(fc["membership"].sum(axis=1), 1.0, atol=1e-9)
    obj = fc["objective"]
    assert np.all(np.diff(obj) <= 1e-9)
    # the far cloud is the malicious side, so its labels read 1
    assert np.asarray(fc["labels"])[truth == 1].mean() > 0.95


def test_optics_orders_and_assigns():
    X, truth = clouds(80, 20, 2, 8.0, 3)
    run = fl.optics_run(X, min_pts=5)
    assert sorted(run["ordering"]) == list(range(100))
    assert np.isinf(run["reachability"][run["ordering"][0]])
    # Cut high enough that cloud outskirts are not shaved off as noise, but not
    # so high that the nearest-rank threshold lands on the inter-cloud jump
    # itself (at n=100 the 0.99 rank is the largest reachability, and the
    # strictly-greater cut would then never fire).
    out = fl.optics(X, min_pts=5, quantile=0.98)
    labels = np.asarray(out["labels"])
    assert fl.clustering_report(truth.tolist(), labels.tolist())["ari"] > 0.95


def test_ensemble_label_recovers_planted_labels_deterministically():
    X, truth = clouds(200, 100, 4, 6.0, 7)
    out = fl.ensemble_label(X, seed=11)
    labels = np.asarray(out["labels"])
    assert (labels == truth).mean() >= 0.95
    scores = np.asarray(out["scores"])
    assert np.all((scores >= 0.0) & (scores <= 1.0))
    again = fl.ensemble_label(X, seed=11)
    assert np.array_equal(labels, np.asarray(again["labels"]))
    assert np.array_equal(scores, np.asarray(again["scores"]))


def test_vote_threshold_is_strict():
    v, label = fl.weighted_vote(0, 0, 1)
    assert v == pytest.approx(0.5)
    assert label == 0
    v, label = fl.weighted_vote(1, 0, 1)
    assert v == pytest.approx(0.75)
    assert label == 1
    v, label = fl.weighted_vote(1, 1, 0)
    assert label == 0


def test_report_from_counts_matches_hand_arithmetic():
    r = fl.classification_report_from_counts(55469, 3161, 1293, 66050)
    assert round(r["precision"], 3) == 0.977
    assert round(r["recall"], 3) == 0.946
    assert round(r["far"], 3) == 0.019
    tp, fn, fp, tn = fl.confusion([1, 1, 0, 0], [1, 0, 1, 0])
    assert (tp, fn, fp, tn) == (1, 1, 1, 1)


def test_mlp_trains_saves_and_reloads(tmp_path):
    rng = np.random.default_rng(3)
    X = rng.normal(size=(400, 5))
    y = (X[:, 0] + X[:, 1] > 0).astype(int)
    model = fl.Mlp(5, hidden=[8], learning_rate=0.05, epochs=150, batch_size=32, seed=1)
    assert model.dims == [5, 8, 1]
    losses = model.train(X, y.tolist())
    assert losses.shape == (150,)
    assert losses[-1] < losses[0]
    assert (np.asarray(model.predict(X)) == y).mean() >= 0.95

    path = tmp_path / "model.json"
    model.save(str(path))
    assert json.loads(path.read_text())
    back = fl.Mlp.load(str(path))
    assert np.array_equal(model.predict_proba(X), back.predict_proba(X))


def test_mlp_identical_seeds_identical_models():
    rng = np.random.default_rng(9)
    X = rng.normal(size=(100, 4))
    y = (X[:, 0] > 0).astype(int).tolist()
    a = fl.Mlp(4, hidden=[6], epochs=5, seed=42)
    b = fl.Mlp(4, hidden=[6], epochs=5, seed=42)
    a.train(X, y)
    b.train(X, y)
    assert np.array_equal(a.predict_proba(X), b.predict_proba(X))


def test_curves_on_separable_scores():
    y = [0, 0, 1, 1]
    roc = fl.roc_curve(y, [0.1, 0.2, 0.8, 0.9])
    assert roc["auc"] == pytest.approx(1.0)
    assert roc["fpr"][0] == 0.0 and roc["fpr"][-1] == 1.0
    pr = fl.pr_curve(y, [0.1, 0.2, 0.8, 0.9])
    assert pr["auc"] == pytest.approx(1.0)
