import numpy as np
import pytest

from macrosent.models.logistic import LogisticClassifier, logistic_objective, sigmoid


def central_difference_grad(wb, X, y, C, eps=1e-6):
    grad = np.zeros_like(wb)
    for i in range(len(wb)):
        up, down = wb.copy(), wb.copy()
        up[i] += eps
        down[i] -= eps
        grad[i] = (logistic_objective(up, X, y, C)[0]
                   - logistic_objective(down, X, y, C)[0]) / (2 * eps)
    return grad


def test_separable_direction_and_accuracy():
    X = np.linspace(-2, 2, 40).reshape(-1, 1)
    y = (X[:, 0] > 0).astype(int)
    model = LogisticClassifier(C=100.0).fit(X, y)
    assert model.coef_[0] > 0
    assert (model.predict(X) == y).all()


def test_noise_fit_shrinks_to_prevalence():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(400, 4))
    y = (rng.random(400) < 0.65).astype(int)
    model = LogisticClassifier(C=0.01).fit(X, y)
    p = model.predict_proba(X)[:, 1]
    assert np.abs(p - y.mean()).max() < 0.02
    assert np.abs(model.coef_).max() < 0.05


def test_gradient_matches_central_differences():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(60, 5))
    y = (rng.random(60) < 0.5).astype(int)
    for _ in range(20):
        wb = rng.normal(scale=0.5, size=6)
        _, grad = logistic_objective(wb, X, y, 1.0)
        fd = central_difference_grad(wb, X, y, 1.0)
        denom = max(float(np.linalg.norm(fd)), 1e-12)
        assert np.linalg.norm(grad - fd) / denom <= 1e-6


def test_converged_gradient_norm():
    rng = np.random.default_rng(2)
    X = rng.normal(size=(200, 4))
    w = np.array([1.0, -0.5, 0.25, 0.0])
    y = (sigmoid(X @ w) > rng.random(200)).astype(int)
    model = LogisticClassifier(C=1.0).fit(X, y)
    assert model.converged_
    assert model.grad_norm_ <= 1e-8


def test_objective_matches_naive_formula():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(30, 3))
    y = (rng.random(30) < 0.5).astype(int)
    wb = rng.normal(size=4)
    loss, _ = logistic_objective(wb, X, y, 2.0)
    z = X @ wb[:-1] + wb[-1]
    p = 1.0 / (1.0 + np.exp(-z))
    naive = -np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)) + wb[:-1] @ wb[:-1] / 4.0
    assert loss == pytest.approx(naive, rel=1e-10)


def test_predict_proba_zero_weights_is_half():
    model = LogisticClassifier()
    model.coef_ = np.zeros(3)
    model.intercept_ = 0.0
    model.n_features_in_ = 3
    p = model.predict_proba(np.random.default_rng(0).normal(size=(5, 3)))
    assert np.all(p[:, 1] == 0.5)


def test_single_class_rejected():
    X = np.ones((10, 2))
    with pytest.raises(ValueError, match="single class"):
        LogisticClassifier().fit(X, np.ones(10, dtype=int))


def test_non_finite_features_rejected():
    X = np.ones((4, 2))
    X[0, 0] = np.nan
    with pytest.raises(ValueError, match="non-finite"):
        LogisticClassifier().fit(X, np.array([0, 1, 0, 1]))


def test_non_positive_C_rejected():
    X = np.array([[0.0], [1.0]])
    with pytest.raises(ValueError, match="C must be positive"):
        LogisticClassifier(C=0.0).fit(X, np.array([0, 1]))


def test_dimension_mismatch_on_predict():
    X = np.random.default_rng(0).normal(size=(20, 3))
    y = (X[:, 0] > 0).astype(int)
    model = LogisticClassifier().fit(X, y)
    with pytest.raises(ValueError, match="feature count mismatch"):
        model.predict_proba(X[:, :2])
