import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slm.logistic import (eta_value, fit_logistic, logistic_loss_grad,
                          optimality_gap)


def _toy(seed=0, n=40, d=3):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, d))
    labels = np.where(rng.random(n) < 0.5, 1, 2)
    if (labels == 1).all() or (labels == 2).all():
        labels[0] = 3 - labels[0]
    return x, labels


def test_gradient_matches_finite_differences():
    x, labels = _toy(seed=1)
    y = (labels == 1).astype(float)
    a0, a = 0.3, np.array([0.5, -1.0, 0.2])
    loss, g0, g = logistic_loss_grad(a0, a, x, y)
    h = 1e-6
    fd0 = (logistic_loss_grad(a0 + h, a, x, y)[0]
           - logistic_loss_grad(a0 - h, a, x, y)[0]) / (2 * h)
    assert abs(g0 - fd0) <= 1e-5
    for j in range(3):
        e = np.zeros(3)
        e[j] = h
        fd = (logistic_loss_grad(a0, a + e, x, y)[0]
              - logistic_loss_grad(a0, a - e, x, y)[0]) / (2 * h)
        assert abs(g[j] - fd) <= 1e-5


def test_intercept_only_limit():
    x, labels = _toy(seed=2, n=60)
    n1 = int((labels == 1).sum())
    n2 = len(labels) - n1
    fit = fit_logistic(x, labels, lam=100.0, tol=1e-9)
    np.testing.assert_array_equal(fit.a, np.zeros(3))
    assert abs(fit.a0 - np.log(n1 / n2)) <= 1e-6


def test_zero_lambda_wellseparated_drives_loss_down():
    rng = np.random.default_rng(3)
    x = np.concatenate([rng.normal(3, 1, 30), rng.normal(-3, 1, 30)])[:, None]
    labels = np.concatenate([np.ones(30, dtype=int), np.full(30, 2)])
    fit = fit_logistic(x, labels, lam=0.01, tol=1e-8)
    scores = fit.a0 + x[:, 0] * fit.a[0]
    assert ((scores > 0) == (labels == 1)).mean() == 1.0


def test_label_validation():
    x, labels = _toy()
    with pytest.raises(ValueError):
        fit_logistic(x, np.zeros(len(labels), dtype=int), 0.1)
    with pytest.raises(ValueError):
        fit_logistic(x, np.ones(len(labels), dtype=int), 0.1)
    with pytest.raises(ValueError):
        fit_logistic(x, labels, -0.1)


def test_converged_fit_meets_optimality_gap():
    x, labels = _toy(seed=4)
    y = (labels == 1).astype(float)
    fit = fit_logistic(x, labels, lam=0.05, tol=1e-8)
    assert fit.converged
    assert optimality_gap(fit.a0, fit.a, x, y, fit.lam) <= 1e-8


def test_warm_start_agrees_with_cold():
    x, labels = _toy(seed=5)
    cold = fit_logistic(x, labels, 0.02, tol=1e-10)
    warm = fit_logistic(x, labels, 0.02, tol=1e-10,
                        warm=(1.0, np.array([1.0, -1.0, 1.0])))
    assert abs(cold.a0 - warm.a0) <= 1e-6
    np.testing.assert_allclose(cold.a, warm.a, atol=1e-6)


def test_eta_value():
    fit = fit_logistic(*_toy(seed=6), lam=0.1)
    u = np.array([1.0, 0.0, 1.0])
    assert eta_value(fit, u) == pytest.approx(fit.a0 + fit.a @ u)


@settings(deadline=None, max_examples=20)
@given(st.integers(min_value=0, max_value=10_000),
       st.floats(min_value=0.001, max_value=1.0))
def test_fit_is_first_order_optimal(seed, lam):
    x, labels = _toy(seed=seed, n=30)
    fit = fit_logistic(x, labels, lam, tol=1e-7)
    y = (labels == 1).astype(float)
    assert optimality_gap(fit.a0, fit.a, x, y, lam) <= 1e-6
