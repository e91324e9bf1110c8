import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize

from motivscore.errors import DimensionMismatch, SingleClass
from motivscore.linear import (
    LinearModel,
    LogisticModel,
    logistic_fit,
    logistic_loss_and_gradient,
    logistic_predict,
    logistic_predict_proba,
    ols_fit,
    ols_predict,
)
from oracles import central_difference


def normal_equation_residual(X, y, m):
    A = np.column_stack([X, np.ones(len(X))])
    theta = np.append(m.weights, m.intercept)
    r = A.T @ (A @ theta - y)
    scale = np.linalg.norm(A.T @ A, 2) * np.linalg.norm(theta) + np.linalg.norm(A.T @ y)
    return np.linalg.norm(r) / scale


@given(st.integers(0, 2**32 - 1), st.integers(3, 80), st.integers(1, 6))
def test_ols_solves_normal_equations(seed, n, p):
    rng = np.random.default_rng(seed)
    n = max(n, p + 2)
    X = rng.normal(size=(n, p)) * rng.uniform(0.1, 10, p) + rng.normal(size=p) * 5
    y = rng.normal(size=n)
    assert normal_equation_residual(X, y, ols_fit(X, y)) < 1e-8


def test_ols_recovers_exact_line():
    x = np.arange(10.0)
    m = ols_fit(x[:, None], 3 * x - 2)
    assert m.weights[0] == pytest.approx(3.0)
    assert m.intercept == pytest.approx(-2.0)


def test_ols_collinear_design_still_fits_exactly():
    x = np.arange(8.0)
    X = np.column_stack([x, 2 * x])
    y = 3 * x + 1
    m = ols_fit(X, y)
    assert np.all(np.isfinite(m.weights))
    assert np.allclose(ols_predict(m, X), y, atol=1e-6)


def test_ols_predict_checks_columns():
    with pytest.raises(DimensionMismatch):
        ols_predict(LinearModel(np.zeros(2), 0.0), np.zeros((3, 3)))


@given(st.integers(0, 2**32 - 1), st.integers(1, 30), st.integers(1, 6),
       st.floats(0.0, 2.0))
def test_logistic_gradient_matches_finite_differences(seed, n, p, lam):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, p))
    y = rng.integers(0, 2, n).astype(float)
    theta = rng.normal(size=p + 1)

    def loss(th):
        return logistic_loss_and_gradient(LogisticModel(th[:-1], th[-1], lam), X, y)[0]

    _, grad = logistic_loss_and_gradient(LogisticModel(theta[:-1], theta[-1], lam), X, y)
    fd = central_difference(loss, theta)
    assert np.linalg.norm(grad - fd) <= 1e-5 * max(np.linalg.norm(fd), 1e-3)


@given(st.integers(0, 2**32 - 1))
def test_logistic_trace_never_increases(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(50, 3)) * [1, 10, 0.1]
    y = (X[:, 0] + rng.normal(size=50) > 0).astype(float)
    if len(np.unique(y)) < 2:
        y[0] = 1 - y[0]
    m = logistic_fit(X, y, l2_lambda=0.05, max_iters=200)
    assert np.all(np.diff(m.training_trace) <= 0)


def test_logistic_reaches_the_optimum():
    rng = np.random.default_rng(0)
    X = np.column_stack([rng.normal(5, 0.7, 300), rng.integers(18, 40, 300)])
    y = (X[:, 0] - 5 + rng.normal(size=300) > 0).astype(float)
    m = logistic_fit(X, y)
    assert m.converged
    assert m.l2_lambda == pytest.approx(1 / 300)

    def f(th):
        return logistic_loss_and_gradient(LogisticModel(th[:-1], th[-1], m.l2_lambda), X, y)

    ref = minimize(f, np.zeros(3), jac=True, method="L-BFGS-B",
                   options={"gtol": 1e-12, "ftol": 1e-15})
    assert m.training_trace[-1] == pytest.approx(ref.fun, abs=1e-9)
    assert np.allclose(np.append(m.weights, m.intercept), ref.x, atol=1e-4)


def test_logistic_reports_non_convergence_instead_of_raising():
    X = np.array([[0.0], [1.0], [2.0], [3.0]])
    y = np.array([0.0, 0.0, 1.0, 1.0])
    m = logistic_fit(X, y, l2_lambda=0.0, max_iters=5)
    assert not m.converged and m.n_iter == 5


def test_logistic_predictions():
    X = np.array([[-2.0], [-1.0], [1.0], [2.0]])
    y = np.array([0.0, 0.0, 1.0, 1.0])
    m = logistic_fit(X, y, l2_lambda=0.1)
    proba = logistic_predict_proba(m, X)
    assert np.all((proba > 0) & (proba < 1))
    assert list(logistic_predict(m, X)) == [0, 0, 1, 1]
    assert list(logistic_predict(m, X, threshold=0.0)) == [1, 1, 1, 1]


def test_logistic_needs_both_classes():
    with pytest.raises(SingleClass):
        logistic_fit(np.zeros((3, 1)), np.ones(3))
