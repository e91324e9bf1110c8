import numpy as np
import pytest
from hypothesis import given, strategies as st

from motivscore.errors import DimensionMismatch, SingleClass
from motivscore.svm import (
    LINEAR,
    RBF,
    Kernel,
    default_gamma,
    kernel_eval,
    resolve_kernel,
    svc_decision,
    svc_fit,
    svc_predict,
    svr_fit,
    svr_predict,
)
from oracles import qp_dual, svm_dual_objective

XOR_X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
XOR_Y = np.array([-1.0, -1.0, 1.0, 1.0])


def full_alpha(m, n):
    a = np.zeros(n)
    a[m.support] = m.alpha
    return a


def test_two_point_classifier_is_analytic():
    X = np.array([[-1.0], [1.0]])
    m = svc_fit(X, np.array([-1.0, 1.0]), C=10.0, kernel=Kernel(LINEAR))
    assert np.allclose(m.alpha, [0.5, 0.5], atol=1e-9)
    assert m.bias == pytest.approx(0.0, abs=1e-9)
    grid = np.linspace(-2, 2, 9)[:, None]
    assert np.allclose(svc_decision(m, grid), grid[:, 0], atol=1e-6)


def test_xor_with_rbf_is_separated():
    m = svc_fit(XOR_X, XOR_Y, C=10.0, kernel=Kernel(RBF, 2.0))
    assert np.array_equal(svc_predict(m, XOR_X), XOR_Y)


@given(st.integers(0, 2**32 - 1), st.integers(3, 8), st.sampled_from([LINEAR, RBF]),
       st.sampled_from([0.1, 1.0, 10.0]))
def test_svc_matches_generic_qp(seed, n, kind, C):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 2))
    y = np.where(np.arange(n) % 2 == 0, 1.0, -1.0)
    m = svc_fit(X, y, C=C, kernel=Kernel(kind, 0.5 if kind == RBF else None), tol=1e-8,
                debug=True)
    K = m.kernel.matrix(X, X)
    a = full_alpha(m, n)
    _, ref = qp_dual(K, y, -np.ones(n), C)
    assert svm_dual_objective(K, y, -np.ones(n), a) <= ref + 1e-6 * (1 + abs(ref))
    # feasibility
    assert np.all(a >= -1e-9) and np.all(a <= C + 1e-9)
    assert abs(a @ y) < 1e-9


@given(st.integers(0, 2**32 - 1), st.integers(2, 6), st.sampled_from([0.0, 0.1, 0.5]))
def test_svr_matches_generic_qp(seed, n, eps):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 1))
    y = 2 * X[:, 0] + rng.normal(scale=0.3, size=n)
    C = 1.0
    m = svr_fit(X, y, C=C, epsilon=eps, kernel=Kernel(RBF, 1.0), tol=1e-8, debug=True)
    K = m.kernel.matrix(X, X)
    a = np.zeros(2 * n)
    a[m.support] = m.alpha
    a[n + m.support] = m.alpha_star
    s = np.r_[np.ones(n), -np.ones(n)]
    p = np.r_[eps - y, eps + y]
    _, ref = qp_dual(K, s, p, C)
    assert svm_dual_objective(K, s, p, a) <= ref + 1e-6 * (1 + abs(ref))
    assert np.all(a >= -1e-9) and np.all(a <= C + 1e-9)
    assert abs(a @ s) < 1e-9
    assert np.all(np.minimum(m.alpha, m.alpha_star) == 0)


@given(st.integers(0, 2**32 - 1), st.integers(5, 60), st.floats(0.05, 20.0))
def test_dual_feasibility_after_every_fit(seed, n, C):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 3))
    y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    y[:2] = [-1.0, 1.0]
    m = svc_fit(X, y, C=C, max_passes=5, debug=True)
    a = full_alpha(m, n)
    assert np.all(a >= 0) and np.all(a <= C)
    assert abs(a @ y) <= 1e-9 * max(1.0, C * n)
    r = svr_fit(X, X[:, 0], C=C, max_passes=5)
    assert np.all(r.alpha >= 0) and np.all(r.alpha <= C)
    assert abs(r.alpha.sum() - r.alpha_star.sum()) <= 1e-9 * max(1.0, C * n)


def test_two_point_regression_interpolates():
    X = np.array([[0.0], [1.0]])
    m = svr_fit(X, np.array([0.0, 1.0]), C=100.0, epsilon=0.0, kernel=Kernel(LINEAR),
                tol=1e-10)
    assert np.allclose(svr_predict(m, np.array([[0.25], [0.5]])), [0.25, 0.5], atol=1e-6)


def test_non_convergence_is_reported():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(40, 2))
    y = np.where(rng.random(40) < 0.5, -1.0, 1.0)
    m = svc_fit(X, y, C=100.0, tol=1e-12, max_passes=1)
    assert not m.converged
    assert "KKT" in m.warning


def test_kernels():
    a, b = np.array([1.0, 2.0]), np.array([0.0, 4.0])
    assert kernel_eval(Kernel(LINEAR), a, b) == 8.0
    assert kernel_eval(Kernel(RBF, 0.5), a, b) == pytest.approx(np.exp(-2.5))
    assert default_gamma(np.array([[0.0, 0.0], [2.0, 2.0]])) == pytest.approx(0.5)
    with pytest.raises(DimensionMismatch):
        kernel_eval(Kernel(LINEAR), a, np.zeros(3))


def test_svc_input_checks():
    with pytest.raises(SingleClass):
        svc_fit(np.zeros((3, 1)), np.ones(3))
    with pytest.raises(ValueError):
        svc_fit(np.zeros((2, 1)), np.array([0.0, 1.0]))


def test_kernel_examples():
    assert kernel_eval(Kernel(LINEAR), [1.0, 2.0], [3.0, 4.0]) == 11.0
    assert kernel_eval(Kernel(RBF, 0.5), [0.0], [2.0]) == pytest.approx(np.exp(-2.0))
    assert kernel_eval(Kernel(RBF, 3.0), [1.5, 2.0], [1.5, 2.0]) == 1.0


@given(st.integers(0, 2**32 - 1), st.floats(0.1, 100.0))
def test_default_gamma_makes_rbf_scale_free(seed, scale):
    X = np.random.default_rng(seed).normal(size=(12, 3))
    K1 = resolve_kernel(None, X).matrix(X, X)
    K2 = resolve_kernel(None, scale * X).matrix(scale * X, scale * X)
    assert np.allclose(K1, K2, atol=1e-9)


def test_converged_fit_satisfies_kkt():
    rng = np.random.default_rng(1)
    X = rng.normal(size=(60, 2))
    y = np.where(X[:, 0] + 0.5 * rng.normal(size=60) > 0, 1.0, -1.0)
    tol = 1e-3
    m = svc_fit(X, y, C=1.0, tol=tol)
    assert m.converged and m.kkt_violation < 10 * tol
    # free support vectors sit on the margin
    free = (m.alpha > 1e-8) & (m.alpha < m.C - 1e-8)
    assert free.any()
    margins = y[m.support[free]] * svc_decision(m, X[m.support[free]])
    assert np.allclose(margins, 1.0, atol=10 * tol)


def test_points_inside_the_tube_give_a_constant():
    X = np.linspace(0, 1, 6)[:, None]
    y = 2.0 + 0.01 * X[:, 0]
    m = svr_fit(X, y, epsilon=0.5, kernel=Kernel(LINEAR))
    assert len(m.coef) == 0
    assert np.allclose(svr_predict(m, X), m.bias)
    assert np.all(np.abs(svr_predict(m, X) - y) <= 0.5)


def test_zero_on_the_boundary_is_positive():
    X = np.array([[-1.0], [1.0]])
    m = svc_fit(X, np.array([-1.0, 1.0]), C=10.0, kernel=Kernel(LINEAR))
    assert svc_predict(m, np.array([[0.0]]))[0] == 1
