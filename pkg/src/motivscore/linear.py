"""Least-squares linear regression and L2-regularized logistic regression."""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import DimensionMismatch, SingleClass, SingularDesign

JITTER = 1e-10
COND_LIMIT = 1e12


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    intercept: float

    def to_dict(self):
        return {"weights": [float(w) for w in self.weights], "intercept": float(self.intercept)}


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    intercept: float
    l2_lambda: float = 0.0
    training_trace: tuple = ()
    converged: bool = True
    n_iter: int = 0

    def to_dict(self):
        return {
            "weights": [float(w) for w in self.weights],
            "intercept": float(self.intercept),
            "l2_lambda": float(self.l2_lambda),
            "converged": self.converged,
            "n_iter": self.n_iter,
        }


def _check_columns(weights, X):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != len(weights):
        raise DimensionMismatch(f"expected {len(weights)} columns, got shape {X.shape}")
    return X


def ols_fit(X, y):
    """Least squares through the normal equations of the centred design.

    Centering removes the intercept column from the system; a near-singular
    Gram matrix gets a diagonal jitter of ``1e-10 * trace / p`` instead of
    failing.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] != len(y):
        raise DimensionMismatch(f"X has shape {X.shape} but y has length {len(y)}")
    if len(y) == 0:
        raise SingularDesign("no rows")
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    gram = Xc.T @ Xc
    rhs = Xc.T @ (y - y_mean)
    p = X.shape[1]
    if p == 0:
        return LinearModel(np.zeros(0), float(y_mean))
    w = None
    if np.linalg.cond(gram) < COND_LIMIT:
        w = np.linalg.solve(gram, rhs)
    else:
        jitter = JITTER * max(np.trace(gram), 1.0) / p
        try:
            w = np.linalg.solve(gram + jitter * np.eye(p), rhs)
        except np.linalg.LinAlgError:
            pass
    if w is None or not np.all(np.isfinite(w)):
        raise SingularDesign("normal equations are singular even after jitter")
    return LinearModel(w, float(y_mean - x_mean @ w))


def ols_predict(m, X):
    X = _check_columns(m.weights, X)
    return X @ m.weights + m.intercept


def logistic_loss_and_gradient(m, X, y):
    """Mean cross-entropy plus ``l2_lambda / 2 * ||w||^2`` and its gradient.

    The gradient vector is ``[d/dw..., d/db]``; the intercept is not
    penalized.
    """
    X = _check_columns(m.weights, X)
    y = np.asarray(y, dtype=float)
    return _loss_grad(m.weights, m.intercept, X, y, m.l2_lambda)


def _loss_grad(w, b, X, y, lam):
    z = X @ w + b
    # log(1 + e^z) - y z, evaluated stably
    loss = np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * lam * (w @ w)
    r = expit(z) - y
    grad = np.empty(len(w) + 1)
    grad[:-1] = X.T @ r / len(y) + lam * w
    grad[-1] = r.mean()
    return float(loss), grad


def logistic_fit(X, y, l2_lambda=None, max_iters=2000, tol=1e-6, seed=0):
    """Full-batch gradient descent with backtracking step halving.

    Steps are taken in standardized feature coordinates, which is a linear
    change of variables and leaves the penalized objective untouched.

    ``l2_lambda=None`` uses ``1 / n``, the strength of a unit-weight ridge
    penalty on the summed loss.  Every accepted step lowers the objective,
    so ``training_trace`` is non-increasing.  ``seed`` is accepted for
    interface uniformity; the optimizer is deterministic from a zero start.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or X.shape[0] != len(y):
        raise DimensionMismatch(f"X has shape {X.shape} but y has length {len(y)}")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    if len(np.unique(y)) < 2:
        raise SingleClass("logistic regression needs both classes")
    lam = 1.0 / len(y) if l2_lambda is None else float(l2_lambda)
    # descend in centred, unit-scale coordinates (w = v / sd, b = c - mu.w);
    # the objective is unchanged, only the conditioning improves
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)

    def to_original(v, c):
        w = v / sd
        return w, c - mu @ w

    def reparam_grad(g):
        return np.append((g[:-1] - mu * g[-1]) / sd, g[-1])

    v = np.zeros(X.shape[1])
    c = 0.0
    w, b = to_original(v, c)
    loss, grad = _loss_grad(w, b, X, y, lam)
    h = reparam_grad(grad)
    trace = [loss]
    step = 1.0
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        if np.max(np.abs(grad)) < tol:
            converged = True
            break
        for _ in range(60):
            v_new = v - step * h[:-1]
            c_new = c - step * h[-1]
            w_new, b_new = to_original(v_new, c_new)
            loss_new, grad_new = _loss_grad(w_new, b_new, X, y, lam)
            # Armijo condition
            if loss_new <= loss - 0.5 * step * (h @ h):
                break
            step *= 0.5
        else:
            break
        v, c, w, b, loss, grad = v_new, c_new, w_new, b_new, loss_new, grad_new
        h = reparam_grad(grad)
        trace.append(loss)
        step *= 2.0
    else:
        converged = np.max(np.abs(grad)) < tol
    return LogisticModel(w, float(b), lam, tuple(trace), bool(converged), it)


def logistic_predict_proba(m, X):
    X = _check_columns(m.weights, X)
    return expit(X @ m.weights + m.intercept)


def logistic_predict(m, X, threshold=0.5):
    return (logistic_predict_proba(m, X) >= threshold).astype(int)
