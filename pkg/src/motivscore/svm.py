"""Soft-margin kernel SVMs trained by sequential minimal optimization.

Both problems are solved in the common dual form

    min_a  1/2 a' Q a + p' a   s.t.  0 <= a <= C,  s' a = 0

with ``Q_uv = s_u s_v K(u, v)`` and signs ``s``.  For C-SVC ``a`` holds one
multiplier per sample, ``s = y`` and ``p = -1``.  For epsilon-SVR ``a``
stacks ``[alpha; alpha*]``, ``s = [+1; -1]`` and
``p = [eps - y; eps + y]``, so the kernel index of variable ``u`` is
``u mod n``.

Each step updates the maximal violating pair (the most negative and most
positive prediction errors among movable multipliers) analytically and
clips to the box.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from numba import njit
from scipy.spatial.distance import cdist

from .errors import DimensionMismatch, SingleClass

LINEAR = "linear"
RBF = "rbf"
TAU = 1e-12


@dataclass(frozen=True)
class Kernel:
    kind: str = RBF
    gamma: Optional[float] = None

    def matrix(self, A, B):
        A = np.asarray(A, dtype=float)
        B = np.asarray(B, dtype=float)
        if A.shape[1] != B.shape[1]:
            raise DimensionMismatch(f"{A.shape[1]} vs {B.shape[1]} columns")
        if self.kind == LINEAR:
            return A @ B.T
        if self.kind == RBF:
            return np.exp(-self.gamma * cdist(A, B, "sqeuclidean"))
        raise ValueError(f"unknown kernel {self.kind!r}")


def kernel_eval(k, a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    if k.kind == LINEAR:
        return float(a @ b)
    d = a - b
    return float(np.exp(-k.gamma * (d @ d)))


def default_gamma(X):
    """``1 / (p * mean per-feature variance)``; 1.0 for constant data."""
    X = np.asarray(X, dtype=float)
    v = X.var(axis=0).mean() * X.shape[1]
    return 1.0 / v if v > 0 else 1.0


def resolve_kernel(kernel, X):
    if kernel is None:
        kernel = Kernel(RBF)
    elif isinstance(kernel, str):
        kernel = Kernel(kernel)
    if kernel.kind == RBF and kernel.gamma is None:
        kernel = Kernel(RBF, default_gamma(X))
    return kernel


@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray
    coef: np.ndarray  # alpha_i * y_i (SVC) or alpha_i - alpha_i* (SVR)
    bias: float
    kernel: Kernel
    C: float
    epsilon: float = 0.0
    support: np.ndarray = None  # training-row indices of the support vectors
    alpha: np.ndarray = None
    alpha_star: Optional[np.ndarray] = None
    converged: bool = True
    kkt_violation: float = 0.0
    n_iter: int = 0
    objective_trace: Optional[np.ndarray] = None

    @property
    def warning(self):
        if self.converged:
            return None
        return (f"SMO stopped after {self.n_iter} iterations with KKT violation "
                f"{self.kkt_violation:.3g}")

    def to_dict(self):
        return {
            "kernel": self.kernel.kind,
            "gamma": self.kernel.gamma,
            "C": self.C,
            "epsilon": self.epsilon,
            "bias": float(self.bias),
            "n_support": int(len(self.coef)),
            "converged": self.converged,
            "kkt_violation": float(self.kkt_violation),
        }


@njit(cache=True)
def _smo(K, s, p, C, tol, max_iter, record):
    N = s.shape[0]
    n = K.shape[0]
    a = np.zeros(N)
    G = p.copy()
    trace = np.empty(max_iter + 1 if record else 0)
    if record:
        trace[0] = 0.0
    gap = np.inf
    it = 0
    while it < max_iter:
        i = -1
        j = -1
        vmax = -np.inf
        vmin = np.inf
        for u in range(N):
            v = -s[u] * G[u]
            if (s[u] > 0 and a[u] < C) or (s[u] < 0 and a[u] > 0):
                if v > vmax:
                    vmax = v
                    i = u
            if (s[u] > 0 and a[u] > 0) or (s[u] < 0 and a[u] < C):
                if v < vmin:
                    vmin = v
                    j = u
        gap = vmax - vmin
        if i < 0 or j < 0 or gap < tol:
            break
        ki = i % n
        kj = j % n
        eta = K[ki, ki] + K[kj, kj] - 2.0 * K[ki, kj]
        if eta < TAU:
            eta = TAU
        t = gap / eta
        ti = C - a[i] if s[i] > 0 else a[i]
        tj = a[j] if s[j] > 0 else C - a[j]
        if ti < t:
            t = ti
        if tj < t:
            t = tj
        a[i] = min(max(a[i] + s[i] * t, 0.0), C)
        a[j] = min(max(a[j] - s[j] * t, 0.0), C)
        # snap multipliers that reached a bound exactly onto it
        if t == ti:
            a[i] = C if s[i] > 0 else 0.0
        if t == tj:
            a[j] = 0.0 if s[j] > 0 else C
        for u in range(N):
            ku = u % n
            G[u] += t * s[u] * (K[ku, ki] - K[ku, kj])
        it += 1
        if record:
            obj = 0.0
            for u in range(N):
                obj += a[u] * (G[u] + p[u])
            trace[it] = 0.5 * obj
    return a, G, it, gap, trace[:it + 1] if record else trace


def _bias(a, G, s, C):
    v = -s * G
    free = (a > 0) & (a < C)
    if free.any():
        return float(v[free].mean())
    up = ((s > 0) & (a < C)) | ((s < 0) & (a > 0))
    low = ((s > 0) & (a > 0)) | ((s < 0) & (a < C))
    hi = v[up].max() if up.any() else v[low].max()
    lo = v[low].min() if low.any() else v[up].min()
    return float((hi + lo) / 2.0)


def _solve(K, s, p, C, tol, max_passes, debug):
    N = len(s)
    max_iter = max(int(max_passes) * N, 1)
    a, G, n_iter, gap, trace = _smo(np.ascontiguousarray(K), s.astype(float), p.astype(float),
                                    float(C), float(tol), max_iter, bool(debug))
    if debug and np.any(np.diff(trace) > 1e-12 * (1.0 + np.abs(trace[:-1]))):
        raise AssertionError("dual objective got worse during SMO")
    converged = bool(gap < tol)
    return a, G, int(n_iter), float(max(gap, 0.0)), converged, (trace if debug else None)


def _check_xy(X, y):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2 or len(X) != len(y):
        raise DimensionMismatch(f"X has shape {X.shape} but y has length {len(y)}")
    return X, y


def svc_fit(X, y, C=1.0, kernel=None, tol=1e-3, max_passes=200, seed=0, debug=False):
    """C-SVC on labels in {-1, +1}.

    The solver is deterministic; ``seed`` is accepted so every model family
    shares one fitting signature.  Non-convergence within ``max_passes * n``
    pair updates is reported on the model (``converged``,
    ``kkt_violation``), never raised.
    """
    X, y = _check_xy(X, y)
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be -1 or +1")
    if len(np.unique(y)) < 2:
        raise SingleClass("SVC needs both classes")
    if C <= 0:
        raise ValueError("C must be positive")
    kernel = resolve_kernel(kernel, X)
    K = kernel.matrix(X, X)
    a, G, n_iter, gap, converged, trace = _solve(K, y, -np.ones(len(y)), C, tol,
                                                 max_passes, debug)
    b = _bias(a, G, y, C)
    sv = np.flatnonzero(a > 0)
    return SvmModel(X[sv], a[sv] * y[sv], b, kernel, float(C), 0.0, sv, a[sv], None,
                    converged, gap, n_iter, trace)


def svr_fit(X, y, C=1.0, epsilon=0.1, kernel=None, tol=1e-3, max_passes=200, seed=0,
            debug=False):
    """Epsilon-insensitive support vector regression."""
    X, y = _check_xy(X, y)
    n = len(y)
    if n < 2:
        raise ValueError("SVR needs at least two samples")
    if C <= 0 or epsilon < 0:
        raise ValueError("need C > 0 and epsilon >= 0")
    kernel = resolve_kernel(kernel, X)
    K = kernel.matrix(X, X)
    s = np.concatenate([np.ones(n), -np.ones(n)])
    p = np.concatenate([epsilon - y, epsilon + y])
    a, G, n_iter, gap, converged, trace = _solve(K, s, p, C, tol, max_passes, debug)
    b = _bias(a, G, s, C)
    alpha, alpha_star = a[:n], a[n:]
    # removing the common part keeps alpha - alpha* and lowers the objective
    common = np.minimum(alpha, alpha_star)
    alpha, alpha_star = alpha - common, alpha_star - common
    coef = alpha - alpha_star
    sv = np.flatnonzero(coef != 0)
    return SvmModel(X[sv], coef[sv], b, kernel, float(C), float(epsilon), sv,
                    alpha[sv], alpha_star[sv], converged, gap, n_iter, trace)


def svc_decision(m, X):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or (len(m.support_vectors) and X.shape[1] != m.support_vectors.shape[1]):
        raise DimensionMismatch(f"bad query shape {X.shape}")
    if len(m.coef) == 0:
        return np.full(len(X), m.bias)
    return m.kernel.matrix(X, m.support_vectors) @ m.coef + m.bias


def svc_predict(m, X):
    return np.where(svc_decision(m, X) >= 0, 1, -1)


def svr_predict(m, X):
    return svc_decision(m, X)
