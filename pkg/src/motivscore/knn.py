"""Brute-force k-nearest-neighbour classifier and regressor."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, KTooLarge
from .tree import CLASSIFY, REGRESS


@dataclass(frozen=True)
class Standardizer:
    """Per-feature z-scoring; zero-variance columns are only centred."""

    mean: np.ndarray
    sd: np.ndarray

    @classmethod
    def fit(cls, X):
        X = np.asarray(X, dtype=float)
        sd = X.std(axis=0)
        return cls(X.mean(axis=0), np.where(sd > 0, sd, 1.0))

    def transform(self, X):
        return (np.asarray(X, dtype=float) - self.mean) / self.sd


@dataclass(frozen=True)
class KnnModel:
    stored_X: np.ndarray
    stored_y: np.ndarray
    k: int
    standardizer: Optional[Standardizer] = None


def knn_fit(X, y, k=5, standardize=False):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    if len(X) != len(y):
        raise DimensionMismatch(f"X has {len(X)} rows but y has {len(y)}")
    if not 1 <= k <= len(X):
        raise KTooLarge(f"k={k} with {len(X)} training rows")
    scaler = Standardizer.fit(X) if standardize else None
    stored = scaler.transform(X) if scaler else X.copy()
    return KnnModel(stored, y.copy(), int(k), scaler)


def neighbours(m, X, chunk=256):
    """Indices of the k nearest stored rows per query, nearest first.

    Equal distances keep the lower training index first.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != m.stored_X.shape[1]:
        raise DimensionMismatch(f"expected {m.stored_X.shape[1]} columns, got shape {X.shape}")
    if m.standardizer is not None:
        X = m.standardizer.transform(X)
    out = np.empty((len(X), m.k), dtype=int)
    for lo in range(0, len(X), chunk):
        diff = X[lo:lo + chunk, None, :] - m.stored_X[None, :, :]
        dist = np.einsum("qnp,qnp->qn", diff, diff)
        out[lo:lo + chunk] = np.argsort(dist, axis=1, kind="stable")[:, :m.k]
    return out


def knn_predict(m, X, task):
    """Majority vote (ties to the lowest class) or unweighted neighbour mean."""
    idx = neighbours(m, X)
    if task == REGRESS:
        return m.stored_y[idx].astype(float).mean(axis=1)
    if task != CLASSIFY:
        raise ValueError(f"unknown task {task!r}")
    classes, codes = np.unique(m.stored_y, return_inverse=True)
    codes = codes.reshape(-1)[idx]
    counts = (codes[None, :, :] == np.arange(len(classes))[:, None, None]).sum(axis=2)
    return classes[np.argmax(counts, axis=0)]
