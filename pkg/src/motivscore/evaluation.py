"""Metrics and the k-fold cross-validation harness."""

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput, KOutOfRange, LengthMismatch
from .rng import generator, split_mix


@dataclass(frozen=True)
class RegressionMetrics:
    mae: float
    n: int


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ClassificationMetrics:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_class: dict
    counts: ConfusionCounts
    warnings: tuple = ()


def _pair(y_true, y_pred):
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise LengthMismatch(f"{y_true.shape} vs {y_pred.shape}")
    return y_true, y_pred


def mae(y_true, y_pred):
    y_true, y_pred = _pair(y_true, y_pred)
    if y_true.size == 0:
        raise EmptyInput("mae of zero samples")
    err = np.abs(y_true.astype(float) - y_pred.astype(float))
    return RegressionMetrics(float(err.mean()), int(y_true.size))


def confusion(y_true, y_pred, positive="Deep"):
    """Counts with ``positive`` as the positive class; every other label is negative."""
    y_true, y_pred = _pair(y_true, y_pred)
    t = y_true == positive
    p = y_pred == positive
    return ConfusionCounts(int(np.sum(t & p)), int(np.sum(~t & p)),
                           int(np.sum(~t & ~p)), int(np.sum(t & ~p)))


def _ratio(num, den, what, warnings):
    if den == 0:
        warnings.append(f"{what} undefined (0/0), reported as 0")
        return 0.0
    return num / den


def _class_metrics(tp, fp, fn, name, warnings):
    precision = _ratio(tp, tp + fp, f"{name} precision", warnings)
    recall = _ratio(tp, tp + fn, f"{name} recall", warnings)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return ClassMetrics(precision, recall, f1)


def classification_metrics(c):
    """Accuracy plus per-class and macro-averaged precision, recall and F1."""
    if c.total <= 0:
        raise EmptyInput("no evaluated samples")
    warnings = []
    pos = _class_metrics(c.tp, c.fp, c.fn, "positive", warnings)
    neg = _class_metrics(c.tn, c.fn, c.fp, "negative", warnings)
    return ClassificationMetrics(
        accuracy=(c.tp + c.tn) / c.total,
        macro_precision=(pos.precision + neg.precision) / 2,
        macro_recall=(pos.recall + neg.recall) / 2,
        macro_f1=(pos.f1 + neg.f1) / 2,
        per_class={"positive": pos, "negative": neg},
        counts=c,
        warnings=tuple(warnings),
    )


def k_fold_split(n, k, seed):
    """Shuffle ``range(n)`` and cut it into ``k`` contiguous folds.

    The first ``n % k`` folds hold one extra index.
    """
    if not 2 <= k <= n:
        raise KOutOfRange(f"k={k} with n={n}")
    perm = generator(seed).permutation(n)
    return list(np.array_split(perm, k))


@dataclass(frozen=True)
class CvResult:
    per_fold: tuple
    mean: float
    sd: float
    folds: tuple
    warnings: tuple = field(default=())


def _accuracy(y_true, y_pred):
    y_true, y_pred = _pair(y_true, y_pred)
    return float(np.mean(y_true == y_pred))


METRICS = {
    "mae": lambda y, p: mae(y, p).mae,
    "accuracy": _accuracy,
}


def cross_validate(model_spec, X, y, k, seed, metric):
    """Fit on k-1 folds and score the held-out fold, for every fold.

    ``model_spec`` needs ``fit(X, y, seed)`` returning an object with
    ``predict(X)`` and optionally ``warnings``.  Fold ``i`` trains with seed
    ``split_mix(seed, i)``, so folds are independent of evaluation order.
    Model warnings (e.g. non-convergence) are collected, not raised.
    """
    X = np.asarray(X)
    y = np.asarray(y)
    score = METRICS[metric] if isinstance(metric, str) else metric
    folds = k_fold_split(len(y), k, seed)
    scores, warnings = [], []
    for i, held_out in enumerate(folds):
        train = np.setdiff1d(np.arange(len(y)), held_out)
        model = model_spec.fit(X[train], y[train], split_mix(seed, i))
        scores.append(float(score(y[held_out], model.predict(X[held_out]))))
        warnings.extend(f"fold {i}: {w}" for w in getattr(model, "warnings", ()))
    scores = np.array(scores)
    return CvResult(tuple(scores), float(scores.mean()), float(scores.std(ddof=1)),
                    tuple(tuple(int(j) for j in f) for f in folds), tuple(warnings))
