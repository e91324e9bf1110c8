import numpy as np
import pytest
from hypothesis import given, strategies as st

from motivscore.errors import EmptyInput, KOutOfRange, LengthMismatch
from motivscore.evaluation import (
    ConfusionCounts,
    classification_metrics,
    confusion,
    cross_validate,
    k_fold_split,
    mae,
)
from motivscore.models import ModelSpec
from motivscore.rng import split_mix


def test_mae():
    assert mae([1.0, 2.0, 3.0], [2.0, 2.0, 5.0]).mae == pytest.approx(1.0)
    with pytest.raises(LengthMismatch):
        mae([1.0], [1.0, 2.0])
    with pytest.raises(EmptyInput):
        mae([], [])


def test_confusion_uses_deep_as_positive():
    y = ["Deep", "Deep", "Surface", "Surface"]
    p = ["Deep", "Surface", "Deep", "Surface"]
    assert confusion(y, p) == ConfusionCounts(1, 1, 1, 1)


def test_metrics_by_hand():
    m = classification_metrics(ConfusionCounts(tp=3, fp=1, tn=4, fn=2))
    assert m.accuracy == pytest.approx(0.7)
    pos_p, pos_r = 3 / 4, 3 / 5
    neg_p, neg_r = 4 / 6, 4 / 5
    assert m.macro_precision == pytest.approx((pos_p + neg_p) / 2)
    assert m.macro_recall == pytest.approx((pos_r + neg_r) / 2)
    f1 = lambda p, r: 2 * p * r / (p + r)
    assert m.macro_f1 == pytest.approx((f1(pos_p, pos_r) + f1(neg_p, neg_r)) / 2)
    assert not m.warnings


def test_zero_division_is_zero_with_warning():
    m = classification_metrics(ConfusionCounts(tp=0, fp=0, tn=5, fn=5))
    assert m.per_class["positive"].precision == 0.0
    assert any("0/0" in w for w in m.warnings)
    with pytest.raises(EmptyInput):
        classification_metrics(ConfusionCounts(0, 0, 0, 0))


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_metrics_are_bounded(tp, fp, tn, fn):
    if tp + fp + tn + fn == 0:
        return
    m = classification_metrics(ConfusionCounts(tp, fp, tn, fn))
    for v in (m.accuracy, m.macro_precision, m.macro_recall, m.macro_f1):
        assert 0.0 <= v <= 1.0


@given(st.integers(2, 200), st.integers(2, 20), st.integers(0, 2**63))
def test_k_fold_covers_each_index_once(n, k, seed):
    if k > n:
        with pytest.raises(KOutOfRange):
            k_fold_split(n, k, seed)
        return
    folds = k_fold_split(n, k, seed)
    assert len(folds) == k
    assert sorted(np.concatenate(folds)) == list(range(n))
    sizes = [len(f) for f in folds]
    assert max(sizes) - min(sizes) <= 1


class MeanModel:
    """Predicts the training mean; records the seed it was given."""

    seeds = []

    def fit(self, X, y, seed):
        MeanModel.seeds.append(seed)
        self.value = float(np.mean(y))
        self.warnings = ("demo warning",)
        return self

    def predict(self, X):
        return np.full(len(X), self.value)


def test_cross_validate_mechanics():
    MeanModel.seeds = []
    X = np.zeros((20, 1))
    y = np.arange(20.0)
    cv = cross_validate(MeanModel(), X, y, 4, 11, "mae")
    assert MeanModel.seeds == [split_mix(11, i) for i in range(4)]
    assert len(cv.per_fold) == 4
    assert cv.mean == pytest.approx(np.mean(cv.per_fold))
    assert cv.sd == pytest.approx(np.std(cv.per_fold, ddof=1))
    assert len(cv.warnings) == 4 and "demo warning" in cv.warnings[0]


def test_cross_validate_is_reproducible(cohort):
    X = cohort.matrix(["intrinsic", "study_year"])
    y = cohort.column("performance")
    spec = ModelSpec("DT", "regression", {"max_depth": 4})
    a = cross_validate(spec, X, y, 5, 3, "mae")
    b = cross_validate(spec, X, y, 5, 3, "mae")
    assert a == b
