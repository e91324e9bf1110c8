"""Uniform fit/predict wrapper around the five model families.

``LR`` means ordinary least squares for regression and logistic regression
for classification; ``SVM`` means epsilon-SVR or C-SVC.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import knn, linear, svm, tree
from .knn import Standardizer

REGRESSION = "regression"
CLASSIFICATION = "classification"
MODEL_NAMES = ("RF", "LR", "SVM", "DT", "KNN")

DEFAULT_PARAMS = {
    "RF": {"n_trees": 100, "max_depth": None, "min_split": 2, "min_leaf": 1,
           "n_features_per_split": None, "bootstrap": True},
    "DT": {"max_depth": None, "min_split": 2, "min_leaf": 1},
    "KNN": {"k": 5, "standardize": False},
    "LR": {"l2_lambda": None, "max_iters": 2000, "tol": 1e-6},
    "SVM": {"C": 1.0, "kernel": "rbf", "gamma": None, "epsilon": 0.1, "tol": 1e-3,
            "max_passes": 200},
}


@dataclass(frozen=True)
class ModelSpec:
    name: str
    task: str
    params: dict = field(default_factory=dict)
    standardize: bool = False

    def __post_init__(self):
        if self.name not in MODEL_NAMES:
            raise ValueError(f"unknown model {self.name!r}")
        if self.task not in (REGRESSION, CLASSIFICATION):
            raise ValueError(f"unknown task {self.task!r}")
        unknown = set(self.params) - set(DEFAULT_PARAMS[self.name])
        if unknown:
            raise ValueError(f"{self.name} has no parameter(s) {sorted(unknown)}")

    def resolved_params(self):
        return {**DEFAULT_PARAMS[self.name], **self.params}

    def fit(self, X, y, seed=0):
        return fit_model(self, X, y, seed)


@dataclass(frozen=True)
class TrainedModel:
    spec: ModelSpec
    model: object
    classes: Optional[np.ndarray] = None
    standardizer: Optional[Standardizer] = None
    warnings: tuple = ()

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        if self.standardizer is not None:
            X = self.standardizer.transform(X)
        name, m = self.spec.name, self.model
        regression = self.spec.task == REGRESSION
        if name == "RF":
            return tree.rf_predict(m, X)
        if name == "DT":
            return tree.cart_predict(m, X)
        if name == "KNN":
            return knn.knn_predict(m, X, tree.REGRESS if regression else tree.CLASSIFY)
        if name == "LR":
            if regression:
                return linear.ols_predict(m, X)
            return self.classes[linear.logistic_predict(m, X)]
        if regression:
            return svm.svr_predict(m, X)
        return self.classes[(svm.svc_predict(m, X) > 0).astype(int)]

    def describe(self):
        """JSON-ready summary of the fitted parameters."""
        name, m = self.spec.name, self.model
        if name == "RF":
            return {"n_trees": len(m.trees), "n_features_per_split": m.n_features_per_split,
                    "per_tree_seeds": [int(s) for s in m.per_tree_seeds],
                    "node_counts": [int(t.node_count) for t in m.trees]}
        if name == "DT":
            return {"node_count": int(m.node_count), "depth": m.depth, "tree": m.to_dict()}
        if name == "KNN":
            return {"k": m.k, "n_train": int(len(m.stored_y)),
                    "standardized": m.standardizer is not None}
        return m.to_dict()


def fit_model(spec, X, y, seed=0):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    p = spec.resolved_params()
    scaler = Standardizer.fit(X) if spec.standardize else None
    if scaler is not None:
        X = scaler.transform(X)
    regression = spec.task == REGRESSION
    task = tree.REGRESS if regression else tree.CLASSIFY
    classes = None if regression else np.unique(y)
    if not regression and len(classes) != 2:
        raise ValueError(f"binary classification needs two classes, got {list(classes)}")
    warnings = []
    name = spec.name
    if name == "RF":
        model = tree.rf_fit(X, y, task, seed=seed, **p)
    elif name == "DT":
        model = tree.cart_fit(X, y, task, seed=seed, **p)
    elif name == "KNN":
        model = knn.knn_fit(X, y, k=p["k"], standardize=p["standardize"])
    elif name == "LR":
        if regression:
            model = linear.ols_fit(X, y.astype(float))
        else:
            model = linear.logistic_fit(X, (y == classes[1]).astype(float), p["l2_lambda"],
                                        p["max_iters"], p["tol"], seed)
            if not model.converged:
                warnings.append(f"LR: gradient descent stopped after {model.n_iter} "
                                f"iterations without reaching tol={p['tol']}")
    else:
        kernel = svm.Kernel(p["kernel"], p["gamma"])
        if regression:
            model = svm.svr_fit(X, y.astype(float), C=p["C"], epsilon=p["epsilon"],
                                kernel=kernel, tol=p["tol"], max_passes=p["max_passes"],
                                seed=seed)
        else:
            signs = np.where(y == classes[1], 1.0, -1.0)
            model = svm.svc_fit(X, signs, C=p["C"], kernel=kernel, tol=p["tol"],
                                max_passes=p["max_passes"], seed=seed)
        if model.warning:
            warnings.append(f"SVM: {model.warning}")
    return TrainedModel(spec, model, classes, scaler, tuple(warnings))
