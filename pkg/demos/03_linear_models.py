"""
Least squares and logistic regression
=====================================

Ordinary least squares through the normal equations, and L2-regularized
logistic regression trained by gradient descent with backtracking.
"""

import numpy as np

from motivscore.linear import (
    logistic_fit,
    logistic_predict,
    logistic_predict_proba,
    ols_fit,
    ols_predict,
)

rng = np.random.default_rng(3)
X = rng.normal(size=(300, 3))
y = X @ [0.5, -1.0, 2.0] + 4.0 + 0.2 * rng.normal(size=300)

ols = ols_fit(X, y)
print("OLS weights", np.round(ols.weights, 3), "intercept", round(ols.intercept, 3))
print("train MAE", round(float(np.mean(np.abs(ols_predict(ols, X) - y))), 3))

# duplicated columns make the Gram matrix singular; a tiny ridge keeps the fit usable
Xc = np.column_stack([X[:, 0], 2 * X[:, 0]])
print("collinear fit weights", np.round(ols_fit(Xc, 3 * X[:, 0]).weights, 3))

# logistic regression: the default penalty is 1/n on the mean log-loss
labels = (X[:, 0] - X[:, 1] + 0.5 * rng.normal(size=300) > 0).astype(float)
model = logistic_fit(X, labels)
print("\nconverged", model.converged, "after", model.n_iter, "iterations")
print("loss went from", round(model.training_trace[0], 4), "to", round(model.training_trace[-1], 4))
print("accuracy", np.mean(logistic_predict(model, X) == labels))
print("P(y=1) for the first three rows", np.round(logistic_predict_proba(model, X[:3]), 3))
