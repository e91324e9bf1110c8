"""
Support vector machines and nearest neighbours
==============================================

SMO-trained soft-margin classifiers and epsilon-insensitive regressors,
then brute-force k-nearest neighbours with and without feature scaling.
"""

import numpy as np

from motivscore.knn import knn_fit, knn_predict
from motivscore.svm import (LINEAR, RBF, Kernel, svc_decision, svc_fit, svc_predict,
                            svr_fit, svr_predict)
from motivscore.tree import CLASSIFY, REGRESS

# two points at -1 and +1: the decision function is exactly f(x) = x
m = svc_fit(np.array([[-1.0], [1.0]]), np.array([-1.0, 1.0]), C=10.0, kernel=Kernel(LINEAR))
print("alphas", m.alpha, "f(0.3) =", svc_decision(m, np.array([[0.3]]))[0])

# XOR is not linearly separable, but an RBF kernel handles it
X = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
y = np.array([-1.0, -1.0, 1.0, 1.0])
xor = svc_fit(X, y, C=10.0, kernel=Kernel(RBF, 2.0))
print("XOR predictions", svc_predict(xor, X))

# regression inside an epsilon tube
rng = np.random.default_rng(0)
x = np.sort(rng.uniform(0, 6, 80))[:, None]
t = np.sin(x[:, 0]) + 0.1 * rng.normal(size=80)
svr = svr_fit(x, t, C=10.0, epsilon=0.1)
print("SVR: converged", svr.converged, "support vectors", len(svr.coef),
      "train MAE", round(float(np.mean(np.abs(svr_predict(svr, x) - t))), 3))

# k-NN: unscaled distances are dominated by wide columns such as age
X = np.column_stack([rng.normal(5, 0.7, 200), rng.integers(18, 44, 200)])
y = (X[:, 0] > 5).astype(int)
for standardize in (False, True):
    model = knn_fit(X[:150], y[:150], k=5, standardize=standardize)
    acc = np.mean(knn_predict(model, X[150:], CLASSIFY) == y[150:])
    print(f"k-NN standardize={standardize}: held-out accuracy {acc:.2f}")
print("k-NN regression:", knn_predict(knn_fit(x, t, k=3), np.array([[1.5]]), REGRESS))
