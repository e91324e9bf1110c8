"""Compiled CART kernels.

Targets arrive as a float matrix ``Y``: one-hot class indicators for
classification, a single column for regression.  Rows of a node are the
slice ``rows[start:end]`` of a shared index buffer that is partitioned in
place as the tree grows.
"""

import numpy as np
from numba import njit

# relative slack under which two split gains count as tied
GAIN_RTOL = 1e-12


@njit(cache=True)
def node_stats(Y, rows, start, end, classify, out_value):
    """Fill ``out_value`` with class counts (or the mean) and return the impurity."""
    m = end - start
    K = Y.shape[1]
    for k in range(K):
        out_value[k] = 0.0
    for i in range(start, end):
        r = rows[i]
        for k in range(K):
            out_value[k] += Y[r, k]
    if classify:
        imp = 1.0
        for k in range(K):
            imp -= (out_value[k] / m) ** 2
        return imp
    mean = out_value[0] / m
    out_value[0] = mean
    ss = 0.0
    for i in range(start, end):
        d = Y[rows[i], 0] - mean
        ss += d * d
    return ss / m


@njit(cache=True)
def split_kernel(X, Y, rows, start, end, features, classify, min_leaf, parent):
    """Best ``(feature, threshold, gain)`` over ``rows[start:end]``; feature -1 if none.

    ``features`` must be sorted ascending: the scan runs in (feature,
    threshold) order and a later candidate wins only by a clear margin.
    """
    m = end - start
    K = Y.shape[1]
    best_f = -1
    best_thr = np.nan
    best_gain = -np.inf
    if m < 2 or m < 2 * min_leaf or parent <= 0.0:
        return best_f, best_thr, best_gain
    tol = GAIN_RTOL * parent
    total = np.zeros(K)
    for i in range(start, end):
        for k in range(K):
            total[k] += Y[rows[i], k]
    # regression targets are centred to keep the running sums small
    shift = 0.0 if classify else total[0] / m
    if not classify:
        total[0] = 0.0
        for i in range(start, end):
            total[0] += Y[rows[i], 0] - shift
    tot_sq = 0.0
    for k in range(K):
        tot_sq += total[k] * total[k]
    xs = np.empty(m)
    cum = np.empty(K)
    for f in features:
        for i in range(m):
            xs[i] = X[rows[start + i], f]
        order = np.argsort(xs)
        for k in range(K):
            cum[k] = 0.0
        for i in range(m - 1):
            r = rows[start + order[i]]
            for k in range(K):
                cum[k] += Y[r, k] - shift
            n_left = i + 1
            n_right = m - n_left
            if n_left < min_leaf or n_right < min_leaf:
                continue
            lo = xs[order[i]]
            hi = xs[order[i + 1]]
            if not hi > lo:
                continue
            sl = 0.0
            sr = 0.0
            for k in range(K):
                sl += cum[k] * cum[k]
                sr += (total[k] - cum[k]) ** 2
            gain = (sl / n_left + sr / n_right) / m - tot_sq / (m * m)
            if gain > best_gain + tol:
                best_gain = gain
                best_f = f
                thr = (lo + hi) / 2.0
                best_thr = lo if thr >= hi else thr
    if not best_gain > tol:
        return -1, np.nan, -np.inf
    return best_f, best_thr, best_gain


@njit(cache=True)
def grow(X, Y, classify, max_depth, min_split, min_leaf, mtry, keys):
    """Depth-first greedy growth; returns the node arrays trimmed to size.

    ``max_depth < 0`` means unlimited.  When ``mtry < p`` node ``k`` (in
    creation order) scans the ``mtry`` features with the smallest
    ``keys[k]``.
    """
    n, p = X.shape
    K = Y.shape[1]
    cap = 2 * n - 1
    feature = np.full(cap, -1, dtype=np.int64)
    threshold = np.full(cap, np.nan)
    left = np.full(cap, -1, dtype=np.int64)
    right = np.full(cap, -1, dtype=np.int64)
    value = np.zeros((cap, K))
    n_samples = np.zeros(cap, dtype=np.int64)
    impurity = np.zeros(cap)
    gain = np.zeros(cap)

    rows = np.arange(n)
    buf = np.empty(n, dtype=np.int64)
    st_node = np.empty(cap, dtype=np.int64)
    st_start = np.empty(cap, dtype=np.int64)
    st_end = np.empty(cap, dtype=np.int64)
    st_depth = np.empty(cap, dtype=np.int64)
    st_node[0] = 0
    st_start[0] = 0
    st_end[0] = n
    st_depth[0] = 0
    sp = 1
    count = 1
    all_features = np.arange(p)
    while sp > 0:
        sp -= 1
        node = st_node[sp]
        start = st_start[sp]
        end = st_end[sp]
        depth = st_depth[sp]
        m = end - start
        n_samples[node] = m
        impurity[node] = node_stats(Y, rows, start, end, classify, value[node])
        if (max_depth >= 0 and depth >= max_depth) or m < min_split \
                or m < 2 * min_leaf or impurity[node] <= 0.0:
            continue
        if mtry < p:
            feats = np.sort(np.argsort(keys[node])[:mtry])
        else:
            feats = all_features
        f, thr, g = split_kernel(X, Y, rows, start, end, feats, classify,
                                 min_leaf, impurity[node])
        if f < 0:
            continue
        # stable partition of rows[start:end]
        nl = 0
        for i in range(start, end):
            if X[rows[i], f] <= thr:
                buf[nl] = rows[i]
                nl += 1
        nr = nl
        for i in range(start, end):
            if not X[rows[i], f] <= thr:
                buf[nr] = rows[i]
                nr += 1
        for i in range(m):
            rows[start + i] = buf[i]
        feature[node] = f
        threshold[node] = thr
        gain[node] = g
        left[node] = count
        right[node] = count + 1
        count += 2
        # right pushed first so the left subtree is grown first
        st_node[sp] = right[node]
        st_start[sp] = start + nl
        st_end[sp] = end
        st_depth[sp] = depth + 1
        st_node[sp + 1] = left[node]
        st_start[sp + 1] = start
        st_end[sp + 1] = start + nl
        st_depth[sp + 1] = depth + 1
        sp += 2
    return (feature[:count], threshold[:count], left[:count], right[:count],
            value[:count], n_samples[:count], impurity[:count], gain[:count])
