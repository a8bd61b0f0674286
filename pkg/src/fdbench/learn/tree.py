"""CART decision trees (Gini for classification, squared error for regression)."""
import numpy as np

from fdbench.learn.base import Learner

LEAF = -1


def _best_split(X, y, rows, features, criterion, n_classes, rng=None):
    """Lowest weighted impurity over candidate features.

    Returns ``(impurity, feature, threshold)`` or None. Candidate thresholds
    are midpoints of consecutive distinct values; ties keep the earlier
    feature in ``features`` and the lower threshold. With ``rng`` the
    threshold is drawn uniformly inside the chosen gap instead.
    """
    n = len(rows)
    yr = y[rows]
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    best = None
    for f in features:
        x = X[rows, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        valid = xs[:-1] < xs[1:]
        if not valid.any():
            continue
        ys = yr[order]
        if criterion == "gini":
            onehot = np.zeros((n, n_classes))
            onehot[np.arange(n), ys] = 1.0
            left = np.cumsum(onehot, axis=0)[:-1]
            right = left[-1] + onehot[-1] - left
            gl = n_left - np.sum(left * left, axis=1) / n_left
            gr = n_right - np.sum(right * right, axis=1) / n_right
            imp = (gl + gr) / n
        else:
            s = np.cumsum(ys)[:-1]
            s2 = np.cumsum(ys * ys)[:-1]
            tot, tot2 = s[-1] + ys[-1], s2[-1] + ys[-1] ** 2
            imp = ((s2 - s * s / n_left) + ((tot2 - s2) - (tot - s) ** 2 / n_right)) / n
        imp = np.where(valid, imp, np.inf)
        i = int(np.argmin(imp))
        if best is None or imp[i] < best[0]:
            u = 0.5 if rng is None else rng.uniform()
            thr = xs[i] + u * (xs[i + 1] - xs[i])
            if not xs[i] <= thr < xs[i + 1]:
                thr = xs[i]
            best = (imp[i], f, thr)
    return best


def grow_tree(X, y, criterion="gini", min_node_size=2, max_depth=None, mtry=None, rng=None, n_classes=None,
              random_threshold=False):
    """Grow a tree and return its node arrays.

    A node becomes a leaf when it is pure, has fewer than ``min_node_size``
    rows, sits at ``max_depth``, or admits no split. ``mtry`` features are
    drawn per node from ``rng``; ``mtry=None`` considers all of them.
    ``random_threshold`` places each split uniformly inside its gap, which
    smooths the averaged prediction of an ensemble.
    """
    p = X.shape[1]
    if criterion == "gini" and n_classes is None:
        n_classes = int(y.max()) + 1
    feature, threshold, left, right, value = [], [], [], [], []

    def leaf_value(rows):
        if criterion == "gini":
            return np.bincount(y[rows], minlength=n_classes).astype(np.float64)
        return np.array([y[rows].mean()])

    stack = [(np.arange(len(y)), 0, None)]
    while stack:
        rows, depth, parent = stack.pop()
        node = len(feature)
        if parent is not None:
            pnode, side = parent
            (left if side == 0 else right)[pnode] = node
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(leaf_value(rows))
        yr = y[rows]
        if (len(rows) < max(2, min_node_size) or (max_depth is not None and depth >= max_depth)
                or np.all(yr == yr[0])):
            continue
        if mtry is None or mtry >= p:
            feats = range(p)
        else:
            feats = np.sort(rng.choice(p, size=mtry, replace=False))
        split = _best_split(X, y, rows, feats, criterion, n_classes, rng if random_threshold else None)
        if split is None:
            continue
        _, f, thr = split
        feature[node] = int(f)
        threshold[node] = float(thr)
        go_left = X[rows, f] <= thr
        # right pushed first so the left subtree is numbered first
        stack.append((rows[~go_left], depth + 1, (node, 1)))
        stack.append((rows[go_left], depth + 1, (node, 0)))
    return {
        "feature": np.array(feature, dtype=np.intp),
        "threshold": np.array(threshold),
        "left": np.array(left, dtype=np.intp),
        "right": np.array(right, dtype=np.intp),
        "value": np.vstack(value),
    }


def apply_tree(nodes, X):
    """Leaf index reached by every row of ``X``."""
    idx = np.zeros(X.shape[0], dtype=np.intp)
    feature, threshold = nodes["feature"], nodes["threshold"]
    active = feature[idx] != LEAF
    while active.any():
        rows = np.flatnonzero(active)
        cur = idx[rows]
        go_left = X[rows, feature[cur]] <= threshold[cur]
        idx[rows] = np.where(go_left, nodes["left"][cur], nodes["right"][cur])
        active[rows] = feature[idx[rows]] != LEAF
    return idx


def tree_depth(nodes):
    depth = np.zeros(len(nodes["feature"]), dtype=np.intp)
    for node in range(len(depth)):
        if nodes["feature"][node] != LEAF:
            depth[nodes["left"][node]] = depth[nodes["right"][node]] = depth[node] + 1
    return int(depth.max())


class TreeClassifier(Learner):
    """CART with greedy Gini splits; leaves predict the majority class."""

    method = "tree"

    def __init__(self, min_node_size=2, max_depth=30):
        super().__init__(min_node_size=int(min_node_size), max_depth=None if max_depth is None else int(max_depth))

    def fit(self, X, y):
        X = self._check_X(X)
        y = np.asarray(y, dtype=np.intp)
        self.classes_ = np.unique(y)
        self.n_features_ = X.shape[1]
        self.nodes_ = grow_tree(X, y, "gini", self.params["min_node_size"], self.params["max_depth"])
        return self

    @property
    def depth(self):
        return tree_depth(self.nodes_)

    def predict(self, X):
        self._check_fitted()
        X = self._check_X(X)
        return np.argmax(self.nodes_["value"][apply_tree(self.nodes_, X)], axis=1)

    def get_state(self):
        return {"nodes": self.nodes_, "classes": self.classes_, "n_features": self.n_features_}

    def set_state(self, state):
        self.nodes_ = state["nodes"]
        self.classes_ = state["classes"]
        self.n_features_ = state["n_features"]


class TreeRegressor:
    """Squared-error CART; leaves predict the mean response."""

    def __init__(self, min_node_size=5, max_depth=None):
        self.min_node_size = min_node_size
        self.max_depth = max_depth

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        self.nodes_ = grow_tree(X, np.asarray(y, dtype=np.float64), "mse", self.min_node_size, self.max_depth)
        return self

    def predict(self, X):
        return self.nodes_["value"][apply_tree(self.nodes_, np.asarray(X, dtype=np.float64)), 0]
