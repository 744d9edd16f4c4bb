"""Second-order gradient-boosted trees for binary logistic loss.

Trees are grown depth-first with exact greedy split search. Each feature is
sorted once per training run; a node owns a contiguous segment of every
per-feature ordering, and splitting stably partitions those segments, so the
sorted order inside each child is preserved without re-sorting.

Model file format (JSON, ``format_version`` 1)::

    {"format": "antispoof-gbdt", "format_version": 1,
     "base_score": float, "learning_rate": float,
     "hyperparams": {"n_trees", "max_depth", "min_samples_leaf",
                     "lambda", "gamma", "learning_rate"},
     "n_features": int, "feature_names": [str, ...], "metadata": {...},
     "trees": [{"feature": [int], "threshold": [float], "left": [int],
                "right": [int], "value": [float], "gain": [float]}, ...]}

Node arrays are indexed by node id; the root is node 0. Leaves have
``feature == -1`` and ``left == right == -1``. A sample goes left iff
``x[feature] < threshold``.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
from numba import njit
from scipy.special import expit

from .errors import (CorruptModel, DimensionMismatch, IoError, NonFiniteInput,
                     SingleClass, VersionMismatch)

FORMAT_NAME = "antispoof-gbdt"
FORMAT_VERSION = 1
# relative slack under which two split gains count as tied
TIE_RTOL = 1e-12


@dataclass(frozen=True)
class Hyperparams:
    n_trees: int = 100
    max_depth: int = 3
    min_samples_leaf: int = 1
    lam: float = 1.0
    gamma: float = 0.0
    learning_rate: float = 0.1

    def __post_init__(self):
        if self.n_trees < 0:
            raise ValueError("n_trees must be >= 0")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if self.lam < 0 or self.gamma < 0:
            raise ValueError("lambda and gamma must be >= 0")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be > 0")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Hyperparams":
        d = dict(d)
        d["lam"] = d.pop("lambda")
        return cls(**d)


PRESETS = {
    "preset-a": Hyperparams(n_trees=400, max_depth=6, min_samples_leaf=1,
                            lam=1.0, gamma=0.0, learning_rate=0.1),
    "preset-b": Hyperparams(n_trees=200, max_depth=4, min_samples_leaf=1,
                            lam=1.0, gamma=0.0, learning_rate=0.3),
}


def get_preset(name: str) -> Hyperparams:
    key = name if name.startswith("preset-") else f"preset-{name}"
    try:
        return PRESETS[key]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None


@dataclass(frozen=True)
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    gain: np.ndarray

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return _tree_predict(X, self.feature, self.threshold, self.left, self.right, self.value)


@dataclass
class GbdtModel:
    trees: list
    base_score: float
    learning_rate: float
    hyperparams: Hyperparams
    n_features: int
    feature_names: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION
    # training logistic loss after 0, 1, ..., n rounds; not persisted
    train_loss: list = field(default_factory=list, repr=False, compare=False)


@njit(cache=True)
def midpoint(a, b):
    """Split threshold between consecutive distinct values a < b.

    Guarantees a < t <= b so that ``x < t`` sends exactly the values <= a left.
    """
    t = 0.5 * a + 0.5 * b
    if t <= a:
        t = b
    return t


@njit(cache=True)
def _node_sums(g, h, order, s, e):
    G = 0.0
    H = 0.0
    for i in range(s, e):
        r = order[0, i]
        G += g[r]
        H += h[r]
    return G, H


@njit(cache=True)
def _best_split(vals, g, h, order, s, e, min_leaf, lam, gamma, tie_rtol):
    """Best (feature, threshold, gain, n_left, G, H) for the node owning
    segment [s, e) of every per-feature ordering.

    ``vals[f, i]`` is the value of feature f for row ``order[f, i]``. Returns
    feature -1 when no candidate exists.
    """
    n_features = order.shape[0]
    G, H = _node_sums(g, h, order, s, e)
    best_f = -1
    best_t = 0.0
    best_score = 0.0
    cut = 0.0
    best_nl = 0
    n = e - s
    # candidate j sends the first j + 1 rows of the ordering left
    lo = min_leaf - 1
    hi = n - min_leaf
    for f in range(n_features):
        GL = 0.0
        HL = 0.0
        for j in range(min(lo, n)):
            r = order[f, s + j]
            GL += g[r]
            HL += h[r]
        for j in range(lo, hi):
            r = order[f, s + j]
            GL += g[r]
            HL += h[r]
            xv = vals[f, s + j]
            xn = vals[f, s + j + 1]
            if not xn > xv:
                continue
            dl = HL + lam
            dr = (H - HL) + lam
            if dl <= 0.0 or dr <= 0.0:
                continue
            # score = GL^2/dl + GR^2/dr, compared as a fraction so the
            # division only happens on improvement; the parent term and gamma
            # are constant within the node
            GR = G - GL
            num = GL * GL * dr + GR * GR * dl
            den = dl * dr
            if best_f < 0 or num > cut * den:
                best_f = f
                best_t = midpoint(xv, xn)
                best_score = num / den
                cut = best_score + tie_rtol * abs(best_score)
                best_nl = j + 1
    best_gain = 0.0
    if best_f >= 0:
        if H + lam > 0.0:
            best_gain = 0.5 * (best_score - G * G / (H + lam)) - gamma
        else:
            best_f = -1
    return best_f, best_t, best_gain, best_nl, G, H


@njit(cache=True)
def _build_tree(vals, g, h, order, max_depth, min_leaf, lam, gamma, tie_rtol):
    """Grow one tree. ``order``/``vals`` (features x rows) are partitioned in place."""
    n_features, n_rows = order.shape
    max_nodes = 2 ** (max_depth + 1) - 1
    feature = np.full(max_nodes, -1, dtype=np.int64)
    threshold = np.zeros(max_nodes)
    left = np.full(max_nodes, -1, dtype=np.int64)
    right = np.full(max_nodes, -1, dtype=np.int64)
    value = np.zeros(max_nodes)
    gain = np.zeros(max_nodes)
    row_value = np.zeros(n_rows)
    goes_left = np.zeros(n_rows, dtype=np.bool_)
    buf_r = np.empty(n_rows, dtype=order.dtype)
    buf_v = np.empty(n_rows)

    st_node = np.empty(max_nodes, dtype=np.int64)
    st_s = np.empty(max_nodes, dtype=np.int64)
    st_e = np.empty(max_nodes, dtype=np.int64)
    st_d = np.empty(max_nodes, dtype=np.int64)
    st_node[0] = 0
    st_s[0] = 0
    st_e[0] = n_rows
    st_d[0] = 0
    top = 1
    n_nodes = 1

    while top > 0:
        top -= 1
        node = st_node[top]
        s = st_s[top]
        e = st_e[top]
        d = st_d[top]
        if d < max_depth:
            f, t, gn, nl, G, H = _best_split(vals, g, h, order, s, e, min_leaf, lam, gamma, tie_rtol)
        else:
            f, t, gn, nl = -1, 0.0, 0.0, 0
            G, H = _node_sums(g, h, order, s, e)
        if f >= 0 and gn > 0.0:
            for i in range(s, e):
                goes_left[order[f, i]] = vals[f, i] < t
            # children at max depth become leaves, which only read ordering 0
            n_part = 1 if d + 1 >= max_depth else n_features
            for ff in range(n_part):
                a = s
                b = 0
                # branch-free: a <= i, so writing slot a never clobbers unread rows
                for i in range(s, e):
                    r = order[ff, i]
                    v = vals[ff, i]
                    k = np.int64(goes_left[r])
                    order[ff, a] = r
                    vals[ff, a] = v
                    buf_r[b] = r
                    buf_v[b] = v
                    a += k
                    b += 1 - k
                for i in range(b):
                    order[ff, a + i] = buf_r[i]
                    vals[ff, a + i] = buf_v[i]
            feature[node] = f
            threshold[node] = t
            gain[node] = gn
            lc = n_nodes
            rc = n_nodes + 1
            n_nodes += 2
            left[node] = lc
            right[node] = rc
            # right pushed first so the left subtree is numbered first
            st_node[top] = rc
            st_s[top] = s + nl
            st_e[top] = e
            st_d[top] = d + 1
            top += 1
            st_node[top] = lc
            st_s[top] = s
            st_e[top] = s + nl
            st_d[top] = d + 1
            top += 1
        else:
            denom = H + lam
            v = -G / denom if denom > 0.0 else 0.0
            value[node] = v
            for i in range(s, e):
                row_value[order[0, i]] = v
    return (feature[:n_nodes], threshold[:n_nodes], left[:n_nodes], right[:n_nodes],
            value[:n_nodes], gain[:n_nodes], row_value)


@njit(cache=True)
def _tree_predict(X, feature, threshold, left, right, value):
    out = np.empty(X.shape[0])
    for i in range(X.shape[0]):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] < threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
    return out


def logistic_loss(y: np.ndarray, raw: np.ndarray) -> float:
    # log(1 + e^raw) - y * raw, computed stably
    return float(np.mean(np.logaddexp(0.0, raw) - y * raw))


def _check_xy(X, y):
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.ndim != 2:
        raise DimensionMismatch(f"X must be 2-D, got shape {X.shape}")
    if X.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    if X.shape[0] < 2:
        raise SingleClass("need at least two rows")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise NonFiniteInput("training data contains NaN or infinity")
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("labels must be 0 or 1")
    if y.min() == y.max():
        raise SingleClass(f"only label {int(y[0])} present")
    return X, y


def train(X, y, hyperparams: Hyperparams | None = None, feature_names=None,
          metadata: dict | None = None) -> GbdtModel:
    """Fit a boosted ensemble on logistic loss. Deterministic."""
    hp = hyperparams or Hyperparams()
    X, y = _check_xy(X, y)
    n_rows, n_features = X.shape
    p_hat = min(max(float(y.mean()), 1e-6), 1.0 - 1e-6)
    base = math.log(p_hat / (1.0 - p_hat))

    names = list(feature_names) if feature_names is not None else [f"f{i}" for i in range(n_features)]
    if len(names) != n_features:
        raise DimensionMismatch(f"{len(names)} feature names for {n_features} columns")

    presorted = np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T)
    sorted_vals = np.ascontiguousarray(np.take_along_axis(X.T, presorted, axis=1))
    raw = np.full(n_rows, base)
    losses = [logistic_loss(y, raw)]
    trees = []
    for _ in range(hp.n_trees):
        p = expit(raw)
        g = p - y
        h = p * (1.0 - p)
        feat, thr, lft, rgt, val, gn, row_value = _build_tree(
            sorted_vals.copy(), g, h, presorted.copy(), hp.max_depth, hp.min_samples_leaf,
            float(hp.lam), float(hp.gamma), TIE_RTOL)
        trees.append(Tree(feat.copy(), thr.copy(), lft.copy(), rgt.copy(), val.copy(), gn.copy()))
        raw = raw + hp.learning_rate * row_value
        losses.append(logistic_loss(y, raw))
    return GbdtModel(trees, base, hp.learning_rate, hp, n_features, names,
                     dict(metadata or {}), FORMAT_VERSION, losses)


def _as_matrix(model: GbdtModel, X) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise DimensionMismatch(f"expected {model.n_features} features, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise NonFiniteInput("input contains NaN or infinity")
    return X


def decision_function(model: GbdtModel, X) -> np.ndarray:
    X = _as_matrix(model, X)
    raw = np.full(X.shape[0], model.base_score)
    for tree in model.trees:
        raw += model.learning_rate * tree.predict(X)
    return raw


def predict_proba(model: GbdtModel, X) -> np.ndarray | float:
    """P(fake) for one vector (returns float) or a matrix of rows."""
    single = np.ndim(X) == 1
    p = expit(decision_function(model, X))
    return float(p[0]) if single else p


def predict_label(model: GbdtModel, X, threshold: float = 0.5):
    if not 0 < threshold < 1:
        raise ValueError("threshold must be in (0, 1)")
    p = predict_proba(model, X)
    if isinstance(p, float):
        return int(p >= threshold)
    return (p >= threshold).astype(np.int64)


def feature_importance(model: GbdtModel) -> np.ndarray:
    """Total split gain per feature over all trees."""
    imp = np.zeros(model.n_features)
    for tree in model.trees:
        internal = tree.feature >= 0
        np.add.at(imp, tree.feature[internal], tree.gain[internal])
    return imp


# -- persistence ------------------------------------------------------------

def model_to_dict(model: GbdtModel) -> dict:
    return {
        "format": FORMAT_NAME,
        "format_version": model.format_version,
        "base_score": float(model.base_score),
        "learning_rate": float(model.learning_rate),
        "hyperparams": model.hyperparams.to_dict(),
        "n_features": int(model.n_features),
        "feature_names": list(model.feature_names),
        "metadata": dict(model.metadata),
        "trees": [
            {
                "feature": t.feature.tolist(),
                "threshold": [float(v) for v in t.threshold],
                "left": t.left.tolist(),
                "right": t.right.tolist(),
                "value": [float(v) for v in t.value],
                "gain": [float(v) for v in t.gain],
            }
            for t in model.trees
        ],
    }


def dumps_model(model: GbdtModel) -> str:
    return json.dumps(model_to_dict(model), indent=1, sort_keys=True) + "\n"


def save_model(model: GbdtModel, path) -> None:
    try:
        Path(path).write_text(dumps_model(model))
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc


def _validate_tree(t: dict, n_features: int) -> Tree:
    keys = ("feature", "threshold", "left", "right", "value", "gain")
    if not isinstance(t, dict) or any(k not in t for k in keys):
        raise CorruptModel("tree is missing node arrays")
    n = len(t["feature"])
    if n == 0 or any(len(t[k]) != n for k in keys):
        raise CorruptModel("tree node arrays have inconsistent lengths")
    try:
        feature = np.asarray(t["feature"], dtype=np.int64)
        left = np.asarray(t["left"], dtype=np.int64)
        right = np.asarray(t["right"], dtype=np.int64)
        threshold = np.asarray(t["threshold"], dtype=np.float64)
        value = np.asarray(t["value"], dtype=np.float64)
        gain = np.asarray(t["gain"], dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise CorruptModel(f"bad node array: {exc}") from exc
    internal = feature >= 0
    leaf = ~internal
    if np.any(feature >= n_features) or np.any(feature < -1):
        raise CorruptModel("feature index out of range")
    if np.any((left[leaf] != -1) | (right[leaf] != -1)):
        raise CorruptModel("leaf with children")
    kids = np.concatenate([left[internal], right[internal]])
    if np.any(kids <= 0) or np.any(kids >= n) or len(np.unique(kids)) != len(kids):
        raise CorruptModel("child ids do not form a binary tree")
    if len(kids) != n - 1:
        raise CorruptModel("unreachable nodes in tree")
    parents = np.flatnonzero(internal)
    if np.any(left[internal] <= parents) or np.any(right[internal] <= parents):
        raise CorruptModel("child id not greater than parent id")
    if not (np.all(np.isfinite(value)) and np.all(np.isfinite(threshold[internal]))):
        raise CorruptModel("non-finite node value")
    return Tree(feature, threshold, left, right, value, gain)


def model_from_dict(d: dict) -> GbdtModel:
    if not isinstance(d, dict) or d.get("format") != FORMAT_NAME:
        raise CorruptModel("not an antispoof-gbdt model file")
    version = d.get("format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"model format_version {version!r}, expected {FORMAT_VERSION}")
    try:
        hp = Hyperparams.from_dict(d["hyperparams"])
        n_features = int(d["n_features"])
        names = [str(s) for s in d["feature_names"]]
        trees = [_validate_tree(t, n_features) for t in d["trees"]]
        base = float(d["base_score"])
        lr = float(d["learning_rate"])
        metadata = dict(d.get("metadata", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModel(f"invalid model file: {exc}") from exc
    if len(names) != n_features:
        raise CorruptModel("feature_names length differs from n_features")
    if not (math.isfinite(base) and lr > 0):
        raise CorruptModel("invalid base_score or learning_rate")
    return GbdtModel(trees, base, lr, hp, n_features, names, metadata, version)


def load_model(path) -> GbdtModel:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IoError(f"{path}: {exc.strerror or exc}") from exc
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptModel(f"{path}: not valid JSON ({exc})") from exc
    return model_from_dict(d)


def with_metadata(model: GbdtModel, **extra) -> GbdtModel:
    return replace(model, metadata={**model.metadata, **extra})
