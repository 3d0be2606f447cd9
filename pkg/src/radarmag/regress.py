"""Vital-sign regression harness: ridge-regularized linear regression and a
bootstrap random forest over Gabor features, k-fold cross-validated MAE, and
the raw temporal-FFT baseline they are compared against.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from warnings import warn

import numpy as np
from scipy import linalg

from .features import FeatureRow
from .magnify import BandSpec
from .radargram import Radargram, RangeROI

MODEL_MAGIC = b"RMGM"
MODEL_VERSION = 1


@dataclass
class Dataset:
    """Feature matrix with labels and optional group tags (e.g. posture)."""

    X: np.ndarray
    y: np.ndarray
    feature_names: list[str] = field(default_factory=list)
    groups: np.ndarray | None = None

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.float64)
        if self.X.ndim != 2 or len(self.y) != len(self.X):
            raise ValueError(f"X {self.X.shape} and y {self.y.shape} do not align")
        if not (np.isfinite(self.X).all() and np.isfinite(self.y).all()):
            raise ValueError("dataset contains non-finite values")

    @classmethod
    def from_rows(cls, rows: list[FeatureRow], feature_names=None, groups=None) -> "Dataset":
        if any(r.label_bpm is None for r in rows):
            raise ValueError("all rows need labels to build a dataset")
        X = np.stack([r.features for r in rows])
        y = np.array([r.label_bpm for r in rows])
        return cls(X, y, feature_names=list(feature_names or []),
                   groups=None if groups is None else np.asarray(groups))

    def __len__(self) -> int:
        return len(self.y)


@dataclass(frozen=True)
class LinearModel:
    weights: np.ndarray
    intercept: float
    ridge: float = 0.0

    def predict(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.weights + self.intercept

    kind = "ols"


class ForestModel:
    """Flat-array forest: per node feature index (-1 = leaf), threshold,
    left/right child, and leaf value; one array block per tree."""

    kind = "rf"

    def __init__(self, trees: list[dict], n_features: int, seed: int):
        self.trees = trees
        self.n_features = n_features
        self.seed = seed

    def predict_tree(self, tree: dict, X: np.ndarray) -> np.ndarray:
        node = np.zeros(len(X), dtype=np.int64)
        feature, threshold = tree["feature"], tree["threshold"]
        left, right = tree["left"], tree["right"]
        active = feature[node] >= 0
        while active.any():
            idx = np.where(active)[0]
            nd = node[idx]
            go_left = X[idx, feature[nd]] <= threshold[nd]
            node[idx] = np.where(go_left, left[nd], right[nd])
            active[idx] = feature[node[idx]] >= 0
        return tree["value"][node]

    def predict(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        total = np.zeros(len(X))
        for tree in self.trees:
            total += self.predict_tree(tree, X)
        return total / len(self.trees)


@dataclass(frozen=True)
class ModelReport:
    """Cross-validation result: per-fold MAE (bpm) and their arithmetic mean."""

    kind: str
    fold_maes: tuple[float, ...]
    seed: int
    per_group: dict[str, float] | None = None

    @property
    def mean_mae(self) -> float:
        return float(np.mean(self.fold_maes))

    def to_text(self) -> str:
        lines = [f"model: {self.kind}", f"seed: {self.seed}",
                 f"mean MAE: {self.mean_mae:.6g} bpm", "per-fold MAE (bpm):"]
        lines += [f"  fold {i}: {m:.6g}" for i, m in enumerate(self.fold_maes)]
        if self.per_group:
            lines.append("per-group MAE (bpm):")
            lines += [f"  {g}: {m:.6g}" for g, m in sorted(self.per_group.items())]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        rows = ["fold,mae_bpm"] + [f"{i},{m:.12g}" for i, m in enumerate(self.fold_maes)]
        rows.append(f"mean,{self.mean_mae:.12g}")
        return "\n".join(rows) + "\n"


def fit_ols(train: Dataset, ridge: float = 0.0) -> LinearModel:
    """Least squares with optional L2 penalty, solved by normal equations.

    Features and labels are centered so the intercept is unpenalized.  A
    singular system at ridge = 0 falls back to ridge = 1e-8 with a warning.
    """
    if len(train) < 2:
        raise ValueError("need at least 2 rows")
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    X, y = train.X, train.y
    x_mean = X.mean(axis=0)
    y_mean = y.mean()
    Xc = X - x_mean
    gram = Xc.T @ Xc + ridge * np.eye(X.shape[1])
    rhs = Xc.T @ (y - y_mean)
    try:
        w = linalg.solve(gram, rhs, assume_a="pos")
    except linalg.LinAlgError:
        warn(f"singular normal equations at ridge={ridge}; retrying with ridge=1e-8", stacklevel=2)
        w = linalg.solve(gram + 1e-8 * np.eye(X.shape[1]), rhs, assume_a="pos")
    if not np.isfinite(w).all():
        warn(f"non-finite solution at ridge={ridge}; retrying with ridge=1e-8", stacklevel=2)
        w = linalg.solve(gram + 1e-8 * np.eye(X.shape[1]), rhs, assume_a="pos")
    return LinearModel(weights=w, intercept=float(y_mean - x_mean @ w), ridge=ridge)


def _grow_tree(X, y, rng, max_depth, min_leaf, n_sub):
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node():
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(0.0)
        return len(feature) - 1

    def build(idx, depth):
        node = new_node()
        y_node = y[idx]
        value[node] = float(y_node.mean())
        if depth >= max_depth or len(idx) < 2 * min_leaf or np.ptp(y_node) == 0:
            return node
        best = None  # (gain, feat, thresh)
        total_sum = y_node.sum()
        total_sq = (y_node**2).sum()
        base_sse = total_sq - total_sum**2 / len(idx)
        for f in rng.choice(X.shape[1], size=n_sub, replace=False):
            xv = X[idx, f]
            order = np.argsort(xv, kind="stable")
            xs, ys = xv[order], y_node[order]
            csum = np.cumsum(ys)
            csq = np.cumsum(ys**2)
            n_left = np.arange(1, len(idx))
            valid = xs[1:] != xs[:-1]
            valid &= (n_left >= min_leaf) & (len(idx) - n_left >= min_leaf)
            if not valid.any():
                continue
            left_sse = csq[:-1] - csum[:-1] ** 2 / n_left
            right_sum = total_sum - csum[:-1]
            right_sq = total_sq - csq[:-1]
            right_sse = right_sq - right_sum**2 / (len(idx) - n_left)
            gain = np.where(valid, base_sse - left_sse - right_sse, -np.inf)
            k = int(np.argmax(gain))
            if gain[k] > 0 and (best is None or gain[k] > best[0]):
                best = (float(gain[k]), int(f), float(0.5 * (xs[k] + xs[k + 1])))
        if best is None:
            return node
        _, f, thr = best
        go_left = X[idx, f] <= thr
        feature[node] = f
        threshold[node] = thr
        left[node] = build(idx[go_left], depth + 1)
        right[node] = build(idx[~go_left], depth + 1)
        return node

    build(np.arange(len(y)), 0)
    return {"feature": np.array(feature, dtype=np.int64),
            "threshold": np.array(threshold),
            "left": np.array(left, dtype=np.int64),
            "right": np.array(right, dtype=np.int64),
            "value": np.array(value)}


def fit_rf(train: Dataset, n_trees: int = 100, max_depth: int = 12,
           min_leaf: int = 2, seed: int = 0) -> ForestModel:
    """Bootstrap-sampled CART regression forest.

    Splits minimize within-node squared error over random feature subsets of
    size ceil(sqrt(d)); the prediction is the mean of the tree outputs.
    Per-tree RNG streams are spawned from the seed, so results do not depend
    on training order.
    """
    if len(train) < min_leaf:
        raise ValueError(f"need at least min_leaf={min_leaf} rows")
    X, y = train.X, train.y
    n_sub = int(np.ceil(np.sqrt(X.shape[1])))
    streams = np.random.SeedSequence(seed).spawn(n_trees)
    trees = []
    for ss in streams:
        rng = np.random.default_rng(ss)
        boot = rng.integers(0, len(y), size=len(y))
        trees.append(_grow_tree(X[boot], y[boot], rng, max_depth, min_leaf, n_sub))
    return ForestModel(trees, n_features=X.shape[1], seed=seed)


def _group_folds(groups: np.ndarray, k: int, seed: int) -> list[np.ndarray]:
    """Folds that keep every group's rows together (subject-wise splitting)."""
    unique = np.unique(groups)
    if k > len(unique):
        raise ValueError(f"k={k} exceeds {len(unique)} distinct groups")
    order = np.random.default_rng(seed).permutation(len(unique))
    buckets = [[] for _ in range(k)]
    for i, g in enumerate(unique[order]):
        buckets[i % k].append(np.where(groups == g)[0])
    return [np.concatenate(b) for b in buckets]


def kfold_mae(data: Dataset, k: int = 10, model: str = "rf", seed: int = 0,
              group_split: bool = False, **params) -> ModelReport:
    """Shuffled k-fold cross-validation, reporting MAE in bpm per fold.

    model is 'rf' (params: n_trees, max_depth, min_leaf) or 'ols'
    (params: ridge).  The shuffle is seeded once; folds partition the rows
    exactly.  group_split keeps each group's rows in a single fold (the
    dataset must carry group tags).
    """
    n = len(data)
    if k > n:
        raise ValueError(f"k={k} exceeds {n} rows")
    if k < 2:
        raise ValueError("k must be at least 2")
    if group_split:
        if data.groups is None:
            raise ValueError("group_split requires group tags on the dataset")
        folds = _group_folds(np.asarray(data.groups), k, seed)
    else:
        order = np.random.default_rng(seed).permutation(n)
        folds = np.array_split(order, k)
    fold_maes = []
    group_abs: dict[str, list] = {}
    for i, test_idx in enumerate(folds):
        train_idx = np.concatenate([folds[j] for j in range(k) if j != i])
        subset = Dataset(data.X[train_idx], data.y[train_idx])
        if model == "rf":
            fitted = fit_rf(subset, seed=seed + i, **params)
        elif model == "ols":
            fitted = fit_ols(subset, **params)
        else:
            raise ValueError(f"unknown model {model!r}, expected 'rf' or 'ols'")
        errors = np.abs(fitted.predict(data.X[test_idx]) - data.y[test_idx])
        fold_maes.append(float(errors.mean()))
        if data.groups is not None:
            for g, e in zip(data.groups[test_idx], errors):
                group_abs.setdefault(str(g), []).append(e)
    per_group = {g: float(np.mean(v)) for g, v in group_abs.items()} or None
    return ModelReport(kind=model, fold_maes=tuple(fold_maes), seed=seed, per_group=per_group)


def temporal_fft_baseline(window: Radargram, roi: RangeROI, search_band: BandSpec) -> float:
    """Conventional estimate: peak of the ROI-averaged magnitude spectra of the
    raw slow-time signals, in bpm.  No Gabor processing, no interpolation."""
    roi.validate(window.n_bins)
    search_band.validate(window.fps)
    segment = window.data[roi.slice].astype(np.float64)
    segment = segment - segment.mean(axis=1, keepdims=True)
    spectra = np.abs(np.fft.rfft(segment, axis=1)).mean(axis=0)
    freqs = np.fft.rfftfreq(window.n_frames, 1.0 / window.fps)
    inside = np.where((freqs >= search_band.f_lo) & (freqs <= search_band.f_hi))[0]
    if len(inside) == 0:
        raise ValueError(f"band [{search_band.f_lo}, {search_band.f_hi}] Hz contains no DFT bins")
    peak = inside[np.argmax(spectra[inside])]
    if spectra[peak] == 0:
        raise ValueError("no spectral peak above zero in the search band (static scene?)")
    return 60.0 * freqs[peak]


_DTYPE_CODES = {1: np.dtype("<i8"), 2: np.dtype("<f8")}


def _write_array(fh, arr: np.ndarray) -> None:
    code = 1 if arr.dtype.kind == "i" else 2
    arr = arr.astype(_DTYPE_CODES[code], copy=False)
    fh.write(struct.pack("<BI", code, arr.ndim))
    fh.write(struct.pack(f"<{arr.ndim}Q", *arr.shape))
    fh.write(arr.tobytes())


def _read_array(fh) -> np.ndarray:
    code, ndim = struct.unpack("<BI", fh.read(5))
    shape = struct.unpack(f"<{ndim}Q", fh.read(8 * ndim))
    count = int(np.prod(shape)) if shape else 1
    return np.frombuffer(fh.read(8 * count), dtype=_DTYPE_CODES[code]).reshape(shape).copy()


def save_model(model, path: str) -> None:
    """Versioned binary model file (format in README): magic RMGM, version,
    kind, then the model arrays; byte-deterministic."""
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        kind_code = 1 if model.kind == "ols" else 2
        fh.write(struct.pack("<II", MODEL_VERSION, kind_code))
        if model.kind == "ols":
            fh.write(struct.pack("<dd", model.intercept, model.ridge))
            _write_array(fh, model.weights)
        else:
            fh.write(struct.pack("<IIq", len(model.trees), model.n_features, model.seed))
            for tree in model.trees:
                for key in ("feature", "threshold", "left", "right", "value"):
                    _write_array(fh, tree[key])


def load_model(path: str):
    with open(path, "rb") as fh:
        if fh.read(4) != MODEL_MAGIC:
            raise ValueError(f"{path}: not a model file")
        version, kind_code = struct.unpack("<II", fh.read(8))
        if version != MODEL_VERSION:
            raise ValueError(f"{path}: unsupported model version {version}")
        if kind_code == 1:
            intercept, ridge = struct.unpack("<dd", fh.read(16))
            return LinearModel(weights=_read_array(fh), intercept=intercept, ridge=ridge)
        n_trees, n_features, seed = struct.unpack("<IIq", fh.read(16))
        trees = []
        for _ in range(n_trees):
            trees.append({key: _read_array(fh)
                          for key in ("feature", "threshold", "left", "right", "value")})
        return ForestModel(trees, n_features=n_features, seed=seed)
