"""Outbreak labeling and the classifier zoo.

A week is an outbreak when its incidence strictly exceeds the historical
mean. Features of week t predict the label of week t+1. All ten classifier
kinds are implemented here directly; evaluation flags overfit (train-test
accuracy gap > 0.10) and degenerate (constant test predictions) models, and
model selection filters both out before taking the best test accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.special import expit as sigmoid

from .base import BaseEstimator
from .exceptions import (
    AllModelsRejected,
    EmptyInput,
    EmptyTest,
    SingleClassTrainSet,
    TooShort,
)
from .lstm import AdamState, adam_step
from .validation import as_float_2d
from .weeks import WeeklySeries


@dataclass(frozen=True)
class FeatureRow:
    """Non-clinical weekly features: rain, temperature, search volume, tweets."""

    precipitation: float
    temperature: float
    search_volume: float
    tweet_count: int

    def __post_init__(self):
        for name in ("precipitation", "temperature", "search_volume"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.tweet_count < 0:
            raise ValueError("tweet_count must be >= 0")

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.precipitation, self.temperature, self.search_volume, float(self.tweet_count)]
        )


@dataclass(frozen=True)
class LabeledDataset:
    rows: tuple[tuple[FeatureRow, int], ...]

    def __post_init__(self):
        for _, label in self.rows:
            if label not in (0, 1):
                raise ValueError(f"labels must be 0 or 1, got {label}")

    @property
    def X(self) -> np.ndarray:
        return np.array([row.as_array() for row, _ in self.rows]).reshape(len(self.rows), -1)

    @property
    def y(self) -> np.ndarray:
        return np.array([label for _, label in self.rows], dtype=int)

    def slice(self, start: int, stop: int) -> "LabeledDataset":
        return LabeledDataset(self.rows[start:stop])

    def __len__(self) -> int:
        return len(self.rows)


class ClassifierKind(str, Enum):
    LOGISTIC = "logistic"
    NAIVE_BAYES = "naive_bayes"
    KNN = "knn"
    SVM_LINEAR = "svm_linear"
    TREE = "tree"
    TREE_BAGGING = "tree_bagging"
    TREE_BOOSTING = "tree_boosting"
    RANDOM_FOREST = "random_forest"
    VOTING = "voting"
    FEEDFORWARD_NN = "feedforward_nn"


# Tie-break order for select_model: the ensemble kinds the evaluation favors
# come first, then the declaration order.
SELECTION_PRECEDENCE: tuple[ClassifierKind, ...] = (
    ClassifierKind.RANDOM_FOREST,
    ClassifierKind.TREE_BAGGING,
    ClassifierKind.LOGISTIC,
    ClassifierKind.NAIVE_BAYES,
    ClassifierKind.KNN,
    ClassifierKind.SVM_LINEAR,
    ClassifierKind.TREE,
    ClassifierKind.TREE_BOOSTING,
    ClassifierKind.VOTING,
    ClassifierKind.FEEDFORWARD_NN,
)

# z-scored features for the margin/distance-based kinds; trees and the
# Gaussian model consume raw features.
STANDARDIZED_KINDS = {
    ClassifierKind.LOGISTIC,
    ClassifierKind.KNN,
    ClassifierKind.SVM_LINEAR,
    ClassifierKind.FEEDFORWARD_NN,
}


def label_outbreaks(incidence) -> list[int]:
    """1 for every week whose cases strictly exceed the series mean.

    A week exactly at the mean is 0; an all-equal series labels all zero.
    """
    if isinstance(incidence, WeeklySeries):
        values = np.asarray(incidence.values(), dtype=float)
    else:
        values = np.asarray(list(incidence), dtype=float)
    if values.size == 0:
        raise EmptyInput("incidence series is empty")
    mean = values.mean()
    return [1 if v > mean else 0 for v in values]


def build_dataset(weeks: Sequence[tuple[FeatureRow, float]]) -> LabeledDataset:
    """Pair features of week t with the outbreak label of week t+1.

    The final week contributes features to no row, so n weeks give n-1 rows.
    """
    if len(weeks) < 2:
        raise TooShort(f"need at least 2 weeks, got {len(weeks)}")
    labels = label_outbreaks([cases for _, cases in weeks])
    rows = tuple((weeks[t][0], labels[t + 1]) for t in range(len(weeks) - 1))
    return LabeledDataset(rows)


def split_dataset(dataset: LabeledDataset, test_fraction: float = 0.25) -> tuple[LabeledDataset, LabeledDataset]:
    """Chronological split, same arithmetic as the series splitter."""
    if not (0.0 < test_fraction < 1.0):
        raise ValueError("test_fraction must be in (0, 1)")
    n = len(dataset)
    if n < 8:
        raise TooShort(f"need at least 8 rows to split, got {n}")
    n_train = min(max(math.ceil((1.0 - test_fraction) * n), 1), n - 1)
    return dataset.slice(0, n_train), dataset.slice(n_train, n)


# -- individual classifiers ---------------------------------------------------


class LogisticRegressionGD(BaseEstimator):
    """Full-batch gradient descent on mean cross-entropy, zero init."""

    def __init__(self, learning_rate: float = 0.1, n_iter: int = 2000):
        self.learning_rate = learning_rate
        self.n_iter = n_iter
        self.coef_: np.ndarray | None = None

    def fit(self, X, y) -> "LogisticRegressionGD":
        X = as_float_2d(X)
        y = np.asarray(y, dtype=float)
        Xb = np.column_stack([X, np.ones(len(X))])
        w = np.zeros(Xb.shape[1])
        for _ in range(self.n_iter):
            p = sigmoid(Xb @ w)
            w = w - self.learning_rate * (Xb.T @ (p - y)) / len(y)
        self.coef_ = w
        return self

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted("coef_")
        X = as_float_2d(X)
        Xb = np.column_stack([X, np.ones(len(X))])
        return sigmoid(Xb @ self.coef_)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)


class GaussianNaiveBayes(BaseEstimator):
    """Per-class Gaussian fit with a variance floor."""

    def __init__(self, var_floor: float = 1e-9):
        self.var_floor = var_floor
        self.classes_: np.ndarray | None = None
        self.theta_: np.ndarray | None = None
        self.var_: np.ndarray | None = None
        self.log_prior_: np.ndarray | None = None

    def fit(self, X, y) -> "GaussianNaiveBayes":
        X = as_float_2d(X)
        y = np.asarray(y, dtype=int)
        self.classes_ = np.array([0, 1])
        theta, var, prior = [], [], []
        for cls in self.classes_:
            Xc = X[y == cls]
            theta.append(Xc.mean(axis=0))
            var.append(np.maximum(Xc.var(axis=0), self.var_floor))
            prior.append(len(Xc) / len(X))
        self.theta_ = np.array(theta)
        self.var_ = np.array(var)
        self.log_prior_ = np.log(np.array(prior))
        return self

    def joint_log_likelihood(self, X) -> np.ndarray:
        """log P(x | class) + log P(class), one column per class."""
        self._check_fitted("theta_")
        X = as_float_2d(X)
        out = np.empty((len(X), 2))
        for j in range(2):
            log_pdf = -0.5 * (
                np.log(2.0 * np.pi * self.var_[j]) + (X - self.theta_[j]) ** 2 / self.var_[j]
            )
            out[:, j] = self.log_prior_[j] + log_pdf.sum(axis=1)
        return out

    def predict_proba(self, X) -> np.ndarray:
        jll = self.joint_log_likelihood(X)
        shifted = jll - jll.max(axis=1, keepdims=True)
        probs = np.exp(shifted)
        probs /= probs.sum(axis=1, keepdims=True)
        return probs[:, 1]

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)


class KNearestNeighbors(BaseEstimator):
    """Euclidean k-NN; probability is the fraction of neighbors labeled 1.

    Distance ties resolve by training index (stable sort), so predictions are
    reproducible.
    """

    def __init__(self, k: int = 5):
        self.k = k
        self.X_: np.ndarray | None = None
        self.y_: np.ndarray | None = None

    def fit(self, X, y) -> "KNearestNeighbors":
        self.X_ = as_float_2d(X)
        self.y_ = np.asarray(y, dtype=int)
        return self

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted("X_")
        X = as_float_2d(X)
        k = min(self.k, len(self.X_))
        out = np.empty(len(X))
        for i, row in enumerate(X):
            dist = np.sqrt(((self.X_ - row) ** 2).sum(axis=1))
            nearest = np.argsort(dist, kind="stable")[:k]
            out[i] = self.y_[nearest].mean()
        return out

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)


class LinearSVM(BaseEstimator):
    """Soft-margin primal subgradient descent (Pegasos-style).

    Labels are mapped to +/-1; a bias feature is appended. The probability is
    a logistic squash of the signed margin.
    """

    def __init__(self, lam: float = 1e-3, epochs: int = 2000, seed: int = 0):
        self.lam = lam
        self.epochs = epochs
        self.seed = seed
        self.coef_: np.ndarray | None = None

    def fit(self, X, y) -> "LinearSVM":
        X = as_float_2d(X)
        y_pm = np.where(np.asarray(y, dtype=int) == 1, 1.0, -1.0)
        Xb = np.column_stack([X, np.ones(len(X))])
        rng = np.random.default_rng(self.seed)
        w = np.zeros(Xb.shape[1])
        t = 0
        for _ in range(self.epochs):
            for idx in rng.permutation(len(Xb)):
                t += 1
                eta = 1.0 / (self.lam * t)
                margin = y_pm[idx] * (Xb[idx] @ w)
                w *= 1.0 - eta * self.lam
                if margin < 1.0:
                    w += eta * y_pm[idx] * Xb[idx]
        self.coef_ = w
        return self

    def decision_function(self, X) -> np.ndarray:
        self._check_fitted("coef_")
        X = as_float_2d(X)
        return np.column_stack([X, np.ones(len(X))]) @ self.coef_

    def predict_proba(self, X) -> np.ndarray:
        return sigmoid(self.decision_function(X))

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)


@dataclass
class _Leaf:
    p1: float


@dataclass
class _Split:
    feature: int
    threshold: float
    left: "_Split | _Leaf"
    right: "_Split | _Leaf"


class DecisionTreeCart(BaseEstimator):
    """CART with weighted Gini impurity and midpoint thresholds.

    Rows with feature <= threshold go left. Ties between candidate splits keep
    the first one found (features scanned in index order, thresholds
    ascending), which makes trees deterministic. ``max_features`` limits the
    features examined per split (random forests); the rng is supplied by the
    ensemble so bare trees stay seed-free.
    """

    def __init__(self, max_depth: int = 6, min_leaf: int = 2, max_features: int | None = None):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.root_: _Split | _Leaf | None = None

    def fit(self, X, y, sample_weight=None, rng: np.random.Generator | None = None) -> "DecisionTreeCart":
        X = as_float_2d(X)
        y = np.asarray(y, dtype=float)
        w = np.ones(len(y)) if sample_weight is None else np.asarray(sample_weight, dtype=float)
        self.root_ = self._grow(X, y, w, depth=0, rng=rng)
        return self

    def _grow(self, X, y, w, depth: int, rng) -> _Split | _Leaf:
        total_w = w.sum()
        p1 = float((w * y).sum() / total_w) if total_w > 0 else 0.0
        if depth >= self.max_depth or len(y) < 2 * self.min_leaf or p1 in (0.0, 1.0):
            return _Leaf(p1)
        found = self._best_split(X, y, w, rng)
        if found is None:
            return _Leaf(p1)
        feature, threshold = found
        mask = X[:, feature] <= threshold
        return _Split(
            feature=feature,
            threshold=threshold,
            left=self._grow(X[mask], y[mask], w[mask], depth + 1, rng),
            right=self._grow(X[~mask], y[~mask], w[~mask], depth + 1, rng),
        )

    def _best_split(self, X, y, w, rng) -> tuple[int, float] | None:
        n, d = X.shape
        if self.max_features is not None and self.max_features < d:
            features = np.sort(rng.choice(d, size=self.max_features, replace=False))
        else:
            features = np.arange(d)
        best_score = np.inf
        best: tuple[int, float] | None = None
        total_w = w.sum()
        for feat in features:
            order = np.argsort(X[:, feat], kind="stable")
            xs, ys, ws = X[order, feat], y[order], w[order]
            cum_w = np.cumsum(ws)
            cum_pos = np.cumsum(ws * ys)
            idx = np.arange(n - 1)
            valid = xs[:-1] != xs[1:]
            valid &= (idx + 1 >= self.min_leaf) & (n - idx - 1 >= self.min_leaf)
            if not valid.any():
                continue
            wl = cum_w[:-1]
            pl = cum_pos[:-1]
            wr = total_w - wl
            pr = cum_pos[-1] - pl
            with np.errstate(divide="ignore", invalid="ignore"):
                gini_l = 1.0 - (pl / wl) ** 2 - ((wl - pl) / wl) ** 2
                gini_r = 1.0 - (pr / wr) ** 2 - ((wr - pr) / wr) ** 2
                score = (wl * gini_l + wr * gini_r) / total_w
            score = np.where(valid, score, np.inf)
            i = int(np.argmin(score))
            if score[i] < best_score:
                best_score = float(score[i])
                best = (int(feat), float((xs[i] + xs[i + 1]) / 2.0))
        return best

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted("root_")
        X = as_float_2d(X)
        out = np.empty(len(X))
        for i, row in enumerate(X):
            node = self.root_
            while isinstance(node, _Split):
                node = node.left if row[node.feature] <= node.threshold else node.right
            out[i] = node.p1
        return out

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)


class BaggedTrees(BaseEstimator):
    """Bootstrap-aggregated CART trees; probability is the tree-vote fraction."""

    def __init__(self, n_trees: int = 25, max_depth: int = 6, min_leaf: int = 2, seed: int = 0):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.seed = seed
        self.trees_: list[DecisionTreeCart] | None = None

    def fit(self, X, y) -> "BaggedTrees":
        X = as_float_2d(X)
        y = np.asarray(y, dtype=int)
        rng = np.random.default_rng(self.seed)
        trees = []
        for _ in range(self.n_trees):
            idx = rng.integers(0, len(y), size=len(y))
            tree = DecisionTreeCart(max_depth=self.max_depth, min_leaf=self.min_leaf)
            tree.fit(X[idx], y[idx])
            trees.append(tree)
        self.trees_ = trees
        return self

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted("trees_")
        votes = np.array([t.predict(X) for t in self.trees_])
        return votes.mean(axis=0)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)


class AdaBoostTrees(BaseEstimator):
    """AdaBoost over depth-2 trees; probability is the weighted-vote fraction."""

    def __init__(self, n_rounds: int = 50, max_depth: int = 2):
        self.n_rounds = n_rounds
        self.max_depth = max_depth
        self.stages_: list[tuple[DecisionTreeCart, float]] | None = None

    def fit(self, X, y) -> "AdaBoostTrees":
        X = as_float_2d(X)
        y = np.asarray(y, dtype=int)
        y_pm = np.where(y == 1, 1.0, -1.0)
        w = np.full(len(y), 1.0 / len(y))
        stages: list[tuple[DecisionTreeCart, float]] = []
        for _ in range(self.n_rounds):
            tree = DecisionTreeCart(max_depth=self.max_depth, min_leaf=1)
            tree.fit(X, y, sample_weight=w)
            pred_pm = np.where(tree.predict(X) == 1, 1.0, -1.0)
            err = float(w[pred_pm != y_pm].sum() / w.sum())
            err = min(max(err, 1e-10), 1.0 - 1e-10)
            alpha = 0.5 * math.log((1.0 - err) / err)
            stages.append((tree, alpha))
            if err <= 1e-10 or err >= 0.5:
                break
            w = w * np.exp(-alpha * y_pm * pred_pm)
            w /= w.sum()
        self.stages_ = stages
        return self

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted("stages_")
        X = as_float_2d(X)
        total = sum(alpha for _, alpha in self.stages_)
        votes = np.zeros(len(X))
        for tree, alpha in self.stages_:
            votes += alpha * tree.predict(X)
        return votes / total if total > 0 else np.full(len(X), 0.5)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)


class RandomForest(BaseEstimator):
    """Bootstrapped trees with sqrt(d) features per split, depth 8."""

    def __init__(self, n_trees: int = 50, max_depth: int = 8, min_leaf: int = 1, seed: int = 0):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.seed = seed
        self.trees_: list[DecisionTreeCart] | None = None

    def fit(self, X, y) -> "RandomForest":
        X = as_float_2d(X)
        y = np.asarray(y, dtype=int)
        rng = np.random.default_rng(self.seed)
        k = max(1, int(round(math.sqrt(X.shape[1]))))
        trees = []
        for _ in range(self.n_trees):
            idx = rng.integers(0, len(y), size=len(y))
            tree = DecisionTreeCart(max_depth=self.max_depth, min_leaf=self.min_leaf, max_features=k)
            tree.fit(X[idx], y[idx], rng=rng)
            trees.append(tree)
        self.trees_ = trees
        return self

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted("trees_")
        votes = np.array([t.predict(X) for t in self.trees_])
        return votes.mean(axis=0)

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)


class FeedForwardClassifier(BaseEstimator):
    """One hidden layer of 16 rectified units, sigmoid output, Adam on BCE."""

    def __init__(self, hidden: int = 16, epochs: int = 300, learning_rate: float = 0.01, seed: int = 0):
        self.hidden = hidden
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.seed = seed
        self.params_: dict[str, np.ndarray] | None = None

    def fit(self, X, y) -> "FeedForwardClassifier":
        X = as_float_2d(X)
        y = np.asarray(y, dtype=float)
        rng = np.random.default_rng(self.seed)
        d = X.shape[1]
        s1 = 1.0 / math.sqrt(d)
        s2 = 1.0 / math.sqrt(self.hidden)
        params = {
            "W1": rng.uniform(-s1, s1, size=(self.hidden, d)),
            "b1": np.zeros(self.hidden),
            "w2": rng.uniform(-s2, s2, size=self.hidden),
            "b2": np.zeros(1),
        }
        state = AdamState(
            learning_rate=self.learning_rate,
            beta1=0.9,
            beta2=0.999,
            eps=1e-8,
            m={k: np.zeros_like(p) for k, p in params.items()},
            v={k: np.zeros_like(p) for k, p in params.items()},
        )
        n = len(y)
        for t in range(1, self.epochs + 1):
            z1 = X @ params["W1"].T + params["b1"]
            a1 = np.maximum(z1, 0.0)
            p = sigmoid(a1 @ params["w2"] + params["b2"][0])
            dlogit = (p - y) / n
            grads = {
                "w2": a1.T @ dlogit,
                "b2": np.array([dlogit.sum()]),
            }
            da1 = np.outer(dlogit, params["w2"]) * (z1 > 0)
            grads["W1"] = da1.T @ X
            grads["b1"] = da1.sum(axis=0)
            params, state = adam_step(state, params, grads, t)
        self.params_ = params
        return self

    def predict_proba(self, X) -> np.ndarray:
        self._check_fitted("params_")
        X = as_float_2d(X)
        a1 = np.maximum(X @ self.params_["W1"].T + self.params_["b1"], 0.0)
        return sigmoid(a1 @ self.params_["w2"] + self.params_["b2"][0])

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)


class ConstantClassifier(BaseEstimator):
    """Diagnostic stub that always predicts one class.

    Never produced by train_classifier; exists so degenerate-model handling
    can be exercised directly.
    """

    def __init__(self, label: int = 0):
        self.label = label

    def fit(self, X=None, y=None) -> "ConstantClassifier":
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = as_float_2d(X)
        return np.full(len(X), float(self.label))

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(int)


# -- training / evaluation ----------------------------------------------------


@dataclass(frozen=True)
class TrainedClassifier:
    """A fitted model plus the (optional) z-score transform its kind uses."""

    kind: str
    model: object
    feature_mean: np.ndarray | None = None
    feature_std: np.ndarray | None = None

    def _transform(self, X: np.ndarray) -> np.ndarray:
        if self.feature_mean is None:
            return X
        return (X - self.feature_mean) / self.feature_std

    def proba(self, X) -> np.ndarray:
        X = as_float_2d(X)
        return np.clip(self.model.predict_proba(self._transform(X)), 0.0, 1.0)

    def predictions(self, X) -> np.ndarray:
        return (self.proba(X) >= 0.5).astype(int)


@dataclass(frozen=True)
class EvalReport:
    kind: str
    train_accuracy: float
    test_accuracy: float
    overfit: bool
    degenerate: bool


def _zscore_params(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return mean, std


def _build_model(kind: ClassifierKind, seed: int):
    if kind == ClassifierKind.LOGISTIC:
        return LogisticRegressionGD()
    if kind == ClassifierKind.NAIVE_BAYES:
        return GaussianNaiveBayes()
    if kind == ClassifierKind.KNN:
        return KNearestNeighbors()
    if kind == ClassifierKind.SVM_LINEAR:
        return LinearSVM(seed=seed)
    if kind == ClassifierKind.TREE:
        return DecisionTreeCart()
    if kind == ClassifierKind.TREE_BAGGING:
        return BaggedTrees(seed=seed)
    if kind == ClassifierKind.TREE_BOOSTING:
        return AdaBoostTrees()
    if kind == ClassifierKind.RANDOM_FOREST:
        return RandomForest(seed=seed)
    if kind == ClassifierKind.FEEDFORWARD_NN:
        return FeedForwardClassifier(seed=seed)
    raise ValueError(f"no direct builder for {kind}")


VOTING_MEMBERS = (
    ClassifierKind.LOGISTIC,
    ClassifierKind.NAIVE_BAYES,
    ClassifierKind.KNN,
    ClassifierKind.RANDOM_FOREST,
)


class VotingEnsemble:
    """Hard majority vote over the fixed member committee."""

    def __init__(self, members: list[TrainedClassifier]):
        self.members = members

    def vote_fraction(self, X: np.ndarray) -> np.ndarray:
        votes = np.array([m.predictions(X) for m in self.members])
        return votes.mean(axis=0)


@dataclass(frozen=True)
class _VotingTrained(TrainedClassifier):
    def proba(self, X) -> np.ndarray:
        X = as_float_2d(X)
        return self.model.vote_fraction(X)


def train_classifier(kind: ClassifierKind, train: LabeledDataset, seed: int = 0) -> TrainedClassifier:
    """Fit one classifier kind on the training rows.

    Rejects single-class training sets; every kind is deterministic given the
    seed.
    """
    if len(train) < 2:
        raise TooShort(f"need at least 2 training rows, got {len(train)}")
    y = train.y
    if len(np.unique(y)) < 2:
        raise SingleClassTrainSet("training set contains a single label class")
    X = train.X

    if kind == ClassifierKind.VOTING:
        members = [train_classifier(k, train, seed) for k in VOTING_MEMBERS]
        return _VotingTrained(kind=kind.value, model=VotingEnsemble(members))

    model = _build_model(kind, seed)
    if kind in STANDARDIZED_KINDS:
        mean, std = _zscore_params(X)
        model.fit((X - mean) / std, y)
        return TrainedClassifier(kind=kind.value, model=model, feature_mean=mean, feature_std=std)
    model.fit(X, y)
    return TrainedClassifier(kind=kind.value, model=model)


def predict_proba(clf: TrainedClassifier, row: FeatureRow) -> float:
    """Probability of an outbreak next week, in [0, 1]."""
    return float(clf.proba(row.as_array().reshape(1, -1))[0])


def evaluate(clf: TrainedClassifier, train: LabeledDataset, test: LabeledDataset) -> EvalReport:
    """Accuracies at the 0.5 threshold plus the overfit/degenerate flags."""
    if len(test) == 0:
        raise EmptyTest("test set is empty")
    train_pred = clf.predictions(train.X)
    test_pred = clf.predictions(test.X)
    train_acc = float((train_pred == train.y).mean())
    test_acc = float((test_pred == test.y).mean())
    return EvalReport(
        kind=clf.kind,
        train_accuracy=train_acc,
        test_accuracy=test_acc,
        overfit=(train_acc - test_acc) > 0.10,
        degenerate=bool(len(np.unique(test_pred)) == 1),
    )


def select_model(reports: Sequence[EvalReport]) -> ClassifierKind:
    """Drop degenerate and overfit models, then take the best test accuracy.

    Ties resolve by the fixed precedence order, so the result does not depend
    on report order.
    """
    if not reports:
        raise AllModelsRejected("no reports to select from")
    survivors = [r for r in reports if not r.degenerate and not r.overfit]
    if not survivors:
        raise AllModelsRejected("every model is degenerate or overfit")

    def precedence(report: EvalReport) -> int:
        kind = ClassifierKind(report.kind)
        return SELECTION_PRECEDENCE.index(kind)

    best = min(survivors, key=lambda r: (-r.test_accuracy, precedence(r)))
    return ClassifierKind(best.kind)


def export_eval_table(reports: Sequence[EvalReport]) -> str:
    """Delimited table of the evaluation results, one classifier per row."""
    lines = ["kind,train_accuracy,test_accuracy,overfit,degenerate"]
    for r in reports:
        lines.append(
            f"{r.kind},{r.train_accuracy:.4f},{r.test_accuracy:.4f},"
            f"{str(r.overfit).lower()},{str(r.degenerate).lower()}"
        )
    return "\n".join(lines) + "\n"
