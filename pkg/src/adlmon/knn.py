"""k-nearest-neighbour classifier over Euclidean distance.

Follows the scikit-learn estimator protocol (``fit``/``predict``/
``predict_proba``/``get_params``) so it drops into pipelines and grid
searches, but the neighbour search and voting are implemented here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .errors import ValidationError

VOTES = ("uniform", "inverse")
CONFIDENCE_SUM_TOL = 1e-6
_CHUNK = 512


def euclidean_distance(m, n) -> float:
    """sqrt(sum((m_i - n_i)**2)) for two equal-length vectors."""
    m = np.asarray(m, dtype=float)
    n = np.asarray(n, dtype=float)
    if m.shape != n.shape or m.ndim != 1:
        raise ValidationError(f"dimension mismatch: {m.shape} vs {n.shape}")
    return float(np.sqrt(np.sum((m - n) ** 2)))


@dataclass(frozen=True)
class Prediction:
    label: object
    confidences: dict


def select_prediction(confidences) -> object:
    """Class with the highest confidence; ties go to the first class listed."""
    if not confidences:
        raise ValidationError("confidences must be non-empty")
    total = math.fsum(confidences.values())
    if abs(total - 1.0) > CONFIDENCE_SUM_TOL:
        raise ValidationError(f"confidences sum to {total}, expected 1")
    best_label, best = None, -math.inf
    for label, value in confidences.items():
        if value > best:
            best_label, best = label, value
    return best_label


class KNNClassifier(ClassifierMixin, BaseEstimator):
    """Lazy k-NN learner.

    Parameters
    ----------
    k : int
        Number of neighbours consulted per query.
    vote : {"inverse", "uniform"}
        ``uniform`` gives each neighbour one vote; ``inverse`` weights a
        neighbour by ``1 / (d + eps)``.  Confidences are the normalised vote
        totals.
    eps : float
        Keeps inverse-distance weights finite on exact matches.
    scale : bool
        Min-max scale features using the training range before measuring
        distances.  Off by default.
    classes : sequence, optional
        Fixes the class order (and hence the tie-break).  Defaults to the
        sorted distinct training labels.

    Neighbours at equal distance are taken in training-row order and the
    neighbour list is truncated to exactly ``k``.
    """

    def __init__(self, k=11, vote="inverse", eps=1e-9, scale=False, classes=None):
        self.k = k
        self.vote = vote
        self.eps = eps
        self.scale = scale
        self.classes = classes

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float, y_numeric=False)
        if self.vote not in VOTES:
            raise ValidationError(f"vote must be one of {VOTES}, got {self.vote!r}")
        if not (isinstance(self.k, (int, np.integer)) and 1 <= self.k <= len(X)):
            raise ValidationError(f"k={self.k} must satisfy 1 <= k <= N={len(X)}")
        if self.classes is None:
            classes = np.unique(y)
        else:
            classes = np.array(list(self.classes))
            if len(set(classes.tolist())) != len(classes):
                raise ValidationError("classes must be distinct")
            missing = set(y.tolist()) - set(classes.tolist())
            if missing:
                raise ValidationError(f"labels not in classes: {sorted(map(str, missing))}")
        self.classes_ = classes
        index = {c: i for i, c in enumerate(classes.tolist())}
        self._y_idx = np.array([index[v] for v in y.tolist()], dtype=int)
        if self.scale:
            self.min_ = X.min(axis=0)
            rng = X.max(axis=0) - self.min_
            self.range_ = np.where(rng > 0, rng, 1.0)
        # stored copy; the caller's array is never modified
        self.X_ = self._scaled(X.copy())
        self.y_ = y.copy()
        self.n_features_in_ = X.shape[1]
        return self

    def _scaled(self, X):
        if self.scale:
            return (X - self.min_) / self.range_
        return X

    def _check_query(self, X):
        check_is_fitted(self, "X_")
        X = check_array(X, dtype=float, ensure_2d=False)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.shape[1] != self.n_features_in_:
            raise ValidationError(
                f"query has {X.shape[1]} features, model was fitted with {self.n_features_in_}")
        return self._scaled(X)

    def kneighbors(self, X):
        """Return (distances, indices), each shaped (n_queries, k), nearest first."""
        Q = self._check_query(X)
        dists = np.empty((len(Q), self.k))
        idx = np.empty((len(Q), self.k), dtype=int)
        for start in range(0, len(Q), _CHUNK):
            block = Q[start:start + _CHUNK]
            d = np.sqrt(((block[:, None, :] - self.X_[None, :, :]) ** 2).sum(axis=-1))
            order = np.argsort(d, axis=1, kind="stable")[:, :self.k]
            idx[start:start + len(block)] = order
            dists[start:start + len(block)] = np.take_along_axis(d, order, axis=1)
        return dists, idx

    def predict_proba(self, X):
        dists, idx = self.kneighbors(X)
        if self.vote == "uniform":
            weights = np.ones_like(dists)
        else:
            weights = 1.0 / (dists + self.eps)
        labels = self._y_idx[idx]
        votes = np.zeros((len(idx), len(self.classes_)))
        for c in range(len(self.classes_)):
            votes[:, c] = np.where(labels == c, weights, 0.0).sum(axis=1)
        return votes / votes.sum(axis=1, keepdims=True)

    def predict(self, X):
        proba = self.predict_proba(X)
        # np.argmax returns the first maximum -> class-order tie-break
        return self.classes_[np.argmax(proba, axis=1)]

    def predict_one(self, x) -> Prediction:
        proba = self.predict_proba(np.asarray(x, dtype=float).reshape(1, -1))[0]
        conf = {c: float(p) for c, p in zip(self.classes_.tolist(), proba)}
        return Prediction(label=select_prediction(conf), confidences=conf)

    def predictions(self, X) -> list:
        proba = self.predict_proba(X)
        classes = self.classes_.tolist()
        out = []
        for row in proba:
            conf = {c: float(p) for c, p in zip(classes, row)}
            out.append(Prediction(label=classes[int(np.argmax(row))], confidences=conf))
        return out

    def summary(self) -> dict:
        check_is_fitted(self, "X_")
        return {
            "k": int(self.k),
            "n_samples": int(self.X_.shape[0]),
            "n_features": int(self.X_.shape[1]),
            "classes": [str(c) for c in self.classes_.tolist()],
            "vote": self.vote,
            "scale": bool(self.scale),
        }
