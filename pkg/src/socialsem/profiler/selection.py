"""Two-sample Kolmogorov-Smirnov statistic and KS-driven feature elimination."""

from __future__ import annotations

import math

import numpy as np

from .features import FeatureMatrix


def ks_statistic(sample_a, sample_b) -> float:
    """Max over pooled points of ``|ECDF_a - ECDF_b|``."""
    a = np.sort(np.asarray(sample_a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(sample_b, dtype=np.float64).ravel())
    if a.size == 0 or b.size == 0:
        raise ValueError("ks_statistic needs two non-empty samples")
    pooled = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, pooled, side="right") / a.size
    cdf_b = np.searchsorted(b, pooled, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


def class_reference(X: np.ndarray, y: np.ndarray, c) -> tuple[np.ndarray, np.ndarray]:
    """Pooled rows of class ``c`` and of all other classes (one sample per column)."""
    return X[y == c], X[y != c]


def elimination_scores(X: np.ndarray, labels) -> np.ndarray:
    """Per-column badness, summed over classes.

    For class ``c`` and column ``j`` the class's own values are compared by KS
    distance with the class's pooled distribution and with the pooled
    distribution of the other classes: ``KS(own, own) - KS(own, other)``. The
    first term is zero, so a column scores high (bad) when its values look
    the same in every class.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(labels)
    classes = list(dict.fromkeys(y.tolist()))
    if len(classes) < 2:
        raise ValueError("feature elimination needs at least two classes")
    scores = np.zeros(X.shape[1])
    for c in classes:
        own, other = class_reference(X, y, c)
        for j in range(X.shape[1]):
            scores[j] += ks_statistic(own[:, j], own[:, j]) - ks_statistic(own[:, j], other[:, j])
    return scores


def eliminate_features(F: FeatureMatrix, labels, drop_fraction: float = 0.05, passes: int = 2):
    """Drop the worst-scoring columns, ``ceil(drop_fraction * s)`` per pass.

    Two passes by default; scores are recomputed on the surviving columns
    before each pass and at least one column is always kept. Ties drop the
    lower column index first. Returns ``(filtered, mask)`` with ``mask`` over the
    columns of ``F``.
    """
    if not 0.0 <= drop_fraction < 0.5:
        raise ValueError(f"drop_fraction must lie in [0, 0.5), got {drop_fraction}")
    y = np.asarray(labels)
    if len(y) != F.values.shape[0]:
        raise ValueError("labels and feature rows differ in length")
    if len(set(y.tolist())) < 2:
        raise ValueError("feature elimination needs at least two classes")

    keep = np.ones(F.values.shape[1], dtype=bool)
    for _ in range(passes):
        cols = np.flatnonzero(keep)
        k = min(math.ceil(drop_fraction * cols.size), cols.size - 1)
        if k <= 0:
            break
        scores = elimination_scores(F.values[:, cols], y)
        worst = sorted(range(cols.size), key=lambda j: (-scores[j], j))[:k]
        keep[cols[worst]] = False

    filtered = F.select(keep)
    if F.mask is not None:
        full = F.mask.copy()
        full[np.flatnonzero(F.mask)[~keep]] = False
        filtered = FeatureMatrix(filtered.values, filtered.names, full)
    return filtered, keep
