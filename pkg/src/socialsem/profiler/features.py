"""Per-document distribution statistics over the eigen word space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..wordspace import WordSpace

FEATURE_NAMES = (
    "mean",
    "variance",
    "skewness",
    "kurtosis",
    "min",
    "max",
    "median",
    "iqr",
    "entropy",
)
N_FEATURES = len(FEATURE_NAMES)


@dataclass(frozen=True)
class FeatureMatrix:
    values: np.ndarray                   # (n, s)
    names: tuple[str, ...] = FEATURE_NAMES
    mask: np.ndarray | None = None       # kept columns of the original 9, when filtered

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[1] != len(self.names):
            raise ValueError(
                f"feature matrix shape {self.values.shape} does not match {len(self.names)} names"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature matrix contains NaN or Inf")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def select(self, mask: np.ndarray) -> "FeatureMatrix":
        mask = np.asarray(mask, dtype=bool)
        names = tuple(n for n, keep in zip(self.names, mask) if keep)
        return FeatureMatrix(self.values[:, mask], names, mask)


def row_statistics(R: np.ndarray) -> np.ndarray:
    """The nine statistics of every row of ``R`` as an ``(n, 9)`` array.

    Population moments throughout; skewness and excess kurtosis are 0 for rows
    whose variance vanishes (to working precision), and the entropy of an
    all-zero row is 0.
    """
    R = np.atleast_2d(np.asarray(R, dtype=np.float64))
    n_rows, width = R.shape
    if width == 0:
        raise ValueError("cannot compute statistics of empty vectors")

    mean = R.mean(axis=1)
    dev = R - mean[:, None]
    m2 = np.mean(dev**2, axis=1)
    # standardised moments are scale free; rescaling by the row's largest
    # magnitude keeps tiny rows from underflowing
    scale = np.max(np.abs(R), axis=1)
    z = dev / np.where(scale > 0, scale, 1.0)[:, None]
    s2, s3, s4 = (np.mean(z**k, axis=1) for k in (2, 3, 4))
    flat = s2 <= (64 * np.finfo(float).eps) ** 2
    safe = np.where(flat, 1.0, s2)
    skew = np.where(flat, 0.0, s3 / safe**1.5)
    kurt = np.where(flat, 0.0, s4 / safe**2 - 3.0)
    var = np.where(flat, 0.0, m2)

    q25, q50, q75 = np.percentile(R, [25, 50, 75], axis=1)

    mass = np.abs(R)
    total = mass.sum(axis=1)
    p = mass / np.where(total > 0, total, 1.0)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(p > 0, p * np.log(p), 0.0)
    entropy = np.where(total > 0, -plogp.sum(axis=1), 0.0)

    return np.column_stack(
        [mean, var, skew, kurt, R.min(axis=1), R.max(axis=1), q50, q75 - q25, entropy]
    )


def statistical_features(ws: WordSpace, n_docs: int) -> FeatureMatrix:
    """Nine statistics of each document's row of the eigenvector matrix."""
    if n_docs == 0:
        raise ValueError("no documents")
    if ws.n != n_docs:
        raise ValueError(f"word space has {ws.n} rows but {n_docs} documents were given")
    return FeatureMatrix(row_statistics(ws.eigenvectors))
