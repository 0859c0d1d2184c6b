"""Linear-chain CRF: parameters, exact inference and the regularized likelihood.

The score of a tag sequence ``y`` for observations ``x`` is

    sum_t sum_{f in x_t} state[f, y_t]  +  sum_{t>0} trans[y_{t-1}, y_t]

and all weights live in one vector: ``state`` (features x tags, row-major)
followed by ``trans`` (tags x tags).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp


def logsumexp(a: np.ndarray, axis=None) -> np.ndarray:
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    out = np.log(np.sum(np.exp(a - m), axis=axis, keepdims=True)) + m
    return np.squeeze(out, axis=axis) if axis is not None else out.item()


@dataclass(frozen=True)
class EncodedSequence:
    """One compiled sequence: sparse position x feature indicator matrix plus gold tag ids."""

    X: sp.csr_matrix
    tags: np.ndarray | None = None

    def __len__(self) -> int:
        return self.X.shape[0]


@dataclass
class CrfDataset:
    feature_index: dict[str, int]
    tags: tuple[str, ...]
    sequences: list[EncodedSequence] = field(default_factory=list)

    @property
    def n_features(self) -> int:
        return len(self.feature_index)

    @property
    def n_tags(self) -> int:
        return len(self.tags)

    @property
    def n_weights(self) -> int:
        return self.n_features * self.n_tags + self.n_tags**2


def tag_order(tag_lists: Iterable[Sequence[str]]) -> tuple[str, ...]:
    """``O`` first (when present), then the remaining tags sorted."""
    seen = {t for tags in tag_lists for t in tags}
    rest = sorted(seen - {"O"})
    return (("O",) if "O" in seen else ()) + tuple(rest)


def encode_features(feature_lists: Sequence[Sequence[str]], index: dict[str, int]) -> sp.csr_matrix:
    """Indicator matrix of known features; unknown feature strings are dropped."""
    rows, cols = [], []
    for t, feats in enumerate(feature_lists):
        for f in feats:
            j = index.get(f)
            if j is not None:
                rows.append(t)
                cols.append(j)
    data = np.ones(len(rows))
    return sp.csr_matrix((data, (rows, cols)), shape=(len(feature_lists), len(index)))


def compile_dataset(
    feature_seqs: Sequence[Sequence[Sequence[str]]],
    tag_seqs: Sequence[Sequence[str]],
    min_count: int = 1,
    tags: Sequence[str] | None = None,
) -> CrfDataset:
    """Index features seen at least ``min_count`` times and encode every sequence."""
    if len(feature_seqs) != len(tag_seqs):
        raise ValueError("feature and tag sequence counts differ")
    counts: dict[str, int] = {}
    for seq in feature_seqs:
        for feats in seq:
            for f in feats:
                counts[f] = counts.get(f, 0) + 1
    index: dict[str, int] = {}
    for f, c in counts.items():
        if c >= min_count:
            index[f] = len(index)
    tags = tuple(tags) if tags is not None else tag_order(tag_seqs)
    tag_id = {t: i for i, t in enumerate(tags)}
    seqs = []
    for feats, ys in zip(feature_seqs, tag_seqs):
        if len(feats) != len(ys):
            raise ValueError("sequence has mismatched feature and tag lengths")
        ids = np.array([tag_id[y] for y in ys], dtype=np.intp)
        seqs.append(EncodedSequence(encode_features(feats, index), ids))
    return CrfDataset(index, tags, seqs)


@dataclass(frozen=True)
class CrfModel:
    tags: tuple[str, ...]
    features: tuple[str, ...]
    state: np.ndarray   # (n_features, n_tags)
    trans: np.ndarray   # (n_tags, n_tags)
    sigma: float = 1.0

    def __post_init__(self):
        T = len(self.tags)
        if T == 0:
            raise ValueError("a CRF model needs at least one tag")
        if self.state.shape != (len(self.features), T) or self.trans.shape != (T, T):
            raise ValueError("weight shapes do not match features and tags")
        if not (np.all(np.isfinite(self.state)) and np.all(np.isfinite(self.trans))):
            raise ValueError("CRF weights must be finite")

    @classmethod
    def from_weights(cls, tags: Sequence[str], features: Sequence[str], theta: np.ndarray,
                     sigma: float = 1.0) -> "CrfModel":
        T, F = len(tags), len(features)
        theta = np.asarray(theta, dtype=np.float64)
        if theta.size != F * T + T * T:
            raise ValueError(f"expected {F * T + T * T} weights, got {theta.size}")
        return cls(tuple(tags), tuple(features), theta[: F * T].reshape(F, T).copy(),
                   theta[F * T:].reshape(T, T).copy(), sigma)

    @property
    def weights(self) -> np.ndarray:
        return np.concatenate([self.state.ravel(), self.trans.ravel()])

    @property
    def feature_index(self) -> dict[str, int]:
        return {f: i for i, f in enumerate(self.features)}

    def encode(self, feature_lists: Sequence[Sequence[str]]) -> EncodedSequence:
        return EncodedSequence(encode_features(feature_lists, self.feature_index))


def _split(theta: np.ndarray, n_features: int, n_tags: int) -> tuple[np.ndarray, np.ndarray]:
    k = n_features * n_tags
    return theta[:k].reshape(n_features, n_tags), theta[k:].reshape(n_tags, n_tags)


def emissions(state: np.ndarray, X: sp.csr_matrix) -> np.ndarray:
    return np.asarray(X @ state)


def path_score(E: np.ndarray, trans: np.ndarray, y: Sequence[int]) -> float:
    y = np.asarray(y)
    s = float(E[np.arange(len(y)), y].sum())
    if len(y) > 1:
        s += float(trans[y[:-1], y[1:]].sum())
    return s


def _forward_backward(E: np.ndarray, trans: np.ndarray):
    L, T = E.shape
    alpha = np.empty((L, T))
    beta = np.zeros((L, T))
    alpha[0] = E[0]
    for t in range(1, L):
        alpha[t] = E[t] + logsumexp(alpha[t - 1][:, None] + trans, axis=0)
    for t in range(L - 2, -1, -1):
        beta[t] = logsumexp(trans + (E[t + 1] + beta[t + 1])[None, :], axis=1)
    logZ = float(logsumexp(alpha[L - 1]))
    node = np.exp(alpha + beta - logZ)
    edge = np.exp(
        alpha[:-1, :, None] + trans[None, :, :] + (E[1:] + beta[1:])[:, None, :] - logZ
    )
    return logZ, node, edge


def forward_backward(model: CrfModel, sequence) -> tuple[float, np.ndarray, np.ndarray]:
    """``(logZ, node marginals (L x T), edge marginals ((L-1) x T x T))``.

    ``sequence`` is a compiled sequence or a list of per-position feature string lists.
    """
    seq = sequence if isinstance(sequence, EncodedSequence) else model.encode(sequence)
    if len(seq) == 0:
        raise ValueError("empty sequence")
    return _forward_backward(emissions(model.state, seq.X), model.trans)


def _viterbi(E: np.ndarray, trans: np.ndarray) -> tuple[list[int], float]:
    L, T = E.shape
    delta = E[0].copy()
    back = np.zeros((L, T), dtype=np.intp)
    for t in range(1, L):
        cand = delta[:, None] + trans
        back[t] = np.argmax(cand, axis=0)  # first maximum: lowest previous tag id
        delta = cand[back[t], np.arange(T)] + E[t]
    last = int(np.argmax(delta))
    best = float(delta[last])
    path = [last]
    for t in range(L - 1, 0, -1):
        path.append(int(back[t][path[-1]]))
    return path[::-1], best


def viterbi_decode(model: CrfModel, sequence, return_score: bool = False):
    """Highest-scoring tag sequence (as tag strings); ties go to the lowest tag id."""
    seq = sequence if isinstance(sequence, EncodedSequence) else model.encode(sequence)
    if len(seq) == 0:
        raise ValueError("empty sequence")
    ids, score = _viterbi(emissions(model.state, seq.X), model.trans)
    tags = [model.tags[i] for i in ids]
    return (tags, score) if return_score else tags


def sequence_score(model: CrfModel, sequence, tags: Sequence[str]) -> float:
    seq = sequence if isinstance(sequence, EncodedSequence) else model.encode(sequence)
    tag_id = {t: i for i, t in enumerate(model.tags)}
    return path_score(emissions(model.state, seq.X), model.trans, [tag_id[t] for t in tags])


def nll_and_gradient(theta: np.ndarray, dataset: CrfDataset, sigma: float = 1.0):
    """Negative conditional log-likelihood with an L2 penalty, and its gradient.

    value = sum_seq (logZ - score(gold)) + ||theta||^2 / (2 sigma^2)
    grad  = expected feature counts - empirical counts + theta / sigma^2

    Sequences are accumulated in dataset order.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    theta = np.asarray(theta, dtype=np.float64)
    F, T = dataset.n_features, dataset.n_tags
    state, trans = _split(theta, F, T)
    g_state = np.zeros((F, T))
    g_trans = np.zeros((T, T))
    value = 0.0
    for seq in dataset.sequences:
        E = emissions(state, seq.X)
        logZ, node, edge = _forward_backward(E, trans)
        y = seq.tags
        value += logZ - path_score(E, trans, y)
        resid = node.copy()
        resid[np.arange(len(y)), y] -= 1.0
        g_state += np.asarray(seq.X.T @ resid)
        if len(y) > 1:
            g_trans += edge.sum(axis=0)
            np.add.at(g_trans, (y[:-1], y[1:]), -1.0)
    value += float(theta @ theta) / (2.0 * sigma**2)
    grad = np.concatenate([g_state.ravel(), g_trans.ravel()]) + theta / sigma**2
    return value, grad
