"""Document-term matrices, document Gram matrices and their eigen word space.

Rows are documents and columns are vocabulary terms, so the Gram matrix
``A = V V^T`` is ``n x n`` over documents and its eigenvector matrix ``W`` has
one row per document.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


class EigenError(ArithmeticError):
    """Raised when the eigensolver input is invalid or it fails to converge."""


@dataclass(frozen=True)
class Vocabulary:
    index: dict[str, int]

    @classmethod
    def build(cls, documents: Iterable[Sequence[str]]) -> "Vocabulary":
        """Terms indexed by first occurrence over ``documents`` in order."""
        index: dict[str, int] = {}
        for tokens in documents:
            for tok in tokens:
                if tok not in index:
                    index[tok] = len(index)
        return cls(index)

    def __len__(self) -> int:
        return len(self.index)

    def __contains__(self, term: str) -> bool:
        return term in self.index

    @property
    def terms(self) -> list[str]:
        return list(self.index)


def _token_lists(corpus) -> list[Sequence[str]]:
    docs = getattr(corpus, "documents", corpus)
    return [getattr(d, "tokens", d) for d in docs]


def build_vocabulary(corpus) -> Vocabulary:
    return Vocabulary.build(_token_lists(corpus))


def build_doc_term_matrix(corpus, vocab: Vocabulary) -> np.ndarray:
    """Raw term-frequency matrix, one row per document; out-of-vocabulary tokens are ignored.

    ``corpus`` may be a :class:`~socialsem.corpus.ProfilingCorpus` or any
    sequence of token lists.
    """
    docs = _token_lists(corpus)
    if not docs:
        raise ValueError("cannot build a document-term matrix from an empty corpus")
    V = np.zeros((len(docs), len(vocab)), dtype=np.int64)
    for i, tokens in enumerate(docs):
        cols = [vocab.index[t] for t in tokens if t in vocab.index]
        if cols:
            np.add.at(V[i], cols, 1)
    return V


def gram_matrix(V: np.ndarray) -> np.ndarray:
    """``V @ V.T`` as float64, symmetrized exactly."""
    V = np.asarray(V, dtype=np.float64)
    if V.ndim != 2 or V.shape[0] == 0:
        raise ValueError("gram_matrix needs a non-empty 2-D matrix")
    A = V @ V.T
    return (A + A.T) / 2.0


@dataclass(frozen=True)
class WordSpace:
    eigenvalues: np.ndarray   # (n,), nonincreasing
    eigenvectors: np.ndarray  # (n, n), columns are eigenvectors
    sweeps: int = 0

    @property
    def n(self) -> int:
        return len(self.eigenvalues)


def _round_robin_pairs(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Disjoint (p, q) index pairs for each round of a round-robin tournament.

    Every unordered pair of ``range(n)`` appears in exactly one round, so one
    pass over the rounds is one full cyclic sweep.
    """
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        ps, qs = [], []
        for k in range(m // 2):
            a, b = players[k], players[m - 1 - k]
            if a < n and b < n:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def _off_norm(A: np.ndarray) -> float:
    off = A - np.diag(np.diag(A))
    return float(np.linalg.norm(off))


def _apply_sign_convention(W: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    W = W.copy()
    for k in range(W.shape[1]):
        col = W[:, k]
        nz = np.flatnonzero(np.abs(col) > eps)
        if nz.size and col[nz[0]] < 0:
            W[:, k] = -col
    return W


def eigen_decompose(A: np.ndarray, tol: float = 1e-10, max_sweeps: int = 100) -> WordSpace:
    """All eigenpairs of a symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once, in round-robin order so that
    the ``n/2`` rotations of a round touch disjoint rows and are applied
    together. Sweeping stops once the off-diagonal Frobenius norm falls below
    machine-precision scale; the result must then satisfy
    ``||A x_k - lambda_k x_k|| <= tol * (1 + ||A||_F)`` for every pair.

    Eigenvalues are returned nonincreasing and each eigenvector's first nonzero
    entry is made positive.
    """
    A = np.array(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise EigenError(f"expected a non-empty square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise EigenError("matrix has non-finite entries")
    n = A.shape[0]
    norm = float(np.linalg.norm(A))
    asym = float(np.max(np.abs(A - A.T)))
    if asym > tol * (1.0 + norm):
        raise EigenError(f"matrix is not symmetric (max |A - A^T| = {asym:.3e})")

    original = (A + A.T) / 2.0
    D = original.copy()
    W = np.eye(n)
    rounds = _round_robin_pairs(n)
    eps = np.finfo(float).eps
    floor = eps * 1e-2 * norm

    sweeps = 0
    rotated = True
    while rotated and _off_norm(D) > floor and sweeps < max_sweeps:
        sweeps += 1
        rotated = False
        for p, q in rounds:
            apq = D[p, q]
            # pairs already diagonal to working precision are skipped
            skip = np.maximum(floor, eps * np.sqrt(np.abs(D[p, p] * D[q, q])))
            active = np.abs(apq) > skip
            if not np.any(active):
                continue
            rotated = True
            p, q, apq = p[active], q[active], apq[active]
            tau = (D[q, q] - D[p, p]) / (2.0 * apq)
            t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            # rows: J^T D
            rp, rq = D[p, :].copy(), D[q, :]
            D[p, :] = c[:, None] * rp - s[:, None] * rq
            D[q, :] = s[:, None] * rp + c[:, None] * rq
            # columns: (J^T D) J
            cp, cq = D[:, p].copy(), D[:, q]
            D[:, p] = cp * c - cq * s
            D[:, q] = cp * s + cq * c
            D[p, q] = 0.0
            D[q, p] = 0.0
            wp, wq = W[:, p].copy(), W[:, q]
            W[:, p] = wp * c - wq * s
            W[:, q] = wp * s + wq * c

    lam = np.diag(D).copy()
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    W = _apply_sign_convention(W[:, order])

    residual = float(np.max(np.linalg.norm(original @ W - W * lam, axis=0)))
    if residual > tol * (1.0 + norm):
        raise EigenError(
            f"Jacobi did not converge in {sweeps} sweeps (max residual {residual:.3e})"
        )
    return WordSpace(lam, W, sweeps)


def word_space(corpus, vocab: Vocabulary | None = None, tol: float = 1e-10) -> WordSpace:
    """Document-term matrix -> Gram matrix -> eigen word space for one document batch."""
    if vocab is None:
        vocab = build_vocabulary(corpus)
    return eigen_decompose(gram_matrix(build_doc_term_matrix(corpus, vocab)), tol=tol)


def dump_matrix(M: np.ndarray, path: str | Path, row_ids: Sequence[str] | None = None) -> None:
    """Debug dump: one TSV row per matrix row, first column the row id."""
    M = np.atleast_2d(np.asarray(M))
    ids = row_ids if row_ids is not None else [str(i) for i in range(M.shape[0])]
    with open(path, "w", encoding="utf-8") as fh:
        for rid, row in zip(ids, M):
            fh.write(rid + "\t" + "\t".join(repr(float(x)) for x in row) + "\n")
