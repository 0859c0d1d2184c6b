import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from socialsem.wordspace import (
    EigenError,
    Vocabulary,
    build_doc_term_matrix,
    build_vocabulary,
    dump_matrix,
    eigen_decompose,
    gram_matrix,
    word_space,
)


def _char_poly_3(A):
    # det(lam I - A) = lam^3 - c2 lam^2 + c1 lam - c0
    c2 = np.trace(A)
    c1 = (A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0] + A[0, 0] * A[2, 2] - A[0, 2] * A[2, 0]
          + A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1])
    c0 = (A[0, 0] * (A[1, 1] * A[2, 2] - A[1, 2] * A[2, 1])
          - A[0, 1] * (A[1, 0] * A[2, 2] - A[1, 2] * A[2, 0])
          + A[0, 2] * (A[1, 0] * A[2, 1] - A[1, 1] * A[2, 0]))
    return lambda x: x**3 - c2 * x**2 + c1 * x - c0


def _bisection_roots(A, grid=20001):
    """Roots of the characteristic polynomial inside the Gershgorin bound, by sign changes + bisection."""
    p = _char_poly_3(A)
    bound = np.max(np.sum(np.abs(A), axis=1)) + 1.0
    xs = np.linspace(-bound, bound, grid)
    vals = p(xs)
    roots = []
    for a, b, fa, fb in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        if fa == 0:
            roots.append(a)
        elif fa * fb < 0:
            for _ in range(200):
                m = 0.5 * (a + b)
                fm = p(m)
                if fa * fm <= 0:
                    b = m
                else:
                    a, fa = m, fm
            roots.append(0.5 * (a + b))
    return np.sort(roots)[::-1]


class TestDocTerm:
    def test_counts(self):
        vocab = Vocabulary({"a": 0, "b": 1})
        np.testing.assert_array_equal(build_doc_term_matrix([["a", "a", "b"]], vocab), [[2, 1]])

    def test_oov_row(self):
        vocab = Vocabulary({"a": 0})
        np.testing.assert_array_equal(build_doc_term_matrix([["z", "q"]], vocab), [[0]])

    def test_identity(self):
        docs = [["a"], ["b"]]
        np.testing.assert_array_equal(build_doc_term_matrix(docs, build_vocabulary(docs)), np.eye(2))

    def test_empty_corpus(self):
        with pytest.raises(ValueError):
            build_doc_term_matrix([], Vocabulary({}))

    def test_first_occurrence_order(self):
        assert build_vocabulary([["c", "a"], ["b", "c"]]).terms == ["c", "a", "b"]

    @given(st.lists(st.lists(st.sampled_from("abcdef"), max_size=12), min_size=1, max_size=8))
    def test_row_sums(self, docs):
        V = build_doc_term_matrix(docs, build_vocabulary(docs))
        assert V.min(initial=0) >= 0
        np.testing.assert_array_equal(V.sum(axis=1), [len(d) for d in docs])


class TestGram:
    def test_identity(self):
        np.testing.assert_array_equal(gram_matrix(np.eye(2)), np.eye(2))

    def test_hand_product(self):
        np.testing.assert_array_equal(gram_matrix(np.array([[2, 1], [0, 1]])), [[5, 1], [1, 1]])

    def test_symmetric_psd(self):
        V = np.random.default_rng(0).integers(0, 5, size=(7, 11))
        A = gram_matrix(V)
        np.testing.assert_array_equal(A, A.T)
        assert np.linalg.eigvalsh(A).min() > -1e-9


class TestEigen:
    def test_identity(self):
        ws = eigen_decompose(np.eye(2))
        np.testing.assert_allclose(ws.eigenvalues, [1, 1])
        np.testing.assert_allclose(ws.eigenvectors.T @ ws.eigenvectors, np.eye(2), atol=1e-12)

    def test_diagonal(self):
        ws = eigen_decompose(np.diag([4.0, 1.0]))
        np.testing.assert_allclose(ws.eigenvalues, [4, 1])
        np.testing.assert_array_equal(ws.eigenvectors, np.eye(2))

    def test_swapped_diagonal_sorted(self):
        ws = eigen_decompose(np.diag([1.0, 4.0]))
        np.testing.assert_allclose(ws.eigenvalues, [4, 1])
        np.testing.assert_array_equal(ws.eigenvectors, [[0, 1], [1, 0]])

    @pytest.mark.parametrize("seed", range(20))
    def test_random_3x3_against_bisection(self, seed):
        B = np.random.default_rng(seed).normal(size=(3, 3))
        A = (B + B.T) / 2
        ws = eigen_decompose(A)
        roots = _bisection_roots(A)
        assert len(roots) == 3
        np.testing.assert_allclose(ws.eigenvalues, roots, atol=1e-8)
        for k in range(3):
            x = ws.eigenvectors[:, k]
            assert np.linalg.norm(A @ x - roots[k] * x) < 1e-8

    @pytest.mark.parametrize("n", [1, 2, 5, 17, 40])
    def test_invariants(self, n):
        rng = np.random.default_rng(n)
        V = rng.integers(0, 4, size=(n, 2 * n + 3)).astype(float)
        A = gram_matrix(V)
        ws = eigen_decompose(A)
        lam, W = ws.eigenvalues, ws.eigenvectors
        norm = np.linalg.norm(A)
        assert np.all(np.diff(lam) <= 0)
        assert lam[-1] >= -1e-9 * (1 + norm)
        assert np.max(np.abs(W.T @ W - np.eye(n))) < 1e-8
        assert np.linalg.norm(A - W @ np.diag(lam) @ W.T) <= 1e-8 * (1 + norm)
        assert abs(np.trace(A) - lam.sum()) <= 1e-8 * (1 + abs(np.trace(A)))
        for k in range(n):
            col = W[:, k]
            assert col[np.flatnonzero(np.abs(col) > 1e-12)[0]] > 0

    def test_matches_lapack(self):
        B = np.random.default_rng(3).normal(size=(12, 12))
        A = B @ B.T
        np.testing.assert_allclose(eigen_decompose(A).eigenvalues, np.linalg.eigvalsh(A)[::-1],
                                   rtol=1e-10, atol=1e-10)

    def test_deterministic(self):
        B = np.random.default_rng(5).normal(size=(9, 9))
        A = B + B.T
        a, b = eigen_decompose(A), eigen_decompose(A.copy())
        np.testing.assert_array_equal(a.eigenvectors, b.eigenvectors)
        np.testing.assert_array_equal(a.eigenvalues, b.eigenvalues)

    def test_nonsymmetric_rejected(self):
        with pytest.raises(EigenError, match="symmetric"):
            eigen_decompose(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_non_convergence_reports_residual(self):
        B = np.random.default_rng(1).normal(size=(8, 8))
        with pytest.raises(EigenError, match="residual"):
            eigen_decompose(B + B.T, max_sweeps=1)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 12), st.integers(0, 2**32 - 1))
    def test_repeated_eigenvalues(self, n, seed):
        # low-rank Gram matrices have a repeated zero eigenvalue
        V = np.random.default_rng(seed).integers(0, 3, size=(n, 2)).astype(float)
        A = gram_matrix(V)
        ws = eigen_decompose(A)
        W = ws.eigenvectors
        assert np.max(np.abs(W.T @ W - np.eye(n))) < 1e-8
        assert np.linalg.norm(A - W @ np.diag(ws.eigenvalues) @ W.T) <= 1e-8 * (1 + np.linalg.norm(A))


def test_word_space_pipeline():
    docs = [["a", "b"], ["b", "c", "c"], ["a"]]
    ws = word_space(docs)
    A = gram_matrix(build_doc_term_matrix(docs, build_vocabulary(docs)))
    W = ws.eigenvectors
    np.testing.assert_allclose(W @ np.diag(ws.eigenvalues) @ W.T, A, atol=1e-10)


def test_dump_matrix(tmp_path):
    M = np.array([[1.5, 2.0], [0.1, -3.0]])
    path = tmp_path / "m.tsv"
    dump_matrix(M, path, ["x", "y"])
    rows = [line.split("\t") for line in path.read_text().splitlines()]
    assert [r[0] for r in rows] == ["x", "y"]
    np.testing.assert_array_equal([[float(v) for v in r[1:]] for r in rows], M)
