"""Training and prediction for hierarchical gender -> age profiling, plus batched training.

Feature extraction per batch: term-frequency matrix over the batch's own
vocabulary, document Gram matrix, eigenvectors, then nine statistics of each
document's row of the eigenvector matrix. The gender forest sees the (optionally
KS-filtered) statistics; the age forest sees the same columns plus a gender
column (Male 0.0, Female 1.0): gold gender when training, predicted gender when
predicting.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from ..corpus import GENDERS, ProfilingCorpus
from ..wordspace import build_vocabulary, word_space
from .features import FEATURE_NAMES, N_FEATURES, FeatureMatrix, statistical_features
from .forest import Forest, ForestParams, train_forest
from .selection import eliminate_features

log = logging.getLogger(__name__)

GENDER_CODE = {"Male": 0.0, "Female": 1.0}


@dataclass(frozen=True)
class ProfilerParams:
    n_trees: int = 100
    max_depth: int = 16
    min_leaf: int = 2
    drop_fraction: float = 0.05
    do_elimination: bool = True
    eig_tol: float = 1e-10

    def forest(self) -> ForestParams:
        return ForestParams(self.n_trees, self.max_depth, self.min_leaf)


@dataclass(frozen=True)
class ProfilerModel:
    gender_forest: Forest
    age_forest: Forest
    mask: np.ndarray            # kept columns among the nine statistics
    age_labels: tuple[str, ...]
    params: ProfilerParams
    seed: int
    n_documents: int
    vocabulary_size: int
    n_batches: int = 1

    def __post_init__(self):
        if self.age_forest.n_features != self.gender_forest.n_features + 1:
            raise ValueError("age forest must take exactly one more input than the gender forest")
        if int(np.sum(self.mask)) != self.gender_forest.n_features:
            raise ValueError("mask does not match the gender forest input arity")

    @property
    def batch_size(self) -> float:
        return self.n_documents / self.n_batches

    @property
    def feature_names(self) -> tuple[str, ...]:
        return tuple(n for n, keep in zip(FEATURE_NAMES, self.mask) if keep)


@dataclass(frozen=True)
class BatchPlan:
    batches: tuple[tuple[int, ...], ...]  # corpus indices, ascending within a batch

    def __len__(self) -> int:
        return len(self.batches)

    def __iter__(self):
        return iter(self.batches)

    def doc_ids(self, corpus: ProfilingCorpus) -> list[list[str]]:
        return [[corpus.documents[i].doc_id for i in b] for b in self.batches]

    @property
    def order(self) -> np.ndarray:
        """Corpus index of each row of the concatenated feature matrix."""
        return np.array([i for b in self.batches for i in b], dtype=np.intp)


def stage_seed(seed: int, stage: int) -> int:
    return int(np.random.SeedSequence([seed, 1000 + stage]).generate_state(1)[0])


def make_batches(corpus: ProfilingCorpus, n_batches: int, seed: int = 42) -> BatchPlan:
    """Stratified partition into ``n_batches`` subsets.

    Documents are grouped by (gender, age) cell, each cell is shuffled, and
    cells are dealt round-robin with the dealing position carried over from one
    cell to the next, so batch sizes differ by at most one and each cell's
    per-batch counts differ by at most one.
    """
    n = len(corpus)
    if n_batches < 1:
        raise ValueError("number of batches must be >= 1")
    if n_batches > n:
        raise ValueError(f"cannot split {n} documents into {n_batches} batches")
    rng = np.random.default_rng(seed)
    cells: dict[tuple[int, int], list[int]] = {}
    for i, doc in enumerate(corpus.documents):
        key = (GENDERS.index(doc.gender), corpus.age_labels.index(doc.age_group))
        cells.setdefault(key, []).append(i)
    batches: list[list[int]] = [[] for _ in range(n_batches)]
    slot = 0
    for key in sorted(cells):
        for i in rng.permutation(cells[key]):
            batches[slot].append(int(i))
            slot = (slot + 1) % n_batches
    return BatchPlan(tuple(tuple(sorted(b)) for b in batches))


def batch_features(corpus: ProfilingCorpus, indices: Sequence[int] | None = None,
                   eig_tol: float = 1e-10) -> np.ndarray:
    """Nine statistics per document for one batch (``n_batch x 9``)."""
    docs = corpus.documents if indices is None else [corpus.documents[i] for i in indices]
    tokens = [d.tokens for d in docs]
    ws = word_space(tokens, build_vocabulary(tokens), tol=eig_tol)
    return statistical_features(ws, len(tokens)).values


def ltlm_features(corpus: ProfilingCorpus, plan: BatchPlan, eig_tol: float = 1e-10,
                  threads: int = 1) -> np.ndarray:
    """Per-batch features stacked in batch-plan order (``n x 9``).

    Each block depends only on its own batch, so the result is the same for
    any worker count.
    """
    def one(batch):
        return batch_features(corpus, batch, eig_tol)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(one, plan.batches))
    else:
        blocks = [one(b) for b in plan.batches]
    return np.vstack(blocks)


def _check_trainable(corpus: ProfilingCorpus) -> None:
    genders = set(corpus.genders)
    if len(genders) < 2:
        raise ValueError(f"training needs both genders, found only {sorted(genders)}")
    if len(set(corpus.age_groups)) < 2:
        raise ValueError("training needs at least two age groups")


def _fit(F: np.ndarray, genders: list[str], ages: list[str], corpus: ProfilingCorpus,
         params: ProfilerParams, seed: int, n_batches: int = 1) -> ProfilerModel:
    feats = FeatureMatrix(F)
    if params.do_elimination:
        feats, mask = eliminate_features(feats, genders, params.drop_fraction)
    else:
        mask = np.ones(N_FEATURES, dtype=bool)
    log.info("training forests on %d rows, %d features", F.shape[0], int(mask.sum()))
    gender_forest = train_forest(feats.values, genders, params=params.forest(),
                                 seed=stage_seed(seed, 0), label_order=GENDERS)
    padded = np.column_stack([feats.values, [GENDER_CODE[g] for g in genders]])
    age_forest = train_forest(padded, ages, params=params.forest(),
                              seed=stage_seed(seed, 1), label_order=corpus.age_labels)
    return ProfilerModel(
        gender_forest, age_forest, mask, corpus.age_labels, params, seed,
        len(corpus), len(build_vocabulary(corpus)), n_batches,
    )


def train_profiler(corpus: ProfilingCorpus, params: ProfilerParams | None = None,
                   seed: int = 42) -> ProfilerModel:
    """Whole corpus as one batch: features, elimination, gender forest, age forest."""
    params = params or ProfilerParams()
    _check_trainable(corpus)
    F = batch_features(corpus, eig_tol=params.eig_tol)
    return _fit(F, corpus.genders, corpus.age_groups, corpus, params, seed)


def ltlm_train(corpus: ProfilingCorpus, n_batches: int, params: ProfilerParams | None = None,
               seed: int = 42, threads: int = 1) -> ProfilerModel:
    """Batched training: per-batch features, concatenated, then one global model."""
    params = params or ProfilerParams()
    _check_trainable(corpus)
    plan = make_batches(corpus, n_batches, seed)
    F = ltlm_features(corpus, plan, params.eig_tol, threads)
    order = plan.order
    genders = [corpus.documents[i].gender for i in order]
    ages = [corpus.documents[i].age_group for i in order]
    return _fit(F, genders, ages, corpus, params, seed, n_batches)


def predict_features(model: ProfilerModel, F: np.ndarray) -> list[tuple[str, str]]:
    """Hierarchical prediction from raw ``n x 9`` statistics."""
    F = np.atleast_2d(F)
    if F.shape[1] != len(model.mask):
        raise ValueError(f"expected {len(model.mask)} statistics per document, got {F.shape[1]}")
    X = F[:, model.mask]
    genders = model.gender_forest.predict(X)
    padded = np.column_stack([X, [GENDER_CODE[g] for g in genders]])
    ages = model.age_forest.predict(padded)
    return list(zip(genders, ages))


def prediction_batches(n_docs: int, n_batches: int) -> list[list[int]]:
    """Label-free split for prediction: document ``i`` goes to batch ``i % n_batches``."""
    return [list(range(j, n_docs, n_batches)) for j in range(n_batches)]


def predict_profiles(model: ProfilerModel, corpus: ProfilingCorpus,
                     n_batches: int | None = None, threads: int = 1) -> list[tuple[str, str]]:
    """(gender, age_group) per document, in corpus order.

    Features are extracted per batch like in training. By default the corpus
    is cut into as many batches as keeps their size closest to the model's
    training batch size, so statistics are computed in spaces of comparable
    dimension.
    """
    n = len(corpus)
    if n == 0:
        raise ValueError("nothing to predict: empty corpus")
    if n_batches is None:
        n_batches = max(1, round(n / model.batch_size))
    n_batches = min(n_batches, n)
    plan = BatchPlan(tuple(tuple(b) for b in prediction_batches(n, n_batches)))
    F = np.empty((n, len(model.mask)))
    F[plan.order] = ltlm_features(corpus, plan, model.params.eig_tol, threads)
    return predict_features(model, F)


def params_dict(params: ProfilerParams) -> dict:
    return asdict(params)
