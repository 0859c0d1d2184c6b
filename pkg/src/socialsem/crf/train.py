"""CRF training and nested (multi-level) tagging by chained models."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..corpus import TokenSentence, repair_bio
from .features import DEFAULT_HALF_WIDTH, sentence_features
from .model import CrfDataset, CrfModel, compile_dataset, nll_and_gradient, viterbi_decode
from .optimize import LbfgsResult, OptimizationError, lbfgs

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CrfParams:
    sigma: float = 1.0
    memory: int = 10
    gtol: float = 1e-4
    max_iter: int = 200
    min_count: int = 1
    half_width: int = DEFAULT_HALF_WIDTH

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.min_count < 1:
            raise ValueError("min_count must be >= 1")


class CrfTrainingError(RuntimeError):
    pass


def train_crf(dataset: CrfDataset, params: CrfParams | None = None,
              return_result: bool = False):
    """Fit weights by L-BFGS on the L2-regularized negative log-likelihood, from zero."""
    params = params or CrfParams()
    if not dataset.sequences:
        raise ValueError("cannot train on an empty dataset")

    def fg(theta):
        return nll_and_gradient(theta, dataset, params.sigma)

    try:
        result = lbfgs(fg, np.zeros(dataset.n_weights), memory=params.memory,
                       gtol=params.gtol, max_iter=params.max_iter)
    except OptimizationError as exc:
        raise CrfTrainingError(str(exc)) from exc
    log.info("CRF training: %s after %d iterations, objective %.4f",
             result.message, result.n_iter, result.fun)
    features = [None] * dataset.n_features
    for f, i in dataset.feature_index.items():
        features[i] = f
    model = CrfModel.from_weights(dataset.tags, features, result.x, params.sigma)
    return (model, result) if return_result else model


def sentences_dataset(sentences: Sequence[TokenSentence], level: int = 0,
                      params: CrfParams | None = None) -> CrfDataset:
    """Dataset for tag level ``level`` (0-based); levels above 0 see gold lower-level tags."""
    params = params or CrfParams()
    feats = [
        sentence_features(s, params.half_width, s.level(level - 1) if level > 0 else None)
        for s in sentences
    ]
    return compile_dataset(feats, [s.level(level) for s in sentences], params.min_count)


@dataclass(frozen=True)
class NestedModel:
    levels: tuple[CrfModel, ...]
    half_width: int = DEFAULT_HALF_WIDTH

    def __post_init__(self):
        if not 1 <= len(self.levels) <= 3:
            raise ValueError("a nested model has between 1 and 3 levels")

    @property
    def n_levels(self) -> int:
        return len(self.levels)


def train_nested(sentences: Sequence[TokenSentence], levels: int,
                 params: CrfParams | None = None) -> NestedModel:
    """One CRF per level; level k is trained with gold level k-1 tags as ``prevlevel=`` features."""
    params = params or CrfParams()
    if not sentences:
        raise ValueError("cannot train on an empty corpus")
    if not 1 <= levels <= 3:
        raise ValueError("levels must be 1, 2 or 3")
    available = min(len(t.tags) for s in sentences for t in s.tokens)
    if available < levels:
        raise ValueError(f"corpus has {available} tag columns, {levels} levels requested")

    base = [sentence_features(s, params.half_width) for s in sentences]
    models = []
    for k in range(levels):
        if k == 0:
            feats = base
        else:
            feats = [
                [f + [f"prevlevel={tag}"] for f, tag in zip(b, s.level(k - 1))]
                for b, s in zip(base, sentences)
            ]
        ds = compile_dataset(feats, [s.level(k) for s in sentences], params.min_count)
        log.info("level %d: %d features, %d tags", k + 1, ds.n_features, ds.n_tags)
        models.append(train_crf(ds, params))
    return NestedModel(tuple(models), params.half_width)


def tag_nested(model: NestedModel, sentence, repair: bool = True) -> list[list[str]]:
    """Viterbi level by level, feeding each level's (repaired) output to the next."""
    base = sentence_features(sentence, model.half_width)
    out: list[list[str]] = []
    for k, crf in enumerate(model.levels):
        feats = base if k == 0 else [f + [f"prevlevel={t}"] for f, t in zip(base, out[-1])]
        tags = viterbi_decode(crf, feats)
        out.append(repair_bio(tags) if repair else tags)
    return out


def tag_sentences(model: NestedModel, sentences: Sequence[TokenSentence],
                  append: bool = True) -> list[TokenSentence]:
    """Tag every sentence; predicted levels are appended after any existing tag columns."""
    tagged = []
    for s in sentences:
        levels = tag_nested(model, s)
        if append:
            existing = [s.level(k) for k in range(len(s.tokens[0].tags))] if len(s) else []
            levels = existing + levels
        tagged.append(s.with_tags(levels))
    return tagged


__all__ = [
    "CrfParams", "CrfTrainingError", "LbfgsResult", "NestedModel", "sentences_dataset",
    "tag_nested", "tag_sentences", "train_crf", "train_nested",
]
