"""Entity-level metrics, approximate match and fold plans."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Entity = tuple[int, int, str]  # (start, end exclusive, type)


def extract_entities(tags: Sequence[str]) -> set[Entity]:
    """Spans of a BIO sequence. An ``I-X`` that does not continue an ``X`` span opens a new one."""
    spans: set[Entity] = set()
    start, label = None, None
    for i, tag in enumerate(list(tags) + ["O"]):
        prefix, _, lab = tag.partition("-")
        continues = prefix == "I" and label == lab
        if start is not None and not continues:
            spans.add((start, i, label))
            start, label = None, None
        if prefix in ("B", "I") and not continues:
            start, label = i, lab
    return spans


def precision_recall(pred: Iterable, gold: Iterable) -> tuple[float, float]:
    pred, gold = set(pred), set(gold)
    hit = len(pred & gold)
    p = hit / len(pred) if pred else 0.0
    r = hit / len(gold) if gold else 0.0
    return p, r


def f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if p + r > 0 else 0.0


@dataclass(frozen=True)
class EntityMatchReport:
    perfect: int
    partial: int
    retrieved: int
    gold: int

    def __post_init__(self):
        if min(self.perfect, self.partial, self.retrieved, self.gold) < 0:
            raise ValueError("counts must be non-negative")
        if self.perfect + self.partial > self.retrieved:
            raise ValueError("matches cannot exceed retrieved entities")

    def __add__(self, other: "EntityMatchReport") -> "EntityMatchReport":
        return EntityMatchReport(self.perfect + other.perfect, self.partial + other.partial,
                                 self.retrieved + other.retrieved, self.gold + other.gold)

    @property
    def precision(self) -> float:
        return self.perfect / self.retrieved if self.retrieved else 0.0

    @property
    def recall(self) -> float:
        return self.perfect / self.gold if self.gold else 0.0


def match_report(pred: Iterable[Entity], gold: Iterable[Entity]) -> EntityMatchReport:
    """Perfect = same (start, end, type); partial = same end and type with a different start."""
    pred, gold = set(pred), set(gold)
    perfect = pred & gold
    right_edges = {(e, t) for _, e, t in gold}
    partial = sum(1 for s, e, t in pred - perfect if (e, t) in right_edges)
    return EntityMatchReport(len(perfect), partial, len(pred), len(gold))


def approximate_match(report: EntityMatchReport) -> float:
    if report.retrieved == 0:
        return 0.0
    return (report.perfect + 0.5 * report.partial) / report.retrieved


def entity_accuracy(correct: int, total: int) -> float:
    """Percentage of correctly identified entities."""
    if total <= 0:
        raise ValueError("total must be positive")
    if not 0 <= correct <= total:
        raise ValueError("correct must lie in [0, total]")
    return 100.0 * correct / total


@dataclass(frozen=True)
class LevelScores:
    level: int
    precision: float
    recall: float
    f1: float
    approximate_match: float
    report: EntityMatchReport

    @property
    def accuracy(self) -> float:
        return entity_accuracy(self.report.perfect, self.report.gold) if self.report.gold else 0.0


def evaluate_level(gold: Sequence[Sequence[str]], pred: Sequence[Sequence[str]], level: int = 1) -> LevelScores:
    """Corpus-level scores; entities carry their sentence index so spans never collide."""
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold sentences but {len(pred)} predicted")
    g_all, p_all = set(), set()
    report = EntityMatchReport(0, 0, 0, 0)
    for n, (g, p) in enumerate(zip(gold, pred)):
        if len(g) != len(p):
            raise ValueError(f"sentence {n + 1}: {len(g)} gold tags but {len(p)} predicted")
        ge, pe = extract_entities(g), extract_entities(p)
        g_all |= {(n,) + e for e in ge}
        p_all |= {(n,) + e for e in pe}
        report = report + match_report(pe, ge)
    prec, rec = precision_recall(p_all, g_all)
    return LevelScores(level, prec, rec, f1(prec, rec), approximate_match(report), report)


def evaluate_sentences(gold, pred, levels: Sequence[int]) -> list[LevelScores]:
    """Score 0-based tag columns ``levels`` of two parallel sentence lists."""
    return [
        evaluate_level([s.level(k) for s in gold], [s.level(k) for s in pred], k + 1)
        for k in levels
    ]


REPORT_COLUMNS = ("level", "precision", "recall", "f1", "approx_match", "perfect", "partial",
                  "retrieved", "gold")


def _row(s: LevelScores) -> tuple:
    r = s.report
    return (s.level, s.precision, s.recall, s.f1, s.approximate_match, r.perfect, r.partial,
            r.retrieved, r.gold)


def format_report_tsv(scores: Sequence[LevelScores]) -> str:
    lines = ["\t".join(REPORT_COLUMNS)]
    for s in scores:
        lines.append("\t".join(f"{v:.6f}" if isinstance(v, float) else str(v) for v in _row(s)))
    return "\n".join(lines) + "\n"


def format_report_table(scores: Sequence[LevelScores]) -> str:
    head = f"{'level':>5}  {'P':>7}  {'R':>7}  {'F1':>7}  {'approx':>7}  {'retr':>5}  {'gold':>5}"
    lines = [head, "-" * len(head)]
    for s in scores:
        lines.append(f"{s.level:>5}  {100 * s.precision:7.2f}  {100 * s.recall:7.2f}  "
                     f"{100 * s.f1:7.2f}  {100 * s.approximate_match:7.2f}  "
                     f"{s.report.retrieved:>5}  {s.report.gold:>5}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class FoldPlan:
    folds: tuple[tuple[int, ...], ...]
    seed: int

    def __post_init__(self):
        flat = sorted(i for f in self.folds for i in f)
        if flat != list(range(len(flat))):
            raise ValueError("folds must be a disjoint cover of range(n)")

    @property
    def k(self) -> int:
        return len(self.folds)

    @property
    def n(self) -> int:
        return sum(len(f) for f in self.folds)

    def train_test(self, i: int) -> tuple[list[int], list[int]]:
        test = sorted(self.folds[i])
        held = set(test)
        return [j for j in range(self.n) if j not in held], test


def kfold_split(n: int, k: int, seed: int = 42) -> FoldPlan:
    """Shuffle ``range(n)`` with ``seed`` and deal it round-robin into ``k`` folds."""
    if k < 2:
        raise ValueError("k must be at least 2")
    if k > n:
        raise ValueError(f"cannot split {n} items into {k} folds")
    perm = np.random.default_rng(seed).permutation(n)
    return FoldPlan(tuple(tuple(int(i) for i in perm[j::k]) for j in range(k)), seed)


def format_folds(plan: FoldPlan) -> str:
    """One ``index<TAB>fold`` line per item, sorted by index."""
    fold_of = {i: j for j, f in enumerate(plan.folds) for i in f}
    return "index\tfold\n" + "".join(f"{i}\t{fold_of[i]}\n" for i in range(plan.n))


def mean_std(values: Sequence[float]) -> tuple[float, float]:
    v = np.asarray(values, dtype=float)
    return float(v.mean()), float(v.std()) if len(v) > 1 else 0.0


def classification_f1(gold: Sequence[str], pred: Sequence[str], labels: Sequence[str]) -> dict[str, float]:
    """Per-label F1 plus ``macro`` and ``accuracy`` for single-label predictions."""
    if len(gold) != len(pred):
        raise ValueError("gold and predicted lengths differ")
    out = {}
    for lab in labels:
        tp = sum(1 for g, p in zip(gold, pred) if g == p == lab)
        np_ = sum(1 for p in pred if p == lab)
        ng = sum(1 for g in gold if g == lab)
        out[lab] = f1(tp / np_ if np_ else 0.0, tp / ng if ng else 0.0)
    out["macro"] = float(np.mean([out[lab] for lab in labels])) if labels else 0.0
    out["accuracy"] = sum(g == p for g, p in zip(gold, pred)) / len(gold) if gold else 0.0
    return out


__all__ = [
    "Entity", "EntityMatchReport", "FoldPlan", "LevelScores", "approximate_match",
    "classification_f1", "entity_accuracy", "evaluate_level", "evaluate_sentences",
    "extract_entities", "f1", "format_folds", "format_report_table", "format_report_tsv",
    "kfold_split", "match_report", "mean_std", "precision_recall",
]
