"""Dictionary entity linking by unigram dot-product similarity."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import TokenSentence, tokenize

NIL = "NIL"
TIE_RTOL = 1e-12
PROPER_NOUN_PREFIXES = ("NNP", "NP", "PROPN")


class KnowledgeBaseError(ValueError):
    pass


@dataclass(frozen=True)
class Candidate:
    link_id: str
    description: str
    vector: Mapping[str, int]


@dataclass(frozen=True)
class KnowledgeBase:
    entries: Mapping[str, tuple[Candidate, ...]]

    def __len__(self) -> int:
        return len(self.entries)

    def candidates(self, surface: str) -> tuple[Candidate, ...]:
        return self.entries.get(surface.casefold(), ())


@dataclass(frozen=True)
class LinkDecision:
    surface: str
    link_id: str
    score: float
    n_candidates: int

    @property
    def is_nil(self) -> bool:
        return self.link_id == NIL


def unigram_vector(text: str | Iterable[str]) -> Counter:
    """Case-folded token counts; a string goes through the corpus tokenizer."""
    tokens = tokenize(text) if isinstance(text, str) else list(text)
    return Counter(t.casefold() for t in tokens)


def dot_product(u: Mapping[str, float], v: Mapping[str, float]) -> float:
    if len(u) > len(v):
        u, v = v, u
    return sum(c * v[t] for t, c in u.items() if t in v)


def build_kb(rows: Iterable[tuple[str, str, str]]) -> KnowledgeBase:
    entries: dict[str, list[Candidate]] = {}
    for surface, link_id, desc in rows:
        entries.setdefault(surface.casefold(), []).append(
            Candidate(link_id, desc, unigram_vector(desc)))
    return KnowledgeBase({k: tuple(v) for k, v in entries.items()})


def load_kb(path: str | Path) -> KnowledgeBase:
    """Read ``surface<TAB>link_id<TAB>description`` rows; blank lines are skipped."""
    entries: dict[str, list[Candidate]] = {}
    seen: set[tuple[str, str]] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise KnowledgeBaseError(f"{path}:{lineno}: expected 3 tab-separated columns, got {len(cols)}")
            surface, link_id, desc = cols
            if not surface.strip():
                raise KnowledgeBaseError(f"{path}:{lineno}: empty surface form")
            if not link_id.strip():
                raise KnowledgeBaseError(f"{path}:{lineno}: empty link id")
            if link_id == NIL:
                raise KnowledgeBaseError(f"{path}:{lineno}: link id {NIL!r} is reserved")
            key = (surface.casefold(), link_id)
            if key in seen:
                raise KnowledgeBaseError(f"{path}:{lineno}: duplicate candidate {link_id!r} for {surface!r}")
            seen.add(key)
            entries.setdefault(key[0], []).append(Candidate(link_id, desc, unigram_vector(desc)))
    return KnowledgeBase({k: tuple(v) for k, v in entries.items()})


def link_entity(kb: KnowledgeBase, surface: str, context: Mapping[str, float] | Sequence[str],
                nil_on_zero: bool = False) -> LinkDecision:
    """Pick the candidate whose description best matches the context.

    ``context`` is either a list of proper-noun tokens or a precomputed count
    map. Ties go to the lexicographically smallest link id. When every score is
    zero the tie-break candidate is returned, or NIL with ``nil_on_zero``.
    Scores within a relative ``TIE_RTOL`` count as tied, so rescaling a count
    map by a non-integer factor cannot flip a tie through rounding.
    """
    if not surface:
        raise ValueError("entity surface must be non-empty")
    cands = kb.candidates(surface)
    if not cands:
        return LinkDecision(surface, NIL, 0.0, 0)
    ctx = context if isinstance(context, Mapping) else unigram_vector(list(context))
    best_id, best = None, None
    for c in sorted(cands, key=lambda c: c.link_id):
        s = dot_product(ctx, c.vector)
        if best is None or s > best + TIE_RTOL * max(abs(s), abs(best)):
            best_id, best = c.link_id, s
    if best == 0 and nil_on_zero:
        return LinkDecision(surface, NIL, 0.0, len(cands))
    return LinkDecision(surface, best_id, float(best), len(cands))


def proper_nouns(sentence: TokenSentence, prefixes: Sequence[str] = PROPER_NOUN_PREFIXES) -> list[str]:
    return [t.surface for t in sentence.tokens if t.pos.startswith(tuple(prefixes))]


def link_sentences(kb: KnowledgeBase, sentences: Sequence[TokenSentence], level: int = 0,
                   nil_on_zero: bool = False,
                   prefixes: Sequence[str] = PROPER_NOUN_PREFIXES) -> list[tuple[str, LinkDecision]]:
    """Link every entity found at tag ``level``; the context is the sentence's proper nouns."""
    from .evaluation import extract_entities

    out = []
    for n, s in enumerate(sentences):
        sid = s.sentence_id(str(n + 1))
        ctx = unigram_vector(proper_nouns(s, prefixes))
        for start, end, _ in sorted(extract_entities(s.level(level))):
            surface = " ".join(s.surfaces[start:end])
            out.append((sid, link_entity(kb, surface, ctx, nil_on_zero)))
    return out


def format_links(rows: Iterable[tuple[str, LinkDecision]]) -> str:
    lines = ["tweet_id\tentity_surface\tlink_or_NIL\tscore"]
    lines += [f"{sid}\t{d.surface}\t{d.link_id}\t{d.score:g}" for sid, d in rows]
    return "\n".join(lines) + "\n"
