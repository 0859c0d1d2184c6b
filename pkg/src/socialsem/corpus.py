"""Corpus ingestion: text cleaning, tokenization, profiling manifests and CoNLL-style token files.

Two on-disk formats live here.

Profiling manifest (TSV, UTF-8)::

    # label_set: 10s,20s,30s
    # language: en
    doc_id<TAB>path<TAB>gender<TAB>age_group
    u001<TAB>docs/u001.txt<TAB>Male<TAB>20s

``path`` is resolved relative to the manifest's directory. ``#`` lines before the
header carry ``key: value`` declarations; when ``label_set`` is absent it is
inferred from the entries in first-seen order.

Token corpus (TSV)::

    surface<TAB>pos<TAB>chunk<TAB>tag1[<TAB>tag2[<TAB>tag3]]

with one blank line between sentences. Lines starting with ``#`` that contain no
tab are comments; they are kept with the sentence that follows them so a
canonical file survives ``load -> write`` unchanged.
"""

from __future__ import annotations

import re
import string
import unicodedata
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

GENDERS = ("Male", "Female")

EMOTICONS = frozenset(
    {
        ":)", ":-)", ":(", ":-(", ":D", ":-D", ";)", ";-)", ":P", ":-P", ":p",
        ":-p", ":/", ":-/", ":|", ":-|", ":O", ":o", ":'(", ":*", ":3", "<3",
        "</3", "xD", "XD", "^_^", "^^", "-_-", "o_O", "O_o", "=)", "=(", "8)",
        ":]", ":[", ";D", "B)",
    }
)

_URL_RE = re.compile(r"(?:https?|ftp)://\S*", re.IGNORECASE)
_MENTION_RE = re.compile(r"(?<![\w@])@\w+")
_HTML_RE = re.compile(r"<[^<>]*>")
_WS_RE = re.compile(r"\s+")

# leading '#'/'@' mark hashtags and mentions and stay attached to the word
_KEEP_LEADING = frozenset("#@")


class CorpusError(ValueError):
    """Raised for malformed corpus files or manifests."""


def _is_punct(ch: str) -> bool:
    return ch in string.punctuation or unicodedata.category(ch).startswith("P")


def clean_text(raw: str) -> str:
    """Strip URLs, @-mentions, HTML tags and control characters; collapse whitespace."""
    text = _URL_RE.sub(" ", raw)
    text = _HTML_RE.sub(" ", text)
    text = _MENTION_RE.sub(" ", text)
    text = "".join(
        " " if ch.isspace() else ch
        for ch in text
        if ch.isspace() or unicodedata.category(ch) != "Cc"
    )
    return _WS_RE.sub(" ", text).strip()


def _split_chunk(chunk: str) -> list[str]:
    if chunk in EMOTICONS:
        return [chunk]
    lead: list[str] = []
    trail: list[str] = []
    start, end = 0, len(chunk)
    while start < end and _is_punct(chunk[start]) and chunk[start] not in _KEEP_LEADING:
        lead.append(chunk[start])
        start += 1
    while end > start and _is_punct(chunk[end - 1]):
        trail.append(chunk[end - 1])
        end -= 1
    core = [chunk[start:end]] if end > start else []
    return lead + core + trail[::-1]


def tokenize(text: str) -> list[str]:
    """Whitespace split, then peel leading/trailing punctuation into separate tokens.

    Chunks found in :data:`EMOTICONS` are kept whole.

    >>> tokenize("(hi!) :)")
    ['(', 'hi', '!', ')', ':)']
    """
    tokens: list[str] = []
    for chunk in text.split():
        tokens.extend(_split_chunk(chunk))
    return tokens


# ---------------------------------------------------------------------------
# profiling corpora


@dataclass(frozen=True)
class ProfilingDocument:
    doc_id: str
    raw_text: str
    tokens: tuple[str, ...]
    gender: str
    age_group: str


@dataclass(frozen=True)
class ProfilingCorpus:
    documents: tuple[ProfilingDocument, ...]
    age_labels: tuple[str, ...]
    language: str = "und"

    def __post_init__(self):
        seen = set()
        for doc in self.documents:
            if doc.doc_id in seen:
                raise CorpusError(f"duplicate doc_id {doc.doc_id!r}")
            seen.add(doc.doc_id)
            if doc.gender not in GENDERS:
                raise CorpusError(f"{doc.doc_id}: unknown gender {doc.gender!r}")
            if doc.age_group not in self.age_labels:
                raise CorpusError(
                    f"{doc.doc_id}: age group {doc.age_group!r} not in label set "
                    f"{list(self.age_labels)}"
                )

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    @property
    def doc_ids(self) -> list[str]:
        return [d.doc_id for d in self.documents]

    @property
    def genders(self) -> list[str]:
        return [d.gender for d in self.documents]

    @property
    def age_groups(self) -> list[str]:
        return [d.age_group for d in self.documents]

    def gender_counts(self) -> dict[str, int]:
        counts = Counter(self.genders)
        return {g: counts[g] for g in GENDERS}

    def age_counts(self) -> dict[str, int]:
        counts = Counter(self.age_groups)
        return {a: counts[a] for a in self.age_labels}

    def subset(self, indices: Iterable[int]) -> "ProfilingCorpus":
        """Documents at ``indices``, in the given order."""
        docs = tuple(self.documents[i] for i in indices)
        return ProfilingCorpus(docs, self.age_labels, self.language)


def make_document(doc_id: str, raw_text: str, gender: str, age_group: str) -> ProfilingDocument:
    """Clean and tokenize ``raw_text``; reject documents left empty."""
    tokens = tuple(tokenize(clean_text(raw_text)))
    if not tokens:
        raise CorpusError(f"{doc_id}: document is empty after cleaning")
    return ProfilingDocument(doc_id, raw_text, tokens, gender, age_group)


@dataclass
class ManifestEntry:
    doc_id: str
    path: Path
    gender: str
    age_group: str
    line: int


@dataclass
class CorpusManifest:
    entries: list[ManifestEntry]
    age_labels: tuple[str, ...]
    language: str = "und"
    declarations: dict[str, str] = field(default_factory=dict)


def read_manifest(manifest_path: str | Path) -> CorpusManifest:
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise CorpusError(f"manifest not found: {manifest_path}")
    base = manifest_path.parent
    decls: dict[str, str] = {}
    entries: list[ManifestEntry] = []
    header_seen = False
    ids: set[str] = set()
    with open(manifest_path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            if line.startswith("#"):
                key, sep, value = line[1:].partition(":")
                if sep:
                    decls[key.strip()] = value.strip()
                continue
            cols = line.split("\t")
            if not header_seen:
                if [c.strip() for c in cols] != ["doc_id", "path", "gender", "age_group"]:
                    raise CorpusError(
                        f"{manifest_path}:{lineno}: expected header 'doc_id path gender age_group'"
                    )
                header_seen = True
                continue
            if len(cols) != 4:
                raise CorpusError(f"{manifest_path}:{lineno}: expected 4 columns, got {len(cols)}")
            doc_id, rel, gender, age = (c.strip() for c in cols)
            if doc_id in ids:
                raise CorpusError(f"{manifest_path}:{lineno}: duplicate doc_id {doc_id!r}")
            ids.add(doc_id)
            entries.append(ManifestEntry(doc_id, base / rel, gender, age, lineno))
    if not header_seen:
        raise CorpusError(f"{manifest_path}: missing header line")

    if "label_set" in decls:
        labels = tuple(x.strip() for x in decls["label_set"].split(",") if x.strip())
    else:
        labels = tuple(dict.fromkeys(e.age_group for e in entries))
    for e in entries:
        if e.gender not in GENDERS:
            raise CorpusError(
                f"{manifest_path}:{e.line}: {e.doc_id}: unknown gender {e.gender!r}"
            )
        if e.age_group not in labels:
            raise CorpusError(
                f"{manifest_path}:{e.line}: {e.doc_id}: unknown age group {e.age_group!r} "
                f"(label set {list(labels)})"
            )
    return CorpusManifest(entries, labels, decls.get("language", "und"), decls)


def _load_entry(entry: ManifestEntry) -> ProfilingDocument:
    if not entry.path.is_file():
        raise CorpusError(f"{entry.doc_id}: file not found: {entry.path}")
    raw = entry.path.read_text(encoding="utf-8")
    return make_document(entry.doc_id, raw, entry.gender, entry.age_group)


def load_profiling_corpus(manifest_path: str | Path, threads: int = 1) -> ProfilingCorpus:
    """Load, clean and tokenize every document listed in a manifest."""
    manifest = read_manifest(manifest_path)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            docs = list(pool.map(_load_entry, manifest.entries))
    else:
        docs = [_load_entry(e) for e in manifest.entries]
    return ProfilingCorpus(tuple(docs), manifest.age_labels, manifest.language)


def write_profiling_corpus(corpus: ProfilingCorpus, directory: str | Path) -> Path:
    """Write ``corpus`` as manifest + one text file per document; returns the manifest path."""
    directory = Path(directory)
    (directory / "docs").mkdir(parents=True, exist_ok=True)
    lines = [
        f"# label_set: {','.join(corpus.age_labels)}",
        f"# language: {corpus.language}",
        "doc_id\tpath\tgender\tage_group",
    ]
    for doc in corpus.documents:
        rel = f"docs/{doc.doc_id}.txt"
        (directory / rel).write_text(doc.raw_text, encoding="utf-8")
        lines.append(f"{doc.doc_id}\t{rel}\t{doc.gender}\t{doc.age_group}")
    manifest = directory / "manifest.tsv"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


# ---------------------------------------------------------------------------
# CoNLL-style token corpora


@dataclass(frozen=True)
class Token:
    surface: str
    pos: str
    chunk: str
    tags: tuple[str, ...] = ()


@dataclass(frozen=True)
class TokenSentence:
    tokens: tuple[Token, ...]
    comments: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    def level(self, k: int) -> list[str]:
        """Tag sequence at 0-based level ``k``."""
        return [t.tags[k] for t in self.tokens]

    def with_tags(self, levels: Sequence[Sequence[str]]) -> "TokenSentence":
        """Copy with tag columns replaced by ``levels`` (one sequence per level)."""
        toks = tuple(
            Token(t.surface, t.pos, t.chunk, tuple(lv[i] for lv in levels))
            for i, t in enumerate(self.tokens)
        )
        return TokenSentence(toks, self.comments)

    def sentence_id(self, default: str) -> str:
        for c in self.comments:
            body = c.lstrip("#").strip()
            for key in ("tweet_id", "id", "sent_id"):
                for sep in ("=", ":"):
                    prefix = key + sep
                    compact = body.replace(" ", "")
                    if compact.startswith(prefix):
                        return compact[len(prefix):]
        return default


def bio_error(tags: Sequence[str]) -> int | None:
    """Index of the first invalid BIO tag in ``tags``, or None when the sequence is valid."""
    prev = "O"
    for i, tag in enumerate(tags):
        if tag == "O":
            prev = tag
            continue
        prefix, sep, label = tag.partition("-")
        if not sep or not label or prefix not in ("B", "I"):
            return i
        if prefix == "I" and (prev == "O" or prev.partition("-")[2] != label):
            return i
        prev = tag
    return None


def repair_bio(tags: Sequence[str]) -> list[str]:
    """Turn orphan ``I-X`` tags (not continuing an ``X`` entity) into ``B-X``."""
    out: list[str] = []
    prev = "O"
    for tag in tags:
        if tag.startswith("I-"):
            label = tag[2:]
            if prev == "O" or prev[2:] != label:
                tag = "B-" + label
        out.append(tag)
        prev = tag
    return out


def _is_comment(line: str) -> bool:
    return line.startswith("#") and "\t" not in line


def parse_conll(lines: Iterable[str], levels: int | None = None, source: str = "<input>") -> list[TokenSentence]:
    """Parse CoNLL-style rows; ``levels=None`` infers the tag-column count from the first row."""
    sentences: list[TokenSentence] = []
    rows: list[Token] = []
    row_lines: list[int] = []
    comments: list[str] = []

    def flush():
        nonlocal rows, row_lines, comments
        if rows:
            for k in range(levels or 0):
                bad = bio_error([t.tags[k] for t in rows])
                if bad is not None:
                    raise CorpusError(
                        f"{source}:{row_lines[bad]}: invalid BIO tag {rows[bad].tags[k]!r} "
                        f"at level {k + 1}"
                    )
            sentences.append(TokenSentence(tuple(rows), tuple(comments)))
            rows, row_lines, comments = [], [], []

    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\n").rstrip("\r")
        if not line.strip():
            flush()
            continue
        if _is_comment(line):
            if rows:
                flush()
            comments.append(line)
            continue
        cols = line.split("\t")
        if levels is None:
            levels = len(cols) - 3
            if levels < 0:
                raise CorpusError(f"{source}:{lineno}: expected at least 3 columns, got {len(cols)}")
        if len(cols) != 3 + levels:
            raise CorpusError(
                f"{source}:{lineno}: expected {3 + levels} columns, got {len(cols)}"
            )
        rows.append(Token(cols[0], cols[1], cols[2], tuple(cols[3:])))
        row_lines.append(lineno)
    flush()
    return sentences


def load_conll_corpus(path: str | Path, levels: int | None = None) -> list[TokenSentence]:
    """Load a token corpus with ``levels`` tag columns (validated as BIO)."""
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        return parse_conll(fh, levels, source=str(path))


def format_conll(sentences: Iterable[TokenSentence]) -> str:
    blocks = []
    for sent in sentences:
        lines = list(sent.comments)
        lines += ["\t".join((t.surface, t.pos, t.chunk) + t.tags) for t in sent.tokens]
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def write_conll(sentences: Iterable[TokenSentence], path: str | Path) -> None:
    Path(path).write_text(format_conll(sentences), encoding="utf-8")
