"""Token feature catalog and the five-token context window.

Every token yields the 34 catalog features below as ``name=value`` strings
(affixes longer than the token are omitted) plus ``pos=<tag>``:

    lower root shape shape_short prefix1..4 suffix1..4 len is_len2 is_len4
    sent_start sent_end has_upper all_lower all_upper init_cap has_digit
    is_digits len2_digits len4_digits has_dot has_hyphen has_paren has_punct
    has_symbol alnum_mix is_emoticon is_mention is_hashtag
"""

from __future__ import annotations

import unicodedata
from functools import lru_cache
from typing import Sequence

from ..corpus import EMOTICONS, Token, TokenSentence

CATALOG = (
    "lower", "root", "shape", "shape_short",
    "prefix1", "prefix2", "prefix3", "prefix4",
    "suffix1", "suffix2", "suffix3", "suffix4",
    "len", "is_len2", "is_len4", "sent_start", "sent_end",
    "has_upper", "all_lower", "all_upper", "init_cap",
    "has_digit", "is_digits", "len2_digits", "len4_digits",
    "has_dot", "has_hyphen", "has_paren", "has_punct", "has_symbol",
    "alnum_mix", "is_emoticon", "is_mention", "is_hashtag",
)
assert len(CATALOG) == 34

DEFAULT_HALF_WIDTH = 2


def _shape_char(ch: str) -> str:
    if ch.isupper():
        return "X"
    if ch.islower():
        return "x"
    if ch.isdigit():
        return "d"
    return "o"


def word_shape(word: str) -> str:
    return "".join(_shape_char(c) for c in word)


def short_shape(word: str) -> str:
    out = []
    for c in word_shape(word):
        if not out or out[-1] != c:
            out.append(c)
    return "".join(out)


def _flag(value: bool) -> str:
    return "1" if value else "0"


@lru_cache(maxsize=65536)
def _lexical_features(word: str) -> tuple[tuple[str, ...], tuple[str, ...]]:
    lower = word.lower()
    root = lower[:-1] if len(lower) > 1 and lower.endswith("s") else lower
    cats = [unicodedata.category(c) for c in word]
    is_digits = word.isdigit()
    feats = [
        f"lower={lower}",
        f"root={root}",
        f"shape={word_shape(word)}",
        f"shape_short={short_shape(word)}",
    ]
    feats += [f"prefix{k}={word[:k]}" for k in range(1, 5) if len(word) >= k]
    feats += [f"suffix{k}={word[-k:]}" for k in range(1, 5) if len(word) >= k]
    feats += [
        f"len={len(word)}",
        f"is_len2={_flag(len(word) == 2)}",
        f"is_len4={_flag(len(word) == 4)}",
    ]
    tail = [
        f"has_upper={_flag(any(c.isupper() for c in word))}",
        f"all_lower={_flag(word.islower())}",
        f"all_upper={_flag(word.isupper())}",
        f"init_cap={_flag(word[:1].isupper())}",
        f"has_digit={_flag(any(c.isdigit() for c in word))}",
        f"is_digits={_flag(is_digits)}",
        f"len2_digits={_flag(is_digits and len(word) == 2)}",
        f"len4_digits={_flag(is_digits and len(word) == 4)}",
        f"has_dot={_flag('.' in word)}",
        f"has_hyphen={_flag('-' in word)}",
        f"has_paren={_flag(any(c in '()[]{}' for c in word))}",
        f"has_punct={_flag(any(c.startswith('P') for c in cats))}",
        f"has_symbol={_flag(any(c.startswith('S') for c in cats))}",
        f"alnum_mix={_flag(any(c.isalpha() for c in word) and any(c.isdigit() for c in word))}",
        f"is_emoticon={_flag(word in EMOTICONS)}",
        f"is_mention={_flag(len(word) > 1 and word.startswith('@'))}",
        f"is_hashtag={_flag(len(word) > 1 and word.startswith('#'))}",
    ]
    return tuple(feats), tuple(tail)


def _tokens(sentence) -> Sequence[Token]:
    return sentence.tokens if isinstance(sentence, TokenSentence) else sentence


def extract_token_features(sentence, i: int) -> list[str]:
    """Catalog features of token ``i`` plus its POS feature."""
    toks = _tokens(sentence)
    tok = toks[i]
    head, tail = _lexical_features(tok.surface)
    return [
        *head,
        f"sent_start={_flag(i == 0)}",
        f"sent_end={_flag(i == len(toks) - 1)}",
        *tail,
        f"pos={tok.pos}",
    ]


def window_features(sentence, i: int, half_width: int = DEFAULT_HALF_WIDTH,
                    _cache: list[list[str]] | None = None) -> list[str]:
    """Token features at offsets ``-half_width..+half_width``, each prefixed ``w[offset]:``."""
    toks = _tokens(sentence)
    out: list[str] = []
    for d in range(-half_width, half_width + 1):
        j = i + d
        if 0 <= j < len(toks):
            base = _cache[j] if _cache is not None else extract_token_features(toks, j)
            out.extend(f"w[{d}]:{f}" for f in base)
        else:
            out.append(f"w[{d}]:PAD")
    return out


def sentence_features(sentence, half_width: int = DEFAULT_HALF_WIDTH,
                      prev_level: Sequence[str] | None = None) -> list[list[str]]:
    """Windowed feature strings for every position; ``prev_level`` adds ``prevlevel=<tag>``."""
    toks = _tokens(sentence)
    cache = [extract_token_features(toks, j) for j in range(len(toks))]
    feats = [window_features(toks, i, half_width, cache) for i in range(len(toks))]
    if prev_level is not None:
        if len(prev_level) != len(toks):
            raise ValueError("lower-level tag sequence length differs from sentence length")
        for f, tag in zip(feats, prev_level):
            f.append(f"prevlevel={tag}")
    return feats
