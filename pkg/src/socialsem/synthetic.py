"""Synthetic corpora for tests, demos and the acceptance suite.

Nothing here is real data; the generators only produce text whose labels are
recoverable by construction.
"""

from __future__ import annotations

import numpy as np

from .corpus import GENDERS, ProfilingCorpus, Token, TokenSentence, make_document

AGE_LABELS = ("10s", "20s", "30s")


def profiling_corpus(
    n_docs: int = 200,
    seed: int = 0,
    age_labels: tuple[str, ...] = AGE_LABELS,
    male_vocab: int = 25,
    female_vocab: int = 50000,
    doc_len: tuple[int, int] = (40, 80),
) -> ProfilingCorpus:
    """Gender-disjoint vocabularies with different spreads.

    Male documents draw from a small shared word list, female documents from a
    large one, so male documents overlap heavily and female documents barely
    overlap. Genders alternate and age groups cycle, keeping all cells balanced.
    """
    rng = np.random.default_rng(seed)
    vocab = {
        "Male": [f"m{i}" for i in range(male_vocab)],
        "Female": [f"f{i}" for i in range(female_vocab)],
    }
    docs = []
    for i in range(n_docs):
        gender = GENDERS[i % 2]
        age = age_labels[(i // 2) % len(age_labels)]
        length = int(rng.integers(doc_len[0], doc_len[1] + 1))
        words = rng.choice(vocab[gender], size=length)
        docs.append(make_document(f"d{i:04d}", " ".join(words), gender, age))
    return ProfilingCorpus(tuple(docs), age_labels, "xx")


# capitalisation toy language: capitalised tokens are always B-PER, the rest O
_NAMES = ("Ravi", "Anna", "Kumar", "Maya", "John", "Priya", "Leo", "Sara", "Arun", "Nila",
          "Omar", "Gita", "Ivan", "Rosa", "Tara", "Vik")
_WORDS = ("went", "to", "the", "market", "and", "saw", "a", "dog", "with", "her", "friend",
          "today", "at", "noon", "likes", "tea", "coffee", "runs", "fast", "near", "river",
          "city", "house", "book", "reads", "every", "morning", "quietly")


def capitalization_sentences(n: int, seed: int = 0, length: tuple[int, int] = (4, 10)) -> list[TokenSentence]:
    """Sentences where a token is ``B-PER`` exactly when it is capitalised."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        size = int(rng.integers(length[0], length[1] + 1))
        toks = []
        for _ in range(size):
            if rng.random() < 0.3:
                w = str(rng.choice(_NAMES))
                toks.append(Token(w, "NNP", "B-NP", ("B-PER",)))
            else:
                w = str(rng.choice(_WORDS))
                toks.append(Token(w, "NN", "O", ("O",)))
        out.append(TokenSentence(tuple(toks)))
    return out


NESTED_ROWS = (
    # nested tags of a four-token noun chunk, three levels
    ("Chicago", "NNP", "B-NP", ("B-Person", "B-Association", "B-Location")),
    ("Bears", "NNPS", "I-NP", ("I-Person", "I-Association", "B-Nonhuman")),
    ("Football", "NN", "I-NP", ("I-Person", "I-Association", "B-Sports")),
    ("Fan", "NN", "I-NP", ("I-Person", "O", "O")),
)


def nested_example() -> TokenSentence:
    return TokenSentence(tuple(Token(*row) for row in NESTED_ROWS))


def nested_corpus(n: int, seed: int = 0) -> list[TokenSentence]:
    """Three-level sentences built from a few fixed nested chunks plus filler."""
    rng = np.random.default_rng(seed)
    chunks = [
        list(NESTED_ROWS),
        [("Ravi", "NNP", "B-NP", ("B-Person", "O", "O"))],
        [("Government", "NNP", "B-NP", ("B-Organization", "B-Gov", "O")),
         ("of", "IN", "I-NP", ("I-Organization", "I-Gov", "O")),
         ("India", "NNP", "I-NP", ("I-Organization", "I-Gov", "B-Nation"))],
        [("Coimbatore", "NNP", "B-NP", ("B-Location", "B-City", "O"))],
    ]
    filler = [("he", "PRP", "B-NP"), ("is", "VBZ", "B-VP"), ("a", "DT", "B-NP"),
              ("in", "IN", "B-PP"), ("visited", "VBD", "B-VP"), ("today", "NN", "B-NP")]
    out = []
    for _ in range(n):
        rows = []
        for _ in range(int(rng.integers(1, 3))):
            for _ in range(int(rng.integers(1, 3))):
                s, p, c = filler[int(rng.integers(len(filler)))]
                rows.append((s, p, c, ("O", "O", "O")))
            rows.extend(chunks[int(rng.integers(len(chunks)))])
        out.append(TokenSentence(tuple(Token(*r) for r in rows)))
    return out
