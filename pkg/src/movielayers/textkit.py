"""Shared text machinery: normalization, stemming, stopwords, tf-idf, cosine.

All functions are pure and safe to call concurrently. Tokens are lowercase,
punctuation-stripped (intra-word apostrophes kept), and Porter-stemmed.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Collection, Iterable, Sequence

from .errors import ConfigurationError

# word = alphanumeric runs joined by intra-word apostrophes ("don't", "café")
_WORD_RE = re.compile(r"[^\W_]+(?:'[^\W_]+)*")
_VOWELS = frozenset("aeiou")


# ---------------------------------------------------------------------------
# Porter stemmer (original 1980 algorithm)
# ---------------------------------------------------------------------------
# Implemented here because no stemming package is available in the target
# environment; the stemmer is pluggable via the `stemmer=` argument of
# normalize().


def _is_consonant(word: str, i: int) -> bool:
    ch = word[i]
    if ch in _VOWELS:
        return False
    if ch == "y":
        return i == 0 or not _is_consonant(word, i - 1)
    return True


def _measure(stem: str) -> int:
    """Count VC sequences in the [C](VC)^m[V] form of the stem."""
    m = 0
    prev_vowel = False
    for i in range(len(stem)):
        if _is_consonant(stem, i):
            if prev_vowel:
                m += 1
            prev_vowel = False
        else:
            prev_vowel = True
    return m


def _has_vowel(stem: str) -> bool:
    return any(not _is_consonant(stem, i) for i in range(len(stem)))


def _ends_double_consonant(word: str) -> bool:
    return (
        len(word) >= 2
        and word[-1] == word[-2]
        and _is_consonant(word, len(word) - 1)
    )


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    if not (
        _is_consonant(word, len(word) - 3)
        and not _is_consonant(word, len(word) - 2)
        and _is_consonant(word, len(word) - 1)
    ):
        return False
    return word[-1] not in "wxy"


def _replace_suffix(word: str, rules: Sequence[tuple[str, str, Callable[[str], bool]]]) -> str:
    """Apply the longest-suffix rule of a step; only that rule's condition is tried."""
    best = None
    for suffix, repl, cond in rules:
        if word.endswith(suffix) and (best is None or len(suffix) > len(best[0])):
            best = (suffix, repl, cond)
    if best is None:
        return word
    suffix, repl, cond = best
    stem = word[: len(word) - len(suffix)]
    if cond(stem):
        return stem + repl
    return word


def porter_stem(word: str) -> str:
    """Stem a single lowercase word with the classic Porter algorithm."""
    w = word
    if len(w) <= 2:
        return w

    # Step 1a
    if w.endswith("sses"):
        w = w[:-2]
    elif w.endswith("ies"):
        w = w[:-2]
    elif w.endswith("ss"):
        pass
    elif w.endswith("s"):
        w = w[:-1]

    # Step 1b
    fired = False
    if w.endswith("eed"):
        if _measure(w[:-3]) > 0:
            w = w[:-1]
    elif w.endswith("ed"):
        if _has_vowel(w[:-2]):
            w = w[:-2]
            fired = True
    elif w.endswith("ing"):
        if _has_vowel(w[:-3]):
            w = w[:-3]
            fired = True
    if fired:
        if w.endswith(("at", "bl", "iz")):
            w += "e"
        elif _ends_double_consonant(w) and w[-1] not in "lsz":
            w = w[:-1]
        elif _measure(w) == 1 and _ends_cvc(w):
            w += "e"

    # Step 1c
    if w.endswith("y") and _has_vowel(w[:-1]):
        w = w[:-1] + "i"

    m_pos = lambda stem: _measure(stem) > 0
    m_gt1 = lambda stem: _measure(stem) > 1

    # Step 2
    w = _replace_suffix(
        w,
        [
            ("ational", "ate", m_pos),
            ("tional", "tion", m_pos),
            ("enci", "ence", m_pos),
            ("anci", "ance", m_pos),
            ("izer", "ize", m_pos),
            ("abli", "able", m_pos),
            ("alli", "al", m_pos),
            ("entli", "ent", m_pos),
            ("eli", "e", m_pos),
            ("ousli", "ous", m_pos),
            ("ization", "ize", m_pos),
            ("ation", "ate", m_pos),
            ("ator", "ate", m_pos),
            ("alism", "al", m_pos),
            ("iveness", "ive", m_pos),
            ("fulness", "ful", m_pos),
            ("ousness", "ous", m_pos),
            ("aliti", "al", m_pos),
            ("iviti", "ive", m_pos),
            ("biliti", "ble", m_pos),
        ],
    )

    # Step 3
    w = _replace_suffix(
        w,
        [
            ("icate", "ic", m_pos),
            ("ative", "", m_pos),
            ("alize", "al", m_pos),
            ("iciti", "ic", m_pos),
            ("ical", "ic", m_pos),
            ("ful", "", m_pos),
            ("ness", "", m_pos),
        ],
    )

    # Step 4
    ion_cond = lambda stem: _measure(stem) > 1 and stem.endswith(("s", "t"))
    w = _replace_suffix(
        w,
        [
            ("al", "", m_gt1),
            ("ance", "", m_gt1),
            ("ence", "", m_gt1),
            ("er", "", m_gt1),
            ("ic", "", m_gt1),
            ("able", "", m_gt1),
            ("ible", "", m_gt1),
            ("ant", "", m_gt1),
            ("ement", "", m_gt1),
            ("ment", "", m_gt1),
            ("ent", "", m_gt1),
            ("ion", "", ion_cond),
            ("ou", "", m_gt1),
            ("ism", "", m_gt1),
            ("ate", "", m_gt1),
            ("iti", "", m_gt1),
            ("ous", "", m_gt1),
            ("ive", "", m_gt1),
            ("ize", "", m_gt1),
        ],
    )

    # Step 5a
    if w.endswith("e"):
        stem = w[:-1]
        m = _measure(stem)
        if m > 1 or (m == 1 and not _ends_cvc(stem)):
            w = stem

    # Step 5b
    if _measure(w) > 1 and _ends_double_consonant(w) and w.endswith("l"):
        w = w[:-1]

    return w


def stem(word: str) -> str:
    """porter_stem iterated to a fixed point.

    A single Porter pass is not idempotent (e.g. "agree" -> "agre" -> "agr");
    iterating makes normalize() stable on its own output, which alignment
    relies on. Each pass shortens the word, so this terminates.
    """
    prev = word
    for _ in range(16):
        nxt = porter_stem(prev)
        if nxt == prev:
            return nxt
        prev = nxt
    return prev


# ---------------------------------------------------------------------------
# Tokenization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TokenStream:
    """Ordered lowercase stemmed tokens plus (start, end) offsets into the source."""

    tokens: tuple[str, ...]
    source_span: tuple[tuple[int, int], ...] = ()

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


def tokenize(text: str) -> list[tuple[str, int, int]]:
    """Split into lowercase word chunks with source offsets; no stemming."""
    out = []
    for m in _WORD_RE.finditer(text):
        # lowercasing can introduce combining marks (e.g. dotted capital I);
        # keep only alphanumerics and intra-word apostrophes so re-tokenizing
        # a token is a no-op
        lowered = m.group().lower()
        word = "".join(ch for ch in lowered if ch.isalnum() or ch == "'").strip("'")
        if word:
            out.append((word, m.start(), m.end()))
    return out


def normalize(text: str, stemmer: Callable[[str], str] = stem) -> TokenStream:
    """Lowercase, strip punctuation, whitespace-tokenize, and stem.

    Stopwords are retained; filtering is a separate step. Empty input yields
    an empty stream.
    """
    tokens = []
    spans = []
    for word, start, end in tokenize(text):
        tokens.append(stemmer(word))
        spans.append((start, end))
    return TokenStream(tuple(tokens), tuple(spans))


def remove_stopwords(ts: TokenStream, stoplist: Collection[str]) -> TokenStream:
    """Order-preserving stopword filter over an already-normalized stream."""
    if len(ts.source_span) == len(ts.tokens):
        kept = [(t, s) for t, s in zip(ts.tokens, ts.source_span) if t not in stoplist]
        return TokenStream(tuple(t for t, _ in kept), tuple(s for _, s in kept))
    return TokenStream(tuple(t for t in ts.tokens if t not in stoplist), ())


# ---------------------------------------------------------------------------
# Stopword list
# ---------------------------------------------------------------------------


class Stoplist:
    """A stopword set matching both raw terms and their stemmed forms.

    ``term in stoplist`` is true for raw list entries and for Porter stems of
    entries, so stemmed token streams filter correctly ("was" stems to "wa").
    The ``raw`` frozenset is for callers that work on unstemmed words.
    """

    def __init__(self, terms: Iterable[str]):
        self.raw = frozenset(t.lower() for t in terms if t.strip())
        self.stemmed = frozenset(stem(t) for t in self.raw)

    def __contains__(self, term: str) -> bool:
        return term in self.raw or term in self.stemmed

    def __len__(self) -> int:
        return len(self.raw)

    @classmethod
    def load(cls, path: str | Path) -> "Stoplist":
        """Load one term per line, UTF-8. Missing file raises ConfigurationError."""
        p = Path(path)
        if not p.is_file():
            raise ConfigurationError(f"stopword list not found: {p}")
        return cls(p.read_text(encoding="utf-8").splitlines())

    @classmethod
    def default(cls) -> "Stoplist":
        """The bundled English function-word list."""
        text = resources.files("movielayers.data").joinpath("stopwords.txt").read_text("utf-8")
        return cls(text.splitlines())


# ---------------------------------------------------------------------------
# TF-IDF and cosine
# ---------------------------------------------------------------------------

TermVector = dict[str, float]


def _tokens_of(doc) -> Sequence[str]:
    return doc.tokens if isinstance(doc, TokenStream) else doc


def tfidf_vectors(docs: Sequence[TokenStream | Sequence[str]]) -> list[TermVector]:
    """Classical tf-idf: tf = count / doc length, idf = ln(N / df).

    Terms with idf = 0 (present in every document) are dropped, so all stored
    weights are strictly positive.
    """
    if not docs:
        raise ValueError("tfidf_vectors requires a non-empty document list")
    token_lists = [list(_tokens_of(d)) for d in docs]
    n_docs = len(token_lists)
    df: Counter[str] = Counter()
    for toks in token_lists:
        df.update(set(toks))
    idf = {term: math.log(n_docs / count) for term, count in df.items()}
    vectors: list[TermVector] = []
    for toks in token_lists:
        vec: TermVector = {}
        if toks:
            counts = Counter(toks)
            length = len(toks)
            for term, c in counts.items():
                w = (c / length) * idf[term]
                if w > 0.0:
                    vec[term] = w
        vectors.append(vec)
    return vectors


def cosine(a: TermVector, b: TermVector) -> float:
    """Cosine similarity in [0, 1]; 0 when either vector is empty."""
    if not a or not b:
        return 0.0
    if len(b) < len(a):
        a, b = b, a
    dot = sum(w * b[t] for t, w in a.items() if t in b)
    if dot == 0.0:
        return 0.0
    na = math.sqrt(sum(w * w for w in a.values()))
    nb = math.sqrt(sum(w * w for w in b.values()))
    return min(1.0, dot / (na * nb))
