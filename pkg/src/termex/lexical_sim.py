"""Okapi BM25 lexical retrieval over the demonstration corpus."""

from __future__ import annotations

import json
import math
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

__all__ = [
    "Bm25Index",
    "EmptyCorpus",
    "DocOutOfRange",
    "tokenize",
    "build_index",
    "bm25_score",
    "term_weight",
]


class EmptyCorpus(ValueError):
    pass


class DocOutOfRange(IndexError):
    pass


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[str]:
    """Lowercase, split on whitespace, strip edge punctuation per token.

    Internal punctuation (hyphens, apostrophes) is kept; tokens that become
    empty are dropped.
    """
    tokens = []
    for raw in text.lower().split():
        start, end = 0, len(raw)
        while start < end and _is_punct(raw[start]):
            start += 1
        while end > start and _is_punct(raw[end - 1]):
            end -= 1
        if end > start:
            tokens.append(raw[start:end])
    return tokens


@dataclass(frozen=True)
class Bm25Index:
    doc_term_freqs: tuple[dict[str, int], ...]
    doc_lengths: tuple[int, ...]
    avg_doc_length: float
    doc_freq: dict[str, int]
    k1: float
    b: float

    @property
    def n_docs(self) -> int:
        return len(self.doc_lengths)

    def to_json(self) -> str:
        """Deterministic serialization; same corpus yields identical bytes."""
        payload = {
            "doc_term_freqs": [dict(sorted(tf.items())) for tf in self.doc_term_freqs],
            "doc_lengths": list(self.doc_lengths),
            "avg_doc_length": self.avg_doc_length,
            "doc_freq": dict(sorted(self.doc_freq.items())),
            "k1": self.k1,
            "b": self.b,
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def build_index(
    corpus: Sequence[Sequence[str]], k1: float = 1.5, b: float = 0.75
) -> Bm25Index:
    """Index a corpus of token lists.  Raises EmptyCorpus on empty input."""
    if not corpus:
        raise EmptyCorpus("cannot index an empty corpus")
    if k1 < 0:
        raise ValueError(f"k1 must be >= 0, got {k1}")
    if not (0.0 <= b <= 1.0):
        raise ValueError(f"b must be in [0, 1], got {b}")
    term_freqs = tuple(dict(Counter(doc)) for doc in corpus)
    lengths = tuple(len(doc) for doc in corpus)
    doc_freq: Counter = Counter()
    for tf in term_freqs:
        doc_freq.update(tf.keys())
    return Bm25Index(
        doc_term_freqs=term_freqs,
        doc_lengths=lengths,
        avg_doc_length=sum(lengths) / len(lengths),
        doc_freq=dict(doc_freq),
        k1=k1,
        b=b,
    )


def term_weight(
    tf: int, df: int, n_docs: int, doc_len: int, avgdl: float, k1: float, b: float
) -> float:
    """One query term's contribution, with the non-negative smoothed idf."""
    if tf == 0:
        return 0.0
    idf = math.log(1.0 + (n_docs - df + 0.5) / (df + 0.5))
    return idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * doc_len / avgdl))


def bm25_score(
    index: Bm25Index,
    query: Sequence[str],
    doc: int,
    *,
    dedupe_query: bool = True,
) -> float:
    """Score one document against a tokenized query.

    By default each distinct query term contributes once; pass
    ``dedupe_query=False`` to weight repeated query terms by multiplicity.
    """
    if not (0 <= doc < index.n_docs):
        raise DocOutOfRange(f"doc index {doc} outside 0..{index.n_docs - 1}")
    terms = dict.fromkeys(query) if dedupe_query else query
    tf_map = index.doc_term_freqs[doc]
    dl = index.doc_lengths[doc]
    score = 0.0
    for term in terms:
        tf = tf_map.get(term, 0)
        if tf == 0:
            continue
        score += term_weight(
            tf, index.doc_freq[term], index.n_docs, dl, index.avg_doc_length,
            index.k1, index.b,
        )
    return score
