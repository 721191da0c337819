"""Loading and summarizing the demonstration and query corpora.

Corpora are JSON-lines files, one sentence per line with its gold term
set.  Whether a file acts as demonstration pool or query set is decided
by how the experiment wires it, not by the loader.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from termex.lexical_sim import tokenize
from termex.treebank import ParseTree

__all__ = [
    "SentenceRecord",
    "CorpusStats",
    "CorpusError",
    "MissingKey",
    "DuplicateId",
    "MalformedLine",
    "EmptyCorpus",
    "load_corpus",
    "save_corpus",
    "check_term_containment",
    "corpus_stats",
]

logger = logging.getLogger(__name__)

_SPLITS = ("train", "validation", "test")


class CorpusError(ValueError):
    pass


class MissingKey(CorpusError):
    pass


class DuplicateId(CorpusError):
    pass


class MalformedLine(CorpusError):
    pass


class EmptyCorpus(CorpusError):
    pass


@dataclass(frozen=True)
class SentenceRecord:
    """One sentence with its gold term set.

    ``terms`` keeps corpus order (needed when rendering demonstrations)
    but contains no duplicates and no empty strings.
    """

    id: str
    text: str
    domain: str
    terms: tuple[str, ...]
    tree: Optional[ParseTree] = None
    split: Optional[str] = None

    def __post_init__(self):
        if not self.id:
            raise CorpusError("record id must be non-empty")
        if any(not t for t in self.terms):
            raise CorpusError(f"record {self.id!r} has an empty term")
        if len(set(self.terms)) != len(self.terms):
            raise CorpusError(f"record {self.id!r} has duplicate terms")
        if self.split is not None and self.split not in _SPLITS:
            raise CorpusError(
                f"record {self.id!r}: split must be one of {_SPLITS}, got {self.split!r}"
            )

    @property
    def term_set(self) -> frozenset[str]:
        return frozenset(self.terms)


@dataclass(frozen=True)
class CorpusStats:
    avg_words: float
    avg_terms: float
    n_sentences: int

    @property
    def avg_words_rounded(self) -> int:
        return math.floor(self.avg_words + 0.5)

    @property
    def avg_terms_rounded(self) -> int:
        return math.floor(self.avg_terms + 0.5)


def load_corpus(path) -> list[SentenceRecord]:
    """Read a JSONL corpus; duplicate gold terms are dropped with a warning."""
    records: list[SentenceRecord] = []
    seen: set[str] = set()
    dropped_dupes = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLine(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise MalformedLine(f"line {lineno}: expected a JSON object")
            for key in ("id", "text", "domain", "terms"):
                if key not in obj:
                    raise MissingKey(f"line {lineno}: missing key {key!r}")
            if obj["id"] in seen:
                raise DuplicateId(f"line {lineno}: duplicate id {obj['id']!r}")
            seen.add(obj["id"])
            terms = list(dict.fromkeys(t for t in obj["terms"] if t))
            dropped = len(obj["terms"]) - len(terms)
            dropped_dupes += dropped
            try:
                record = SentenceRecord(
                    id=obj["id"],
                    text=obj["text"],
                    domain=obj["domain"],
                    terms=tuple(terms),
                    split=obj.get("split"),
                )
            except CorpusError as exc:
                raise MalformedLine(f"line {lineno}: {exc}") from exc
            records.append(record)
    if dropped_dupes:
        logger.warning(
            "dropped %d duplicate/empty gold term(s) while loading %s",
            dropped_dupes, path,
        )
    return records


def save_corpus(path, records: Sequence[SentenceRecord]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            obj = {
                "id": rec.id,
                "text": rec.text,
                "domain": rec.domain,
                "terms": list(rec.terms),
            }
            if rec.split is not None:
                obj["split"] = rec.split
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def check_term_containment(record: SentenceRecord) -> list[str]:
    """Warn (not fail) for gold terms that are not substrings of the text."""
    return [
        f"record {record.id!r}: term {term!r} is not a case-sensitive "
        f"substring of the sentence"
        for term in record.terms
        if term not in record.text
    ]


def corpus_stats(records: Sequence[SentenceRecord]) -> CorpusStats:
    if not records:
        raise EmptyCorpus("stats require at least one sentence")
    total_words = sum(len(tokenize(r.text)) for r in records)
    total_terms = sum(len(r.terms) for r in records)
    n = len(records)
    return CorpusStats(
        avg_words=total_words / n,
        avg_terms=total_terms / n,
        n_sentences=n,
    )
