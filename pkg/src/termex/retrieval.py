"""Demonstration retrieval: score every (query, demo) pair, take the top k.

Methods: ``fastkassim`` (tree kernel), ``cassim`` (tree edit distance),
``bm25``, ``embedding`` (cosine over stored vectors), and ``random``
(seeded uniform selection without replacement).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from termex.corpus import SentenceRecord
from termex.lexical_sim import Bm25Index, bm25_score, tokenize
from termex.semantic_sim import EmbeddingStore, cosine
from termex.syntax_sim import (
    KernelConfig,
    normalized_edit_similarity,
    normalized_similarity,
)
from termex.treebank import ParseTree

__all__ = [
    "METHODS",
    "RANDOM_GENERATOR",
    "RetrievalResult",
    "MethodResources",
    "MissingResource",
    "EmptyScoreVector",
    "KExceedsN",
    "score_all",
    "top_k",
    "random_select",
    "save_retrieval_dump",
    "load_retrieval_dump",
]

logger = logging.getLogger(__name__)

METHODS = ("fastkassim", "cassim", "bm25", "embedding", "random")

# Selection algorithm for the random baseline; part of the on-disk contract
# so seeds stay portable across implementations.
RANDOM_GENERATOR = "pcg64-fisher-yates-v1"


class MissingResource(LookupError):
    def __init__(self, resource: str, ids: Sequence[str]):
        shown = ", ".join(list(ids)[:5])
        suffix = "..." if len(ids) > 5 else ""
        super().__init__(f"missing {resource} for: {shown}{suffix}")
        self.resource = resource
        self.ids = list(ids)


class EmptyScoreVector(ValueError):
    pass


class KExceedsN(ValueError):
    pass


@dataclass(frozen=True)
class RetrievalResult:
    """Ranked demonstration selection for one query."""

    query_id: str
    method: str
    selected: tuple[tuple[str, float], ...]
    k: int
    seed: Optional[int] = None

    def __post_init__(self):
        scores = [s for _, s in self.selected]
        if any(scores[i] < scores[i + 1] for i in range(len(scores) - 1)):
            raise ValueError("selected scores must be non-increasing")
        ids = [d for d, _ in self.selected]
        if len(set(ids)) != len(ids):
            raise ValueError("selected demo ids must be distinct")

    @property
    def demo_ids(self) -> tuple[str, ...]:
        return tuple(d for d, _ in self.selected)


@dataclass
class MethodResources:
    """Per-method artifacts needed by score_all."""

    kernel_cfg: KernelConfig = KernelConfig()
    query_trees: Optional[Mapping[str, ParseTree]] = None
    demo_trees: Optional[Mapping[str, ParseTree]] = None
    bm25_index: Optional[Bm25Index] = None
    bm25_dedupe_query: bool = True
    query_store: Optional[EmbeddingStore] = None
    demo_store: Optional[EmbeddingStore] = None


def _require_trees(
    query: SentenceRecord, demos: Sequence[SentenceRecord], res: MethodResources
) -> tuple[ParseTree, list[ParseTree]]:
    missing = []
    if res.query_trees is None or query.id not in res.query_trees:
        missing.append(query.id)
    demo_trees = res.demo_trees or {}
    missing += [d.id for d in demos if d.id not in demo_trees]
    if missing:
        raise MissingResource("parse tree", missing)
    return res.query_trees[query.id], [demo_trees[d.id] for d in demos]


def score_all(
    query: SentenceRecord,
    demos: Sequence[SentenceRecord],
    method: str,
    res: MethodResources,
) -> np.ndarray:
    """One finite score per demonstration; higher means more similar.

    The bm25 index must have been built over ``demos`` in the same order.
    """
    if method == "fastkassim":
        qt, dts = _require_trees(query, demos, res)
        return np.array(
            [normalized_similarity(qt, dt, res.kernel_cfg) for dt in dts]
        )
    if method == "cassim":
        qt, dts = _require_trees(query, demos, res)
        return np.array([normalized_edit_similarity(qt, dt) for dt in dts])
    if method == "bm25":
        if res.bm25_index is None:
            raise MissingResource("bm25 index", [query.id])
        if res.bm25_index.n_docs != len(demos):
            raise ValueError(
                f"bm25 index covers {res.bm25_index.n_docs} docs, "
                f"got {len(demos)} demos"
            )
        tokens = tokenize(query.text)
        return np.array(
            [
                bm25_score(res.bm25_index, tokens, i,
                           dedupe_query=res.bm25_dedupe_query)
                for i in range(len(demos))
            ]
        )
    if method == "embedding":
        missing = []
        if res.query_store is None or query.id not in res.query_store.vectors:
            missing.append(query.id)
        demo_vectors = res.demo_store.vectors if res.demo_store else {}
        missing += [d.id for d in demos if d.id not in demo_vectors]
        if missing:
            raise MissingResource("embedding vector", missing)
        qv = res.query_store.vectors[query.id]
        return np.array([cosine(qv, demo_vectors[d.id]) for d in demos])
    raise ValueError(f"method {method!r} is not scoreable (expected one of "
                     f"{[m for m in METHODS if m != 'random']})")


def top_k(scores: Sequence[float], k: int) -> list[int]:
    """Indices of the k largest scores, descending; ties break by index."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    vector = np.asarray(scores, dtype=float)
    if vector.size == 0:
        raise EmptyScoreVector("cannot rank an empty score vector")
    if k > vector.size:
        logger.warning("k=%d exceeds corpus size %d; returning all", k, vector.size)
        k = vector.size
    order = sorted(range(vector.size), key=lambda i: (-vector[i], i))
    return order[:k]


def random_select(n: int, k: int, seed: int) -> list[int]:
    """k distinct indices drawn uniformly from 0..n-1, reproducibly.

    Partial Fisher-Yates over a PCG64 stream, so identical (n, k, seed)
    yield identical lists on every platform.
    """
    if not (1 <= k <= n):
        raise KExceedsN(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = np.random.Generator(np.random.PCG64(seed))
    pool = list(range(n))
    for i in range(k):
        j = i + int(rng.integers(0, n - i))
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]


# ---------------------------------------------------------------------------
# Retrieval dump: one JSON object per query, consumed by both the prompt
# builder and TOR so the two provably see identical selections.
# ---------------------------------------------------------------------------


def _result_to_obj(result: RetrievalResult) -> dict:
    obj = {
        "query_id": result.query_id,
        "method": result.method,
        "k": result.k,
        "selected": [[d, s] for d, s in result.selected],
    }
    if result.seed is not None:
        obj["seed"] = result.seed
        obj["generator"] = RANDOM_GENERATOR
    return obj


def save_retrieval_dump(path, results: Sequence[RetrievalResult]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for result in results:
            fh.write(json.dumps(_result_to_obj(result), sort_keys=True) + "\n")


def load_retrieval_dump(path) -> list[RetrievalResult]:
    results = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            results.append(
                RetrievalResult(
                    query_id=obj["query_id"],
                    method=obj["method"],
                    selected=tuple((d, float(s)) for d, s in obj["selected"]),
                    k=obj["k"],
                    seed=obj.get("seed"),
                )
            )
    return results
