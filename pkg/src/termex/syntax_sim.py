"""Syntactic similarity between parse trees and documents.

Two sentence-level routes are implemented:

* a subset-tree kernel that counts shared tree fragments, with either a
  strict production match or a relaxed label-only match between node
  pairs, normalized to [0, 1]; and
* ordered tree edit distance (unit costs, keyroot dynamic program),
  length-normalized into a [0, 1] similarity.

Document pairs are aligned sentence-to-sentence with a minimum-cost
assignment and scored as the mean similarity of matched pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from termex.treebank import ParseTree

__all__ = [
    "KernelConfig",
    "SimilarityMatrix",
    "DegenerateTree",
    "EmptyMatrix",
    "EmptyDocument",
    "tree_kernel",
    "normalized_similarity",
    "tree_edit_distance",
    "normalized_edit_similarity",
    "hungarian_assignment",
    "document_similarity",
    "save_score_cache",
    "load_score_cache",
]

MatchMode = Literal["production", "label"]


class DegenerateTree(ValueError):
    """Self-kernel of zero; cannot happen for nonempty trees with lambda > 0."""


class EmptyMatrix(ValueError):
    """Assignment requested on a matrix with no rows or no columns."""


class EmptyDocument(ValueError):
    """Document similarity requested for an empty sentence list."""


@dataclass(frozen=True)
class KernelConfig:
    """Free parameters of the fragment-counting kernel.

    ``decay_lambda`` down-weights each matched fragment node; ``match_mode``
    picks the node-pair match test (``production`` = equal label and equal
    ordered child-label sequence, ``label`` = equal label only, children
    compared positionally with mismatched tails contributing nothing).
    """

    decay_lambda: float = 0.4
    match_mode: MatchMode = "label"
    normalize: bool = True

    def __post_init__(self):
        if not (0.0 < self.decay_lambda <= 1.0):
            raise ValueError(
                f"decay_lambda must be in (0, 1], got {self.decay_lambda}"
            )
        if self.match_mode not in ("production", "label"):
            raise ValueError(f"unknown match_mode {self.match_mode!r}")


@dataclass
class SimilarityMatrix:
    """Dense query x demonstration score matrix for one retrieval method."""

    query_ids: tuple[str, ...]
    demo_ids: tuple[str, ...]
    values: np.ndarray
    method: str

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.query_ids), len(self.demo_ids)):
            raise ValueError("values shape does not match id lists")


def _node_list(tree: ParseTree) -> list[ParseTree]:
    return list(tree.iter_nodes())


def _production_match(a: ParseTree, b: ParseTree) -> bool:
    if a.label != b.label or len(a.children) != len(b.children):
        return False
    return all(ca.label == cb.label for ca, cb in zip(a.children, b.children))


def tree_kernel(a: ParseTree, b: ParseTree, cfg: KernelConfig) -> float:
    """Fragment-counting kernel K(a, b) summed over all node pairs.

    For a matching pair the contribution is
    ``lambda * prod_i (1 + delta(child_i(a), child_i(b)))`` over positionally
    aligned children (all of them in production mode, the common prefix in
    label mode); leaves contribute ``lambda``.  Non-matching pairs contribute
    zero.  Memoized over (node_id_a, node_id_b) for this call only.
    """
    lam = cfg.decay_lambda
    production = cfg.match_mode == "production"
    memo: dict[tuple[int, int], float] = {}

    def delta(n1: ParseTree, n2: ParseTree) -> float:
        key = (n1.node_id, n2.node_id)
        cached = memo.get(key)
        if cached is not None:
            return cached
        if production:
            matched = _production_match(n1, n2)
        else:
            matched = n1.label == n2.label
        if not matched:
            memo[key] = 0.0
            return 0.0
        value = lam
        for c1, c2 in zip(n1.children, n2.children):
            value *= 1.0 + delta(c1, c2)
        memo[key] = value
        return value

    nodes_a = _node_list(a)
    nodes_b = _node_list(b)
    # Only same-label pairs can contribute; bucket by label to skip the rest.
    by_label: dict[str, list[ParseTree]] = {}
    for nb in nodes_b:
        by_label.setdefault(nb.label, []).append(nb)
    total = 0.0
    for na in nodes_a:
        for nb in by_label.get(na.label, ()):
            total += delta(na, nb)
    return total


def normalized_similarity(a: ParseTree, b: ParseTree, cfg: KernelConfig) -> float:
    """K(a,b) / sqrt(K(a,a) * K(b,b)), exactly 1 for identical structure."""
    if a.structurally_equal(b):
        return 1.0
    kaa = tree_kernel(a, a, cfg)
    kbb = tree_kernel(b, b, cfg)
    if kaa <= 0.0 or kbb <= 0.0:
        raise DegenerateTree("self-kernel is zero")
    return tree_kernel(a, b, cfg) / math.sqrt(kaa * kbb)


# ---------------------------------------------------------------------------
# Ordered tree edit distance (unit costs, keyroot dynamic program)
# ---------------------------------------------------------------------------


class _PostorderTree:
    """Postorder-indexed view with leftmost-leaf pointers and keyroots."""

    def __init__(self, root: ParseTree):
        self.labels: list[str] = []
        self.lml: list[int] = []  # leftmost leaf index per postorder node

        def walk(node: ParseTree) -> int:
            if node.is_leaf:
                idx = len(self.labels)
                self.labels.append(node.label)
                self.lml.append(idx)
                return idx
            first_child = walk(node.children[0])
            for child in node.children[1:]:
                walk(child)
            idx = len(self.labels)
            self.labels.append(node.label)
            self.lml.append(self.lml[first_child])
            return idx

        walk(root)
        self.n = len(self.labels)
        # Keyroots: nodes that are not the leftmost child of their parent,
        # i.e. the highest node for each distinct leftmost-leaf value.
        highest: dict[int, int] = {}
        for i in range(self.n):
            highest[self.lml[i]] = i
        self.keyroots = sorted(highest.values())


def tree_edit_distance(a: ParseTree, b: ParseTree) -> int:
    """Minimum insertions + deletions + relabelings turning a into b."""
    ta, tb = _PostorderTree(a), _PostorderTree(b)
    n, m = ta.n, tb.n
    dist = np.zeros((n, m), dtype=np.int64)
    fd = np.zeros((n + 1, m + 1), dtype=np.int64)

    for i in ta.keyroots:
        for j in tb.keyroots:
            li, lj = ta.lml[i], tb.lml[j]
            # Forest distances over postorder slices [li..i] x [lj..j],
            # offset so index 0 is the empty forest.
            fd[li][lj] = 0
            for x in range(li, i + 1):
                fd[x + 1][lj] = fd[x][lj] + 1
            for y in range(lj, j + 1):
                fd[li][y + 1] = fd[li][y] + 1
            for x in range(li, i + 1):
                for y in range(lj, j + 1):
                    if ta.lml[x] == li and tb.lml[y] == lj:
                        cost = 0 if ta.labels[x] == tb.labels[y] else 1
                        fd[x + 1][y + 1] = min(
                            fd[x][y + 1] + 1,
                            fd[x + 1][y] + 1,
                            fd[x][y] + cost,
                        )
                        dist[x][y] = fd[x + 1][y + 1]
                    else:
                        fd[x + 1][y + 1] = min(
                            fd[x][y + 1] + 1,
                            fd[x + 1][y] + 1,
                            fd[ta.lml[x]][tb.lml[y]] + dist[x][y],
                        )
    return int(dist[n - 1][m - 1])


def normalized_edit_similarity(a: ParseTree, b: ParseTree) -> float:
    """1 - d(a,b) / max(|a|, |b|), clamped into [0, 1]."""
    d = tree_edit_distance(a, b)
    denom = max(a.size(), b.size())
    return min(1.0, max(0.0, 1.0 - d / denom))


# ---------------------------------------------------------------------------
# Minimum-cost assignment
# ---------------------------------------------------------------------------

_COST_TOLERANCE = 1e-9


def _assignment_cost(cost: np.ndarray) -> float:
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum())


def hungarian_assignment(cost: Sequence[Sequence[float]]) -> list[tuple[int, int]]:
    """Minimum-cost assignment of min(n, m) (row, col) pairs.

    Among all minimum-cost assignments, returns the one whose row-sorted
    pair list is lexicographically smallest, so ties resolve identically
    on every run.  Raises EmptyMatrix for degenerate inputs.
    """
    matrix = np.asarray(cost, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] == 0 or matrix.shape[1] == 0:
        raise EmptyMatrix(f"cost matrix must be n x m with n,m >= 1, got {matrix.shape}")
    if not np.isfinite(matrix).all():
        raise ValueError("cost matrix must be finite")
    n, m = matrix.shape
    need = min(n, m)
    tol = _COST_TOLERANCE * max(1.0, float(np.abs(matrix).sum()))

    remaining_rows = list(range(n))
    remaining_cols = list(range(m))
    target = _assignment_cost(matrix)
    pairs: list[tuple[int, int]] = []
    fixed = 0.0
    while len(pairs) < need:
        row = remaining_rows[0]
        chosen = None
        for col in remaining_cols:
            rest_rows = [r for r in remaining_rows if r != row]
            rest_cols = [c for c in remaining_cols if c != col]
            rest = 0.0
            if rest_rows and rest_cols and len(pairs) + 1 < need:
                rest = _assignment_cost(matrix[np.ix_(rest_rows, rest_cols)])
            total = fixed + matrix[row, col] + rest
            if abs(total - target) <= tol:
                chosen = col
                break
        if chosen is None:
            # Every optimal assignment leaves this row out (n > m case).
            remaining_rows.remove(row)
            continue
        pairs.append((row, chosen))
        fixed += matrix[row, chosen]
        remaining_rows.remove(row)
        remaining_cols.remove(chosen)
    return pairs


def document_similarity(
    doc_a: Sequence[ParseTree],
    doc_b: Sequence[ParseTree],
    method: str,
    cfg: KernelConfig | None = None,
) -> float:
    """Mean similarity of optimally matched cross-document sentence pairs.

    ``fastkassim`` pairs sentences by normalized kernel similarity;
    ``cassim`` by normalized edit similarity.  The pairing minimizes total
    (1 - similarity) cost.
    """
    if not doc_a or not doc_b:
        raise EmptyDocument("both documents must contain at least one sentence")
    if method == "fastkassim":
        cfg = cfg or KernelConfig()
        sim = np.array(
            [[normalized_similarity(a, b, cfg) for b in doc_b] for a in doc_a]
        )
    elif method == "cassim":
        sim = np.array(
            [[normalized_edit_similarity(a, b) for b in doc_b] for a in doc_a]
        )
    else:
        raise ValueError(f"unknown document similarity method {method!r}")
    pairs = hungarian_assignment(1.0 - sim)
    return float(np.mean([sim[r, c] for r, c in pairs]))


# ---------------------------------------------------------------------------
# Score cache file: <query-id>\t<demo-id>\t<method>\t<score>
# ---------------------------------------------------------------------------


def save_score_cache(path, matrix: SimilarityMatrix) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for qi, qid in enumerate(matrix.query_ids):
            for di, did in enumerate(matrix.demo_ids):
                # repr keeps >= 9 significant digits and round-trips exactly
                score = float(matrix.values[qi, di])
                fh.write(f"{qid}\t{did}\t{matrix.method}\t{score!r}\n")


def load_score_cache(path) -> dict[tuple[str, str, str], float]:
    scores: dict[tuple[str, str, str], float] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(f"score cache line {lineno}: expected 4 fields")
            qid, did, method, score = parts
            scores[(qid, did, method)] = float(score)
    return scores
