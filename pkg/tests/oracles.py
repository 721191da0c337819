"""Independent brute-force oracles used to validate the fast implementations.

Everything here is deliberately naive: exhaustive enumeration over
fragments, edit mappings, permutations, and sign flips.  None of it shares
code with the package.
"""

from __future__ import annotations

import itertools
from collections import Counter

from termex.treebank import ParseTree, parse_bracketed

DEFAULT_LABELS = ("S", "NP", "VP", "PP", "NN", "DT", "VBZ", "JJ")


# ---------------------------------------------------------------------------
# Random unlexicalized trees (built via the public bracket parser)
# ---------------------------------------------------------------------------


def random_tree(rng, max_nodes: int, labels=DEFAULT_LABELS) -> ParseTree:
    n_nodes = int(rng.integers(1, max_nodes + 1))

    def gen(budget: int) -> tuple[str, int]:
        label = labels[int(rng.integers(0, len(labels)))]
        used = 1
        parts = []
        while used < budget and rng.random() < 0.7:
            child_budget = int(rng.integers(1, budget - used + 1))
            child, child_used = gen(child_budget)
            parts.append(child)
            used += child_used
        if parts:
            return f"({label} {' '.join(parts)})", used
        return f"({label})", used

    text, _ = gen(n_nodes)
    return parse_bracketed(text)


# ---------------------------------------------------------------------------
# Kernel oracles
# ---------------------------------------------------------------------------


def _production_fragments(node: ParseTree) -> list[tuple[str, int]]:
    """All fragments rooted at ``node`` with its full production included.

    Each fragment is a canonical string; the int is the number of expanded
    nodes (stopped children are marked '*' and count zero).  The kernel's
    per-pair contribution is lambda ** expanded.
    """
    if node.is_leaf:
        return [(f"({node.label})", 1)]
    per_child = []
    for child in node.children:
        options = [(f"({child.label}*)", 0)]
        options.extend(_production_fragments(child))
        per_child.append(options)
    fragments = []
    for combo in itertools.product(*per_child):
        body = " ".join(text for text, _ in combo)
        expanded = 1 + sum(e for _, e in combo)
        fragments.append((f"({node.label} {body})", expanded))
    return fragments


def _label_fragments(node: ParseTree) -> list[tuple[str, int]]:
    """All fragments rooted at ``node`` keeping any subset of child
    positions; positions are part of the canonical string.  The int is the
    fragment's node count and the kernel contribution is lambda ** count.
    """
    per_child = []
    for position, child in enumerate(node.children):
        options = [("", 0)]
        options.extend(
            (f" {position}:{text}", size) for text, size in _label_fragments(child)
        )
        per_child.append(options)
    fragments = []
    for combo in itertools.product(*per_child):
        body = "".join(text for text, _ in combo)
        size = 1 + sum(s for _, s in combo)
        fragments.append((f"({node.label}{body})", size))
    return fragments


def _all_fragments(tree: ParseTree, mode: str) -> Counter:
    enumerate_fn = _production_fragments if mode == "production" else _label_fragments
    counts: Counter = Counter()
    for node in tree.iter_nodes():
        for text, weight in enumerate_fn(node):
            counts[(text, weight)] += 1
    return counts


def kernel_by_fragment_enumeration(
    a: ParseTree, b: ParseTree, lam: float, mode: str
) -> float:
    """Sum over shared fragments of lambda**weight, counting multiplicity."""
    frag_a = _all_fragments(a, mode)
    frag_b = _all_fragments(b, mode)
    total = 0.0
    for (text, weight), count_a in frag_a.items():
        count_b = frag_b.get((text, weight))
        if count_b:
            total += count_a * count_b * lam**weight
    return total


def kernel_naive_recursion(a: ParseTree, b: ParseTree, lam: float, mode: str) -> float:
    """The pairwise recursion written directly, without memoization."""

    def delta(n1: ParseTree, n2: ParseTree) -> float:
        if n1.label != n2.label:
            return 0.0
        if mode == "production":
            if len(n1.children) != len(n2.children):
                return 0.0
            if any(c1.label != c2.label for c1, c2 in zip(n1.children, n2.children)):
                return 0.0
        value = lam
        for c1, c2 in zip(n1.children, n2.children):
            value *= 1.0 + delta(c1, c2)
        return value

    return sum(
        delta(n1, n2) for n1 in a.iter_nodes() for n2 in b.iter_nodes()
    )


# ---------------------------------------------------------------------------
# Edit-distance oracle: exhaustive enumeration of valid edit mappings
# ---------------------------------------------------------------------------


def _postorder(tree: ParseTree) -> tuple[list[str], list[int]]:
    labels: list[str] = []
    lml: list[int] = []

    def walk(node: ParseTree) -> int:
        if node.is_leaf:
            labels.append(node.label)
            lml.append(len(labels) - 1)
            return len(labels) - 1
        first = walk(node.children[0])
        for child in node.children[1:]:
            walk(child)
        labels.append(node.label)
        lml.append(lml[first])
        return len(labels) - 1

    walk(tree)
    return labels, lml


def edit_distance_by_mapping_enumeration(a: ParseTree, b: ParseTree) -> int:
    """Minimum cost over all order- and ancestry-preserving partial
    mappings between the two node sets (unit costs).
    """
    labels_a, lml_a = _postorder(a)
    labels_b, lml_b = _postorder(b)
    na, nb = len(labels_a), len(labels_b)

    def is_ancestor(lml, x, y) -> bool:
        return lml[x] <= y < x

    best = na + nb  # empty mapping: delete everything, insert everything
    for size in range(1, min(na, nb) + 1):
        for subset_a in itertools.combinations(range(na), size):
            for subset_b in itertools.combinations(range(nb), size):
                valid = True
                for p in range(size):
                    for q in range(p + 1, size):
                        anc_a = is_ancestor(lml_a, subset_a[q], subset_a[p])
                        anc_b = is_ancestor(lml_b, subset_b[q], subset_b[p])
                        if anc_a != anc_b:
                            valid = False
                            break
                    if not valid:
                        break
                if not valid:
                    continue
                relabels = sum(
                    1
                    for x, y in zip(subset_a, subset_b)
                    if labels_a[x] != labels_b[y]
                )
                cost = (na - size) + (nb - size) + relabels
                best = min(best, cost)
    return best


# ---------------------------------------------------------------------------
# Assignment oracle
# ---------------------------------------------------------------------------


def assignment_by_permutation(cost) -> tuple[float, list[tuple[int, int]]]:
    """Minimum total cost and the lexicographically smallest optimal
    (row, col) pair list, by enumerating every complete assignment.
    """
    n = len(cost)
    m = len(cost[0])
    best_cost = None
    best_pairs = None
    if n <= m:
        for cols in itertools.permutations(range(m), n):
            total = sum(cost[r][cols[r]] for r in range(n))
            pairs = sorted((r, cols[r]) for r in range(n))
            if (
                best_cost is None
                or total < best_cost - 1e-12
                or (abs(total - best_cost) <= 1e-12 and pairs < best_pairs)
            ):
                best_cost = total
                best_pairs = pairs
    else:
        for rows in itertools.permutations(range(n), m):
            total = sum(cost[rows[c]][c] for c in range(m))
            pairs = sorted((rows[c], c) for c in range(m))
            if (
                best_cost is None
                or total < best_cost - 1e-12
                or (abs(total - best_cost) <= 1e-12 and pairs < best_pairs)
            ):
                best_cost = total
                best_pairs = pairs
    return best_cost, best_pairs


# ---------------------------------------------------------------------------
# Significance oracle: exhaustive sign permutation
# ---------------------------------------------------------------------------


def _micro_f1(counts) -> float:
    tp = sum(c[0] for c in counts)
    fp = sum(c[1] for c in counts)
    fn = sum(c[2] for c in counts)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def sign_permutation_pvalue(counts_a, counts_b) -> float:
    """Two-sided exact permutation p-value for the micro-F1 difference.

    ``counts_a``/``counts_b`` are aligned lists of (tp, fp, fn) tuples;
    every subset of sentences has its two systems' outcomes swapped.
    """
    n = len(counts_a)
    observed = abs(_micro_f1(counts_a) - _micro_f1(counts_b))
    hits = 0
    for mask in range(2**n):
        swapped_a = [
            counts_b[i] if mask >> i & 1 else counts_a[i] for i in range(n)
        ]
        swapped_b = [
            counts_a[i] if mask >> i & 1 else counts_b[i] for i in range(n)
        ]
        delta = abs(_micro_f1(swapped_a) - _micro_f1(swapped_b))
        if delta >= observed - 1e-12:
            hits += 1
    return hits / 2**n


# ---------------------------------------------------------------------------
# Mid-rank Pearson oracle for Spearman correlation
# ---------------------------------------------------------------------------


def spearman_by_rank_then_pearson(xs, ys) -> float:
    def ranks(values):
        order = sorted(range(len(values)), key=lambda i: values[i])
        out = [0.0] * len(values)
        i = 0
        while i < len(values):
            j = i
            while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
                j += 1
            for p in range(i, j + 1):
                out[order[p]] = (i + j) / 2 + 1
            i = j + 1
        return out

    rx, ry = ranks(list(xs)), ranks(list(ys))
    mx = sum(rx) / len(rx)
    my = sum(ry) / len(ry)
    sxy = sum((x - mx) * (y - my) for x, y in zip(rx, ry))
    sxx = sum((x - mx) ** 2 for x in rx)
    syy = sum((y - my) ** 2 for y in ry)
    return sxy / (sxx * syy) ** 0.5
