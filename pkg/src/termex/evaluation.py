"""Scoring and statistics: micro P/R/F1, bootstrap intervals, paired
significance, term overlap ratio, and rank correlation.

Predicted terms are compared to gold annotations by exact, case-sensitive
string equality; no normalization is applied anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

__all__ = [
    "MatchCounts",
    "BootstrapResult",
    "TorReport",
    "MisalignedRuns",
    "UnknownDemoId",
    "LengthMismatch",
    "ConstantSeries",
    "match_counts",
    "micro_prf",
    "sentence_f1",
    "bootstrap_ci",
    "paired_bootstrap_pvalue",
    "tor",
    "spearman",
]


class MisalignedRuns(ValueError):
    pass


class UnknownDemoId(KeyError):
    pass


class LengthMismatch(ValueError):
    pass


class ConstantSeries(ValueError):
    """Rank correlation is undefined when either series is constant."""


@dataclass(frozen=True)
class MatchCounts:
    """Exact-match counts for one sentence (or an aggregate)."""

    tp: int
    fp: int
    fn: int

    def __post_init__(self):
        if self.tp < 0 or self.fp < 0 or self.fn < 0:
            raise ValueError("counts must be non-negative")


def match_counts(pred: frozenset[str] | set[str], gold: frozenset[str] | set[str]) -> MatchCounts:
    """tp/fp/fn under exact case-sensitive string equality."""
    tp = len(set(pred) & set(gold))
    return MatchCounts(tp=tp, fp=len(pred) - tp, fn=len(gold) - tp)


def _prf(tp: float, fp: float, fn: float) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def micro_prf(counts: Sequence[MatchCounts]) -> tuple[float, float, float]:
    """Corpus-level precision, recall, F1 from summed counts; 0/0 is 0."""
    if not counts:
        raise ValueError("micro_prf requires at least one sentence")
    tp = sum(c.tp for c in counts)
    fp = sum(c.fp for c in counts)
    fn = sum(c.fn for c in counts)
    return _prf(tp, fp, fn)


def sentence_f1(c: MatchCounts) -> float:
    return _prf(c.tp, c.fp, c.fn)[2]


# ---------------------------------------------------------------------------
# Bootstrap
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BootstrapResult:
    point: tuple[float, float, float]
    precision_ci: tuple[float, float]
    recall_ci: tuple[float, float]
    f1_ci: tuple[float, float]
    resamples: int
    level: float
    seed: int


def _count_arrays(counts: Sequence[MatchCounts]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    tp = np.array([c.tp for c in counts], dtype=np.float64)
    fp = np.array([c.fp for c in counts], dtype=np.float64)
    fn = np.array([c.fn for c in counts], dtype=np.float64)
    return tp, fp, fn


def _resample_indices(seed: int, resamples: int, n: int) -> np.ndarray:
    """Row r comes from its own substream: Philox keyed by (seed, r).

    Counter-based substreams are independent by construction, so resamples
    can be drawn serially or in parallel with identical results.  The
    rows equal what ``Generator(Philox(key=[seed, r])).integers(0, n, n)``
    would produce; resetting one generator's state per row just avoids
    reconstructing objects in the hot loop.
    """
    masked_seed = seed & 0xFFFFFFFFFFFFFFFF
    philox = np.random.Philox(key=[masked_seed, 0])
    rng = np.random.Generator(philox)
    state = philox.state
    indices = np.empty((resamples, n), dtype=np.intp)
    for r in range(resamples):
        state["state"]["key"][1] = r
        state["state"]["counter"][:] = 0
        state["buffer_pos"] = 4  # discard buffered words from the last row
        philox.state = state
        indices[r] = rng.integers(0, n, n)
    return indices


def _vectorized_prf(
    tp: np.ndarray, fp: np.ndarray, fn: np.ndarray, indices: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    tp_sum = tp[indices].sum(axis=1)
    fp_sum = fp[indices].sum(axis=1)
    fn_sum = fn[indices].sum(axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(tp_sum + fp_sum > 0, tp_sum / (tp_sum + fp_sum), 0.0)
        recall = np.where(tp_sum + fn_sum > 0, tp_sum / (tp_sum + fn_sum), 0.0)
        denom = precision + recall
        f1 = np.where(denom > 0, 2 * precision * recall / denom, 0.0)
    return precision, recall, f1


def bootstrap_ci(
    counts: Sequence[MatchCounts],
    resamples: int = 10000,
    level: float = 0.95,
    seed: int = 0,
) -> BootstrapResult:
    """Percentile intervals from resampling sentences with replacement."""
    if not counts:
        raise ValueError("bootstrap_ci requires at least one sentence")
    if resamples < 1:
        raise ValueError(f"resamples must be >= 1, got {resamples}")
    if not (0.0 < level < 1.0):
        raise ValueError(f"level must be in (0, 1), got {level}")
    tp, fp, fn = _count_arrays(counts)
    indices = _resample_indices(seed, resamples, len(counts))
    precision, recall, f1 = _vectorized_prf(tp, fp, fn, indices)
    alpha = (1.0 - level) / 2.0

    def interval(samples: np.ndarray) -> tuple[float, float]:
        lo, hi = np.quantile(samples, [alpha, 1.0 - alpha])
        return float(lo), float(hi)

    return BootstrapResult(
        point=micro_prf(counts),
        precision_ci=interval(precision),
        recall_ci=interval(recall),
        f1_ci=interval(f1),
        resamples=resamples,
        level=level,
        seed=seed,
    )


def paired_bootstrap_pvalue(
    counts_a: Sequence[MatchCounts],
    counts_b: Sequence[MatchCounts],
    resamples: int = 10000,
    seed: int = 0,
) -> float:
    """Two-sided paired-bootstrap p-value for the micro-F1 difference.

    Resamples sentences with replacement jointly for both runs; the
    p-value is twice the fraction of resampled differences whose sign
    contradicts the observed difference, clamped to [0, 1].
    """
    if len(counts_a) != len(counts_b):
        raise MisalignedRuns(
            f"runs cover {len(counts_a)} vs {len(counts_b)} sentences"
        )
    if not counts_a:
        raise MisalignedRuns("runs must be nonempty")
    observed = micro_prf(counts_a)[2] - micro_prf(counts_b)[2]
    if observed == 0.0:
        return 1.0
    tp_a, fp_a, fn_a = _count_arrays(counts_a)
    tp_b, fp_b, fn_b = _count_arrays(counts_b)
    indices = _resample_indices(seed, resamples, len(counts_a))
    f1_a = _vectorized_prf(tp_a, fp_a, fn_a, indices)[2]
    f1_b = _vectorized_prf(tp_b, fp_b, fn_b, indices)[2]
    delta = f1_a - f1_b
    if observed > 0:
        contradictions = int(np.count_nonzero(delta <= 0))
    else:
        contradictions = int(np.count_nonzero(delta >= 0))
    return min(1.0, 2.0 * contradictions / resamples)


# ---------------------------------------------------------------------------
# Term overlap ratio
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorReport:
    """Per-query overlap between gold terms and retrieved demo terms.

    Queries with an empty gold set are excluded from the mean and tallied
    in ``n_skipped``.
    """

    per_query_tor: dict[str, float]
    mean_tor: float
    n_included: int
    n_skipped: int


def tor(
    results: Sequence,
    demos_by_id: Mapping[str, frozenset[str] | set[str]],
    gold_by_query: Mapping[str, frozenset[str] | set[str]],
) -> TorReport:
    """Mean fraction of each query's gold terms found among its retrieved
    demonstrations' terms (exact case-sensitive matching).

    ``results`` are retrieval results exposing ``query_id`` and
    ``demo_ids``; ``demos_by_id``/``gold_by_query`` map ids to term sets.
    """
    per_query: dict[str, float] = {}
    skipped = 0
    for result in results:
        unknown = [d for d in result.demo_ids if d not in demos_by_id]
        if unknown:
            raise UnknownDemoId(
                f"query {result.query_id!r} references unknown demos: {unknown}"
            )
        gold = set(gold_by_query[result.query_id])
        if not gold:
            skipped += 1
            continue
        retrieved: set[str] = set()
        for demo_id in result.demo_ids:
            retrieved |= set(demos_by_id[demo_id])
        per_query[result.query_id] = len(retrieved & gold) / len(gold)
    mean = sum(per_query.values()) / len(per_query) if per_query else 0.0
    return TorReport(
        per_query_tor=per_query,
        mean_tor=mean,
        n_included=len(per_query),
        n_skipped=skipped,
    )


# ---------------------------------------------------------------------------
# Rank correlation
# ---------------------------------------------------------------------------


def _mid_ranks(values: np.ndarray) -> np.ndarray:
    """Fractional ranks; tied values share the average of their positions."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Pearson correlation of mid-ranks, in [-1, 1].

    Raises LengthMismatch for unequal lengths and ConstantSeries when a
    series has no variation (the correlation is undefined, not zero).
    """
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape:
        raise LengthMismatch(f"series lengths {x.shape} vs {y.shape}")
    if x.size < 2:
        raise LengthMismatch("need at least two observations")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise ConstantSeries("rank correlation undefined for constant series")
    rx = _mid_ranks(x)
    ry = _mid_ranks(y)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = np.sqrt((rx**2).sum() * (ry**2).sum())
    return float((rx * ry).sum() / denom)
