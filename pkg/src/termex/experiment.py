"""End-to-end experiment orchestration.

Wires corpora, trees, and embeddings into retrieval, prompting, model
calls, and evaluation.  Every stage persists its output under the run
directory so stages can be re-run individually; the report is a pure
function of the persisted artifacts, which makes re-evaluation from the
response log byte-identical.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import logging
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping, Optional, Sequence

from termex import evaluation, llm_client, prompting, retrieval
from termex.corpus import SentenceRecord, load_corpus
from termex.evaluation import MatchCounts
from termex.lexical_sim import build_index, tokenize
from termex.llm_client import BatchItem, ModelConfig
from termex.retrieval import MethodResources, RetrievalResult
from termex.semantic_sim import load_store
from termex.syntax_sim import KernelConfig
from termex.treebank import load_treebank

__all__ = [
    "ExperimentConfig",
    "ConfigError",
    "CorpusMismatch",
    "run_experiment",
    "evaluate_run_dir",
    "compare_runs",
    "load_config_file",
    "resolve_config",
]

logger = logging.getLogger(__name__)

REPORT_NAME = "report.json"
REPORT_TEXT_NAME = "report.txt"
RETRIEVAL_NAME = "retrieval.jsonl"
PROMPTS_NAME = "prompts.jsonl"
RESPONSES_NAME = "responses.jsonl"
CONFIG_NAME = "config.json"
MANIFEST_NAME = "manifest.json"

# Config-file spelling for the embedding method used in the experiments.
_METHOD_ALIASES = {"bge_style_embedding": "embedding"}


class ConfigError(ValueError):
    pass


class CorpusMismatch(ValueError):
    """Two reports do not cover the same query ids."""


@dataclass(frozen=True)
class ExperimentConfig:
    demo_corpus: str = ""
    query_corpus: str = ""
    demo_treebank: str = ""
    query_treebank: str = ""
    method: str = "fastkassim"
    k: int = 10
    seeds: tuple[int, ...] = (1, 2, 3, 4)
    kernel_lambda: float = 0.4
    kernel_match_mode: str = "label"
    kernel_normalize: bool = True
    bm25_k1: float = 1.5
    bm25_b: float = 0.75
    bm25_dedupe_query: bool = True
    embedding_endpoint: str = ""
    embedding_model: str = ""
    embedding_instruction: str = ""
    query_embedding_cache: str = ""
    demo_embedding_cache: str = ""
    instruction_template: str = ""
    llm_endpoint: str = ""
    llm_model: str = "default"
    llm_temperature: float = 0.0
    llm_max_output_tokens: int = 256
    llm_timeout: float = 60.0
    llm_max_retries: int = 3
    llm_parallelism: int = 1
    output_dir: str = "runs"
    run_label: str = ""
    demo_order: str = "asc"
    strip_functional: bool = False
    remove_punctuation: bool = False
    bootstrap_resamples: int = 10000
    bootstrap_seed: int = 0
    ci_level: float = 0.95

    def __post_init__(self):
        method = _METHOD_ALIASES.get(self.method, self.method)
        object.__setattr__(self, "method", method)
        if method not in retrieval.METHODS:
            raise ConfigError(
                f"method must be one of {retrieval.METHODS}, got {self.method!r}"
            )
        if method == "random" and not self.seeds:
            raise ConfigError("random retrieval requires at least one seed")
        if self.demo_order not in ("asc", "desc", "given"):
            raise ConfigError(f"demo_order must be asc|desc|given, got {self.demo_order!r}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")

    def kernel_config(self) -> KernelConfig:
        return KernelConfig(
            decay_lambda=self.kernel_lambda,
            match_mode=self.kernel_match_mode,  # type: ignore[arg-type]
            normalize=self.kernel_normalize,
        )

    def model_config(self) -> ModelConfig:
        return ModelConfig(
            endpoint=self.llm_endpoint,
            model_name=self.llm_model,
            temperature=self.llm_temperature,
            max_output_tokens=self.llm_max_output_tokens,
            request_timeout=self.llm_timeout,
            max_retries=self.llm_max_retries,
            parallelism=self.llm_parallelism,
        )

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            out[f.name] = list(value) if isinstance(value, tuple) else value
        return out

    def config_hash(self) -> str:
        """Hash of everything that can influence report content."""
        payload = {
            k: v for k, v in self.to_dict().items()
            if k not in ("output_dir", "run_label")
        }
        canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


_BOOL_VALUES = {"true": True, "false": False, "1": True, "0": False,
                "yes": True, "no": False}


def load_config_file(path) -> dict[str, str]:
    """Flat ``key = value`` lines; '#' starts a comment."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = stripped.partition("=")
            values[key.strip()] = value.strip()
    return values


def resolve_config(
    file_values: Optional[Mapping[str, str]] = None,
    overrides: Optional[Mapping[str, object]] = None,
) -> ExperimentConfig:
    """Merge defaults, config-file values, and CLI overrides (highest wins)."""
    known = {f.name: f for f in fields(ExperimentConfig)}
    merged: dict[str, object] = {}
    for key, raw in (file_values or {}).items():
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        merged[key] = _coerce(key, raw)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in known:
            raise ConfigError(f"unknown config key {key!r}")
        merged[key] = _coerce(key, value) if isinstance(value, str) else value
    try:
        return ExperimentConfig(**merged)  # type: ignore[arg-type]
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc


def _coerce(key: str, raw: str) -> object:
    hints = {f.name: f.type for f in fields(ExperimentConfig)}
    hint = hints[key]
    if key == "seeds":
        return tuple(int(part) for part in str(raw).replace(",", " ").split())
    if hint in ("int",):
        return int(raw)
    if hint in ("float",):
        return float(raw)
    if hint in ("bool",):
        lowered = str(raw).strip().lower()
        if lowered not in _BOOL_VALUES:
            raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
        return _BOOL_VALUES[lowered]
    return str(raw)


# ---------------------------------------------------------------------------
# Retrieval stage
# ---------------------------------------------------------------------------


def build_resources(
    cfg: ExperimentConfig,
    demos: Sequence[SentenceRecord],
) -> MethodResources:
    res = MethodResources(kernel_cfg=cfg.kernel_config(),
                          bm25_dedupe_query=cfg.bm25_dedupe_query)
    if cfg.method in ("fastkassim", "cassim"):
        if not cfg.demo_treebank or not cfg.query_treebank:
            raise ConfigError(
                f"method {cfg.method} requires demo_treebank and query_treebank"
            )
        res.demo_trees = load_treebank(
            cfg.demo_treebank, strip_functional=cfg.strip_functional,
            remove_punctuation=cfg.remove_punctuation,
        )
        res.query_trees = load_treebank(
            cfg.query_treebank, strip_functional=cfg.strip_functional,
            remove_punctuation=cfg.remove_punctuation,
        )
    elif cfg.method == "bm25":
        res.bm25_index = build_index(
            [tokenize(d.text) for d in demos], k1=cfg.bm25_k1, b=cfg.bm25_b
        )
    elif cfg.method == "embedding":
        if not cfg.demo_embedding_cache or not cfg.query_embedding_cache:
            raise ConfigError(
                "embedding retrieval requires demo_embedding_cache and "
                "query_embedding_cache (run the embed stage first)"
            )
        res.demo_store = load_store(cfg.demo_embedding_cache)
        res.query_store = load_store(cfg.query_embedding_cache)
    return res


def retrieve_all(
    cfg: ExperimentConfig,
    demos: Sequence[SentenceRecord],
    queries: Sequence[SentenceRecord],
) -> list[RetrievalResult]:
    """Ranked selections for every query (one per seed for random)."""
    results: list[RetrievalResult] = []
    if cfg.method == "random":
        k = min(cfg.k, len(demos))
        if k < cfg.k:
            logger.warning("k=%d clamped to corpus size %d", cfg.k, len(demos))
        for seed in cfg.seeds:
            for query in queries:
                picks = retrieval.random_select(len(demos), k, _query_seed(seed, query.id))
                selected = tuple((demos[i].id, 0.0) for i in picks)
                results.append(
                    RetrievalResult(
                        query_id=query.id, method="random",
                        selected=selected, k=cfg.k, seed=seed,
                    )
                )
        return results
    res = build_resources(cfg, demos)
    for query in queries:
        scores = retrieval.score_all(query, demos, cfg.method, res)
        order = retrieval.top_k(scores, cfg.k)
        selected = tuple((demos[i].id, float(scores[i])) for i in order)
        results.append(
            RetrievalResult(
                query_id=query.id, method=cfg.method, selected=selected, k=cfg.k,
            )
        )
    return results


def _query_seed(seed: int, query_id: str) -> int:
    """Stable per-query stream so selections differ across queries."""
    digest = hashlib.sha256(f"{seed}:{query_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


# ---------------------------------------------------------------------------
# Prompting stage
# ---------------------------------------------------------------------------


def order_demos(
    result: RetrievalResult,
    demos_by_id: Mapping[str, SentenceRecord],
    demo_order: str,
    demo_rank: Mapping[str, int],
) -> list[SentenceRecord]:
    ids = list(result.demo_ids)
    if demo_order == "asc":
        ids = ids[::-1]  # most similar demonstration closest to the query
    elif demo_order == "given":
        ids = sorted(ids, key=lambda d: demo_rank[d])
    return [demos_by_id[d] for d in ids]


def build_prompts(
    cfg: ExperimentConfig,
    results: Sequence[RetrievalResult],
    demos: Sequence[SentenceRecord],
    queries_by_id: Mapping[str, SentenceRecord],
    template: str,
) -> list[prompting.PromptBundle]:
    demos_by_id = {d.id: d for d in demos}
    demo_rank = {d.id: i for i, d in enumerate(demos)}
    bundles = []
    for result in results:
        query = queries_by_id[result.query_id]
        instruction = prompting.render_instruction(template, query.domain)
        ordered = order_demos(result, demos_by_id, cfg.demo_order, demo_rank)
        bundles.append(prompting.build_prompt(instruction, ordered, query))
    return bundles


# ---------------------------------------------------------------------------
# Evaluation stage
# ---------------------------------------------------------------------------


@dataclass
class _RunUnit:
    seed: Optional[int]
    results: list[RetrievalResult]
    raw_by_query: dict[str, Optional[str]]
    error_by_query: dict[str, Optional[str]]


def _evaluate_unit(
    cfg: ExperimentConfig,
    unit: _RunUnit,
    demos_by_id: Mapping[str, SentenceRecord],
    queries: Sequence[SentenceRecord],
) -> dict:
    counts: list[MatchCounts] = []
    rows: list[dict] = []
    llm_errors = 0
    for query in queries:
        raw = unit.raw_by_query.get(query.id)
        error = unit.error_by_query.get(query.id)
        if raw is None or error is not None:
            pred: set[str] = set()
            if error is not None:
                llm_errors += 1
        else:
            pred = prompting.parse_response(raw)
        c = evaluation.match_counts(pred, query.term_set)
        counts.append(c)
        rows.append(
            {
                "query_id": query.id,
                "tp": c.tp,
                "fp": c.fp,
                "fn": c.fn,
                "f1": evaluation.sentence_f1(c),
                "llm_error": error is not None,
            }
        )
    boot = evaluation.bootstrap_ci(
        counts, resamples=cfg.bootstrap_resamples,
        level=cfg.ci_level, seed=cfg.bootstrap_seed,
    )
    demo_terms = {d: rec.term_set for d, rec in demos_by_id.items()}
    gold = {q.id: q.term_set for q in queries}
    tor_report = evaluation.tor(unit.results, demo_terms, gold)
    for row in rows:
        row["tor"] = tor_report.per_query_tor.get(row["query_id"])

    pairs = [
        (row["tor"], row["f1"]) for row in rows if row["tor"] is not None
    ]
    correlation: dict[str, object] = {"n_pairs": len(pairs)}
    if len(pairs) < 2:
        correlation["spearman"] = None
        correlation["undefined_reason"] = "fewer than two queries with gold terms"
    else:
        xs, ys = zip(*pairs)
        try:
            value = evaluation.spearman(xs, ys)
            correlation["spearman"] = value
            correlation["spearman_x100"] = value * 100.0
            correlation["undefined_reason"] = None
        except evaluation.ConstantSeries:
            correlation["spearman"] = None
            correlation["undefined_reason"] = "constant series"
    precision, recall, f1 = boot.point
    return {
        "seed": unit.seed,
        "metrics": {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "precision_ci": list(boot.precision_ci),
            "recall_ci": list(boot.recall_ci),
            "f1_ci": list(boot.f1_ci),
        },
        "tor": {
            "mean": tor_report.mean_tor,
            "mean_x100": tor_report.mean_tor * 100.0,
            "n_included": tor_report.n_included,
            "n_skipped": tor_report.n_skipped,
            "per_query": dict(sorted(tor_report.per_query_tor.items())),
        },
        "correlation": correlation,
        "per_sentence": rows,
        "llm_error_count": llm_errors,
    }


def _mean_metrics(runs: Sequence[dict]) -> dict:
    keys = ("precision", "recall", "f1")
    out = {key: sum(r["metrics"][key] for r in runs) / len(runs) for key in keys}
    out["tor_mean"] = sum(r["tor"]["mean"] for r in runs) / len(runs)
    return out


def _build_report(cfg: ExperimentConfig, runs: list[dict]) -> dict:
    report = {
        "method": cfg.method,
        "k": cfg.k,
        "config_hash": cfg.config_hash(),
        "bootstrap": {
            "resamples": cfg.bootstrap_resamples,
            "seed": cfg.bootstrap_seed,
            "level": cfg.ci_level,
        },
        "runs": runs,
    }
    if len(runs) > 1:
        report["seeds"] = [r["seed"] for r in runs]
        report["mean_over_seeds"] = _mean_metrics(runs)
    return report


def render_report_text(report: dict) -> str:
    """Aligned table with percentages; fractions stay in the JSON."""
    lines = [
        f"method: {report['method']}   k: {report['k']}",
        f"config: {report['config_hash'][:12]}",
        "",
        f"{'seed':>6}  {'P':>6} {'R':>6} {'F1':>6}   "
        f"{'F1 95% CI':>15}   {'TOR':>6}  {'corr':>6}",
    ]
    for run in report["runs"]:
        m = run["metrics"]
        lo, hi = m["f1_ci"]
        seed = "-" if run["seed"] is None else str(run["seed"])
        corr = run["correlation"]["spearman"]
        corr_s = f"{corr * 100:6.2f}" if corr is not None else "   n/a"
        lines.append(
            f"{seed:>6}  {m['precision'] * 100:6.1f} {m['recall'] * 100:6.1f} "
            f"{m['f1'] * 100:6.1f}   [{lo * 100:6.1f}, {hi * 100:6.1f}]   "
            f"{run['tor']['mean'] * 100:6.2f}  {corr_s}"
        )
    if "mean_over_seeds" in report:
        mean = report["mean_over_seeds"]
        lines.append(
            f"{'mean':>6}  {mean['precision'] * 100:6.1f} "
            f"{mean['recall'] * 100:6.1f} {mean['f1'] * 100:6.1f}"
            f"{'':>21}   {mean['tor_mean'] * 100:6.2f}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Driver
# ---------------------------------------------------------------------------


def _make_run_dir(cfg: ExperimentConfig) -> Path:
    base = Path(cfg.output_dir)
    base.mkdir(parents=True, exist_ok=True)
    label = cfg.run_label or _dt.datetime.now().strftime("%Y%m%d-%H%M%S")
    candidate = base / f"run-{label}"
    counter = 2
    while candidate.exists():
        candidate = base / f"run-{label}-{counter}"
        counter += 1
    candidate.mkdir()
    return candidate


def _dump_json(path: Path, payload: dict) -> None:
    path.write_text(
        json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def _response_key(query_id: str, seed: Optional[int]) -> tuple[str, Optional[int]]:
    return (query_id, seed)


def run_experiment(
    cfg: ExperimentConfig,
    *,
    reuse_responses: Optional[Sequence[dict]] = None,
    resume_responses: Optional[Sequence[dict]] = None,
    precomputed_retrieval: Optional[Sequence[RetrievalResult]] = None,
) -> tuple[dict, Path]:
    """Run the pipeline and return (report, run directory).

    ``reuse_responses`` skips the model entirely (re-evaluation from a
    response log); ``resume_responses`` re-issues only items that failed.
    """
    if not cfg.demo_corpus or not cfg.query_corpus:
        raise ConfigError("demo_corpus and query_corpus are required")
    demos = load_corpus(cfg.demo_corpus)
    queries = load_corpus(cfg.query_corpus)
    if not demos or not queries:
        raise ConfigError("corpora must be nonempty")
    demos_by_id = {d.id: d for d in demos}
    queries_by_id = {q.id: q for q in queries}

    if precomputed_retrieval is not None:
        results = list(precomputed_retrieval)
    else:
        results = retrieve_all(cfg, demos, queries)

    template = prompting.DEFAULT_INSTRUCTION_TEMPLATE
    if cfg.instruction_template:
        template = Path(cfg.instruction_template).read_text(encoding="utf-8")
    bundles = build_prompts(cfg, results, demos, queries_by_id, template)

    run_dir = _make_run_dir(cfg)
    retrieval.save_retrieval_dump(run_dir / RETRIEVAL_NAME, results)
    with open(run_dir / PROMPTS_NAME, "w", encoding="utf-8", newline="\n") as fh:
        for result, bundle in zip(results, bundles):
            fh.write(
                json.dumps(
                    {
                        "query_id": bundle.query_id,
                        "seed": result.seed,
                        "demo_ids": list(bundle.demo_ids),
                        "prompt_sha256": llm_client.prompt_sha256(bundle.text),
                        "text": bundle.text,
                    },
                    sort_keys=True,
                )
                + "\n"
            )

    if reuse_responses is not None:
        by_key = {
            _response_key(e["query_id"], e.get("seed")): e for e in reuse_responses
        }
        items = []
        for result in results:
            entry = by_key.get(_response_key(result.query_id, result.seed))
            if entry is None:
                raise ConfigError(
                    f"response log lacks query {result.query_id!r} "
                    f"(seed {result.seed})"
                )
            items.append(
                BatchItem(index=len(items), raw=entry.get("raw"),
                          error=entry.get("error"))
            )
    else:
        completed: dict[int, str] = {}
        if resume_responses:
            by_key = {
                _response_key(e["query_id"], e.get("seed")): e
                for e in resume_responses
                if e.get("error") is None and e.get("raw") is not None
            }
            for i, result in enumerate(results):
                entry = by_key.get(_response_key(result.query_id, result.seed))
                if entry is not None:
                    completed[i] = entry["raw"]
        items = llm_client.run_batch(bundles, cfg.model_config(), completed=completed)

    with open(run_dir / RESPONSES_NAME, "w", encoding="utf-8", newline="\n") as fh:
        for result, bundle, item in zip(results, bundles, items):
            entry = {
                "query_id": result.query_id,
                "seed": result.seed,
                "prompt_sha256": llm_client.prompt_sha256(bundle.text),
                "raw": item.raw,
                "latency_ms": item.latency_ms,
                "usage": item.usage,
                "error": item.error,
            }
            fh.write(json.dumps(entry, sort_keys=True) + "\n")

    seeds_in_order: list[Optional[int]] = []
    for result in results:
        if result.seed not in seeds_in_order:
            seeds_in_order.append(result.seed)
    runs = []
    for seed in seeds_in_order:
        unit = _RunUnit(
            seed=seed,
            results=[r for r in results if r.seed == seed],
            raw_by_query={
                r.query_id: item.raw
                for r, item in zip(results, items) if r.seed == seed
            },
            error_by_query={
                r.query_id: item.error
                for r, item in zip(results, items) if r.seed == seed
            },
        )
        runs.append(_evaluate_unit(cfg, unit, demos_by_id, queries))

    report = _build_report(cfg, runs)
    _dump_json(run_dir / REPORT_NAME, report)
    (run_dir / REPORT_TEXT_NAME).write_text(
        render_report_text(report), encoding="utf-8"
    )
    _dump_json(run_dir / CONFIG_NAME, cfg.to_dict())
    _dump_json(
        run_dir / MANIFEST_NAME,
        {
            "inputs": {
                "demo_corpus": cfg.demo_corpus,
                "query_corpus": cfg.query_corpus,
                "demo_treebank": cfg.demo_treebank or None,
                "query_treebank": cfg.query_treebank or None,
            },
            "config_hash": cfg.config_hash(),
            "seeds": list(cfg.seeds) if cfg.method == "random" else [],
            "artifacts": [
                RETRIEVAL_NAME, PROMPTS_NAME, RESPONSES_NAME,
                REPORT_NAME, REPORT_TEXT_NAME, CONFIG_NAME,
            ],
        },
    )
    return report, run_dir


def evaluate_run_dir(run_dir: str | Path, output_dir: Optional[str] = None) -> tuple[dict, Path]:
    """Rebuild the report from a run directory's persisted artifacts."""
    run_dir = Path(run_dir)
    cfg_values = json.loads((run_dir / CONFIG_NAME).read_text(encoding="utf-8"))
    cfg_values["seeds"] = tuple(cfg_values.get("seeds", ()))
    cfg = ExperimentConfig(**cfg_values)
    if output_dir:
        cfg = replace(cfg, output_dir=output_dir)
    responses = llm_client.load_response_log(run_dir / RESPONSES_NAME)
    results = retrieval.load_retrieval_dump(run_dir / RETRIEVAL_NAME)
    return run_experiment(
        cfg, reuse_responses=responses, precomputed_retrieval=results
    )


def compare_runs(report_a: dict, report_b: dict,
                 resamples: int = 10000, seed: int = 0) -> dict:
    """Paired significance of the micro-F1 difference between two reports."""
    counts_a, ids_a = _pooled_counts(report_a)
    counts_b, ids_b = _pooled_counts(report_b)
    if ids_a != ids_b:
        raise CorpusMismatch("reports cover different query id sets")
    p_value = evaluation.paired_bootstrap_pvalue(
        counts_a, counts_b, resamples=resamples, seed=seed
    )
    f1_a = _headline_f1(report_a)
    f1_b = _headline_f1(report_b)
    return {
        "f1_a": f1_a,
        "f1_b": f1_b,
        "delta_f1": f1_a - f1_b,
        "p_value": p_value,
        "significant_at_0.05": p_value < 0.05,
        "resamples": resamples,
        "seed": seed,
    }


@dataclass(frozen=True)
class _FloatCounts:
    """Seed-averaged per-sentence counts; duck-typed like MatchCounts."""

    tp: float
    fp: float
    fn: float


def _pooled_counts(report: dict) -> tuple[list, tuple[str, ...]]:
    runs = report["runs"]
    ids = tuple(row["query_id"] for row in runs[0]["per_sentence"])
    if len(runs) == 1:
        counts = [
            MatchCounts(tp=row["tp"], fp=row["fp"], fn=row["fn"])
            for row in runs[0]["per_sentence"]
        ]
        return counts, ids
    pooled = []
    for idx, query_id in enumerate(ids):
        rows = [run["per_sentence"][idx] for run in runs]
        if any(row["query_id"] != query_id for row in rows):
            raise CorpusMismatch("per-seed sentence tables are misaligned")
        pooled.append(
            _FloatCounts(
                tp=sum(r["tp"] for r in rows) / len(rows),
                fp=sum(r["fp"] for r in rows) / len(rows),
                fn=sum(r["fn"] for r in rows) / len(rows),
            )
        )
    return pooled, ids


def _headline_f1(report: dict) -> float:
    if "mean_over_seeds" in report:
        return report["mean_over_seeds"]["f1"]
    return report["runs"][0]["metrics"]["f1"]
