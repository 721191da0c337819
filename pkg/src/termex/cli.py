"""Command-line interface.

Stages are individually re-runnable; every subcommand persists its output.
Exit codes: 0 success, 1 config error, 2 data error, 3 upstream-service
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from termex import __version__, evaluation, llm_client, prompting, retrieval
from termex import semantic_sim
from termex.corpus import (
    CorpusError,
    check_term_containment,
    corpus_stats,
    load_corpus,
)
from termex.experiment import (
    ConfigError,
    CorpusMismatch,
    ExperimentConfig,
    compare_runs,
    evaluate_run_dir,
    load_config_file,
    resolve_config,
    run_experiment,
)
from termex.mock_llm import MODES, MockLlmServer
from termex.semantic_sim import CorruptCache, HttpError, fetch_embeddings
from termex.treebank import TreebankError, load_treebank

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_UPSTREAM = 3

_CONFIG_FLAGS = [
    "demo_corpus", "query_corpus", "demo_treebank", "query_treebank",
    "method", "k", "seeds", "kernel_lambda", "kernel_match_mode",
    "kernel_normalize", "bm25_k1", "bm25_b", "bm25_dedupe_query",
    "embedding_endpoint", "embedding_model", "embedding_instruction",
    "query_embedding_cache", "demo_embedding_cache", "instruction_template",
    "llm_endpoint", "llm_model", "llm_temperature", "llm_max_output_tokens",
    "llm_timeout", "llm_max_retries", "llm_parallelism", "output_dir",
    "run_label", "demo_order", "strip_functional", "remove_punctuation",
    "bootstrap_resamples", "bootstrap_seed", "ci_level",
]


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    for name in _CONFIG_FLAGS:
        parser.add_argument(f"--{name.replace('_', '-')}", dest=name, default=None)


def _resolve(args: argparse.Namespace) -> ExperimentConfig:
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {
        name: getattr(args, name)
        for name in _CONFIG_FLAGS
        if getattr(args, name, None) is not None
    }
    return resolve_config(file_values, overrides)


def cmd_parse_trees(args) -> int:
    trees = load_treebank(
        args.treebank,
        strip_functional=args.strip_functional,
        remove_punctuation=args.remove_punctuation,
    )
    sizes = [t.size() for t in trees.values()]
    print(f"{len(trees)} tree(s) OK; nodes min={min(sizes)} max={max(sizes)}")
    return EXIT_OK


def cmd_stats(args) -> int:
    records = load_corpus(args.corpus)
    stats = corpus_stats(records)
    warnings = [w for rec in records for w in check_term_containment(rec)]
    payload = {
        "n_sentences": stats.n_sentences,
        "avg_words": stats.avg_words,
        "avg_terms": stats.avg_terms,
        "avg_words_rounded": stats.avg_words_rounded,
        "avg_terms_rounded": stats.avg_terms_rounded,
        "containment_warnings": len(warnings),
    }
    print(json.dumps(payload, sort_keys=True, indent=2))
    print(f"\n{'sentences':>12} {'avg words':>12} {'avg terms':>12}")
    print(
        f"{stats.n_sentences:>12} {stats.avg_words_rounded:>12} "
        f"{stats.avg_terms_rounded:>12}"
    )
    for warning in warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return EXIT_OK


def cmd_embed(args) -> int:
    cfg = _resolve(args)
    records = load_corpus(args.corpus)
    if not cfg.embedding_endpoint:
        raise ConfigError("embedding_endpoint is required for embed")
    store = fetch_embeddings(
        [r.text for r in records],
        cfg.embedding_endpoint,
        cfg.embedding_model or "default",
        instruction=cfg.embedding_instruction or None,
        ids=[r.id for r in records],
    )
    semantic_sim.save_store(args.out, store)
    print(f"embedded {len(store)} sentence(s) at dim {store.dim} -> {args.out}")
    return EXIT_OK


def cmd_retrieve(args) -> int:
    from termex.experiment import retrieve_all

    cfg = _resolve(args)
    demos = load_corpus(cfg.demo_corpus)
    queries = load_corpus(cfg.query_corpus)
    results = retrieve_all(cfg, demos, queries)
    retrieval.save_retrieval_dump(args.out, results)
    print(f"wrote {len(results)} retrieval result(s) -> {args.out}")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _resolve(args)
    resume = None
    if args.resume_from:
        resume = llm_client.load_response_log(args.resume_from)
    report, run_dir = run_experiment(cfg, resume_responses=resume)
    print(f"run dir: {run_dir}")
    _print_headline(report)
    return EXIT_OK


def cmd_eval(args) -> int:
    report, run_dir = evaluate_run_dir(args.run_dir, output_dir=args.output_dir)
    print(f"run dir: {run_dir}")
    _print_headline(report)
    return EXIT_OK


def cmd_tor(args) -> int:
    demos = load_corpus(args.demo_corpus)
    queries = load_corpus(args.query_corpus)
    results = retrieval.load_retrieval_dump(args.retrieval)
    report = evaluation.tor(
        results,
        {d.id: d.term_set for d in demos},
        {q.id: q.term_set for q in queries},
    )
    print(
        json.dumps(
            {
                "mean_tor": report.mean_tor,
                "mean_tor_x100": report.mean_tor * 100.0,
                "n_included": report.n_included,
                "n_skipped": report.n_skipped,
                "per_query": dict(sorted(report.per_query_tor.items())),
            },
            sort_keys=True,
            indent=2,
        )
    )
    return EXIT_OK


def cmd_compare(args) -> int:
    report_a = json.loads(Path(args.report_a).read_text(encoding="utf-8"))
    report_b = json.loads(Path(args.report_b).read_text(encoding="utf-8"))
    summary = compare_runs(
        report_a, report_b, resamples=args.resamples, seed=args.seed
    )
    print(json.dumps(summary, sort_keys=True, indent=2))
    return EXIT_OK


def cmd_dump_template(args) -> int:
    print(prompting.DEFAULT_INSTRUCTION_TEMPLATE)
    return EXIT_OK


def cmd_mock_llm(args) -> int:
    gold = {}
    if args.corpus:
        for record in load_corpus(args.corpus):
            gold[record.text] = record.terms
    server = MockLlmServer(
        mode=args.mode, gold_by_text=gold,
        embedding_dim=args.embedding_dim, port=args.port,
    )
    print(f"mock server on port {server.port} (mode={args.mode})")
    server.serve_forever()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="termex",
        description="Retrieval-augmented in-context learning for term extraction",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse-trees", help="validate a treebank file")
    p.add_argument("treebank")
    p.add_argument("--strip-functional", action="store_true")
    p.add_argument("--remove-punctuation", action="store_true")
    p.set_defaults(func=cmd_parse_trees)

    p = sub.add_parser("stats", help="corpus statistics")
    p.add_argument("corpus")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("embed", help="fill an embedding cache")
    p.add_argument("corpus")
    p.add_argument("out")
    _add_config_flags(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("retrieve", help="write a retrieval dump")
    p.add_argument("out")
    _add_config_flags(p)
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("run", help="full experiment")
    _add_config_flags(p)
    p.add_argument("--resume-from", help="response log; only failures re-run")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="rebuild a report from a run directory")
    p.add_argument("run_dir")
    p.add_argument("--output-dir", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("tor", help="term overlap ratio from a retrieval dump")
    p.add_argument("retrieval")
    p.add_argument("--demo-corpus", required=True, dest="demo_corpus")
    p.add_argument("--query-corpus", required=True, dest="query_corpus")
    p.set_defaults(func=cmd_tor)

    p = sub.add_parser("compare", help="paired significance of two reports")
    p.add_argument("report_a")
    p.add_argument("report_b")
    p.add_argument("--resamples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("dump-template", help="print the built-in instruction")
    p.set_defaults(func=cmd_dump_template)

    p = sub.add_parser("mock-llm", help="deterministic mock model server")
    p.add_argument("--mode", choices=MODES, default="no-term")
    p.add_argument("--corpus", help="query corpus for gold-echo mode")
    p.add_argument("--port", type=int, default=0)
    p.add_argument("--embedding-dim", type=int, default=16)
    p.set_defaults(func=cmd_mock_llm)

    return parser


def _print_headline(report: dict) -> None:
    if "mean_over_seeds" in report:
        metrics = report["mean_over_seeds"]
    else:
        metrics = report["runs"][0]["metrics"]
    print(
        f"P={metrics['precision'] * 100:.1f} R={metrics['recall'] * 100:.1f} "
        f"F1={metrics['f1'] * 100:.1f}"
    )


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CorpusError, TreebankError, CorruptCache, CorpusMismatch,
            retrieval.MissingResource, evaluation.UnknownDemoId,
            FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (llm_client.LlmClientError, HttpError, TimeoutError,
            ConnectionError) as exc:
        print(f"upstream error: {exc}", file=sys.stderr)
        return EXIT_UPSTREAM


if __name__ == "__main__":
    sys.exit(main())
