"""Command-line entry point for batch extraction, evaluation, and preparation.

Subcommands::

    extract   --corpus D --embeddings E [--lexicon L] --out P [--workers N]
    evaluate  --gold G --pred P [--mode exact|fuzzy] [--threshold 0.9] --report R
    prepare   --gold G [--test-fraction 0.2] [--balanced] [--seed 13] --out-dir DIR
    inspect   --corpus D --id X

Flags are the primary interface; ``--config FILE`` may point at a JSON object
whose keys pre-fill flag defaults (explicit flags always win).  The log level
comes from ``--log-level`` or the ``FINRELEX_LOG_LEVEL`` environment variable
(flag wins); logs go to standard error, data only to files.  Output files are
written atomically (temp file + rename), so an interrupted run never leaves a
truncated file, and runs with identical inputs and seed produce byte-identical
outputs regardless of the worker count.
"""

from __future__ import annotations

import argparse
import json
import logging
import multiprocessing
import os
import sys
from pathlib import Path

from . import corpus, evalkit, relex, semvec
from . import records as records_mod
from ._fileio import atomic_write_text, jsonl_dumps
from .deptree import TreeView

logger = logging.getLogger(__name__)

DEFAULT_SEED = 13
LOG_LEVEL_ENV = "FINRELEX_LOG_LEVEL"

_HARD_DEFAULTS = {
    "workers": 1,
    "lexicon": None,
    "mode": evalkit.EXACT,
    "threshold": 0.90,
    "keep_separators": False,
    "breakdown": None,
    "test_fraction": 0.2,
    "balanced": False,
    "seed": DEFAULT_SEED,
}

_REQUIRED = {
    "extract": ("corpus", "embeddings", "out"),
    "evaluate": ("gold", "pred", "report"),
    "prepare": ("gold", "out_dir"),
    "inspect": ("corpus", "id"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finrelex",
        description="Extract company-centric financial relations from parsed news "
        "paragraphs and score predictions against gold targets.",
    )
    parser.add_argument("--config", help="JSON file supplying default values for flags")
    parser.add_argument("--log-level", dest="log_level", help="logging level (default INFO)")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_extract = sub.add_parser("extract", help="run the heuristics over a document file")
    p_extract.add_argument("--corpus", help="annotated document file (JSON lines)")
    p_extract.add_argument("--embeddings", help="word embedding text file")
    p_extract.add_argument("--lexicon", help="JSON lexicon override file")
    p_extract.add_argument("--out", help="prediction file to write")
    p_extract.add_argument("--workers", type=int, help="parallel workers (default 1)")

    p_eval = sub.add_parser("evaluate", help="score a prediction file against gold targets")
    p_eval.add_argument("--gold", help="gold example file (JSON lines)")
    p_eval.add_argument("--pred", help="prediction file (JSON lines)")
    p_eval.add_argument("--mode", choices=(evalkit.EXACT, evalkit.FUZZY), help="matching mode")
    p_eval.add_argument("--threshold", type=float, help="fuzzy similarity threshold (default 0.9)")
    p_eval.add_argument(
        "--keep-separators",
        dest="keep_separators",
        action="store_true",
        default=None,
        help="score separator characters too instead of stripping them",
    )
    p_eval.add_argument("--report", help="report JSON file to write")
    p_eval.add_argument("--breakdown", help="optional per-example breakdown file to write")

    p_prepare = sub.add_parser("prepare", help="deduplicated train/test split of a gold file")
    p_prepare.add_argument("--gold", help="gold example file (JSON lines)")
    p_prepare.add_argument("--test-fraction", dest="test_fraction", type=float,
                           help="test share of the corpus (default 0.2)")
    p_prepare.add_argument("--balanced", action="store_true", default=None,
                           help="also write a class-balanced training subset")
    p_prepare.add_argument("--seed", type=int, help=f"sampling seed (default {DEFAULT_SEED})")
    p_prepare.add_argument("--out-dir", dest="out_dir", help="directory for the split files")

    p_inspect = sub.add_parser("inspect", help="print one document's annotations and heuristic traces")
    p_inspect.add_argument("--corpus", help="annotated document file (JSON lines)")
    p_inspect.add_argument("--id", help="document id to inspect")

    return parser


def _resolve_options(args: argparse.Namespace) -> argparse.Namespace:
    config: dict = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            config = json.load(fh)
        if not isinstance(config, dict):
            raise ValueError(f"config file {args.config} must hold a JSON object")
    for key, value in vars(args).items():
        if value is not None:
            continue
        if key in config:
            setattr(args, key, config[key])
        elif key in _HARD_DEFAULTS:
            setattr(args, key, _HARD_DEFAULTS[key])
    missing = [name for name in _REQUIRED[args.subcommand] if getattr(args, name, None) is None]
    if missing:
        flags = ", ".join("--" + name.replace("_", "-") for name in missing)
        raise ValueError(f"{args.subcommand}: missing required options: {flags}")
    return args


def _configure_logging(level_flag: str | None) -> None:
    level_name = level_flag or os.environ.get(LOG_LEVEL_ENV) or "INFO"
    level = getattr(logging, str(level_name).upper(), None)
    if not isinstance(level, int):
        raise ValueError(f"unknown log level {level_name!r}")
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")


_WORKER_STATE: dict = {}


def _init_worker(table: semvec.EmbeddingTable, lex: semvec.LexiconConfig) -> None:
    _WORKER_STATE["table"] = table
    _WORKER_STATE["lex"] = lex


def _extract_one(doc: corpus.AnnotatedDocument) -> tuple[str, str]:
    view = TreeView.build(doc)
    records = relex.extract(view, _WORKER_STATE["table"], _WORKER_STATE["lex"])
    return doc.id, records_mod.serialize(records)


def cmd_extract(args: argparse.Namespace) -> None:
    docs = corpus.load_documents(args.corpus)
    table = semvec.load_embeddings(args.embeddings)
    lex = semvec.load_lexicon(args.lexicon) if args.lexicon else semvec.LexiconConfig()
    workers = max(1, int(args.workers))
    if workers > 1 and len(docs) > 1:
        with multiprocessing.Pool(workers, initializer=_init_worker, initargs=(table, lex)) as pool:
            results = pool.map(_extract_one, docs)
    else:
        _init_worker(table, lex)
        results = [_extract_one(doc) for doc in docs]
    records_mod.save_predictions(results, args.out)
    logger.info("wrote %d predictions to %s", len(results), args.out)


def cmd_evaluate(args: argparse.Namespace) -> None:
    gold = corpus.load_gold(args.gold)
    predictions = records_mod.load_predictions(args.pred)
    cfg = evalkit.EvalConfig(
        mode=args.mode,
        fuzzy_threshold=float(args.threshold),
        strip_separators=not args.keep_separators,
    )
    report = evalkit.evaluate_corpus(gold, predictions, cfg)
    atomic_write_text(args.report, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    if args.breakdown:
        rows = evalkit.score_breakdown(gold, predictions, cfg)
        atomic_write_text(args.breakdown, jsonl_dumps(rows))
    logger.info(
        "evaluated %d examples: accuracy %.4f, precision %.4f, recall %.4f, f1 %.4f",
        len(gold), report.accuracy, report.precision, report.recall, report.f1,
    )


def cmd_prepare(args: argparse.Namespace) -> None:
    gold = corpus.load_gold(args.gold)
    train, test = corpus.split_train_test(gold, float(args.test_fraction), int(args.seed))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus.save_gold(train, out_dir / "train.jsonl")
    corpus.save_gold(test, out_dir / "test.jsonl")
    logger.info("wrote %d train / %d test examples to %s", len(train), len(test), out_dir)
    if args.balanced:
        balanced = corpus.balanced_subset(train, int(args.seed))
        corpus.save_gold(balanced, out_dir / "balanced-train.jsonl")
        logger.info("wrote %d balanced training examples", len(balanced))


def cmd_inspect(args: argparse.Namespace) -> None:
    docs = corpus.load_documents(args.corpus)
    matches = [d for d in docs if d.id == str(args.id)]
    if not matches:
        raise ValueError(f"no document with id {args.id!r} in {args.corpus}")
    doc = matches[0]
    view = TreeView.build(doc)

    print(f"document {doc.id}: {doc.text}")
    print()
    print(f"{'i':>3} {'text':<15} {'lemma':<15} {'pos':<6} {'dep':<10} {'head':>4} {'sent':>4}")
    for tok in doc.tokens:
        print(f"{tok.index:>3} {tok.text:<15} {tok.lemma:<15} {tok.pos:<6} "
              f"{tok.dep:<10} {tok.head:>4} {tok.sentence:>4}")
    print()
    print("tree edges:")
    for tok in doc.tokens:
        if tok.head != tok.index:
            print(f"  {doc.tokens[tok.head].text} ({tok.head}) -{tok.dep}-> {tok.text} ({tok.index})")
        else:
            print(f"  ROOT -> {tok.text} ({tok.index})")
    print()
    print("entities:")
    for span in doc.entities:
        print(f"  [{span.start},{span.end}) {span.label}: {span.text}")
    print("noun chunks:")
    for chunk in doc.noun_chunks:
        print(f"  [{chunk.start},{chunk.end}) root {chunk.root}: {doc.span_text(chunk.start, chunk.end)}")
    print()
    print("heuristic traces:")
    trace: list[str] = []
    relex.relate_money_company(view, trace)
    relex.relate_company_date(view, trace)
    relex.relate_other_pairs(view, trace)
    if trace:
        for line in trace:
            print(f"  {line}")
    else:
        print("  (no heuristic fired)")


_COMMANDS = {
    "extract": cmd_extract,
    "evaluate": cmd_evaluate,
    "prepare": cmd_prepare,
    "inspect": cmd_inspect,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _configure_logging(args.log_level)
        args = _resolve_options(args)
        _COMMANDS[args.subcommand](args)
    except Exception as exc:  # surfaced as a diagnostic plus nonzero exit
        logging.basicConfig(stream=sys.stderr)
        logger.error("%s", exc)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
