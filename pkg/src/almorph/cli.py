"""Command-line surface: simulate, select, score, pbcc, validate-dump, report.

Exit codes: 0 success, 1 domain error (one-line reason on stderr), 2 usage
error (argparse).  All outputs are machine-first (JSON, CSV, or bare ids);
identical argv implies byte-identical outputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import shlex
import sys
from pathlib import Path

from . import adapter, corpus, driver, metrics, strategies
from .adapter import ExternalLearnerSpec
from .corpus import ColumnOrder
from .driver import RunConfig
from .strategies import ScoredExample, SelectionConfig, StrategyKind

_DOMAIN_ERRORS = (
    corpus.CorpusError,
    metrics.MetricsError,
    strategies.StrategyError,
    adapter.ProtocolError,
    adapter.LearnerError,
    driver.DriverError,
    OSError,
    ValueError,
)


def _positive_int(value: str) -> int:
    n = int(value)
    if n <= 0:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {value}")
    return n


def _column_order(value: str) -> ColumnOrder:
    try:
        return ColumnOrder(value)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown column order {value!r}; use "
            + " or ".join(o.value for o in ColumnOrder)
        ) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="almorph",
        description="Active-learning simulation toolkit for morphological inflection.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the iterated train/predict/select loop")
    p.add_argument("--data", required=True, help="dataset TSV file")
    p.add_argument(
        "--data-order",
        type=_column_order,
        default=ColumnOrder.LEMMA_FORM_TAGS,
        help="column order of --data (default lemma-form-tags)",
    )
    p.add_argument(
        "--strategy",
        default="all",
        help="one of the seven strategy names (case-insensitive) or 'all'",
    )
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--seed-size", type=_positive_int, default=600)
    p.add_argument("--dev-size", type=int, default=0)
    p.add_argument("--test-size", type=_positive_int, default=1000)
    p.add_argument("--batch", type=_positive_int, default=250)
    p.add_argument("--cycles", type=_positive_int, default=10)
    p.add_argument("--beam", type=_positive_int, default=5)
    p.add_argument("--tau", type=float, default=0.05)
    p.add_argument("--seeds", type=_positive_int, default=3)
    p.add_argument("--learner", choices=["builtin"], default="builtin")
    p.add_argument(
        "--learner-cmd",
        default=None,
        help="external learner command line (overrides --learner)",
    )
    p.add_argument("--timeout", type=_positive_int, default=600)
    p.add_argument("--out", required=True, help="report output directory")
    p.add_argument("--pool-from-test", action="store_true")
    p.add_argument("--jobs", type=_positive_int, default=1, help="reserved; runs are sequential")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("select", help="one-shot selection over a prediction dump")
    p.add_argument("--dump", required=True)
    p.add_argument("--gold", default=None, help="gold TSV (required for oracle strategies)")
    p.add_argument(
        "--gold-order", type=_column_order, default=ColumnOrder.LEMMA_TAGS_FORM
    )
    p.add_argument("--strategy", required=True)
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--tau", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_select)

    p = sub.add_parser("score", help="exact-match accuracy of a prediction dump")
    p.add_argument("--dump", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument(
        "--gold-order", type=_column_order, default=ColumnOrder.LEMMA_TAGS_FORM
    )
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("pbcc", help="confidence/correctness point-biserial correlation")
    p.add_argument("--dump", required=True)
    p.add_argument("--gold", required=True)
    p.add_argument(
        "--gold-order", type=_column_order, default=ColumnOrder.LEMMA_TAGS_FORM
    )
    p.set_defaults(func=_cmd_pbcc)

    p = sub.add_parser("validate-dump", help="check a dump for protocol conformance")
    p.add_argument("--dump", required=True)
    p.set_defaults(func=_cmd_validate_dump)

    p = sub.add_parser("report", help="re-emit summaries from a records file")
    p.add_argument("--records", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_report)

    return parser


def _load_gold(path: str, order: ColumnOrder) -> dict[int, str]:
    dataset = corpus.parse_unimorph(Path(path).read_text("utf-8"), order)
    return dataset.gold()


def _cmd_simulate(args: argparse.Namespace) -> int:
    data = corpus.parse_unimorph(Path(args.data).read_text("utf-8"), args.data_order)
    if args.strategy.lower() == "all":
        kinds = driver.ALL_STRATEGIES
    else:
        kinds = (StrategyKind.from_name(args.strategy),)
    out_dir = Path(args.out)
    learner_spec = None
    work_root = None
    if args.learner_cmd:
        work_root = out_dir / "work"
        learner_spec = ExternalLearnerSpec(
            command=tuple(shlex.split(args.learner_cmd)),
            model_dir=work_root,  # per-cycle dirs are derived by the driver
            beam=args.beam,
            timeout_seconds=args.timeout,
        )
    cfg = RunConfig(
        strategies=kinds,
        seed_train_size=args.seed_size,
        dev_size=args.dev_size,
        test_size=args.test_size,
        batch_k=args.batch,
        cycles=args.cycles,
        beam=args.beam,
        entropy_threshold=args.tau,
        n_seeds=args.seeds,
        master_seed=args.seed,
        learner=learner_spec,
        pool_from_test=args.pool_from_test,
    )
    timing: dict = {}
    records = driver.run_experiment(cfg, data, work_root=work_root, timing=timing)
    driver.emit_report(records, out_dir)
    if args.verbose:
        print(
            f"wrote {len(records)} records to {out_dir} "
            f"(learner {timing['learner_seconds']:.2f}s "
            f"of {timing['total_seconds']:.2f}s total)",
            file=sys.stderr,
        )
    return 0


def _scored_pool(
    dump_path: str, gold: dict[int, str] | None, need_gold: bool
) -> list[ScoredExample]:
    preds = adapter.parse_dump(Path(dump_path).read_text("utf-8"))
    pool = []
    for idx, p in enumerate(preds):
        gold_form = None
        if gold is not None:
            if p.example_id not in gold and need_gold:
                raise strategies.StrategyError(
                    f"no gold form for example id {p.example_id}"
                )
            gold_form = gold.get(p.example_id)
        pool.append(ScoredExample(p.example_id, p, pool_index=idx, gold_form=gold_form))
    return pool


def _cmd_select(args: argparse.Namespace) -> int:
    kind = StrategyKind.from_name(args.strategy)
    oracle = kind in (StrategyKind.ORACLE_INCORRECT, StrategyKind.ORACLE_CORRECT)
    gold = _load_gold(args.gold, args.gold_order) if args.gold else None
    if oracle and gold is None:
        raise strategies.StrategyError(f"{kind.value} requires --gold")
    pool = _scored_pool(args.dump, gold, need_gold=oracle)
    cfg = SelectionConfig(k=args.k, entropy_threshold=args.tau, rng_seed=args.seed)
    for example_id in strategies.select(kind, pool, cfg):
        print(example_id)
    return 0


def _dump_with_gold(args: argparse.Namespace):
    gold = _load_gold(args.gold, args.gold_order)
    preds = adapter.parse_dump(Path(args.dump).read_text("utf-8"))
    return preds, gold


def _cmd_score(args: argparse.Namespace) -> int:
    preds, gold = _dump_with_gold(args)
    acc = metrics.accuracy(preds, gold)
    print(json.dumps({"accuracy": acc, "n": len(preds)}))
    return 0


def _cmd_pbcc(args: argparse.Namespace) -> int:
    preds, gold = _dump_with_gold(args)
    scores = [strategies.confidence(p) for p in preds]
    correct = [
        corpus.nfc(p.hypotheses[0].form) == corpus.nfc(gold[p.example_id])
        for p in preds
    ]
    result = metrics.pbcc(scores, correct)
    print(json.dumps(dataclasses.asdict(result)))
    return 0


def _cmd_validate_dump(args: argparse.Namespace) -> int:
    preds = adapter.parse_dump(Path(args.dump).read_text("utf-8"))
    print(
        json.dumps(
            {
                "ok": True,
                "n_examples": len(preds),
                "n_hypotheses": sum(len(p.hypotheses) for p in preds),
            }
        )
    )
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    records = driver.load_records(Path(args.records))
    driver.emit_report(records, Path(args.out))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
