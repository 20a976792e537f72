"""Iterated active-learning experiment loop.

One run = (strategy, seed).  Each cycle retrains the learner from scratch on
the current train set, evaluates on the held-out test set, scores the pool,
selects a batch with the run's strategy, and reveals the selected gold labels
by moving them into the train set.  All runs for a given seed start from the
same initial split, so cycle 1 is a shared baseline and strategies differ only
in what they select.  Per-run PRNGs are derived by mixing (master_seed,
seed_index, strategy ordinal), making runs order-independent: re-running any
single run in isolation reproduces its records from a full sweep.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import adapter, corpus, metrics, rulelearner
from .adapter import ExternalLearnerSpec
from .corpus import ColumnOrder, Dataset, SplitSpec, Triple
from .rng import mix
from .rulelearner import PredictionSet
from .strategies import (
    ScoredExample,
    SelectionConfig,
    StrategyKind,
    confidence,
    select,
)

ALL_STRATEGIES: tuple[StrategyKind, ...] = tuple(StrategyKind)


def strategy_ordinal(kind: StrategyKind) -> int:
    return ALL_STRATEGIES.index(kind)


@dataclass(frozen=True)
class RunConfig:
    strategies: tuple[StrategyKind, ...] = ALL_STRATEGIES
    seed_train_size: int = 600
    dev_size: int = 0
    test_size: int = 1000
    batch_k: int = 250
    cycles: int = 10
    beam: int = 5
    entropy_threshold: float = 0.05
    n_seeds: int = 3
    master_seed: int = 0
    learner: ExternalLearnerSpec | None = None  # None selects the builtin learner
    pool_from_test: bool = False


@dataclass(frozen=True)
class CycleRecord:
    strategy: str
    seed_index: int
    cycle_index: int
    train_size: int
    accuracy: float
    pbcc_r: float | None
    pbcc_p: float | None
    selected_ids: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "seed_index": self.seed_index,
            "cycle_index": self.cycle_index,
            "train_size": self.train_size,
            "accuracy": self.accuracy,
            "pbcc_r": self.pbcc_r,
            "pbcc_p": self.pbcc_p,
            "selected_ids": list(self.selected_ids),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CycleRecord":
        return cls(
            strategy=d["strategy"],
            seed_index=d["seed_index"],
            cycle_index=d["cycle_index"],
            train_size=d["train_size"],
            accuracy=d["accuracy"],
            pbcc_r=d["pbcc_r"],
            pbcc_p=d["pbcc_p"],
            selected_ids=tuple(d["selected_ids"]),
        )


class DriverError(RuntimeError):
    pass


class _BuiltinLearner:
    def fit(self, train: Sequence[Triple], dev: Sequence[Triple], work_dir: Path | None) -> None:
        self._model = rulelearner.train(train)

    def predict_many(
        self,
        items: Sequence[tuple[int, str, tuple[str, ...]]],
        beam: int,
        work_dir: Path | None,
        tag: str,
    ) -> list[PredictionSet]:
        return [
            rulelearner.predict(self._model, lemma, tags, beam, example_id=i)
            for i, lemma, tags in items
        ]


class _SubprocessLearner:
    """Adapter-protocol learner; every cycle gets its own model directory."""

    def __init__(self, spec: ExternalLearnerSpec):
        self._spec = spec

    def fit(self, train: Sequence[Triple], dev: Sequence[Triple], work_dir: Path | None) -> None:
        if work_dir is None:
            raise DriverError("subprocess learner requires a work directory")
        work_dir.mkdir(parents=True, exist_ok=True)
        self._model_dir = work_dir / "model"
        train_file = work_dir / "train.tsv"
        dev_file = work_dir / "dev.tsv"
        train_file.write_text(
            corpus.serialize(Dataset(_reindexed(train)), ColumnOrder.LEMMA_TAGS_FORM),
            "utf-8",
        )
        dev_file.write_text(
            corpus.serialize(Dataset(_reindexed(dev)), ColumnOrder.LEMMA_TAGS_FORM),
            "utf-8",
        )
        spec = self._spec
        adapter.external_train(
            ExternalLearnerSpec(spec.command, self._model_dir, spec.beam, spec.timeout_seconds),
            train_file,
            dev_file,
        )

    def predict_many(
        self,
        items: Sequence[tuple[int, str, tuple[str, ...]]],
        beam: int,
        work_dir: Path | None,
        tag: str,
    ) -> list[PredictionSet]:
        assert work_dir is not None
        input_file = work_dir / f"{tag}.input.tsv"
        input_file.write_text(
            adapter.format_predict_input(
                (i, lemma, ";".join(tags)) for i, lemma, tags in items
            ),
            "utf-8",
        )
        spec = self._spec
        return adapter.external_predict(
            ExternalLearnerSpec(spec.command, self._model_dir, beam, spec.timeout_seconds),
            input_file,
            work_dir / f"{tag}.dump.tsv",
        )


def _reindexed(triples: Sequence[Triple]) -> list[Triple]:
    # Dataset requires unique ids starting wherever; keep original ids (they
    # are unique within one experiment) so files stay traceable.
    return list(triples)


def _make_learner(cfg: RunConfig):
    if cfg.learner is None:
        return _BuiltinLearner()
    return _SubprocessLearner(cfg.learner)


@dataclass
class _Baseline:
    """Cycle-1 artifacts shared by every strategy of one seed."""

    accuracy: float
    pbcc_r: float | None
    pbcc_p: float | None
    pool_preds: list[PredictionSet]


@dataclass
class _Timing:
    learner_seconds: float = 0.0
    total_seconds: float = 0.0


def _evaluate(
    test_preds: Sequence[PredictionSet], gold: dict[int, str]
) -> tuple[float, float | None, float | None]:
    nfc = corpus.nfc
    scores = [confidence(p) for p in test_preds]
    correct = []
    for p in test_preds:
        form = p.hypotheses[0].form
        g = gold[p.example_id]
        # plain equality short-circuits the (already fast-pathed) NFC check
        correct.append(form == g or nfc(form) == nfc(g))
    acc = sum(correct) / len(correct)
    try:
        res = metrics.pbcc(scores, correct)
        return acc, res.r, res.p_value
    except metrics.MetricsError:
        return acc, None, None


def run_experiment(
    cfg: RunConfig,
    data: Dataset,
    work_root: Path | None = None,
    timing: dict | None = None,
) -> list[CycleRecord]:
    """Run every (strategy, seed) combination and return all cycle records,
    sorted by (strategy order, seed, cycle).

    `work_root` is where subprocess-learner files go (required for external
    learners, ignored for the builtin).  `timing`, when given, is filled with
    'learner_seconds' and 'total_seconds' so orchestration overhead can be
    separated from learner time.
    """
    if cfg.cycles < 1 or cfg.batch_k < 1 or cfg.n_seeds < 1 or not cfg.strategies:
        raise DriverError("cycles, batch_k, n_seeds must be >= 1 and strategies non-empty")
    t_start = time.perf_counter()
    tm = _Timing()
    records: list[CycleRecord] = []
    for seed_index in range(cfg.n_seeds):
        split_seed = mix(cfg.master_seed, seed_index)
        train0, dev0, test0, pool0 = corpus.split(
            data,
            SplitSpec(cfg.seed_train_size, cfg.dev_size, cfg.test_size, split_seed),
        )
        baseline_cache: dict[str, _Baseline] = {}
        for strategy in cfg.strategies:
            records.extend(
                _run_one(
                    cfg,
                    data,
                    strategy,
                    seed_index,
                    train0,
                    dev0,
                    test0,
                    pool0,
                    baseline_cache,
                    work_root,
                    tm,
                )
            )
    records.sort(
        key=lambda r: (
            strategy_ordinal(StrategyKind.from_name(r.strategy)),
            r.seed_index,
            r.cycle_index,
        )
    )
    tm.total_seconds = time.perf_counter() - t_start
    if timing is not None:
        timing["learner_seconds"] = tm.learner_seconds
        timing["total_seconds"] = tm.total_seconds
    return records


def _run_one(
    cfg: RunConfig,
    data: Dataset,
    strategy: StrategyKind,
    seed_index: int,
    train0: list[int],
    dev0: list[int],
    test0: list[int],
    pool0: list[int],
    baseline_cache: dict[str, _Baseline],
    work_root: Path | None,
    tm: _Timing,
) -> list[CycleRecord]:
    run_seed = mix(cfg.master_seed, seed_index, strategy_ordinal(strategy))
    learner = _make_learner(cfg)
    gold = data.gold()
    oracle = strategy in (StrategyKind.ORACLE_INCORRECT, StrategyKind.ORACLE_CORRECT)

    train_ids = list(train0)
    test_ids = list(test0)
    pool_ids = list(test0) if cfg.pool_from_test else list(pool0)
    dev_triples = [data.by_id(i) for i in dev0]
    items = {
        i: (i, data.by_id(i).lemma, data.by_id(i).tags)
        for i in (*test0, *pool_ids)
    }

    records: list[CycleRecord] = []
    for cycle in range(1, cfg.cycles + 1):
        train_size = len(train_ids)
        cycle_dir = (
            None
            if work_root is None
            else Path(work_root) / f"{strategy.value}_seed{seed_index}" / f"cycle{cycle}"
        )
        use_cached = cycle == 1 and "baseline" in baseline_cache
        if use_cached:
            cached = baseline_cache["baseline"]
            acc, r, p = cached.accuracy, cached.pbcc_r, cached.pbcc_p
            pool_preds = cached.pool_preds
        else:
            t0 = time.perf_counter()
            learner.fit([data.by_id(i) for i in train_ids], dev_triples, cycle_dir)
            test_items = [items[i] for i in test_ids]
            test_preds = learner.predict_many(test_items, cfg.beam, cycle_dir, "test")
            tm.learner_seconds += time.perf_counter() - t0
            acc, r, p = _evaluate(test_preds, gold)
            pool_preds = []
            if cycle < cfg.cycles and pool_ids:
                if cfg.pool_from_test:
                    pool_preds = test_preds
                else:
                    pool_items = [items[i] for i in pool_ids]
                    t0 = time.perf_counter()
                    pool_preds = learner.predict_many(
                        pool_items, cfg.beam, cycle_dir, "pool"
                    )
                    tm.learner_seconds += time.perf_counter() - t0
            if cycle == 1:
                baseline_cache["baseline"] = _Baseline(acc, r, p, pool_preds)

        selected: tuple[int, ...] = ()
        if cycle < cfg.cycles and pool_ids:
            # predict_many returns predictions in input order (external_predict
            # enforces this for subprocess learners), so ids and preds zip up
            if oracle:
                scored = [
                    ScoredExample(i, pr, idx, gold[i])
                    for idx, (i, pr) in enumerate(zip(pool_ids, pool_preds))
                ]
            else:
                scored = [
                    ScoredExample(i, pr, idx)
                    for idx, (i, pr) in enumerate(zip(pool_ids, pool_preds))
                ]
            sel_cfg = SelectionConfig(
                k=cfg.batch_k,
                entropy_threshold=cfg.entropy_threshold,
                beam=cfg.beam,
                rng_seed=mix(run_seed, cycle),
            )
            selected = tuple(select(strategy, scored, sel_cfg))
            chosen = set(selected)
            train_ids.extend(selected)
            pool_ids = [i for i in pool_ids if i not in chosen]
            if cfg.pool_from_test:
                test_ids = [i for i in test_ids if i not in chosen]

        records.append(
            CycleRecord(
                strategy=strategy.value,
                seed_index=seed_index,
                cycle_index=cycle,
                train_size=train_size,
                accuracy=acc,
                pbcc_r=r,
                pbcc_p=p,
                selected_ids=selected,
            )
        )
        if cycle < cfg.cycles and not pool_ids and not selected:
            break  # pool exhausted before this cycle could select anything
    return records


def emit_report(records: Sequence[CycleRecord], out_dir: Path) -> None:
    """Write records.jsonl, summary.csv, and deltas.csv (UTF-8, LF).

    summary.csv aggregates accuracy across seeds per (strategy, cycle);
    deltas.csv reports each strategy's mean accuracy change from its cycle-1
    baseline to its final recorded cycle.
    """
    if not records:
        raise DriverError("no records to report")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    with open(out_dir / "records.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), ensure_ascii=False) + "\n")

    by_cell: dict[tuple[str, int], list[CycleRecord]] = {}
    strategy_order: list[str] = []
    for rec in records:
        if rec.strategy not in strategy_order:
            strategy_order.append(rec.strategy)
        by_cell.setdefault((rec.strategy, rec.cycle_index), []).append(rec)

    lines = ["strategy,cycle,train_size,accuracy_mean,accuracy_std,n_seeds\n"]
    for strategy in strategy_order:
        cycles = sorted(c for (s, c) in by_cell if s == strategy)
        for cycle in cycles:
            cell = by_cell[(strategy, cycle)]
            agg = metrics.aggregate([r.accuracy for r in cell])
            lines.append(
                f"{strategy},{cycle},{cell[0].train_size},"
                f"{agg.mean!r},{agg.std!r},{agg.n_runs}\n"
            )
    (out_dir / "summary.csv").write_text("".join(lines), "utf-8", newline="\n")

    lines = ["strategy,baseline_mean,final_mean,delta_mean\n"]
    for strategy in strategy_order:
        cycles = sorted(c for (s, c) in by_cell if s == strategy)
        base = metrics.aggregate(
            [r.accuracy for r in by_cell[(strategy, cycles[0])]]
        ).mean
        final = metrics.aggregate(
            [r.accuracy for r in by_cell[(strategy, cycles[-1])]]
        ).mean
        lines.append(f"{strategy},{base!r},{final!r},{final - base!r}\n")
    (out_dir / "deltas.csv").write_text("".join(lines), "utf-8", newline="\n")


def load_records(path: Path) -> list[CycleRecord]:
    records = []
    for line in Path(path).read_text("utf-8").split("\n"):
        if line:
            records.append(CycleRecord.from_dict(json.loads(line)))
    return records
