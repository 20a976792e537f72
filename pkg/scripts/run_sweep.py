#!/usr/bin/env python3
"""Run the full 7-strategy active-learning sweep on the synthetic language
and print a per-strategy summary of baseline vs final accuracy.

Example:
    python scripts/run_sweep.py --out runs/sweep1
    python scripts/run_sweep.py --out runs/neural \
        --learner-cmd "node neural-adapter/dist/cli.js" --cycles 3
"""

import argparse
import shlex
from pathlib import Path

from almorph.adapter import ExternalLearnerSpec
from almorph.driver import RunConfig, emit_report, run_experiment
from almorph.metrics import aggregate
from almorph.synthlang import SynthConfig, generate


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", required=True, help="report directory")
    ap.add_argument("--stems", type=int, default=200)
    ap.add_argument("--triples", type=int, default=4200)
    ap.add_argument("--data-seed", type=int, default=11)
    ap.add_argument("--master-seed", type=int, default=0)
    ap.add_argument("--seed-size", type=int, default=600)
    ap.add_argument("--test-size", type=int, default=1000)
    ap.add_argument("--batch", type=int, default=250)
    ap.add_argument("--cycles", type=int, default=10)
    ap.add_argument("--seeds", type=int, default=3)
    ap.add_argument("--learner-cmd", default=None, help="external learner command")
    ap.add_argument("--timeout", type=int, default=600)
    args = ap.parse_args()

    data = generate(
        SynthConfig(n_stems=args.stems, n_triples=args.triples, rng_seed=args.data_seed)
    )
    out = Path(args.out)
    learner = None
    work_root = None
    if args.learner_cmd:
        work_root = out / "work"
        learner = ExternalLearnerSpec(
            command=tuple(shlex.split(args.learner_cmd)),
            model_dir=work_root,
            timeout_seconds=args.timeout,
        )
    cfg = RunConfig(
        seed_train_size=args.seed_size,
        test_size=args.test_size,
        batch_k=args.batch,
        cycles=args.cycles,
        n_seeds=args.seeds,
        master_seed=args.master_seed,
        learner=learner,
    )

    timing: dict = {}
    records = run_experiment(cfg, data, work_root=work_root, timing=timing)
    emit_report(records, out)

    last = max(r.cycle_index for r in records)
    print(f"{'strategy':<18} {'baseline':>9} {'final':>9} {'delta':>9}")
    for strategy in dict.fromkeys(r.strategy for r in records):
        base = aggregate(
            [r.accuracy for r in records if r.strategy == strategy and r.cycle_index == 1]
        )
        final = aggregate(
            [r.accuracy for r in records if r.strategy == strategy and r.cycle_index == last]
        )
        print(
            f"{strategy:<18} {base.mean:>9.3f} {final.mean:>9.3f} "
            f"{final.mean - base.mean:>+9.3f}"
        )
    print(
        f"\n{len(records)} records -> {out} "
        f"(learner {timing['learner_seconds']:.1f}s of {timing['total_seconds']:.1f}s)"
    )


if __name__ == "__main__":
    main()
