"""Expose the built-in rule learner through the external-learner protocol.

Running ``python -m almorph.builtin_adapter train/predict ...`` makes the
in-process learner usable as a subprocess, which is how the protocol plumbing
gets exercised against a learner whose answers are known exactly.  The model
directory holds a canonical copy of the training file plus a small manifest;
predict retrains from it (training is cheap and deterministic).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import adapter, corpus, rulelearner

_MANIFEST = "manifest.json"
_TRAIN_COPY = "train.tsv"


def _cmd_train(args: argparse.Namespace) -> int:
    text = Path(args.train).read_text("utf-8")
    dataset = corpus.parse_unimorph(text, corpus.ColumnOrder.LEMMA_TAGS_FORM)
    if len(dataset) == 0:
        print("error: training file has no triples", file=sys.stderr)
        return 1
    model_dir = Path(args.model)
    model_dir.mkdir(parents=True, exist_ok=True)
    # Re-serialize rather than copying bytes so the stored file is canonical.
    (model_dir / _TRAIN_COPY).write_text(
        corpus.serialize(dataset, corpus.ColumnOrder.LEMMA_TAGS_FORM), "utf-8"
    )
    (model_dir / _MANIFEST).write_text(
        json.dumps({"learner": "builtin-rules", "trained_size": len(dataset)}) + "\n",
        "utf-8",
    )
    return 0


def _cmd_predict(args: argparse.Namespace) -> int:
    model_dir = Path(args.model)
    train_copy = model_dir / _TRAIN_COPY
    if not train_copy.exists():
        print(f"error: {model_dir} does not contain a trained model", file=sys.stderr)
        return 1
    dataset = corpus.parse_unimorph(
        train_copy.read_text("utf-8"), corpus.ColumnOrder.LEMMA_TAGS_FORM
    )
    model = rulelearner.train(dataset.triples)
    items = adapter.parse_predict_input(Path(args.input).read_text("utf-8"))
    preds = [
        rulelearner.predict(
            model, lemma, tuple(tags.split(";")), args.beam, example_id=i
        )
        for i, lemma, tags in items
    ]
    Path(args.output).write_text(adapter.format_dump(preds), "utf-8")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="almorph.builtin_adapter")
    sub = parser.add_subparsers(dest="mode", required=True)

    p_train = sub.add_parser("train")
    p_train.add_argument("--train", required=True)
    p_train.add_argument("--dev", required=True)  # accepted, unused by this learner
    p_train.add_argument("--model", required=True)
    p_train.set_defaults(func=_cmd_train)

    p_pred = sub.add_parser("predict")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--input", required=True)
    p_pred.add_argument("--beam", type=int, required=True)
    p_pred.add_argument("--output", required=True)
    p_pred.set_defaults(func=_cmd_predict)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (corpus.CorpusError, adapter.ProtocolError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
