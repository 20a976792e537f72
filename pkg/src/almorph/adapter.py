"""File/subprocess protocol for plugging external learners into the loop.

An external learner is any executable honoring two invocations:

    CMD train   --train <tsv> --dev <tsv> --model <dir>
    CMD predict --model <dir> --input <tsv> --beam <b> --output <tsv>

Train/dev files are three-column TSV in lemma-tags-form order.  Predict input
is ``example_id \\t lemma \\t tags`` (gold forms are never written there).
The prediction dump is ``example_id \\t lemma \\t tags \\t rank \\t
candidate_form \\t log_likelihood`` with 1-based contiguous ranks per id.
Exit code 0 means success; anything else is a failure.

Floats are serialized with Python's shortest round-trip representation
(at most 17 significant digits), so identical predictions always yield
byte-identical dumps.  Log-likelihoods in (0, 1e-9] are clamped to 0.0 to
absorb renormalization noise from external stacks; larger positive values are
protocol violations.
"""

from __future__ import annotations

import math
import subprocess
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .rulelearner import Hypothesis, PredictionSet

_LL_POSITIVE_SLACK = 1e-9
_LL_ORDER_SLACK = 1e-12


class ProtocolError(ValueError):
    """A prediction dump that violates the wire contract."""


class LearnerError(RuntimeError):
    """An external learner process that failed, timed out, or is missing."""


@dataclass(frozen=True)
class ExternalLearnerSpec:
    command: tuple[str, ...]
    model_dir: Path
    beam: int = 5
    timeout_seconds: int = 600


def format_float(x: float) -> str:
    return repr(float(x))


def format_dump(preds: Iterable[PredictionSet]) -> str:
    lines = []
    for p in preds:
        for rank, h in enumerate(p.hypotheses, start=1):
            lines.append(
                f"{p.example_id}\t{p.lemma}\t{p.tag_key}\t{rank}"
                f"\t{h.form}\t{format_float(h.log_likelihood)}\n"
            )
    return "".join(lines)


def format_predict_input(items: Iterable[tuple[int, str, str]]) -> str:
    """items are (example_id, lemma, tag_key)."""
    return "".join(f"{i}\t{lemma}\t{tags}\n" for i, lemma, tags in items)


def parse_predict_input(text: str) -> list[tuple[int, str, str]]:
    items = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line == "":
            continue
        fields = line.split("\t")
        if len(fields) != 3 or any(f == "" for f in fields):
            raise ProtocolError(f"row {lineno}: malformed predict-input row")
        items.append((int(fields[0]), fields[1], fields[2]))
    return items


def parse_dump(text: str) -> list[PredictionSet]:
    """Parse and validate a prediction dump.

    Enforces: 6 non-empty fields per row, integer id and rank, finite
    non-positive log-likelihoods, no duplicate (id, rank), contiguous 1..n
    ranks per id, consistent lemma/tags per id, distinct candidate forms, and
    log-likelihoods non-increasing with rank.  Violations raise ProtocolError
    carrying the offending row number.
    """
    rows: dict[int, dict[int, tuple[str, float, int]]] = {}
    meta: dict[int, tuple[str, str]] = {}
    id_order: list[int] = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line == "":
            continue
        fields = line.split("\t")
        if len(fields) != 6:
            raise ProtocolError(
                f"row {lineno}: expected 6 tab-separated fields, got {len(fields)}"
            )
        id_s, lemma, tags, rank_s, form, ll_s = fields
        if any(f == "" for f in (id_s, lemma, tags, rank_s, form, ll_s)):
            raise ProtocolError(f"row {lineno}: blank field")
        try:
            example_id = int(id_s)
            rank = int(rank_s)
            ll = float(ll_s)
        except ValueError as exc:
            raise ProtocolError(f"row {lineno}: {exc}") from None
        if rank < 1:
            raise ProtocolError(f"row {lineno}: rank must be >= 1, got {rank}")
        if not math.isfinite(ll):
            raise ProtocolError(f"row {lineno}: non-finite log-likelihood {ll_s}")
        if ll > _LL_POSITIVE_SLACK:
            raise ProtocolError(f"row {lineno}: positive log-likelihood {ll_s}")
        if ll > 0.0:
            ll = 0.0
        if example_id not in rows:
            rows[example_id] = {}
            meta[example_id] = (lemma, tags)
            id_order.append(example_id)
        elif meta[example_id] != (lemma, tags):
            raise ProtocolError(
                f"row {lineno}: lemma/tags mismatch for example id {example_id}"
            )
        if rank in rows[example_id]:
            raise ProtocolError(
                f"row {lineno}: duplicate rank {rank} for example id {example_id}"
            )
        rows[example_id][rank] = (form, ll, lineno)

    preds: list[PredictionSet] = []
    for example_id in id_order:
        by_rank = rows[example_id]
        n = len(by_rank)
        if set(by_rank) != set(range(1, n + 1)):
            raise ProtocolError(
                f"example id {example_id}: ranks are not contiguous 1..{n}: "
                f"{sorted(by_rank)}"
            )
        forms = [by_rank[r][0] for r in range(1, n + 1)]
        if len(set(forms)) != n:
            lineno = by_rank[n][2]
            raise ProtocolError(
                f"row {lineno}: duplicate candidate form for example id {example_id}"
            )
        lls = [by_rank[r][1] for r in range(1, n + 1)]
        for r in range(1, n):
            if lls[r] > lls[r - 1] + _LL_ORDER_SLACK:
                raise ProtocolError(
                    f"row {by_rank[r + 1][2]}: log-likelihood increases with rank "
                    f"for example id {example_id}"
                )
        lemma, tags = meta[example_id]
        preds.append(
            PredictionSet(
                example_id,
                lemma,
                tuple(tags.split(";")),
                tuple(Hypothesis(f, ll) for f, ll in zip(forms, lls)),
            )
        )
    return preds


def _run(argv: list[str], timeout: int) -> None:
    try:
        proc = subprocess.run(
            argv, capture_output=True, text=True, timeout=timeout
        )
    except FileNotFoundError:
        raise LearnerError(f"learner executable not found: {argv[0]}") from None
    except subprocess.TimeoutExpired:
        raise LearnerError(
            f"learner timed out after {timeout}s: {' '.join(argv)}"
        ) from None
    if proc.returncode != 0:
        tail = proc.stderr.strip().splitlines()[-5:]
        raise LearnerError(
            f"learner exited with status {proc.returncode}: "
            + (" | ".join(tail) if tail else "(no diagnostics)")
        )


def external_train(
    spec: ExternalLearnerSpec, train_file: Path, dev_file: Path
) -> None:
    _run(
        [
            *spec.command,
            "train",
            "--train",
            str(train_file),
            "--dev",
            str(dev_file),
            "--model",
            str(spec.model_dir),
        ],
        spec.timeout_seconds,
    )


def external_predict(
    spec: ExternalLearnerSpec,
    input_file: Path,
    output_file: Path | None = None,
) -> list[PredictionSet]:
    """Invoke the learner's predict mode and parse its dump.

    Besides dump validation, checks that the emitted ids are exactly the
    input ids (each exactly once).
    """
    if output_file is None:
        output_file = input_file.with_suffix(".pred.tsv")
    _run(
        [
            *spec.command,
            "predict",
            "--model",
            str(spec.model_dir),
            "--input",
            str(input_file),
            "--beam",
            str(spec.beam),
            "--output",
            str(output_file),
        ],
        spec.timeout_seconds,
    )
    expected = [i for i, _, _ in parse_predict_input(input_file.read_text("utf-8"))]
    preds = parse_dump(output_file.read_text("utf-8"))
    got = [p.example_id for p in preds]
    if sorted(got) != sorted(expected):
        missing = sorted(set(expected) - set(got))
        extra = sorted(set(got) - set(expected))
        raise ProtocolError(
            f"dump ids do not match input ids (missing {missing[:5]}, "
            f"unexpected {extra[:5]})"
        )
    by_id = {p.example_id: p for p in preds}
    return [by_id[i] for i in expected]
