"""Evaluation statistics: edit distance, exact-match accuracy, point-biserial
correlation with p-value, and multi-run aggregation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from statistics import fmean, stdev
from typing import Iterable, Mapping, Sequence

from scipy.stats import t as _student_t

from .corpus import nfc
from .rulelearner import PredictionSet


class MetricsError(ValueError):
    pass


@dataclass(frozen=True)
class CorrelationResult:
    r: float
    p_value: float
    n: int
    n_correct: int
    n_incorrect: int


@dataclass(frozen=True)
class Aggregate:
    mean: float
    std: float  # sample (n-1) standard deviation; 0 for a single run
    n_runs: int


@lru_cache(maxsize=1 << 18)
def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance over NFC-normalized Unicode scalar sequences."""
    a, b = nfc(a), nfc(b)
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, cb in enumerate(b, start=1):
            cur[j] = min(
                prev[j] + 1,
                cur[j - 1] + 1,
                prev[j - 1] + (ca != cb),
            )
        prev = cur
    return prev[len(b)]


def accuracy(preds: Sequence[PredictionSet], gold: Mapping[int, str]) -> float:
    """Fraction of examples whose top-ranked form equals gold exactly (NFC)."""
    if not preds:
        raise MetricsError("accuracy of an empty prediction list is undefined")
    hits = 0
    for p in preds:
        if p.example_id not in gold:
            raise MetricsError(f"no gold form for example id {p.example_id}")
        hits += nfc(p.hypotheses[0].form) == nfc(gold[p.example_id])
    return hits / len(preds)


def pbcc(scores: Sequence[float], correct: Sequence[bool]) -> CorrelationResult:
    """Point-biserial correlation between scores and a correctness coding.

    r = (M1 - M0) / s_n * sqrt(n1 * n0 / n^2) with s_n the population standard
    deviation of all scores, which is identical to the Pearson correlation of
    the scores against 0/1-coded correctness.  The two-sided p-value comes
    from Student's t with n-2 degrees of freedom (t = r*sqrt(n-2)/sqrt(1-r^2));
    |r| = 1 maps to p = 0 by convention.
    """
    n = len(scores)
    if len(correct) != n:
        raise MetricsError("scores and correctness lists differ in length")
    if n < 3:
        raise MetricsError(f"need at least 3 observations, got {n}")
    if any(not math.isfinite(s) for s in scores):
        raise MetricsError("non-finite score")
    n1 = sum(bool(c) for c in correct)
    n0 = n - n1
    if n1 == 0 or n0 == 0:
        raise MetricsError("correctness is constant: need both groups non-empty")
    mean_all = math.fsum(scores) / n
    var_pop = math.fsum((s - mean_all) ** 2 for s in scores) / n
    if var_pop == 0:
        raise MetricsError("score variance is zero")
    m1 = math.fsum(s for s, c in zip(scores, correct) if c) / n1
    m0 = math.fsum(s for s, c in zip(scores, correct) if not c) / n0
    r = (m1 - m0) / math.sqrt(var_pop) * math.sqrt(n1 * n0 / n**2)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        p = 0.0
    else:
        t_stat = r * math.sqrt((n - 2) / (1.0 - r * r))
        p = min(1.0, 2.0 * float(_student_t.sf(abs(t_stat), n - 2)))
    return CorrelationResult(r=r, p_value=p, n=n, n_correct=n1, n_incorrect=n0)


def aggregate(values: Iterable[float]) -> Aggregate:
    """Mean and sample standard deviation across seed runs."""
    vals = list(values)
    if not vals:
        raise MetricsError("cannot aggregate an empty value list")
    return Aggregate(
        mean=fmean(vals),
        std=stdev(vals) if len(vals) > 1 else 0.0,
        n_runs=len(vals),
    )
