"""The seven pool-sampling strategies as pure selection functions.

Each strategy maps a scored pool to an ordered list of example ids.  The
oracle pair peeks at gold forms (a stand-in for expert feedback); the others
use only beam statistics.  All sorts are stable with a final tie-break on
ascending pool_index, so equal inputs always yield equal output order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Sequence

from .corpus import nfc
from .metrics import levenshtein
from .rng import rng_for
from .rulelearner import PredictionSet


class StrategyError(ValueError):
    pass


class StrategyKind(Enum):
    ORACLE_INCORRECT = "OracleIncorrect"
    ORACLE_CORRECT = "OracleCorrect"
    LOWEST_CONFIDENCE = "LowestConfidence"
    HIGHEST_CONFIDENCE = "HighestConfidence"
    HIGHEST_ENTROPY = "HighestEntropy"
    LOWEST_ENTROPY = "LowestEntropy"
    RANDOM = "Random"

    @classmethod
    def from_name(cls, name: str) -> "StrategyKind":
        for kind in cls:
            if kind.value.lower() == name.lower():
                return kind
        raise StrategyError(
            f"unknown strategy {name!r}; expected one of "
            + ", ".join(k.value for k in cls)
        )


@dataclass(frozen=True)
class SelectionConfig:
    k: int = 250
    entropy_threshold: float = 0.05
    beam: int = 5
    rng_seed: int = 0


class ScoredExample(NamedTuple):
    example_id: int
    prediction: PredictionSet
    pool_index: int
    gold_form: str | None = None  # present only in oracle-enabled pools


def to_distribution(pred: PredictionSet) -> list[float]:
    """Renormalize beam log-likelihoods into probabilities (max-shift softmax)."""
    lls = [h.log_likelihood for h in pred.hypotheses]
    if not lls:
        raise StrategyError("prediction has no hypotheses")
    if any(not math.isfinite(ll) for ll in lls):
        raise StrategyError("non-finite log-likelihood")
    shift = max(lls)
    weights = [math.exp(ll - shift) for ll in lls]
    total = math.fsum(weights)
    return [w / total for w in weights]


def entropy(pred: PredictionSet, tau: float = 0.05) -> float:
    """-sum p ln p over the renormalized probabilities >= tau.

    Thresholding happens after renormalization and drops terms outright (no
    second renormalization), so the thresholded value never exceeds the full
    one.  Open-coded rather than composed from to_distribution: this runs
    once per pool item per cycle and sits on the driver's overhead budget.
    """
    lls = [h.log_likelihood for h in pred.hypotheses]
    if not lls:
        raise StrategyError("prediction has no hypotheses")
    isfinite, exp, log = math.isfinite, math.exp, math.log
    for ll in lls:
        if not isfinite(ll):
            raise StrategyError("non-finite log-likelihood")
    if len(lls) == 1:
        return 0.0  # a point mass has zero entropy regardless of tau
    shift = max(lls)
    weights = [exp(ll - shift) for ll in lls]
    total = math.fsum(weights)
    log_total = log(total)
    h = 0.0
    for w in weights:
        p = w / total
        if p >= tau:
            h -= p * (log(w) - log_total)
    return h + 0.0  # fold -0.0 into 0.0


def confidence(pred: PredictionSet) -> float:
    """Log-likelihood of the top-ranked hypothesis."""
    return pred.hypotheses[0].log_likelihood


def margin(pred: PredictionSet) -> float:
    """Gap between the first and second log-likelihoods; a single-candidate
    beam counts as maximally peaked (+inf)."""
    if len(pred.hypotheses) < 2:
        return math.inf
    return pred.hypotheses[0].log_likelihood - pred.hypotheses[1].log_likelihood


def _top1_correct(example: ScoredExample) -> bool:
    assert example.gold_form is not None
    return nfc(example.prediction.hypotheses[0].form) == nfc(example.gold_form)


def _top1_distance(example: ScoredExample) -> int:
    assert example.gold_form is not None
    return levenshtein(example.prediction.hypotheses[0].form, example.gold_form)


def select(
    kind: StrategyKind, pool: Sequence[ScoredExample], cfg: SelectionConfig
) -> list[int]:
    """Pick min(k, |pool|) example ids in selection-rank order."""
    if cfg.k <= 0:
        raise StrategyError("selection batch size k must be positive")
    if not pool:
        raise StrategyError("cannot select from an empty pool")
    k = min(cfg.k, len(pool))

    if kind is StrategyKind.RANDOM:
        order = list(pool)
        rng_for(cfg.rng_seed).shuffle(order)
        return [e.example_id for e in order[:k]]

    if kind is StrategyKind.LOWEST_CONFIDENCE:
        ranked = sorted(
            pool,
            key=lambda e: (e.prediction.hypotheses[0].log_likelihood, e.pool_index),
        )
    elif kind is StrategyKind.HIGHEST_CONFIDENCE:
        ranked = sorted(
            pool,
            key=lambda e: (-e.prediction.hypotheses[0].log_likelihood, e.pool_index),
        )
    elif kind is StrategyKind.HIGHEST_ENTROPY:
        ranked = sorted(
            pool,
            key=lambda e: (-entropy(e.prediction, cfg.entropy_threshold), e.pool_index),
        )
    elif kind is StrategyKind.LOWEST_ENTROPY:
        ranked = sorted(
            pool,
            key=lambda e: (entropy(e.prediction, cfg.entropy_threshold), e.pool_index),
        )
    else:
        if any(e.gold_form is None for e in pool):
            raise StrategyError(f"{kind.value} requires gold_form on every pool item")
        incorrect = [e for e in pool if not _top1_correct(e)]
        correct = [e for e in pool if _top1_correct(e)]
        if kind is StrategyKind.ORACLE_INCORRECT:
            # Most-damaged wrong predictions first; surplus slots go to the
            # least separated correct ones.
            primary = sorted(incorrect, key=lambda e: (-_top1_distance(e), e.pool_index))
            fill = sorted(correct, key=lambda e: (margin(e.prediction), e.pool_index))
        else:
            # Most peaked correct predictions first; surplus slots go to the
            # widest-gap incorrect ones.
            primary = sorted(correct, key=lambda e: (-margin(e.prediction), e.pool_index))
            fill = sorted(incorrect, key=lambda e: (-margin(e.prediction), e.pool_index))
        ranked = primary + fill

    return [e.example_id for e in ranked[:k]]
