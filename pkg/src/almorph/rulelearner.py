"""Built-in inflection learner: frequency-weighted affix-replacement rules.

Training decomposes each (lemma, form) pair around their longest common
substring and stores the four affixes as a rule under the exact tag bundle.
Prediction applies every matching rule for the bundle, scores candidates by
count weighted with 2^(matched affix length) so more specific rules dominate,
and normalizes scores into probabilities.  No tag backoff: an unseen bundle
falls back to echoing the lemma with probability 1.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Sequence

from .corpus import Triple


class Affixes(NamedTuple):
    lemma_prefix: str
    form_prefix: str
    lemma_suffix: str
    form_suffix: str


@dataclass(frozen=True)
class Rule:
    tag_key: str
    lemma_prefix: str
    form_prefix: str
    lemma_suffix: str
    form_suffix: str
    count: int


@dataclass(frozen=True)
class RuleModel:
    rules: dict[str, tuple[Rule, ...]]
    trained_size: int


@dataclass(frozen=True)
class Hypothesis:
    form: str
    log_likelihood: float  # natural log of a probability in (0, 1]


@dataclass(frozen=True)
class PredictionSet:
    """Ranked beam for one input: log-likelihood non-increasing, forms distinct,
    ties broken lexicographically by form."""

    example_id: int
    lemma: str
    tags: tuple[str, ...]
    hypotheses: tuple[Hypothesis, ...]

    @property
    def tag_key(self) -> str:
        return ";".join(self.tags)


def _longest_common_substring(a: str, b: str) -> tuple[int, int, int]:
    """(start_a, start_b, length) of the longest common contiguous substring.

    Ties go to the leftmost occurrence in `a`, then the leftmost in `b`.
    """
    best_len, best_i, best_j = 0, 0, 0
    prev = [0] * (len(b) + 1)
    for i, ca in enumerate(a):
        cur = [0] * (len(b) + 1)
        for j, cb in enumerate(b):
            if ca == cb:
                length = prev[j] + 1
                cur[j + 1] = length
                si, sj = i - length + 1, j - length + 1
                if length > best_len or (
                    length == best_len and (si, sj) < (best_i, best_j)
                ):
                    best_len, best_i, best_j = length, si, sj
        prev = cur
    return best_i, best_j, best_len


@lru_cache(maxsize=1 << 18)
def extract_rule(lemma: str, form: str) -> Affixes:
    """Decompose lemma = p·S·s and form = P·S·F around the longest common
    substring S; an empty S makes the whole strings the prefixes."""
    if not lemma or not form:
        raise ValueError("lemma and form must be non-empty")
    i, j, length = _longest_common_substring(lemma, form)
    if length == 0:
        return Affixes(lemma, form, "", "")
    return Affixes(lemma[:i], form[:j], lemma[i + length :], form[j + length :])


def train(triples: Sequence[Triple]) -> RuleModel:
    """Aggregate affix rules per tag bundle; identical rules sum their counts."""
    if not triples:
        raise ValueError("cannot train on an empty triple list")
    counts: dict[str, Counter[Affixes]] = defaultdict(Counter)
    for t in triples:
        counts[t.tag_key][extract_rule(t.lemma, t.form)] += 1
    rules = {
        key: tuple(
            Rule(key, *affixes, count=c) for affixes, c in sorted(bundle.items())
        )
        for key, bundle in sorted(counts.items())
    }
    return RuleModel(rules=rules, trained_size=len(triples))


def predict(
    model: RuleModel,
    lemma: str,
    tags: Sequence[str],
    beam: int,
    example_id: int = -1,
) -> PredictionSet:
    """Score all candidate forms for (lemma, tags) and keep the top `beam`.

    A rule matches when its lemma affixes are a non-overlapping prefix/suffix
    of the lemma.  Log-likelihoods are taken over the full candidate set
    before truncation, so shrinking the beam never inflates confidence.
    """
    if beam < 1:
        raise ValueError("beam must be >= 1")
    key = ";".join(tags)
    scores: dict[str, float] = {}
    for r in model.rules.get(key, ()):
        np_, ns = len(r.lemma_prefix), len(r.lemma_suffix)
        if (
            np_ + ns <= len(lemma)
            and lemma.startswith(r.lemma_prefix)
            and lemma.endswith(r.lemma_suffix)
        ):
            candidate = r.form_prefix + lemma[np_ : len(lemma) - ns] + r.form_suffix
            scores[candidate] = scores.get(candidate, 0.0) + r.count * (
                2.0 ** (np_ + ns)
            )
    if not scores:
        hyps: tuple[Hypothesis, ...] = (Hypothesis(lemma, 0.0),)
    else:
        total = math.fsum(scores.values())
        ranked = sorted(
            (Hypothesis(f, math.log(s / total)) for f, s in scores.items()),
            key=lambda h: (-h.log_likelihood, h.form),
        )
        hyps = tuple(ranked[:beam])
    return PredictionSet(example_id, lemma, tuple(tags), hyps)
