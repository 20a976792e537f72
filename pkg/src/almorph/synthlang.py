"""Deterministic synthetic agglutinative language for desk-scale experiments.

Verbs inflect for tense x person x number x polarity (48 tag bundles).  The
surface form is a mutated stem followed by a fixed suffix chain:

    form = mutate(stem) + TENSE + PERSON + NUMBER + POLARITY

Consonant-final stems attach suffixes without any stem change; vowel-final
stems replace their final vowel (a->o, e->a, i->u, o->e, u->i) before
suffixation.  The final-vowel alternation is exactly the kind of cue an
affix-rule learner can acquire per (final character, bundle) cell, so errors
concentrate where those cells are unattested and shrink as labels arrive,
while consonant-final forms are learnable from the generic pattern alone.
Everything is derived from the config seed; equal configs yield equal data.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import Dataset, Triple
from .rng import rng_for

_ONSETS = "ptkbdgmnsrl"
_VOWELS = "aeiou"
_FINAL_CONSONANTS = "tknrs"
_VOWEL_MUTATION = {"a": "o", "e": "a", "i": "u", "o": "e", "u": "i"}

_TENSES = (("PRS", ""), ("PST", "da"), ("FUT", "ro"), ("IPFV", "sa"))
_PERSONS = (("1", "mi"), ("2", "ki"), ("3", "ni"))
_NUMBERS = (("SG", ""), ("PL", "tu"))
_POLARITIES = (("POS", ""), ("NEG", "ba"))


@dataclass(frozen=True)
class SynthConfig:
    n_stems: int = 120
    n_triples: int = 2400
    rng_seed: int = 7
    vowel_final_share: float = 0.5
    source_label: str = "synthetic-agglutinative"


def tag_bundles() -> list[tuple[tuple[str, ...], str]]:
    """All 48 (tags, suffix-chain) pairs in a fixed order."""
    bundles = []
    for t_tag, t_suf in _TENSES:
        for p_tag, p_suf in _PERSONS:
            for n_tag, n_suf in _NUMBERS:
                for pol_tag, pol_suf in _POLARITIES:
                    bundles.append(
                        (
                            ("V", t_tag, p_tag, n_tag, pol_tag),
                            t_suf + p_suf + n_suf + pol_suf,
                        )
                    )
    return bundles


def inflect(stem: str, suffix: str) -> str:
    final = stem[-1]
    if final in _VOWEL_MUTATION:
        return stem[:-1] + _VOWEL_MUTATION[final] + suffix
    return stem + suffix


def _make_stems(cfg: SynthConfig) -> list[str]:
    rng = rng_for(cfg.rng_seed, 1)
    stems: list[str] = []
    seen: set[str] = set()
    n_vowel_final = round(cfg.n_stems * cfg.vowel_final_share)
    while len(stems) < cfg.n_stems:
        vowel_final = len(stems) < n_vowel_final
        syllables = rng.randint(2, 3)
        stem = "".join(
            rng.choice(_ONSETS) + rng.choice(_VOWELS) for _ in range(syllables)
        )
        if not vowel_final:
            stem += rng.choice(_FINAL_CONSONANTS)
        if stem not in seen:
            seen.add(stem)
            stems.append(stem)
    return stems


def generate(cfg: SynthConfig = SynthConfig()) -> Dataset:
    """Sample n_triples distinct (stem, bundle) cells and inflect them."""
    bundles = tag_bundles()
    stems = _make_stems(cfg)
    n_cells = len(stems) * len(bundles)
    if cfg.n_triples > n_cells:
        raise ValueError(
            f"requested {cfg.n_triples} triples but only {n_cells} distinct "
            f"(stem, bundle) cells exist; raise n_stems"
        )
    rng = rng_for(cfg.rng_seed, 2)
    cells = rng.sample(range(n_cells), cfg.n_triples)
    triples = []
    for i, cell in enumerate(cells):
        stem = stems[cell // len(bundles)]
        tags, suffix = bundles[cell % len(bundles)]
        triples.append(Triple(i, stem, tags, inflect(stem, suffix)))
    return Dataset(triples, cfg.source_label)
