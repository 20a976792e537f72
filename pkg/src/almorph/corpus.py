"""Canonical data model for inflection triples plus TSV parsing/splitting.

A dataset is an ordered list of ⟨lemma, tag bundle, form⟩ triples with stable
ids assigned by input order.  Files are UTF-8, LF, three tab-separated columns
with ';'-joined tags and no header.  Two column conventions are accepted:
lemma-form-tags (the usual on-disk layout) and lemma-tags-form (the layout the
learner protocol uses).
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator

from .rng import rng_for


class ColumnOrder(Enum):
    LEMMA_FORM_TAGS = "lemma-form-tags"
    LEMMA_TAGS_FORM = "lemma-tags-form"


class CorpusError(ValueError):
    """Malformed input data or an unsatisfiable split request."""


def nfc(s: str) -> str:
    if unicodedata.is_normalized("NFC", s):  # fast path, no allocation
        return s
    return unicodedata.normalize("NFC", s)


@dataclass(frozen=True)
class Triple:
    """One labeled inflection example; lemma/form are NFC-normalized."""

    id: int
    lemma: str
    tags: tuple[str, ...]
    form: str

    @property
    def tag_key(self) -> str:
        return ";".join(self.tags)


@dataclass(frozen=True)
class SplitSpec:
    seed_train_size: int
    dev_size: int
    test_size: int
    rng_seed: int


class Dataset:
    """Ordered triples; iteration order is input order, ids are unique."""

    def __init__(self, triples: Iterable[Triple], source_label: str = ""):
        self.triples: list[Triple] = list(triples)
        self.source_label = source_label
        self._by_id = {t.id: t for t in self.triples}
        if len(self._by_id) != len(self.triples):
            raise CorpusError("duplicate triple ids in dataset")

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.triples)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Dataset)
            and self.triples == other.triples
            and self.source_label == other.source_label
        )

    def by_id(self, triple_id: int) -> Triple:
        return self._by_id[triple_id]

    def gold(self) -> dict[int, str]:
        """id -> gold form for the whole dataset."""
        return {t.id: t.form for t in self.triples}


def parse_unimorph(
    text: str,
    order: ColumnOrder = ColumnOrder.LEMMA_FORM_TAGS,
    source_label: str = "",
) -> Dataset:
    """Parse three-column TSV text into a Dataset.

    Blank lines are skipped silently; any other malformation (wrong field
    count, empty field, empty tag feature) raises CorpusError with the
    1-based line number.
    """
    triples: list[Triple] = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        if line == "":
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise CorpusError(
                f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}"
            )
        if any(f == "" for f in fields):
            raise CorpusError(f"line {lineno}: empty field")
        if order is ColumnOrder.LEMMA_FORM_TAGS:
            lemma, form, tag_str = fields
        else:
            lemma, tag_str, form = fields
        tags = tuple(tag_str.split(";"))
        if any(t == "" for t in tags):
            raise CorpusError(f"line {lineno}: empty feature in tag bundle {tag_str!r}")
        triples.append(Triple(len(triples), nfc(lemma), tags, nfc(form)))
    return Dataset(triples, source_label)


def serialize(
    dataset: Dataset, order: ColumnOrder = ColumnOrder.LEMMA_FORM_TAGS
) -> str:
    """Inverse of parse_unimorph for canonical files; one LF-terminated line per triple."""
    lines = []
    for t in dataset:
        if order is ColumnOrder.LEMMA_FORM_TAGS:
            lines.append(f"{t.lemma}\t{t.form}\t{t.tag_key}\n")
        else:
            lines.append(f"{t.lemma}\t{t.tag_key}\t{t.form}\n")
    return "".join(lines)


def split(
    dataset: Dataset, spec: SplitSpec
) -> tuple[list[int], list[int], list[int], list[int]]:
    """Partition dataset ids into (train, dev, test, pool).

    A seeded Fisher-Yates shuffle of the id list decides membership, so equal
    (dataset, spec) pairs always produce identical splits.  The four lists are
    pairwise disjoint; pool receives every id not claimed by the other three.
    Returned lists are in shuffle order.
    """
    if spec.seed_train_size <= 0:
        raise CorpusError("seed_train_size must be positive")
    if spec.test_size <= 0:
        raise CorpusError("test_size must be positive")
    if spec.dev_size < 0:
        raise CorpusError("dev_size must be non-negative")
    need = spec.seed_train_size + spec.dev_size + spec.test_size
    if need > len(dataset):
        raise CorpusError(
            f"split requires {need} items but dataset has only {len(dataset)}"
        )
    ids = [t.id for t in dataset]
    rng_for(spec.rng_seed).shuffle(ids)
    a = spec.seed_train_size
    b = a + spec.dev_size
    c = b + spec.test_size
    return ids[:a], ids[a:b], ids[b:c], ids[c:]
