"""Inflection corpus data model: triples, datasets, alphabets, MSD histograms.

File convention is UTF-8 TSV with columns lemma<TAB>form<TAB>MSD, where the
MSD is a ';'-joined list of feature tokens. Everything here is immutable and
operates on Unicode code points (combining marks count as separate characters).
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import EmptyDataset, EmptyField, MalformedLine


@dataclass(frozen=True)
class InflectionTriple:
    """One gold example: lemma, inflected form, morphosyntactic description."""

    id: str
    lemma: str
    form: str
    msd: tuple[str, ...]

    def __post_init__(self):
        if not self.lemma or not self.form:
            raise ValueError(f"triple {self.id!r}: lemma and form must be non-empty")
        if not self.msd:
            raise ValueError(f"triple {self.id!r}: msd must have at least one feature")
        for tok in self.msd:
            if not tok or ";" in tok or any(c.isspace() for c in tok):
                raise ValueError(f"triple {self.id!r}: bad msd token {tok!r}")

    @property
    def msd_string(self) -> str:
        return ";".join(self.msd)


@dataclass(frozen=True)
class Dataset:
    """Ordered collection of triples with unique ids. Duplicate surface forms
    are retained on purpose: MSD proportions are frequency-based."""

    triples: tuple[InflectionTriple, ...]
    name: str = "dataset"
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for t in self.triples:
            if t.id in index:
                raise ValueError(f"duplicate id {t.id!r} in dataset {self.name!r}")
            index[t.id] = t
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self) -> Iterator[InflectionTriple]:
        return iter(self.triples)

    def __getitem__(self, i) -> InflectionTriple:
        return self.triples[i]

    def by_id(self, triple_id: str) -> InflectionTriple:
        return self._index[triple_id]

    def __contains__(self, triple_id: str) -> bool:
        return triple_id in self._index


@dataclass(frozen=True)
class Alphabet:
    """Sorted, duplicate-free character inventory."""

    chars: tuple[str, ...]

    def __post_init__(self):
        if not self.chars:
            raise ValueError("alphabet must be non-empty")
        if len(set(self.chars)) != len(self.chars):
            raise ValueError("alphabet contains duplicates")

    def __len__(self) -> int:
        return len(self.chars)

    def __contains__(self, c: str) -> bool:
        return c in set(self.chars)

    def __iter__(self):
        return iter(self.chars)


@dataclass(frozen=True)
class MsdHistogram:
    """Empirical MSD counts; counts/total is the empirical p(T)."""

    counts: dict
    total: int

    def __post_init__(self):
        if self.total != sum(self.counts.values()):
            raise ValueError("histogram total does not match counts")
        if any(c <= 0 for c in self.counts.values()):
            raise ValueError("histogram counts must be positive")

    def proportion(self, msd_string: str) -> float:
        if self.total == 0:
            return 0.0
        return self.counts.get(msd_string, 0) / self.total

    def mode(self) -> tuple[str, int]:
        # ties broken lexicographically
        top = max(self.counts.values())
        m = min(k for k, c in self.counts.items() if c == top)
        return m, top


def parse_unimorph(text: str | Iterable[str], name: str = "dataset") -> Dataset:
    """Parse UniMorph-style TSV into a Dataset. Blank lines are skipped; ids
    are assigned from 1-based line order."""
    if isinstance(text, str):
        lines = text.split("\n")
    else:
        lines = [ln.rstrip("\n") for ln in text]
    triples = []
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        fields = line.rstrip("\r").split("\t")
        if len(fields) != 3:
            raise MalformedLine(line_no, f"got {len(fields)}")
        lemma, form, msd = fields
        if not lemma:
            raise EmptyField(line_no, "lemma")
        if not form:
            raise EmptyField(line_no, "form")
        if not msd:
            raise EmptyField(line_no, "MSD")
        triples.append(
            InflectionTriple(id=str(line_no), lemma=lemma, form=form, msd=tuple(msd.split(";")))
        )
    return Dataset(triples=tuple(triples), name=name)


def serialize(d: Dataset) -> str:
    """Inverse of parse_unimorph up to id renumbering."""
    return "".join(f"{t.lemma}\t{t.form}\t{t.msd_string}\n" for t in d)


def to_jsonl(d: Dataset) -> str:
    return "".join(
        json.dumps({"id": t.id, "lemma": t.lemma, "form": t.form, "msd": list(t.msd)},
                   ensure_ascii=False) + "\n"
        for t in d
    )


def extract_alphabet(d: Dataset) -> Alphabet:
    """Union of code points over all lemmas and forms, sorted by code point."""
    if len(d) == 0:
        raise EmptyDataset(f"dataset {d.name!r} is empty")
    chars = set()
    for t in d:
        chars.update(t.lemma)
        chars.update(t.form)
    return Alphabet(chars=tuple(sorted(chars)))


def msd_histogram(d: Dataset) -> MsdHistogram:
    counts = Counter(t.msd_string for t in d)
    return MsdHistogram(counts=dict(counts), total=len(d))
