import random
from functools import lru_cache

import pytest

from morphaug.corpus import Dataset, InflectionTriple, parse_unimorph


def oracle_levenshtein(a: str, b: str) -> int:
    """Independent memoized-recursion edit distance."""

    @lru_cache(maxsize=None)
    def d(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(
            d(i - 1, j) + 1,
            d(i, j - 1) + 1,
            d(i - 1, j - 1) + (a[i - 1] != b[j - 1]),
        )

    return d(len(a), len(b))


def oracle_matched_runs(alignment, min_run):
    """Brute-force scan for maximal runs of consecutive matched pairs."""
    runs, cur = [], []
    for pair in alignment.pairs:
        i, j = pair
        ok = i is not None and j is not None and alignment.lemma[i] == alignment.form[j]
        if ok:
            cur.append(pair)
        else:
            if len(cur) >= min_run:
                runs.append(tuple(cur))
            cur = []
    if len(cur) >= min_run:
        runs.append(tuple(cur))
    return runs


def random_word(rng: random.Random, alphabet="abcd", lo=1, hi=12) -> str:
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(lo, hi)))


def make_dataset(rows, name="fixture") -> Dataset:
    triples = tuple(
        InflectionTriple(id=str(i + 1), lemma=l, form=f, msd=tuple(m.split(";")))
        for i, (l, f, m) in enumerate(rows)
    )
    return Dataset(triples=triples, name=name)


@pytest.fixture
def georgian_style_histogram_rows():
    # 9 plural-ergative nouns vs 1 singular-ergative
    rows = [(f"lemma{i}", f"lemma{i}ma", "PL;ERG") for i in range(9)]
    rows.append(("lemmax", "lemmaxma", "SG;ERG"))
    return rows


@pytest.fixture
def small_gold():
    text = (
        "walk\twalked\tV;PST\n"
        "talk\ttalked\tV;PST\n"
        "jump\tjumping\tV;PRS\n"
        "climb\tclimbs\tV;3;SG\n"
        "dream\tdreamed\tV;PST\n"
    )
    return parse_unimorph(text, name="gold-train")
