"""Character alignment and stem/affix segmentation.

The stem of a lemma-form pair is the set of maximal runs of aligned identical
characters of length >= min_run (default 3) under a minimum-edit-cost
alignment. Among minimum-cost alignments we take the one with the most matched
characters, with a fixed backtrace preference (match > substitution >
deletion > insertion) so results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import EmptyInput, NoStem

GAP = None


def levenshtein(a: str, b: str) -> int:
    """Unit-cost edit distance."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


@dataclass(frozen=True)
class CharAlignment:
    """Monotone alignment between a lemma and a form.

    pairs holds (lemma_index, form_index) with GAP (None) on the gapped side;
    cost is the Levenshtein distance."""

    lemma: str
    form: str
    pairs: tuple[tuple[int | None, int | None], ...]
    cost: int

    def matched_pairs(self) -> list[tuple[int, int]]:
        return [
            (i, j)
            for i, j in self.pairs
            if i is not GAP and j is not GAP and self.lemma[i] == self.form[j]
        ]


@dataclass(frozen=True)
class Segmentation:
    """Stem/affix decomposition of a lemma-form pair.

    Spans are half-open [start, end) index ranges. stem_pairs lists the
    aligned (lemma_index, form_index) stem positions in order; corruption
    applies the same random draw to both sides of each pair."""

    lemma: str
    form: str
    lemma_stem_spans: tuple[tuple[int, int], ...]
    form_stem_spans: tuple[tuple[int, int], ...]
    stem_pairs: tuple[tuple[int, int], ...]

    @property
    def lemma_stem_positions(self) -> frozenset[int]:
        return frozenset(i for s, e in self.lemma_stem_spans for i in range(s, e))

    @property
    def form_stem_positions(self) -> frozenset[int]:
        return frozenset(i for s, e in self.form_stem_spans for i in range(s, e))

    @property
    def x_stem(self) -> str:
        return "".join(self.lemma[s:e] for s, e in self.lemma_stem_spans)

    @property
    def x_affix(self) -> str:
        keep = self.lemma_stem_positions
        return "".join(c for i, c in enumerate(self.lemma) if i not in keep)

    @property
    def y_stem(self) -> str:
        return "".join(self.form[s:e] for s, e in self.form_stem_spans)

    @property
    def y_affix(self) -> str:
        keep = self.form_stem_positions
        return "".join(c for i, c in enumerate(self.form) if i not in keep)


# backtrace ops, in preference order for equal (cost, -matches)
_MATCH, _SUB, _DEL, _INS = 0, 1, 2, 3


def align(lemma: str, form: str) -> CharAlignment:
    """Minimum-edit-cost alignment maximizing matched characters among
    minimum-cost paths."""
    if not lemma or not form:
        raise EmptyInput("align requires non-empty strings")
    n, m = len(lemma), len(form)
    # cost, best match count at equal cost, and the op that achieved it
    cost = [[0] * (m + 1) for _ in range(n + 1)]
    matches = [[0] * (m + 1) for _ in range(n + 1)]
    op = [[-1] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        cost[i][0], op[i][0] = i, _DEL
    for j in range(1, m + 1):
        cost[0][j], op[0][j] = j, _INS
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            eq = lemma[i - 1] == form[j - 1]
            cands = [
                (cost[i - 1][j - 1] + (0 if eq else 1),
                 matches[i - 1][j - 1] + (1 if eq else 0),
                 _MATCH if eq else _SUB),
                (cost[i - 1][j] + 1, matches[i - 1][j], _DEL),
                (cost[i][j - 1] + 1, matches[i][j - 1], _INS),
            ]
            best = min(cands, key=lambda c: (c[0], -c[1], c[2]))
            cost[i][j], matches[i][j], op[i][j] = best
    pairs = []
    i, j = n, m
    while i > 0 or j > 0:
        o = op[i][j]
        if o in (_MATCH, _SUB):
            pairs.append((i - 1, j - 1))
            i, j = i - 1, j - 1
        elif o == _DEL:
            pairs.append((i - 1, GAP))
            i -= 1
        else:
            pairs.append((GAP, j - 1))
            j -= 1
    pairs.reverse()
    return CharAlignment(lemma=lemma, form=form, pairs=tuple(pairs), cost=cost[n][m])


def extract_stem(a: CharAlignment, min_run: int = 3) -> Segmentation:
    """Segment a pair into stem (maximal matched runs >= min_run) and affix.

    Raises NoStem when no run is long enough; such triples are excluded from
    augmentation."""
    runs: list[list[tuple[int, int]]] = []
    current: list[tuple[int, int]] = []
    for i, j in a.pairs:
        if i is not GAP and j is not GAP and a.lemma[i] == a.form[j]:
            current.append((i, j))
        else:
            if current:
                runs.append(current)
            current = []
    if current:
        runs.append(current)
    stem_runs = [r for r in runs if len(r) >= min_run]
    if not stem_runs:
        raise NoStem(f"no aligned run of length >= {min_run} for {a.lemma!r}/{a.form!r}")
    lemma_spans = tuple((r[0][0], r[-1][0] + 1) for r in stem_runs)
    form_spans = tuple((r[0][1], r[-1][1] + 1) for r in stem_runs)
    stem_pairs = tuple(p for r in stem_runs for p in r)
    return Segmentation(
        lemma=a.lemma,
        form=a.form,
        lemma_stem_spans=lemma_spans,
        form_stem_spans=form_spans,
        stem_pairs=stem_pairs,
    )


def segmentation_from_boundary(lemma: str, form: str, stem_len: int) -> Segmentation:
    """Segmentation for a known prefix stem of length stem_len shared by lemma
    and form (used by generated toy data, bypassing alignment)."""
    if stem_len < 1 or lemma[:stem_len] != form[:stem_len]:
        raise ValueError("lemma and form do not share the given prefix stem")
    span = ((0, stem_len),)
    return Segmentation(
        lemma=lemma,
        form=form,
        lemma_stem_spans=span,
        form_stem_spans=span,
        stem_pairs=tuple((i, i) for i in range(stem_len)),
    )
