"""Diagnostics over scored pools and selections: Pearson correlations of
uncertainty with corruption degree / lengths, MSD mode frequency, bootstrap
percentile intervals, and vowel-harmony violation statistics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .alignment import Segmentation
from .corruption import SyntheticExample
from .errors import EmptySelection, NoVowelsConfigured, TooFewSamples, ZeroVariance
from .scoring import require_scored
from .selection import SelectionResult


@dataclass(frozen=True)
class CorrelationReport:
    pearson_nll_levenshtein: float
    pearson_nll_stem_length: float
    pearson_nll_target_length: float
    n: int


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.std() == 0:
        raise ZeroVariance("x")
    if y.std() == 0:
        raise ZeroVariance("y")
    return float(np.corrcoef(x, y)[0, 1])


def correlations(
    pool: Sequence[SyntheticExample], segmentations: dict[str, Segmentation]
) -> CorrelationReport:
    """Pearson r of nll against corruption distance, stem length, and target
    length. Segmentations are keyed by gold source id."""
    pool = require_scored(pool)
    if len(pool) < 3:
        raise TooFewSamples("need >= 3 scored examples")
    nll = [e.score for e in pool]
    lev = [e.lev_to_gold_target for e in pool]
    stem_len = [len(segmentations[e.source_id].y_stem) for e in pool]
    target_len = [len(e.triple.form) for e in pool]
    try:
        r_lev = pearson(nll, lev)
    except ZeroVariance:
        raise ZeroVariance("lev_to_gold_target") from None
    try:
        r_stem = pearson(nll, stem_len)
    except ZeroVariance:
        raise ZeroVariance("stem_length") from None
    try:
        r_len = pearson(nll, target_len)
    except ZeroVariance:
        raise ZeroVariance("target_length") from None
    return CorrelationReport(
        pearson_nll_levenshtein=r_lev,
        pearson_nll_stem_length=r_stem,
        pearson_nll_target_length=r_len,
        n=len(pool),
    )


def msd_mode_frequency(sel: SelectionResult) -> tuple[str, int]:
    """The most commonly selected MSD and its count; ties lexicographic."""
    if len(sel) == 0:
        raise EmptySelection("selection is empty")
    return sel.per_msd_counts.mode()


@dataclass(frozen=True)
class HarmonyConfig:
    """Maps each vowel to a class label. The label "neutral" never triggers
    violations. Consonants are simply unmapped."""

    vowel_classes: dict

    def __post_init__(self):
        if not self.vowel_classes:
            raise NoVowelsConfigured("vowel class map is empty")

    def last_stem_class(self, stem: str) -> str | None:
        for c in reversed(stem):
            cls = self.vowel_classes.get(c)
            if cls is not None and cls != "neutral":
                return cls
        return None

    def violates(self, stem: str, affix: str) -> bool:
        cls = self.last_stem_class(stem)
        if cls is None:
            return False
        for c in affix:
            a = self.vowel_classes.get(c)
            if a is not None and a != "neutral" and a != cls:
                return True
        return False


@dataclass(frozen=True)
class BootstrapCI:
    statistic: str
    point: float
    lower: float
    upper: float
    resamples: int
    level: float

    def __post_init__(self):
        if not self.lower <= self.point <= self.upper:
            raise ValueError("percentile CI must contain the point estimate")


def bootstrap_percentile(
    samples: Sequence[float],
    statistic: Callable[[Sequence[float]], float] = None,
    resamples: int = 10000,
    level: float = 0.95,
    seed: int = 0,
    name: str = "statistic",
) -> BootstrapCI:
    """Percentile CI of a statistic over with-replacement resamples."""
    samples = list(samples)
    if len(samples) < 2:
        raise TooFewSamples("bootstrap needs >= 2 samples")
    if statistic is None:
        statistic = lambda xs: float(np.mean(xs))
    point = float(statistic(samples))
    rng = np.random.default_rng(seed)
    n = len(samples)
    arr = np.asarray(samples, dtype=float)
    dist = np.empty(resamples)
    idx = rng.integers(0, n, size=(resamples, n))
    for i in range(resamples):
        dist[i] = statistic(arr[idx[i]])
    alpha = (1 - level) / 2
    lower, upper = np.percentile(dist, [100 * alpha, 100 * (1 - alpha)])
    lower = min(float(lower), point)
    upper = max(float(upper), point)
    return BootstrapCI(statistic=name, point=point, lower=lower, upper=upper,
                       resamples=resamples, level=level)


@dataclass(frozen=True)
class HarmonyStats:
    violation_rate: float
    mean_nll_violating: float | None
    mean_nll_adhering: float | None
    bootstrap_p: float | None
    n_violating: int
    n_adhering: int


def harmony_violation_stats(
    pool: Sequence[SyntheticExample],
    cfg: HarmonyConfig,
    segmentations: dict[str, Segmentation],
    resamples: int = 10000,
    seed: int = 0,
) -> HarmonyStats:
    """Group mean NLL for harmony-violating vs adhering examples, with a
    one-sided bootstrap percentile p-value for the mean difference.

    An example violates iff any affix vowel's class differs from the last
    corrupted-stem vowel's class. Stems and affixes come from the gold
    segmentation applied to the corrupted strings."""
    pool = require_scored(pool)
    violating: list[float] = []
    adhering: list[float] = []
    for e in pool:
        seg = segmentations[e.source_id]
        form = e.triple.form
        stem = "".join(form[s:t] for s, t in seg.form_stem_spans)
        keep = seg.form_stem_positions
        affix = "".join(c for i, c in enumerate(form) if i not in keep)
        (violating if cfg.violates(stem, affix) else adhering).append(e.score)
    rate = len(violating) / len(pool)
    if not violating or not adhering:
        return HarmonyStats(
            violation_rate=rate,
            mean_nll_violating=float(np.mean(violating)) if violating else None,
            mean_nll_adhering=float(np.mean(adhering)) if adhering else None,
            bootstrap_p=None,
            n_violating=len(violating),
            n_adhering=len(adhering),
        )
    rng = np.random.default_rng(seed)
    v = np.asarray(violating)
    a = np.asarray(adhering)
    diffs = (
        v[rng.integers(0, len(v), size=(resamples, len(v)))].mean(axis=1)
        - a[rng.integers(0, len(a), size=(resamples, len(a)))].mean(axis=1)
    )
    # one-sided: P(difference <= 0) under the bootstrap distribution
    p = float(np.mean(diffs <= 0))
    return HarmonyStats(
        violation_rate=rate,
        mean_nll_violating=float(v.mean()),
        mean_nll_adhering=float(a.mean()),
        bootstrap_p=p,
        n_violating=len(v),
        n_adhering=len(a),
    )
