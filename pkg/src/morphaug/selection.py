"""Subset selection over a scored synthetic pool.

Seven strategies: uniform random; MSD-templatic sampling from
q_alpha(T) = p(T)^alpha / sum_T p(T)^alpha with alpha=0 (uniform over MSDs,
"umt") or alpha=1 (empirical MSD distribution, "ume"); exact top-k / bottom-k
by uncertainty ("highloss" / "lowloss"); and the hybrids that sample an MSD
from q_alpha and then take the most uncertain remaining candidate for it.
All sampling is without replacement and deterministic given the seed.
"""

from __future__ import annotations

import json
import random
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

from .corpus import MsdHistogram
from .corruption import SyntheticExample
from .errors import KTooLarge
from .scoring import require_scored

STRATEGIES = ("random", "umt", "ume", "highloss", "lowloss", "umt-loss", "ume-loss")


@dataclass(frozen=True)
class SelectionStrategy:
    kind: str
    k: int
    alpha: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.kind!r}")


@dataclass(frozen=True)
class SelectionResult:
    selected_ids: tuple[str, ...]
    strategy: SelectionStrategy
    per_msd_counts: MsdHistogram

    def __len__(self) -> int:
        return len(self.selected_ids)

    def to_json(self) -> str:
        return json.dumps({
            "strategy": {
                "kind": self.strategy.kind,
                "k": self.strategy.k,
                "alpha": self.strategy.alpha,
                "seed": self.strategy.seed,
            },
            "selected_ids": list(self.selected_ids),
            "per_msd_counts": self.per_msd_counts.counts,
        }, ensure_ascii=False, indent=2)


def _check_k(k: int, pool_size: int) -> None:
    if k > pool_size:
        raise KTooLarge(k, pool_size)
    if k < 0:
        raise ValueError("k must be >= 0")


def _result(selected: list[SyntheticExample], strategy: SelectionStrategy) -> SelectionResult:
    counts: dict[str, int] = defaultdict(int)
    for e in selected:
        counts[e.msd_string] += 1
    return SelectionResult(
        selected_ids=tuple(e.id for e in selected),
        strategy=strategy,
        per_msd_counts=MsdHistogram(counts=dict(counts), total=len(selected)),
    )


def select_random(pool: Sequence[SyntheticExample], k: int, seed: int = 0) -> SelectionResult:
    _check_k(k, len(pool))
    rng = random.Random(seed)
    selected = rng.sample(list(pool), k)
    return _result(selected, SelectionStrategy(kind="random", k=k, seed=seed))


def _msd_weights(pool: Sequence[SyntheticExample], alpha: float) -> dict[str, float]:
    # q_alpha is defined from the full pool's empirical p(T); the candidate
    # pool shrinks during selection but the weights stay fixed and are
    # renormalized over MSDs that still have candidates.
    counts: dict[str, int] = defaultdict(int)
    for e in pool:
        counts[e.msd_string] += 1
    total = len(pool)
    return {m: (c / total) ** alpha for m, c in counts.items()}


def _draw_msd(rng: random.Random, weights: dict[str, float],
              remaining: dict[str, list[SyntheticExample]]) -> str:
    live = sorted(m for m, cands in remaining.items() if cands)
    w = [weights[m] for m in live]
    return rng.choices(live, weights=w, k=1)[0]


def _group_by_msd(pool: Sequence[SyntheticExample]) -> dict[str, list[SyntheticExample]]:
    groups: dict[str, list[SyntheticExample]] = defaultdict(list)
    for e in sorted(pool, key=lambda e: e.id):
        groups[e.msd_string].append(e)
    return groups


def select_templatic(pool: Sequence[SyntheticExample], k: int, alpha: float,
                     seed: int = 0) -> SelectionResult:
    """Repeat k times: draw an MSD from q_alpha, then a uniform candidate
    with that MSD; remove it."""
    _check_k(k, len(pool))
    rng = random.Random(seed)
    weights = _msd_weights(pool, alpha)
    remaining = _group_by_msd(pool)
    selected: list[SyntheticExample] = []
    for _ in range(k):
        msd = _draw_msd(rng, weights, remaining)
        cands = remaining[msd]
        selected.append(cands.pop(rng.randrange(len(cands))))
    kind = "umt" if alpha == 0 else "ume"
    return _result(selected, SelectionStrategy(kind=kind, k=k, alpha=alpha, seed=seed))


def select_by_loss(pool: Sequence[SyntheticExample], k: int,
                   direction: str = "highest") -> SelectionResult:
    """Exact top-k (or bottom-k) by nll; ties broken by lowest id."""
    if direction not in ("highest", "lowest"):
        raise ValueError(f"direction must be 'highest' or 'lowest', got {direction!r}")
    pool = require_scored(pool)
    _check_k(k, len(pool))
    if direction == "highest":
        ranked = sorted(pool, key=lambda e: (-e.score, e.id))
        kind = "highloss"
    else:
        ranked = sorted(pool, key=lambda e: (e.score, e.id))
        kind = "lowloss"
    return _result(ranked[:k], SelectionStrategy(kind=kind, k=k))


def select_hybrid(pool: Sequence[SyntheticExample], k: int, alpha: float,
                  seed: int = 0) -> SelectionResult:
    """Repeat k times: draw an MSD from q_alpha, take its most uncertain
    remaining candidate (ties by lowest id); remove it."""
    pool = require_scored(pool)
    _check_k(k, len(pool))
    rng = random.Random(seed)
    weights = _msd_weights(pool, alpha)
    remaining = _group_by_msd(pool)
    # most uncertain first, ties by lowest id
    for cands in remaining.values():
        cands.sort(key=lambda e: (-e.score, e.id))
    selected: list[SyntheticExample] = []
    for _ in range(k):
        msd = _draw_msd(rng, weights, remaining)
        selected.append(remaining[msd].pop(0))
    kind = "umt-loss" if alpha == 0 else "ume-loss"
    return _result(selected, SelectionStrategy(kind=kind, k=k, alpha=alpha, seed=seed))


def select(pool: Sequence[SyntheticExample], strategy: SelectionStrategy) -> SelectionResult:
    kind, k, alpha, seed = strategy.kind, strategy.k, strategy.alpha, strategy.seed
    if kind == "random":
        return select_random(pool, k, seed)
    if kind in ("umt", "ume"):
        return select_templatic(pool, k, 0.0 if kind == "umt" else 1.0, seed)
    if kind == "highloss":
        return select_by_loss(pool, k, "highest")
    if kind == "lowloss":
        return select_by_loss(pool, k, "lowest")
    if kind in ("umt-loss", "ume-loss"):
        return select_hybrid(pool, k, 0.0 if kind == "umt-loss" else 1.0, seed)
    raise ValueError(f"unknown strategy {kind!r}")
