"""Empirical information-theory lab on toy concatenative grammars.

Generates controlled gold data (form = stem ++ affix), mixes it with
stem-corrupted synthetic data at gold fraction lambda, and measures:

  * plug-in mutual information (bits) between the four stem/affix/tag
    variable pairs, which should decay to ~0 as lambda -> 0 when corruption
    replaces every stem character;
  * the convexity bound I_mixture <= lambda*I_gold + (1-lambda)*I_syn;
  * the total-variation gap between the empirical P(Y|X,T) and the
    factorized product P(Y_affix|X_affix,T) * P(Y_stem|X_stem).

An optional vowel-harmony rule makes affixes agree with the last stem vowel's
class, which breaks the factorization and is the built-in counterexample.
Segmentation uses the grammar's known boundaries, not the alignment module;
crosscheck_segmentation compares the two.
"""

from __future__ import annotations

import random
from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np

from .alignment import align, extract_stem, segmentation_from_boundary
from .corpus import Alphabet, Dataset, InflectionTriple
from .corruption import CorruptionConfig, corrupt
from .errors import NoStem
from .util import derive_seed

MI_PAIRS = (
    ("y_stem", "t"),
    ("y_stem", "x_affix"),
    ("y_affix", "y_stem"),
    ("y_affix", "x_stem"),
)


@dataclass(frozen=True)
class HarmonyRule:
    """Front/back vowel harmony: affix vowels take the class of the last stem
    vowel. `pairs` maps each vowel to its counterpart in the other class."""

    vowel_classes: dict
    pairs: dict

    def stem_class(self, stem: str) -> str | None:
        for c in reversed(stem):
            if c in self.vowel_classes:
                return self.vowel_classes[c]
        return None

    def harmonize(self, affix: str, cls: str | None) -> str:
        if cls is None:
            return affix
        out = []
        for c in affix:
            if c in self.vowel_classes and self.vowel_classes[c] != cls:
                out.append(self.pairs[c])
            else:
                out.append(c)
        return "".join(out)

    def violates(self, stem: str, affix: str) -> bool:
        cls = self.stem_class(stem)
        if cls is None:
            return False
        return any(
            c in self.vowel_classes and self.vowel_classes[c] != cls for c in affix
        )


def default_harmony() -> HarmonyRule:
    return HarmonyRule(
        vowel_classes={"a": "back", "o": "back", "e": "front", "i": "front"},
        pairs={"a": "e", "e": "a", "o": "i", "i": "o"},
    )


@dataclass(frozen=True)
class ToyGrammar:
    """Concatenative suffixing grammar over a small alphabet.

    When stem_groups is set, gold sampling draws the stem from the sampled
    MSD's own group, giving the gold data genuine stem-tag dependence (so the
    mutual informations start well above estimator bias). When it is None,
    stems and MSDs are sampled independently.
    """

    stems: tuple[str, ...]
    affix_map: dict
    alphabet: Alphabet
    harmony: HarmonyRule | None = None
    lemma_affix: str = ""
    harmonize_lemma: bool = True
    stem_groups: dict | None = None

    def __post_init__(self):
        if any(len(s) < 3 for s in self.stems):
            raise ValueError("all stems must have length >= 3")
        if len(set(self.affix_map.values())) != len(self.affix_map):
            raise ValueError("affixes must be distinct per MSD")

    @property
    def msds(self) -> tuple[str, ...]:
        return tuple(sorted(self.affix_map))

    def realize(self, stem: str, msd: str) -> tuple[str, str, str, str]:
        """(lemma, form, x_affix, y_affix) for a stem/MSD combination."""
        y_affix = self.affix_map[msd]
        x_affix = self.lemma_affix
        if self.harmony is not None:
            cls = self.harmony.stem_class(stem)
            y_affix = self.harmony.harmonize(y_affix, cls)
            if self.harmonize_lemma:
                x_affix = self.harmony.harmonize(x_affix, cls)
        return stem + x_affix, stem + y_affix, x_affix, y_affix


@dataclass(frozen=True)
class ToyExample:
    """One toy datapoint with its ground-truth decomposition."""

    id: str
    stem: str
    msd: str
    lemma: str
    form: str
    x_affix: str
    y_affix: str
    synthetic: bool = False

    # the prefix stem is shared verbatim by lemma and form
    @property
    def x_stem(self) -> str:
        return self.stem

    @property
    def y_stem(self) -> str:
        return self.stem

    def variables(self) -> dict:
        return {
            "t": self.msd,
            "x_stem": self.x_stem,
            "x_affix": self.x_affix,
            "y_stem": self.y_stem,
            "y_affix": self.y_affix,
        }

    def to_triple(self) -> InflectionTriple:
        return InflectionTriple(id=self.id, lemma=self.lemma, form=self.form, msd=(self.msd,))


_CONSONANTS = ("d", "l")
_VOWELS = ("a", "e", "o", "i")


def make_toy_grammar(
    n_stems: int,
    n_msds: int,
    seed: int = 0,
    harmony: bool = False,
    coupled: bool = False,
    lemma_affix: str = "in",
    harmonize_lemma: bool = True,
    stem_len: int = 3,
) -> ToyGrammar:
    """Random grammar over a 6-character alphabet (2 consonants, 4 vowels)."""
    rng = random.Random(seed)
    chars = _CONSONANTS + _VOWELS
    stems: set[str] = set()
    while len(stems) < n_stems:
        s = "".join(rng.choice(chars) for _ in range(stem_len))
        if any(c in _VOWELS for c in s):
            stems.add(s)
    stem_tuple = tuple(sorted(stems))
    # distinct CV / CVC suffixes in back-vowel citation shape
    candidates = [c + v for c in _CONSONANTS for v in ("a", "o")]
    candidates += [c + v + c2 for c in _CONSONANTS for v in ("a", "o") for c2 in _CONSONANTS]
    if n_msds > len(candidates):
        raise ValueError(f"at most {len(candidates)} MSDs supported")
    affix_map = {f"M{i}": candidates[i] for i in range(n_msds)}
    stem_groups = None
    if coupled:
        groups: dict[str, list[str]] = {m: [] for m in affix_map}
        order = list(stem_tuple)
        rng.shuffle(order)
        for i, s in enumerate(order):
            groups[f"M{i % n_msds}"].append(s)
        stem_groups = {m: tuple(sorted(g)) for m, g in groups.items()}
    return ToyGrammar(
        stems=stem_tuple,
        affix_map=affix_map,
        alphabet=Alphabet(chars=tuple(sorted(chars))),
        harmony=default_harmony() if harmony else None,
        lemma_affix=lemma_affix,
        harmonize_lemma=harmonize_lemma,
        stem_groups=stem_groups,
    )


def generate_gold(g: ToyGrammar, n: int, seed: int = 0) -> list[ToyExample]:
    """n examples: MSD uniform, stem uniform (within the MSD's group when the
    grammar is coupled), form = stem ++ affix."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = random.Random(seed)
    msds = g.msds
    out = []
    for i in range(n):
        msd = msds[rng.randrange(len(msds))]
        stems = g.stem_groups[msd] if g.stem_groups is not None else g.stems
        stem = stems[rng.randrange(len(stems))]
        lemma, form, x_affix, y_affix = g.realize(stem, msd)
        out.append(ToyExample(
            id=f"g{i:06d}", stem=stem, msd=msd, lemma=lemma, form=form,
            x_affix=x_affix, y_affix=y_affix,
        ))
    return out


def corrupt_toy(
    gold: list[ToyExample], g: ToyGrammar, n: int, theta: float, seed: int = 0
) -> list[ToyExample]:
    """n stem-corrupted examples from uniformly resampled gold sources, using
    the grammar's known stem boundary."""
    cfg = CorruptionConfig(theta=theta, seed=seed)
    rng = random.Random(seed)
    out = []
    for i in range(n):
        src = gold[rng.randrange(len(gold))]
        seg = segmentation_from_boundary(src.lemma, src.form, len(src.stem))
        syn = corrupt(src.to_triple(), seg, g.alphabet, cfg, rng, new_id=f"s{i:06d}")
        out.append(ToyExample(
            id=syn.id,
            stem=syn.triple.form[: len(src.stem)],
            msd=src.msd,
            lemma=syn.triple.lemma,
            form=syn.triple.form,
            x_affix=src.x_affix,
            y_affix=src.y_affix,
            synthetic=True,
        ))
    return out


@dataclass(frozen=True)
class MIEstimate:
    pair: tuple[str, str]
    bits: float
    n_samples: int
    lam: float
    ci_low: float | None = None
    ci_high: float | None = None

    def __post_init__(self):
        if self.bits < 0:
            raise ValueError("plug-in MI must be nonnegative")


def _joint_counts(samples: list[tuple]) -> np.ndarray:
    a_levels = {a: i for i, a in enumerate(sorted({a for a, _ in samples}))}
    b_levels = {b: i for i, b in enumerate(sorted({b for _, b in samples}))}
    counts = np.zeros((len(a_levels), len(b_levels)))
    for (a, b), c in Counter(samples).items():
        counts[a_levels[a], b_levels[b]] = c
    return counts


def _mi_bits(counts: np.ndarray) -> np.ndarray:
    """Plug-in MI in bits; counts has shape (..., r, c)."""
    n = counts.sum(axis=(-1, -2), keepdims=True)
    p = counts / n
    pa = p.sum(axis=-1, keepdims=True)
    pb = p.sum(axis=-2, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = p * (np.log2(p) - np.log2(pa) - np.log2(pb))
    bits = np.nansum(terms, axis=(-1, -2))
    return np.maximum(bits, 0.0)


def estimate_mi(
    samples: list[tuple],
    pair: tuple[str, str] = ("a", "b"),
    lam: float = 1.0,
    resamples: int = 0,
    seed: int = 0,
) -> MIEstimate:
    """Plug-in MI of categorical pairs, with optional bootstrap percentile CI
    (multinomial resampling of the empirical joint)."""
    if not samples:
        raise ValueError("estimate_mi requires at least one sample")
    counts = _joint_counts(samples)
    bits = float(_mi_bits(counts))
    ci_low = ci_high = None
    if resamples > 0:
        n = len(samples)
        flat = counts.ravel() / n
        rng = np.random.default_rng(seed)
        boot = rng.multinomial(n, flat, size=resamples).reshape(resamples, *counts.shape)
        dist = _mi_bits(boot.astype(float))
        ci_low, ci_high = (float(q) for q in np.percentile(dist, [2.5, 97.5]))
    return MIEstimate(pair=pair, bits=bits, n_samples=len(samples), lam=lam,
                      ci_low=ci_low, ci_high=ci_high)


def convexity_bound_check(
    i_g: float, i_a: float, lam: float, i_mixture: float, epsilon: float = 0.02
) -> bool:
    """I_mixture <= lam*I_gold + (1-lam)*I_syn + epsilon."""
    return i_mixture <= lam * i_g + (1 - lam) * i_a + epsilon


@dataclass(frozen=True)
class CurvePoint:
    syn_size: int
    lam: float
    mixture: dict
    gold_only: dict
    syn_only: dict | None
    convexity_ok: dict

    def to_dict(self) -> dict:
        def d(est):
            return {"bits": est.bits, "n": est.n_samples,
                    "ci": [est.ci_low, est.ci_high]}
        return {
            "syn_size": self.syn_size,
            "lambda": self.lam,
            "mixture": {"/".join(p): d(e) for p, e in self.mixture.items()},
            "gold_only": {"/".join(p): d(e) for p, e in self.gold_only.items()},
            "syn_only": None if self.syn_only is None
                        else {"/".join(p): d(e) for p, e in self.syn_only.items()},
            "convexity_ok": {"/".join(p): ok for p, ok in self.convexity_ok.items()},
        }


def _pair_samples(examples: list[ToyExample], pair: tuple[str, str]) -> list[tuple]:
    a, b = pair
    return [(v[a], v[b]) for v in (e.variables() for e in examples)]


def mi_decay_curve(
    g: ToyGrammar,
    gold_n: int,
    syn_sizes: list[int],
    theta: float = 1.0,
    seed: int = 0,
    resamples: int = 200,
    epsilon: float = 0.02,
) -> list[CurvePoint]:
    """MI of the gold/synthetic mixture for each synthetic size, for all four
    variable pairs, with bootstrap CIs and per-point convexity verdicts."""
    gold = generate_gold(g, gold_n, seed=derive_seed(seed, "gold"))
    points = []
    for s in syn_sizes:
        syn = corrupt_toy(gold, g, s, theta, seed=derive_seed(seed, f"syn-{s}")) if s else []
        mixture = gold + syn
        lam = gold_n / (gold_n + s)
        mix_est, gold_est, syn_est, convex = {}, {}, {}, {}
        for pair in MI_PAIRS:
            mix_est[pair] = estimate_mi(
                _pair_samples(mixture, pair), pair, lam,
                resamples=resamples, seed=derive_seed(seed, f"boot-{s}-{pair}"),
            )
            gold_est[pair] = estimate_mi(_pair_samples(gold, pair), pair, 1.0)
            if syn:
                syn_est[pair] = estimate_mi(_pair_samples(syn, pair), pair, 0.0)
            i_a = syn_est[pair].bits if syn else 0.0
            convex[pair] = convexity_bound_check(
                gold_est[pair].bits, i_a, lam, mix_est[pair].bits, epsilon
            )
        points.append(CurvePoint(
            syn_size=s, lam=lam, mixture=mix_est, gold_only=gold_est,
            syn_only=syn_est or None, convexity_ok=convex,
        ))
    return points


@dataclass(frozen=True)
class FactorizationGap:
    tv_distance: float
    cells_used: int
    cells_skipped: int

    def __post_init__(self):
        if not 0.0 <= self.tv_distance <= 1.0:
            raise ValueError("TV distance must lie in [0, 1]")

    @property
    def skip_rate(self) -> float:
        total = self.cells_used + self.cells_skipped
        return self.cells_skipped / total if total else 0.0


def factorization_gap(examples: list[ToyExample], min_cell: int = 5) -> FactorizationGap:
    """Mean TV distance, over observed (X, T) cells with >= min_cell samples,
    between the empirical P(Y|X,T) and the factorized product
    P(Y_affix|X_affix,T) * P(Y_stem|X_stem)."""
    cells: dict[tuple, list[ToyExample]] = defaultdict(list)
    aff_cond: dict[tuple, Counter] = defaultdict(Counter)
    stem_cond: dict[str, Counter] = defaultdict(Counter)
    for e in examples:
        cells[(e.lemma, e.msd)].append(e)
        aff_cond[(e.x_affix, e.msd)][e.y_affix] += 1
        stem_cond[e.x_stem][e.y_stem] += 1
    tvs = []
    skipped = 0
    for (_, msd), members in cells.items():
        if len(members) < min_cell:
            skipped += 1
            continue
        n = len(members)
        p = Counter(e.form for e in members)
        # representative decomposition per observed form
        decomp = {e.form: e for e in members}
        q_obs = 0.0
        abs_diff = 0.0
        for form, c in p.items():
            e = decomp[form]
            ac = aff_cond[(e.x_affix, msd)]
            sc = stem_cond[e.x_stem]
            q = (ac[e.y_affix] / sum(ac.values())) * (sc[e.y_stem] / sum(sc.values()))
            q_obs += q
            abs_diff += abs(c / n - q)
        tvs.append(max(0.0, 0.5 * (abs_diff + (1.0 - q_obs))))
    if not tvs:
        raise ValueError("no (X, T) cell reaches the minimum support")
    return FactorizationGap(
        tv_distance=float(np.mean(tvs)), cells_used=len(tvs), cells_skipped=skipped
    )


def crosscheck_segmentation(examples: list[ToyExample], min_run: int = 3) -> float:
    """Fraction of examples where alignment-based stem extraction disagrees
    with the grammar's ground-truth stem."""
    disagree = 0
    for e in examples:
        try:
            seg = extract_stem(align(e.lemma, e.form), min_run=min_run)
            if seg.y_stem != e.y_stem:
                disagree += 1
        except NoStem:
            disagree += 1
    return disagree / len(examples) if examples else 0.0


def toy_dataset(examples: list[ToyExample], name: str = "toy") -> Dataset:
    return Dataset(triples=tuple(e.to_triple() for e in examples), name=name)
