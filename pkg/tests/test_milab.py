import math
import random
from collections import Counter

import pytest

from morphaug.milab import (
    MI_PAIRS,
    HarmonyRule,
    ToyGrammar,
    convexity_bound_check,
    corrupt_toy,
    crosscheck_segmentation,
    default_harmony,
    estimate_mi,
    factorization_gap,
    generate_gold,
    make_toy_grammar,
    mi_decay_curve,
    toy_dataset,
)


# ---------------------------------------------------------------- MI estimator

def test_mi_independent_uniform_is_zero():
    # a perfectly balanced independent joint has exactly zero plug-in MI
    samples = [(a, b) for a in "xy" for b in "uv" for _ in range(25)]
    assert estimate_mi(samples).bits == pytest.approx(0.0, abs=1e-12)


def test_mi_bijection_is_log2_of_support():
    samples = [("x", "u")] * 50 + [("y", "v")] * 50
    assert estimate_mi(samples).bits == pytest.approx(1.0, abs=1e-12)
    samples = sum(([(c, c)] * 10 for c in "abcd"), [])
    assert estimate_mi(samples).bits == pytest.approx(2.0, abs=1e-12)


def test_mi_matches_frozen_hand_value():
    # joint counts [[2,1,0],[0,3,1],[1,0,2]] over a 3x3 support (n=10);
    # sum p*log2(p/(pa*pb)) computed by hand once and frozen
    counts = [[2, 1, 0], [0, 3, 1], [1, 0, 2]]
    samples = []
    for i, row in enumerate(counts):
        for j, c in enumerate(row):
            samples += [(f"a{i}", f"b{j}")] * c
    assert estimate_mi(samples).bits == pytest.approx(0.6954618442383218, abs=1e-12)


def test_mi_nonnegative_and_bounded_on_random_joints():
    rng = random.Random(13)
    for _ in range(30):
        samples = [(rng.choice("abc"), rng.choice("wxyz")) for _ in range(200)]
        est = estimate_mi(samples)
        assert 0.0 <= est.bits <= math.log2(3) + 1e-12


def test_mi_bootstrap_ci_brackets_point():
    samples = [("x", "u")] * 150 + [("x", "v")] * 50 + \
              [("y", "u")] * 50 + [("y", "v")] * 150
    est = estimate_mi(samples, resamples=500, seed=4)
    assert est.ci_low is not None and est.ci_low <= est.bits <= est.ci_high
    assert est.ci_high - est.ci_low < 0.3


def test_mi_requires_samples():
    with pytest.raises(ValueError):
        estimate_mi([])


# ----------------------------------------------------------------- toy grammar

def test_realize_concatenates_stem_and_affix():
    g = ToyGrammar(
        stems=("dal",), affix_map={"M0": "lar"},
        alphabet=make_toy_grammar(4, 2).alphabet,
    )
    lemma, form, x_affix, y_affix = g.realize("dal", "M0")
    assert (lemma, form) == ("dal", "dallar")
    assert (x_affix, y_affix) == ("", "lar")


def test_harmony_agrees_with_last_stem_vowel():
    h = default_harmony()
    assert h.stem_class("dal") == "back"
    assert h.stem_class("del") == "front"
    assert h.harmonize("lar", "front") == "ler"
    assert h.harmonize("lar", "back") == "lar"
    assert not h.violates("dal", "lar")
    assert h.violates("del", "lar")
    # consonant-only strings are neutral
    assert h.stem_class("dll") is None
    assert not h.violates("dll", "lar")


def test_grammar_harmony_end_to_end():
    g = make_toy_grammar(8, 2, seed=0, harmony=True)
    for stem in g.stems:
        for msd in g.msds:
            _, form, _, y_affix = g.realize(stem, msd)
            assert form == stem + y_affix
            assert not g.harmony.violates(stem, y_affix)


def test_gold_generation_is_deterministic_and_well_formed():
    g = make_toy_grammar(10, 3, seed=2, coupled=True)
    a = generate_gold(g, 200, seed=5)
    b = generate_gold(g, 200, seed=5)
    assert a == b
    for e in a:
        assert e.form == e.stem + e.y_affix
        assert e.lemma == e.stem + e.x_affix
        assert e.stem in g.stem_groups[e.msd]


def test_gold_msd_marginal_is_uniform():
    g = make_toy_grammar(12, 4, seed=1)
    gold = generate_gold(g, 8000, seed=9)
    tally = Counter(e.msd for e in gold)
    sigma = math.sqrt(0.25 * 0.75 / 8000)
    for m in g.msds:
        assert abs(tally[m] / 8000 - 0.25) < 4 * sigma


def test_corrupt_toy_replaces_stem_keeps_affix():
    g = make_toy_grammar(10, 3, seed=3, harmony=True, coupled=True)
    gold = generate_gold(g, 50, seed=1)
    syn = corrupt_toy(gold, g, 200, theta=1.0, seed=7)
    assert len(syn) == 200
    originals = {e.stem for e in gold}
    gold_affixes = {x.y_affix for x in gold}
    for e in syn:
        assert e.synthetic
        assert e.form == e.stem + e.y_affix
        assert set(e.stem) <= set(g.alphabet.chars)
        assert e.y_affix in gold_affixes
    # with full corruption over a 6-character alphabet, most corrupted stems
    # land outside the small set of gold stems
    outside = sum(1 for e in syn if e.stem not in originals)
    assert outside > 150


def test_crosscheck_segmentation_low_disagreement_on_gold():
    g = make_toy_grammar(20, 3, seed=4, lemma_affix="in")
    gold = generate_gold(g, 300, seed=2)
    assert crosscheck_segmentation(gold) < 0.2


# ------------------------------------------------------------- convexity bound

def test_convexity_bound_endpoints():
    assert convexity_bound_check(1.0, 0.3, 1.0, 1.0, epsilon=0.0)
    assert convexity_bound_check(1.0, 0.3, 0.0, 0.3, epsilon=0.0)
    assert not convexity_bound_check(1.0, 0.0, 0.5, 0.6, epsilon=0.0)


def test_convexity_exact_on_constructed_mixture():
    # half the data is a perfect bijection over bits (1 bit), half is a
    # balanced independent joint (0 bits); the pooled joint has counts
    # 150/50/50/150 and MI = 1 - H(1/4) = 0.18872187554086717 bits,
    # strictly below the 0.5 bound — with zero slack required
    dependent = [("0", "0")] * 100 + [("1", "1")] * 100
    independent = [(a, b) for a in "01" for b in "01" for _ in range(50)]
    i_g = estimate_mi(dependent).bits
    i_a = estimate_mi(independent).bits
    i_mix = estimate_mi(dependent + independent).bits
    assert i_g == pytest.approx(1.0, abs=1e-12)
    assert i_a == pytest.approx(0.0, abs=1e-12)
    assert i_mix == pytest.approx(0.18872187554086717, abs=1e-12)
    assert convexity_bound_check(i_g, i_a, 0.5, i_mix, epsilon=0.0)


# -------------------------------------------------------------- decay curve

@pytest.fixture(scope="module")
def decay_curve():
    g = make_toy_grammar(20, 4, seed=1, harmony=True, coupled=True)
    return mi_decay_curve(g, 400, [0, 400, 4000], theta=1.0, seed=42,
                          resamples=100)


def test_curve_gold_endpoint_reproduces_gold_only(decay_curve):
    p0 = decay_curve[0]
    assert p0.syn_size == 0 and p0.lam == 1.0
    for pair in MI_PAIRS:
        assert p0.mixture[pair].bits == pytest.approx(p0.gold_only[pair].bits,
                                                      abs=1e-12)


def test_curve_decays_for_all_pairs(decay_curve):
    for pair in MI_PAIRS:
        bits = [pt.mixture[pair].bits for pt in decay_curve]
        assert bits[0] > 0.1  # genuine dependence in gold
        assert bits == sorted(bits, reverse=True)
        assert bits[-1] < 0.5 * bits[0]


def test_curve_convexity_holds(decay_curve):
    for pt in decay_curve:
        assert all(pt.convexity_ok.values())


def test_partial_corruption_decays_less():
    g = make_toy_grammar(20, 4, seed=1, harmony=True, coupled=True)
    full = mi_decay_curve(g, 300, [3000], theta=1.0, seed=5, resamples=0)
    half = mi_decay_curve(g, 300, [3000], theta=0.5, seed=5, resamples=0)
    pair = ("y_stem", "t")
    assert half[0].mixture[pair].bits > full[0].mixture[pair].bits


# ---------------------------------------------------------- factorization gap

def test_factorization_gap_near_zero_without_harmony():
    g = make_toy_grammar(12, 3, seed=6, harmony=False, harmonize_lemma=False)
    gold = generate_gold(g, 100, seed=3)
    mix = gold + corrupt_toy(gold, g, 9900, theta=1.0, seed=8)
    gap = factorization_gap(mix)
    assert gap.tv_distance < 0.02
    assert gap.cells_used > 0


def test_factorization_gap_large_with_harmony():
    g = make_toy_grammar(12, 3, seed=6, harmony=True, harmonize_lemma=False)
    gold = generate_gold(g, 100, seed=3)
    mix = gold + corrupt_toy(gold, g, 9900, theta=1.0, seed=8)
    gap = factorization_gap(mix)
    assert gap.tv_distance > 0.05
    assert 0.0 <= gap.skip_rate < 1.0


def test_factorization_gap_needs_supported_cells():
    g = make_toy_grammar(12, 3, seed=6)
    gold = generate_gold(g, 3, seed=1)
    with pytest.raises(ValueError):
        factorization_gap(gold, min_cell=5)


def test_toy_dataset_conversion():
    g = make_toy_grammar(5, 2, seed=0)
    gold = generate_gold(g, 10, seed=0)
    d = toy_dataset(gold)
    assert len(d) == 10
    assert d[0].lemma == gold[0].lemma
