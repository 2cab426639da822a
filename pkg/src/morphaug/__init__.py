"""Stem-corruption data augmentation, uncertainty-based subset selection, and
an empirical information-theory lab for morphological inflection."""

from .alignment import CharAlignment, Segmentation, align, extract_stem, levenshtein
from .corpus import (
    Alphabet,
    Dataset,
    InflectionTriple,
    MsdHistogram,
    extract_alphabet,
    msd_histogram,
    parse_unimorph,
    serialize,
)
from .corruption import CorruptionConfig, SyntheticExample, corrupt, generate_pool
from .scoring import (
    NGramScorer,
    UncertaintyScore,
    UniformScorer,
    load_external_scores,
    score,
    score_pool,
    train_ngram,
)
from .selection import (
    SelectionResult,
    SelectionStrategy,
    select,
    select_by_loss,
    select_hybrid,
    select_random,
    select_templatic,
)
from .splitgen import LemmaSplit, lemma_split

__version__ = "0.1.0"
