"""Command-line pipeline: parse -> augment -> score -> select -> split,
plus the toy-grammar information lab and the diagnostics report.

All artifacts are written atomically and carry provenance (config hash,
seed, parameters) either embedded (JSON outputs) or as a .meta.json sidecar
(TSV/JSONL outputs). A single top-level seed is fanned out per stage, so any
stage can be reproduced in isolation. Exit codes: 0 ok, 1 usage error,
2 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import corpus, corruption, milab, report, scoring, selection, splitgen
from .errors import MorphaugError
from .util import atomic_write, config_hash, derive_seed

log = logging.getLogger("morphaug")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _provenance(stage: str, params: dict) -> dict:
    params = {k: v for k, v in params.items() if k != "func"}
    return {"tool": "morphaug", "stage": stage, "params": params,
            "config_hash": config_hash(params)}


def _write_with_meta(path: str, text: str, stage: str, params: dict) -> None:
    atomic_write(path, text)
    atomic_write(path + ".meta.json",
                 json.dumps(_provenance(stage, params), indent=2, sort_keys=True) + "\n")


def _write_json(path: str, payload: dict, stage: str, params: dict) -> None:
    payload = dict(payload)
    payload["provenance"] = _provenance(stage, params)
    atomic_write(path, json.dumps(payload, indent=2, sort_keys=True,
                                  ensure_ascii=False) + "\n")


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as f:
        return f.read()


# ---------------------------------------------------------------- subcommands

def cmd_parse(args) -> None:
    d = corpus.parse_unimorph(_read(args.infile), name=args.infile)
    _write_with_meta(args.out, corpus.to_jsonl(d), "parse", vars(args))
    log.info("parsed %d triples from %s", len(d), args.infile)


def cmd_augment(args) -> None:
    gold = corpus.parse_unimorph(_read(args.gold), name=args.gold)
    alphabet = corpus.extract_alphabet(gold)
    cfg = corruption.CorruptionConfig(
        theta=args.theta,
        exclude_original=not args.allow_original_char,
        min_run=args.min_run,
        seed=derive_seed(args.seed, "augment"),
    )
    pool = corruption.generate_pool(gold, args.n, alphabet, cfg)
    _write_with_meta(args.out, corruption.write_pool_jsonl(pool), "augment", vars(args))
    if args.tsv_out:
        _write_with_meta(args.tsv_out, corruption.pool_to_tsv(pool), "augment", vars(args))
    log.info("wrote %d synthetic examples to %s", len(pool), args.out)


def cmd_score(args) -> None:
    pool = corruption.read_pool_jsonl(_read(args.pool))
    if args.external:
        scores = scoring.load_external_scores(_read(args.external), pool)
        scored = scoring.apply_scores(pool, scores)
    else:
        gold = corpus.parse_unimorph(_read(args.gold), name=args.gold)
        scorer = scoring.train_ngram(gold, order=args.order, k=args.k_smooth)
        scored = scoring.score_pool(scorer, pool)
    _write_with_meta(args.out, scoring.write_scores_tsv(scored), "score", vars(args))
    log.info("scored %d examples to %s", len(scored), args.out)


def _load_scored_pool(pool_path: str, scores_path: str | None):
    pool = corruption.read_pool_jsonl(_read(pool_path))
    if scores_path:
        scores = scoring.load_external_scores(_read(scores_path), pool)
        pool = scoring.apply_scores(pool, scores)
    return pool


def cmd_select(args) -> None:
    pool = _load_scored_pool(args.pool, args.scores)
    alpha = args.alpha
    if alpha is None:
        alpha = 1.0 if args.strategy in ("ume", "ume-loss") else 0.0
    strategy = selection.SelectionStrategy(
        kind=args.strategy, k=args.k, alpha=alpha,
        seed=derive_seed(args.seed, "select"),
    )
    result = selection.select(pool, strategy)
    payload = json.loads(result.to_json())
    _write_json(args.out, payload, "select", vars(args))
    if args.merged_out:
        gold = corpus.parse_unimorph(_read(args.gold), name=args.gold)
        by_id = {e.id: e for e in pool}
        merged = corpus.serialize(gold) + "".join(
            f"{by_id[i].triple.lemma}\t{by_id[i].triple.form}\t{by_id[i].triple.msd_string}\n"
            for i in result.selected_ids
        )
        _write_with_meta(args.merged_out, merged, "select", vars(args))
    log.info("selected %d / %d examples (%s)", len(result), len(pool), args.strategy)


def cmd_split(args) -> None:
    full = corpus.parse_unimorph(_read(args.full), name=args.full)
    train = corpus.parse_unimorph(_read(args.train), name=args.train)
    split = splitgen.lemma_split(full, train)
    _write_with_meta(args.out, corpus.serialize(split.test), "split", vars(args))
    log.info("lemma split: %d of %d triples kept for test", len(split.test), len(full))


def cmd_milab(args) -> None:
    grammar = milab.make_toy_grammar(
        n_stems=args.stems, n_msds=args.msds,
        seed=derive_seed(args.seed, "grammar"),
        harmony=args.harmony == "on",
        coupled=not args.uncoupled,
    )
    syn_sizes = [int(s) for s in args.syn_sizes.split(",")]
    curve = milab.mi_decay_curve(
        grammar, args.gold, syn_sizes, theta=args.theta,
        seed=derive_seed(args.seed, "milab"), resamples=args.resamples,
    )
    gold = milab.generate_gold(grammar, args.gold,
                               seed=derive_seed(derive_seed(args.seed, "milab"), "gold"))
    records = []
    for point in curve:
        rec = point.to_dict()
        syn = milab.corrupt_toy(
            gold, grammar, point.syn_size, args.theta,
            seed=derive_seed(derive_seed(args.seed, "milab"), f"syn-{point.syn_size}"),
        ) if point.syn_size else []
        try:
            gap = milab.factorization_gap(gold + syn)
            rec["factorization_gap"] = {
                "tv_distance": gap.tv_distance,
                "cells_used": gap.cells_used,
                "skip_rate": gap.skip_rate,
            }
        except ValueError:
            rec["factorization_gap"] = None
        records.append(rec)
    _write_json(args.out, {"curve": records}, "milab", vars(args))
    log.info("wrote %d curve points to %s", len(records), args.out)


def _read_harmony_tsv(path: str) -> report.HarmonyConfig:
    classes = {}
    for line in _read(path).splitlines():
        if not line.strip():
            continue
        char, cls = line.split("\t")
        classes[char] = cls
    return report.HarmonyConfig(vowel_classes=classes)


def cmd_report(args) -> None:
    pool = _load_scored_pool(args.pool, args.scores)
    gold = corpus.parse_unimorph(_read(args.gold), name=args.gold)
    segs = {tid: s for tid, s in corruption.segment_dataset(gold).items() if s is not None}
    blocks: dict = {}
    corr = report.correlations(pool, segs)
    blocks["correlations"] = {
        "pearson_nll_levenshtein": corr.pearson_nll_levenshtein,
        "pearson_nll_stem_length": corr.pearson_nll_stem_length,
        "pearson_nll_target_length": corr.pearson_nll_target_length,
        "n": corr.n,
    }
    if args.selection:
        sel_raw = json.loads(_read(args.selection))
        counts = sel_raw["per_msd_counts"]
        hist = corpus.MsdHistogram(counts=counts, total=sum(counts.values()))
        msd, count = hist.mode()
        blocks["msd_mode"] = {"msd": msd, "count": count}
    if args.harmony:
        cfg = _read_harmony_tsv(args.harmony)
        stats = report.harmony_violation_stats(
            pool, cfg, segs, resamples=args.resamples,
            seed=derive_seed(args.seed, "report"),
        )
        blocks["harmony"] = {
            "violation_rate": stats.violation_rate,
            "mean_nll_violating": stats.mean_nll_violating,
            "mean_nll_adhering": stats.mean_nll_adhering,
            "bootstrap_p": stats.bootstrap_p,
            "n_violating": stats.n_violating,
            "n_adhering": stats.n_adhering,
        }
    _write_json(args.out, blocks, "report", vars(args))
    log.info("wrote report to %s", args.out)


SWEEP_SIZES = (128, 256, 512, 1024, 2048)


def cmd_pipeline(args) -> None:
    cfg = json.loads(_read(args.config))
    required = ["gold", "n_pool", "theta", "order", "k_smooth", "strategies", "seed"]
    missing = [k for k in required if k not in cfg]
    if missing:
        raise MorphaugError(f"pipeline config missing keys: {', '.join(missing)}")
    out = args.out_dir.rstrip("/")
    import os
    os.makedirs(out, exist_ok=True)
    seed = cfg["seed"]

    gold = corpus.parse_unimorph(_read(cfg["gold"]), name=cfg["gold"])
    alphabet = corpus.extract_alphabet(gold)
    ccfg = corruption.CorruptionConfig(theta=cfg["theta"], seed=derive_seed(seed, "augment"))
    pool = corruption.generate_pool(gold, cfg["n_pool"], alphabet, ccfg)
    _write_with_meta(f"{out}/pool.jsonl", corruption.write_pool_jsonl(pool), "augment", cfg)

    scorer = scoring.train_ngram(gold, order=cfg["order"], k=cfg["k_smooth"])
    scored = scoring.score_pool(scorer, pool)
    _write_with_meta(f"{out}/scores.tsv", scoring.write_scores_tsv(scored), "score", cfg)

    sizes = SWEEP_SIZES if cfg.get("sweep") else [cfg.get("k", 128)]
    for kind in cfg["strategies"]:
        for k in sizes:
            strategy = selection.SelectionStrategy(
                kind=kind, k=k, alpha=1.0 if kind in ("ume", "ume-loss") else 0.0,
                seed=derive_seed(seed, f"select-{kind}-{k}"),
            )
            result = selection.select(scored, strategy)
            _write_json(f"{out}/select-{kind}-{k}.json",
                        json.loads(result.to_json()), "select", cfg)

    if "full" in cfg:
        full = corpus.parse_unimorph(_read(cfg["full"]), name=cfg["full"])
        split = splitgen.lemma_split(full, gold)
        _write_with_meta(f"{out}/test.tsv", corpus.serialize(split.test), "split", cfg)
    log.info("pipeline artifacts written to %s", out)


# -------------------------------------------------------------------- parser

def build_parser() -> _Parser:
    p = _Parser(prog="morphaug", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--quiet", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("parse", parents=[common],
                        help="validate a UniMorph TSV and export JSONL")
    sp.add_argument("--in", dest="infile", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_parse)

    sp = sub.add_parser("augment", parents=[common], help="generate a stem-corrupted synthetic pool")
    sp.add_argument("--gold", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--theta", type=float, default=0.5)
    sp.add_argument("--min-run", type=int, default=3)
    sp.add_argument("--allow-original-char", action="store_true",
                    help="let a substitution redraw the original character")
    sp.add_argument("--out", required=True)
    sp.add_argument("--tsv-out", default=None)
    sp.set_defaults(func=cmd_augment)

    sp = sub.add_parser("score", parents=[common], help="attach NLL uncertainty scores to a pool")
    sp.add_argument("--pool", required=True)
    sp.add_argument("--gold", default=None)
    sp.add_argument("--order", type=int, default=3)
    sp.add_argument("--k-smooth", type=float, default=0.1)
    sp.add_argument("--external", default=None,
                    help="id<TAB>nll TSV from an external model instead of the built-in scorer")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_score)

    sp = sub.add_parser("select", parents=[common], help="pick a subset of the scored pool")
    sp.add_argument("--pool", required=True)
    sp.add_argument("--scores", default=None)
    sp.add_argument("--strategy", required=True, choices=selection.STRATEGIES)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--gold", default=None)
    sp.add_argument("--merged-out", default=None,
                    help="also write gold + selection as one training TSV")
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_select)

    sp = sub.add_parser("split", parents=[common], help="lemma-disjoint compositional test split")
    sp.add_argument("--full", required=True)
    sp.add_argument("--train", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_split)

    sp = sub.add_parser("milab", parents=[common], help="toy-grammar mutual-information lab")
    sp.add_argument("--stems", type=int, default=50)
    sp.add_argument("--msds", type=int, default=5)
    sp.add_argument("--gold", type=int, default=500)
    sp.add_argument("--syn-sizes", default="0,500,5000,50000")
    sp.add_argument("--theta", type=float, default=1.0)
    sp.add_argument("--harmony", choices=("on", "off"), default="off")
    sp.add_argument("--uncoupled", action="store_true",
                    help="sample stems independently of MSDs")
    sp.add_argument("--resamples", type=int, default=200)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_milab)

    sp = sub.add_parser("report", parents=[common], help="correlations, MSD mode, harmony stats")
    sp.add_argument("--pool", required=True)
    sp.add_argument("--scores", default=None)
    sp.add_argument("--gold", required=True)
    sp.add_argument("--selection", default=None)
    sp.add_argument("--harmony", default=None, help="char<TAB>class vowel TSV")
    sp.add_argument("--resamples", type=int, default=10000)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_report)

    sp = sub.add_parser("pipeline", parents=[common], help="run all stages from a JSON config")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(func=cmd_pipeline)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 1
    except (MorphaugError, FileNotFoundError, json.JSONDecodeError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
