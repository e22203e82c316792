"""Command-line entry point.

    tvdebate analyze --config run.json [--jobs N] [--seed S] [--videos ID ...]
    tvdebate report --store out/store --out out/report
    tvdebate train-shout --data blocks/ --out shout.bin --seed 0
    tvdebate train-bias --corpus sentences.jsonl --out bias.bin --seed 0
    tvdebate validate --config run.json

Exit codes: 0 success, 1 some videos failed, 2 configuration or corpus error.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .audio import TrainConfig, accuracy, split_by_group, train_shout_model
from .audio.dataset import read_training_set
from .bias import ClassifierConfig, load_corpus, train_classifier
from .pipeline import ConfigError, PipelineConfig, analyze, validate_corpus
from .report import EmptyStoreError, report

log = logging.getLogger("tvdebate")

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser("tvdebate", description="Debate video bias and incivility analytics")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="compute per-video metrics into the result store")
    a.add_argument("--config", required=True, type=Path)
    a.add_argument("--jobs", type=int)
    a.add_argument("--seed", type=int)
    a.add_argument("--videos", nargs="+")

    r = sub.add_parser("report", help="emit report tables from a result store")
    r.add_argument("--store", required=True, type=Path)
    r.add_argument("--out", required=True, type=Path)

    ts = sub.add_parser("train-shout", help="train the shouting classifier")
    ts.add_argument("--data", required=True, type=Path, help="directory with blocks.f32 and blocks.json")
    ts.add_argument("--out", required=True, type=Path)
    ts.add_argument("--seed", type=int, default=0)
    ts.add_argument("--epochs", type=int, default=TrainConfig.epochs)
    ts.add_argument("--test-fraction", type=float, default=0.2)

    tb = sub.add_parser("train-bias", help="train the sentence side classifier")
    tb.add_argument("--corpus", required=True, type=Path, help="JSONL of {text, label}")
    tb.add_argument("--out", required=True, type=Path)
    tb.add_argument("--seed", type=int, default=0)
    tb.add_argument("--epochs", type=int, default=ClassifierConfig.epochs)

    v = sub.add_parser("validate", help="dry-run ingest of every artifact")
    v.add_argument("--config", required=True, type=Path)
    return p


def _load_config(path: Path, seed=None) -> PipelineConfig:
    if seed is None:
        return PipelineConfig.load(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"config-invalid: {exc}") from None
    doc["seed"] = seed
    return PipelineConfig.from_dict(doc, path.parent)


def cmd_analyze(args) -> int:
    cfg = _load_config(args.config, args.seed)
    summary = analyze(cfg, args.videos, args.jobs)
    print(f"completed={len(summary.completed)} skipped={len(summary.skipped)} "
          f"failed={len(summary.failed)} rejected={len(summary.rejected)}")
    return EXIT_PARTIAL if summary.failed else EXIT_OK


def cmd_report(args) -> int:
    files = report(args.store, args.out)
    print(f"wrote {len(files)} files to {args.out}")
    return EXIT_OK


def cmd_train_shout(args) -> int:
    x, y, groups = read_training_set(args.data)
    if groups is not None:
        train, test = split_by_group(groups, args.test_fraction, args.seed)
    else:
        train = test = None
    model = train_shout_model(x[train] if train is not None else x, y[train] if train is not None else y,
                              TrainConfig(epochs=args.epochs), args.seed)
    if test is not None and test.any():
        acc = accuracy(model, x[test], y[test])
        model.metadata["held_out_accuracy"] = acc
        print(f"held-out accuracy {acc:.4f} on {int(test.sum())} blocks")
    model.save(args.out)
    return EXIT_OK


def cmd_train_bias(args) -> int:
    corpus = load_corpus(args.corpus.read_bytes())
    model, metrics = train_classifier(corpus, ClassifierConfig(epochs=args.epochs), args.seed)
    model.save(args.out)
    print(f"test accuracy {metrics['test_accuracy']:.4f} "
          f"(train {metrics['n_train']}, val {metrics['n_val']}, test {metrics['n_test']})")
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = PipelineConfig.load(args.config)
    problems = validate_corpus(cfg)
    for vid, errs in problems.items():
        for e in errs:
            print(f"{vid}: {e}")
    return EXIT_PARTIAL if problems else EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "report": cmd_report,
    "train-shout": cmd_train_shout,
    "train-bias": cmd_train_bias,
    "validate": cmd_validate,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(asctime)s %(levelname)s %(name)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, EmptyStoreError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
