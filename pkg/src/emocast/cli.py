"""Command-line entry point.

Subcommands map one-to-one onto pipeline stages; ``run-all`` composes all
of them. Options may come from a flat key=value config file (--config),
with command-line flags taking precedence.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import EmocastError
from .pipeline import (
    RunConfig,
    load_config_file,
    run_pipeline,
    stage_cluster,
    stage_parse,
    stage_project,
    stage_score,
    stage_stats,
    stage_words,
)

STAGES = {
    "parse": stage_parse,
    "score": stage_score,
    "stats": stage_stats,
    "cluster": stage_cluster,
    "project": stage_project,
    "words": stage_words,
}

_CONFIG_KEYS = {
    "scripts": "script_dir",
    "metadata": "metadata_path",
    "lexicon": "lexicon_path",
    "out": "output_dir",
    "min_dialogues": "min_dialogues",
    "k": "k",
    "seed": "seed",
    "perplexity": "perplexity",
    "bin_years": "bin_years",
    "strict": "strict",
    "top_words": "top_words",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emocast",
        description="Parse screenplays, embed dialogue into Plutchik emotion vectors, "
        "and contrast how character groups are written.",
    )
    parser.add_argument(
        "command",
        choices=[*STAGES, "run-all"],
        help="pipeline stage to run, or run-all for the whole pipeline",
    )
    parser.add_argument("--config", type=Path, help="key=value config file")
    parser.add_argument("--scripts", type=Path, help="directory of .txt / .jsonl scripts")
    parser.add_argument("--metadata", type=Path, help="character metadata CSV")
    parser.add_argument("--lexicon", type=Path, help="word-affect lexicon TSV")
    parser.add_argument("--out", type=Path, help="output directory for artifacts")
    parser.add_argument("--min-dialogues", type=int, help="drop characters below this count (default 5)")
    parser.add_argument("--k", help="cluster count, or 'auto' for elbow selection")
    parser.add_argument("--seed", type=int, help="random seed (default 42)")
    parser.add_argument("--perplexity", type=float, help="t-SNE perplexity (default 30)")
    parser.add_argument("--bin-years", type=int, help="width of release-year bins (default 5)")
    parser.add_argument(
        "--strict", action="store_true", default=None,
        help="treat stale stage inputs as errors instead of warnings",
    )
    return parser


def _parse_k(raw: str) -> int | str:
    if raw == "auto":
        return "auto"
    return int(raw)


def resolve_config(args: argparse.Namespace) -> RunConfig:
    values: dict[str, str] = {}
    if args.config is not None:
        raw = load_config_file(args.config)
        for key, value in raw.items():
            if key not in _CONFIG_KEYS:
                raise ValueError(f"{args.config}: unknown config key {key!r}")
            values[_CONFIG_KEYS[key]] = value

    def pick(flag: object, key: str) -> object:
        return flag if flag is not None else values.get(key)

    script_dir = pick(args.scripts, "script_dir")
    metadata = pick(args.metadata, "metadata_path")
    lexicon = pick(args.lexicon, "lexicon_path")
    out = pick(args.out, "output_dir")
    missing = [
        name
        for name, value in (
            ("--scripts", script_dir),
            ("--metadata", metadata),
            ("--lexicon", lexicon),
            ("--out", out),
        )
        if value is None
    ]
    if missing:
        raise ValueError(f"missing required options: {', '.join(missing)}")

    cfg = RunConfig(
        script_dir=Path(script_dir),
        metadata_path=Path(metadata),
        lexicon_path=Path(lexicon),
        output_dir=Path(out),
    )
    min_dialogues = pick(args.min_dialogues, "min_dialogues")
    if min_dialogues is not None:
        cfg.min_dialogues = int(min_dialogues)
    k = pick(args.k, "k")
    if k is not None:
        cfg.k = _parse_k(str(k))
    seed = pick(args.seed, "seed")
    if seed is not None:
        cfg.seed = int(seed)
    perplexity = pick(args.perplexity, "perplexity")
    if perplexity is not None:
        cfg.perplexity = float(perplexity)
    bin_years = pick(args.bin_years, "bin_years")
    if bin_years is not None:
        cfg.bin_years = int(bin_years)
    strict = pick(args.strict, "strict")
    if strict is not None:
        cfg.strict = strict if isinstance(strict, bool) else str(strict).lower() in ("1", "true", "yes")
    top_words = values.get("top_words")
    if top_words is not None:
        cfg.top_words = int(top_words)
    return cfg


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        cfg.validate()
    except (EmocastError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "run-all":
            run_pipeline(cfg)
        else:
            STAGES[args.command](cfg)
    except (EmocastError, OSError, ValueError) as exc:
        print(f"error in stage {args.command}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
