"""``attnscale`` command line.

Exit codes: 0 success, 2 usage or config error, 3 I/O error, 4 degenerate data.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, rng
from .attention import AttentionError
from .compare import CompareError, compare
from .config import ConfigError, config_to_dict, dumps_config, load_config, preset
from .outputs import (MissingColumnsError, atomic_write_text, read_samples_csv,
                      samples_csv, summary_csv)
from .plotting import density_svg
from .simulation import run_experiment
from .stats import DegenerateSampleError

log = logging.getLogger("attnscale")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DEGENERATE = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load(path) -> object:
    try:
        return load_config(path)
    except ConfigError as exc:
        raise CliError(EXIT_USAGE, f"invalid config {path}: {exc}") from None
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read config: {exc}") from None


def cmd_simulate(config_path, out_dir) -> dict:
    """Run one experiment and write samples.csv, summary.csv and manifest.json; returns the manifest."""
    cfg = _load(config_path)
    start = time.perf_counter()
    try:
        result = run_experiment(cfg)
    except AttentionError as exc:
        raise CliError(EXIT_DEGENERATE, str(exc)) from None
    out = Path(out_dir)
    samples_path = out / "samples.csv"
    summary_path = out / "summary.csv"
    manifest_path = out / "manifest.json"
    try:
        out.mkdir(parents=True, exist_ok=True)
        atomic_write_text(samples_path, samples_csv(result))
        atomic_write_text(summary_path, summary_csv(result))
        manifest = {
            "tool": "attnscale",
            "version": __version__,
            "rng_algorithm": result.rng_algorithm,
            "config": config_to_dict(cfg),
            "outputs": {"samples": str(samples_path), "summary": str(summary_path)},
            "rule_outputs": {label: str(samples_path) for label, _ in cfg.rules},
            "k_total": result.k_total,
            "scale": result.scale,
            "wall_clock_seconds": time.perf_counter() - start,
            "finished_at": datetime.now(timezone.utc).isoformat(),
        }
        atomic_write_text(manifest_path, json.dumps(manifest, indent=2) + "\n")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write outputs: {exc}") from None
    return manifest


def cmd_plot(samples_csv_path, out_svg, rules_filter=None) -> Path:
    try:
        series = read_samples_csv(samples_csv_path)
    except MissingColumnsError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read samples: {exc}") from None
    if rules_filter:
        unknown = [r for r in rules_filter if r not in series]
        if unknown:
            raise CliError(EXIT_USAGE, f"rule(s) not in {samples_csv_path}: {', '.join(unknown)}")
        series = {r: series[r] for r in rules_filter}
    if not series:
        raise CliError(EXIT_DEGENERATE, f"{samples_csv_path} has no samples")
    try:
        svg = density_svg(series)
    except DegenerateSampleError as exc:
        raise CliError(EXIT_DEGENERATE, f"cannot estimate density: {exc}") from None
    try:
        atomic_write_text(out_svg, svg)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write plot: {exc}") from None
    return Path(out_svg)


def cmd_compare(config_path, reps=None):
    cfg = _load(config_path)
    try:
        report = compare(cfg, replications=reps)
    except CompareError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    except (AttentionError, DegenerateSampleError) as exc:
        raise CliError(EXIT_DEGENERATE, str(exc)) from None
    print(report.format_table())
    return report


def cmd_gen_config(name, out_path) -> Path:
    try:
        text = dumps_config(preset(name))
    except ConfigError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from None
    try:
        atomic_write_text(out_path, text)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write config: {exc}") from None
    return Path(out_path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attnscale",
        description="Compare softmax rescalings of dot-product attention by simulation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one experiment and write CSV outputs")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("plot", help="draw KDE panels from samples.csv as SVG")
    p.add_argument("--samples", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--rules", default="", help="comma-separated rule labels (default: all)")

    p = sub.add_parser("compare", help="replicate over seeds and report distortion win rates")
    p.add_argument("--config", required=True)
    p.add_argument("--reps", type=int, default=None, help="replications (default: config value)")

    p = sub.add_parser("gen-config", help="write a preset experiment config")
    p.add_argument("--preset", required=True, help="figure1 or figure2")
    p.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        if args.command == "simulate":
            manifest = cmd_simulate(args.config, args.out)
            log.info("wrote %s (rng %s)", args.out, rng.ALGORITHM)
            print(f"wrote {manifest['outputs']['samples']} and {manifest['outputs']['summary']}")
        elif args.command == "plot":
            rules = [r for r in args.rules.split(",") if r]
            print(f"wrote {cmd_plot(args.samples, args.out, rules)}")
        elif args.command == "compare":
            if args.reps is not None and args.reps < 1:
                raise CliError(EXIT_USAGE, "--reps must be >= 1")
            cmd_compare(args.config, args.reps)
        elif args.command == "gen-config":
            print(f"wrote {cmd_gen_config(args.preset, args.out)}")
    except CliError as exc:
        print(f"attnscale: error: {exc}", file=sys.stderr)
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
