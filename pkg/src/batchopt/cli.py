"""Command line entry point: ``batchopt run|bench|trace``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .harness import (
    ALGORITHMS,
    HORIZONS,
    ExperimentSpec,
    aggregate_traces,
    cell_dir,
    normalize_algorithm,
    summary_csv,
    run_experiment,
)
from .plant import PlantConfig


def _load_overrides(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    unknown = set(data) - {"ea", "psaf", "plant"}
    if unknown:
        raise ValueError(f"unknown config sections: {sorted(unknown)}")
    return data


def _spec(args, horizons, algorithms) -> ExperimentSpec:
    cfg = _load_overrides(args.config)
    plant = PlantConfig.from_dict(cfg["plant"]) if "plant" in cfg else None
    return ExperimentSpec(
        preset=args.preset,
        horizons=horizons,
        algorithms=algorithms,
        n_trials=args.trials,
        base_seed=args.seed,
        ea=cfg.get("ea", {}),
        psaf=cfg.get("psaf", {}),
        plant=plant,
    )


def _horizon(text: str) -> float:
    h = float(text.rstrip("hH"))
    return int(h) if h.is_integer() else h


def cmd_run(args) -> int:
    spec = _spec(args, [args.horizon], [normalize_algorithm(args.algo)])
    reports = run_experiment(spec, args.out, workers=args.workers)
    sys.stdout.write(summary_csv(reports))
    return 0


def cmd_bench(args) -> int:
    horizons = [_horizon(h) for h in args.horizons] if args.horizons else list(HORIZONS)
    algos = [normalize_algorithm(a) for a in args.algos] if args.algos else list(ALGORITHMS)
    spec = _spec(args, horizons, algos)
    reports = run_experiment(spec, args.out, workers=args.workers)
    sys.stdout.write(summary_csv(reports))
    return 0


def cmd_trace(args) -> int:
    out = Path(args.out)
    directory = cell_dir(out, args.preset, normalize_algorithm(args.algo), args.horizon)
    if not directory.is_dir():
        raise FileNotFoundError(f"no trial traces under {directory}")
    text = aggregate_traces(directory).to_csv()
    if args.dest:
        Path(args.dest).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="batchopt", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--preset", choices=("primary", "variant"), default="primary")
        p.add_argument("--trials", type=int, default=30)
        p.add_argument("--seed", type=int, default=0, help="trial i uses seed + i")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--config", help="JSON file with 'ea', 'psaf' and/or 'plant' overrides")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("run", help="one algorithm at one horizon")
    common(p)
    p.add_argument("--horizon", type=_horizon, required=True)
    p.add_argument("--algo", required=True, help="ga, de, psaf-ga or psaf-de")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="full algorithm x horizon table")
    common(p)
    p.add_argument("--horizons", nargs="*")
    p.add_argument("--algos", nargs="*")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("trace", help="median best-so-far per generation over trials")
    p.add_argument("--preset", choices=("primary", "variant"), default="primary")
    p.add_argument("--horizon", type=_horizon, required=True)
    p.add_argument("--algo", required=True)
    p.add_argument("--out", required=True, help="directory written by run/bench")
    p.add_argument("--dest", help="write the gens,OV file here instead of stdout")
    p.set_defaults(func=cmd_trace)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, KeyError, TypeError) as exc:
        print(f"batchopt: error: {exc}", file=sys.stderr)
        return 2
