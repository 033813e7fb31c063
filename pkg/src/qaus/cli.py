"""Command-line entry point for the experiment drivers.

    qaus schedule-sweep --out results/schedule
    qaus chi-sweep      --out results/chi
    qaus noise-sweep    --out results/noise --seed 0 --workers 1
    qaus thermal-report --out results/thermal
    qaus validate

Common flags: --config PATH (plain-text config or a manifest.json from
a previous run), --out DIR, --seed U64, --workers INT, --epsilon FLOAT,
--n-min/--n-max INT.  Flags override config-file values.  Exit codes:
0 success, 1 configuration error, 2 numerical failure in any run.
"""

import argparse
import sys
from pathlib import Path

from .experiments import (
    ConfigError,
    load_config,
    resolve_config,
    run_chi_sweep,
    run_noise_sweep,
    run_schedule_sweep,
    run_thermal_report,
    run_validate,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

# which config section each subcommand's range/epsilon flags address
_SECTION = {
    "schedule-sweep": "schedule",
    "chi-sweep": "chi",
    "noise-sweep": "noise",
    "thermal-report": "thermal",
    "validate": None,
}

_RUNNERS = {
    "schedule-sweep": run_schedule_sweep,
    "chi-sweep": run_chi_sweep,
    "noise-sweep": run_noise_sweep,
    "thermal-report": run_thermal_report,
    "validate": run_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qaus",
        description="Adiabatic unstructured-search robustness experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", type=Path, default=None,
                       help="config file (INI sections) or manifest.json")
        p.add_argument("--out", type=Path, default=Path("results") / name,
                       help="output directory for CSVs and manifest")
        p.add_argument("--seed", type=int, default=None,
                       help="base seed for stochastic ensembles")
        p.add_argument("--workers", type=int, default=1,
                       help="worker processes (output is identical at any count)")
        p.add_argument("--epsilon", type=float, default=None,
                       help="schedule rate constant override")
        p.add_argument("--n-min", type=int, default=None,
                       help="smallest qubit count override")
        p.add_argument("--n-max", type=int, default=None,
                       help="largest qubit count override")
    return parser


def _overrides(args) -> dict:
    section = _SECTION[args.command]
    overrides = {}
    if args.seed is not None:
        overrides[("noise", "base_seed")] = args.seed
    if section is None:
        return overrides
    if args.epsilon is not None:
        overrides[(section, "epsilon")] = args.epsilon
    if section != "noise":
        if args.n_min is not None:
            overrides[(section, "n_min")] = args.n_min
        if args.n_max is not None:
            overrides[(section, "n_max")] = args.n_max
    return overrides


def _filter_noise_sizes(cfg, n_min, n_max):
    """--n-min/--n-max restrict the noise sweep's explicit size list."""
    if n_min is None and n_max is None:
        return
    sizes = [int(tok) for tok in cfg["noise"]["n"].split(",") if tok.strip()]
    kept = [n for n in sizes
            if (n_min is None or n >= n_min) and (n_max is None or n <= n_max)]
    if not kept:
        raise ConfigError(
            f"no noise sizes remain from {sizes} after applying "
            f"--n-min/--n-max ({n_min}, {n_max})")
    cfg["noise"]["n"] = ",".join(str(n) for n in kept)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_cfg = load_config(args.config) if args.config else None
        cfg = resolve_config(file_cfg, _overrides(args))
        if args.command == "noise-sweep":
            _filter_noise_sizes(cfg, args.n_min, args.n_max)
        if args.workers < 1:
            raise ConfigError(f"--workers must be >= 1, got {args.workers}")
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    runner = _RUNNERS[args.command]
    try:
        failures = runner(cfg, args.out, workers=args.workers)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if failures:
        print(f"{args.command}: {failures} failed runs", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
