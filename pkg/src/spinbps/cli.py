"""Command line interface: bench, moments, selftest."""

from __future__ import annotations

import argparse
import math
import sys

from .harness import SAMPLERS, ExperimentConfig, experiment_to_csv, run_experiment
from .model import mrf_sample
from .oracle import EnumerationInfeasibleError, MomentTable, enumerate_moments
from .selftest import run_selftest


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinbps",
        description="Benchmark event-driven samplers for binary distributions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run a benchmark experiment and emit CSV")
    bench.add_argument("--d", type=int, required=True, help="model dimension")
    bench.add_argument("--sigma-m", type=float, default=0.0, help="coupling scale")
    bench.add_argument("--sigma-r", type=float, default=0.0, help="field scale")
    bench.add_argument("--model-seed", type=int, default=0)
    bench.add_argument("--run-seed", type=int, default=0)
    bench.add_argument("--replicates", type=int, default=30)
    bench.add_argument(
        "--samplers",
        default=",".join(SAMPLERS),
        help=f"comma-separated subset of {','.join(SAMPLERS)}",
    )
    budget = bench.add_mutually_exclusive_group(required=True)
    budget.add_argument("--budget-events", type=int, help="events (or iterations) per run")
    budget.add_argument("--budget-ms", type=int, help="CPU milliseconds per run, calibrated")
    bench.add_argument(
        "--hmc-travel-time-pi",
        type=float,
        default=None,
        help="travel time per iteration in units of pi (default 6.5 up to d=20, else 0.5)",
    )
    bench.add_argument("--first-moments-only", action="store_true")
    bench.add_argument("--burn-in", type=float, default=0.1)
    bench.add_argument("--out", default=None, help="CSV path (default stdout)")
    bench.add_argument("--reference", default=None, help="moment table JSON for scoring")
    bench.add_argument("--no-score", action="store_true", help="skip MSE scoring")

    moments = sub.add_parser("moments", help="enumerate exact moments as JSON")
    moments.add_argument("--d", type=int, required=True)
    moments.add_argument("--sigma-m", type=float, default=0.0)
    moments.add_argument("--sigma-r", type=float, default=0.0)
    moments.add_argument("--model-seed", type=int, default=0)
    moments.add_argument("--out", default=None, help="JSON path (default stdout)")

    sub.add_parser("selftest", help="run the numerical invariant suite")
    return parser


def _cmd_bench(args) -> int:
    reference = None
    if args.reference is not None:
        with open(args.reference, "r", encoding="utf-8") as handle:
            reference = MomentTable.from_json(handle.read())
    config = ExperimentConfig(
        d=args.d,
        sigma_m=args.sigma_m,
        sigma_r=args.sigma_r,
        model_seed=args.model_seed,
        replicates=args.replicates,
        samplers=tuple(name.strip() for name in args.samplers.split(",") if name.strip()),
        budget_events=args.budget_events,
        budget_cpu_millis=args.budget_ms,
        hmc_travel_time=None if args.hmc_travel_time_pi is None else args.hmc_travel_time_pi * math.pi,
        include_second_moments=not args.first_moments_only,
        burn_in_fraction=args.burn_in,
        run_seed_base=args.run_seed,
        score=not args.no_score,
        reference=reference,
    )
    result = run_experiment(config)
    text = experiment_to_csv(result)
    if args.out is None:
        sys.stdout.write(text)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    return 0


def _cmd_moments(args) -> int:
    model = mrf_sample(args.d, args.sigma_m, args.sigma_r, args.model_seed)
    text = enumerate_moments(model).to_json()
    if args.out is None:
        print(text)
    else:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    return 0


def _cmd_selftest() -> int:
    results = run_selftest()
    for check in results:
        mark = "ok  " if check.passed else "FAIL"
        print(f"{mark} {check.name}: {check.detail}")
    return 0 if all(check.passed for check in results) else 1


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "bench":
            return _cmd_bench(args)
        if args.command == "moments":
            return _cmd_moments(args)
        return _cmd_selftest()
    except EnumerationInfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
