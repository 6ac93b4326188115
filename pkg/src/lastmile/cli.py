"""Command line entry point.

Exit codes: 0 success, 1 scenario schema error, 2 runtime error, 64 usage error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from typing import Sequence

from .errors import InvalidParams, SchemaError
from .network import generate_scenario
from .results import ResultsBundle, write_results
from .scenario_io import config_hash, parse_scenario, write_scenario
from .simulation import compare_strategies, run_simulation

EXIT_OK = 0
EXIT_SCHEMA = 1
EXIT_RUNTIME = 2
EXIT_USAGE = 64

log = logging.getLogger("lastmile")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _rings(text: str) -> list[float]:
    try:
        radii = [float(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("rings must be four comma-separated numbers")
    if len(radii) != 4:
        raise argparse.ArgumentTypeError("rings must be four comma-separated numbers")
    return radii


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--verbose", "-v", action="store_true", help="dump every route")
    parser = _Parser(prog="lastmile", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    gen = sub.add_parser("generate", parents=[common], help="write a synthetic concentric-ring scenario")
    gen.add_argument("--rings", type=_rings, required=True, metavar="R1,R2,R3,R4")
    gen.add_argument("--centroids", type=int, required=True)
    gen.add_argument("--destinations", type=int, required=True)
    gen.add_argument("--vans", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--mean-daily", type=float, default=40.0)
    gen.add_argument("--days", type=int, default=30)
    gen.add_argument("--out", required=True)

    for name, text in (("run", "simulate the centroid strategy"), ("compare", "centroid strategy vs direct delivery")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--scenario", required=True)
        p.add_argument("--days", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--out", required=True)
        p.add_argument("--workers", type=int, default=1, help="threads for route planning")
    return parser


def _load(args):
    spec = parse_scenario(args.scenario)
    if args.seed is not None:
        spec = dataclasses.replace(spec, demand=dataclasses.replace(spec.demand, seed=args.seed))
    if args.days is not None:
        if args.days < 1:
            raise UsageError("--days must be at least 1")
        spec = dataclasses.replace(spec, horizon_days=args.days)
    return spec


def _print_routes(result) -> None:
    for rec in result.days:
        if rec.resupply is not None:
            print(
                f"day {rec.day} resupply {list(rec.resupply.stops)} "
                f"closed={rec.resupply.minutes:.2f}min open={rec.resupply.open_minutes:.2f}min"
            )
        for vid in sorted(rec.plans):
            plan = rec.plans[vid]
            for visit in plan.visits:
                for k, trip in enumerate(visit.trips):
                    r = trip.route
                    print(
                        f"day {rec.day} van {vid} centroid {visit.centroid} trip {k}: "
                        f"{list(r.ordered_stops)} cost={r.cost:.2f} km={r.distance_km:.2f}"
                    )


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage().rstrip())
        if args.command == "generate":
            spec = generate_scenario(
                args.rings, args.centroids, args.destinations, args.vans, args.seed,
                mean_daily_packages=args.mean_daily, horizon_days=args.days,
            )
            write_scenario(spec, args.out)
            return EXIT_OK
        spec = _load(args)
        if args.command == "run":
            result = run_simulation(spec, workers=args.workers)
            comparison = None
        else:
            comparison = compare_strategies(spec, workers=args.workers)
            result = comparison.centroid
        if args.verbose:
            _print_routes(result)
        bundle = ResultsBundle(result, spec.demand.seed, config_hash(spec), comparison, args.verbose)
        write_results(bundle, args.out)
        return EXIT_OK
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SchemaError as exc:
        for path, message in exc.violations:
            print(f"schema error at {path}: {message}", file=sys.stderr)
        return EXIT_SCHEMA
    except InvalidParams as exc:
        print(f"invalid parameters: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # noqa: BLE001
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
