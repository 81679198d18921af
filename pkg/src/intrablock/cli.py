"""Command-line front end.

Subcommands::

    intrablock simulate CONFIG [--seed N] [--blocks N] [--out PATH]
    intrablock dispersion 6,5,4,3,3,2,2,2 [--objectives allpairs:ln,...] [--cap N] [--seed N]
    intrablock fit EPSILON ABEL [G] [B]

Exit codes: 0 ok, 1 usage or configuration error, 2 infeasible channel model.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .config import ConfigError, ExperimentConfig, load_config, parse_number
from .ge_channel import ChannelError, abel, fit_from_stats, loss_rate
from .interleaver import (
    ALL_OBJECTIVES,
    DispersionObjective,
    approximate_sequence,
    dispersion,
    fine_tune,
    worst_sequence,
)
from .search import AnnealParams, SearchSpaceExceeded, exhaustive_optimum, simulated_annealing
from .simulator import run_experiment

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 1, 2

__all__ = ["ExperimentConfig", "build_parser", "main"]


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 by default; 2 is reserved
        raise _UsageError(f"{self.prog}: error: {message}")


def _int_vector(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or any(v < 0 for v in values):
        raise argparse.ArgumentTypeError("packet counts must be nonnegative and not all missing")
    return values


def _objectives(text: str) -> tuple[DispersionObjective, ...]:
    try:
        return tuple(DispersionObjective.parse(s) for s in text.split(",") if s.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _number(text: str) -> float:
    try:
        return parse_number(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="intrablock", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sim = sub.add_parser("simulate", help="run the multi-hop throughput simulation")
    sim.add_argument("config", type=Path, help="key = value config file")
    sim.add_argument("--seed", type=int, help="override the master seed")
    sim.add_argument("--blocks", type=int, help="override the block count")
    sim.add_argument("--out", type=Path, help="CSV path (default: config 'out', else stdout)")

    disp = sub.add_parser("dispersion", help="dispersion efficiencies for a packet-count vector")
    disp.add_argument("t", type=_int_vector, help="comma-separated counts, e.g. 6,5,4,3,3,2,2,2")
    disp.add_argument("--objectives", type=_objectives, default=ALL_OBJECTIVES,
                      help="comma list such as allpairs:neg_pe1,neighb:ln (default: all eight)")
    disp.add_argument("--cap", type=int, default=10**8, help="work cap for the exact optimum")
    disp.add_argument("--seed", type=int, default=0, help="annealing seed")

    fit = sub.add_parser("fit", help="GE transition probabilities from loss rate and ABEL")
    fit.add_argument("epsilon", type=_number)
    fit.add_argument("abel", type=_number, help="average burst error length, e.g. 2.5 or 900/299")
    fit.add_argument("g", type=_number, nargs="?", default=0.1)
    fit.add_argument("b", type=_number, nargs="?", default=0.8)
    return parser


def cmd_simulate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    overrides = {k: getattr(args, k) for k in ("seed", "blocks", "out") if getattr(args, k) is not None}
    config = dataclasses.replace(config, **overrides)
    text = run_experiment(config).to_csv()
    if config.out is None:
        sys.stdout.write(text)
    else:
        config.out.write_text(text)
    return EXIT_OK


def _fmt(x: float | None) -> str:
    return "n/a" if x is None else f"{x:.3f}"


def cmd_dispersion(args: argparse.Namespace) -> int:
    alloc = args.t
    alg1 = approximate_sequence(alloc)
    worst = worst_sequence(alloc)
    header = ("objective", "optimum", "alg1", "alg2", "sa", "worst", "sa_worst")
    print("  ".join(f"{h:>16}" if i == 0 else f"{h:>9}" for i, h in enumerate(header)))
    for obj in args.objectives:
        alg2 = fine_tune(alg1, obj)
        params = AnnealParams(seed=args.seed)
        try:
            _, best = exhaustive_optimum(alloc, obj, cap=args.cap)
        except SearchSpaceExceeded:
            best = None
        row = (
            best,
            dispersion(alg1, obj),
            dispersion(alg2, obj),
            dispersion(simulated_annealing(alg2, obj, params), obj),
            dispersion(worst, obj),
            dispersion(simulated_annealing(worst, obj, params), obj),
        )
        print(f"{obj.name:>16}  " + "  ".join(f"{_fmt(x):>9}" for x in row))
    return EXIT_OK


def cmd_fit(args: argparse.Namespace) -> int:
    model = fit_from_stats(args.epsilon, args.abel, args.g, args.b)
    for name in ("p", "q"):
        value = getattr(model, name)
        approx = Fraction(value).limit_denominator(10_000)
        exact = f"  (~{approx})" if abs(float(approx) - value) < 1e-12 else ""
        print(f"{name} = {value!r}{exact}")
    print(f"# check: loss rate {loss_rate(model)!r}, ABEL {abel(model)!r}")
    return EXIT_OK


_COMMANDS = {"simulate": cmd_simulate, "dispersion": cmd_dispersion, "fit": cmd_fit}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except ChannelError as exc:
        print(f"intrablock: infeasible channel model: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, OSError, ValueError) as exc:
        print(f"intrablock: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
