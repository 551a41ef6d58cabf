"""Command line interface.

Subcommands: trace, sweep-time, sweep-kappa, validate. Exit codes: 0 on
success, 1 on a failed validation or physics error, 2 on a config error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .errors import ConfigError, SimulationError
from .runner import (
    PRESET_NAMES,
    load_config_file,
    load_preset,
    parse_config,
    run_kappa_sweep,
    run_time_sweep,
    run_trace,
    validate,
    with_steps_override,
)


def _add_common_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--config", metavar="PATH", help="JSON config file")
    parser.add_argument(
        "--preset", metavar="NAME", choices=PRESET_NAMES, help=f"one of {', '.join(PRESET_NAMES)}"
    )
    parser.add_argument("--out", metavar="PATH", help="CSV output path (default: stdout)")
    parser.add_argument("--steps", type=int, metavar="N", help="override integrator step count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jclattice",
        description="Single-excitation Jaynes-Cummings lattice simulator with "
        "local counterdiabatic driving",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("trace", "run one protocol and emit the recorded time series"),
        ("sweep-time", "sweep the total ramp time and emit final infidelities"),
        ("sweep-kappa", "sweep the cavity decay rate and emit final infidelities"),
        ("validate", "run the oracle consistency suite against this config"),
    ):
        _add_common_arguments(sub.add_parser(name, help=help_text))
    return parser


def _load(args):
    if (args.config is None) == (args.preset is None):
        raise ConfigError("provide exactly one of --config or --preset")
    raw = load_preset(args.preset) if args.preset else load_config_file(args.config)
    if args.steps is not None:
        raw = with_steps_override(raw, args.steps)
    return parse_config(raw)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _load(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "validate":
            report = validate(config)
            print(report.format())
            return 0 if report.passed else 1
        table = {
            "trace": run_trace,
            "sweep-time": run_time_sweep,
            "sweep-kappa": run_kappa_sweep,
        }[args.command](config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        table.write(args.out or config.output)
    except BrokenPipeError:
        # Downstream consumer (head, less, ...) closed the pipe; park stdout
        # on devnull so the interpreter's exit flush stays quiet.
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
    return 0


if __name__ == "__main__":
    sys.exit(main())
