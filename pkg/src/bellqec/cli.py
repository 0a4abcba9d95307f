"""Command-line entry point: ``bellqec {run,table,protocol,verify}``."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import SCENARIOS, ConfigError, ExperimentConfig, parse_p_range, rows_to_csv, rows_to_json, sweep
from .pauli import PauliString

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _csv_list(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bellqec", description="Repetition-encoded Bell pair simulations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="fidelity vs flip probability")
    run.add_argument("--scenario", action="append", default=None,
                     help=f"one or more of {', '.join(SCENARIOS)} (repeat or comma-separate)")
    run.add_argument("--k", default="1", help="code order(s), comma separated")
    run.add_argument("--channel", choices=("bitflip", "phaseflip"), default="bitflip")
    grp = run.add_mutually_exclusive_group()
    grp.add_argument("--p", default=None, help="flip probabilities, comma separated")
    grp.add_argument("--p-range", default=None, metavar="START:STOP:STEP")
    run.add_argument("--method", choices=("exact", "mc", "montecarlo"), default="exact")
    run.add_argument("--samples", type=int, default=100_000)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", default=None)
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--gnuplot", action="store_true", help="also write a .dat file next to --out")
    run.add_argument("--timing", action="store_true", help="record wall_time (breaks byte-stable output)")
    run.add_argument("--workers", type=int, default=1)

    table = sub.add_parser("table", help="export the bit-flip syndrome table as CSV")
    table.add_argument("--k", type=int, default=1)
    table.add_argument("--out", default=None)

    proto = sub.add_parser("protocol", help="run the two-party correction for one error")
    proto.add_argument("--k", type=int, default=1)
    proto.add_argument("--error", required=True, help="e.g. XXIXII (Z-only for phaseflip)")
    proto.add_argument("--channel", choices=("bitflip", "phaseflip"), default="bitflip")
    proto.add_argument("--no-classical", action="store_true")
    proto.add_argument("--trace", default=None, metavar="PATH", help="write the transcript as JSON lines ('-' for stdout)")

    ver = sub.add_parser("verify", help="run the acceptance battery")
    ver.add_argument("--only", action="append", default=None, help="check names, numbers or aliases (eq24, table1)")
    ver.add_argument("--golden-table", default=None, help="override the reference syndrome table CSV")
    ver.add_argument("--quiet", action="store_true")
    return parser


def _config_from_args(args) -> ExperimentConfig:
    scenarios = [s for item in (args.scenario or ["qrc-bipartite-bell"]) for s in _csv_list(item)]
    try:
        ks = tuple(int(k) for k in _csv_list(args.k))
        if args.p_range is not None:
            ps = parse_p_range(args.p_range)
        elif args.p is not None:
            ps = tuple(float(p) for p in _csv_list(args.p))
        else:
            ps = (0.1,)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.workers < 1:
        raise ConfigError("workers must be >= 1")
    return ExperimentConfig(
        scenarios=tuple(scenarios), ks=ks, channel=args.channel, p_values=ps,
        method="montecarlo" if args.method == "mc" else args.method,
        samples=args.samples, seed=args.seed, out=args.out, fmt=args.format,
        timing=args.timing, workers=args.workers,
    )


def _cmd_run(args) -> int:
    config = _config_from_args(args)
    rows = sweep(config, gnuplot=args.gnuplot)
    if config.out is None:
        sys.stdout.write(rows_to_csv(rows) if config.fmt == "csv" else rows_to_json(rows))
    return EXIT_OK


def _cmd_table(args) -> int:
    from .stabilizer import build_syndrome_table

    try:
        table = build_syndrome_table(args.k)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    text = table.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_protocol(args) -> int:
    from .longdistance import run_protocol

    try:
        error = PauliString.from_str(args.error)
        res = run_protocol(args.k, error, not args.no_classical, args.channel)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.trace == "-":
        sys.stdout.write(res.transcript_jsonl(k=args.k))
    elif args.trace:
        Path(args.trace).write_text(res.transcript_jsonl(k=args.k))
    print(f"error      {error.letters}")
    if res.syndrome is not None:
        print(f"syndrome   {res.syndrome}")
    for party, corr in res.corrections.items():
        print(f"{party:<10} {corr.letters}")
    print(f"fidelity   {res.fidelity!r}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    from .verify import format_report, run_checks

    try:
        results = run_checks(args.only, args.golden_table)
    except KeyError as exc:
        raise ConfigError(exc.args[0]) from None
    sys.stdout.write(format_report(results, verbose=not args.quiet))
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


COMMANDS = {"run": _cmd_run, "table": _cmd_table, "protocol": _cmd_protocol, "verify": _cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"bellqec: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"bellqec: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
