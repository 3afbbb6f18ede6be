"""Command-line front end: ``run``, ``check``, ``mutate`` and ``difftest``."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import Optional

from .errors import EntryNotFound, STError
from .interp import DEFAULT_TIMEOUT_S, Abnormal, Interpreter, Success, Timeout, fuel_for, outcome_text, run
from .syntax import parse_source

EXIT_ABNORMAL = 1
EXIT_TIMEOUT = 124
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would exit 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        print(f"error: cannot read {path}: {exc}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE) from None


def _error_line(line: int, kind: str, message: str) -> str:
    return f"ERROR line={line} kind={kind} msg={message}"


def cmd_run(args, engine: type = Interpreter) -> int:
    source = _read(args.program)
    try:
        unit = parse_source(source)
    except STError as exc:
        print(_error_line(exc.line or 0, exc.kind, exc.message), file=sys.stderr)
        return EXIT_ABNORMAL
    fuel = args.fuel if args.fuel is not None else fuel_for(args.timeout)
    try:
        outcome = run(unit, args.entry, fuel=fuel, timeout_s=args.timeout, engine=engine)
    except EntryNotFound as exc:
        print(_error_line(0, exc.kind, exc.message), file=sys.stderr)
        return EXIT_ABNORMAL
    if isinstance(outcome, Success):
        sys.stdout.write(outcome_text(outcome))
        return 0
    if isinstance(outcome, Abnormal):
        print(_error_line(outcome.line, outcome.error_kind, outcome.message), file=sys.stderr)
        return EXIT_ABNORMAL
    assert isinstance(outcome, Timeout)
    print("TIMEOUT", file=sys.stderr)
    return EXIT_TIMEOUT


def cmd_check(args) -> int:
    status = 0
    for path in args.programs:
        source = _read(path)
        try:
            unit = parse_source(source)
            Interpreter(unit).preprocess()
        except STError as exc:
            col = getattr(exc, "column", None)
            where = f"{path}:{exc.line or 0}" + (f":{col}" if col else "")
            print(f"{where}: {exc.kind}: {exc.message}", file=sys.stderr)
            status = 1
            continue
        print(f"{path}: ok")
    return status


def _plan(args):
    from .mutate import MutationPlan

    return MutationPlan(
        rng_seed=args.seed, rounds=args.rounds, mutants_per_seed=args.per_seed, max_ops_per_mutant=args.max_ops
    )


def cmd_mutate(args) -> int:
    from .mutate import mutate_corpus, write_corpus

    units = []
    for p in args.seeds:
        try:
            units.append(parse_source(_read(p)))
        except STError as exc:
            print(f"{p}: {exc}", file=sys.stderr)
            return EXIT_ABNORMAL
    mutants = mutate_corpus(units, _plan(args))
    try:
        write_corpus(mutants, Path(args.out), list(args.seeds))
    except OSError as exc:
        print(f"error: cannot write to {args.out}: {exc}", file=sys.stderr)
        return EXIT_ABNORMAL
    print(f"seeds: {len(units)}  mutants: {len(mutants)}  programs: {len(units) + len(mutants)}")
    return 0


def cmd_difftest(args) -> int:
    from .difftest import AdapterError, EngineAdapter, campaign

    try:
        adapter = EngineAdapter.load(args.adapter)
        plan = _plan(args) if args.rounds > 0 else None
        report = campaign(args.seeds, plan, adapter, args.jobs, timeout_s=args.timeout)
    except (AdapterError, OSError, STError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        report.write(args.out)
    print(report.summary())
    for row in report.inconsistent:
        print(f"INCONSISTENT {row.program}: {row.reason} {row.details} ({row.reference} vs {row.external})")
    return 1 if report.inconsistent else 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stref", description="Structured Text reference interpreter and differential tester.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="execute a program and print its final variable snapshot")
    r.add_argument("program")
    r.add_argument("--entry", default="MAIN")
    r.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT_S, help="seconds (default 10)")
    r.add_argument("--fuel", type=int, default=None, help="step budget (default derived from --timeout)")

    c = sub.add_parser("check", help="parse and preprocess without running")
    c.add_argument("programs", nargs="+")

    def campaign_flags(sp, rounds_default: int) -> None:
        sp.add_argument("seeds", nargs="+")
        sp.add_argument("--seed", type=int, default=0, help="rng seed")
        sp.add_argument("--rounds", type=int, default=rounds_default)
        sp.add_argument("--per-seed", type=int, default=10)
        sp.add_argument("--max-ops", type=int, default=3)

    m = sub.add_parser("mutate", help="write a mutant corpus and manifest")
    campaign_flags(m, 3)
    m.add_argument("--out", required=True)

    d = sub.add_parser("difftest", help="compare the reference against an external engine")
    campaign_flags(d, 3)
    d.add_argument("--adapter", required=True, help="JSON or TOML adapter config")
    d.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    d.add_argument("--timeout", type=float, default=None, help="override the adapter timeout")
    d.add_argument("--out", default=None, help="directory for report.jsonl and summary.json")
    return p


def main(argv: Optional[list[str]] = None, engine: type = Interpreter) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args, engine)
    if args.command == "check":
        return cmd_check(args)
    if args.command == "mutate":
        return cmd_mutate(args)
    return cmd_difftest(args)


if __name__ == "__main__":
    sys.exit(main())
