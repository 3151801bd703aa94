"""Command-line driver.

Exit codes: 0 success / all properties hold; 1 a property fails (the
counterexample is printed); 2 usage, lexical, parse or type error; 3 a
resource limit was hit.
"""

from __future__ import annotations

import argparse
import sys

from .checker import (
    DEFAULT_MAX_STATES,
    StateLimitExceeded,
    UnsupportedFormula,
    check_spec,
    format_trace,
)
from .errors import SandalError
from .ir import dump_automaton
from .pipeline import BuildResult, build_model
from .smv import emit_smv

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_ERROR = 2
EXIT_LIMIT = 3


def _arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sandalc",
        description="Compile and verify fault-aware message-passing models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="verify the model's ltl properties")
    check.add_argument("input", help="model source file (.sandal)")
    check.add_argument("--fairness", choices=("on", "off"), default="on",
                       help="weak process fairness for liveness (default on)")
    check.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES,
                       help="abort after exploring this many states")
    check.add_argument("--property", type=int, default=None, metavar="N",
                       help="check only the N-th ltl block (1-based)")
    check.add_argument("--report-weave", action="store_true",
                       help="print the fault weaving report")

    compile_ = sub.add_parser("compile", help="emit SMV modules")
    compile_.add_argument("input", help="model source file (.sandal)")
    compile_.add_argument("-o", "--output", required=True, help="output .smv file")
    compile_.add_argument("--fairness", choices=("on", "off"), default="on",
                          help="emit per-process fairness constraints (default on)")

    dump = sub.add_parser("dump-ir", help="print the woven automata")
    dump.add_argument("input", help="model source file (.sandal)")
    dump.add_argument("--report-weave", action="store_true",
                      help="print the fault weaving report")
    return parser


class _CliError(Exception):
    def __init__(self, code: int) -> None:
        self.code = code


def _load(path: str) -> BuildResult:
    try:
        with open(path, encoding="utf-8") as handle:
            source = handle.read()
    except OSError as exc:
        print(f"{path}: {exc.strerror}", file=sys.stderr)
        raise _CliError(EXIT_ERROR)
    try:
        return build_model(source)
    except SandalError as exc:
        print(exc.render(path), file=sys.stderr)
        raise _CliError(EXIT_ERROR)


def _cmd_check(args) -> int:
    built = _load(args.input)
    if args.report_weave:
        print(built.report.render(), end="")
    specs = built.system.ltl_specs
    if not specs:
        print("no ltl properties to check")
        return EXIT_OK
    if args.property is not None:
        if not 1 <= args.property <= len(specs):
            print(f"--property {args.property} out of range (model has "
                  f"{len(specs)} ltl blocks)", file=sys.stderr)
            return EXIT_ERROR
        selected = [(args.property, specs[args.property - 1])]
    else:
        selected = list(enumerate(specs, start=1))
    exit_code = EXIT_OK
    for index, spec in selected:
        print(f"property {index}: {spec.text}")
        try:
            verdict = check_spec(
                built.woven, spec,
                fairness=args.fairness == "on",
                max_states=args.max_states,
            )
        except UnsupportedFormula as exc:
            print(f"{args.input}: property {index}: {exc}", file=sys.stderr)
            return EXIT_ERROR
        except StateLimitExceeded as exc:
            print(f"{args.input}: {exc}", file=sys.stderr)
            return EXIT_LIMIT
        print(verdict.result.value)
        if verdict.counterexample is not None:
            print(format_trace(built.woven, verdict.counterexample), end="")
            exit_code = EXIT_FAIL
    return exit_code


def _cmd_compile(args) -> int:
    built = _load(args.input)
    doc = emit_smv(
        built.system, built.woven.automata, fairness=args.fairness == "on"
    )
    with open(args.output, "w", encoding="utf-8") as handle:
        handle.write(doc.render())
    return EXIT_OK


def _cmd_dump_ir(args) -> int:
    built = _load(args.input)
    if args.report_weave:
        print(built.report.render(), end="")
    for automaton in built.woven.automata:
        print(dump_automaton(automaton, built.system), end="")
    return EXIT_OK


def run(argv: list[str] | None = None) -> int:
    args = _arg_parser().parse_args(argv)
    try:
        if args.command == "check":
            return _cmd_check(args)
        if args.command == "compile":
            return _cmd_compile(args)
        return _cmd_dump_ir(args)
    except _CliError as exc:
        return exc.code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
