"""Command-line driver: ``lnlfpc {check,run,elab,repl,oracle-grid}``.

Exit codes: 0 success, 1 parse/type error, 2 out of fuel, 3 stuck, 4 usage.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import prelude_module
from .core import LIST_NAT, NAT, sexpr
from .diagnostics import Diagnostic, LnlError
from .elaborator import Elaborator
from .evaluator import DEFAULT_FUEL, OutOfFuel, Stuck, Value, evaluate
from .oracle import decode_list_nat, decode_nat, run_grid
from .parser import parse_module, parse_term
from .pretty import show_core_type, show_core_term
from .typechecker import check_program, type_of

EXIT_OK, EXIT_ERROR, EXIT_FUEL, EXIT_STUCK, EXIT_USAGE = range(5)


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fuel(text: str) -> int:
    try:
        value = float(text) if any(c in text for c in ".eE") else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid fuel {text!r}") from None
    if value != int(value) or value < 1:
        raise argparse.ArgumentTypeError("fuel must be a positive integer")
    return int(value)


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=_fuel, default=DEFAULT_FUEL,
                        help=f"evaluation step budget (default {DEFAULT_FUEL})")
    common.add_argument("--decode", choices=["nat", "list-nat"], default=None,
                        help="print the value of main as a number or a list of numbers")
    common.add_argument("--json", action="store_true", help="diagnostics as a JSON array on stdout")
    common.add_argument("--no-prelude", dest="prelude", action="store_false",
                        help="do not load the standard prelude")

    parser = _ArgumentParser(prog="lnlfpc", description="LNL-FPC toolchain")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)
    for name, help_text in [("check", "type check a file"),
                            ("run", "check a file and evaluate its main term"),
                            ("elab", "print the elaborated core program")]:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("file")
    p = sub.add_parser("repl", parents=[common], help="evaluate one term per input line")
    p.add_argument("file", nargs="?")
    p = sub.add_parser("oracle-grid", parents=[common],
                       help="compare the checker with the derivation search on the term grid")
    p.add_argument("--max-size", type=int, default=7)
    return parser


@dataclass
class CliConfig:
    command: str
    file: str | None
    fuel: int = DEFAULT_FUEL
    decode: str | None = None
    json: bool = False
    prelude: bool = True
    max_size: int = 7

    @classmethod
    def from_args(cls, argv) -> CliConfig:
        ns = build_parser().parse_args(argv)
        config = cls(ns.command, getattr(ns, "file", None), ns.fuel, ns.decode, ns.json,
                     ns.prelude, getattr(ns, "max_size", 7))
        if config.decode is not None and config.command != "run":
            raise UsageError("lnlfpc: --decode is only valid with run")
        return config


# -- output helpers -----------------------------------------------------------

def format_value(term, decode: str | None) -> str:
    match decode:
        case "nat":
            return str(decode_nat(term))
        case "list-nat":
            return "[" + ", ".join(map(str, decode_list_nat(term))) + "]"
    return sexpr(term)


def decoding_for(ty) -> str | None:
    """The ``--decode`` mode matching a type, used by the REPL."""
    if ty == NAT:
        return "nat"
    if ty == LIST_NAT:
        return "list-nat"
    return None


def program_sexpr(program) -> str:
    lines = [f'  (def "{d.name}" {sexpr(d.type)} {sexpr(d.body)})' for d in program.definitions]
    if program.main is not None:
        lines.append(f"  (main {sexpr(program.main)})")
    return "(program\n" + "\n".join(lines) + ")" if lines else "(program)"


class Session:
    def __init__(self, config: CliConfig, out=None, err=None):
        self.config = config
        self.out = out or sys.stdout
        self.err = err or sys.stderr

    def report(self, diagnostics: list[Diagnostic]) -> int:
        if self.config.json:
            print(json.dumps([d.to_json() for d in diagnostics]), file=self.out)
        else:
            for d in diagnostics:
                print(d.render(self.config.file or "<stdin>"), file=self.err)
        return EXIT_ERROR

    def module(self):
        """The user's module (or ``None`` for a bare repl) and the merged scope."""
        user = None
        if self.config.file is not None:
            with open(self.config.file, encoding="utf-8") as fh:
                user = parse_module(fh.read())
        scope = prelude_module() if self.config.prelude else None
        if user is not None:
            scope = scope.merged_with(user) if scope is not None else user
        if scope is None:
            scope = parse_module("")
        return user, scope

    def run(self) -> int:
        handler = getattr(self, "cmd_" + self.config.command.replace("-", "_"))
        try:
            return handler()
        except LnlError as exc:
            return self.report(exc.diagnostics)

    def cmd_check(self) -> int:
        user, scope = self.module()
        elab = Elaborator(scope)
        program = elab.run()
        types = dict(check_program(program))
        if self.config.json:
            print("[]", file=self.out)
            return EXIT_OK
        for d in user.definitions:
            print(f"{d.name} : {show_core_type(types[d.name])}", file=self.out)
        if user.main is not None:
            print(f"main : {show_core_type(types['main'])}", file=self.out)
        return EXIT_OK

    def cmd_elab(self) -> int:
        _, scope = self.module()
        print(program_sexpr(Elaborator(scope).run()), file=self.out)
        return EXIT_OK

    def cmd_run(self) -> int:
        _, scope = self.module()
        program = Elaborator(scope).run()
        check_program(program)
        if program.main is None:
            return self.report([Diagnostic("E-NO-MAIN", "the program has no main term")])
        return self.show_outcome(evaluate(program.main, self.config.fuel), self.config.decode)

    def show_outcome(self, outcome, decode) -> int:
        match outcome:
            case Value(v):
                print(format_value(v, decode), file=self.out)
                return EXIT_OK
            case OutOfFuel():
                print(f"out of fuel (budget {self.config.fuel})", file=self.err)
                return EXIT_FUEL
            case Stuck(term, reason):
                print(f"stuck: {reason} at {show_core_term(term)}", file=self.err)
                return EXIT_STUCK

    def cmd_repl(self, lines=None) -> int:
        _, scope = self.module()
        elab = Elaborator(scope)
        check_program(elab.run())
        interactive = lines is None and sys.stdin.isatty()
        source = iter(lines) if lines is not None else sys.stdin
        while True:
            if interactive:
                print("> ", end="", file=self.out, flush=True)
            line = _next_line(source)
            if line is None:
                break
            text = line.strip()
            if not text or text.startswith("--"):
                continue
            try:
                term = elab.elaborate_term(parse_term(text))
                ty = type_of(term)
            except LnlError as exc:
                self.report(exc.diagnostics)
                continue
            print(f"- : {show_core_type(ty)}", file=self.out)
            self.show_outcome(evaluate(term, self.config.fuel), decoding_for(ty))
        return EXIT_OK

    def cmd_oracle_grid(self) -> int:
        def progress(r):
            if not self.config.json:
                print(f"  context {r.contexts}: {r.judgements} judgements so far", file=self.err)

        report = run_grid(self.config.max_size, progress=progress)
        stats = {
            "max_size": report.max_size,
            "contexts": report.contexts,
            "judgements": report.judgements,
            "accepted": report.accepted,
            "disagreements": len(report.disagreements),
            "agreement": report.agreement,
            "seconds": round(report.seconds, 2),
        }
        if self.config.json:
            print(json.dumps(stats), file=self.out)
        else:
            for key, value in stats.items():
                print(f"{key}: {value}", file=self.out)
            for ctx, term, ty, fast, slow in report.disagreements[:20]:
                print(f"DISAGREE ctx={[show_core_type(t) for t in ctx]} term={sexpr(term)} "
                      f"type={show_core_type(ty)} checker={fast} search={slow}", file=self.out)
        return EXIT_OK if not report.disagreements else EXIT_ERROR


def _next_line(source):
    if hasattr(source, "readline"):
        line = source.readline()
        return line if line else None
    try:
        return next(source)
    except StopIteration:
        return None


def main(argv=None) -> int:
    try:
        config = CliConfig.from_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK
    try:
        return Session(config).run()
    except OSError as exc:
        print(f"lnlfpc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
