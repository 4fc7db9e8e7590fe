"""``istarc`` command line.

Exit codes: 0 clean, 1 parse or validation errors (or ``fmt --check`` found
non-canonical input), 2 usage or I/O errors. With several input files each is
processed independently and the worst code wins.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path
from typing import TextIO

from . import __version__
from .diagnostics import Diagnostic, Severity
from .dsl import ParseError, format_model, parse_bytes
from .exporters import diagnostics_to_machine, to_graph_text, to_interchange
from .model import Model
from .validator import validate
from .views import ViewKind, project

EXIT_OK, EXIT_ERRORS, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        raise UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--diagnostics",
        choices=["human", "machine"],
        default="human",
        help="diagnostic output format (machine = one JSON object per line)",
    )
    common.add_argument("inputs", nargs="+", metavar="FILE", help=".istar input files")

    parser = _ArgumentParser(prog="istarc", description="iStar 2.0 model toolchain")
    parser.add_argument("--version", action="version", version=f"istarc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    sub.add_parser("check", parents=[common], help="parse and validate models")

    view = sub.add_parser("view", parents=[common], help="project a view and emit DOT")
    view.add_argument("--kind", required=True, choices=[k.value for k in ViewKind])
    view.add_argument(
        "--open",
        action="append",
        default=[],
        metavar="ACTOR",
        help="actor name or local id to open in a hybrid view (repeatable)",
    )
    view.add_argument("-o", "--output", type=Path, help="write to this file instead of stdout")

    export = sub.add_parser("export", parents=[common], help="export the full model")
    export.add_argument("--format", required=True, choices=["json", "dot"])
    export.add_argument("-o", "--output", type=Path, help="write to this file instead of stdout")

    fmt = sub.add_parser("fmt", parents=[common], help="print or rewrite models in canonical form")
    fmt.add_argument("--write", action="store_true", help="rewrite files in place")
    fmt.add_argument("--check", action="store_true", help="exit 1 if any file is not canonical")
    return parser


class _Console:
    def __init__(self, args: argparse.Namespace, stdout: TextIO, stderr: TextIO) -> None:
        self.args = args
        self.stdout = stdout
        self.stderr = stderr

    def color(self, stream: TextIO) -> bool:
        return "NO_COLOR" not in os.environ and getattr(stream, "isatty", lambda: False)()

    def report(self, diags: list[Diagnostic], stream: TextIO) -> None:
        if not diags:
            return
        if self.args.diagnostics == "machine":
            stream.write(diagnostics_to_machine(diags))
            return
        for d in diags:
            stream.write(human(d, self.color(stream)) + "\n")
        stream.flush()

    def fail(self, message: str) -> int:
        self.stderr.write(f"istarc: {message}\n")
        return EXIT_USAGE


def human(d: Diagnostic, color: bool = False) -> str:
    loc = d.primary
    if loc.span is not None:
        where = f"{loc.span.file}:{loc.span.start_line}:{loc.span.start_col}"
    else:
        where = ":".join(x for x in (loc.file_name, loc.path) if x) or "<model>"
    label = f"{d.severity.value}[{d.code}]"
    if color:
        label = ("\033[1;31m" if d.severity is Severity.ERROR else "\033[1;33m") + label + "\033[0m"
    subject = f" ({loc.id})" if loc.id else ""
    return f"{where}: {label} {d.title}{subject}: {d.message}"


def _load(path: str, console: _Console, diag_stream: TextIO) -> tuple[Model | None, str | None, int]:
    """Read and parse one file; returns (model, text, exit code)."""
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        return None, None, console.fail(f"cannot read {path}: {exc.strerror or exc}")
    try:
        model, warnings = parse_bytes(data, path)
    except ParseError as exc:
        console.report(exc.diagnostics, diag_stream)
        return None, None, EXIT_ERRORS
    console.report(warnings, diag_stream)
    return model, data.decode("utf-8").removeprefix("\ufeff"), EXIT_OK


def _resolve_open(model: Model, names: list[str]) -> list[str]:
    ids = []
    for name in names:
        by_alias = [a.id for a in model.actors.values() if a.alias == name]
        by_name = [a.id for a in model.actors.values() if a.name == name]
        hits = by_alias or by_name
        if not hits:
            raise UsageError(f"--open {name!r}: no actor with that name or local id")
        if len(hits) > 1:
            raise UsageError(
                f"--open {name!r}: {len(hits)} actors share that name; give them 'as <id>' local ids and pass the id"
            )
        ids.append(hits[0])
    return ids


def _cmd_check(args, console: _Console) -> int:
    worst = EXIT_OK
    for path in args.inputs:
        model, _, code = _load(path, console, console.stdout)
        if model is not None:
            diags = validate(model)
            console.report(diags, console.stdout)
            if any(d.is_error for d in diags):
                code = EXIT_ERRORS
        worst = max(worst, code)
    return worst


def _emit(args, console: _Console, render) -> int:
    worst, chunks = EXIT_OK, []
    for path in args.inputs:
        model, _, code = _load(path, console, console.stderr)
        if model is not None:
            diags = [d for d in validate(model) if d.is_error]
            if diags:
                console.report(diags, console.stderr)
                code = EXIT_ERRORS
            else:
                try:
                    chunks.append(render(model))
                except UsageError as exc:
                    code = console.fail(str(exc))
        worst = max(worst, code)
    if chunks:
        text = "".join(chunks)
        if args.output is not None:
            try:
                args.output.write_text(text, encoding="utf-8")
            except OSError as exc:
                return console.fail(f"cannot write {args.output}: {exc.strerror or exc}")
        else:
            console.stdout.write(text)
    return worst


def _cmd_view(args, console: _Console) -> int:
    def render(model: Model) -> str:
        opened = _resolve_open(model, args.open) if args.kind == "hybrid" else []
        return to_graph_text(project(model, args.kind, opened))

    if args.open and args.kind != "hybrid":
        return console.fail("--open is only meaningful with --kind hybrid")
    return _emit(args, console, render)


def _cmd_export(args, console: _Console) -> int:
    if args.format == "json":
        return _emit(args, console, to_interchange)
    return _emit(args, console, lambda m: to_graph_text(project(m, ViewKind.SR)))


def _cmd_fmt(args, console: _Console) -> int:
    worst = EXIT_OK
    for path in args.inputs:
        model, text, code = _load(path, console, console.stderr)
        if model is not None:
            canonical = format_model(model)
            if args.check and canonical != text:
                console.stderr.write(f"{path}: not in canonical form\n")
                code = EXIT_ERRORS
            if args.write:
                if canonical != text:
                    try:
                        Path(path).write_text(canonical, encoding="utf-8")
                    except OSError as exc:
                        code = console.fail(f"cannot write {path}: {exc.strerror or exc}")
            elif not args.check:
                console.stdout.write(canonical)
        worst = max(worst, code)
    return worst


_COMMANDS = {"check": _cmd_check, "view": _cmd_view, "export": _cmd_export, "fmt": _cmd_fmt}


def run(argv: list[str], stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    console = _Console(args, stdout, stderr)
    return _COMMANDS[args.command](args, console)


def main() -> None:
    sys.exit(run(sys.argv[1:]))
