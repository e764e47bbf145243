"""Command-line driver.

Exit codes: 0 when every requested check passes, 1 when a check fails, 2 on
usage, parse or elaboration errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..completions import COMPLETIONS, CompletionError
from ..doctrine import DoctrineError
from ..examples import FixtureSpec, two_chain
from ..fincat import WindowError
from ..infsl import LatticeError
from ..report import Report
from ..verify import PROPERTIES, SuiteConfig, check_laws, check_universal_q, check_universal_x, run_suite
from .dsl import DSLError, loads
from .export import EXPORTERS

FIXTURES = {
    "finset-sub": "finset_sub",
    "finset-weaksub": "finset_weaksub",
    "posetal": "posetal",
    "blur": "blur",
    "nonfull": "nonfull",
    "terminal": "terminal",
    "chain2": "chain2",
}


def build_fixture(kind: str, size: int | None = None):
    if kind == "chain2":
        return two_chain()
    if kind == "posetal" and size is None:
        size = 2
    return FixtureSpec(kind, size or 0).build()


class UsageError(Exception):
    pass


def _fixture(spec: str):
    """``finset-sub:4``, ``posetal:2``, ``blur`` ..."""
    kind, _, arg = spec.partition(":")
    if kind not in FIXTURES:
        return None
    try:
        size = int(arg) if arg else None
    except ValueError:
        raise UsageError(f"fixture size must be an integer: {spec!r}") from None
    if size is not None and size < 0:
        raise UsageError("fixture size must be >= 0")
    return build_fixture(FIXTURES[kind], size)


def load_input(src: str | None):
    if src is None or src == "-":
        if sys.stdin.isatty():
            raise UsageError("no input given and stdin is a terminal")
        return loads(sys.stdin.read(), name="stdin")
    p = Path(src)
    if p.exists():
        return loads(p.read_text(), name=p.stem)
    P = _fixture(src)
    if P is None:
        raise UsageError(f"no such file or fixture: {src!r}")
    return P


def _emit_report(rep: Report, as_json: bool, quiet: bool) -> None:
    if as_json:
        print(rep.to_json())
    elif not quiet:
        print(rep.to_text())
    else:
        print(json.dumps(rep.counts(), sort_keys=True))


def _write(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_check(a) -> int:
    P = load_input(a.input)
    rep = check_laws(P, require=a.require or ())
    _emit_report(rep, a.json, a.quiet)
    return 0 if rep.ok else 1


def cmd_complete(a) -> int:
    P = load_input(a.input)
    try:
        res = COMPLETIONS[a.kind](P, strict=False)
    except CompletionError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    _write(EXPORTERS[a.format](res.doctrine), a.output)
    if not res.report.ok:
        for ln in res.report.failures():
            print(f"failed: {ln.check} {json.dumps(ln.witness)}", file=sys.stderr)
        return 1
    return 0


def cmd_verify(a) -> int:
    P = load_input(a.input)
    if a.universal:
        Z = load_input(a.universal)
        fn = check_universal_q if a.kind == "q" else check_universal_x
        rep = fn(P, Z, a.budget)
    else:
        cfg = SuiteConfig(completions=tuple(a.completions) if a.completions is not None else SuiteConfig.completions,
                          require=tuple(a.require) if a.require is not None else SuiteConfig.require)
        rep = run_suite(P, cfg)
    _emit_report(rep, a.json, a.quiet)
    return 0 if rep.ok else 1


def cmd_export(a) -> int:
    P = load_input(a.input)
    _write(EXPORTERS[a.format](P), a.output)
    return 0


def cmd_fixture(a) -> int:
    kind = FIXTURES.get(a.kind)
    if kind is None:
        raise UsageError(f"unknown fixture {a.kind!r}")
    P = build_fixture(kind, a.size)
    _write(EXPORTERS[a.format](P), a.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="eqcompletion", description="Finite-window checker for elementary doctrines "
                                 "and their quotient completions.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def reporting(p):
        p.add_argument("--json", action="store_true", help="print the report as JSON")
        p.add_argument("-q", "--quiet", action="store_true", help="print only status counts")

    p = sub.add_parser("check", help="structural and elementary laws")
    p.add_argument("input", nargs="?", help="file, fixture spec such as finset-sub:4, or - for stdin")
    p.add_argument("--require", nargs="*", choices=PROPERTIES, help="properties that must hold")
    reporting(p)
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("complete", help="build a completion")
    p.add_argument("--kind", required=True, choices=sorted(COMPLETIONS))
    p.add_argument("input", nargs="?")
    p.add_argument("-o", "--output")
    p.add_argument("--format", default="json", choices=sorted(EXPORTERS))
    p.set_defaults(fn=cmd_complete)

    p = sub.add_parser("verify", help="full suite, or a universal property against --universal Z")
    p.add_argument("input", nargs="?")
    p.add_argument("--universal", metavar="Z")
    p.add_argument("--kind", default="q", choices=["q", "x"], help="which universal property")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--completions", nargs="*", choices=sorted(COMPLETIONS))
    p.add_argument("--require", nargs="*", choices=PROPERTIES)
    reporting(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("export", help="write a doctrine as json, dot or dsl")
    p.add_argument("input", nargs="?")
    p.add_argument("--format", default="json", choices=sorted(EXPORTERS))
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("fixture", help="emit a built-in fixture")
    p.add_argument("kind", help=", ".join(FIXTURES))
    p.add_argument("size", nargs="?", type=int)
    p.add_argument("--format", default="json", choices=sorted(EXPORTERS))
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_fixture)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    try:
        return a.fn(a)
    except (UsageError, DSLError, LatticeError, WindowError, DoctrineError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
