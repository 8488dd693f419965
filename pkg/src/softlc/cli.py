"""Command-line front end.

Commands: check (termhood verdicts), stats (metrics and certificate),
reduce (normalize a definition), type (run the checker), demo (the
encoded sort/map programs), bound-check (exhaustive length-bound
verification over small enumerated terms).

Exit codes: 0 success, 1 usage or parse failure, 2 static failure
(termhood or typing), 3 dynamic invariant violation.  With --json the
only stdout output is a single JSON document; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections.abc import Iterable

from .analysis import analyze
from .errors import (CapExceeded, MonitorViolation, NotATerm, RankTooSmall,
                     SlcError, StepCapExceeded, TypeCheckError, TypeMismatch)
from .formulas import show_type
from .generators import enumerate_terms
from .metrics import certificate, rank, snapshot
from .parser import SourceModule, link_module, parse
from .reduction import all_sequences, canonical_key, normalize
from .stdlib import map_demo, sort_demo
from .syntax import Term, erase_markers, expand_plain_let, show_term
from .typecheck import Context, check, check_module, infer

USAGE_EXIT, STATIC_EXIT, DYNAMIC_EXIT = 1, 2, 3


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read_module(path: str) -> SourceModule:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise _Exit(USAGE_EXIT, f"cannot read {path}: {e}") from e
    try:
        return parse(text)
    except SlcError as e:
        raise _Exit(USAGE_EXIT, f"{path}: {e}") from e


def _pick(module: SourceModule, name: str | None) -> list:
    if name is None:
        return list(module.definitions)
    if name not in module:
        raise _Exit(USAGE_EXIT, f"no definition named {name!r}")
    return [module[name]]


def _runnable(module: SourceModule, name: str) -> Term:
    """A definition linked against its module, markers and sugar removed."""
    linked = link_module(module)
    return expand_plain_let(erase_markers(linked[name]))


def _failure(info) -> tuple[list[int] | None, str]:
    if info.failure_witness is not None:
        path, reason = info.failure_witness
        return list(path), reason
    if info.temp_vars:
        return None, ("unresolved temporary variables: "
                      f"{sorted(info.temp_vars)}")
    dups = sorted(v for v, k in info.occ.items() if k > 1)
    return None, f"free variables occurring more than once: {dups}"


def _emit(doc: dict, as_json: bool, human: Iterable[str]) -> None:
    if as_json:
        print(json.dumps(doc, indent=2))
    else:
        for line in human:
            print(line)


def cmd_check(args: argparse.Namespace) -> int:
    """Definitions are judged with their module references resolved: a
    body may mention an earlier definition any number of times, since
    each mention stands for its own closed copy."""
    module = _read_module(args.file)
    linked = link_module(module)
    reports, lines, failed = [], [], False
    for d in _pick(module, args.name):
        info = analyze(expand_plain_let(erase_markers(linked[d.name])))
        doc = {"name": d.name, **info.to_json()}
        if info.is_well_formed:
            lines.append(f"{d.name}: ok (size {info.size}, depth "
                         f"{info.depth}, rank {info.rank})")
        else:
            failed = True
            path, reason = _failure(info)
            doc["witness"] = {"path": path, "reason": reason}
            where = f" at {path}" if path is not None else ""
            lines.append(f"{d.name}: not well-formed{where}: {reason}")
        reports.append(doc)
    _emit({"file": args.file, "definitions": reports}, args.json, lines)
    return STATIC_EXIT if failed else 0


def cmd_stats(args: argparse.Namespace) -> int:
    module = _read_module(args.file)
    _pick(module, args.name)
    t = _runnable(module, args.name)
    n = args.n if args.n is not None else max(1, rank(t))
    snap = snapshot(t, n)
    cert = certificate(t)
    doc = {"name": args.name, "metrics": snap.to_json(),
           "certificate": cert.to_json()}
    lines = [f"{k}: {v}" for k, v in snap.to_json().items()]
    lines += [f"certificate {k}: {v}" for k, v in cert.to_json().items()]
    _emit(doc, args.json, lines)
    return 0


def cmd_reduce(args: argparse.Namespace) -> int:
    module = _read_module(args.file)
    _pick(module, args.name)
    t = _runnable(module, args.name)
    trace = normalize(t, strategy=args.strategy, seed=args.seed,
                      monitor=args.monitor, n=args.n)
    lines = []
    shown = trace.steps[:50]
    for i, s in enumerate(shown):
        lines.append(f"{i + 1:4d}. {s.rule:9s} at {list(s.path)}")
    if len(trace.steps) > len(shown):
        lines.append(f"      ... {len(trace.steps) - len(shown)} more steps")
    lines.append(f"{len(trace.steps)} steps ({trace.strategy})")
    lines.append(f"normal form: {show_term(trace.final)}")
    for f in trace.findings:
        lines.append(f"finding: {f.to_json()}")
    _emit(trace.to_json(), args.json, lines)
    return 0


def _type_error_doc(e: TypeCheckError) -> dict:
    def shown(f: object) -> str:
        try:
            return show_type(f)  # type: ignore[arg-type]
        except Exception:
            return str(f)
    doc = {"path": list(e.path), "rule": type(e).__name__,
           "message": e.message, "expected": None, "found": None}
    if isinstance(e, TypeMismatch):
        doc["expected"] = shown(e.expected)
        doc["found"] = shown(e.found)
    return doc


def cmd_type(args: argparse.Namespace) -> int:
    module = _read_module(args.file)
    if args.name is None:
        report = check_module(module)
        lines = []
        for entry in report.entries:
            if entry.status == "ok":
                lines.append(f"{entry.name}: {show_type(entry.formula)}")
            elif entry.status == "skipped":
                lines.append(f"{entry.name}: skipped (no ascription)")
            else:
                lines.append(f"{entry.name}: error at "
                             f"{list(entry.path or ())}: {entry.message}")
        _emit(report.to_json(), args.json, lines)
        return 0 if report.ok else STATIC_EXIT

    _pick(module, args.name)
    d = module[args.name]
    t = link_module(module)[args.name]
    try:
        if d.ascription is not None:
            check(Context(()), t, d.ascription)
            formula = d.ascription
        else:
            formula = infer(Context(()), t).formula
    except TypeCheckError as e:
        _emit({"name": args.name, "error": _type_error_doc(e)}, args.json,
              [f"{args.name}: {e}"])
        return STATIC_EXIT
    _emit({"name": args.name, "type": show_type(formula)}, args.json,
          [f"{args.name}: {show_type(formula)}"])
    return 0


def _parse_digits(text: str) -> list[int]:
    if not text:
        return []
    try:
        digits = [int(part) for part in text.split(",")]
    except ValueError as e:
        raise _Exit(USAGE_EXIT, f"bad list {text!r}: digits 0, 1, 2 "
                    "separated by commas") from e
    if any(d not in (0, 1, 2) for d in digits):
        raise _Exit(USAGE_EXIT, f"bad list {text!r}: the alphabet is 0, 1, 2")
    return digits


def cmd_demo(args: argparse.Namespace) -> int:
    digits = _parse_digits(args.list)
    try:
        if args.algorithm == "sort":
            out, trace, cert = sort_demo(digits, args.slack,
                                         strategy=args.strategy,
                                         monitor=args.monitor)
        else:
            out, trace, cert = map_demo(args.fn, digits, args.slack,
                                        strategy=args.strategy,
                                        monitor=args.monitor)
    except ValueError as e:
        raise _Exit(USAGE_EXIT, str(e)) from e
    verdict = "ok" if args.monitor else "off"
    doc = {"demo": args.algorithm, "input": digits, "slack": args.slack,
           "output": out, "steps": len(trace.steps),
           "strategy": trace.strategy, "monitor": verdict,
           "certificate": cert.to_json()}
    if args.algorithm == "map":
        doc["fn"] = args.fn
    lines = [f"input:  {','.join(map(str, digits))}",
             f"output: {','.join(map(str, out))}",
             f"steps:  {len(trace.steps)} ({trace.strategy}), certificate "
             f"bound {cert.bound}",
             f"monitor: {verdict}"]
    _emit(doc, args.json, lines)
    return 0


def cmd_bound_check(args: argparse.Namespace) -> int:
    per_size = []
    for size, terms in sorted(enumerate_terms(args.max_size).items()):
        checked = longest = sequences = 0
        for t in terms:
            bound = certificate(t).bound
            traces = all_sequences(t)
            forms = {canonical_key(tr.final) for tr in traces}
            worst = max(len(tr.steps) for tr in traces)
            if worst > bound or len(forms) != 1:
                _emit({"counterexample": show_term(t), "size": size,
                       "longest": worst, "bound": bound,
                       "normal_forms": len(forms)}, args.json,
                      [f"counterexample at size {size}: {show_term(t)}",
                       f"longest sequence {worst}, bound {bound}, "
                       f"{len(forms)} distinct normal forms"])
                return DYNAMIC_EXIT
            checked += 1
            longest = max(longest, worst)
            sequences += len(traces)
        per_size.append({"size": size, "terms": checked,
                         "sequences": sequences, "longest": longest})
    lines = ["size  terms  sequences  longest"]
    lines += [f"{row['size']:4d}  {row['terms']:5d}  {row['sequences']:9d}"
              f"  {row['longest']:7d}" for row in per_size]
    _emit({"max_size": args.max_size, "sizes": per_size}, args.json, lines)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="slc", description="Soft lambda-calculus toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser, named: bool = True) -> None:
        sp.add_argument("file", help="a .slc source file")
        if named:
            sp.add_argument("--def", dest="name", required=True,
                            help="definition to operate on")
        else:
            sp.add_argument("--def", dest="name", default=None,
                            help="restrict to one definition")
        sp.add_argument("--json", action="store_true",
                        help="emit a single JSON document")

    sp = sub.add_parser("check", help="termhood verdict per definition")
    common(sp, named=False)
    sp.set_defaults(handler=cmd_check)

    sp = sub.add_parser("stats", help="metrics and certificate")
    common(sp)
    sp.add_argument("--n", type=int, default=None,
                    help="weight parameter (default: max(1, rank))")
    sp.set_defaults(handler=cmd_stats)

    sp = sub.add_parser("reduce", help="normalize a definition")
    common(sp)
    sp.add_argument("--strategy", choices=("lo", "ri", "random"),
                    default="lo")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--n", type=int, default=None,
                    help="weight parameter for monitoring")
    sp.add_argument("--monitor", action="store_true",
                    help="check weight/measure decrease at every step")
    sp.set_defaults(handler=cmd_reduce)

    sp = sub.add_parser("type", help="run the type checker")
    common(sp, named=False)
    sp.set_defaults(handler=cmd_type)

    sp = sub.add_parser("demo", help="run an encoded program end to end")
    sp.add_argument("algorithm", choices=("sort", "map"))
    sp.add_argument("--list", required=True,
                    help="comma-separated digits over 0,1,2 (may be empty)")
    sp.add_argument("--slack", type=int, required=True,
                    help="counter value; at least the list length")
    sp.add_argument("--fn", choices=("id", "succ"), default="id",
                    help="letter function for map")
    sp.add_argument("--strategy", choices=("lo", "ri", "random"),
                    default="lo")
    sp.add_argument("--monitor", action="store_true")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(handler=cmd_demo)

    sp = sub.add_parser("bound-check",
                        help="exhaustive reduction-length verification")
    sp.add_argument("--max-size", type=int, default=6,
                    help="largest term size to enumerate (<= 12 advised)")
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(handler=cmd_bound_check)
    return p


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except _Exit as e:
        print(str(e), file=sys.stderr)
        return e.code
    except (NotATerm, TypeCheckError, RankTooSmall) as e:
        print(str(e), file=sys.stderr)
        return STATIC_EXIT
    except (MonitorViolation, StepCapExceeded, CapExceeded) as e:
        print(str(e), file=sys.stderr)
        return DYNAMIC_EXIT
    except SlcError as e:
        print(str(e), file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
