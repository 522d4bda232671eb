"""Batch command line front end.

Every command takes a presentation file (see :mod:`confgsb.parsing` for the
grammar) plus arguments, and writes deterministic text — or JSON with
``--json`` — to stdout.  ``--quiet`` suppresses stdout entirely (exit codes
still carry the verdicts).  Exit codes: 0 success, 2 "not a basis" from
``check``, 64 usage error, 65 unreadable or invalid input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Optional

from .engine import Engine
from .envelope import (
    LieConformalSpec,
    bracket,
    enveloping_presentation,
    half_pbw_check,
    lie_algebra,
    lie_conformal,
    loop_conformal,
    validate_lie,
)
from .parsing import (
    ParseError,
    Presentation,
    format_index,
    format_polynomial,
    format_word,
    parse_expression,
    parse_index,
    parse_presentation,
)
from .rewrite import RewriteSystem, complete
from .words import ConfPoly, single_word

EX_OK = 0
EX_NOT_BASIS = 2
EX_USAGE = 64
EX_DATA = 65


class _DataError(Exception):
    """Invalid input content (maps to exit code 65)."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(
        prog="confgsb",
        description="Rewriting calculator for multi-parameter conformal algebras.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trace", action="store_true",
                        help="include the reduction trace (reduce, eq)")
    common.add_argument("--json", action="store_true",
                        help="machine-readable output")
    common.add_argument("--quiet", action="store_true",
                        help="suppress stdout; exit codes carry the verdicts")

    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_ArgumentParser)

    p = sub.add_parser("normalize", parents=[common],
                       help="normal form of an expression")
    p.add_argument("file")
    p.add_argument("expr")

    p = sub.add_parser("mul", parents=[common],
                       help="labelled product of two expressions")
    p.add_argument("file")
    p.add_argument("left")
    p.add_argument("label", help="product label, e.g. 1,0")
    p.add_argument("right")

    p = sub.add_parser("reduce", parents=[common],
                       help="remainder modulo the file's relations")
    p.add_argument("file")
    p.add_argument("expr")

    p = sub.add_parser("complete", parents=[common],
                       help="saturate the relations into a rewriting basis")
    p.add_argument("file")
    p.add_argument("--max-degree", type=_positive_int, default=None)
    p.add_argument("--max-elements", type=_positive_int, default=None)
    p.add_argument("--max-steps", type=_positive_int, default=None)

    p = sub.add_parser("check", parents=[common],
                       help="test whether the relations form a rewriting basis")
    p.add_argument("file")

    p = sub.add_parser("basis", parents=[common],
                       help="irreducible words within bounds")
    p.add_argument("file")
    p.add_argument("--max-length", type=_positive_int, required=True)
    p.add_argument("--max-taild", default=None,
                   help="tail derivation bound: one integer or i1,...,in")

    p = sub.add_parser("eq", parents=[common],
                       help="equality of two expressions modulo the relations")
    p.add_argument("file")
    p.add_argument("left")
    p.add_argument("right")

    p = sub.add_parser("envelope", parents=[common],
                       help="enveloping presentation of a Lie structure")
    p.add_argument("file")

    p = sub.add_parser("halfpbw", parents=[common],
                       help="reduce the mixed compositions of a Lie envelope")
    p.add_argument("file")

    return parser


# -- shared plumbing -----------------------------------------------------------


def _load(path: str) -> Presentation:
    try:
        with open(path, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise _DataError(f"cannot read {path}: {exc.strerror or exc}")
    return parse_presentation(text)


def _system(pres: Presentation, engine: Engine) -> RewriteSystem:
    polys = []
    for _, comb in pres.relation_combs():
        p = engine.normalize(comb)
        if not p.is_zero():
            polys.append(p)
    return RewriteSystem(engine, polys)


def _lie_spec(pres: Presentation) -> LieConformalSpec:
    sig = pres.signature
    brackets = dict(pres.brackets) if pres.brackets is not None else {}
    g = lie_algebra(sig.generators, brackets)
    if not validate_lie(g):
        raise _DataError("bracket table fails antisymmetry or the Jacobi identity")
    if all(b == 1 for b in sig.locality):
        return loop_conformal(g, sig.n)
    zero = sig.zero_exp()
    table = {}
    for i in range(len(sig.generators)):
        for j in range(i):
            value = ConfPoly.zero()
            for k, c in sorted(bracket(g, i, j).items()):
                value = value.add_scaled(ConfPoly.from_word(single_word(k, sig.n)), c)
            if not value.is_zero():
                table[(i, j, zero)] = value
    return lie_conformal(sig, table)


def _parse_taild(text: Optional[str], n: int):
    if text is None:
        return None
    if "," in text:
        return parse_index(text, n)
    if not text.strip().isdigit():
        raise ParseError(f"malformed tail bound {text!r}")
    return (int(text),) * n


def _trace_payload(sig, trace):
    steps = []
    for step in trace.steps:
        occ = step.occ
        steps.append({
            "word": format_word(sig, step.word),
            "coeff": str(step.coeff),
            "element": occ.elem,
            "pos": occ.pos,
            "second": occ.second,
            "dshift": list(occ.dshift) if occ.dshift is not None else None,
        })
    return steps


def _trace_lines(sig, trace):
    lines = [f"trace ({len(trace.steps)} steps):"]
    for step in trace.steps:
        occ = step.occ
        kind = "suffix" if occ.second else "interior"
        extra = ""
        if occ.second and occ.dshift is not None and any(occ.dshift):
            extra = f" shift {format_index(occ.dshift)}"
        lines.append(
            f"  - {step.coeff} x {format_word(sig, step.word)}"
            f"  [relation {occ.elem}, {kind} at {occ.pos}{extra}]")
    return lines


def _task_payload(sig, task):
    return {
        "kind": task.kind,
        "i": task.i,
        "j": task.j,
        "word": format_word(sig, task.w),
        "label": format_index(task.m) if task.m is not None else None,
    }


# -- command handlers -----------------------------------------------------------


def _cmd_normalize(args):
    pres = _load(args.file)
    engine = Engine(pres.signature)
    p = engine.normalize(parse_expression(pres.signature, args.expr))
    text = format_polynomial(pres.signature, p)
    return EX_OK, pres.signature, text, [text], None


def _cmd_mul(args):
    pres = _load(args.file)
    sig = pres.signature
    engine = Engine(sig)
    left = engine.normalize(parse_expression(sig, args.left))
    right = engine.normalize(parse_expression(sig, args.right))
    m = parse_index(args.label, sig.n)
    p = engine.mul_poly(left, m, right)
    text = format_polynomial(sig, p)
    return EX_OK, sig, text, [text], None


def _cmd_reduce(args):
    pres = _load(args.file)
    sig = pres.signature
    engine = Engine(sig)
    system = _system(pres, engine)
    p = engine.normalize(parse_expression(sig, args.expr))
    remainder, trace = system.reduce(p)
    text = format_polynomial(sig, remainder)
    lines = [text]
    payload = {"remainder": text}
    trace_out = None
    if args.trace:
        trace_out = _trace_payload(sig, trace)
        lines.extend(_trace_lines(sig, trace))
    return EX_OK, sig, payload, lines, trace_out


def _cmd_complete(args):
    pres = _load(args.file)
    sig = pres.signature
    engine = Engine(sig)
    polys = [engine.normalize(comb) for _, comb in pres.relation_combs()]
    polys = [p for p in polys if not p.is_zero()]
    system, status = complete(engine, polys, max_degree=args.max_degree,
                              max_elements=args.max_elements,
                              max_steps=args.max_steps)
    elements = [format_polynomial(sig, p) for p in system.elements]
    lines = [f"status: {status}"] + elements
    return EX_OK, sig, {"status": status, "elements": elements}, lines, None


def _cmd_check(args):
    pres = _load(args.file)
    sig = pres.signature
    engine = Engine(sig)
    system = _system(pres, engine)
    report = system.check_gsb()
    failures = []
    lines = [f"basis: {'yes' if report.is_gsb else 'no'}"]
    if report.has_non_dfree:
        lines.append("note: some relations carry tail derivations; "
                     "a clean bill below is certified only for the reductions run")
    for task, remainder in report.failures:
        failures.append({
            "task": _task_payload(sig, task),
            "remainder": format_polynomial(sig, remainder),
        })
        label = f" label {format_index(task.m)}" if task.m is not None else ""
        lines.append(
            f"  - {task.kind} ({task.i}, {task.j}){label} at "
            f"{format_word(sig, task.w)} -> {format_polynomial(sig, remainder)}")
    payload = {
        "is_gsb": report.is_gsb,
        "has_non_dfree": report.has_non_dfree,
        "failures": failures,
    }
    code = EX_OK if report.is_gsb else EX_NOT_BASIS
    return code, sig, payload, lines, None


def _cmd_basis(args):
    pres = _load(args.file)
    sig = pres.signature
    engine = Engine(sig)
    system = _system(pres, engine)
    taild = _parse_taild(args.max_taild, sig.n)
    words = system.irreducible_words(args.max_length, taild)
    texts = [format_word(sig, w) for w in words]
    return EX_OK, sig, texts, texts, None


def _cmd_eq(args):
    pres = _load(args.file)
    sig = pres.signature
    engine = Engine(sig)
    system = _system(pres, engine)
    left, ltrace = system.reduce(engine.normalize(parse_expression(sig, args.left)))
    right, rtrace = system.reduce(engine.normalize(parse_expression(sig, args.right)))
    equal = left == right
    lines = ["equal" if equal else "not equal"]
    payload = {
        "equal": equal,
        "left_remainder": format_polynomial(sig, left),
        "right_remainder": format_polynomial(sig, right),
    }
    trace_out = None
    if args.trace:
        trace_out = {"left": _trace_payload(sig, ltrace),
                     "right": _trace_payload(sig, rtrace)}
        lines.extend(["left " + line for line in _trace_lines(sig, ltrace)])
        lines.extend(["right " + line for line in _trace_lines(sig, rtrace)])
    return EX_OK, sig, payload, lines, trace_out


def _cmd_envelope(args):
    pres = _load(args.file)
    sig = pres.signature
    spec = _lie_spec(pres)
    system = enveloping_presentation(spec, Engine(sig))
    elements = [format_polynomial(sig, p) for p in system.elements]
    return EX_OK, sig, {"elements": elements}, elements, None


def _cmd_halfpbw(args):
    pres = _load(args.file)
    sig = pres.signature
    spec = _lie_spec(pres)
    report = half_pbw_check(spec, Engine(sig))
    failures = []
    lines = [f"checked: {report.checked}",
             f"ok: {'yes' if report.ok else 'no'}"]
    for (i, j, k, m, mp), remainder in report.failures:
        failures.append({
            "i": i, "j": j, "k": k,
            "m": format_index(m), "mp": format_index(mp),
            "remainder": format_polynomial(sig, remainder),
        })
        lines.append(
            f"  - ({i}, {j}, {k}) labels <{format_index(m)}> <{format_index(mp)}>"
            f" -> {format_polynomial(sig, remainder)}")
    payload = {"checked": report.checked, "ok": report.ok, "failures": failures}
    return EX_OK, sig, payload, lines, None


_HANDLERS = {
    "normalize": _cmd_normalize,
    "mul": _cmd_mul,
    "reduce": _cmd_reduce,
    "complete": _cmd_complete,
    "check": _cmd_check,
    "basis": _cmd_basis,
    "eq": _cmd_eq,
    "envelope": _cmd_envelope,
    "halfpbw": _cmd_halfpbw,
}


def _signature_payload(sig):
    return {"n": sig.n, "locality": list(sig.locality),
            "generators": list(sig.generators)}


def main(argv: Optional[list[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EX_USAGE
    try:
        code, sig, result, lines, trace = _HANDLERS[args.command](args)
    except (ParseError, _DataError) as exc:
        print(f"confgsb: error: {exc}", file=sys.stderr)
        return EX_DATA
    if args.quiet:
        return code
    if args.json:
        doc = {"command": args.command, "signature": _signature_payload(sig),
               "result": result}
        if trace is not None:
            doc["trace"] = trace
        print(json.dumps(doc, indent=2))
    else:
        for line in lines:
            print(line)
    return code


if __name__ == "__main__":
    sys.exit(main())
