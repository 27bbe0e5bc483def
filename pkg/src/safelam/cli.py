"""Command-line front end.

Exit codes: 0 ok/equal, 1 parse error, 2 type error, 3 budget exhausted,
10 not-equal/not-equivalent.  All output is deterministic for fixed inputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import church, compiler, starfree
from .church import Alphabet, LetterNotInAlphabet, decode_bool
from .inference import InvalidTyping, NotTypable, infer
from .normalize import (
    BudgetExceeded,
    DEFAULT_SIZE_BUDGET,
    DEFAULT_STEP_BUDGET,
    NotBetaNormal,
    eta_reduce,
    normalize_parallel,
)
from .safety import check_hls, check_long_safe, check_safe
from .starfree import DEFAULT_ENUM_CAP, AlphabetMismatch, ExprParseError
from .syntax import ParseError, format_term, parse_term
from .types import TypeStore, format_type, order, serialize_dag, unfold_size
from .inference import erase

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_TYPE = 2
EXIT_BUDGET = 3
EXIT_NOT_EQUAL = 10
EXIT_INTERNAL = 70


@dataclass
class CliConfig:
    step_budget: int
    size_budget: int
    enum_cap: int
    output_format: str

    @staticmethod
    def from_args(args) -> "CliConfig":
        step = args.budget if args.budget else int(
            os.environ.get("SAFELAM_STEP_BUDGET", DEFAULT_STEP_BUDGET)
        )
        size = int(os.environ.get("SAFELAM_SIZE_BUDGET", DEFAULT_SIZE_BUDGET))
        cap = int(os.environ.get("SAFELAM_ENUM_CAP", DEFAULT_ENUM_CAP))
        if step <= 0 or size <= 0 or cap <= 0:
            raise ValueError("budgets must be positive")
        return CliConfig(step, size, cap, args.format)


def _emit(cfg: CliConfig, record: dict, text_lines) -> None:
    if cfg.output_format == "structured":
        print(json.dumps(record, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _alphabet(args) -> Alphabet:
    if not args.alphabet:
        raise ExprParseError("an --alphabet is required", 0)
    for c in args.alphabet:
        if c in (church.HASH, church.BOX, "_"):
            raise ExprParseError(f"letter {c!r} is reserved", 0)
    return Alphabet.of(args.alphabet)


def _ascii(word: str) -> str:
    return word.replace(church.BOX, "_")


def cmd_normalize(args) -> int:
    cfg = CliConfig.from_args(args)
    store = TypeStore()
    t = parse_term(args.term, store)
    typing = infer(t, store=store)
    trace = normalize_parallel(typing, size_budget=cfg.size_budget)
    nf = erase(trace.result)
    if args.eta:
        nf = eta_reduce(nf)
    rendered = format_term(nf, simplify=True)
    lines = []
    if args.trace:
        lines.extend(
            f"step {i + 1}: size={s} height={h} max-degree={d}"
            for i, (s, h, d) in enumerate(trace.steps)
        )
    lines.append(rendered)
    _emit(
        cfg,
        {
            "normal_form": rendered,
            "type": serialize_dag(typing.type),
            "steps": [list(s) for s in trace.steps],
        },
        lines,
    )
    return EXIT_OK


def cmd_convert(args) -> int:
    cfg = CliConfig.from_args(args)
    store = TypeStore()
    t = parse_term(args.left, store)
    u = parse_term(args.right, store)
    from .normalize import beta_convertible, beta_eta_convertible

    if args.eta:
        equal = beta_eta_convertible(t, u, size_budget=cfg.size_budget)
        verdict = "beta-eta-equal" if equal else "not-equal"
    else:
        equal = beta_convertible(t, u, size_budget=cfg.size_budget)
        verdict = "beta-equal" if equal else "not-equal"
    _emit(cfg, {"verdict": verdict}, [verdict])
    return EXIT_OK if equal else EXIT_NOT_EQUAL


def cmd_check(args) -> int:
    cfg = CliConfig.from_args(args)
    store = TypeStore()
    t = parse_term(args.term, store)
    from .syntax import parse_type

    ty = parse_type(args.type, store)
    if args.mode == "hls":
        report = check_hls(t, ty)
    else:
        typing = infer(t, at=ty)
        report = check_safe(typing) if args.mode == "safe" else check_long_safe(typing)
    _emit(cfg, report.to_dict(), [str(report)])
    return EXIT_OK


def cmd_sf(args) -> int:
    cfg = CliConfig.from_args(args)
    sigma = _alphabet(args)
    store = TypeStore()

    if args.sf_command == "member":
        e = starfree.parse_expr(args.expr, sigma)
        verdict = starfree.member(e, args.word)
        _emit(cfg, {"member": verdict}, [str(verdict).lower()])
        return EXIT_OK

    if args.sf_command == "equiv":
        e = starfree.parse_expr(args.expr, sigma)
        f = starfree.parse_expr(args.other, sigma)
        witness = starfree.nonempty_up_to(
            starfree.mk_equiv_expr(e, f), args.maxlen, cap=cfg.enum_cap
        )
        if witness is None:
            _emit(cfg, {"equivalent": True, "maxlen": args.maxlen}, ["equivalent"])
            return EXIT_OK
        _emit(
            cfg,
            {"equivalent": False, "counterexample": witness},
            [f"not-equivalent (differ on {witness!r})"],
        )
        return EXIT_NOT_EQUAL

    if args.sf_command == "compile":
        e = starfree.parse_expr(args.expr, sigma)
        compiled = compiler.compile_expr(e, store)
        report = check_hls(compiled.term, compiled.full_type)
        lines = [
            format_term(compiled.term, simplify=True),
            f"base-order: {compiled.base_order}",
            f"base-type: {format_type(compiled.base_type, max_nodes=200)}",
            f"term-size: {compiled.term.size} (expression size {starfree.expr_size(e)})",
            f"hls: {report}",
        ]
        _emit(
            cfg,
            {
                "term": format_term(compiled.term, simplify=True),
                "base_type_dag": serialize_dag(compiled.base_type),
                "full_type_dag": serialize_dag(compiled.full_type),
                "base_order": compiled.base_order,
                "base_type_unfolded_size": unfold_size(compiled.base_type),
                "term_size": compiled.term.size,
                "expr_size": starfree.expr_size(e),
                "hls": report.to_dict(),
            },
            lines,
        )
        return EXIT_OK

    assert args.sf_command == "reduce"
    e = starfree.parse_expr(args.expr, sigma)
    b = compiler.build_b(e, args.tower, store)
    verdict = decode_bool(b, step_budget=cfg.step_budget, size_budget=cfg.size_budget)
    bound = tower(args.tower)
    lines = [str(verdict).lower()]
    record = {"reduce": verdict, "tower": bound}
    try:
        witness = starfree.nonempty_up_to(e, bound, cap=cfg.enum_cap)
    except BudgetExceeded:
        lines.append("oracle-skipped (enumeration cap)")
        record["oracle"] = "skipped"
        _emit(cfg, record, lines)
        return EXIT_OK
    agrees = (witness is not None) == verdict
    record["oracle"] = "agrees" if agrees else "disagrees"
    record["witness"] = witness if witness is None else _ascii(witness)
    lines.append("oracle-agrees" if agrees else "oracle-disagrees")
    _emit(cfg, record, lines)
    return EXIT_OK if agrees else EXIT_INTERNAL


def tower(n: int) -> int:
    v = 1
    for _ in range(n):
        v = 2**v
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--budget", type=int, default=0, help="beta-step budget")

    p = argparse.ArgumentParser(
        prog="safelam",
        description="Simply typed lambda-calculus toolkit with safety checking "
        "and a star-free-expression compiler",
    )
    sub = p.add_subparsers(dest="command", required=True)

    n = sub.add_parser("normalize", parents=[common], help="print the beta(-eta) normal form")
    n.add_argument("term")
    n.add_argument("--eta", action="store_true")
    n.add_argument("--trace", action="store_true")
    n.set_defaults(handler=cmd_normalize)

    c = sub.add_parser("convert", parents=[common], help="decide convertibility of two terms")
    c.add_argument("left")
    c.add_argument("right")
    c.add_argument("--eta", action="store_true")
    c.set_defaults(handler=cmd_convert)

    k = sub.add_parser("check", parents=[common], help="safety / long-safety / hls verdict")
    k.add_argument("term")
    k.add_argument("type")
    k.add_argument("--mode", choices=("safe", "long-safe", "hls"), default="safe")
    k.set_defaults(handler=cmd_check)

    s = sub.add_parser("sf", help="star-free expression commands")
    ssub = s.add_subparsers(dest="sf_command", required=True)
    sf_common = argparse.ArgumentParser(add_help=False, parents=[common])
    sf_common.add_argument("--alphabet", default="")
    sf_common.add_argument("--maxlen", type=int, default=6)

    m = ssub.add_parser("member", parents=[sf_common])
    m.add_argument("expr")
    m.add_argument("word")
    m.set_defaults(handler=cmd_sf)
    q = ssub.add_parser("equiv", parents=[sf_common])
    q.add_argument("expr")
    q.add_argument("other")
    q.set_defaults(handler=cmd_sf)
    co = ssub.add_parser("compile", parents=[sf_common])
    co.add_argument("expr")
    co.set_defaults(handler=cmd_sf)
    r = ssub.add_parser("reduce", parents=[sf_common])
    r.add_argument("expr")
    r.add_argument("tower", type=int)
    r.set_defaults(handler=cmd_sf)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except (ParseError, ExprParseError, LetterNotInAlphabet, AlphabetMismatch) as err:
        print(f"parse error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except (NotTypable, InvalidTyping, NotBetaNormal) as err:
        print(f"type error: {err}", file=sys.stderr)
        return EXIT_TYPE
    except BudgetExceeded as err:
        print(f"budget exhausted: {err}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
