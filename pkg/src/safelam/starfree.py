"""Star-free expressions: parsing, brute-force semantics, bounded emptiness.

Membership is decided by structural recursion (complement is plain negation,
never an automaton construction) memoized over substring spans; this is the
ground truth the compiled lambda-terms are verified against.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from typing import Iterator, Optional

from .church import Alphabet, LetterNotInAlphabet
from .normalize import BudgetExceeded

DEFAULT_ENUM_CAP = int(os.environ.get("SAFELAM_ENUM_CAP", 2_000_000))


class AlphabetMismatch(ValueError):
    pass


@dataclass(frozen=True)
class StarFreeExpr:
    alphabet: Alphabet


@dataclass(frozen=True)
class Empty(StarFreeExpr):
    pass


@dataclass(frozen=True)
class Eps(StarFreeExpr):
    pass


@dataclass(frozen=True)
class Letter(StarFreeExpr):
    letter: str

    def __post_init__(self):
        if self.letter not in self.alphabet:
            raise LetterNotInAlphabet(f"letter {self.letter!r} not in alphabet")


@dataclass(frozen=True)
class Union(StarFreeExpr):
    left: StarFreeExpr
    right: StarFreeExpr

    def __post_init__(self):
        _same_alphabet(self)


@dataclass(frozen=True)
class Concat(StarFreeExpr):
    left: StarFreeExpr
    right: StarFreeExpr

    def __post_init__(self):
        _same_alphabet(self)


@dataclass(frozen=True)
class Not(StarFreeExpr):
    operand: StarFreeExpr

    def __post_init__(self):
        if self.operand.alphabet != self.alphabet:
            raise AlphabetMismatch("operand alphabet differs")


def _same_alphabet(node) -> None:
    if node.left.alphabet != node.alphabet or node.right.alphabet != node.alphabet:
        raise AlphabetMismatch("operand alphabets differ")


# convenience constructors inferring the alphabet from the operands

def empty(sigma: Alphabet) -> Empty:
    return Empty(sigma)


def eps(sigma: Alphabet) -> Eps:
    return Eps(sigma)


def letter(sigma: Alphabet, c: str) -> Letter:
    return Letter(sigma, c)


def union(l: StarFreeExpr, r: StarFreeExpr) -> Union:
    return Union(l.alphabet, l, r)


def concat(l: StarFreeExpr, r: StarFreeExpr) -> Concat:
    return Concat(l.alphabet, l, r)


def neg(e: StarFreeExpr) -> Not:
    return Not(e.alphabet, e)


def expr_size(e: StarFreeExpr) -> int:
    """Constructor count."""
    if isinstance(e, (Empty, Eps, Letter)):
        return 1
    if isinstance(e, Not):
        return 1 + expr_size(e.operand)
    return 1 + expr_size(e.left) + expr_size(e.right)


def format_expr(e: StarFreeExpr) -> str:
    if isinstance(e, Empty):
        return "0"
    if isinstance(e, Eps):
        return "e"
    if isinstance(e, Letter):
        return e.letter
    if isinstance(e, Not):
        return f"~{format_expr(e.operand)}"
    if isinstance(e, Union):
        return f"({format_expr(e.left)}|{format_expr(e.right)})"
    return f"({format_expr(e.left)}.{format_expr(e.right)})"


# ---------------------------------------------------------------------------
# Semantics

def member(e: StarFreeExpr, w: str) -> bool:
    """w ∈ ⟦e⟧, memoized over (subexpression, substring span)."""
    for c in w:
        if c not in e.alphabet:
            raise LetterNotInAlphabet(f"letter {c!r} not in alphabet")
    memo: dict = {}

    def rec(node: StarFreeExpr, i: int, j: int) -> bool:
        key = (node, i, j)
        got = memo.get(key)
        if got is not None:
            return got
        if isinstance(node, Empty):
            res = False
        elif isinstance(node, Eps):
            res = i == j
        elif isinstance(node, Letter):
            res = j == i + 1 and w[i] == node.letter
        elif isinstance(node, Union):
            res = rec(node.left, i, j) or rec(node.right, i, j)
        elif isinstance(node, Concat):
            res = any(rec(node.left, i, m) and rec(node.right, m, j) for m in range(i, j + 1))
        else:
            res = not rec(node.operand, i, j)
        memo[key] = res
        return res

    return rec(e, 0, len(w))


def words_up_to(sigma: Alphabet, max_len: int) -> Iterator[str]:
    """All words of length <= max_len in length-then-alphabet order."""
    for n in range(max_len + 1):
        for tup in itertools.product(sigma.letters, repeat=n):
            yield "".join(tup)


def _enumeration_count(sigma: Alphabet, max_len: int) -> int:
    k = len(sigma)
    return sum(k**n for n in range(max_len + 1))


def nonempty_up_to(
    e: StarFreeExpr, max_len: int, *, cap: int = DEFAULT_ENUM_CAP
) -> Optional[str]:
    """Length-lexicographically least witness of length <= max_len, if any."""
    if _enumeration_count(e.alphabet, max_len) > cap:
        raise BudgetExceeded(
            f"enumerating {_enumeration_count(e.alphabet, max_len)} words exceeds cap {cap}"
        )
    for w in words_up_to(e.alphabet, max_len):
        if member(e, w):
            return w
    return None


def mk_equiv_expr(e: StarFreeExpr, f: StarFreeExpr) -> StarFreeExpr:
    """Expression empty iff ⟦e⟧ = ⟦f⟧: ¬(¬E ∪ F) ∪ ¬(E ∪ ¬F)."""
    if e.alphabet != f.alphabet:
        raise AlphabetMismatch("expressions use different alphabets")
    return union(neg(union(neg(e), f)), neg(union(e, neg(f))))


def equivalent_up_to(
    e: StarFreeExpr, f: StarFreeExpr, max_len: int, *, cap: int = DEFAULT_ENUM_CAP
) -> bool:
    """Membership agreement on every word of length <= max_len."""
    if e.alphabet != f.alphabet:
        raise AlphabetMismatch("expressions use different alphabets")
    if _enumeration_count(e.alphabet, max_len) > cap:
        raise BudgetExceeded("enumeration exceeds cap")
    return all(member(e, w) == member(f, w) for w in words_up_to(e.alphabet, max_len))


# ---------------------------------------------------------------------------
# Parsing:  E ::= E '|' T | T;  T ::= T '.' F | T F | F;
#           F ::= '~' F | '0' | 'e' | letter | '(' E ')'

_STRUCTURAL = set("|.~()0e") | {" ", "\t", "\n"}


class ExprParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


def parse_expr(text: str, sigma: Alphabet) -> StarFreeExpr:
    for c in sigma:
        if c in _STRUCTURAL:
            raise ValueError(f"alphabet letter {c!r} collides with expression syntax")

    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos] in " \t\n":
            pos += 1

    def peek() -> Optional[str]:
        skip_ws()
        return text[pos] if pos < len(text) else None

    def parse_union() -> StarFreeExpr:
        nonlocal pos
        e = parse_concat()
        while peek() == "|":
            pos += 1
            e = union(e, parse_concat())
        return e

    def parse_concat() -> StarFreeExpr:
        nonlocal pos
        e = parse_factor()
        while True:
            c = peek()
            if c == ".":
                pos += 1
                e = concat(e, parse_factor())
            elif c is not None and (c == "~" or c == "(" or c == "0" or c == "e" or c in sigma):
                e = concat(e, parse_factor())
            else:
                return e

    def parse_factor() -> StarFreeExpr:
        nonlocal pos
        c = peek()
        if c is None:
            raise ExprParseError("unexpected end of input", pos)
        if c == "~":
            pos += 1
            return neg(parse_factor())
        if c == "0":
            pos += 1
            return empty(sigma)
        if c == "e":
            pos += 1
            return eps(sigma)
        if c == "(":
            pos += 1
            e = parse_union()
            if peek() != ")":
                raise ExprParseError("expected ')'", pos)
            pos += 1
            return e
        if c in sigma:
            pos += 1
            return letter(sigma, c)
        raise ExprParseError(f"unexpected character {c!r}", pos)

    e = parse_union()
    if peek() is not None:
        raise ExprParseError(f"trailing input {text[pos]!r}", pos)
    return e
