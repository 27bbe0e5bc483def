"""Church encodings of booleans, strings and numerals, with decoders.

Strings over an ordered alphabet are their own right folds; numerals are the
unary-alphabet special case and share the same code path.  Decoding works by
normal-form shape analysis, never by applying terms to injected constants.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Optional

from .normalize import DEFAULT_SIZE_BUDGET, DEFAULT_STEP_BUDGET, normalize_naive
from .syntax import App, Lam, Term, Var, app, lams, rename_apart, var
from .types import Ty, TypeStore

HASH = "#"
BOX = "□"  # printed as "_" in ASCII output


class LetterNotInAlphabet(ValueError):
    pass


class DecodeError(Exception):
    pass


class NotAStringNormalForm(DecodeError):
    pass


class NotABoolNormalForm(DecodeError):
    pass


@dataclass(frozen=True)
class Alphabet:
    """Ordered, duplicate-free tuple of single-character letters."""

    letters: tuple

    def __post_init__(self):
        if not self.letters:
            raise ValueError("alphabet must be non-empty")
        if any(len(c) != 1 for c in self.letters):
            raise ValueError("letters must be single characters")
        if len(set(self.letters)) != len(self.letters):
            raise ValueError("duplicate letters in alphabet")

    @staticmethod
    def of(letters: str) -> "Alphabet":
        return Alphabet(tuple(letters))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __contains__(self, c) -> bool:
        return c in self.letters

    def index(self, c: str) -> int:
        try:
            return self.letters.index(c)
        except ValueError:
            raise LetterNotInAlphabet(f"letter {c!r} not in alphabet") from None

    def extend(self, c: str) -> "Alphabet":
        return Alphabet(self.letters + (c,))


UNARY = Alphabet(("I",))


def letter_tag(c: str) -> str:
    """Identifier-safe binder name for the fold function of letter c."""
    if c == HASH:
        return "f_hash"
    if c == BOX or c == "_":
        return "f_box"
    if c.isalnum() and c.isascii():
        return f"f_{c}"
    return f"f_u{ord(c)}"


# ---------------------------------------------------------------------------
# Raw term builders (store-free, cached so shared combinators are one object)

TRUE = lams(("x", "y"), var("x"))
FALSE = lams(("x", "y"), var("y"))
AND = lams(("b1", "b2", "x", "y"), app(var("b1"), app(var("b2"), var("x"), var("y")), var("y")))
OR = lams(("b1", "b2", "x", "y"), app(var("b1"), var("x"), app(var("b2"), var("x"), var("y"))))
NOT = lams(("b", "x", "y"), app(var("b"), var("y"), var("x")))


@lru_cache(maxsize=None)
def word_term(sigma: Alphabet, w: str) -> Term:
    """λf_c1...f_ck.λx. f_w1 (... (f_wn x))."""
    for c in w:
        if c not in sigma:
            raise LetterNotInAlphabet(f"letter {c!r} not in alphabet")
    body: Term = var("x")
    for c in reversed(w):
        body = App(var(letter_tag(c)), body)
    return lams([letter_tag(c) for c in sigma] + ["x"], body)


@lru_cache(maxsize=None)
def cat_term(sigma: Alphabet, k: int = 2) -> Term:
    """k-fold concatenation: λs1..sk f⃗ x. s1 f⃗ (s2 f⃗ (... (sk f⃗ x)))."""
    if k < 2:
        raise ValueError("concatenation needs at least two operands")
    fs = [letter_tag(c) for c in sigma]
    ss = [f"s{i}" for i in range(1, k + 1)]
    body: Term = var("x")
    for s in reversed(ss):
        body = app(var(s), *[var(f) for f in fs], body)
    return lams(ss + fs + ["x"], body)


# ---------------------------------------------------------------------------
# Types

def bool_type(store: TypeStore) -> Ty:
    o = store.base()
    return store.arrows((o, o), o)


def str_type(store: TypeStore, sigma: Alphabet, base: Optional[Ty] = None) -> Ty:
    a = base if base is not None else store.base()
    aa = store.arrow(a, a)
    return store.arrows([aa] * len(sigma) + [a], a)


def nat_type(store: TypeStore, base: Optional[Ty] = None) -> Ty:
    return str_type(store, UNARY, base)


# ---------------------------------------------------------------------------
# Public encoders

@dataclass(frozen=True)
class EncodedValue:
    term: Term
    claimed_type: Ty


def encode_word(store: TypeStore, sigma: Alphabet, w: str) -> EncodedValue:
    return EncodedValue(word_term(sigma, w), str_type(store, sigma))


def encode_nat(store: TypeStore, n: int) -> EncodedValue:
    return EncodedValue(word_term(UNARY, "I" * n), nat_type(store))


@dataclass(frozen=True)
class BoolOps:
    and_: EncodedValue
    or_: EncodedValue
    not_: EncodedValue


def bool_ops(store: TypeStore) -> BoolOps:
    b = bool_type(store)
    bb = store.arrow(b, b)
    bbb = store.arrow(b, bb)
    return BoolOps(EncodedValue(AND, bbb), EncodedValue(OR, bbb), EncodedValue(NOT, bb))


def cat(store: TypeStore, sigma: Alphabet) -> EncodedValue:
    s = str_type(store, sigma)
    return EncodedValue(cat_term(sigma), store.arrows((s, s), s))


def cat_k(store: TypeStore, sigma: Alphabet, k: int) -> EncodedValue:
    s = str_type(store, sigma)
    return EncodedValue(cat_term(sigma, k), store.arrows([s] * k, s))


def tow(store: TypeStore, n: int) -> EncodedValue:
    """Size-O(n) term convertible to the Church numeral of tower(n).

    tower(0) = 1, so tow(0) is the numeral 1 itself; for n >= 1 the term is
    the n-fold left-associated self-application of the numeral 2.
    """
    if n < 0:
        raise ValueError("tow is defined for n >= 0")
    if n == 0:
        term = word_term(UNARY, "I")
    else:
        two = word_term(UNARY, "II")
        term = reduce(App, [two] * n)
    return EncodedValue(term, nat_type(store))


# ---------------------------------------------------------------------------
# Decoders

def decode_word(
    t: Term,
    sigma: Alphabet,
    *,
    step_budget: int = DEFAULT_STEP_BUDGET,
    size_budget: int = DEFAULT_SIZE_BUDGET,
) -> str:
    """Normalize and read back a word; rejects any other normal-form shape."""
    nf = rename_apart(normalize_naive(t, step_budget=step_budget, size_budget=size_budget))
    binders = []
    cur = nf
    for _ in range(len(sigma) + 1):
        if not isinstance(cur, Lam):
            raise NotAStringNormalForm(f"expected {len(sigma) + 1} leading binders")
        binders.append(cur.binder)
        cur = cur.body
    by_name = {name: sigma.letters[i] for i, name in enumerate(binders[:-1])}
    end = binders[-1]
    letters = []
    while isinstance(cur, App):
        head = cur.fun
        if not isinstance(head, Var) or head.name not in by_name:
            raise NotAStringNormalForm("spine head is not a letter function")
        letters.append(by_name[head.name])
        cur = cur.arg
    if not (isinstance(cur, Var) and cur.name == end):
        raise NotAStringNormalForm("spine does not end at the string tail")
    return "".join(letters)


def decode_nat(t: Term, **budgets) -> int:
    return len(decode_word(t, UNARY, **budgets))


def decode_bool(
    t: Term,
    *,
    step_budget: int = DEFAULT_STEP_BUDGET,
    size_budget: int = DEFAULT_SIZE_BUDGET,
) -> bool:
    nf = rename_apart(normalize_naive(t, step_budget=step_budget, size_budget=size_budget))
    match nf:
        case Lam(x, Lam(_, Var(name))) if name == x:
            return True
        case Lam(_, Lam(y, Var(name))) if name == y:
            return False
    raise NotABoolNormalForm("normal form is neither true nor false")
