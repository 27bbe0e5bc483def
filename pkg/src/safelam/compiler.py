"""Star-free expressions compiled to homogeneous long-safe lambda-terms.

compile_expr turns an expression E over Σ into a closed term t_E and a base
type A_E with t_E : Str_Σ[A_E] -> Bool, such that t_E applied to the Church
encoding of w normalizes to true exactly when w is in the language of E.
Helper families: `any` folds a #-separated word list against a predicate,
`split` emits every one-marker splitting of its input, `enum` emits a list
containing all words up to a given length, and build_b ties them together
into a single closed boolean term.

Every emitted term is Curry-style; types are tracked separately as DAG
handles because the base types grow exponentially when unfolded.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Tuple

from .church import (
    AND,
    BOX,
    FALSE,
    HASH,
    NOT,
    OR,
    TRUE,
    UNARY,
    Alphabet,
    bool_type,
    cat_term,
    nat_type,
    str_type,
    tow,
    word_term,
)
from .starfree import Concat, Empty, Eps, Letter, Not, StarFreeExpr, Union
from .syntax import App, Lam, Term, app, lam, lams, var
from .types import Ty, TypeStore, subst_base


@dataclass(frozen=True)
class CompiledLanguage:
    term: Term
    base_type: Ty
    base_order: int
    full_type: Ty
    alphabet: Alphabet


@dataclass(frozen=True)
class CompiledHelper:
    term: Term
    description: str
    type_at: Callable[[Ty], Ty]


def _membership_type(store: TypeStore, sigma: Alphabet, base: Ty) -> Ty:
    return store.arrow(str_type(store, sigma, base), bool_type(store))


def compile_expr(e: StarFreeExpr, store: TypeStore) -> CompiledLanguage:
    """Structural recursion over the expression; linear-size output."""
    sigma = e.alphabet
    o = store.base()
    b = bool_type(store)

    if isinstance(e, Empty):
        term: Term = lam("s", FALSE)
        base, base_order = o, 0

    elif isinstance(e, Eps):
        # fold that only survives the empty spine: every letter maps to false
        drop = lam("x", FALSE)
        term = lam("s", app(var("s"), *[drop] * len(sigma), TRUE))
        base, base_order = b, 1

    elif isinstance(e, Letter):
        # three-state automaton for {c}: start, seen-one-c, sink
        q0, q1, q2 = (lams(("z0", "z1", "z2"), var(f"z{i}")) for i in range(3))
        shift = lams(("q", "z0", "z1", "z2"), app(var("q"), var("z1"), var("z2"), var("z2")))
        sink = lam("q", q2)
        transitions = [shift if c == e.letter else sink for c in sigma]
        term = lams(
            ("s", "x", "y"),
            app(var("s"), *transitions, q0, var("y"), var("x"), var("y")),
        )
        base = store.arrows((o, o, o), o)
        base_order = 1

    elif isinstance(e, Not):
        sub = compile_expr(e.operand, store)
        term = lam("s", App(NOT, App(sub.term, var("s"))))
        base, base_order = sub.base_type, sub.base_order

    elif isinstance(e, Union):
        left = compile_expr(e.left, store)
        right = compile_expr(e.right, store)
        big, small = (left, right) if left.base_order >= right.base_order else (right, left)
        cat = cat_term(sigma)
        eps_t = word_term(sigma, "")
        steps = [
            lams(
                ("g", "x", "y"),
                app(
                    var("g"),
                    app(cat, var("x"), word_term(sigma, c)),
                    app(cat, var("y"), word_term(sigma, c)),
                ),
            )
            for c in sigma
        ]
        # left fold duplicating the input at two base types, then test both
        fin = lams(("x", "y"), app(OR, App(big.term, var("x")), App(small.term, var("y"))))
        term = lam("s", app(var("s"), *steps, fin, eps_t, eps_t))
        base = store.arrows(
            (
                str_type(store, sigma, big.base_type),
                str_type(store, sigma, small.base_type),
            ),
            b,
        )
        base_order = 3 + big.base_order

    else:
        assert isinstance(e, Concat)
        left = compile_expr(e.left, store)
        right = compile_expr(e.right, store)
        tprime, accum = _marker_tester(left, right, store)
        sigma_box = sigma.extend(BOX)
        any_h = build_any(sigma_box, store)
        split_h = build_split(sigma, store)
        term = lam("s", app(any_h.term, App(split_h.term, var("s")), tprime))
        tester = store.arrow(str_type(store, sigma_box, accum), b)
        base = subst_base(split_base_type(store, sigma), store.arrow(tester, tester))
        base_order = 11 + max(left.base_order, right.base_order)

    return CompiledLanguage(
        term=term,
        base_type=base,
        base_order=base_order,
        full_type=_membership_type(store, sigma, base),
        alphabet=sigma,
    )


def _marker_tester(
    left: CompiledLanguage, right: CompiledLanguage, store: TypeStore
) -> Tuple[Term, Ty]:
    """Tester for words with exactly one marker: accepts u□v iff u ∈ left
    and v ∈ right.  Returns the term and its fold accumulator base type."""
    sigma = left.alphabet
    cat = cat_term(sigma)
    eps_t = word_term(sigma, "")
    swapped = left.base_order < right.base_order
    big, small = (right, left) if swapped else (left, right)

    steps = [
        lams(
            ("g", "x", "y"),
            app(
                var("g"),
                app(cat, var("x"), word_term(sigma, c)),
                app(cat, var("y"), word_term(sigma, c)),
            ),
        )
        for c in sigma
    ]
    if swapped:  # higher-order copy is x : Str[A_right]; test left on y
        marker = lams(
            ("g", "x", "y"),
            app(AND, App(left.term, var("y")), app(var("g"), eps_t, eps_t)),
        )
        fin = lams(("x", "y"), App(right.term, var("x")))
    else:
        marker = lams(
            ("g", "x", "y"),
            app(AND, App(left.term, var("x")), app(var("g"), eps_t, eps_t)),
        )
        fin = lams(("x", "y"), App(right.term, var("y")))
    tprime = lam("s", app(var("s"), *steps, marker, fin, eps_t, eps_t))
    accum = store.arrows(
        (
            str_type(store, sigma, big.base_type),
            str_type(store, sigma, small.base_type),
        ),
        bool_type(store),
    )
    return tprime, accum


def build_any(sigma: Alphabet, store: TypeStore) -> CompiledHelper:
    """Fold a #-separated list of words against a string predicate.

    any w0#...#wn p normalizes to true iff p wi does for some i.  The fold
    accumulator is a function of the predicate rather than a closure over it:
    a handler that captured the predicate would hold a free variable of order
    one below its own type's order, in argument position, which the safety
    condition forbids.  Threading the predicate keeps every fold function
    closed, at the price of one extra arrow in the list's base type.
    """
    cat = cat_term(sigma)
    eps_t = word_term(sigma, "")
    steps = [
        lams(
            ("g", "q", "x"),
            app(var("g"), var("q"), app(cat, var("x"), word_term(sigma, c))),
        )
        for c in sigma
    ]
    boundary = lams(
        ("g", "q", "x"),
        app(OR, App(var("q"), var("x")), app(var("g"), var("q"), eps_t)),
    )
    start = lam("q", var("q"))
    term = lams(("s", "p"), app(var("s"), *steps, boundary, start, var("p"), eps_t))

    def type_at(a: Ty) -> Ty:
        pred = store.arrow(str_type(store, sigma, a), bool_type(store))
        acc = store.arrow(pred, pred)
        return store.arrow(
            str_type(store, sigma.extend(HASH), acc),
            store.arrow(pred, bool_type(store)),
        )

    return CompiledHelper(
        term, "Str[#][(Str[A]->Bool)->Str[A]->Bool] -> (Str[A]->Bool) -> Bool", type_at
    )


def split_base_type(store: TypeStore, sigma: Alphabet) -> Ty:
    """Accumulator pair type of the splitter's CPS fold (at base o)."""
    gamma = sigma.extend(BOX).extend(HASH)
    sg = str_type(store, gamma)
    return store.arrows(
        (store.arrow(nat_type(store), sg), store.arrow(sg, sg)),
        sg,
    )


def build_split(sigma: Alphabet, store: TypeStore) -> CompiledHelper:
    """Emit every one-marker splitting of the input, #-separated.

    split a1...an normalizes to the encoding of
    □a1...an # a1□a2...an # ... # a1...an□ over Σ extended with □ and #.
    The first accumulator component carries a dummy numeral argument: it
    raises the order of its variable so the whole term stays long-safe.
    """
    gamma = sigma.extend(BOX).extend(HASH)
    cat2 = cat_term(gamma)
    cat3 = cat_term(gamma, 3)
    cat4 = cat_term(gamma, 4)
    eps_g = word_term(gamma, "")
    zero = word_term(UNARY, "")

    def gword(w: str) -> Term:
        return word_term(gamma, w)

    steps = []
    for c in sigma:
        copy_c = lam("n", app(cat2, App(var("x"), zero), gword(c)))
        emit_c = lam(
            "y",
            app(
                cat4,
                App(var("f"), app(cat2, gword(c), var("y"))),
                App(var("x"), zero),
                gword(BOX + c),
                var("y"),
            ),
        )
        steps.append(lams(("g", "x", "f"), app(var("g"), copy_c, emit_c)))
    fin = lams(
        ("x", "f"),
        app(cat3, App(var("f"), gword(HASH)), App(var("x"), zero), gword(BOX)),
    )
    term = lam(
        "s",
        app(var("s"), *steps, fin, lam("n", eps_g), lam("y", eps_g)),
    )

    def type_at(c: Ty) -> Ty:
        return store.arrow(
            str_type(store, sigma, subst_base(split_base_type(store, sigma), c)),
            str_type(store, gamma, c),
        )

    return CompiledHelper(term, "Str[A_split[C]] -> Str[Σ□#][C]", type_at)


def build_enum(sigma: Alphabet, store: TypeStore) -> CompiledHelper:
    """Iterate word-list doubling: enum m is a #-separated list containing
    every word over Σ of length at most m."""
    gamma = sigma.extend(HASH)
    cat2 = cat_term(gamma)
    catk = cat_term(gamma, len(sigma) + 1)
    step = lams(
        ("f", "s"),
        app(
            catk,
            var("s"),
            *[App(var("f"), app(cat2, word_term(gamma, c), var("s"))) for c in sigma],
        ),
    )
    term = lam("n", app(var("n"), step, lam("y", var("y")), word_term(gamma, HASH)))

    def type_at(c: Ty) -> Ty:
        sg = str_type(store, gamma)
        a_enum = store.arrow(sg, sg)
        return store.arrow(
            nat_type(store, subst_base(a_enum, c)),
            str_type(store, gamma, c),
        )

    return CompiledHelper(term, "Nat[A_enum[C]] -> Str[Σ#][C]", type_at)


def build_b(e: StarFreeExpr, n: int, store: TypeStore) -> Term:
    """Closed boolean term: true iff ⟦e⟧ has a word of length <= tower(n)."""
    compiled = compile_expr(e, store)
    any_h = build_any(e.alphabet, store)
    enum_h = build_enum(e.alphabet, store)
    return app(
        any_h.term,
        App(enum_h.term, tow(store, n).term),
        compiled.term,
    )


def instantiation_chain(e: StarFreeExpr, n: int, store: TypeStore) -> dict:
    """Type plumbing behind build_b, recorded for certificates."""
    compiled = compile_expr(e, store)
    pred = store.arrow(
        str_type(store, e.alphabet, compiled.base_type), bool_type(store)
    )
    acc = store.arrow(pred, pred)
    gamma = e.alphabet.extend(HASH)
    sg = str_type(store, gamma)
    a_enum = store.arrow(sg, sg)
    return {
        "base": compiled.base_type,
        "predicate": pred,
        "list_base": acc,
        "numeral_base": subst_base(a_enum, acc),
        "result": bool_type(store),
    }
