import itertools
import random

import pytest

from safelam.church import Alphabet, LetterNotInAlphabet
from safelam.normalize import BudgetExceeded
from safelam.starfree import (
    AlphabetMismatch,
    Concat,
    Empty,
    Eps,
    ExprParseError,
    Letter,
    Not,
    Union,
    concat,
    empty,
    eps,
    equivalent_up_to,
    expr_size,
    letter,
    member,
    mk_equiv_expr,
    neg,
    nonempty_up_to,
    parse_expr,
    union,
    words_up_to,
)

ABC = Alphabet.of("abc")
AB = Alphabet.of("ab")


def test_parse_examples():
    e = parse_expr("a.~0 | b.~0", ABC)
    assert e == union(
        concat(letter(ABC, "a"), neg(empty(ABC))),
        concat(letter(ABC, "b"), neg(empty(ABC))),
    )
    f = parse_expr("~(e | c.~0)", ABC)
    assert f == neg(union(eps(ABC), concat(letter(ABC, "c"), neg(empty(ABC)))))
    assert parse_expr("0", ABC) == empty(ABC)


def test_parse_juxtaposition():
    assert parse_expr("ab", AB) == parse_expr("a.b", AB)
    assert parse_expr("a b", AB) == parse_expr("a.b", AB)


def test_parse_errors():
    with pytest.raises(ExprParseError):
        parse_expr("a|", AB)
    with pytest.raises(ExprParseError):
        parse_expr("(a", AB)
    with pytest.raises(ExprParseError):
        parse_expr("a)", AB)
    with pytest.raises(ExprParseError):
        parse_expr("x", AB)


def test_parse_rejects_reserved_alphabet():
    with pytest.raises(ValueError):
        parse_expr("a", Alphabet.of("e0"))


def test_member_paper_examples():
    starts_ab = parse_expr("a.~0 | b.~0", ABC)
    assert member(starts_ab, "ba")
    assert member(starts_ab, "a")
    assert not member(starts_ab, "ca")
    not_c = parse_expr("~(e | c.~0)", ABC)
    assert not member(not_c, "ca")
    assert not member(not_c, "")
    assert member(not_c, "ab")


def test_member_basics():
    assert member(eps(AB), "")
    assert not member(eps(AB), "a")
    assert not member(empty(AB), "")
    assert member(letter(AB, "a"), "a")
    assert not member(letter(AB, "a"), "aa")
    with pytest.raises(LetterNotInAlphabet):
        member(eps(AB), "z")


def test_member_concat_splits():
    e = concat(parse_expr("~0", AB), letter(AB, "b"))
    assert member(e, "aab")
    assert member(e, "b")
    assert not member(e, "ba")


def _naive_member(e, w):
    if isinstance(e, Empty):
        return False
    if isinstance(e, Eps):
        return w == ""
    if isinstance(e, Letter):
        return w == e.letter
    if isinstance(e, Union):
        return _naive_member(e.left, w) or _naive_member(e.right, w)
    if isinstance(e, Concat):
        return any(
            _naive_member(e.left, w[:i]) and _naive_member(e.right, w[i:])
            for i in range(len(w) + 1)
        )
    return not _naive_member(e.operand, w)


def _random_expr(rng, sigma, size):
    if size <= 1:
        return rng.choice(
            [empty(sigma), eps(sigma)] + [letter(sigma, c) for c in sigma]
        )
    if size == 2 or rng.random() < 0.34:
        return neg(_random_expr(rng, sigma, size - 1))
    split = rng.randint(1, size - 2)
    ctor = union if rng.random() < 0.5 else concat
    return ctor(_random_expr(rng, sigma, split), _random_expr(rng, sigma, size - 1 - split))


def test_memoized_member_equals_naive():
    rng = random.Random(17)
    for _ in range(60):
        e = _random_expr(rng, AB, rng.randint(1, 7))
        for w in words_up_to(AB, 6):
            assert member(e, w) == _naive_member(e, w)


def test_de_morgan():
    rng = random.Random(19)
    for _ in range(40):
        e = _random_expr(rng, AB, rng.randint(1, 5))
        f = _random_expr(rng, AB, rng.randint(1, 5))
        lhs = neg(union(e, f))
        for w in words_up_to(AB, 4):
            assert member(lhs, w) == (not (member(e, w) or member(f, w)))


def test_nonempty_up_to_examples():
    starts_ab = parse_expr("a.~0 | b.~0", ABC)
    assert nonempty_up_to(starts_ab, 3) == "a"
    assert nonempty_up_to(empty(ABC), 4) is None
    assert nonempty_up_to(neg(eps(AB)), 0) is None
    assert nonempty_up_to(neg(eps(AB)), 1) == "a"


def test_nonempty_least_witness_order():
    e = parse_expr("b|ab", AB)
    assert nonempty_up_to(e, 3) == "b"  # length before alphabet order


def test_enumeration_cap():
    with pytest.raises(BudgetExceeded):
        nonempty_up_to(empty(AB), 40, cap=1000)


def test_mk_equiv_expr():
    e = parse_expr("a.~0 | b.~0", ABC)
    f = parse_expr("~(e | c.~0)", ABC)
    assert nonempty_up_to(mk_equiv_expr(e, f), 6) is None
    assert nonempty_up_to(mk_equiv_expr(e, e), 5) is None
    g = mk_equiv_expr(letter(AB, "a"), letter(AB, "b"))
    assert nonempty_up_to(g, 1) in ("a", "b")


def test_mk_equiv_is_symmetric_difference():
    rng = random.Random(23)
    for _ in range(25):
        e = _random_expr(rng, AB, rng.randint(1, 5))
        f = _random_expr(rng, AB, rng.randint(1, 5))
        d = mk_equiv_expr(e, f)
        for w in words_up_to(AB, 5):
            assert member(d, w) == (member(e, w) != member(f, w))


def test_equivalent_up_to():
    e = parse_expr("a.~0 | b.~0", ABC)
    f = parse_expr("~(e | c.~0)", ABC)
    assert equivalent_up_to(e, f, 6)
    assert not equivalent_up_to(letter(AB, "a"), union(letter(AB, "a"), eps(AB)), 0)
    assert equivalent_up_to(e, e, 4)


def test_alphabet_mismatch():
    with pytest.raises(AlphabetMismatch):
        mk_equiv_expr(letter(AB, "a"), letter(ABC, "a"))
    with pytest.raises(AlphabetMismatch):
        union(letter(AB, "a"), letter(ABC, "b"))


def test_expr_size():
    assert expr_size(parse_expr("a.~0|b.~0", ABC)) == 9
    assert expr_size(empty(AB)) == 1


def _tower(n):
    v = 1
    for _ in range(n):
        v = 2**v
    return v


_mask_cache: dict = {}


def _accepted_masks(e, max_len):
    """Bulk word-set semantics: per length, a bitmask over lexicographic
    word indices.  Independent of member(); used for length-16 sweeps."""
    key = (e, max_len)
    got = _mask_cache.get(key)
    if got is not None:
        return got
    k = len(e.alphabet.letters)
    if isinstance(e, Empty):
        out = [0] * (max_len + 1)
    elif isinstance(e, Eps):
        out = [1] + [0] * max_len
    elif isinstance(e, Letter):
        out = [0] * (max_len + 1)
        if max_len >= 1:
            out[1] = 1 << e.alphabet.index(e.letter)
    elif isinstance(e, Union):
        l = _accepted_masks(e.left, max_len)
        r = _accepted_masks(e.right, max_len)
        out = [a | b for a, b in zip(l, r)]
    elif isinstance(e, Not):
        inner = _accepted_masks(e.operand, max_len)
        out = [((1 << k**n) - 1) ^ m for n, m in enumerate(inner)]
    else:
        l = _accepted_masks(e.left, max_len)
        r = _accepted_masks(e.right, max_len)
        out = [0] * (max_len + 1)
        for n in range(max_len + 1):
            acc = 0
            for n1 in range(n + 1):
                lm, rm = l[n1], r[n - n1]
                if not (lm and rm):
                    continue
                width = k ** (n - n1)
                if width == 1:  # rm is the length-0 mask, i.e. the bit for ε
                    acc |= lm
                    continue
                count = k**n1
                if lm == (1 << count) - 1:  # full left side: repunit spread
                    spread = ((1 << (width * count)) - 1) // ((1 << width) - 1)
                else:
                    spread = 0
                    u = lm
                    while u:
                        low = u & -u
                        spread |= 1 << ((low.bit_length() - 1) * width)
                        u ^= low
                # each left word owns a disjoint width-slot, so the product
                # has no carries and equals the OR of the shifted copies
                acc |= rm * spread
            out[n] = acc
    _mask_cache[key] = out
    return out


def _mask_least_witness(e, max_len):
    masks = _accepted_masks(e, max_len)
    for n, m in enumerate(masks):
        if m:
            idx = (m & -m).bit_length() - 1
            word = []
            for _ in range(n):
                word.append(e.alphabet.letters[idx % len(e.alphabet.letters)])
                idx //= len(e.alphabet.letters)
            return "".join(reversed(word))
    return None


def test_masks_agree_with_member():
    rng = random.Random(29)
    for _ in range(40):
        e = _random_expr(rng, AB, rng.randint(1, 6))
        masks = _accepted_masks(e, 5)
        for w in words_up_to(AB, 5):
            idx = 0
            for c in w:
                idx = idx * 2 + AB.index(c)
            assert bool(masks[len(w)] >> idx & 1) == member(e, w)


def test_short_witness_bound_spot_check():
    # every nonempty language of a small expression has a short witness:
    # no witness within min(tower(size-1), 16) means none slightly beyond
    validated_scans = 0
    for size in range(1, 5):
        for e in _exhaustive(AB, size):
            bound = min(_tower(expr_size(e) - 1), 16)
            horizon = min(bound + 4, 16)
            witness = _mask_least_witness(e, horizon)
            if witness is None or len(witness) > bound:
                # empty within the tower bound: stays empty a bit beyond
                assert witness is None, (e, witness)
                if size <= 3:
                    assert nonempty_up_to(e, bound) is None
                    assert equivalent_up_to(e, empty(AB), bound)
                elif validated_scans < 2:
                    validated_scans += 1
                    assert nonempty_up_to(e, min(bound, 12)) is None
            else:
                assert member(e, witness)
                assert nonempty_up_to(e, min(bound, 6)) is not None or len(witness) > 6


def _exhaustive(sigma, size):
    if size == 1:
        return [empty(sigma), eps(sigma)] + [letter(sigma, c) for c in sigma]
    out = [neg(e) for e in _exhaustive(sigma, size - 1)]
    for ls in range(1, size - 1):
        for l in _exhaustive(sigma, ls):
            for r in _exhaustive(sigma, size - 1 - ls):
                out.append(union(l, r))
                out.append(concat(l, r))
    return out
