import random

import pytest
from hypothesis import given, settings, strategies as st

from helpers import ChurchGen, gen_untyped
from safelam.inference import NotTypable, Typing, erase, infer
from safelam.normalize import (
    BudgetExceeded,
    NotBetaNormal,
    StepBudgetExceeded,
    beta_convertible,
    beta_eta_convertible,
    eta_reduce,
    max_redex_degree,
    normalize_naive,
    normalize_parallel,
    parallel_step,
)
from safelam.syntax import App, Lam, Var, alpha_eq, is_beta_normal, parse_term, parse_type
from safelam.types import TypeStore


def test_parallel_step_examples():
    assert alpha_eq(parallel_step(Var("x")), Var("x"))
    t = parse_term(r"(\f.f (f y)) (\z.z)")
    assert alpha_eq(parallel_step(t), parse_term(r"(\z.z) ((\z.z) y)"), compare_annotations=False)
    i = parse_term(r"\x.x")
    assert alpha_eq(parallel_step(i), i)


def test_max_redex_degree_examples():
    store = TypeStore()
    assert max_redex_degree(infer(parse_term(r"\x.\y.x"), store=store)) == 0
    t = infer(parse_term(r"(\f.f (f y)) (\z.z)"), store=store)
    assert max_redex_degree(t) == 2
    u = infer(parse_term(r"(\z.z) y"), store=store)
    assert max_redex_degree(u) == 1


def test_normalize_parallel_two_steps():
    typing = infer(parse_term(r"(\f.f (f y)) (\z.z)"))
    trace = normalize_parallel(typing)
    assert len(trace.steps) == 2
    assert alpha_eq(trace.result, Var("y"), compare_annotations=False)


def test_normalize_parallel_normal_input():
    typing = infer(parse_term(r"\x.\y.x"))
    trace = normalize_parallel(typing)
    assert trace.steps == ()


def test_normalize_parallel_tow2():
    two = parse_term(r"\f.\x.f (f x)")
    typing = infer(App(two, two))
    trace = normalize_parallel(typing)
    four = parse_term(r"\f.\x.f (f (f (f x)))")
    assert alpha_eq(trace.result, four, compare_annotations=False)


def test_naive_examples():
    assert alpha_eq(normalize_naive(parse_term(r"(\x.\y.x) a b")), Var("a"))
    omega = parse_term(r"(\x.x x) (\x.x x)")
    with pytest.raises(BudgetExceeded):
        normalize_naive(omega, step_budget=100)


def test_parallel_size_budget():
    two = parse_term(r"\f.\x.f (f x)")
    t = App(App(two, two), two)  # normalizes to 16, sizes grow on the way
    typing = infer(t)
    with pytest.raises(StepBudgetExceeded):
        normalize_parallel(typing, size_budget=10)


def test_beta_convertible_examples():
    two = parse_term(r"\f.\x.f (f x)")
    four = parse_term(r"\f.\x.f (f (f (f x)))")
    assert beta_convertible(App(two, two), four)
    assert not beta_convertible(parse_term(r"\x.\y.x"), parse_term(r"\x.\y.y"))
    t = parse_term(r"\x.\y.x y")
    assert beta_convertible(t, t)


def test_beta_convertible_untypable():
    with pytest.raises(NotTypable):
        beta_convertible(parse_term(r"\x.x"), parse_term(r"\x.x x"))


def test_eta_examples():
    assert alpha_eq(eta_reduce(parse_term(r"\x.f x")), Var("f"))
    assert alpha_eq(eta_reduce(parse_term(r"\f.\x.f x")), parse_term(r"\f.f"))
    true = parse_term(r"\x.\y.x")
    assert alpha_eq(eta_reduce(true), true)
    with pytest.raises(NotBetaNormal):
        eta_reduce(parse_term(r"(\x.x) y"))


def test_eta_keeps_needed_binder():
    t = parse_term(r"\x.x x")
    assert alpha_eq(eta_reduce(t), t)


def test_beta_eta_examples():
    assert beta_eta_convertible(parse_term(r"\f.\x.f x"), parse_term(r"\f.f"))
    assert not beta_eta_convertible(parse_term(r"\x.\y.x"), parse_term(r"\x.\y.y"))


def _degree_chain(typing):
    """Degrees observed along iterated parallel steps."""
    t = typing.subject
    degs = [max_redex_degree(t, typing.context)]
    while degs[-1] > 0:
        t = parallel_step(t)
        degs.append(max_redex_degree(t, typing.context))
    return t, degs


def test_degree_decrease_random_corpus():
    store = TypeStore()
    rng = random.Random(23)
    gen = ChurchGen(store, rng)
    for _ in range(120):
        typing = gen.typing()
        nf, degs = _degree_chain(typing)
        assert all(a > b for a, b in zip(degs, degs[1:]))
        assert len(degs) - 1 <= degs[0]
        assert is_beta_normal(nf)


def test_oracle_agreement_random_corpus():
    store = TypeStore()
    rng = random.Random(29)
    gen = ChurchGen(store, rng)
    for _ in range(120):
        typing = gen.typing()
        par = normalize_parallel(typing).result
        naive = normalize_naive(erase(typing))
        assert alpha_eq(par, naive, compare_annotations=False)


def test_height_bound_untyped():
    rng = random.Random(31)
    for _ in range(300):
        t = gen_untyped(rng, rng.randint(1, 40))
        s = parallel_step(t)
        assert s.height <= t.size <= 2**t.height


@settings(max_examples=60)
@given(st.integers(0, 2**30))
def test_eta_confluence_random_orders(seed):
    # all maximal eta-reduction orders reach the same normal form
    rng = random.Random(seed)
    store = TypeStore()
    gen = ChurchGen(store, rng, max_order=2, max_degree=2)
    typing = gen.typing(max_fuel=10)
    nf = erase(normalize_parallel(typing).result)

    def random_eta(t):
        while True:
            redexes = []

            def walk(node, path):
                if isinstance(node, Lam):
                    b = node.body
                    if (
                        isinstance(b, App)
                        and isinstance(b.arg, Var)
                        and b.arg.name == node.binder
                        and node.binder not in b.fun.free
                    ):
                        redexes.append(path)
                    walk(node.body, path + ("body",))
                elif isinstance(node, App):
                    walk(node.fun, path + ("fun",))
                    walk(node.arg, path + ("arg",))

            walk(t, ())
            if not redexes:
                return t
            chosen = rng.choice(redexes)

            def rewrite(node, path):
                if path == chosen:
                    return node.body.fun
                if isinstance(node, Lam):
                    return Lam(node.binder, rewrite(node.body, path + ("body",)), node.annotation)
                if isinstance(node, App):
                    return App(
                        rewrite(node.fun, path + ("fun",)),
                        rewrite(node.arg, path + ("arg",)),
                    )
                return node

            t = rewrite(t, ())

    reference = eta_reduce(nf)
    for _ in range(3):
        assert alpha_eq(random_eta(nf), reference)
