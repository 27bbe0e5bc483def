"""Deterministic random generators and enumerators shared by the tests."""

from __future__ import annotations

import random

from safelam.inference import Typing
from safelam.syntax import App, Lam, Term, Var
from safelam.types import Ty, TypeStore, degree, order


def type_pool(store: TypeStore, max_order: int, max_degree: int):
    """All simple types with degree <= max_degree and order <= max_order."""
    pool = {store.base()}
    for _ in range(max_degree):
        fresh = set()
        for a in pool:
            for b in pool:
                t = store.arrow(a, b)
                if degree(t) <= max_degree and order(t) <= max_order:
                    fresh.add(t)
        if fresh <= pool:
            break
        pool |= fresh
    return sorted(pool, key=lambda t: (t.store._unfold_size(t.i), t.canonical_id()))


def default_context(store: TypeStore) -> dict:
    o = store.base()
    oo = store.arrow(o, o)
    return {"u": o, "g": oo, "h": store.arrow(oo, o)}


class ChurchGen:
    """Random well-typed Church-style terms over a small type pool."""

    def __init__(self, store: TypeStore, rng: random.Random, max_order=3, max_degree=3):
        self.store = store
        self.rng = rng
        self.pool = type_pool(store, max_order, max_degree)
        # argument types C such that C -> T stays inside the pool
        self.arg_types = {
            t: [c for c in self.pool if store.arrow(c, t) in set(self.pool)]
            for t in self.pool
        }

    def term(self, ty: Ty, env: dict, fuel: int) -> Term:
        rng = self.rng
        candidates = [x for x, t in env.items() if t == ty]
        if fuel <= 1:
            if candidates:
                return Var(rng.choice(candidates))
            if ty.is_arrow:
                name = f"v{len(env)}"
                env2 = dict(env)
                env2[name] = ty.left
                return Lam(name, self.term(ty.right, env2, fuel), ty.left)
            # base type, no variable at hand: immediate projection redex
            picks = [x for x, t in env.items() if t.is_base]
            if picks:
                return Var(rng.choice(picks))
            name = f"v{len(env)}"
            env2 = dict(env)
            env2[name] = ty
            return App(Lam(name, Var(name), ty), self.term(ty, env2, fuel))
        roll = rng.random()
        app_bias = 0.55 if fuel >= 5 else 0.25
        args = self.arg_types[ty]
        if args and roll < app_bias:
            c = rng.choice(args)
            split = rng.randint(1, max(1, fuel - 2))
            fun = self.term(self.store.arrow(c, ty), env, fuel - 1 - split)
            arg = self.term(c, env, split)
            return App(fun, arg)
        if ty.is_arrow and roll < 0.88:
            name = f"v{len(env)}"
            env2 = dict(env)
            env2[name] = ty.left
            return Lam(name, self.term(ty.right, env2, fuel - 1), ty.left)
        if candidates:
            return Var(rng.choice(candidates))
        return self.term(ty, env, 1)

    def typing(self, max_fuel=18, closed=False) -> Typing:
        ty = self.rng.choice(self.pool)
        env = {} if closed else dict(default_context(self.store))
        fuel = self.rng.randint(max(3, max_fuel // 2), max_fuel)
        subject = self.term(ty, env, fuel)
        return Typing(subject, env, ty)


def gen_untyped(rng: random.Random, fuel: int, depth: int = 0) -> Term:
    """Random untyped term; free variables drawn from a tiny set."""
    if fuel <= 1:
        return Var(rng.choice("xyz"))
    roll = rng.random()
    if roll < 0.35:
        return Lam(rng.choice("xyz"), gen_untyped(rng, fuel - 1, depth + 1))
    if roll < 0.75:
        split = rng.randint(1, fuel - 1)
        return App(gen_untyped(rng, split, depth + 1), gen_untyped(rng, fuel - split, depth + 1))
    return Var(rng.choice("xyz"))


def gen_bool_term(store: TypeStore, rng: random.Random, fuel: int = 14) -> Term:
    """Random closed term of type Bool = o->o->o (Church-annotated)."""
    gen = ChurchGen(store, rng, max_order=2, max_degree=2)
    o = store.base()
    bool_ty = store.arrows((o, o), o)
    return gen.term(bool_ty, {}, fuel)


def enumerate_church(store: TypeStore, pool, max_size: int, env: dict):
    """Every Church-style term of each pool type with size <= max_size.

    Exhaustive by construction: variables from env, abstractions splitting a
    pool arrow, applications whose function type stays inside the pool.
    """
    pool_set = set(pool)
    arg_types = {t: [c for c in pool if store.arrow(c, t) in pool_set] for t in pool}
    memo: dict = {}

    def terms(ty: Ty, size: int, env_key, env_map):
        key = (ty, size, env_key)
        got = memo.get(key)
        if got is not None:
            return got
        out = []
        if size >= 1:
            for name, t in env_map.items():
                if t == ty and size == 1:
                    out.append(Var(name))
        if ty.is_arrow and size >= 2:
            name = f"b{len(env_map)}"
            env2 = dict(env_map)
            env2[name] = ty.left
            key2 = tuple(sorted((n, t.canonical_id()) for n, t in env2.items()))
            for body in terms(ty.right, size - 1, key2, env2):
                out.append(Lam(name, body, ty.left))
        if size >= 3:
            for c in arg_types[ty]:
                fun_ty = store.arrow(c, ty)
                for fsize in range(1, size - 1):
                    for fun in terms(fun_ty, fsize, env_key, env_map):
                        for arg in terms(c, size - 1 - fsize, env_key, env_map):
                            out.append(App(fun, arg))
        memo[key] = out
        return out

    env_key = tuple(sorted((n, t.canonical_id()) for n, t in env.items()))
    for ty in pool:
        for size in range(1, max_size + 1):
            for t in terms(ty, size, env_key, env):
                yield Typing(t, env, ty)
