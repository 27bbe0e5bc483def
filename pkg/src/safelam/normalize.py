"""Parallel reduction, degree-indexed normalization, naive oracle, eta.

normalize_parallel contracts every redex at once and needs at most d passes,
where d is the maximum redex degree of the (Church-style) input.
normalize_naive is the independent leftmost-outermost oracle; it works on
untyped terms and is what every derived expectation in the test suite runs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping, Optional, Tuple

from .inference import InvalidTyping, Typing, infer_pair
from .syntax import App, Lam, Term, Var, alpha_eq, is_beta_normal, substitute
from .types import Ty, degree

DEFAULT_SIZE_BUDGET = int(os.environ.get("SAFELAM_SIZE_BUDGET", 10_000_000))
DEFAULT_STEP_BUDGET = int(os.environ.get("SAFELAM_STEP_BUDGET", 2_000_000))


class BudgetExceeded(Exception):
    """A step or size budget was hit; never a silent truncation."""


class StepBudgetExceeded(BudgetExceeded):
    pass


class NotBetaNormal(Exception):
    pass


def parallel_step(t: Term) -> Term:
    """One simultaneous pass: contract an application iff its head is an
    abstraction, after reducing both sides.  Annotations are carried along."""
    out: list = []
    todo: list = [("t", t)]
    while todo:
        frame = todo.pop()
        tag = frame[0]
        if tag == "t":
            node = frame[1]
            if isinstance(node, Var):
                out.append(node)
            elif isinstance(node, Lam):
                todo.append(("lam", node.binder, node.annotation))
                todo.append(("t", node.body))
            elif isinstance(node.fun, Lam):
                todo.append(("beta", node.fun.binder))
                todo.append(("t", node.arg))
                todo.append(("t", node.fun.body))
            else:
                todo.append(("app",))
                todo.append(("t", node.arg))
                todo.append(("t", node.fun))
        elif tag == "lam":
            out.append(Lam(frame[1], out.pop(), frame[2]))
        elif tag == "beta":
            arg = out.pop()
            body = out.pop()
            out.append(substitute(body, frame[1], arg))
        else:
            arg = out.pop()
            fun = out.pop()
            out.append(App(fun, arg))
    return out[0]


def max_redex_degree(typing_or_term, context: Optional[Mapping[str, Ty]] = None) -> int:
    """Maximum degree over all redex types (λx:A.t)u, 0 when beta-normal."""
    if isinstance(typing_or_term, Typing):
        term = typing_or_term.subject
        context = typing_or_term.context
    else:
        term = typing_or_term
        context = context or {}
    best = 0
    out: list = []
    todo: list = [("t", term, context)]
    while todo:
        frame = todo.pop()
        tag = frame[0]
        if tag == "t":
            _, node, env = frame
            if isinstance(node, Var):
                ty = env.get(node.name)
                if ty is None:
                    raise InvalidTyping(f"unbound variable {node.name}")
                out.append(ty)
            elif isinstance(node, Lam):
                if node.annotation is None:
                    raise InvalidTyping("missing annotation; infer a typing first")
                env2 = dict(env)
                env2[node.binder] = node.annotation
                todo.append(("lam", node.annotation))
                todo.append(("t", node.body, env2))
            else:
                todo.append(("app", isinstance(node.fun, Lam)))
                todo.append(("t", node.arg, env))
                todo.append(("t", node.fun, env))
        elif tag == "lam":
            out.append(frame[1].store.arrow(frame[1], out.pop()))
        else:
            arg_ty = out.pop()
            fun_ty = out.pop()
            if not fun_ty.is_arrow or fun_ty.left != arg_ty:
                raise InvalidTyping("ill-typed application")
            if frame[1]:  # head is an abstraction: this is a redex
                best = max(best, degree(fun_ty))
            out.append(fun_ty.right)
    return best


@dataclass(frozen=True)
class NormalizationTrace:
    """Per-pass (size, height, max redex degree) snapshots and the result."""

    steps: Tuple[Tuple[int, int, int], ...]
    result: Term


def normalize_parallel(typing: Typing, *, size_budget: int = DEFAULT_SIZE_BUDGET) -> NormalizationTrace:
    """Iterate parallel_step until no redex remains: at most d passes."""
    t = typing.subject
    ctx = typing.context
    d = max_redex_degree(t, ctx)
    steps = []
    while d > 0:
        t = parallel_step(t)
        if t.size > size_budget:
            raise StepBudgetExceeded(
                f"term grew to {t.size} nodes (budget {size_budget})"
            )
        d_next = max_redex_degree(t, ctx)
        steps.append((t.size, t.height, d_next))
        if d_next >= d:
            raise AssertionError("redex degree failed to decrease")
        d = d_next
    return NormalizationTrace(tuple(steps), t)


def normalize_naive(
    t: Term,
    *,
    step_budget: int = DEFAULT_STEP_BUDGET,
    size_budget: int = DEFAULT_SIZE_BUDGET,
) -> Term:
    """Leftmost-outermost reduction to beta-normal form (the oracle path)."""
    steps = 0

    def whnf(node: Term):
        nonlocal steps
        args: list = []
        while True:
            if isinstance(node, App):
                args.append(node.arg)
                node = node.fun
            elif isinstance(node, Lam) and args:
                steps += 1
                if steps > step_budget:
                    raise BudgetExceeded(f"beta-step budget {step_budget} exhausted")
                node = substitute(node.body, node.binder, args.pop())
                if node.size > size_budget:
                    raise BudgetExceeded(f"term grew past {size_budget} nodes")
            else:
                args.reverse()
                return node, args

    out: list = []
    todo: list = [("n", t)]
    while todo:
        frame = todo.pop()
        tag = frame[0]
        if tag == "n":
            head, args = whnf(frame[1])
            if isinstance(head, Lam):
                todo.append(("lam", head.binder, head.annotation))
                todo.append(("n", head.body))
            else:
                out.append(head)
                for a in reversed(args):
                    todo.append(("app",))
                    todo.append(("n", a))
        elif tag == "lam":
            out.append(Lam(frame[1], out.pop(), frame[2]))
        else:
            arg = out.pop()
            fun = out.pop()
            out.append(App(fun, arg))
    return out[0]


def beta_convertible(t: Term, u: Term, *, size_budget: int = DEFAULT_SIZE_BUDGET) -> bool:
    """Joint typing, parallel normalization of both sides, alpha comparison."""
    jt, ju = infer_pair(t, u)
    nt = normalize_parallel(jt, size_budget=size_budget).result
    nu = normalize_parallel(ju, size_budget=size_budget).result
    return alpha_eq(nt, nu, compare_annotations=False)


def eta_reduce(t: Term) -> Term:
    """λx.(M x) -> M (x not free in M), applied to fixpoint; input beta-normal."""
    if not is_beta_normal(t):
        raise NotBetaNormal("eta reduction is applied after beta-normalization")
    out: list = []
    todo: list = [("t", t)]
    while todo:
        frame = todo.pop()
        tag = frame[0]
        if tag == "t":
            node = frame[1]
            if isinstance(node, Var):
                out.append(node)
            elif isinstance(node, Lam):
                todo.append(("lam", node.binder, node.annotation))
                todo.append(("t", node.body))
            else:
                todo.append(("app",))
                todo.append(("t", node.arg))
                todo.append(("t", node.fun))
        elif tag == "lam":
            body = out.pop()
            binder = frame[1]
            if (
                isinstance(body, App)
                and isinstance(body.arg, Var)
                and body.arg.name == binder
                and binder not in body.fun.free
            ):
                out.append(body.fun)
            else:
                out.append(Lam(binder, body, frame[2]))
        else:
            arg = out.pop()
            fun = out.pop()
            out.append(App(fun, arg))
    return out[0]


def beta_eta_convertible(t: Term, u: Term, *, size_budget: int = DEFAULT_SIZE_BUDGET) -> bool:
    """Alpha-compare the beta-eta-normal forms of both sides."""
    jt, ju = infer_pair(t, u)
    nt = eta_reduce(normalize_parallel(jt, size_budget=size_budget).result)
    nu = eta_reduce(normalize_parallel(ju, size_budget=size_budget).result)
    return alpha_eq(nt, nu, compare_annotations=False)
