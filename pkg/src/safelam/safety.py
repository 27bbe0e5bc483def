"""Safety, long-safety and homogeneous-long-safety checkers.

The primary checkers are positional: walk a Church-style term, compute the
type of every subterm, and flag any subterm that sits in an unsafe position
while containing a free variable of strictly smaller order.  Long-safety adds
one more unsafe position: a non-abstraction body directly under a binder.

`long_safe_derivable` is an independent exhaustive search in the multi-binder
typing-rule presentation; it exists to cross-validate the positional checker
on small terms and is not meant for large inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Tuple

from .inference import NotTypable, NotTypableAtGivenType, Typing, format_path, infer
from .syntax import App, Lam, Term, Var, rename_apart
from .types import Ty, is_homogeneous, order

INFINITE_ORDER = math.inf

CLAUSE_WHOLE = "whole-term"
CLAUSE_ARGUMENT = "argument"
CLAUSE_APPLIED = "applied-non-application"
CLAUSE_LAMBDA_BODY = "lambda-body"
CLAUSE_INHOMOGENEOUS = "inhomogeneous-type"


def inford(context: Mapping[str, Ty]):
    """Least order among the bindings; +infinity for the empty context."""
    if not context:
        return INFINITE_ORDER
    return min(order(ty) for ty in context.values())


@dataclass(frozen=True)
class UnsafeWitness:
    path: Tuple[str, ...]
    clause: str
    subterm_type: Ty
    subterm_order: int
    variable: Optional[str] = None
    variable_type: Optional[Ty] = None
    variable_order: Optional[int] = None

    def __str__(self) -> str:
        loc = format_path(self.path)
        if self.clause == CLAUSE_INHOMOGENEOUS:
            return f"non-homogeneous type (order {self.subterm_order}) at {loc}"
        return (
            f"subterm at {loc} (order {self.subterm_order}) in {self.clause} position "
            f"has free {self.variable} of order {self.variable_order}"
        )


@dataclass(frozen=True)
class SafetyReport:
    safe: bool
    witness: Optional[UnsafeWitness] = None

    def __str__(self) -> str:
        return "safe" if self.safe else f"unsafe: {self.witness}"

    def to_dict(self) -> dict:
        if self.safe:
            return {"verdict": "safe"}
        w = self.witness
        return {
            "verdict": "unsafe",
            "path": format_path(w.path),
            "clause": w.clause,
            "subterm_order": w.subterm_order,
            "variable": w.variable,
            "variable_order": w.variable_order,
        }


def _subterm_infos(typing: Typing):
    """Preorder list of (path, node, type, env, clauses applying there)."""
    infos: list = []

    def go(node: Term, env: Mapping[str, Ty], path, clauses) -> Ty:
        if isinstance(node, Var):
            ty = env[node.name]
            infos.append((path, node, ty, env, clauses))
            return ty
        if isinstance(node, Lam):
            env2 = dict(env)
            env2[node.binder] = node.annotation
            body_clauses = () if isinstance(node.body, Lam) else (CLAUSE_LAMBDA_BODY,)
            slot = len(infos)
            infos.append(None)
            body_ty = go(node.body, env2, path + ("body",), body_clauses)
            ty = node.annotation.store.arrow(node.annotation, body_ty)
            infos[slot] = (path, node, ty, env, clauses)
            return ty
        slot = len(infos)
        infos.append(None)
        fun_clauses = () if isinstance(node.fun, App) else (CLAUSE_APPLIED,)
        fun_ty = go(node.fun, env, path + ("fun",), fun_clauses)
        go(node.arg, env, path + ("arg",), (CLAUSE_ARGUMENT,))
        ty = fun_ty.right
        infos[slot] = (path, node, ty, env, clauses)
        return ty

    go(typing.subject, typing.context, (), (CLAUSE_WHOLE,))
    return infos


def _positional_check(typing: Typing, long: bool) -> SafetyReport:
    for path, node, ty, env, clauses in _subterm_infos(typing):
        if not long:
            clauses = tuple(c for c in clauses if c != CLAUSE_LAMBDA_BODY)
        if not clauses:
            continue
        t_ord = order(ty)
        if t_ord == 0:
            continue  # no variable can have strictly smaller order
        offender = None
        for name in sorted(node.free):
            v_ord = order(env[name])
            if v_ord < t_ord and (offender is None or v_ord < offender[1]):
                offender = (name, v_ord)
        if offender is not None:
            name, v_ord = offender
            return SafetyReport(
                False,
                UnsafeWitness(path, clauses[0], ty, t_ord, name, env[name], v_ord),
            )
    return SafetyReport(True)


def check_safe(typing: Typing) -> SafetyReport:
    """Safety condition on a Church-style typing."""
    return _positional_check(typing, long=False)


def check_long_safe(typing: Typing) -> SafetyReport:
    """Safety plus the extra unsafe position under binders."""
    return _positional_check(typing, long=True)


def check_hls(t: Term, a: Ty) -> SafetyReport:
    """Homogeneous long-safety of a Curry-style term at the given type.

    Elaborates t at type a (inference constrained at the root), then requires
    every subterm type to be homogeneous and the long-safety check to pass.
    """
    typing = infer(t, at=a)
    for path, _node, ty, _env, _clauses in _subterm_infos(typing):
        if not is_homogeneous(ty):
            return SafetyReport(
                False, UnsafeWitness(path, CLAUSE_INHOMOGENEOUS, ty, order(ty))
            )
    return check_long_safe(typing)


# ---------------------------------------------------------------------------
# Rule-system oracle (exhaustive derivation search, small terms only)

def long_safe_derivable(typing: Typing) -> bool:
    """Derivability in the multi-binder long-safe rule system.

    Contexts are always restricted to the free variables of the subject
    (weakening makes that the least constrained choice), and every way of
    splitting binder and application spines into rule instances is tried.
    """
    subject = rename_apart(typing.subject)
    store = typing.store

    type_of: dict = {}

    def compute_type(node: Term, env: Mapping[str, Ty]) -> Ty:
        got = type_of.get(id(node))
        if got is not None:
            return got
        if isinstance(node, Var):
            ty = env[node.name]
        elif isinstance(node, Lam):
            env2 = dict(env)
            env2[node.binder] = node.annotation
            ty = store.arrow(node.annotation, compute_type(node.body, env2))
        else:
            compute_type(node.arg, env)
            ty = compute_type(node.fun, env).right
        type_of[id(node)] = ty
        return ty

    compute_type(subject, typing.context)

    memo: dict = {}

    def restricted(env: Mapping[str, Ty], node: Term) -> dict:
        return {x: env[x] for x in node.free}

    def derive(node: Term, env: Mapping[str, Ty]) -> bool:
        envr = restricted(env, node)
        key = (id(node), tuple(sorted((x, ty.canonical_id()) for x, ty in envr.items())))
        got = memo.get(key)
        if got is not None:
            return got
        memo[key] = False  # provisional; terms are trees so no cycles
        result = _derive_node(node, envr)
        memo[key] = result
        return result

    def _derive_node(node: Term, env: dict) -> bool:
        if isinstance(node, Var):
            return True
        if isinstance(node, Lam):
            # collect the binder spine; try every split length n >= 1
            binders = []
            rest: Term = node
            while isinstance(rest, Lam):
                binders.append((rest.binder, rest.annotation))
                rest = rest.body
            lam_nodes = []
            cursor: Term = node
            while isinstance(cursor, Lam):
                lam_nodes.append(cursor)
                cursor = cursor.body
            bound = inford(env)
            for n in range(1, len(binders) + 1):
                if order(type_of[id(node)]) > bound:
                    continue
                inner: Term = lam_nodes[n - 1].body
                env2 = dict(env)
                env2.update(dict(binders[:n]))
                if derive(inner, env2):
                    return True
            return False
        # application spine: head u1 ... un with every grouping of arguments
        spine = []
        cursor = node
        while isinstance(cursor, App):
            spine.append(cursor)
            cursor = cursor.fun
        spine.reverse()  # spine[j] = head applied to j+1 arguments
        head = cursor

        derivable_prefix: dict = {}

        def prefix_ok(j: int) -> bool:
            if j == 0:
                return derive(head, env)
            got = derivable_prefix.get(j)
            if got is not None:
                return got
            pref = spine[j - 1]
            ok = False
            if order(type_of[id(pref)]) <= inford(restricted(env, pref)):
                for i in range(j - 1, -1, -1):
                    if prefix_ok(i) and all(
                        derive(spine[k].arg, env) for k in range(i, j)
                    ):
                        ok = True
                        break
            derivable_prefix[j] = ok
            return ok

        return prefix_ok(len(spine))

    return derive(subject, typing.context)
