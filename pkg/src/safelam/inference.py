"""Principal simple-type inference by first-order unification over DAG types.

Inference elaborates Curry-style terms into fully annotated Church style.
Metavariables left unconstrained after solving default to the base type, so
the reported typing is canonical.  A joint mode infers one common type for a
pair of terms by adding a single extra equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Tuple

from .syntax import App, Lam, Term, Var, is_beta_normal
from .types import Ty, TypeStore

Path = Tuple[str, ...]


class NotTypable(Exception):
    def __init__(self, reason: str, path: Path = ()):  # path into the subject term
        super().__init__(f"{reason} at {format_path(path)}")
        self.reason = reason
        self.path = path


class NoCommonType(NotTypable):
    pass


class NotTypableAtGivenType(NotTypable):
    pass


class NotNormalForm(Exception):
    pass


def format_path(path: Path) -> str:
    return ".".join(path) if path else "<root>"


@dataclass(frozen=True)
class Typing:
    """A Church-style subject with its context and type, all in one store."""

    subject: Term
    context: Mapping[str, Ty]
    type: Ty

    @property
    def store(self) -> TypeStore:
        return self.type.store


# ---------------------------------------------------------------------------
# Unification engine

_META, _ARROW, _GROUND = 0, 1, 2


class _Solver:
    def __init__(self, store: TypeStore):
        self.store = store
        self.kind: list = []
        self.a: list = []  # arrow left / ground Ty
        self.b: list = []  # arrow right
        self.parent: list = []
        self._ground_cache: dict = {}
        self._resolved: dict = {}

    def _new(self, kind, a=None, b=None) -> int:
        n = len(self.kind)
        self.kind.append(kind)
        self.a.append(a)
        self.b.append(b)
        self.parent.append(n)
        return n

    def meta(self) -> int:
        return self._new(_META)

    def arrow(self, l: int, r: int) -> int:
        return self._new(_ARROW, l, r)

    def ground(self, ty: Ty) -> int:
        n = self._ground_cache.get(ty.i)
        if n is None:
            n = self._new(_GROUND, ty)
            self._ground_cache[ty.i] = n
        return n

    def find(self, n: int) -> int:
        root = n
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[n] != root:
            self.parent[n], n = root, self.parent[n]
        return root

    def _occurs(self, m: int, n: int) -> bool:
        todo = [n]
        seen = set()
        while todo:
            n = self.find(todo.pop())
            if n == m:
                return True
            if n in seen or self.kind[n] != _ARROW:
                continue
            seen.add(n)
            todo.append(self.a[n])
            todo.append(self.b[n])
        return False

    def unify(self, x: int, y: int, path: Path, exc=NotTypable) -> None:
        todo = [(x, y)]
        while todo:
            x, y = todo.pop()
            x, y = self.find(x), self.find(y)
            if x == y:
                continue
            kx, ky = self.kind[x], self.kind[y]
            if kx == _META or ky == _META:
                m, other = (x, y) if kx == _META else (y, x)
                if self.kind[other] == _ARROW and self._occurs(m, other):
                    raise exc("occurs check failed (infinite type)", path)
                self.parent[m] = other
            elif kx == _GROUND and ky == _GROUND:
                if self.a[x] != self.a[y]:
                    raise exc("type clash", path)
                self.parent[x] = y
            elif kx == _ARROW and ky == _ARROW:
                self.parent[x] = y
                todo.append((self.a[x], self.a[y]))
                todo.append((self.b[x], self.b[y]))
            else:  # one ground, one arrow: decompose the ground type
                g, arr = (x, y) if kx == _GROUND else (y, x)
                gty: Ty = self.a[g]
                if gty.is_base:
                    raise exc("type clash", path)
                self.parent[arr] = g
                todo.append((self.ground(gty.left), self.a[arr]))
                todo.append((self.ground(gty.right), self.b[arr]))

    def resolve(self, n: int) -> Ty:
        n = self.find(n)
        got = self._resolved.get(n)
        if got is not None:
            return got
        kind = self.kind[n]
        if kind == _META:
            ty = self.store.base()  # unconstrained: default to o
        elif kind == _GROUND:
            ty = self.a[n]
        else:
            ty = self.store.arrow(self.resolve(self.a[n]), self.resolve(self.b[n]))
        self._resolved[n] = ty
        return ty


# ---------------------------------------------------------------------------
# Constraint generation

def _collect(solver: _Solver, t: Term, free: dict, exc=NotTypable):
    """Returns (type node, shadow tree mirroring t with per-binder nodes)."""
    out: list = []
    todo: list = [("t", t, {}, ())]
    while todo:
        frame = todo.pop()
        tag = frame[0]
        if tag == "t":
            _, node, env, path = frame
            if isinstance(node, Var):
                n = env.get(node.name)
                if n is None:
                    n = free.get(node.name)
                    if n is None:
                        n = solver.meta()
                        free[node.name] = n
                out.append((n, ("v", node.name)))
            elif isinstance(node, Lam):
                n = solver.ground(node.annotation) if node.annotation else solver.meta()
                env2 = dict(env)
                env2[node.binder] = n
                todo.append(("lam", node.binder, n))
                todo.append(("t", node.body, env2, path + ("body",)))
            else:
                todo.append(("app", path))
                todo.append(("t", node.arg, env, path + ("arg",)))
                todo.append(("t", node.fun, env, path + ("fun",)))
        elif tag == "lam":
            _, binder, n = frame
            bn, bs = out.pop()
            out.append((solver.arrow(n, bn), ("l", binder, n, bs)))
        else:  # app
            path = frame[1]
            an, ashadow = out.pop()
            fn, fshadow = out.pop()
            res = solver.meta()
            solver.unify(fn, solver.arrow(an, res), path, exc)
            out.append((res, ("a", fshadow, ashadow)))
    return out[0]


def _materialize(solver: _Solver, shadow) -> Term:
    out: list = []
    todo: list = [("t", shadow)]
    while todo:
        frame = todo.pop()
        if frame[0] == "t":
            node = frame[1]
            if node[0] == "v":
                out.append(Var(node[1]))
            elif node[0] == "l":
                todo.append(("mk", node[1], node[2]))
                todo.append(("t", node[3]))
            else:
                todo.append(("mkapp",))
                todo.append(("t", node[2]))
                todo.append(("t", node[1]))
        elif frame[0] == "mk":
            out.append(Lam(frame[1], out.pop(), solver.resolve(frame[2])))
        else:
            a = out.pop()
            f = out.pop()
            out.append(App(f, a))
    return out[0]


def infer(t: Term, *, store: Optional[TypeStore] = None, at: Optional[Ty] = None) -> Typing:
    """Principal typing of a Curry-style term, metavariables defaulted to o.

    Existing annotations become equations.  With `at`, the subject type is
    additionally constrained to the given type.
    """
    if at is not None:
        store = at.store
    elif store is None:
        store = TypeStore()
    solver = _Solver(store)
    free: dict = {}
    exc = NotTypableAtGivenType if at is not None else NotTypable
    root, shadow = _collect(solver, t, free, exc)
    if at is not None:
        solver.unify(root, solver.ground(at), (), NotTypableAtGivenType)
    subject = _materialize(solver, shadow)
    context = {name: solver.resolve(n) for name, n in free.items()}
    return Typing(subject, context, solver.resolve(root))


def infer_pair(t: Term, u: Term, *, store: Optional[TypeStore] = None):
    """Joint typing: one common principal type for both terms (defaulted)."""
    if store is None:
        store = TypeStore()
    solver = _Solver(store)
    free: dict = {}
    rt, st = _collect(solver, t, free, NoCommonType)
    ru, su = _collect(solver, u, free, NoCommonType)
    solver.unify(rt, ru, (), NoCommonType)
    common = solver.resolve(rt)
    context = {name: solver.resolve(n) for name, n in free.items()}
    return (
        Typing(_materialize(solver, st), context, common),
        Typing(_materialize(solver, su), context, common),
    )


def erase(t) -> Term:
    """Strip all annotations; accepts a Typing or a Term."""
    if isinstance(t, Typing):
        t = t.subject
    out: list = []
    todo: list = [("t", t)]
    while todo:
        frame = todo.pop()
        if frame[0] == "t":
            node = frame[1]
            if isinstance(node, Var):
                out.append(node)
            elif isinstance(node, Lam):
                todo.append(("lam", node.binder))
                todo.append(("t", node.body))
            else:
                todo.append(("app",))
                todo.append(("t", node.arg))
                todo.append(("t", node.fun))
        elif frame[0] == "lam":
            out.append(Lam(frame[1], out.pop()))
        else:
            a = out.pop()
            f = out.pop()
            out.append(App(f, a))
    return out[0]


class InvalidTyping(Exception):
    """A supposedly Church-style term failed the independent checking pass."""


def church_type_of(t: Term, context: Mapping[str, Ty], store: TypeStore) -> Ty:
    """Type of a fully annotated term, validating every application."""
    out: list = []
    todo: list = [("t", t, context)]
    while todo:
        frame = todo.pop()
        if frame[0] == "t":
            _, node, env = frame
            if isinstance(node, Var):
                ty = env.get(node.name)
                if ty is None:
                    raise InvalidTyping(f"unbound variable {node.name}")
                out.append(ty)
            elif isinstance(node, Lam):
                if node.annotation is None:
                    raise InvalidTyping(f"missing annotation on binder {node.binder}")
                env2 = dict(env)
                env2[node.binder] = node.annotation
                todo.append(("lam", node.annotation))
                todo.append(("t", node.body, env2))
            else:
                todo.append(("app",))
                todo.append(("t", node.arg, env))
                todo.append(("t", node.fun, env))
        elif frame[0] == "lam":
            out.append(store.arrow(frame[1], out.pop()))
        else:
            arg_ty = out.pop()
            fun_ty = out.pop()
            if not fun_ty.is_arrow or fun_ty.left != arg_ty:
                raise InvalidTyping("ill-typed application")
            out.append(fun_ty.right)
    return out[0]


def check_typing(typing: Typing) -> Ty:
    """Independent soundness pass: recompute the subject's type from scratch."""
    ty = church_type_of(typing.subject, typing.context, typing.store)
    if ty != typing.type:
        raise InvalidTyping("declared type differs from recomputed type")
    return ty


def reconstruct_normal(t: Term, a: Ty, context: Optional[Mapping[str, Ty]] = None) -> Typing:
    """Unique Church-style annotation of a beta-normal term at a given type.

    Bidirectional: the type is pushed through binders and application spines,
    so no unification is needed and the result is unique.
    """
    if not is_beta_normal(t):
        raise NotNormalForm("reconstruction requires a beta-normal term")
    store = a.store
    ctx = dict(context) if context else {}

    def check(node: Term, ty: Ty, env: Mapping[str, Ty], path: Path) -> Term:
        if isinstance(node, Lam):
            if not ty.is_arrow:
                raise NotTypableAtGivenType("abstraction at base type", path)
            env2 = dict(env)
            env2[node.binder] = ty.left
            return Lam(node.binder, check(node.body, ty.right, env2, path + ("body",)), ty.left)
        # application spine with a variable head (normal form)
        spine = []
        head = node
        while isinstance(head, App):
            spine.append(head.arg)
            head = head.fun
        spine.reverse()
        if not isinstance(head, Var):
            raise NotNormalForm("redex found during reconstruction")
        head_ty = env.get(head.name)
        if head_ty is None:
            raise NotTypableAtGivenType(f"no type for free variable {head.name}", path)
        result: Term = head
        for i, arg in enumerate(spine):
            if not head_ty.is_arrow:
                raise NotTypableAtGivenType("head applied too many times", path)
            result = App(result, check(arg, head_ty.left, env, path + ("arg",) * (len(spine) - i)))
            head_ty = head_ty.right
        if head_ty != ty:
            raise NotTypableAtGivenType("spine type does not match the expected type", path)
        return result

    subject = check(t, a, ctx, ())
    return Typing(subject, ctx, a)
