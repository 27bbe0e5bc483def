"""Named lambda-terms: construction, alpha-equivalence, substitution, parsing, printing.

Terms are immutable trees.  Every node caches its tree size, height and free
variable set at construction time, so those queries are O(1) and the
capture-avoiding substitution can skip untouched subtrees.  Bound-variable
comparison goes through a canonical de Bruijn encoding, never through renaming.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Optional


class ParseError(Exception):
    """Raised on malformed input text; carries the offending position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


class MixedAnnotationsError(ParseError):
    """Some binders are annotated and some are not."""


# ---------------------------------------------------------------------------
# Term representation


class Term:
    """Base class of Var / Lam / App.  Equality is identity; use alpha_eq."""

    __slots__ = ("size", "height", "free")

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {format_term(self)!r}>"


class Var(Term):
    __slots__ = ("name",)
    __match_args__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self.size = 1
        self.height = 1
        self.free = frozenset((name,))


class Lam(Term):
    __slots__ = ("binder", "body", "annotation")
    __match_args__ = ("binder", "body")

    def __init__(self, binder: str, body: Term, annotation=None):
        self.binder = binder
        self.body = body
        self.annotation = annotation
        self.size = 1 + body.size
        self.height = 1 + body.height
        self.free = body.free - {binder} if binder in body.free else body.free


class App(Term):
    __slots__ = ("fun", "arg")
    __match_args__ = ("fun", "arg")

    def __init__(self, fun: Term, arg: Term):
        self.fun = fun
        self.arg = arg
        self.size = 1 + fun.size + arg.size
        self.height = 1 + max(fun.height, arg.height)
        if not arg.free:
            self.free = fun.free
        elif not fun.free:
            self.free = arg.free
        else:
            self.free = fun.free | arg.free


def var(name: str) -> Var:
    return Var(name)


def lam(binder: str, body: Term, annotation=None) -> Lam:
    return Lam(binder, body, annotation)


def lams(binders, body: Term) -> Term:
    for b in reversed(list(binders)):
        body = Lam(b, body)
    return body


def app(fun: Term, *args: Term) -> Term:
    for a in args:
        fun = App(fun, a)
    return fun


@dataclass(frozen=True)
class TermMetrics:
    size: int
    height: int


def metrics(t: Term) -> TermMetrics:
    return TermMetrics(t.size, t.height)


def free_vars(t: Term) -> frozenset:
    return t.free


# ---------------------------------------------------------------------------
# Fresh names

_fresh_counter = itertools.count()


def fresh_name(base: str = "x") -> str:
    """Globally fresh name: base with a '%<n>' suffix from a process counter."""
    root = base.split("%", 1)[0] or "x"
    return f"{root}%{next(_fresh_counter)}"


# ---------------------------------------------------------------------------
# Substitution

def substitute(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding t{x := u}; binders of t are renamed when needed.

    Single-variable fast path of subst_many: this is the normalizers' inner
    loop, so it avoids per-node mapping bookkeeping.  Binder renames fall
    back to the general engine for the affected subtree only.
    """
    if x not in t.free:
        return t
    ufree = u.free
    out: list = []
    todo: list = [("t", t)]
    while todo:
        frame = todo.pop()
        tag = frame[0]
        if tag == "t":
            node = frame[1]
            if x not in node.free:
                out.append(node)
            elif isinstance(node, Var):
                out.append(u)
            elif isinstance(node, App):
                todo.append(("app",))
                todo.append(("t", node.arg))
                todo.append(("t", node.fun))
            else:
                binder = node.binder
                if binder in ufree:
                    renamed = fresh_name(binder)
                    todo.append(("lam", renamed, node.annotation))
                    out.append(subst_many(node.body, {x: u, binder: Var(renamed)}))
                    continue
                todo.append(("lam", binder, node.annotation))
                todo.append(("t", node.body))
        elif tag == "app":
            a = out.pop()
            f = out.pop()
            out.append(App(f, a))
        else:
            out.append(Lam(frame[1], out.pop(), frame[2]))
    return out[0]


def subst_many(t: Term, mapping: dict) -> Term:
    """Simultaneous capture-avoiding substitution.  Iterative: terms get deep."""
    if not mapping or not any(k in t.free for k in mapping):
        return t
    out: list = []
    todo: list = [("t", t, mapping)]
    while todo:
        frame = todo.pop()
        tag = frame[0]
        if tag == "t":
            _, node, m = frame
            live = {k: v for k, v in m.items() if k in node.free}
            if not live:
                out.append(node)
            elif isinstance(node, Var):
                out.append(live[node.name])
            elif isinstance(node, App):
                todo.append(("app",))
                todo.append(("t", node.arg, live))
                todo.append(("t", node.fun, live))
            else:  # Lam; binder cannot be a live key (it is not free)
                binder = node.binder
                if any(binder in v.free for v in live.values()):
                    renamed = fresh_name(binder)
                    live[binder] = Var(renamed)
                    binder = renamed
                todo.append(("lam", binder, node.annotation))
                todo.append(("t", node.body, live))
        elif tag == "app":
            a = out.pop()
            f = out.pop()
            out.append(App(f, a))
        else:  # lam
            _, binder, ann = frame
            out.append(Lam(binder, out.pop(), ann))
    return out[0]


# ---------------------------------------------------------------------------
# Alpha-equivalence via canonical de Bruijn token streams

def _canonical_tokens(t: Term, with_annotations: bool) -> list:
    """Flat prefix encoding of t with bound variables as de Bruijn indices."""
    # annotation keys use the store-independent canonical id of the type
    tokens: list = []
    depth_of: dict = {}
    saved: list = []
    todo: list = [("t", t)]
    depth = 0
    while todo:
        frame = todo.pop()
        tag = frame[0]
        if tag == "t":
            node = frame[1]
            if isinstance(node, Var):
                d = depth_of.get(node.name)
                if d is None:
                    tokens.append("f" + node.name)
                else:
                    tokens.append(depth - d)
            elif isinstance(node, App):
                tokens.append("@")
                todo.append(("t", node.arg))
                todo.append(("t", node.fun))
            else:
                ann = node.annotation if with_annotations else None
                if ann is None:
                    tokens.append("L")
                else:
                    tokens.append(("L", ann.canonical_id()))
                depth += 1
                saved.append((node.binder, depth_of.get(node.binder)))
                depth_of[node.binder] = depth
                todo.append(("x",))
                todo.append(("t", node.body))
        else:  # "x": leave binder scope
            name, old = saved.pop()
            if old is None:
                del depth_of[name]
            else:
                depth_of[name] = old
            depth -= 1
    return tokens


def alpha_eq(t: Term, u: Term, *, compare_annotations: bool = True) -> bool:
    """True iff t and u are equal up to renaming of bound variables.

    With compare_annotations, binder annotations must agree structurally
    (an annotated binder never matches a bare one).
    """
    if t is u:
        return True
    if t.size != u.size or t.free != u.free:
        return False
    return _canonical_tokens(t, compare_annotations) == _canonical_tokens(u, compare_annotations)


def is_beta_normal(t: Term) -> bool:
    todo = [t]
    while todo:
        node = todo.pop()
        if isinstance(node, App):
            if isinstance(node.fun, Lam):
                return False
            todo.append(node.fun)
            todo.append(node.arg)
        elif isinstance(node, Lam):
            todo.append(node.body)
    return True


def subterms(t: Term) -> Iterator[Term]:
    """All subterm occurrences, preorder."""
    todo = [t]
    while todo:
        node = todo.pop()
        yield node
        if isinstance(node, App):
            todo.append(node.arg)
            todo.append(node.fun)
        elif isinstance(node, Lam):
            todo.append(node.body)


def rename_apart(t: Term) -> Term:
    """Rebuild t so that all binder names are distinct and differ from free names."""
    used = set(t.free)

    def go(node: Term, ren: dict) -> Term:
        if isinstance(node, Var):
            return Var(ren.get(node.name, node.name))
        if isinstance(node, App):
            return App(go(node.fun, ren), go(node.arg, ren))
        binder = node.binder
        if binder in used:
            new = fresh_name(binder)
            while new in used:
                new = fresh_name(binder)
        else:
            new = binder
        used.add(new)
        ren2 = dict(ren)
        ren2[binder] = new
        return Lam(new, go(node.body, ren2), node.annotation)

    return go(t, {})


# ---------------------------------------------------------------------------
# Parsing

_IDENT_RE = re.compile(r"[a-zA-Z][a-zA-Z0-9_']*")
_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<ident>[a-zA-Z][a-zA-Z0-9_']*)"
    r"|(?P<lambda>[\\λ])"
    r"|(?P<arrow>->)"
    r"|(?P<dot>\.)"
    r"|(?P<colon>:)"
    r"|(?P<lparen>\()"
    r"|(?P<rparen>\))"
)


def _tokenize(text: str) -> list:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, store):
        self.tokens = tokens
        self.pos = 0
        self.store = store

    def peek(self):
        return self.tokens[self.pos]

    def next(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str):
        tok = self.next()
        if tok[0] != kind:
            raise ParseError(f"expected {kind}, found {tok[1]!r}", tok[2])
        return tok

    def term(self) -> Term:
        kind, _, _ = self.peek()
        if kind == "lambda":
            self.next()
            name = self.expect("ident")[1]
            annotation = None
            if self.peek()[0] == "colon":
                self.next()
                annotation = self.type_expr()
            self.expect("dot")
            return Lam(name, self.term(), annotation)
        return self.app_seq()

    def app_seq(self) -> Term:
        t = self.atom()
        while self.peek()[0] in ("ident", "lparen"):
            t = App(t, self.atom())
        return t

    def atom(self) -> Term:
        kind, value, pos = self.next()
        if kind == "ident":
            return Var(value)
        if kind == "lparen":
            t = self.term()
            self.expect("rparen")
            return t
        raise ParseError(f"expected a term, found {value!r}", pos)

    def type_expr(self):
        if self.store is None:
            from .types import TypeStore

            self.store = TypeStore()
        left = self.type_atom()
        if self.peek()[0] == "arrow":
            self.next()
            return self.store.arrow(left, self.type_expr())
        return left

    def type_atom(self):
        kind, value, pos = self.next()
        if kind == "ident" and value == "o":
            return self.store.base()
        if kind == "lparen":
            ty = self.type_expr()
            self.expect("rparen")
            return ty
        raise ParseError(f"expected a type, found {value!r}", pos)


def parse_term(text: str, store=None) -> Term:
    """Parse the ASCII grammar; '\\' and 'λ' both introduce abstractions.

    Annotated binders need a TypeStore; one is created on demand if none is
    supplied.  Mixing annotated and bare binders is rejected.
    """
    parser = _Parser(_tokenize(text), store)
    t = parser.term()
    tok = parser.peek()
    if tok[0] != "eof":
        raise ParseError(f"trailing input {tok[1]!r}", tok[2])
    annotated = [node.annotation is not None for node in subterms(t) if isinstance(node, Lam)]
    if annotated and any(annotated) and not all(annotated):
        raise MixedAnnotationsError("mixed annotated and unannotated binders", 0)
    return t


def parse_type(text: str, store):
    parser = _Parser(_tokenize(text), store)
    ty = parser.type_expr()
    tok = parser.peek()
    if tok[0] != "eof":
        raise ParseError(f"trailing input {tok[1]!r}", tok[2])
    return ty


# ---------------------------------------------------------------------------
# Printing

def _valid_surface_name(name: str) -> bool:
    return _IDENT_RE.fullmatch(name) is not None


def _printable(t: Term) -> Term:
    """Rename binders whose generated names fall outside the surface grammar."""
    bad = any(
        isinstance(node, Lam) and not _valid_surface_name(node.binder) for node in subterms(t)
    )
    if not bad:
        return t

    def go(node: Term, ren: dict) -> Term:
        if isinstance(node, Var):
            return Var(ren.get(node.name, node.name))
        if isinstance(node, App):
            return App(go(node.fun, ren), go(node.arg, ren))
        binder = node.binder
        if not _valid_surface_name(binder):
            root, _, suffix = binder.partition("%")
            base = f"{root}_{suffix}" if suffix else root
            candidate = base
            avoid = {ren.get(v, v) for v in node.body.free if v != binder}
            while candidate in avoid or not _valid_surface_name(candidate):
                candidate += "'"
            ren = dict(ren)
            ren[binder] = candidate
            binder = candidate
        return Lam(binder, go(node.body, ren), node.annotation)

    return go(t, {})


def simplify_names(t: Term) -> Term:
    """Alpha-rename binders to short readable names (x, x', ...)."""

    def go(node: Term, ren: dict, used: frozenset) -> Term:
        if isinstance(node, Var):
            return Var(ren.get(node.name, node.name))
        if isinstance(node, App):
            return App(go(node.fun, ren, used), go(node.arg, ren, used))
        base = node.binder.split("%", 1)[0] or "x"
        if not _valid_surface_name(base):
            base = "x"
        avoid = {ren.get(v, v) for v in node.body.free if v != node.binder} | set(used)
        candidate = base
        while candidate in avoid:
            candidate += "'"
        ren2 = dict(ren)
        ren2[node.binder] = candidate
        return Lam(candidate, go(node.body, ren2, used | {candidate}), node.annotation)

    return go(t, {}, frozenset(t.free))


def format_term(t: Term, *, simplify: bool = False) -> str:
    """Render t in the surface grammar (parseable back up to alpha)."""
    from .types import format_type

    t = simplify_names(t) if simplify else _printable(t)
    parts: list = []
    # frames: ("term"|"appfun"|"atom", node) or ("lit", text)
    todo: list = [("term", t)]
    while todo:
        tag, node = todo.pop()
        if tag == "lit":
            parts.append(node)
            continue
        if tag == "term":
            while isinstance(node, Lam):
                ann = "" if node.annotation is None else ":" + format_type(node.annotation)
                parts.append(f"\\{node.binder}{ann}.")
                node = node.body
            tag = "appfun"
        if tag == "appfun":
            if isinstance(node, App):
                todo.append(("atom", node.arg))
                todo.append(("lit", " "))
                todo.append(("appfun", node.fun))
            else:
                tag = "atom"
        if tag == "atom":
            if isinstance(node, Var):
                parts.append(node.name)
            else:
                todo.append(("lit", ")"))
                todo.append(("term", node))
                todo.append(("lit", "("))
    return "".join(parts)
