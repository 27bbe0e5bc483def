"""Simple types as hash-consed DAG nodes with memoized degree/order metrics.

A TypeStore interns every node, so structurally equal trees share one handle
and metrics cost is linear in distinct nodes even when the unfolded tree is
exponentially large.  Handles from different stores may still be compared:
equality goes through a process-wide canonical id.
"""

from __future__ import annotations

import threading
from typing import Iterator, Optional


class StoreMismatchError(ValueError):
    """Two handles from different stores were combined."""


# canonical ids shared by all stores, so cross-store equality is O(1)
_canon_table: dict = {}
_canon_lock = threading.Lock()


def _canon_intern(key) -> int:
    with _canon_lock:
        cid = _canon_table.get(key)
        if cid is None:
            cid = len(_canon_table)
            _canon_table[key] = cid
        return cid


class Ty:
    """Handle into a TypeStore.  Immutable; equality is structural."""

    __slots__ = ("store", "i")

    def __init__(self, store: "TypeStore", i: int):
        self.store = store
        self.i = i

    def canonical_id(self) -> int:
        return self.store._canon(self.i)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ty):
            return NotImplemented
        if self.store is other.store:
            return self.i == other.i
        return self.canonical_id() == other.canonical_id()

    def __hash__(self) -> int:
        return self.canonical_id()

    @property
    def is_base(self) -> bool:
        return self.store._nodes[self.i] is _BASE

    @property
    def is_arrow(self) -> bool:
        return not self.is_base

    @property
    def left(self) -> "Ty":
        node = self.store._nodes[self.i]
        if node is _BASE:
            raise ValueError("base type has no operands")
        return Ty(self.store, node[1])

    @property
    def right(self) -> "Ty":
        node = self.store._nodes[self.i]
        if node is _BASE:
            raise ValueError("base type has no operands")
        return Ty(self.store, node[2])

    def __repr__(self) -> str:
        return f"<Ty {format_type(self, max_nodes=40)}>"


_BASE = ("o",)


class TypeStore:
    """Append-only interning table of type nodes; one per engine session."""

    def __init__(self):
        self._nodes: list = []
        self._index: dict = {}
        self._lock = threading.Lock()
        self._degree: list = []
        self._order: list = []
        self._homog: list = []
        self._usize: list = []
        self._canon_ids: list = []

    def _intern(self, node) -> int:
        with self._lock:
            i = self._index.get(node)
            if i is None:
                i = len(self._nodes)
                self._nodes.append(node)
                self._index[node] = i
                self._degree.append(None)
                self._order.append(None)
                self._homog.append(None)
                self._usize.append(None)
                self._canon_ids.append(None)
            return i

    def base(self) -> Ty:
        return Ty(self, self._intern(_BASE))

    def arrow(self, left: Ty, right: Ty) -> Ty:
        if left.store is not self or right.store is not self:
            raise StoreMismatchError("arrow operands must come from this store")
        return Ty(self, self._intern(("->", left.i, right.i)))

    def arrows(self, args, result: Ty) -> Ty:
        for a in reversed(list(args)):
            result = self.arrow(a, result)
        return result

    def __len__(self) -> int:
        return len(self._nodes)

    # -- memoized per-node computations (iterative: DAGs can chain deep) -----

    def _fill(self, memo: list, i: int, compute) -> object:
        if memo[i] is not None:
            return memo[i]
        stack = [i]
        while stack:
            j = stack[-1]
            if memo[j] is not None:
                stack.pop()
                continue
            node = self._nodes[j]
            if node is _BASE:
                memo[j] = compute(None, None)
                stack.pop()
                continue
            _, l, r = node
            if memo[l] is None:
                stack.append(l)
                continue
            if memo[r] is None:
                stack.append(r)
                continue
            memo[j] = compute((l, memo[l]), (r, memo[r]))
            stack.pop()
        return memo[i]

    def _deg(self, i: int) -> int:
        return self._fill(
            self._degree, i, lambda l, r: 0 if l is None else max(l[1], r[1]) + 1
        )

    def _ord(self, i: int) -> int:
        return self._fill(
            self._order, i, lambda l, r: 0 if l is None else max(l[1] + 1, r[1])
        )

    def _hom(self, i: int) -> bool:
        def compute(l, r):
            if l is None:
                return True
            li, lh = l
            ri, rh = r
            if not (lh and rh):
                return False
            rnode = self._nodes[ri]
            if rnode is _BASE:
                return True
            return self._ord(li) >= self._ord(rnode[1])

        return self._fill(self._homog, i, compute)

    def _unfold_size(self, i: int) -> int:
        return self._fill(
            self._usize, i, lambda l, r: 1 if l is None else 1 + l[1] + r[1]
        )

    def _canon(self, i: int) -> int:
        def compute(l, r):
            if l is None:
                return _canon_intern(_BASE)
            return _canon_intern(("->", l[1], r[1]))

        return self._fill(self._canon_ids, i, compute)


def degree(a: Ty) -> int:
    """deg(o) = 0, deg(A->B) = max(deg A, deg B) + 1: syntax-tree height."""
    return a.store._deg(a.i)


def order(a: Ty) -> int:
    """ord(o) = 0, ord(A->B) = max(ord(A)+1, ord(B)): left arrow nesting."""
    return a.store._ord(a.i)


def is_homogeneous(a: Ty) -> bool:
    """A1->...->An->o with homogeneous Ai and non-increasing ord(Ai)."""
    return a.store._hom(a.i)


def unfold_size(a: Ty) -> int:
    """Node count of the fully unfolded tree (never materialized)."""
    return a.store._unfold_size(a.i)


def subst_base(a: Ty, b: Ty) -> Ty:
    """A[B]: replace every base-type leaf of A by B (within one store)."""
    if a.store is not b.store:
        raise StoreMismatchError("subst_base operands must share a store")
    store = a.store
    memo: dict = {}

    def go(i: int) -> int:
        res = memo.get(i)
        if res is not None:
            return res
        node = store._nodes[i]
        if node is _BASE:
            res = b.i
        else:
            res = store._intern(("->", go(node[1]), go(node[2])))
        memo[i] = res
        return res

    return Ty(store, go(a.i))


def spine(a: Ty) -> list:
    """Argument types A1..An of A = A1->...->An->o, outermost first."""
    args = []
    while a.is_arrow:
        args.append(a.left)
        a = a.right
    return args


def format_type(a: Ty, *, max_nodes: Optional[int] = None) -> str:
    """Unfolded rendering, right-associated arrows; may be huge for DAGs."""
    if max_nodes is not None and unfold_size(a) > max_nodes:
        return f"<type: {unfold_size(a)} unfolded nodes>"

    parts: list = []
    todo: list = [("t", a)]
    while todo:
        tag, node = todo.pop()
        if tag == "lit":
            parts.append(node)
        elif tag == "t":  # rightmost position: no parens on arrows
            if node.is_base:
                parts.append("o")
            else:
                todo.append(("t", node.right))
                todo.append(("lit", "->"))
                todo.append(("atom", node.left))
        else:  # atom: parenthesize arrows
            if node.is_base:
                parts.append("o")
            else:
                todo.append(("lit", ")"))
                todo.append(("t", node))
                todo.append(("lit", "("))
    return "".join(parts)


def serialize_dag(a: Ty) -> list:
    """Reachable nodes as an indexed list: ["o"] or ["->", i, j]; last is a."""
    store = a.store
    index: dict = {}
    out: list = []

    def visit(i: int) -> int:
        if i in index:
            return index[i]
        node = store._nodes[i]
        if node is _BASE:
            entry = ["o"]
        else:
            entry = ["->", visit(node[1]), visit(node[2])]
        index[i] = len(out)
        out.append(entry)
        return index[i]

    visit(a.i)
    return out
