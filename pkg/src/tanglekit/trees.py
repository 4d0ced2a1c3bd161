"""Rooted binary trees: plane and canonical forms, enumeration, text format.

A single immutable :class:`Tree` type serves both roles.  A *plane* tree is
any ``Tree``; a *canonical* tree is one where, at every internal node,
``left <= right`` under the canonical order (size first, then left branch,
then right branch, leaves minimal).  Two plane trees are isomorphic as rooted
trees iff their canonical forms compare equal.

Leaves carry implicit labels ``0..n-1`` in depth-first, left-before-right
order; the text formats shift these to ``1..n``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterator

from .errors import CapExceeded, DomainError, ParseError

PLANE_CAP = 10**8
CANONICAL_CAP = 10**7


class Tree:
    """Immutable rooted binary tree; ``left``/``right`` are ``None`` for a leaf."""

    __slots__ = ("left", "right", "size", "height", "_hash")

    def __init__(self, left: Tree | None = None, right: Tree | None = None):
        if (left is None) != (right is None):
            raise DomainError("a node has either zero or two children")
        self.left = left
        self.right = right
        if left is None:
            self.size = 1
            self.height = 0
            self._hash = 0x5EED
        else:
            self.size = left.size + right.size
            self.height = 1 + max(left.height, right.height)
            self._hash = hash((left._hash, right._hash))

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Tree):
            return NotImplemented
        return _compare(self, other) == 0

    def __lt__(self, other):
        return _compare(self, other) < 0

    def __le__(self, other):
        return _compare(self, other) <= 0

    def __gt__(self, other):
        return _compare(self, other) > 0

    def __ge__(self, other):
        return _compare(self, other) >= 0

    def __repr__(self):
        return f"Tree({serialize_tree(self)!r})"

    def __str__(self):
        return serialize_tree(self)

    def __reduce__(self):
        return (parse_tree, (serialize_tree(self),))


PlaneBinaryTree = Tree
CanonicalTree = Tree

LEAF = Tree()
CHERRY = Tree(LEAF, LEAF)


def node(left: Tree, right: Tree) -> Tree:
    return Tree(left, right)


def canonical_node(a: Tree, b: Tree) -> Tree:
    """Node over two canonical trees, with branches put in canonical order."""
    return Tree(a, b) if _compare(a, b) <= 0 else Tree(b, a)


def _compare(a: Tree, b: Tree) -> int:
    # iterative to survive tall trees
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        if x.size != y.size:
            return -1 if x.size < y.size else 1
        if x.size == 1:
            continue
        if x._hash == y._hash and _structurally_equal(x, y):
            continue
        stack.append((x.right, y.right))
        stack.append((x.left, y.left))
    return 0


def _structurally_equal(a: Tree, b: Tree) -> bool:
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        if x is y:
            continue
        if x.size != y.size or x._hash != y._hash:
            return False
        if x.size == 1:
            continue
        stack.append((x.left, y.left))
        stack.append((x.right, y.right))
    return True


def postorder(t: Tree) -> Iterator[Tree]:
    """Yield every vertex of ``t`` with children before parents."""
    stack = [(t, False)]
    while stack:
        v, expanded = stack.pop()
        if v.left is None or expanded:
            yield v
        else:
            stack.append((v, True))
            stack.append((v.right, False))
            stack.append((v.left, False))


def caterpillar(n: int) -> Tree:
    """The caterpillar ``(L,(L,(L,...)))`` with ``n`` leaves."""
    if n < 1:
        raise DomainError("n must be positive")
    t = LEAF
    for _ in range(n - 1):
        t = canonical_node(LEAF, t)
    return t


def complete_tree(depth: int) -> Tree:
    """Complete binary tree with ``2**depth`` leaves."""
    t = LEAF
    for _ in range(depth):
        t = Tree(t, t)
    return t


@lru_cache(maxsize=None)
def catalan(n: int) -> int:
    """Number of plane binary trees with ``n`` leaves, ``binom(2n-2, n-1)/n``."""
    if n < 1:
        raise DomainError("n must be positive")
    return comb(2 * n - 2, n - 1) // n


@lru_cache(maxsize=None)
def wedderburn_etherington(n: int) -> int:
    """Number of binary trees with ``n`` leaves up to isomorphism."""
    if n < 1:
        raise DomainError("n must be positive")
    if n == 1:
        return 1
    total = sum(wedderburn_etherington(i) * wedderburn_etherington(n - i)
                for i in range(1, (n + 1) // 2))
    if n % 2 == 0:
        w = wedderburn_etherington(n // 2)
        total += w * (w + 1) // 2
    return total


def enumerate_plane_trees(n: int, cap: int = PLANE_CAP) -> Iterator[Tree]:
    """Stream every plane binary tree with ``n`` leaves exactly once."""
    if n < 1:
        raise DomainError("n must be positive")
    if catalan(n) > cap:
        raise CapExceeded(f"plane tree enumeration (C_{n} = {catalan(n)})",
                          catalan(n), cap)
    return _plane(n)


def _plane(n: int) -> Iterator[Tree]:
    if n == 1:
        yield LEAF
        return
    for k in range(1, n):
        for a in _plane(k):
            for b in _plane(n - k):
                yield Tree(a, b)


@lru_cache(maxsize=32)
def _canonical_list(n: int) -> tuple[Tree, ...]:
    if n == 1:
        return (LEAF,)
    out = []
    for k in range(1, n // 2 + 1):
        firsts = _canonical_list(k)
        seconds = _canonical_list(n - k)
        for i, a in enumerate(firsts):
            start = i if k == n - k else 0
            for b in seconds[start:]:
                out.append(Tree(a, b))
    return tuple(out)


def canonical_trees(n: int, cap: int = CANONICAL_CAP) -> tuple[Tree, ...]:
    """All canonical trees with ``n`` leaves, sorted in canonical order (cached)."""
    if n < 1:
        raise DomainError("n must be positive")
    w = wedderburn_etherington(n)
    if w > cap:
        raise CapExceeded(f"canonical tree enumeration (W-E({n}) = {w})", w, cap)
    return _canonical_list(n)


def enumerate_canonical_trees(n: int, cap: int = CANONICAL_CAP) -> Iterator[Tree]:
    """Stream the ``W-E(n)`` canonical trees with ``n`` leaves in canonical order."""
    return iter(canonical_trees(n, cap))


def canonicalize(t: Tree) -> Tree:
    """Canonical representative of the isomorphism class of ``t``."""
    vals: list[Tree] = []
    for v in postorder(t):
        if v.left is None:
            vals.append(LEAF)
        else:
            b = vals.pop()
            a = vals.pop()
            vals.append(canonical_node(a, b))
    return vals[0]


def canonicalize_with_map(t: Tree) -> tuple[Tree, list[int]]:
    """Canonical form plus ``perm`` with ``perm[i]`` = canonical label of leaf ``i``."""
    vals: list[tuple[Tree, list[int]]] = []
    for v in postorder(t):
        if v.left is None:
            vals.append((LEAF, [0]))
            continue
        b, mb = vals.pop()
        a, ma = vals.pop()
        if _compare(a, b) <= 0:
            vals.append((Tree(a, b), ma + [x + a.size for x in mb]))
        else:
            vals.append((Tree(b, a), [x + b.size for x in ma] + mb))
    return vals[0]


def is_canonical(t: Tree) -> bool:
    return all(v.left is None or _compare(v.left, v.right) <= 0 for v in postorder(t))


@dataclass(frozen=True)
class ShapeStats:
    cherries: int
    height: int
    generators: int
    occurrences: Counter = field(compare=False)


def shape_stats(t: Tree) -> ShapeStats:
    """Cherries, height (edges), generator count g(T) and fringe-subtree census."""
    t = canonicalize(t)
    cherries = generators = 0
    occ: Counter = Counter()
    for v in postorder(t):
        occ[v] += 1
        if v.left is None:
            continue
        if v.left.size == 1 and v.right.size == 1:
            cherries += 1
        if v.left == v.right:
            generators += 1
    return ShapeStats(cherries, t.height, generators, occ)


def cherry_count(t: Tree) -> int:
    return sum(1 for v in postorder(t)
               if v.left is not None and v.left.size == 1 and v.right.size == 1)


def generator_count(t: Tree) -> int:
    """Number of vertices whose two branches are isomorphic (``t`` canonical)."""
    return sum(1 for v in postorder(t) if v.left is not None and v.left == v.right)


def leaf_intervals(t: Tree) -> list[tuple[int, int, Tree]]:
    """``(start, stop, subtree)`` for every vertex; leaves of each subtree are
    the contiguous label range ``start..stop-1`` (preorder listing)."""
    out = []
    stack = [(t, 0)]
    while stack:
        v, start = stack.pop()
        out.append((start, start + v.size, v))
        if v.left is not None:
            stack.append((v.right, start + v.left.size))
            stack.append((v.left, start))
    return out


def cherry_pairs(t: Tree) -> list[tuple[int, int]]:
    """Leaf-label pairs of all cherries of ``t``."""
    return [(s, s + 1) for s, e, v in leaf_intervals(t) if v.size == 2]


def serialize_tree(t: Tree) -> str:
    out = []
    stack: list = [t]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
        elif item.left is None:
            out.append("L")
        else:
            out.append("(")
            stack.extend((")", item.right, ",", item.left))
    return "".join(out)


def parse_tree(text: str) -> Tree:
    """Parse the nested-parenthesis format; whitespace is ignored."""
    data = text.encode("utf-8") if isinstance(text, str) else bytes(text)
    stack: list[list] = []
    result = None
    expect_item = True
    for i, ch in enumerate(data):
        c = chr(ch)
        if c in " \t\r\n":
            continue
        if result is not None:
            raise ParseError("trailing input", i)
        if expect_item:
            if c == "L":
                item = LEAF
            elif c == "(":
                stack.append([i])
                continue
            else:
                raise ParseError(f"expected 'L' or '(' but found {c!r}", i)
            if not stack:
                result = item
            else:
                stack[-1].append(item)
            expect_item = False
            continue
        if not stack:
            raise ParseError(f"unexpected {c!r}", i)
        frame = stack[-1]
        if c == "," and len(frame) == 2:
            expect_item = True
        elif c == ")" and len(frame) == 3:
            stack.pop()
            item = Tree(frame[1], frame[2])
            if stack:
                stack[-1].append(item)
            else:
                result = item
        else:
            raise ParseError(f"unexpected {c!r}", i)
    if result is None:
        raise ParseError("unexpected end of input", len(data))
    return result
