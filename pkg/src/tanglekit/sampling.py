"""Random tanglegrams and random plane binary trees.

The exact sampler draws a uniform tanglegram without rejection.  It samples a
tuple ``(lam, T, S, u, w, v)`` where ``u`` and ``w`` are automorphisms of the
left and right trees with common cycle type ``lam`` and ``v`` satisfies
``w∘v∘u = v``.  Each such tuple has probability ``1/(t_n |A(T)| |A(S)|)``, and
a tanglegram with matching ``v`` is hit once for every element of its
stabilizer, so every double coset ends up with probability exactly ``1/t_n``.

Permutations are lists mapping ``0..n-1`` to ``0..n-1``; a matching ``v``
sends left leaf ``i`` to right leaf ``v[i]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, lcm
from typing import Iterator

from . import _kernels
from .errors import CapExceeded, ConsistencyError, DomainError, ParseError
from .measures import t_n
from .partitions import (BinaryPartition, aut_size, binary_partitions, cycle_spectrum,
                         difference, ordered_splits, q, z)
from .rng import Rng
from .trees import (LEAF, Tree, canonical_node, canonical_trees, canonicalize,
                    canonicalize_with_map, parse_tree, serialize_tree)

EXACT_CAP = 20
CHUNK = 10_000


@dataclass(frozen=True)
class Tanglegram:
    """Left tree, matching, right tree; both trees canonical.

    Two instances describe the same tanglegram iff they have equal trees and
    matchings in the same double coset ``A(right)·v·A(left)``; use
    :func:`tanglekit.oracle.canonicalize_tanglegram` to compare.
    """

    left: Tree
    matching: tuple[int, ...]
    right: Tree

    def __post_init__(self):
        n = self.left.size
        if self.right.size != n or len(self.matching) != n:
            raise DomainError("trees and matching must have the same size")
        if sorted(self.matching) != list(range(n)):
            raise DomainError("matching is not a permutation")

    @property
    def n(self) -> int:
        return self.left.size

    def __str__(self):
        perm = ",".join(str(x + 1) for x in self.matching)
        return f"{serialize_tree(self.left)} ; {perm} ; {serialize_tree(self.right)}"

    @classmethod
    def from_plane(cls, left: Tree, sigma, right: Tree) -> Tanglegram:
        """Tanglegram of two plane trees with leaf ``i`` matched to ``sigma[i]``."""
        cl, phi1 = canonicalize_with_map(left)
        cr, phi2 = canonicalize_with_map(right)
        v = [0] * len(sigma)
        for i, s in enumerate(sigma):
            v[phi1[i]] = phi2[s]
        return cls(cl, tuple(v), cr)


def parse_tanglegram(text: str) -> Tanglegram:
    pieces = text.split(";")
    if len(pieces) != 3:
        raise ParseError("expected 'left ; permutation ; right'", 0)
    offset_perm = len(pieces[0].encode("utf-8")) + 1
    offset_right = offset_perm + len(pieces[1].encode("utf-8")) + 1
    try:
        left = parse_tree(pieces[0])
    except ParseError as exc:
        raise ParseError(str(exc).rsplit(" at byte", 1)[0], exc.offset) from None
    try:
        right = parse_tree(pieces[2])
    except ParseError as exc:
        raise ParseError(str(exc).rsplit(" at byte", 1)[0],
                         offset_right + exc.offset) from None
    try:
        perm = tuple(int(x) - 1 for x in pieces[1].split(","))
    except ValueError:
        raise ParseError("bad permutation", offset_perm) from None
    try:
        return Tanglegram.from_plane(left, perm, right) if (
            canonicalize(left) != left or canonicalize(right) != right
        ) else Tanglegram(left, perm, right)
    except DomainError as exc:
        raise ParseError(str(exc), offset_perm) from None


@dataclass(frozen=True)
class SamplerConfig:
    n: int
    mode: str = "exact"
    seed: int | None = None
    cap: int = EXACT_CAP

    def __post_init__(self):
        if self.mode not in ("exact", "approximate"):
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.n < 1:
            raise DomainError("n must be positive")

    def check(self):
        if self.mode == "exact" and self.n > self.cap:
            raise CapExceeded("exact tanglegram sampling", self.n, self.cap)


# ---------------------------------------------------------------- lambda

@lru_cache(maxsize=None)
def _lambda_table(n: int):
    parts = binary_partitions(n)
    nf = factorial(n)
    cum = []
    acc = 0
    for lam in parts:
        acc += q(lam) ** 2 * (nf // z(lam))
        cum.append(acc)
    if acc != nf * t_n(n):
        raise ConsistencyError("cycle-type weights do not sum to n! t_n")
    return parts, cum


def lambda_distribution(n: int) -> dict[BinaryPartition, Fraction]:
    parts, cum = _lambda_table(n)
    prev = 0
    out = {}
    for lam, c in zip(parts, cum):
        out[lam] = Fraction(c - prev, cum[-1])
        prev = c
    return out


def sample_lambda(n: int, rng: Rng) -> BinaryPartition:
    """Cycle type with probability ``q(lam)^2 / (z(lam) t_n)``."""
    parts, cum = _lambda_table(n)
    return parts[rng.choice_weighted(cum)]


# ---------------------------------------------------------------- trees

@lru_cache(maxsize=None)
def _tree_weight(lam: BinaryPartition) -> Fraction:
    return Fraction(q(lam), z(lam))


@lru_cache(maxsize=None)
def _tree_options(lam: BinaryPartition):
    # sum over canonical T of |A(T)_lam|/|A(T)| splits as half the sum over
    # ordered branch pairs plus half the diagonal term for identical branches
    options = []
    weights = []
    for a, b in ordered_splits(lam):
        options.append((a, b))
        weights.append(_tree_weight(a) * _tree_weight(b) / 2)
    if lam and lam[0] == 0:
        half = lam.halved()
        options.append((half, None))
        weights.append(_tree_weight(half) / 2)
    if sum(weights) != _tree_weight(lam):
        raise ConsistencyError(f"tree weights for {lam} do not sum to q/z")
    scale = lcm(*(w.denominator for w in weights))
    cum = []
    acc = 0
    for w in weights:
        acc += int(w * scale)
        cum.append(acc)
    return options, cum


def _draw_tree(lam: BinaryPartition, rng: Rng) -> Tree:
    if lam.n == 1:
        return LEAF
    options, cum = _tree_options(lam)
    a, b = options[rng.choice_weighted(cum)]
    if b is None:
        t = _draw_tree(a, rng)
        return Tree(t, t)
    return canonical_node(_draw_tree(a, rng), _draw_tree(b, rng))


def sample_tree_given_lambda(n: int, lam: BinaryPartition, rng: Rng,
                             cap: int = EXACT_CAP) -> Tree:
    """Canonical tree with probability ``(|A(T)_lam| / |A(T)|) z(lam) / q(lam)``."""
    if lam.n != n:
        raise DomainError(f"{lam} is not a partition of {n}")
    if n > cap:
        raise CapExceeded("exact tree sampling", n, cap)
    return _draw_tree(lam, rng)


def tree_distribution_given_lambda(n: int, lam: BinaryPartition) -> dict[Tree, Fraction]:
    """Exact target law of :func:`sample_tree_given_lambda`, by enumeration."""
    scale = _tree_weight(lam)
    out = {}
    for t in canonical_trees(n):
        c = cycle_spectrum(t).get(lam, 0)
        if c:
            out[t] = Fraction(c, aut_size(t)) / scale
    return out


# ---------------------------------------------------------------- automorphisms

@lru_cache(maxsize=1 << 16)
def _aut_options(t: Tree, lam: BinaryPartition):
    sa = cycle_spectrum(t.left)
    identical = t.left == t.right
    sb = sa if identical else cycle_spectrum(t.right)
    options = []
    cum = []
    acc = 0
    for la, ca in sa.items():
        lb = difference(lam, la)
        if lb is None:
            continue
        cb = sb.get(lb, 0)
        if cb:
            acc += ca * cb
            options.append((la, lb))
            cum.append(acc)
    if identical and lam and lam[0] == 0:
        half = lam.halved()
        c = sa.get(half, 0)
        if c:
            acc += aut_size(t.left) * c
            options.append((half, None))
            cum.append(acc)
    return options, cum


def _fill_uniform(t: Tree, offset: int, out: list, rng: Rng):
    if t.left is None:
        out[offset] = offset
        return
    k = t.left.size
    _fill_uniform(t.left, offset, out, rng)
    _fill_uniform(t.right, offset + k, out, rng)
    if t.left == t.right and rng.random_bit():
        for i in range(offset, offset + k):
            a, b = out[i], out[i + k]
            out[i], out[i + k] = b, a


def _fill_typed(t: Tree, lam: BinaryPartition, offset: int, out: list, rng: Rng):
    if t.left is None:
        out[offset] = offset
        return
    options, cum = _aut_options(t, lam)
    if not cum:
        raise DomainError(f"tree has no automorphism of type {lam}")
    la, lb = options[rng.choice_weighted(cum)]
    k = t.left.size
    if lb is not None:
        _fill_typed(t.left, la, offset, out, rng)
        _fill_typed(t.right, lb, offset + k, out, rng)
        return
    # branch swap: left i -> right alpha(i), right j -> left beta(j), with
    # beta∘alpha = psi of the halved type and alpha uniform
    psi = [0] * k
    alpha = [0] * k
    _fill_typed(t.left, la, 0, psi, rng)
    _fill_uniform(t.left, 0, alpha, rng)
    for i in range(k):
        out[offset + i] = offset + k + alpha[i]
        out[offset + k + alpha[i]] = offset + psi[i]


def sample_automorphism(t: Tree, lam: BinaryPartition | None, rng: Rng) -> list[int]:
    """Uniform element of ``A(t)`` of cycle type ``lam`` (any type if ``None``)."""
    out = [0] * t.size
    if lam is None:
        _fill_uniform(t, 0, out, rng)
    else:
        if lam.n != t.size:
            raise DomainError(f"{lam} is not a partition of {t.size}")
        if t.left is None and lam != BinaryPartition((1,)):
            raise DomainError(f"tree has no automorphism of type {lam}")
        _fill_typed(t, lam, 0, out, rng)
    return out


# ---------------------------------------------------------------- matchings

def cycles(perm) -> list[list[int]]:
    n = len(perm)
    seen = [False] * n
    out = []
    for i in range(n):
        if not seen[i]:
            cyc = []
            j = i
            while not seen[j]:
                seen[j] = True
                cyc.append(j)
                j = perm[j]
            out.append(cyc)
    return out


def inverse(perm) -> list[int]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return inv


def sample_matching_conjugation(u, w, rng: Rng) -> list[int]:
    """Uniform ``v`` with ``w∘v∘u = v`` among the ``z(lam)`` solutions.

    Equivalently ``v`` conjugates ``u^-1`` to ``w``: cycles of ``u^-1`` are
    sent to cycles of ``w`` of the same length, bijection and rotations
    uniform.
    """
    if len(u) != len(w):
        raise DomainError("permutations must have the same degree")
    by_len_u: dict[int, list] = {}
    by_len_w: dict[int, list] = {}
    for c in cycles(inverse(u)):
        by_len_u.setdefault(len(c), []).append(c)
    for c in cycles(w):
        by_len_w.setdefault(len(c), []).append(c)
    if {k: len(c) for k, c in by_len_u.items()} != {k: len(c) for k, c in by_len_w.items()}:
        raise DomainError("u and w have different cycle types")
    v = [0] * len(u)
    for length in sorted(by_len_u):
        targets = list(by_len_w[length])
        rng.shuffle(targets)
        for a, b in zip(by_len_u[length], targets):
            r = rng.randbelow(length)
            for i, x in enumerate(a):
                v[x] = b[(i + r) % length]
    return v


# ---------------------------------------------------------------- tanglegrams

def sample_tanglegram_exact(cfg: SamplerConfig | int, rng: Rng) -> Tanglegram:
    """Uniform random tanglegram of size ``cfg.n`` (exact, rejection-free)."""
    if isinstance(cfg, int):
        cfg = SamplerConfig(cfg)
    cfg.check()
    n = cfg.n
    lam = sample_lambda(n, rng)
    left = _draw_tree(lam, rng)
    right = _draw_tree(lam, rng)
    u = sample_automorphism(left, lam, rng)
    w = sample_automorphism(right, lam, rng)
    v = sample_matching_conjugation(u, w, rng)
    return Tanglegram(left, tuple(v), right)


def tree_from_arrays(left, right, root) -> tuple[Tree, list[int]]:
    """Tree object from kernel arrays, plus the leaf id of each DFS label."""
    left = left.tolist() if hasattr(left, "tolist") else left
    right = right.tolist() if hasattr(right, "tolist") else right
    vals: list[Tree] = []
    order: list[int] = []
    stack = [(root, False)]
    while stack:
        v, expanded = stack.pop()
        if left[v] == -1:
            vals.append(LEAF)
            order.append(v)
        elif expanded:
            b = vals.pop()
            a = vals.pop()
            vals.append(Tree(a, b))
        else:
            stack.append((v, True))
            stack.append((right[v], False))
            stack.append((left[v], False))
    return vals[0], order


def plane_tree_arrays(n: int, rng: Rng):
    return _kernels.remy_build(n, _kernels.remy_draws(n, rng.generator))


def sample_plane_tree(n: int, rng: Rng) -> Tree:
    """Uniform plane binary tree with ``n`` leaves (Remy's algorithm)."""
    if n < 1:
        raise DomainError("n must be positive")
    left, right, _, root = plane_tree_arrays(n, rng)
    return tree_from_arrays(left, right, root)[0]


def sample_triple_approximate(n: int, rng: Rng) -> Tanglegram:
    """Two uniform plane trees and a uniform matching, reduced to a tanglegram.

    This is *not* uniform on tanglegrams: a tanglegram with stabilizer of
    order ``s`` is drawn with probability proportional to ``1/s``.
    """
    if n < 1:
        raise DomainError("n must be positive")
    l1, r1, _, root1 = plane_tree_arrays(n, rng)
    l2, r2, _, root2 = plane_tree_arrays(n, rng)
    sigma = rng.generator.permutation(n).tolist()
    t1, order1 = tree_from_arrays(l1, r1, root1)
    t2, order2 = tree_from_arrays(l2, r2, root2)
    label2 = [0] * n
    for lab, leaf in enumerate(order2):
        label2[leaf] = lab
    # sigma acts on leaf ids; translate to DFS labels on both sides
    plane_sigma = [label2[sigma[leaf]] for leaf in order1]
    return Tanglegram.from_plane(t1, plane_sigma, t2)


def sample(cfg: SamplerConfig, rng: Rng) -> Tanglegram:
    if cfg.mode == "exact":
        return sample_tanglegram_exact(cfg, rng)
    return sample_triple_approximate(cfg.n, rng)


def iter_samples(cfg: SamplerConfig, count: int, chunk: int = CHUNK,
                 start_chunk: int = 0) -> Iterator[Tanglegram]:
    """Deterministic sample stream; chunk ``i`` uses substream ``i`` of the seed."""
    cfg.check()
    seed = cfg.seed if cfg.seed is not None else Rng().seed
    done = 0
    i = start_chunk
    while done < count:
        rng = Rng(seed, stream=i)
        for _ in range(min(chunk, count - done)):
            yield sample(cfg, rng)
        done += min(chunk, count - done)
        i += 1
