"""Binary partitions and automorphism cycle-type spectra of binary trees.

Every automorphism of a rooted binary tree, acting on its leaves, has a cycle
type that is a *binary* partition (all parts powers of two).  A
:class:`BinaryPartition` is stored by multiplicities: ``lam[j]`` is the number
of parts equal to ``2**j``.
"""

from __future__ import annotations

import threading
from fractions import Fraction
from math import factorial

from .errors import CapExceeded, DomainError, ParseError
from .trees import Tree, canonical_trees, CANONICAL_CAP

SPECTRUM_CAP = 64


class BinaryPartition(tuple):
    """Multiplicity vector ``(m_0, m_1, ...)`` of parts ``1, 2, 4, ...``.

    Trailing zero multiplicities are dropped, so equal partitions are equal
    tuples.
    """

    __slots__ = ()

    def __new__(cls, mult=()):
        mult = list(mult)
        while mult and mult[-1] == 0:
            mult.pop()
        if any(m < 0 for m in mult):
            raise DomainError("multiplicities must be nonnegative")
        return super().__new__(cls, mult)

    @classmethod
    def from_parts(cls, parts) -> BinaryPartition:
        mult: list[int] = []
        for p in parts:
            j = p.bit_length() - 1
            if p < 1 or p != 1 << j:
                raise DomainError(f"part {p} is not a power of two")
            if j >= len(mult):
                mult.extend([0] * (j + 1 - len(mult)))
            mult[j] += 1
        return cls(mult)

    @property
    def n(self) -> int:
        return sum(m << j for j, m in enumerate(self))

    @property
    def length(self) -> int:
        return sum(self)

    def multiplicity(self, j: int) -> int:
        return self[j] if j < len(self) else 0

    def parts(self) -> list[int]:
        """Parts in weakly decreasing order."""
        out = []
        for j in range(len(self) - 1, -1, -1):
            out.extend([1 << j] * self[j])
        return out

    def merge(self, other: BinaryPartition) -> BinaryPartition:
        """Multiset union of parts."""
        if len(self) < len(other):
            self, other = other, self
        out = list(self)
        for j, m in enumerate(other):
            out[j] += m
        return BinaryPartition(out)

    def doubled(self) -> BinaryPartition:
        """Every part doubled."""
        return BinaryPartition((0,) + tuple(self)) if self else self

    def halved(self) -> BinaryPartition:
        """Every part halved; requires all parts even."""
        if self and self[0]:
            raise DomainError("cannot halve a partition with parts equal to 1")
        return BinaryPartition(self[1:])

    def is_mu(self) -> bool:
        """True for partitions of the form ``2^s 1^(n-2s)``."""
        return len(self) <= 2

    def __str__(self):
        return ",".join(map(str, self.parts()))

    def __repr__(self):
        return f"BinaryPartition({str(self)!r})"


def mu(s: int, n: int) -> BinaryPartition:
    """``s`` parts equal to 2 and ``n - 2s`` parts equal to 1."""
    if s < 0 or 2 * s > n:
        raise DomainError(f"mu({s}) is not a partition of {n}")
    return BinaryPartition((n - 2 * s, s))


def parse_partition(text: str) -> BinaryPartition:
    parts = []
    offset = 0
    for piece in text.split(","):
        stripped = piece.strip()
        if not stripped.isdigit():
            raise ParseError(f"bad part {piece!r}", offset)
        parts.append(int(stripped))
        offset += len(piece.encode("utf-8")) + 1
    if parts != sorted(parts, reverse=True):
        raise ParseError("parts must be weakly decreasing", 0)
    try:
        return BinaryPartition.from_parts(parts)
    except DomainError as exc:
        raise ParseError(str(exc), 0) from None


def binary_partitions(n: int) -> list[BinaryPartition]:
    """All binary partitions of ``n``, descending lexicographic by parts."""
    if n < 1:
        raise DomainError("n must be positive")
    out: list[BinaryPartition] = []

    def rec(remaining, j, mult):
        if j == 0:
            mult[0] = remaining
            out.append(BinaryPartition(mult))
            mult[0] = 0
            return
        part = 1 << j
        for m in range(remaining // part, -1, -1):
            mult[j] = m
            rec(remaining - m * part, j - 1, mult)
        mult[j] = 0

    top = n.bit_length() - 1
    rec(n, top, [0] * (top + 1))
    return out


def z(lam: BinaryPartition) -> int:
    """Centralizer order of a permutation of cycle type ``lam``."""
    out = 1
    for j, m in enumerate(lam):
        out *= (1 << (j * m)) * factorial(m)
    return out


def class_size(lam: BinaryPartition) -> int:
    """Number of permutations of cycle type ``lam``, ``n!/z``."""
    return factorial(lam.n) // z(lam)


def q(lam: BinaryPartition) -> int:
    """Product of ``2*(lam_i + ... + lam_l) - 1`` over ``i >= 2``."""
    parts = lam.parts()
    out = 1
    suffix = 0
    for p in reversed(parts[1:]):
        suffix += p
        out *= 2 * suffix - 1
    return out


def cycle_type(perm) -> BinaryPartition:
    """Cycle type of a permutation of ``0..n-1``; must be a binary partition."""
    n = len(perm)
    seen = [False] * n
    lengths = []
    for i in range(n):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        lengths.append(length)
    return BinaryPartition.from_parts(lengths)


class SpectrumCache:
    """Content-addressed memo of per-tree spectra; safe under concurrent use."""

    def __init__(self):
        self._lock = threading.Lock()
        self._spectra: dict[Tree, dict[BinaryPartition, int]] = {}
        self._aut: dict[Tree, int] = {}
        self._poly: dict[Tree, tuple[int, ...]] = {}

    def clear(self):
        with self._lock:
            self._spectra.clear()
            self._aut.clear()
            self._poly.clear()

    def _get_or_compute(self, table, t, combine):
        with self._lock:
            hit = table.get(t)
        if hit is not None:
            return hit
        # children strictly before parents; cached subtrees are skipped
        stack = [(t, False)]
        while stack:
            v, expanded = stack.pop()
            with self._lock:
                if v in table:
                    continue
            if v.left is None or expanded:
                value = combine(v)
                with self._lock:
                    table.setdefault(v, value)
            else:
                stack.append((v, True))
                stack.append((v.right, False))
                stack.append((v.left, False))
        with self._lock:
            return table[t]

    def spectrum(self, t: Tree) -> dict[BinaryPartition, int]:
        return self._get_or_compute(self._spectra, t, self._spectrum)

    def _spectrum(self, t: Tree):
        if t.left is None:
            return {BinaryPartition((1,)): 1}
        s1 = self._spectra[t.left]
        if t.left == t.right:
            out = _convolve(s1, s1)
            a1 = self.aut_size(t.left)
            for lam, c in s1.items():
                d = lam.doubled()
                out[d] = out.get(d, 0) + a1 * c
            return out
        return _convolve(s1, self._spectra[t.right])

    def aut_size(self, t: Tree) -> int:
        return self._get_or_compute(self._aut, t, self._aut_size)

    def _aut_size(self, t: Tree):
        if t.left is None:
            return 1
        a1 = self._aut[t.left]
        if t.left == t.right:
            return 2 * a1 * a1
        return a1 * self._aut[t.right]

    def restricted_poly(self, t: Tree) -> tuple[int, ...]:
        return self._get_or_compute(self._poly, t, self._restricted)

    def _restricted(self, t: Tree):
        if t.left is None:
            return (1,)
        p1 = self._poly[t.left]
        if t.left == t.right:
            out = _polymul(p1, p1)
            k = t.left.size
            if len(out) <= k:
                out.extend([0] * (k + 1 - len(out)))
            out[k] += self.aut_size(t.left)
            return tuple(out)
        return tuple(_polymul(p1, self._poly[t.right]))


def _convolve(s1, s2):
    out: dict[BinaryPartition, int] = {}
    for l1, c1 in s1.items():
        for l2, c2 in s2.items():
            key = l1.merge(l2)
            out[key] = out.get(key, 0) + c1 * c2
    return out


def _polymul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


DEFAULT_CACHE = SpectrumCache()


def cycle_spectrum(t: Tree, cap: int = SPECTRUM_CAP,
                   cache: SpectrumCache = DEFAULT_CACHE) -> dict[BinaryPartition, int]:
    """Map cycle type -> number of automorphisms of canonical tree ``t`` of that type.

    The returned dict is shared with the cache; do not mutate it.
    """
    if t.size > cap:
        raise CapExceeded("full cycle spectrum", t.size, cap)
    return cache.spectrum(t)


def aut_size(t: Tree, cache: SpectrumCache = DEFAULT_CACHE) -> int:
    """``|A(T)|`` for a canonical tree."""
    return cache.aut_size(t)


def restricted_poly(t: Tree, cache: SpectrumCache = DEFAULT_CACHE) -> list[int]:
    """Coefficients of ``sum_s |A(T)_mu(s)| u^s``, trailing zeros dropped."""
    p = list(cache.restricted_poly(t))
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def tree_sum(n: int, lam: BinaryPartition, cap: int = CANONICAL_CAP) -> Fraction:
    """``sum_T |A(T)_lam| / |A(T)|`` over all canonical trees with ``n`` leaves."""
    if lam.n != n:
        raise DomainError(f"{lam} is not a partition of {n}")
    total = Fraction(0)
    for t in canonical_trees(n, cap):
        c = cycle_spectrum(t).get(lam, 0)
        if c:
            total += Fraction(c, aut_size(t))
    return total


def tree_sum_identity(n: int, lam: BinaryPartition,
                      cap: int = CANONICAL_CAP) -> tuple[Fraction, Fraction]:
    """Both sides of the product formula: the enumerated tree sum and ``q/z``."""
    return tree_sum(n, lam, cap), Fraction(q(lam), z(lam))


def difference(lam: BinaryPartition, sub: BinaryPartition) -> BinaryPartition | None:
    """``lam`` minus the sub-multiset ``sub``, or ``None`` if ``sub`` does not fit."""
    if len(sub) > len(lam):
        return None
    out = list(lam)
    for j, m in enumerate(sub):
        out[j] -= m
        if out[j] < 0:
            return None
    return BinaryPartition(out)


def sub_multisets(lam: BinaryPartition):
    """Every sub-multiset of the parts of ``lam`` (including empty and full)."""
    ranges = [range(m + 1) for m in lam]

    def rec(j, acc):
        if j == len(ranges):
            yield BinaryPartition(acc)
            return
        for m in ranges[j]:
            yield from rec(j + 1, acc + [m])

    yield from rec(0, [])


def ordered_splits(lam: BinaryPartition):
    """Pairs ``(a, b)`` of nonempty partitions whose union is ``lam``."""
    for a in sub_multisets(lam):
        if a and a != lam:
            yield a, difference(lam, a)
