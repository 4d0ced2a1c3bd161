"""Brute-force ground truth for small sizes.

Nothing in here uses cycle spectra or the product formula: automorphism groups
come from closing the branch-swap generators (or from scanning all of S_n),
and tanglegrams are double cosets found by explicit orbit enumeration.
"""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from functools import lru_cache
from itertools import permutations

from .errors import CapExceeded, DomainError
from .sampling import Tanglegram, inverse
from .stats import matched_cherries
from .trees import Tree, canonical_trees, enumerate_plane_trees, leaf_intervals

ORBIT_CAP = 2**20
TANGLEGRAM_CAP = 7
DISTRIBUTION_CAP = 6

CanonicalTanglegram = Tanglegram


def _swap_generators(t: Tree) -> list[tuple[int, ...]]:
    n = t.size
    gens = []
    for start, stop, v in leaf_intervals(t):
        if v.left is not None and v.left == v.right:
            k = v.left.size
            g = list(range(n))
            for i in range(start, start + k):
                g[i], g[i + k] = i + k, i
            gens.append(tuple(g))
    return gens


@lru_cache(maxsize=4096)
def _automorphisms(t: Tree) -> tuple[tuple[int, ...], ...]:
    identity = tuple(range(t.size))
    gens = _swap_generators(t)
    group = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = tuple(g[i] for i in s)
                if h not in group:
                    group.add(h)
                    nxt.append(h)
        frontier = nxt
    return tuple(sorted(group))


def enumerate_automorphisms(t: Tree, cap: int = ORBIT_CAP) -> list[tuple[int, ...]]:
    """All leaf permutations induced by automorphisms of canonical tree ``t``."""
    bound = 2 ** len(_swap_generators(t))
    if bound > cap:
        raise CapExceeded("automorphism enumeration", bound, cap)
    return list(_automorphisms(t))


def automorphisms_by_scan(t: Tree) -> list[tuple[int, ...]]:
    """Leaf permutations mapping the cluster system of ``t`` onto itself,
    found by testing every element of S_n (n <= 8)."""
    n = t.size
    if n > 8:
        raise CapExceeded("S_n scan for automorphisms", n, 8)
    clusters = {frozenset(range(s, e)) for s, e, _ in leaf_intervals(t)}
    return [p for p in permutations(range(n))
            if all(frozenset(p[i] for i in c) in clusters for c in clusters)]


def _cycle_census(perms) -> Counter:
    census: Counter = Counter()
    for p in perms:
        seen = [False] * len(p)
        lengths = []
        for i in range(len(p)):
            if not seen[i]:
                k = 0
                j = i
                while not seen[j]:
                    seen[j] = True
                    j = p[j]
                    k += 1
                lengths.append(k)
        census[tuple(sorted(lengths, reverse=True))] += 1
    return census


def cycle_census(t: Tree) -> dict[str, int]:
    """Cycle types (as ``"2,1,1"`` strings) of the enumerated automorphisms."""
    return {",".join(map(str, k)): c
            for k, c in _cycle_census(enumerate_automorphisms(t)).items()}


def double_coset(tg: Tanglegram) -> set[tuple[int, ...]]:
    """All matchings ``w∘v∘u`` with ``u`` in A(left), ``w`` in A(right)."""
    v = tg.matching
    out = set()
    for w in _automorphisms(tg.right):
        wv = [w[x] for x in v]
        for u in _automorphisms(tg.left):
            out.add(tuple(wv[u[i]] for i in range(len(v))))
    return out


def canonicalize_tanglegram(tg: Tanglegram, cap: int = ORBIT_CAP) -> Tanglegram:
    """Representative whose matching is lexicographically least in its double coset."""
    size = len(_automorphisms(tg.left)) * len(_automorphisms(tg.right))
    if size > cap:
        raise CapExceeded("double coset scan", size, cap)
    return Tanglegram(tg.left, min(double_coset(tg)), tg.right)


@lru_cache(maxsize=8)
def _pair_index(n: int):
    # for every ordered pair of canonical trees, map each matching to the
    # lexicographically least element of its double coset
    trees = canonical_trees(n)
    reps: list[Tanglegram] = []
    index: dict[tuple[Tree, Tree], dict[tuple[int, ...], int]] = {}
    for a in trees:
        for b in trees:
            table: dict[tuple[int, ...], int] = {}
            for v in permutations(range(n)):
                if v in table:
                    continue
                tg = Tanglegram(a, v, b)
                k = len(reps)
                reps.append(tg)
                for x in double_coset(tg):
                    table[x] = k
            index[(a, b)] = table
    return reps, index


def enumerate_tanglegrams(n: int, cap: int = TANGLEGRAM_CAP) -> list[Tanglegram]:
    """Every tanglegram of size ``n`` in canonical form."""
    if n < 1:
        raise DomainError("n must be positive")
    if n > cap:
        raise CapExceeded("tanglegram enumeration", n, cap)
    return list(_pair_index(n)[0])


def tanglegram_id(tg: Tanglegram, cap: int = TANGLEGRAM_CAP) -> int:
    """Position of ``tg`` in :func:`enumerate_tanglegrams` of its size."""
    if tg.n > cap:
        raise CapExceeded("tanglegram enumeration", tg.n, cap)
    return _pair_index(tg.n)[1][(tg.left, tg.right)][tg.matching]


def oracle_dump(n: int, cap: int = TANGLEGRAM_CAP) -> list[str]:
    """Sorted text lines, one canonical tanglegram per line."""
    return sorted(str(tg) for tg in enumerate_tanglegrams(n, cap))


def stabilizer(tg: Tanglegram) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Pairs ``(u, w)`` of leaf automorphisms with ``w∘v∘u = v``."""
    v = tg.matching
    vinv = inverse(v)
    right = set(_automorphisms(tg.right))
    out = []
    for u in _automorphisms(tg.left):
        uinv = inverse(u)
        w = tuple(v[uinv[vinv[j]]] for j in range(len(v)))
        if w in right:
            out.append((u, w))
    return out


def exact_matched_cherry_distribution(n: int,
                                      cap: int = DISTRIBUTION_CAP) -> dict[int, Fraction]:
    """Law of the matched-cherry count under the uniform tanglegram measure."""
    if n > cap:
        raise CapExceeded("exact matched-cherry law", n, cap)
    tgs = enumerate_tanglegrams(n)
    counts = Counter(matched_cherries(tg) for tg in tgs)
    return {k: Fraction(c, len(tgs)) for k, c in sorted(counts.items())}


def brute_force_matching_counts(n: int, cherries1, cherries2) -> Counter:
    """Distribution over all ``n!`` matchings of the number of pairs in
    ``cherries1`` sent onto a pair in ``cherries2``."""
    targets = {frozenset(c) for c in cherries2}
    return Counter(sum(1 for a, b in cherries1 if frozenset((p[a], p[b])) in targets)
                   for p in permutations(range(n)))


def automorphism_audit(n: int, cap: int = DISTRIBUTION_CAP, weight_cap: int = 5) -> dict:
    """Compare each tanglegram's stabilizer with the ``2^k`` automorphisms
    induced by its ``k`` matched cherries; check the plane-triple weights."""
    if n > cap:
        raise CapExceeded("automorphism audit", n, cap)
    tgs = enumerate_tanglegrams(n)
    rows = []
    agree = 0
    for tg in tgs:
        k = matched_cherries(tg)
        s = len(stabilizer(tg))
        rows.append({"tanglegram": str(tg), "matched_cherries": k, "stabilizer": s,
                     "induced_only": s == 2**k})
        agree += s == 2**k
    report = {"n": n, "t_n": len(tgs), "rows": rows,
              "fraction_induced_only": Fraction(agree, len(tgs))}
    if n <= weight_cap:
        report.update(plane_triple_weights(n))
    return report


def plane_triple_weights(n: int) -> dict:
    """Reduce every (plane tree, matching, plane tree) triple to its tanglegram.

    Returns the total weight ``sum |stab| / 4^(n-1)`` (which must be ``t_n``)
    and whether every tanglegram is hit exactly ``4^(n-1)/|stab|`` times.
    """
    planes = list(enumerate_plane_trees(n))
    hits: Counter = Counter()
    stab_cache: dict[int, int] = {}
    reps = _pair_index(n)[0]
    total = Fraction(0)
    for p1 in planes:
        for p2 in planes:
            for sigma in permutations(range(n)):
                tg = Tanglegram.from_plane(p1, sigma, p2)
                k = tanglegram_id(tg)
                if k not in stab_cache:
                    stab_cache[k] = len(stabilizer(reps[k]))
                hits[k] += 1
                total += Fraction(stab_cache[k], 4 ** (n - 1))
    orbit_ok = all(hits[k] * stab_cache[k] == 4 ** (n - 1) for k in range(len(reps)))
    return {"triple_weight_total": total, "orbit_stabiliser_ok": orbit_ok,
            "tanglegrams_hit": len(hits)}
