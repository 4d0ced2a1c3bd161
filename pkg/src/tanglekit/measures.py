"""Exact tanglegram counts and the two measures on pairs of binary trees.

``nu_T`` is the law of the (left, right) halves of a uniform random
tanglegram; ``nu_P`` is the law of two independent uniform plane trees,
reduced to isomorphism classes.  Everything here is exact: integers and
:class:`fractions.Fraction`, never floats, except where a function says it
reports a float.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial

from .errors import ConsistencyError, DomainError
from .partitions import (BinaryPartition, aut_size, binary_partitions, cycle_spectrum,
                         mu, q, restricted_poly, z)
from .trees import CANONICAL_CAP, Tree, canonical_trees, catalan, cherry_count

E_EIGHTH = math.exp(0.125)


def t_closed_form(n: int) -> int:
    """``t_n = sum over binary partitions of q(lam)^2 / z(lam)``."""
    if n < 1:
        raise DomainError("n must be positive")
    nf = factorial(n)
    num = sum(q(lam) ** 2 * (nf // z(lam)) for lam in binary_partitions(n))
    t, rem = divmod(num, nf)
    if rem:
        raise ConsistencyError(f"closed-form sum for t_{n} is not an integer")
    return t


def t_table(n_max: int) -> list[int]:
    """``[t_1, ..., t_n_max]`` in one pass.

    Same sum as :func:`t_closed_form`, regrouped as a dynamic programme over
    part sizes ``1, 2, 4, ...``: the suffix-sum factors of ``q`` only depend
    on the running total of the smaller parts already placed.
    """
    if n_max < 1:
        return []
    weights: dict[int, Fraction] = {0: Fraction(1)}
    p = 1
    while p <= n_max:
        nxt: dict[int, Fraction] = {}
        for s, w in weights.items():
            acc = w
            m = 0
            total = s
            while True:
                nxt[total] = nxt.get(total, 0) + acc
                m += 1
                total += p
                if total > n_max:
                    break
                acc = acc * (2 * total - 1) ** 2 / (p * m)
        weights = nxt
        p *= 2
    out = []
    for n in range(1, n_max + 1):
        t = weights[n] / (2 * n - 1) ** 2
        if t.denominator != 1:
            raise ConsistencyError(f"t_{n} from the table is not an integer")
        out.append(int(t))
    return out


def t_tree_sum(n: int, cap: int = CANONICAL_CAP) -> int:
    """``t_n`` from the automorphism spectra of all canonical trees."""
    sums: dict[BinaryPartition, Fraction] = {}
    for t in canonical_trees(n, cap):
        a = aut_size(t)
        for lam, c in cycle_spectrum(t).items():
            sums[lam] = sums.get(lam, 0) + Fraction(c, a)
    total = sum(z(lam) * s * s for lam, s in sums.items())
    if total.denominator != 1:
        raise ConsistencyError(f"tree-sum value of t_{n} is not an integer")
    return int(total)


@lru_cache(maxsize=None)
def t_n(n: int) -> int:
    return t_closed_form(n)


@dataclass
class TanglegramCountTable:
    """``t_n`` values with the provenance(s) that produced each."""

    entries: dict[int, dict[str, int]] = field(default_factory=dict)

    def add(self, n: int, provenance: str, value: int):
        row = self.entries.setdefault(n, {})
        for other, v in row.items():
            if v != value:
                raise ConsistencyError(
                    f"t_{n}: {provenance} gives {value} but {other} gives {v}")
        row[provenance] = value

    def value(self, n: int) -> int:
        return next(iter(self.entries[n].values()))

    def provenances(self, n: int) -> set[str]:
        return set(self.entries[n])


def asymptotic_ratio(n: int) -> Fraction:
    """``t_n / (n! (C_n / 2^(n-1))^2)``, which tends to ``e^(1/8)``."""
    return Fraction(t_n(n) * 4 ** (n - 1), factorial(n) * catalan(n) ** 2)


def asymptotic_ratios(n_max: int) -> list[Fraction]:
    return [Fraction(t * 4 ** (n - 1), factorial(n) * catalan(n) ** 2)
            for n, t in enumerate(t_table(n_max), start=1)]


class PairContext:
    """Per-``n`` data for pair measures: trees, spectrum vectors, constants."""

    def __init__(self, n: int, cap: int = CANONICAL_CAP):
        self.n = n
        self.trees = canonical_trees(n, cap)
        self.partitions = binary_partitions(n)
        self.zs = [z(lam) for lam in self.partitions]
        self.t = t_n(n)
        self.catalan = catalan(n)
        self.vectors = []
        self.gens = []
        for tree in self.trees:
            spec = cycle_spectrum(tree)
            self.vectors.append([spec.get(lam, 0) for lam in self.partitions])
            self.gens.append(aut_size(tree).bit_length() - 1)
        self.index = {tree: i for i, tree in enumerate(self.trees)}

    def bilinear(self, i: int, j: int) -> int:
        """``sum_lam z_lam |A(B_i)_lam| |A(B_j)_lam|``."""
        vi, vj = self.vectors[i], self.vectors[j]
        return sum(zz * a * b for zz, a, b in zip(self.zs, vi, vj) if a and b)

    def nu_t(self, i: int, j: int) -> Fraction:
        return Fraction(self.bilinear(i, j),
                        self.t << (self.gens[i] + self.gens[j]))

    def nu_p(self, i: int, j: int) -> Fraction:
        return Fraction(4 ** (self.n - 1),
                        (self.catalan ** 2) << (self.gens[i] + self.gens[j]))


@lru_cache(maxsize=16)
def pair_context(n: int) -> PairContext:
    return PairContext(n)


def _pair_indices(b1: Tree, b2: Tree, n: int | None):
    if b1.size != b2.size or (n is not None and b1.size != n):
        raise DomainError("both trees must have n leaves")
    ctx = pair_context(b1.size)
    return ctx, ctx.index[b1], ctx.index[b2]


def nu_T(b1: Tree, b2: Tree, n: int | None = None) -> Fraction:
    """Probability that a uniform tanglegram has halves ``(b1, b2)``."""
    ctx, i, j = _pair_indices(b1, b2, n)
    return ctx.nu_t(i, j)


def nu_P(b1: Tree, b2: Tree, n: int | None = None) -> Fraction:
    """Probability that two uniform plane trees are isomorphic to ``(b1, b2)``."""
    ctx, i, j = _pair_indices(b1, b2, n)
    return ctx.nu_p(i, j)


@dataclass(frozen=True)
class PairMeasureEntry:
    left: Tree
    right: Tree
    nuT: Fraction
    nuP: Fraction


def pair_measures(n: int):
    """Stream ``PairMeasureEntry`` over all ordered pairs of canonical trees."""
    ctx = pair_context(n)
    for i, a in enumerate(ctx.trees):
        for j, b in enumerate(ctx.trees):
            yield PairMeasureEntry(a, b, ctx.nu_t(i, j), ctx.nu_p(i, j))


def _tvd_rows(args) -> int:
    n, rows = args
    ctx = pair_context(n)
    target = 4 ** (n - 1) * ctx.t
    c2 = ctx.catalan ** 2
    gmax = max(ctx.gens)
    acc = 0
    for i in rows:
        gi = ctx.gens[i]
        for j in range(i, len(ctx.trees)):
            term = abs(ctx.bilinear(i, j) * c2 - target) << (2 * gmax - gi - ctx.gens[j])
            acc += term if i == j else 2 * term
    return acc


def total_variation(n: int, workers: int = 1) -> Fraction:
    """Exact ``d(nu_T, nu_P)`` as half the L1 distance over all pairs.

    Pairs are streamed; the accumulator is an integer numerator over the
    common denominator ``t_n C_n^2 4^gmax``, so the result is independent of
    how rows are split across ``workers``.
    """
    ctx = pair_context(n)
    m = len(ctx.trees)
    chunks = [(n, list(range(k, m, max(workers, 1)))) for k in range(max(workers, 1))]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            acc = sum(pool.map(_tvd_rows, chunks))
    else:
        acc = _tvd_rows(chunks[0])
    gmax = max(ctx.gens)
    return Fraction(acc, 2 * ctx.t * ctx.catalan ** 2 * 4 ** gmax)


def total_variation_direct(n: int) -> Fraction:
    """Same quantity via explicit Fraction arithmetic per pair (slow reference)."""
    return sum((abs(e.nuT - e.nuP) for e in pair_measures(n)), Fraction(0)) / 2


def measure_ratio_bounds(n: int) -> dict:
    """Measured ``max nu_T/nu_P`` and ``max nu_P/nu_T`` over pairs, plus the
    exact check of the lower bound obtained from the identity class alone."""
    ctx = pair_context(n)
    floor = Fraction(factorial(n) * ctx.catalan ** 2, 4 ** (n - 1) * ctx.t)
    m = len(ctx.trees)
    # nu_T/nu_P = bilinear * C_n^2 / (4^(n-1) t_n), independent of |A|
    scale = Fraction(ctx.catalan ** 2, 4 ** (n - 1) * ctx.t)
    lo = hi = None
    for i in range(m):
        for j in range(i, m):
            s = ctx.bilinear(i, j)
            lo = s if lo is None or s < lo else lo
            hi = s if hi is None or s > hi else hi
    return {
        "n": n,
        "max_nuT_over_nuP": hi * scale,
        "max_nuP_over_nuT": 1 / (lo * scale),
        "identity_floor": floor,
        "floor_holds": lo * scale >= floor,
    }


def restricted_pair_sum(b1: Tree, b2: Tree) -> Fraction:
    """``(1/n!) sum_s z_mu(s) |A(B1)_mu(s)| |A(B2)_mu(s)|``."""
    if b1.size != b2.size:
        raise DomainError("trees must have the same size")
    n = b1.size
    p1, p2 = restricted_poly(b1), restricted_poly(b2)
    total = sum(z(mu(s, n)) * a * b for s, (a, b) in enumerate(zip(p1, p2)))
    return Fraction(total, factorial(n))


def restricted_pair_bound(n: int) -> Fraction:
    """Upper bound on :func:`restricted_pair_sum` from the binomial cherry bound with
    ``c <= n // 2``."""
    c = n // 2
    total = sum(z(mu(s, n)) * math.comb(c + s - 1, s) ** 2 if s else z(mu(0, n))
                for s in range(n // 2 + 1))
    return Fraction(total, factorial(n))


def restricted_pair_scan(n: int, cap: int = CANONICAL_CAP, alpha: float = 1 / 8) -> dict:
    """Maximum of the restricted sum over all pairs, and the worst deviation
    from ``exp(2 c1 c2 / n^2)`` among pairs with both cherry counts ``>= alpha n``.

    Trees are grouped by their restricted polynomial (which determines the
    cherry count), so the scan is over distinct classes only.
    """
    classes: dict[tuple[int, ...], int] = {}
    for t in canonical_trees(n, cap):
        key = tuple(restricted_poly(t))
        classes[key] = classes.get(key, 0) + 1
    polys = list(classes)
    zs = [z(mu(s, n)) for s in range(n // 2 + 1)]
    nf = factorial(n)
    best = Fraction(0)
    best_pair = None
    worst_dev = 0.0
    for i, p1 in enumerate(polys):
        c1 = p1[1] if len(p1) > 1 else 0
        for p2 in polys[i:]:
            c2 = p2[1] if len(p2) > 1 else 0
            s = sum(zz * a * b for zz, a, b in zip(zs, p1, p2))
            if s > best * nf:
                best = Fraction(s, nf)
                best_pair = (p1, p2)
            if c1 >= alpha * n and c2 >= alpha * n:
                dev = abs(s / nf - math.exp(2 * c1 * c2 / n**2))
                worst_dev = max(worst_dev, dev)
    return {"n": n, "K_emp": best, "argmax_polys": best_pair,
            "classes": len(polys), "max_dev_from_exp": worst_dev}


def non_R_mass(n: int) -> Fraction:
    """Total ``nu_T`` mass carried by partitions not of the form ``2^s 1^(n-2s)``."""
    nf = factorial(n)
    num = sum(q(lam) ** 2 * (nf // z(lam)) for lam in binary_partitions(n)
              if not lam.is_mu())
    return Fraction(num, nf * t_n(n))


def non_R_mass_enumerated(n: int) -> Fraction:
    """Same quantity as :func:`non_R_mass`, summed over tree pairs."""
    ctx = pair_context(n)
    keep = [k for k, lam in enumerate(ctx.partitions) if not lam.is_mu()]
    total = Fraction(0)
    for i in range(len(ctx.trees)):
        for j in range(len(ctx.trees)):
            s = sum(ctx.zs[k] * ctx.vectors[i][k] * ctx.vectors[j][k] for k in keep)
            if s:
                total += Fraction(s, ctx.t << (ctx.gens[i] + ctx.gens[j]))
    return total


def left_marginal(n: int) -> dict[Tree, Fraction]:
    """``nu_T`` probability of each left half (summing out the right tree)."""
    ctx = pair_context(n)
    qs = [q(lam) for lam in ctx.partitions]
    out = {}
    for i, tree in enumerate(ctx.trees):
        s = sum(qq * a for qq, a in zip(qs, ctx.vectors[i]))
        out[tree] = Fraction(s, ctx.t << ctx.gens[i])
    return out


def plane_marginal(n: int) -> dict[Tree, Fraction]:
    """Probability that a uniform plane tree is isomorphic to each canonical tree."""
    ctx = pair_context(n)
    return {tree: Fraction(2 ** (n - 1), ctx.catalan << ctx.gens[i])
            for i, tree in enumerate(ctx.trees)}


def exact_mean(stat, marginal: dict[Tree, Fraction]) -> Fraction:
    return sum((w * stat(t) for t, w in marginal.items()), Fraction(0))


def cherry_floor_fraction(n: int) -> Fraction:
    """``nu_P`` probability that some half has fewer than ``n/8`` cherries."""
    pm = plane_marginal(n)
    low = sum((w for t, w in pm.items() if 8 * cherry_count(t) < n), Fraction(0))
    return 1 - (1 - low) ** 2
