"""Array kernels for large plane trees (JIT-compiled when numba is present).

Trees are stored as ``left``/``right``/``parent`` int arrays over node ids;
leaves are ids ``0..n-1`` and internal nodes ``n..2n-2``.  Randomness is
supplied by the caller as pre-drawn integers so results depend only on the
draws, not on the compiler.
"""

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


@njit(cache=True)
def remy_build(n, draws):
    """Remy's growth process; ``draws[k-1]`` is uniform in ``[0, 2(2k-1))``."""
    size = 2 * n - 1
    left = np.full(size, -1, np.int64)
    right = np.full(size, -1, np.int64)
    parent = np.full(size, -1, np.int64)
    existing = np.empty(size, np.int64)
    existing[0] = 0
    count = 1
    root = 0
    for k in range(1, n):
        r = draws[k - 1]
        x = existing[r >> 1]
        leaf = k
        y = n + k - 1
        p = parent[x]
        if p == -1:
            root = y
        elif left[p] == x:
            left[p] = y
        else:
            right[p] = y
        parent[y] = p
        if r & 1:
            left[y] = leaf
            right[y] = x
        else:
            left[y] = x
            right[y] = leaf
        parent[x] = y
        parent[leaf] = y
        existing[count] = leaf
        existing[count + 1] = y
        count += 2
    return left, right, parent, root


@njit(cache=True)
def tree_height(left, right, root):
    size = left.shape[0]
    stack = np.empty(size, np.int64)
    depth = np.empty(size, np.int64)
    stack[0] = root
    depth[0] = 0
    top = 1
    best = 0
    while top > 0:
        top -= 1
        v = stack[top]
        d = depth[top]
        if left[v] == -1:
            if d > best:
                best = d
        else:
            stack[top] = left[v]
            depth[top] = d + 1
            stack[top + 1] = right[v]
            depth[top + 1] = d + 1
            top += 2
    return best


@njit(cache=True)
def cherry_count(left, right, n):
    c = 0
    for v in range(n, left.shape[0]):
        if left[v] < n and right[v] < n:
            c += 1
    return c


@njit(cache=True)
def matched_cherries(left1, right1, parent2, perm, n):
    """Left cherries whose two leaves map under ``perm`` to sibling leaves."""
    k = 0
    for v in range(n, left1.shape[0]):
        a = left1[v]
        b = right1[v]
        if a < n and b < n and parent2[perm[a]] == parent2[perm[b]]:
            k += 1
    return k


def remy_draws(n, generator):
    """Pre-drawn choices for :func:`remy_build` from a numpy Generator."""
    if n == 1:
        return np.zeros(0, np.int64)
    highs = 2 * (2 * np.arange(1, n, dtype=np.int64) - 1)
    return generator.integers(0, highs, dtype=np.int64)


@njit(cache=True)
def remy_heights(n, draws):
    """Height of the tree built from each row of ``draws``."""
    out = np.empty(draws.shape[0], np.int64)
    for i in range(draws.shape[0]):
        left, right, parent, root = remy_build(n, draws[i])
        out[i] = tree_height(left, right, root)
    return out


@njit(cache=True)
def matched_batch(n, draws1, draws2, perms):
    """Matched cherries for each row: two Remy trees and a matching."""
    out = np.empty(draws1.shape[0], np.int64)
    for i in range(draws1.shape[0]):
        l1, r1, p1, _ = remy_build(n, draws1[i])
        l2, r2, p2, _ = remy_build(n, draws2[i])
        out[i] = matched_cherries(l1, r1, p2, perms[i], n)
    return out
