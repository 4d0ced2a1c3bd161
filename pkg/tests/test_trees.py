import pickle
from collections import Counter

import pytest
from hypothesis import given

from tanglekit.errors import CapExceeded, ParseError
from tanglekit.partitions import aut_size
from tanglekit.trees import (CHERRY, LEAF, canonical_trees, canonicalize, canonicalize_with_map,
                             caterpillar, catalan, complete_tree, enumerate_canonical_trees,
                             enumerate_plane_trees, is_canonical, leaf_intervals, node,
                             parse_tree, serialize_tree, shape_stats, wedderburn_etherington)

from .strategies import plane_trees


def test_catalan_and_we_values():
    assert [catalan(n) for n in range(1, 8)] == [1, 1, 2, 5, 14, 42, 132]
    assert [wedderburn_etherington(n) for n in range(1, 13)] == [
        1, 1, 1, 2, 3, 6, 11, 23, 46, 98, 207, 451]


@pytest.mark.parametrize("n", range(1, 13))
def test_enumeration_counts(n):
    assert len(canonical_trees(n)) == wedderburn_etherington(n)
    if n <= 11:
        assert sum(1 for _ in enumerate_plane_trees(n)) == catalan(n)


def test_small_enumerations():
    assert list(enumerate_plane_trees(2)) == [CHERRY]
    assert list(enumerate_canonical_trees(1)) == [LEAF]
    assert len(set(map(canonicalize, enumerate_plane_trees(4)))) == 2


def test_enumeration_caps():
    with pytest.raises(CapExceeded):
        next(enumerate_plane_trees(12, cap=1000))
    with pytest.raises(CapExceeded):
        canonical_trees(12, cap=100)


def test_mirror_images_canonicalize_together():
    a = node(LEAF, CHERRY)
    b = node(CHERRY, LEAF)
    assert canonicalize(a) == canonicalize(b)
    assert canonicalize(LEAF) is LEAF


@pytest.mark.parametrize("n", range(1, 11))
def test_plane_preimage_sizes(n):
    # each canonical tree has 2^(n-1)/|A(T)| plane embeddings
    counts = Counter(canonicalize(t) for t in enumerate_plane_trees(n))
    for t in canonical_trees(n):
        assert counts[t] * aut_size(t) == 2 ** (n - 1)


def test_shape_stats_examples():
    s = shape_stats(complete_tree(2))
    assert (s.cherries, s.height, s.generators) == (2, 2, 3)
    s = shape_stats(caterpillar(4))
    assert (s.cherries, s.height, s.generators) == (1, 3, 1)
    s = shape_stats(LEAF)
    assert (s.cherries, s.height, s.generators) == (0, 0, 0)


def test_serialization_examples():
    assert serialize_tree(CHERRY) == "(L,L)"
    assert parse_tree("(L,(L,L))") == caterpillar(3)
    assert parse_tree(" ( L , L ) ") == CHERRY


@pytest.mark.parametrize("bad, offset", [("(L,L", 4), ("(L;L)", 2), ("X", 0), ("(L,L))", 5), ("", 0)])
def test_parse_errors_report_offset(bad, offset):
    with pytest.raises(ParseError) as exc:
        parse_tree(bad)
    assert exc.value.offset == offset


@pytest.mark.parametrize("n", range(1, 9))
def test_roundtrip_exhaustive(n):
    for t in enumerate_plane_trees(n):
        assert parse_tree(serialize_tree(t)) == t


def test_deep_trees_do_not_recurse():
    t = caterpillar(5000)
    assert parse_tree(serialize_tree(t)) == t
    assert shape_stats(t).height == 4999
    assert canonicalize(t) == t
    assert pickle.loads(pickle.dumps(t)) == t


@given(plane_trees())
def test_stats_invariants(t):
    s = shape_stats(t)
    n = t.size
    assert s.cherries <= n // 2
    assert (n - 1).bit_length() <= s.height <= n - 1 or n == 1
    assert s.generators <= n - 1
    assert s.occurrences[LEAF] == n


@given(plane_trees())
def test_canonical_form_properties(t):
    c = canonicalize(t)
    assert is_canonical(c)
    assert canonicalize(c) == c
    assert canonicalize(parse_tree(serialize_tree(t))) == c
    assert 2 ** shape_stats(c).generators == aut_size(c)


@given(plane_trees())
def test_canonicalize_with_map_relabels_clusters(t):
    c, perm = canonicalize_with_map(t)
    assert c == canonicalize(t)
    assert sorted(perm) == list(range(t.size))
    clusters = {frozenset(range(s, e)) for s, e, _ in leaf_intervals(c)}
    for s, e, _ in leaf_intervals(t):
        assert frozenset(perm[i] for i in range(s, e)) in clusters


def test_canonical_order_is_total_and_sorted():
    trees = canonical_trees(9)
    assert list(trees) == sorted(trees)
    assert len(set(trees)) == len(trees)
