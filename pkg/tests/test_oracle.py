from fractions import Fraction

import pytest

from tanglekit.errors import CapExceeded
from tanglekit.measures import t_n
from tanglekit.oracle import (automorphism_audit, automorphisms_by_scan, canonicalize_tanglegram,
                              cycle_census, double_coset, enumerate_automorphisms,
                              enumerate_tanglegrams, exact_matched_cherry_distribution,
                              oracle_dump, stabilizer, tanglegram_id)
from tanglekit.sampling import Tanglegram
from tanglekit.trees import CHERRY, canonical_trees, caterpillar, complete_tree


@pytest.mark.parametrize("n, count", [(1, 1), (2, 1), (3, 2), (4, 13), (5, 114), (6, 1509)])
def test_enumeration_counts(n, count):
    assert len(enumerate_tanglegrams(n)) == count == t_n(n)


def test_enumeration_n7():
    tgs = enumerate_tanglegrams(7)
    assert len(tgs) == 25595
    assert len({(tg.left, tg.matching, tg.right) for tg in tgs}) == 25595


def test_enumeration_cap():
    with pytest.raises(CapExceeded):
        enumerate_tanglegrams(8)


def test_canonical_forms():
    for v in [(0, 1), (1, 0)]:
        assert canonicalize_tanglegram(Tanglegram(CHERRY, v, CHERRY)).matching == (0, 1)
    for n in range(1, 6):
        for tg in enumerate_tanglegrams(n):
            c = canonicalize_tanglegram(tg)
            assert c == tg  # listed forms are already minimal
            assert canonicalize_tanglegram(c) == c
            assert c.matching == min(double_coset(tg))


def test_n4_triples_collapse():
    raw = {(a, v, b) for a in canonical_trees(4) for b in canonical_trees(4)
           for v in __import__("itertools").permutations(range(4))}
    assert len(raw) == 2 * 2 * 24
    forms = {canonicalize_tanglegram(Tanglegram(a, v, b)) for a, v, b in raw}
    assert len(forms) == 13


def test_automorphism_examples():
    assert enumerate_automorphisms(CHERRY) == [(0, 1), (1, 0)]
    assert len(enumerate_automorphisms(complete_tree(2))) == 8
    assert cycle_census(complete_tree(2)) == {"1,1,1,1": 1, "2,1,1": 2, "2,2": 3, "4": 2}
    assert len(enumerate_automorphisms(caterpillar(5))) == 2
    with pytest.raises(CapExceeded):
        enumerate_automorphisms(complete_tree(4), cap=2**10)


@pytest.mark.parametrize("n", range(1, 8))
def test_generator_closure_matches_scan(n):
    for t in canonical_trees(n):
        assert enumerate_automorphisms(t) == sorted(automorphisms_by_scan(t))


def test_matched_cherry_pmf():
    assert exact_matched_cherry_distribution(2) == {1: Fraction(1)}
    for n in range(1, 7):
        assert sum(exact_matched_cherry_distribution(n).values()) == 1
    d5 = exact_matched_cherry_distribution(5)
    assert d5 == {0: Fraction(2, 3), 1: Fraction(11, 38), 2: Fraction(5, 114)}


def test_audit_and_weights():
    a2 = automorphism_audit(2)
    assert a2["rows"][0]["stabilizer"] == 2 and a2["rows"][0]["matched_cherries"] == 1
    for n in range(1, 6):
        a = automorphism_audit(n)
        assert a["triple_weight_total"] == t_n(n)
        assert a["orbit_stabiliser_ok"]
        assert 0 < a["fraction_induced_only"] <= 1
    a6 = automorphism_audit(6)
    assert len(a6["rows"]) == 1509


def test_stabilizer_elements_fix_matching():
    for tg in enumerate_tanglegrams(5):
        v = tg.matching
        for u, w in stabilizer(tg):
            assert tuple(w[v[u[i]]] for i in range(5)) == v


def test_dump_and_ids():
    lines = oracle_dump(4)
    assert len(lines) == 13 and lines == sorted(lines)
    for i, tg in enumerate(enumerate_tanglegrams(5)):
        assert tanglegram_id(tg) == i
