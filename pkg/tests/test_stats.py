import math
from collections import Counter
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tanglekit.errors import CapExceeded, DomainError
from tanglekit.measures import exact_mean, left_marginal
from tanglekit.oracle import brute_force_matching_counts, double_coset, enumerate_tanglegrams
from tanglekit.sampling import Tanglegram, inverse
from tanglekit.stats import (Aggregate, approximate_matched_cherries, exact_occurrence_moments,
                             exact_tanglegram_cherry_mean, gamma_constant, gamma_digits,
                             height_cdf, height_tail_exact, matched_cherries,
                             matchings_with_k_matched, occurrence_moments_by_derivatives,
                             occurrence_series, plane_tree_heights, plane_tree_mean,
                             poisson_reference, root_branch_limit, root_branch_probability,
                             root_branch_probability_exhaustive, subtree_occurrence_params,
                             tanglegram_statistics, theta_tail, verify_cherry_law,
                             verify_generators_law, verify_height_law,
                             verify_matched_cherry_law)
from tanglekit.trees import (CHERRY, LEAF, canonical_trees, catalan, caterpillar, cherry_count,
                             complete_tree, enumerate_plane_trees, generator_count,
                             shape_stats)

from .strategies import tanglegram_parts


def test_matched_cherry_examples():
    assert matched_cherries(Tanglegram(CHERRY, (0, 1), CHERRY)) == 1
    cat = caterpillar(4)  # unique cherry on leaves 2, 3
    assert matched_cherries(Tanglegram(cat, (0, 1, 2, 3), cat)) == 1
    assert matched_cherries(Tanglegram(cat, (2, 3, 0, 1), cat)) == 0


@pytest.mark.parametrize("n", range(2, 6))
def test_matched_cherries_invariant_on_double_cosets(n):
    for tg in enumerate_tanglegrams(n):
        k = matched_cherries(tg)
        assert k <= min(cherry_count(tg.left), cherry_count(tg.right))
        for v in double_coset(tg):
            assert matched_cherries(Tanglegram(tg.left, v, tg.right)) == k


@given(tanglegram_parts(), st.booleans())
def test_matched_cherries_symmetric_under_swapping_sides(parts, mirror):
    a, sigma, b = parts
    tg = Tanglegram.from_plane(a, sigma, b)
    swapped = Tanglegram(tg.right, tuple(inverse(tg.matching)), tg.left)
    assert matched_cherries(tg) == matched_cherries(swapped)
    if mirror:
        assert matched_cherries(tg) <= min(cherry_count(tg.left), cherry_count(tg.right))


def test_inclusion_exclusion_examples():
    assert matchings_with_k_matched(2, 1, 1, 1) == 2
    assert matchings_with_k_matched(2, 1, 1, 0) == 0
    with pytest.raises(DomainError):
        matchings_with_k_matched(4, 3, 1, 0)
    with pytest.raises(DomainError):
        matchings_with_k_matched(4, 2, 2, 3)


def _disjoint_pairs(c):
    return [(2 * i, 2 * i + 1) for i in range(c)]


@pytest.mark.parametrize("n", range(1, 9))
def test_inclusion_exclusion_matches_brute_force(n):
    for c1 in range(n // 2 + 1):
        for c2 in range(n // 2 + 1):
            # the count only depends on the cherry counts, so place cherries
            # on the first leaves of one side and the last leaves of the other
            pairs2 = [(n - 1 - a, n - 1 - b) for a, b in _disjoint_pairs(c2)]
            brute = brute_force_matching_counts(n, _disjoint_pairs(c1), pairs2)
            total = 0
            for k in range(min(c1, c2) + 1):
                value = matchings_with_k_matched(n, c1, c2, k)
                assert value == brute.get(k, 0)
                total += value
            assert total == math.factorial(n)


def test_poisson_reference():
    assert poisson_reference(0, 0.25) == pytest.approx(0.7788007830714049)
    assert poisson_reference(1, 0.25) == pytest.approx(0.19470019576785122)
    with pytest.raises(DomainError):
        poisson_reference(0, 0)


def test_occurrence_params():
    assert subtree_occurrence_params(CHERRY) == (Fraction(1, 4), Fraction(1, 16))
    assert subtree_occurrence_params(complete_tree(2)) == (Fraction(1, 64), Fraction(57, 4096))
    with pytest.raises(DomainError):
        subtree_occurrence_params(LEAF)


def test_series_examples():
    tab = occurrence_series(CHERRY, 30)
    assert tab.u1_slice()[1:] == [catalan(n) for n in range(1, 31)]
    for n in range(2, 51):
        assert exact_occurrence_moments(CHERRY, n)[0] == Fraction(n * (n - 1), 4 * n - 6)
    _, var = exact_occurrence_moments(CHERRY, 40)
    assert abs(var / 40 - Fraction(1, 16)) <= Fraction(1, 160)
    with pytest.raises(CapExceeded):
        occurrence_series(CHERRY, 61)


@pytest.mark.parametrize("b", [CHERRY, caterpillar(3), complete_tree(2), caterpillar(4)])
def test_series_against_enumeration(b):
    from tanglekit.trees import canonicalize
    target = canonicalize(b)
    tab = occurrence_series(b, 10)
    for n in range(1, 11):
        dist = Counter(shape_stats(t).occurrences.get(target, 0)
                       if t.size >= 1 else 0 for t in enumerate_plane_trees(n))
        assert tab.coeffs[n] + [0] * (max(dist) + 1 - len(tab.coeffs[n])) == [
            dist.get(k, 0) for k in range(max(len(tab.coeffs[n]), max(dist) + 1))]
    assert occurrence_moments_by_derivatives(b, 30) == [tab_m for tab_m in
                                                        (occurrence_series(b, 30).moments(n)
                                                         for n in range(1, 31))]


def test_series_trend_towards_limit_constants():
    b = complete_tree(2)
    mu, sigma2 = subtree_occurrence_params(b)
    mean, var = exact_occurrence_moments(b, 60)
    assert abs(mean / 60 - mu) / mu < 0.05
    assert abs(var / 60 - sigma2) / sigma2 < 0.15


def test_root_branch_examples():
    assert root_branch_probability(LEAF, 5) == Fraction(5, 7)
    assert root_branch_limit(LEAF) == Fraction(1, 2)
    assert root_branch_limit(CHERRY) == Fraction(1, 8)
    with pytest.raises(DomainError):
        root_branch_probability(CHERRY, 4)


@pytest.mark.parametrize("n", range(3, 11))
def test_root_branch_exhaustive(n):
    for m in range(1, (n + 1) // 2):
        for b in canonical_trees(m):
            assert root_branch_probability(b, n) == root_branch_probability_exhaustive(b, n)


def test_theta_tail_properties():
    grid = [0.05 * k for k in range(1, 101)]
    vals = [theta_tail(x) for x in grid]
    assert all(0 <= v <= 1 + 1e-12 for v in vals)
    assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
    assert theta_tail(1e-3) == pytest.approx(1.0)
    assert theta_tail(10) < 1e-40
    with pytest.raises(DomainError):
        theta_tail(0)


def test_theta_mean_is_sqrt_pi():
    from scipy.integrate import quad
    val, _ = quad(theta_tail, 1e-9, 10, limit=200)
    assert val == pytest.approx(math.sqrt(math.pi), rel=1e-7)


def test_height_cdf_matches_enumeration():
    for n in range(1, 11):
        c = Counter(shape_stats(t).height for t in enumerate_plane_trees(n))
        cdf = height_cdf(n)
        running = 0
        for h in range(len(cdf)):
            running += c.get(h, 0)
            assert cdf[h] == pytest.approx(running / catalan(n), abs=1e-9)
        assert height_tail_exact(n, 0, cdf) == 1.0


def test_gamma():
    g = gamma_constant()
    assert gamma_digits(10) == "0.2710416936"
    assert abs(float(g - gamma_constant(depth=12))) < 1e-12
    assert gamma_digits(20) == "0.27104169360883278702"


def test_gamma_series_limit():
    # f(x)/x -> 1 as x -> 0: solve the same recursion at a tiny x
    from mpmath import mp, mpf, sqrt
    with mp.workdps(40):
        x = mpf(10) ** -8
        xs = [x]
        while xs[-1] > mpf(10) ** -60:
            xs.append(xs[-1] ** 2)
        f = xs[-1]
        for xk in reversed(xs[:-1]):
            f = 1 - sqrt(1 - 2 * xk - 2 * (xk - mpf(1) / 2) * f)
        assert abs(f / x - 1) < 1e-6


@pytest.mark.parametrize("n", range(1, 11))
def test_tanglegram_cherry_mean_dp_matches_enumeration(n):
    assert exact_tanglegram_cherry_mean(n) == exact_mean(cherry_count, left_marginal(n))


def test_plane_mean_of_generators_near_gamma_n():
    g = float(gamma_constant())
    for n in (12, 13):
        assert abs(float(plane_tree_mean(generator_count, n)) / (g * n) - 1) < 0.1


def test_aggregate_merge_and_moments():
    a = Aggregate(Counter({0: 3, 1: 1}))
    b = Aggregate(Counter({2: 1}))
    m = a.merge(b)
    assert m.size == 5
    assert m.moments()["mean"] == pytest.approx(0.6)
    assert m.tail(1) == pytest.approx(0.4)


def test_reports_structure_and_reproducibility():
    a1 = tanglegram_statistics(8, 300, seed=3)
    a2 = tanglegram_statistics(8, 300, seed=3)
    assert a1["matched_cherries"].counts == a2["matched_cherries"].counts
    r = verify_matched_cherry_law(a1["matched_cherries"], 8)
    d = r.to_dict()
    assert d["reference"]["poisson_mean"] == 0.25
    assert d["sample_size"] == 300
    assert set(d["checks"]) == {"p0_between_limits", "p0_closer_to_exp(-1/4)"}
    r = verify_cherry_law(a1["cherries"], 8, exact_tanglegram_cherry_mean(8))
    assert r.passed
    r = verify_generators_law(a1["generators"], 8)
    assert "gamma_n" in r.reference


def test_approximate_matched_cherries_smoke():
    agg = approximate_matched_cherries(60, 2000, seed=1)
    assert agg.size == 2000
    assert agg.moments()["mean"] < 0.25
    assert agg.counts == approximate_matched_cherries(60, 2000, seed=1).counts


def test_height_report_small_n():
    agg = plane_tree_heights(400, 3000, seed=5)
    r = verify_height_law(agg, 400, finite_n_tol=0.03)
    assert all(v for k, v in r.checks.items() if "finite_n" in k)
    assert r.reference["finite_n_mean"] == pytest.approx(agg.moments()["mean"], rel=0.02)
