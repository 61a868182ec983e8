"""Seed mutation, expansion, F-polynomials, positivity, Laurent membership."""

from __future__ import annotations

import random

import pytest

from quiverfold.laurent import LaurentRing
from quiverfold.matrices import ExchangeMatrix, principal_extension
from quiverfold.seeds import (
    ExpansionBudgetError,
    expand,
    f_polynomial,
    find_negative_term,
    initial_seed,
    iter_seeds,
    laurent_in_cluster,
    mutate_seed,
    verify_fpolynomials,
    verify_laurent_adjacent,
    verify_positivity,
)

A2 = ExchangeMatrix([[0, 1], [-1, 0]])
RUNNING = ExchangeMatrix([[0, 2, 2], [-2, 0, 1], [-1, -3, 0]])


def test_initial_seed_is_monomial():
    s = initial_seed(principal_extension(A2))
    assert [str(v) for v in s.cluster] == ["x1", "x2"]
    assert [str(c) for c in s.coefficients] == ["y1", "y2"]
    assert s.history == ()


def test_first_exchange_without_coefficients():
    s = mutate_seed(initial_seed(A2), 0)
    assert str(s.cluster[0]) == "x1^-1*x2 + x1^-1"  # (x2 + 1)/x1
    assert s.history == (0,)


def test_first_exchange_with_principal_coefficients():
    s0 = initial_seed(principal_extension(A2))
    s1 = mutate_seed(s0, 0)
    ring = s0.ring
    # (x2 + y1)/x1
    assert s1.cluster[0] == ring.poly({(-1, 1, 0, 0): 1, (-1, 0, 1, 0): 1})
    s2 = mutate_seed(s1, 1)
    # (x1 y1 y2 + x2 + y1)/(x1 x2)
    assert s2.cluster[1] == ring.poly(
        {(0, -1, 1, 1): 1, (-1, 0, 0, 0): 1, (-1, -1, 1, 0): 1}
    )


def test_single_direction_with_principal_coefficient():
    B = principal_extension(ExchangeMatrix([[0]]))
    s = mutate_seed(initial_seed(B), 0)
    assert str(s.cluster[0]) == "x1^-1*y1 + x1^-1"  # (y1 + 1)/x1
    f = f_polynomial(s.cluster[0])
    assert str(f) == "y1 + 1"
    assert f.constant_term() == 1


def test_mutation_is_an_involution_on_seeds():
    s0 = initial_seed(principal_extension(RUNNING))
    for k in range(3):
        back = mutate_seed(mutate_seed(s0, k), k)
        assert back.cluster == s0.cluster
        assert back.matrix == s0.matrix
        assert back.history == (k, k)


def test_pentagon_recurrence():
    # A2 has exactly five cluster variables; after five alternating
    # mutations the cluster returns swapped.
    s = expand(initial_seed(A2), (0, 1, 0, 1, 0))
    x1, x2 = initial_seed(A2).cluster
    assert s.cluster == (x2, x1)


def test_a2_has_five_distinct_cluster_variables():
    variables = set()
    for _, s in iter_seeds(initial_seed(A2), 5):
        variables.update(s.cluster)
    assert len(variables) == 5


def test_denominators_are_single_monomials():
    # Matrix entries blow up along some sequences here, so cap the expansion
    # size; the cap must still leave a substantial sample of variables.
    s0 = initial_seed(principal_extension(RUNNING))
    rng = random.Random(4)
    checked = 0
    skipped = 0
    for _ in range(40):
        seq = [rng.randrange(3) for _ in range(rng.randint(1, 5))]
        try:
            s = expand(s0, seq, max_terms=20_000)
        except ExpansionBudgetError as e:
            assert e.predicted_terms > e.limit == 20_000
            skipped += 1
            continue
        for v in s.cluster:
            checked += 1
            d = v.denominator_exponents()
            assert all(e == 0 for e in d[3:])  # never a frozen denominator
            shifted = v * v.ring.monomial(d)
            assert all(
                e >= 0 for exps in shifted.terms for e in exps
            )  # x-monomial clears it
    assert checked >= 60
    assert skipped < 40


def test_budget_error_reports_the_refused_step():
    s0 = initial_seed(principal_extension(RUNNING))
    with pytest.raises(ExpansionBudgetError) as info:
        expand(s0, (1, 0, 2, 1, 0), max_terms=10_000)
    e = info.value
    assert e.limit == 10_000
    assert e.predicted_terms > 10_000
    assert e.history == (1, 0, 2) or e.history == (1, 0, 2, 1)
    assert e.direction in (0, 1)
    assert str(e.direction) in str(e)


def test_expand_empty_sequence_is_identity():
    s0 = initial_seed(A2)
    assert expand(s0, ()) is s0


def test_mutate_seed_rejects_bad_direction():
    with pytest.raises(IndexError):
        mutate_seed(initial_seed(A2), 2)


def test_f_polynomial_of_initial_variable_is_one():
    s = initial_seed(principal_extension(A2))
    assert str(f_polynomial(s.cluster[0])) == "1"


def test_find_negative_term():
    ring = LaurentRing(("x1", "y1"), 1)
    assert find_negative_term(ring.parse("x1 + 1")) is None
    witness = find_negative_term(ring.parse("x1 - 2*y1"))
    assert witness == (-2, "y1")


def test_laurent_membership_over_initial_seed():
    s0 = initial_seed(principal_extension(A2))
    for _, s in iter_seeds(s0, 4):
        for v in s.cluster:
            assert laurent_in_cluster(v, s0)


def test_laurent_membership_over_adjacent_seeds():
    s0 = initial_seed(principal_extension(A2))
    adjacent = [mutate_seed(s0, k) for k in range(2)]
    for _, s in iter_seeds(s0, 4):
        for v in s.cluster:
            assert all(laurent_in_cluster(v, adj) for adj in adjacent)


def test_laurent_membership_counterexample():
    # mu_1 of the 1x1 zero matrix without coefficients: cluster entry 2/x1.
    B = ExchangeMatrix([[0]])
    s = mutate_seed(initial_seed(B), 0)
    assert str(s.cluster[0]) == "2*x1^-1"
    ring = s.ring
    assert laurent_in_cluster(ring.variable(0), s)  # x1 = 2/z is Laurent in z
    v = ring.poly({(1,): 1, (-1,): 1})  # x1 + 1/x1 needs z/2
    assert not laurent_in_cluster(v, s)


def test_laurent_membership_rejects_distant_seeds():
    s0 = initial_seed(A2)
    far = expand(s0, (0, 1))  # two slots differ from the initial cluster
    with pytest.raises(ValueError):
        laurent_in_cluster(s0.cluster[0], far)


def test_iter_seeds_counts_without_backtracking():
    seqs = [seq for seq, _ in iter_seeds(initial_seed(RUNNING), 3)]
    # 1 + 3 + 3*2 + 3*2*2
    assert len(seqs) == 22
    assert len(set(seqs)) == 22
    assert all(
        all(a != b for a, b in zip(seq, seq[1:])) for seq in seqs
    )


def test_verify_positivity_clean():
    report = verify_positivity(
        RUNNING, exhaustive_len=3, max_len=5, trials=20, prng_seed=3,
        max_terms=20_000,
    )
    assert report.ok
    assert report.theorem == "positivity"
    assert report.stats["variables_checked"] > 0
    for note in report.stats.get("pruned", []):
        assert "predicts up to" in note


def test_verify_fpolynomials_clean_and_stats():
    report = verify_fpolynomials(
        ExchangeMatrix([[0]]), exhaustive_len=1, max_len=1, trials=2, prng_seed=1
    )
    assert report.ok
    assert report.stats["fpolynomials_checked"] >= 2
    report2 = verify_fpolynomials(
        A2, exhaustive_len=4, max_len=5, trials=10, prng_seed=2
    )
    assert report2.ok
    assert 0 < report2.stats["unique_max_degree"] <= report2.stats["fpolynomials_checked"]


def test_verify_laurent_adjacent_clean():
    report = verify_laurent_adjacent(
        A2, exhaustive_len=4, max_len=5, trials=10, prng_seed=5
    )
    assert report.ok
    assert report.stats["distinct_variables"] >= 5


def test_kronecker_depth_growth_stays_positive():
    B = ExchangeMatrix([[0, 2], [-2, 0]])
    report = verify_positivity(B, exhaustive_len=5, max_len=6, trials=10, prng_seed=8)
    assert report.ok
