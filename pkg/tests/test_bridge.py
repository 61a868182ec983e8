"""Cover seeds, the label-collapsing projection, and the commutation checks."""

from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from quiverfold.laurent import LaurentPoly
from quiverfold.matrices import ExchangeMatrix, mutate, principal_extension
from quiverfold.quivers import (
    IllDefinedFoldingError,
    MissingRepresentativeError,
    fold,
)
from quiverfold.seeds import mutate_seed
from quiverfold.bridge import (
    UnfoldedSeedPair,
    orbit_mutate_seed,
    pi,
    square_embedding,
    unfolded_seed_pair,
    verify_covering_commutation,
    verify_pi_commutation,
)

A2 = ExchangeMatrix([[0, 1], [-1, 0]])
A3 = ExchangeMatrix([[0, 1, 0], [-1, 0, 1], [0, -1, 0]])
RUNNING = ExchangeMatrix([[0, 2, 2], [-2, 0, 1], [-1, -3, 0]])


def test_square_embedding_of_principal_extension():
    got = square_embedding(principal_extension(RUNNING))
    assert got.entries == (
        (0, 2, 2, -1, 0, 0),
        (-2, 0, 1, 0, -1, 0),
        (-1, -3, 0, 0, 0, -1),
        (1, 0, 0, 0, 0, 0),
        (0, 1, 0, 0, 0, 0),
        (0, 0, 1, 0, 0, 0),
    )
    assert got.is_square()


def test_square_embedding_keeps_square_input():
    assert square_embedding(RUNNING).entries == RUNNING.entries


def test_pair_folds_back_to_its_base_matrix():
    pair = unfolded_seed_pair(principal_extension(RUNNING), 4)
    assert fold(pair.quiver) == pair.base.matrix
    assert pair.quiver.frozen_labels == frozenset({3, 4, 5})


def test_pair_frozen_vertices_carry_frozen_labels():
    pair = unfolded_seed_pair(principal_extension(RUNNING), 3)
    Q = pair.quiver
    for v in range(Q.n_vertices):
        assert Q.is_frozen_vertex(v) == (Q.labels[v] in Q.frozen_labels)


def test_pair_requires_depth_reaching_every_label():
    with pytest.raises(ValueError, match="label 3"):
        unfolded_seed_pair(A3, 1)


def test_pi_maps_initial_cover_cluster_onto_base_cluster():
    pair = unfolded_seed_pair(principal_extension(RUNNING), 3)
    images = {pi(pair, v) for v in pair.cover.extended_cluster}
    assert images == set(pair.base.extended_cluster)


def test_pi_collapses_same_label_product_to_a_square():
    pair = unfolded_seed_pair(principal_extension(RUNNING), 3)
    Q = pair.quiver
    by_label: dict[int, list[int]] = {}
    for v in range(Q.n_vertices):
        by_label.setdefault(Q.labels[v], []).append(v)
    u, w = next(vs[:2] for vs in by_label.values() if len(vs) >= 2)
    prod = pair.vertex_variable(u) * pair.vertex_variable(w)
    expect = pair.base.variable(Q.labels[u]) ** 2
    assert pi(pair, prod) == expect
    assert pi(pair, pair.cover.ring.one()) == pair.base.ring.one()


def test_pi_rejects_foreign_polynomials():
    pair = unfolded_seed_pair(principal_extension(RUNNING), 3)
    with pytest.raises(ValueError, match="cover ring"):
        pi(pair, pair.base.cluster[0])


PAIR = unfolded_seed_pair(principal_extension(A2), 4)


@st.composite
def cover_polys(draw):
    ring = PAIR.cover.ring
    n_terms = draw(st.integers(0, 4))
    terms = {}
    for _ in range(n_terms):
        exps = tuple(
            draw(st.integers(-2 if i < ring.n_exchangeable else 0, 2))
            for i in range(ring.n_vars)
        )
        terms[exps] = draw(st.integers(-4, 4))
    return LaurentPoly(ring, terms)


@settings(max_examples=120, deadline=None)
@given(cover_polys(), cover_polys())
def test_pi_is_a_ring_homomorphism(a, b):
    assert pi(PAIR, a + b) == pi(PAIR, a) + pi(PAIR, b)
    assert pi(PAIR, a * b) == pi(PAIR, a) * pi(PAIR, b)


def test_trivial_classes_reduce_to_plain_seed_mutation():
    # A2 stabilizes, every class is a single vertex, so the orbit-mutated
    # cover is the base computation written with different variable names
    pair = unfolded_seed_pair(principal_extension(A2), 4)
    assert pair.quiver.frontier_margin is None
    for label in (0, 1, 0):
        pair = orbit_mutate_seed(pair, label)
    for label in range(2):
        (rep,) = [
            v for v in range(pair.quiver.n_vertices)
            if pair.quiver.labels[v] == label
        ]
        assert pi(pair, pair.vertex_variable(rep)) == pair.base.cluster[label]


def test_orbit_mutation_of_seeds_is_an_involution():
    pair = unfolded_seed_pair(principal_extension(RUNNING), 4)
    twice = orbit_mutate_seed(orbit_mutate_seed(pair, 1), 1)
    assert twice.cover.cluster == pair.cover.cluster
    assert twice.base.cluster == pair.base.cluster
    assert twice.quiver.rows == pair.quiver.rows


def test_class_mutations_commute_with_each_other():
    # any finite subset of the class can be mutated in any order: the class
    # is pairwise non-adjacent, so the single-vertex exchanges are disjoint
    pair = unfolded_seed_pair(principal_extension(RUNNING), 4)
    members = pair.quiver.class_members(2)
    assert len(members) >= 2
    forward = pair.cover
    for u in members:
        forward = mutate_seed(forward, pair.position(u))
    backward = pair.cover
    for u in reversed(members):
        backward = mutate_seed(backward, pair.position(u))
    assert forward.cluster == backward.cluster
    assert forward.matrix == backward.matrix
    mutated = orbit_mutate_seed(pair, 2)
    assert mutated.cover.cluster == forward.cluster


def test_lockstep_fold_invariant_along_a_sequence():
    pair = unfolded_seed_pair(principal_extension(RUNNING), 4)
    want = pair.base.matrix
    for label in (0, 2):
        pair = orbit_mutate_seed(pair, label)
        want = mutate(want, label)
        assert fold(pair.quiver) == want
        assert pair.base.matrix == want


def test_missing_representative_is_an_ill_defined_folding():
    assert issubclass(MissingRepresentativeError, IllDefinedFoldingError)


def test_covering_commutation_empty_sequence_recovers_the_matrix():
    r = verify_covering_commutation(RUNNING, (), 3)
    assert r.ok
    assert r.sequences_tried == 1
    assert "unverifiable" not in r.stats


def test_covering_commutation_exhaustive_short_sequences():
    for a in range(3):
        for b in range(3):
            r = verify_covering_commutation(RUNNING, (a, b), 5)
            assert r.ok, r.to_text()
            assert "unverifiable" not in r.stats


def test_covering_commutation_marks_shallow_truncations_unverifiable():
    r = verify_covering_commutation(RUNNING, (1, 0, 1), 5)
    assert r.ok
    notes = r.stats["unverifiable"]
    assert any("certified representative" in n for n in notes)


def test_covering_commutation_validates_input():
    with pytest.raises(ValueError, match="depth"):
        verify_covering_commutation(RUNNING, (0, 1), 3)
    with pytest.raises(ValueError, match="square"):
        verify_covering_commutation(principal_extension(RUNNING), (), 3)


def test_pi_commutation_empty_sequence():
    r = verify_pi_commutation(RUNNING, (), 2)
    assert r.ok
    assert "unverifiable" not in r.stats and "pruned" not in r.stats


def test_pi_commutation_trivial_classes():
    r = verify_pi_commutation(A2, (0, 1, 0), 5)
    assert r.ok
    assert "unverifiable" not in r.stats and "pruned" not in r.stats


def test_pi_commutation_exhaustive_short_sequences():
    for a in range(3):
        for b in range(3):
            r = verify_pi_commutation(RUNNING, (a, b), 4, max_terms=100_000)
            assert r.ok, r.to_text()
            assert "unverifiable" not in r.stats and "pruned" not in r.stats


def test_pi_commutation_accepts_extended_matrices():
    r = verify_pi_commutation(principal_extension(RUNNING), (0, 1, 2), 5)
    assert r.ok
    assert "unverifiable" not in r.stats
    assert r.stats["reps_per_class"] == 2


def test_pi_commutation_reports_incomplete_wild_sequences():
    r = verify_pi_commutation(RUNNING, (1, 0, 2, 1), 6, max_terms=10_000)
    assert r.ok
    assert "unverifiable" in r.stats or "pruned" in r.stats


def test_pi_commutation_validates_depth():
    with pytest.raises(ValueError, match="depth"):
        verify_pi_commutation(RUNNING, (0, 1, 2), 4)
