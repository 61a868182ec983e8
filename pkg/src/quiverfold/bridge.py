"""Seeds over finite quiver truncations and their projection onto the base.

A square exchange matrix with extra frozen rows embeds into a larger square
matrix whose unfolding is a labeled quiver; each vertex carries one cluster
variable. Collapsing exponents along label classes projects cover Laurent
polynomials onto the base ring, and mutating a whole label class at once
mirrors a single base mutation. The verifiers here drive both sides
independently and compare the results.

Exactness bookkeeping rides on the quiver's certified set: a vertex that is
still certified after the whole sequence had, at each of its own mutation
steps, an exact stored row, and every neighbor feeding its exchange was
itself certified one step earlier. Its variable therefore agrees with the
value in the infinite cover, so certified representatives are safe to
compare against the base.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .laurent import LaurentPoly, LaurentRing, format_poly
from .matrices import ExchangeMatrix, format_matrix, mutate, principal_extension
from .quivers import (
    FrontierExhaustedError,
    IllDefinedFoldingError,
    LabeledQuiver,
    MissingRepresentativeError,
    OrbitLoopError,
    OrbitTwoCycleError,
    build_unfolding,
    fold,
    has_orbit_loops,
    has_orbit_two_cycles,
    orbit_mutate,
)
from .reports import Failure, VerificationReport
from .seeds import (
    ExpansionBudgetError,
    Seed,
    expand,
    initial_seed,
    mutate_seed,
    product_term_bound,
)

__all__ = [
    "UnfoldedSeedPair",
    "square_embedding",
    "unfolded_seed_pair",
    "pi",
    "orbit_mutate_seed",
    "verify_covering_commutation",
    "verify_pi_commutation",
]


def square_embedding(M: ExchangeMatrix) -> ExchangeMatrix:
    """Square matrix [[B, -B'^T], [B', 0]] absorbing the frozen rows.

    The frozen block B' becomes ordinary rows, balanced by the transposed
    columns so the result is sign-skew-symmetric whenever B is. A square
    input comes back unchanged in content.
    """
    n, m = M.n, M.m
    rows = []
    for i in range(n):
        rows.append(M.entries[i] + tuple(-M.entries[n + j][i] for j in range(m)))
    for j in range(m):
        rows.append(M.entries[n + j] + (0,) * m)
    return ExchangeMatrix(rows, row_labels=M.row_labels)


def _ring_over(Q: LabeledQuiver, vertices) -> tuple[LaurentRing, tuple[int, ...], dict[int, int]]:
    """Ring with one variable per given vertex, exchangeable ones first.

    Names are x<id+1> for mutable vertices and y<id+1> for frozen ones,
    1-based like every other piece of external text.
    """
    mutable = sorted(v for v in vertices if not Q.is_frozen_vertex(v))
    frozen = sorted(v for v in vertices if Q.is_frozen_vertex(v))
    order = tuple(mutable + frozen)
    names = tuple(
        (f"y{v + 1}" if Q.is_frozen_vertex(v) else f"x{v + 1}") for v in order
    )
    ring = LaurentRing(names, len(mutable))
    position = {v: p for p, v in enumerate(order)}
    return ring, order, position


def _cover_seed(Q: LabeledQuiver) -> tuple[Seed, tuple[int, ...]]:
    """Seed whose matrix is the quiver itself, one variable per vertex."""
    ring, order, position = _ring_over(Q, range(Q.n_vertices))
    n_ex = ring.n_exchangeable
    entries = [[0] * n_ex for _ in order]
    for p, u in enumerate(order):
        for t, mult in Q.rows[u]:
            q = position[t]
            if q < n_ex:
                entries[p][q] = mult
    matrix = ExchangeMatrix(entries, row_labels=ring.names)
    cluster = tuple(ring.variable(i) for i in range(n_ex))
    coefficients = tuple(ring.variable(i) for i in range(n_ex, len(order)))
    return Seed(matrix, cluster, coefficients, ring), order


@dataclass(frozen=True, eq=False)
class UnfoldedSeedPair:
    """A base seed and a cover seed kept in mutation lockstep.

    `vertex_order` maps cover seed positions to quiver vertex ids; the
    quiver carries labels, frozen flags, and the certification frontier.
    """

    base: Seed
    cover: Seed
    quiver: LabeledQuiver
    vertex_order: tuple[int, ...]

    @property
    def label_map(self) -> tuple[int, ...]:
        return self.quiver.labels

    def position(self, vertex: int) -> int:
        return self.vertex_order.index(vertex)

    def vertex_variable(self, vertex: int) -> LaurentPoly:
        """Current cluster entry sitting at a quiver vertex."""
        return self.cover.variable(self.position(vertex))


def unfolded_seed_pair(M: ExchangeMatrix, depth: int) -> UnfoldedSeedPair:
    """Base seed over M next to a cover seed over its unfolded quiver.

    Frozen rows of M become frozen labels of the cover. The square
    embedding must stay acyclic and connected, which holds in particular
    for principal coefficients; mixed-sign frozen rows can create directed
    cycles and are rejected by the construction. Every label needs at
    least one vertex, so the depth must reach the whole label set.
    """
    embedded = square_embedding(M)
    Q = build_unfolding(embedded, depth, frozen_labels=range(M.n, M.n + M.m))
    missing = set(range(Q.n_labels)) - set(Q.labels)
    if missing:
        raise ValueError(
            f"depth {depth} reaches no vertex of label {min(missing) + 1}"
        )
    cover, order = _cover_seed(Q)
    return UnfoldedSeedPair(initial_seed(M), cover, Q, order)


def _project(v: LaurentPoly, base_ring: LaurentRing, slot_labels) -> LaurentPoly:
    """Collapse each exponent vector by summing entries within label classes.

    Coefficients of monomials that become equal add up; the result is the
    image under the substitution variable-at-slot -> variable-of-its-label.
    """
    width = base_ring.n_vars
    acc: dict[tuple[int, ...], int] = {}
    for exps, coeff in v.terms.items():
        img = [0] * width
        for s, e in enumerate(exps):
            if e:
                img[slot_labels[s]] += e
        key = tuple(img)
        acc[key] = acc.get(key, 0) + coeff
    return LaurentPoly(base_ring, acc)


def pi(pair: UnfoldedSeedPair, v: LaurentPoly) -> LaurentPoly:
    """Project a cover polynomial onto the base ring of the pair.

    Each cover variable maps to the variable of its label; this is a ring
    homomorphism because it acts on exponent vectors linearly.
    """
    if v.ring != pair.cover.ring:
        raise ValueError("polynomial is not over the cover ring of this pair")
    slot_labels = tuple(pair.quiver.labels[u] for u in pair.vertex_order)
    return _project(v, pair.base.ring, slot_labels)


def orbit_mutate_seed(
    pair: UnfoldedSeedPair, label: int, *, max_terms: int | None = None
) -> UnfoldedSeedPair:
    """Mutate every cover variable of a label class and the base in lockstep.

    Class vertices are pairwise non-adjacent (a same-label arrow would be
    an orbit loop), so their single-vertex exchanges read disjoint data and
    any order gives the same result; the implementation runs them in vertex
    order. Quiver preconditions (frontier margin, orbit loops, 2-cycles)
    are checked first and their errors propagate. Intended for small
    truncations; the verifiers below use a restricted evaluation instead.
    """
    new_quiver = orbit_mutate(pair.quiver, label)
    cover = pair.cover
    for u in pair.quiver.class_members(label):
        cover = mutate_seed(cover, pair.position(u), max_terms=max_terms)
    base = mutate_seed(pair.base, label, max_terms=max_terms)
    return UnfoldedSeedPair(base, cover, new_quiver, pair.vertex_order)


_ORBIT_ERRORS = (OrbitLoopError, OrbitTwoCycleError, FrontierExhaustedError)


def verify_covering_commutation(
    B: ExchangeMatrix, seq, depth: int
) -> VerificationReport:
    """Fold of the orbit-mutated quiver must match the mutated matrix.

    Drives the unfolded quiver by orbit mutations and B by plain matrix
    mutations, checking after every prefix (the empty one included) that
    folding recovers the matrix and that the certified region carries no
    orbit loop or 2-cycle. B must be square; depth must be at least
    len(seq) + 2 so the frontier budget survives the whole sequence.

    A prefix after which some label has no certified representative left
    cannot be checked at this depth; it is recorded under `unverifiable`
    in the stats, not as a failure, since a deeper truncation resolves it.
    """
    seq = tuple(seq)
    if not B.is_square():
        raise ValueError("covering commutation is checked on square matrices")
    if depth < len(seq) + 2:
        raise ValueError(f"depth {depth} is below len(seq) + 2 = {len(seq) + 2}")
    started = time.perf_counter()
    failures: list[Failure] = []
    unverifiable: list[str] = []
    Q = build_unfolding(B, depth)
    stats: dict = {"cover_vertices": Q.n_vertices}
    M = B
    prefix: tuple[int, ...] = ()

    def check_prefix() -> None:
        shown = tuple(x + 1 for x in prefix)
        if has_orbit_loops(Q) or has_orbit_two_cycles(Q):
            failures.append(
                Failure(shown, "orbit loop or 2-cycle", "none expected",
                        note="obstruction inside the certified region")
            )
            return
        try:
            folded = fold(Q)
        except MissingRepresentativeError as e:
            unverifiable.append(f"fold after {list(shown)}: {e}")
            return
        except IllDefinedFoldingError as e:
            failures.append(Failure(shown, "fold undefined", str(e)))
            return
        if folded != M:
            failures.append(
                Failure(shown, format_matrix(folded), format_matrix(M),
                        note="fold disagrees with the matrix mutation chain")
            )

    check_prefix()
    for label in seq:
        try:
            Q = orbit_mutate(Q, label)
        except _ORBIT_ERRORS as e:
            failures.append(
                Failure(tuple(x + 1 for x in prefix) + (label + 1,),
                        "orbit mutation refused", str(e))
            )
            break
        M = mutate(M, label)
        prefix = prefix + (label,)
        check_prefix()

    stats["certified_final"] = len(Q.certified)
    if unverifiable:
        stats["unverifiable"] = unverifiable
    return VerificationReport(
        theorem="covering-commutation",
        input_matrix=format_matrix(B),
        depth=depth,
        prng_seed=None,
        sequences_tried=1,
        failures=failures,
        elapsed_ms=(time.perf_counter() - started) * 1000.0,
        stats=stats,
    )


def _needed_sets(quivers, seq, targets) -> list[set[int]]:
    """Backward dependency closure of the target vertices.

    need[s] is the set of vertices whose value after s steps feeds some
    target; a vertex mutated at step s pulls in its neighbors at mutation
    time. The sets shrink going forward: need[0] contains them all.
    """
    k = len(seq)
    need: list[set[int]] = [set() for _ in range(k + 1)]
    need[k] = set(targets)
    for s in range(k, 0, -1):
        label = seq[s - 1]
        Qp = quivers[s - 1]
        cur = set(need[s])
        for u in need[s]:
            if Qp.labels[u] == label:
                cur.update(w for w, _ in Qp.rows[u])
        need[s - 1] = cur
    return need


def _product(ring: LaurentRing, factors) -> LaurentPoly:
    acc = ring.one()
    for p, e in factors:
        acc = acc * p**e
    return acc


def _clip(text: str, limit: int = 160) -> str:
    return text if len(text) <= limit else text[: limit - 3] + "..."


def verify_pi_commutation(
    B: ExchangeMatrix,
    seq,
    depth: int,
    *,
    reps_per_class: int = 2,
    max_terms: int | None = None,
) -> VerificationReport:
    """Projection of orbit-mutated cover variables must match the base side.

    A square B gets principal coefficient rows attached; a matrix that
    already has frozen rows is used as given. The base side expands the
    sequence in the base ring. The cover side replays the orbit mutations
    on the unfolded quiver and evaluates only the variables the targets
    depend on: for every exchangeable label the `reps_per_class` lowest
    certified vertex ids are taken as representatives, and each projected
    representative variable must equal the base variable of its label
    (representatives of one class thereby also agree with each other).

    With max_terms set, a step whose predicted term count exceeds it aborts
    the run with a `pruned` entry in the stats instead of a failure; a label
    whose class keeps no certified representative at this depth is likewise
    recorded under `unverifiable` and skipped. Either way the report is an
    incomplete check, not a falsification. Depth must be at least
    len(seq) + 2.
    """
    seq = tuple(seq)
    M = principal_extension(B) if B.is_square() else B
    if depth < len(seq) + 2:
        raise ValueError(f"depth {depth} is below len(seq) + 2 = {len(seq) + 2}")
    started = time.perf_counter()
    failures: list[Failure] = []
    shown = tuple(x + 1 for x in seq)

    embedded = square_embedding(M)
    Q0 = build_unfolding(embedded, depth, frozen_labels=range(M.n, M.n + M.m))
    stats: dict = {"cover_vertices": Q0.n_vertices, "reps_per_class": reps_per_class}

    def report() -> VerificationReport:
        return VerificationReport(
            theorem="pi-commutation",
            input_matrix=format_matrix(M),
            depth=depth,
            prng_seed=None,
            sequences_tried=1,
            failures=failures,
            elapsed_ms=(time.perf_counter() - started) * 1000.0,
            stats=stats,
        )

    quivers = [Q0]
    try:
        for label in seq:
            quivers.append(orbit_mutate(quivers[-1], label))
    except _ORBIT_ERRORS as e:
        failures.append(Failure(shown, "orbit mutation refused", str(e)))
        return report()
    stats["certified_final"] = len(quivers[-1].certified)

    # A representative's variable freezes after its class's last mutation, so
    # it must be certified just before that step: its row is exact there and
    # the erosion rule forces every neighbor feeding the exchange to have
    # been certified one step earlier, recursively. Untouched labels keep
    # their initial variables and only need a vertex at all.
    last_step = {label: s for s, label in enumerate(seq, start=1)}
    targets: dict[int, tuple[int, ...]] = {}
    unverifiable: list[str] = []
    for lab in range(M.n):
        cert = quivers[last_step.get(lab, 1) - 1].certified
        members = [u for u in sorted(cert) if Q0.labels[u] == lab]
        if not members:
            unverifiable.append(
                f"label {lab + 1} has no certified representative at this depth"
            )
            continue
        targets[lab] = tuple(members[:reps_per_class])
    if unverifiable:
        stats["unverifiable"] = unverifiable
    if not targets:
        return report()

    base0 = initial_seed(M)
    try:
        base_final = expand(base0, seq, max_terms=max_terms)
    except ExpansionBudgetError as e:
        stats["pruned"] = [
            f"base step after {[x + 1 for x in e.history]} predicts "
            f"up to {e.predicted_terms} terms > {e.limit}"
        ]
        return report()

    target_set = set().union(*targets.values())
    need = _needed_sets(quivers, seq, target_set)
    ring, order, position = _ring_over(Q0, need[0])
    stats["carried_vertices"] = len(order)
    values = {u: ring.variable(position[u]) for u in order}

    for s, label in enumerate(seq, start=1):
        Qp = quivers[s - 1]
        updates: dict[int, LaurentPoly] = {}
        for u in sorted(need[s]):
            if Qp.labels[u] != label:
                continue
            pos_factors: list[tuple[LaurentPoly, int]] = []
            neg_factors: list[tuple[LaurentPoly, int]] = []
            for t, mult in Qp.rows[u]:
                if mult < 0:
                    pos_factors.append((values[t], -mult))
                elif mult > 0:
                    neg_factors.append((values[t], mult))
            if max_terms is not None:
                bound = product_term_bound(pos_factors, ring.n_vars)
                bound += product_term_bound(neg_factors, ring.n_vars)
                if bound > max_terms:
                    stats["pruned"] = [
                        f"cover step after {[x + 1 for x in seq[: s - 1]]} predicts "
                        f"up to {bound} terms > {max_terms}"
                    ]
                    return report()
            numerator = _product(ring, pos_factors) + _product(ring, neg_factors)
            updates[u] = numerator.exact_div(values[u])
        # variables of class members outside the dependency cone go stale
        for u in [v for v in values if Qp.labels[v] == label and v not in updates]:
            del values[u]
        values.update(updates)

    slot_labels = tuple(Q0.labels[u] for u in order)
    for lab in sorted(targets):
        want = base_final.cluster[lab]
        for a in targets[lab]:
            got = _project(values[a], base0.ring, slot_labels)
            if got != want:
                failures.append(
                    Failure(
                        shown,
                        _clip(format_poly(got)),
                        _clip(format_poly(want)),
                        note=(f"label {lab + 1}, representative vertex {a}: "
                              f"{len(got.terms)} vs {len(want.terms)} terms"),
                    )
                )
    return report()
