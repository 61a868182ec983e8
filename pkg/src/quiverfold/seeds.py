"""Seeds and cluster-variable expansion over an initial seed.

A seed pairs an extended exchange matrix with one Laurent polynomial per
exchangeable direction (the cluster) and one monomial per frozen row (the
coefficients). Mutation replaces a single cluster entry through the exchange
relation; the division step is exact whenever the input data is consistent,
and raises InexactDivisionError otherwise.
"""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass

from .laurent import InexactDivisionError, LaurentPoly, LaurentRing, format_poly
from .matrices import ExchangeMatrix, format_matrix, mutate, principal_extension
from .reports import Failure, VerificationReport

__all__ = [
    "Seed",
    "ExpansionBudgetError",
    "initial_seed",
    "mutate_seed",
    "expansion_bound",
    "product_term_bound",
    "expand",
    "f_polynomial",
    "find_negative_term",
    "laurent_in_cluster",
    "iter_seeds",
    "verify_positivity",
    "verify_fpolynomials",
    "verify_laurent_adjacent",
]

_BOUND_CAP = 10**18


class ExpansionBudgetError(RuntimeError):
    """An exchange step was refused because its result provably exceeds a
    term budget.

    Matrix entries can grow doubly exponentially along mutation sequences,
    and the exchange numerator raises cluster entries to those entries as
    powers, so some sequences are not materializable at any scale. The
    predicted count is an upper bound (capped at 10**18); the step itself
    was never started.
    """

    def __init__(self, direction: int, predicted_terms: int, limit: int,
                 history: tuple[int, ...]):
        self.direction = direction
        self.predicted_terms = predicted_terms
        self.limit = limit
        self.history = history
        super().__init__(
            f"exchange in direction {direction} after {list(history)} predicts "
            f"up to {predicted_terms} terms, over the budget of {limit}"
        )


@dataclass(frozen=True)
class Seed:
    matrix: ExchangeMatrix
    cluster: tuple[LaurentPoly, ...]
    coefficients: tuple[LaurentPoly, ...]
    ring: LaurentRing
    history: tuple[int, ...] = ()

    @property
    def extended_cluster(self) -> tuple[LaurentPoly, ...]:
        return self.cluster + self.coefficients

    def variable(self, t: int) -> LaurentPoly:
        """Entry t of the extended cluster (frozen rows come after)."""
        return self.extended_cluster[t]


def initial_seed(matrix: ExchangeMatrix, invert_coeffs: bool = False) -> Seed:
    """Seed whose cluster entries are the variables themselves."""
    ring = LaurentRing(matrix.row_labels, matrix.n, invert_frozen=invert_coeffs)
    cluster = tuple(ring.variable(i) for i in range(matrix.n))
    coeffs = tuple(ring.variable(matrix.n + j) for j in range(matrix.m))
    return Seed(matrix, cluster, coeffs, ring)


def product_term_bound(factors: list[tuple[LaurentPoly, int]], width: int) -> int:
    """Upper bound on the distinct monomials of prod poly**exp.

    Minimum of the multiset-coefficient bound (each factor power contributes
    at most C(e + t - 1, t - 1) monomials) and a bounding-box count over the
    exponent ranges. Both are sound: a product's support injects into the
    Minkowski sum of its factors' supports. Capped at 10**18.
    """
    binom = 1
    for p, e in factors:
        t = len(p.terms)
        if t > 1:
            binom *= math.comb(e + t - 1, t - 1)
            if binom > _BOUND_CAP:
                binom = _BOUND_CAP
                break
    spans = [0] * width
    for p, e in factors:
        if len(p.terms) <= 1:
            continue
        for d in range(width):
            vals = [exps[d] for exps in p.terms]
            spans[d] += e * (max(vals) - min(vals))
    box = 1
    for s in spans:
        box *= s + 1
        if box > _BOUND_CAP:
            box = _BOUND_CAP
            break
    return min(binom, box)


def expansion_bound(seed: Seed, k: int) -> int:
    """Upper bound on the term count of the exchange numerator in direction k."""
    B = seed.matrix
    pos: list[tuple[LaurentPoly, int]] = []
    neg: list[tuple[LaurentPoly, int]] = []
    for t in range(B.n + B.m):
        e = B.entries[t][k]
        if e > 0:
            pos.append((seed.variable(t), e))
        elif e < 0:
            neg.append((seed.variable(t), -e))
    width = len(seed.ring.names)
    total = product_term_bound(pos, width) + product_term_bound(neg, width)
    return min(total, _BOUND_CAP)


def mutate_seed(seed: Seed, k: int, *, max_terms: int | None = None) -> Seed:
    """Exchange in direction k.

    The replacement is (prod of in-arrows + prod of out-arrows) divided by
    the old entry, products taken over the extended cluster with the column-k
    entries as exponents. With max_terms set, a step whose numerator bound
    exceeds it raises ExpansionBudgetError before any work is done; bounding
    the result also bounds every intermediate product, so admitted steps stay
    within a proportional amount of work.
    """
    B = seed.matrix
    if not 0 <= k < B.n:
        raise IndexError(f"direction {k} outside 0..{B.n - 1}")
    if max_terms is not None:
        predicted = expansion_bound(seed, k)
        if predicted > max_terms:
            raise ExpansionBudgetError(k, predicted, max_terms, seed.history)
    pos = seed.ring.one()
    neg = seed.ring.one()
    for t in range(B.n + B.m):
        e = B.entries[t][k]
        if e > 0:
            pos = pos * seed.variable(t) ** e
        elif e < 0:
            neg = neg * seed.variable(t) ** (-e)
    new_entry = (pos + neg).exact_div(seed.cluster[k])
    cluster = tuple(
        new_entry if i == k else v for i, v in enumerate(seed.cluster)
    )
    return Seed(mutate(B, k), cluster, seed.coefficients, seed.ring, seed.history + (k,))


def expand(seed: Seed, sequence, *, max_terms: int | None = None) -> Seed:
    """Apply a mutation sequence; every entry stays Laurent in the initial seed."""
    for k in sequence:
        seed = mutate_seed(seed, k, max_terms=max_terms)
    return seed


def f_polynomial(v: LaurentPoly) -> LaurentPoly:
    """Specialize every exchangeable variable to 1.

    For a variable expanded over a principal-coefficient initial seed this is
    its F-polynomial: a polynomial in the frozen block alone.
    """
    ring = v.ring
    y_ring = LaurentRing(ring.names[ring.n_exchangeable :], 0, ring.invert_frozen)
    out: dict = {}
    for exps, coeff in v.terms.items():
        key = exps[ring.n_exchangeable :]
        c = out.get(key, 0) + coeff
        if c:
            out[key] = c
        else:
            out.pop(key, None)
    return LaurentPoly(y_ring, out)


def find_negative_term(v: LaurentPoly) -> tuple[int, str] | None:
    """A witness (coefficient, monomial) with negative coefficient, if any."""
    for exps in sorted(v.terms):
        coeff = v.terms[exps]
        if coeff < 0:
            witness = format_poly(v.ring.monomial(exps, 1))
            return coeff, witness
    return None


def laurent_in_cluster(v: LaurentPoly, seed: Seed) -> bool:
    """Does v lie in ZZ[coeffs][cluster-of-seed, inverted]?

    Supported seeds: the initial seed, and seeds whose cluster differs from
    the initial one in exactly one slot k with cluster[k] * x_k free of x_k
    (every seed one mutation away has this shape). Membership is decided by
    iterated exact division of the x_k-denominator slices of v by that
    exchange numerator. Other seeds raise ValueError.
    """
    ring = seed.ring
    if v.ring != ring:
        raise ValueError("mixed rings")
    diffs = [
        i for i in range(seed.matrix.n) if seed.cluster[i] != ring.variable(i)
    ]
    if not diffs:
        return True
    if len(diffs) > 1:
        raise ValueError(
            "membership is implemented for the initial seed and seeds "
            "differing from it in one cluster slot"
        )
    k = diffs[0]
    exchange_num = seed.cluster[k] * ring.variable(k)
    if any(exps[k] != 0 for exps in exchange_num.terms):
        raise ValueError("cluster entry does not have an x_k exchange shape")
    # slice v by the exponent of x_k
    slices: dict[int, dict] = {}
    for exps, coeff in v.terms.items():
        rest = exps[:k] + (0,) + exps[k + 1 :]
        slices.setdefault(exps[k], {})[rest] = coeff
    free = LaurentRing(ring.names, ring.n_exchangeable, invert_frozen=True)
    for j, terms in slices.items():
        if j >= 0:
            continue
        numerator = LaurentPoly(free, terms)
        try:
            quotient = numerator.exact_div(LaurentPoly(free, (exchange_num ** (-j)).terms))
        except InexactDivisionError:
            return False
        if not ring.invert_frozen:
            for exps in quotient.terms:
                if any(e < 0 for e in exps[ring.n_exchangeable :]):
                    return False
    return True


def iter_seeds(
    seed: Seed,
    max_len: int,
    skip_backtracking: bool = True,
    *,
    max_terms: int | None = None,
    pruned: list | None = None,
):
    """Breadth-first walk of mutation sequences up to max_len.

    Yields (sequence, seed) pairs, the empty sequence first. Immediate
    repeats undo themselves, so skipping them loses no cluster variables;
    pass skip_backtracking=False to enumerate literally every sequence.
    With max_terms set, over-budget branches are cut: the refused step is
    appended to `pruned` (if given) as (sequence, predicted_terms, limit)
    and none of its descendants are visited.
    """
    frontier = [((), seed)]
    yield (), seed
    for _ in range(max_len):
        nxt = []
        for seq, s in frontier:
            for k in range(s.matrix.n):
                if skip_backtracking and seq and seq[-1] == k:
                    continue
                try:
                    child = mutate_seed(s, k, max_terms=max_terms)
                except ExpansionBudgetError as e:
                    if pruned is not None:
                        pruned.append((seq + (k,), e.predicted_terms, e.limit))
                    continue
                item = (seq + (k,), child)
                nxt.append(item)
                yield item
        frontier = nxt


def _as_principal(B: ExchangeMatrix) -> ExchangeMatrix:
    return principal_extension(B) if B.is_square() else B


def _prune_note(seq: tuple[int, ...], predicted: int, limit: int) -> str:
    shown = " ".join(str(d + 1) for d in seq)
    return f"seq [{shown}] predicts up to {predicted} terms > {limit}"


def _random_sequences(rng: random.Random, n: int, trials: int, max_len: int):
    out = []
    for _ in range(trials):
        length = rng.randint(1, max_len)
        seq = []
        for _ in range(length):
            k = rng.randrange(n)
            while seq and n > 1 and k == seq[-1]:
                k = rng.randrange(n)
            seq.append(k)
        out.append(tuple(seq))
    return out


def verify_positivity(
    B: ExchangeMatrix,
    *,
    exhaustive_len: int = 4,
    max_len: int = 6,
    trials: int = 50,
    prng_seed: int = 0,
    max_terms: int | None = None,
) -> VerificationReport:
    """Every coefficient of every reachable cluster variable is positive.

    Square input is given principal coefficients first. Sequences of length
    up to exhaustive_len are enumerated without backtracking; `trials`
    further random sequences of length up to max_len are sampled. Branches
    refused by the max_terms budget are listed under stats["pruned"]; a
    report with pruned branches is an incomplete sweep even when it has no
    failures.
    """
    start = time.perf_counter()
    matrix = _as_principal(B)
    seed0 = initial_seed(matrix)
    rng = random.Random(prng_seed)
    failures: list[Failure] = []
    pruned: list = []
    checked = 0

    def check(seq, s):
        nonlocal checked
        for v in s.cluster:
            checked += 1
            witness = find_negative_term(v)
            if witness is not None:
                coeff, mono = witness
                failures.append(
                    Failure(
                        sequence=tuple(d + 1 for d in seq),
                        lhs=f"{coeff}*{mono}",
                        rhs="coefficient >= 0",
                        note="negative coefficient",
                    )
                )
                return

    tried = 0
    for seq, s in iter_seeds(seed0, exhaustive_len, max_terms=max_terms, pruned=pruned):
        tried += 1
        check(seq, s)
    for seq in _random_sequences(rng, matrix.n, trials, max_len):
        tried += 1
        try:
            check(seq, expand(seed0, seq, max_terms=max_terms))
        except ExpansionBudgetError as e:
            pruned.append((e.history + (e.direction,), e.predicted_terms, e.limit))
    stats: dict = {"variables_checked": checked}
    if pruned:
        stats["pruned_count"] = len(pruned)
        stats["pruned"] = [_prune_note(*p) for p in pruned]
    return VerificationReport(
        theorem="positivity",
        input_matrix=format_matrix(B),
        depth=None,
        prng_seed=prng_seed,
        sequences_tried=tried,
        failures=failures,
        elapsed_ms=(time.perf_counter() - start) * 1000.0,
        stats=stats,
    )


def verify_fpolynomials(
    B: ExchangeMatrix,
    *,
    exhaustive_len: int = 4,
    max_len: int = 6,
    trials: int = 50,
    prng_seed: int = 0,
    max_terms: int | None = None,
) -> VerificationReport:
    """Every F-polynomial has constant term exactly 1.

    Also records, without asserting, how many F-polynomials have a unique
    monomial of maximal total degree, and lists the distinct F-polynomials
    when there are at most twelve of them. Budget handling matches
    verify_positivity.
    """
    start = time.perf_counter()
    matrix = _as_principal(B)
    seed0 = initial_seed(matrix)
    rng = random.Random(prng_seed)
    failures: list[Failure] = []
    pruned: list = []
    checked = 0
    unique_max = 0
    distinct: set[str] = set()

    def check(seq, s):
        nonlocal checked, unique_max
        for v in s.cluster:
            f = f_polynomial(v)
            checked += 1
            if len(distinct) <= 12:
                distinct.add(format_poly(f))
            top = f.total_degree()
            if top is not None:
                if sum(1 for e in f.terms if sum(e) == top) == 1:
                    unique_max += 1
            if f.constant_term() != 1:
                failures.append(
                    Failure(
                        sequence=tuple(d + 1 for d in seq),
                        lhs=str(f.constant_term()),
                        rhs="1",
                        note=f"constant term of {format_poly(f)}",
                    )
                )
                return

    tried = 0
    for seq, s in iter_seeds(seed0, exhaustive_len, max_terms=max_terms, pruned=pruned):
        tried += 1
        check(seq, s)
    for seq in _random_sequences(rng, matrix.n, trials, max_len):
        tried += 1
        try:
            check(seq, expand(seed0, seq, max_terms=max_terms))
        except ExpansionBudgetError as e:
            pruned.append((e.history + (e.direction,), e.predicted_terms, e.limit))
    stats: dict = {"fpolynomials_checked": checked, "unique_max_degree": unique_max}
    if len(distinct) <= 12:
        stats["fpolynomial_sample"] = sorted(distinct)
    if pruned:
        stats["pruned_count"] = len(pruned)
        stats["pruned"] = [_prune_note(*p) for p in pruned]
    return VerificationReport(
        theorem="f-polynomial-constant-term",
        input_matrix=format_matrix(B),
        depth=None,
        prng_seed=prng_seed,
        sequences_tried=tried,
        failures=failures,
        elapsed_ms=(time.perf_counter() - start) * 1000.0,
        stats=stats,
    )


def verify_laurent_adjacent(
    B: ExchangeMatrix,
    *,
    exhaustive_len: int = 3,
    max_len: int = 5,
    trials: int = 20,
    prng_seed: int = 0,
    invert_coeffs: bool = False,
    max_terms: int | None = None,
) -> VerificationReport:
    """Reachable variables are Laurent over the initial seed and each seed
    one mutation away from it. Budget handling matches verify_positivity."""
    start = time.perf_counter()
    matrix = _as_principal(B)
    seed0 = initial_seed(matrix, invert_coeffs=invert_coeffs)
    rng = random.Random(prng_seed)
    reference = [seed0] + [mutate_seed(seed0, k) for k in range(matrix.n)]
    failures: list[Failure] = []
    pruned: list = []
    seen: dict = {}

    tried = 0
    for seq, s in iter_seeds(seed0, exhaustive_len, max_terms=max_terms, pruned=pruned):
        tried += 1
        for v in s.cluster:
            seen.setdefault(v, tuple(d + 1 for d in seq))
    for seq in _random_sequences(rng, matrix.n, trials, max_len):
        tried += 1
        try:
            s = expand(seed0, seq, max_terms=max_terms)
        except ExpansionBudgetError as e:
            pruned.append((e.history + (e.direction,), e.predicted_terms, e.limit))
            continue
        for v in s.cluster:
            seen.setdefault(v, tuple(d + 1 for d in seq))
    for v, seq in seen.items():
        for idx, ref in enumerate(reference):
            if not laurent_in_cluster(v, ref):
                failures.append(
                    Failure(
                        sequence=seq,
                        lhs=format_poly(v),
                        rhs=f"Laurent over adjacent seed {idx}",
                        note="membership failed",
                    )
                )
    stats: dict = {"distinct_variables": len(seen)}
    if pruned:
        stats["pruned_count"] = len(pruned)
        stats["pruned"] = [_prune_note(*p) for p in pruned]
    return VerificationReport(
        theorem="laurent-adjacent",
        input_matrix=format_matrix(B),
        depth=None,
        prng_seed=prng_seed,
        sequences_tried=tried,
        failures=failures,
        elapsed_ms=(time.perf_counter() - start) * 1000.0,
        stats=stats,
    )
