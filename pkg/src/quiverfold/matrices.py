"""Exact integer exchange matrices and their structural predicates.

An extended exchange matrix has shape (n+m) x n: n exchangeable directions
(the square principal part) plus m frozen rows. All arithmetic is exact over
Python integers. Matrices are immutable; mutation returns a new matrix.
Indices are 0-based throughout the API.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm

from .reports import Failure, VerificationReport

__all__ = [
    "ExchangeMatrix",
    "Digraph",
    "mutate",
    "is_sign_skew_symmetric",
    "is_skew_symmetrizable",
    "sign_digraph",
    "is_acyclic",
    "is_connected",
    "principal_extension",
    "fuzz_totality",
    "format_matrix",
    "parse_matrix",
    "MatrixFormatError",
    "random_sign_skew_symmetric",
    "random_acyclic_connected",
]


def _default_row_labels(n: int, m: int) -> tuple[str, ...]:
    return tuple(f"x{i + 1}" for i in range(n)) + tuple(f"y{j + 1}" for j in range(m))


@dataclass(frozen=True, eq=False)
class ExchangeMatrix:
    """Immutable (n+m) x n integer matrix with optional row labels.

    Equality compares shape and entries only; labels are display metadata.
    """

    entries: tuple[tuple[int, ...], ...]
    n: int
    m: int
    row_labels: tuple[str, ...]

    def __init__(self, rows, row_labels=None):
        rows = tuple(tuple(r) for r in rows)
        if not rows or not rows[0]:
            raise ValueError("matrix must be non-empty")
        n = len(rows[0])
        if any(len(r) != n for r in rows):
            raise ValueError("ragged rows")
        if len(rows) < n:
            raise ValueError(f"need at least {n} rows for {n} columns")
        for r in rows:
            for e in r:
                if not isinstance(e, int) or isinstance(e, bool):
                    raise ValueError(f"non-integer entry {e!r}")
        m = len(rows) - n
        if row_labels is None:
            row_labels = _default_row_labels(n, m)
        else:
            row_labels = tuple(row_labels)
            if len(row_labels) != n + m:
                raise ValueError("need one label per row")
            for lab in row_labels:
                if not lab or any(c.isspace() for c in lab):
                    raise ValueError(f"bad label {lab!r}")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "row_labels", row_labels)

    @property
    def col_labels(self) -> tuple[str, ...]:
        return self.row_labels[: self.n]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    def principal_part(self) -> tuple[tuple[int, ...], ...]:
        return self.entries[: self.n]

    def is_square(self) -> bool:
        return self.m == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExchangeMatrix):
            return NotImplemented
        return self.n == other.n and self.m == other.m and self.entries == other.entries

    def __hash__(self) -> int:
        return hash((self.n, self.m, self.entries))

    def __repr__(self) -> str:
        rows = "; ".join(" ".join(str(e) for e in r) for r in self.entries)
        return f"ExchangeMatrix({self.n}+{self.m}x{self.n}: {rows})"

    def __str__(self) -> str:
        return format_matrix(self)


def mutate(B: ExchangeMatrix, k: int) -> ExchangeMatrix:
    """Mutation in direction k: entries incident to k flip sign, the rest
    gain (|a_jk'| a_k'c + a_jk' |a_k'c|) / 2 with k' = k. The halving is
    always exact because the two summands agree in parity.
    """
    if not 0 <= k < B.n:
        raise IndexError(f"direction {k} outside 0..{B.n - 1}")
    old = B.entries
    new_rows = []
    for j in range(B.n + B.m):
        ajk = old[j][k]
        row = []
        for c in range(B.n):
            if j == k or c == k:
                row.append(-old[j][c])
            else:
                num = abs(ajk) * old[k][c] + ajk * abs(old[k][c])
                assert num % 2 == 0
                row.append(old[j][c] + num // 2)
        new_rows.append(row)
    return ExchangeMatrix(new_rows, row_labels=B.row_labels)


def is_sign_skew_symmetric(B: ExchangeMatrix) -> bool:
    """True iff every principal pair satisfies a_ij = a_ji = 0 or a_ij a_ji < 0."""
    p = B.principal_part()
    n = B.n
    for i in range(n):
        if p[i][i] != 0:
            return False
        for j in range(i + 1, n):
            a, b = p[i][j], p[j][i]
            if not ((a == 0 and b == 0) or a * b < 0):
                return False
    return True


def is_skew_symmetrizable(B: ExchangeMatrix) -> tuple[int, ...] | None:
    """Least positive integer diagonal D with d_i a_ij = -d_j a_ji, or None.

    Ratios d_j / d_i = |a_ij| / |a_ji| are propagated over each connected
    component of the constraint graph, then every pair is checked and each
    component is scaled to the least positive integers.
    """
    p = B.principal_part()
    n = B.n
    for i in range(n):
        for j in range(n):
            if (p[i][j] == 0) != (p[j][i] == 0):
                return None  # d_i a_ij = 0 forces d_j a_ji = 0, impossible
    d: list[Fraction | None] = [None] * n
    for root in range(n):
        if d[root] is not None:
            continue
        d[root] = Fraction(1)
        stack = [root]
        while stack:
            i = stack.pop()
            for j in range(n):
                if p[i][j] != 0 and d[j] is None:
                    d[j] = d[i] * Fraction(abs(p[i][j]), abs(p[j][i]))
                    stack.append(j)
    for i in range(n):
        for j in range(n):
            if d[i] * p[i][j] != -d[j] * p[j][i]:
                return None
    # minimal positive integers, componentwise
    comp = _constraint_components(p, n)
    out = [0] * n
    for members in comp:
        scale = lcm(*(d[i].denominator for i in members))
        ints = [int(d[i] * scale) for i in members]
        g = gcd(*ints)
        for i, v in zip(members, ints):
            out[i] = v // g
    return tuple(out)


def _constraint_components(p, n) -> list[list[int]]:
    seen = [False] * n
    comps = []
    for root in range(n):
        if seen[root]:
            continue
        members = []
        stack = [root]
        seen[root] = True
        while stack:
            i = stack.pop()
            members.append(i)
            for j in range(n):
                if p[i][j] != 0 and not seen[j]:
                    seen[j] = True
                    stack.append(j)
        comps.append(sorted(members))
    return comps


@dataclass(frozen=True)
class Digraph:
    """Simple digraph on vertices 0..n-1 with an edge set."""

    n: int
    edges: frozenset[tuple[int, int]]

    def out_edges(self, u: int) -> list[int]:
        return sorted(v for (a, v) in self.edges if a == u)

    def find_cycle(self) -> list[int] | None:
        """A directed cycle as a vertex list, or None."""
        succ: dict[int, list[int]] = {u: [] for u in range(self.n)}
        for a, b in self.edges:
            succ[a].append(b)
        color = [0] * self.n  # 0 new, 1 active, 2 done
        parent: dict[int, int] = {}
        for start in range(self.n):
            if color[start]:
                continue
            stack = [(start, iter(succ[start]))]
            color[start] = 1
            while stack:
                u, it = stack[-1]
                advanced = False
                for v in it:
                    if color[v] == 0:
                        color[v] = 1
                        parent[v] = u
                        stack.append((v, iter(succ[v])))
                        advanced = True
                        break
                    if color[v] == 1:
                        cycle = [u]
                        w = u
                        while w != v:
                            w = parent[w]
                            cycle.append(w)
                        cycle.reverse()
                        return cycle
                if not advanced:
                    color[u] = 2
                    stack.pop()
        return None

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None

    def undirected_components(self) -> list[list[int]]:
        nbr: dict[int, set[int]] = {u: set() for u in range(self.n)}
        for a, b in self.edges:
            nbr[a].add(b)
            nbr[b].add(a)
        seen = [False] * self.n
        comps = []
        for root in range(self.n):
            if seen[root]:
                continue
            seen[root] = True
            comp = [root]
            stack = [root]
            while stack:
                u = stack.pop()
                for v in nbr[u]:
                    if not seen[v]:
                        seen[v] = True
                        comp.append(v)
                        stack.append(v)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return len(self.undirected_components()) == 1


def sign_digraph(B: ExchangeMatrix) -> Digraph:
    """The sign pattern of the principal part: edge i -> j iff a_ij > 0."""
    if not is_sign_skew_symmetric(B):
        raise ValueError("matrix is not sign-skew-symmetric")
    p = B.principal_part()
    edges = frozenset(
        (i, j) for i in range(B.n) for j in range(B.n) if p[i][j] > 0
    )
    return Digraph(B.n, edges)


def is_acyclic(B: ExchangeMatrix) -> bool:
    return sign_digraph(B).is_acyclic()


def is_connected(B: ExchangeMatrix) -> bool:
    return sign_digraph(B).is_connected()


def principal_extension(B: ExchangeMatrix) -> ExchangeMatrix:
    """Stack an identity block under a square matrix; frozen rows y1..yn."""
    if not B.is_square():
        raise ValueError("matrix already has frozen rows")
    n = B.n
    rows = list(B.entries) + [
        tuple(1 if j == i else 0 for j in range(n)) for i in range(n)
    ]
    labels = B.row_labels + tuple(f"y{i + 1}" for i in range(n))
    return ExchangeMatrix(rows, row_labels=labels)


def fuzz_totality(
    B: ExchangeMatrix, max_len: int, trials: int, prng_seed: int
) -> VerificationReport:
    """Random mutation sequences; checks sign-skew-symmetry after each step.

    Any violation is recorded with the witness prefix (1-based) and the
    offending matrix.
    """
    start = time.perf_counter()
    rng = random.Random(prng_seed)
    failures: list[Failure] = []
    for _ in range(trials):
        length = rng.randint(1, max_len)
        seq = [rng.randrange(B.n) for _ in range(length)]
        cur = B
        for t in range(length):
            cur = mutate(cur, seq[t])
            if not is_sign_skew_symmetric(cur):
                failures.append(
                    Failure(
                        sequence=tuple(s + 1 for s in seq[: t + 1]),
                        lhs=format_matrix(cur).strip(),
                        rhs="sign-skew-symmetric",
                        note="totality violated",
                    )
                )
                break
    return VerificationReport(
        theorem="totality",
        input_matrix=format_matrix(B),
        depth=None,
        prng_seed=prng_seed,
        sequences_tried=trials,
        failures=failures,
        elapsed_ms=(time.perf_counter() - start) * 1000.0,
    )


class MatrixFormatError(ValueError):
    pass


def format_matrix(B: ExchangeMatrix) -> str:
    """Canonical text form: header "n m", n+m rows, then a labels line."""
    lines = [f"{B.n} {B.m}"]
    width = max(len(str(e)) for row in B.entries for e in row)
    for row in B.entries:
        lines.append(" ".join(str(e).rjust(width) for e in row))
    lines.append("labels: " + " ".join(B.row_labels))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> ExchangeMatrix:
    """Parse the matrix text format.

    Line 1 is "n m"; the next n+m lines hold n integers each. Blank lines
    and "#" comments are skipped. An optional "labels:" line names the rows.
    """
    rows: list[tuple[int, ...]] = []
    labels: tuple[str, ...] | None = None
    header: tuple[int, int] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("labels:"):
            if labels is not None:
                raise MatrixFormatError(f"line {lineno}: duplicate labels line")
            labels = tuple(line[len("labels:") :].split())
            continue
        try:
            values = tuple(int(tok) for tok in line.split())
        except ValueError as exc:
            raise MatrixFormatError(f"line {lineno}: {exc}") from None
        if header is None:
            if len(values) != 2:
                raise MatrixFormatError(f"line {lineno}: header must be 'n m'")
            header = (values[0], values[1])
            if header[0] < 1 or header[1] < 0:
                raise MatrixFormatError(f"line {lineno}: bad dimensions {header}")
            continue
        if len(values) != header[0]:
            raise MatrixFormatError(
                f"line {lineno}: expected {header[0]} entries, got {len(values)}"
            )
        rows.append(values)
    if header is None:
        raise MatrixFormatError("empty input")
    n, m = header
    if len(rows) != n + m:
        raise MatrixFormatError(f"expected {n + m} rows, got {len(rows)}")
    try:
        return ExchangeMatrix(rows, row_labels=labels)
    except ValueError as exc:
        raise MatrixFormatError(str(exc)) from None


def random_sign_skew_symmetric(
    rng: random.Random, n: int, max_entry: int, zero_prob: float = 0.3
) -> ExchangeMatrix:
    """Random square sign-skew-symmetric matrix with |entries| <= max_entry."""
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < zero_prob:
                continue
            a = rng.randint(1, max_entry)
            b = rng.randint(1, max_entry)
            if rng.random() < 0.5:
                rows[i][j], rows[j][i] = a, -b
            else:
                rows[i][j], rows[j][i] = -a, b
    return ExchangeMatrix(rows)


def random_acyclic_connected(
    rng: random.Random, n: int, max_entry: int, extra_edge_prob: float = 0.3
) -> ExchangeMatrix:
    """Random acyclic connected sign-skew-symmetric matrix.

    A random recursive tree guarantees connectivity; every edge is oriented
    along a random vertex order, which forces the sign digraph acyclic.
    Entry magnitudes are between 1 and max_entry.
    """
    order = list(range(n))
    rng.shuffle(order)
    rank = {v: i for i, v in enumerate(order)}
    rows = [[0] * n for _ in range(n)]

    def put_edge(u: int, v: int) -> None:
        if rank[u] > rank[v]:
            u, v = v, u
        rows[u][v] = rng.randint(1, max_entry)
        rows[v][u] = -rng.randint(1, max_entry)

    for idx in range(1, n):
        put_edge(order[idx], order[rng.randrange(idx)])
    for i in range(n):
        for j in range(i + 1, n):
            if rows[i][j] == 0 and rows[j][i] == 0 and rng.random() < extra_edge_prob:
                put_edge(i, j)
    return ExchangeMatrix(rows)
