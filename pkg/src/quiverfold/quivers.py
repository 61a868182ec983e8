"""Finite truncations of the covering quiver, orbit mutation, and folding.

An acyclic connected sign-skew-symmetric matrix B unfolds into a labeled
quiver: start from the star of label 1 and keep gluing fresh stars onto
every vertex whose neighborhood is still missing arrows. The full object is
usually infinite; this module builds the first `depth` gluing generations
and tracks which vertices still faithfully model the infinite quiver after
orbit mutations (the certified set). Folding sums arrows over label classes
and recovers an exchange matrix.

Vertex ids are dense 0-based integers; labels are 0-based internally and
1-based in every textual format.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .matrices import ExchangeMatrix, is_acyclic, is_connected, is_sign_skew_symmetric

__all__ = [
    "LabeledQuiver",
    "NotAcyclicError",
    "NotConnectedError",
    "FrontierExhaustedError",
    "OrbitLoopError",
    "OrbitTwoCycleError",
    "IllDefinedFoldingError",
    "MissingRepresentativeError",
    "SnapshotFormatError",
    "local_quiver",
    "build_unfolding",
    "orbit_mutate",
    "vertex_mutation_rows",
    "has_orbit_loops",
    "has_orbit_two_cycles",
    "fold",
    "to_dot",
    "write_snapshot",
    "read_snapshot",
]


class NotAcyclicError(ValueError):
    """The sign digraph of the input matrix has a directed cycle."""


class NotConnectedError(ValueError):
    """The sign digraph of the input matrix is not connected."""


class FrontierExhaustedError(RuntimeError):
    """No frontier budget remains; a further orbit mutation could read
    arrows the truncation no longer models faithfully."""


class OrbitLoopError(RuntimeError):
    """An arrow joins two vertices of the mutated label class."""

    def __init__(self, label: int, arrow: tuple[int, int]):
        self.label = label
        self.arrow = arrow
        super().__init__(
            f"arrow {arrow[0]}->{arrow[1]} inside label class {label + 1}"
        )


class OrbitTwoCycleError(RuntimeError):
    """Arrows u -> w -> v with u, v in the mutated class and w outside."""

    def __init__(self, label: int, path: tuple[int, int, int]):
        self.label = label
        self.path = path
        u, w, v = path
        super().__init__(
            f"arrows {u}->{w}->{v} re-enter label class {label + 1}"
        )


class IllDefinedFoldingError(RuntimeError):
    """Folding has no consistent value: an orbit loop or two-cycle is
    present, a label has no certified representative, or two
    representatives disagree."""


class MissingRepresentativeError(IllDefinedFoldingError):
    """A label class has no certified representative left.

    Unlike its parent this is not evidence against the folded matrix being
    well defined; it means the finite truncation is too shallow to certify
    a representative after the mutations performed so far. Deeper
    truncations make it go away.
    """

    def __init__(self, label: int):
        self.label = label
        super().__init__(f"label {label + 1} has no certified representative")


class SnapshotFormatError(ValueError):
    """Malformed quiver snapshot text."""


Rows = tuple[tuple[tuple[int, int], ...], ...]


@dataclass(frozen=True)
class LabeledQuiver:
    """A finite labeled quiver carried as a skew-symmetric sparse matrix.

    rows[u] lists (v, b_uv) for every nonzero entry, sorted by v; b_uv > 0
    means b_uv arrows u -> v. `certified` holds the vertices whose stored
    neighborhoods still agree with the infinite quiver; `frontier_margin`
    is the remaining orbit-mutation budget (None when the quiver is finite
    and exact, so mutations never exhaust it).
    """

    labels: tuple[int, ...]
    depths: tuple[int, ...]
    rows: Rows
    n_labels: int
    frozen_labels: frozenset[int] = field(default_factory=frozenset)
    frontier_margin: int | None = None
    certified: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if len(self.labels) != len(self.depths) or len(self.labels) != len(self.rows):
            raise ValueError("labels, depths and rows must have equal length")
        for lab in self.labels:
            if not 0 <= lab < self.n_labels:
                raise ValueError(f"label {lab} outside 0..{self.n_labels - 1}")
        for u, row in enumerate(self.rows):
            for v, mult in row:
                if mult == 0 or not 0 <= v < len(self.rows):
                    raise ValueError(f"bad arrow entry {u}->{v} ({mult})")
                if self.arrow(v, u) != -mult:
                    raise ValueError(f"rows are not skew-symmetric at ({u}, {v})")
        for lab in self.frozen_labels:
            if not 0 <= lab < self.n_labels:
                raise ValueError(f"frozen label {lab} outside 0..{self.n_labels - 1}")

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    def arrow(self, u: int, v: int) -> int:
        for w, mult in self.rows[u]:
            if w == v:
                return mult
        return 0

    def iter_arrows(self):
        """Positive entries (u, v, mult): mult arrows u -> v, sorted."""
        for u, row in enumerate(self.rows):
            for v, mult in row:
                if mult > 0:
                    yield u, v, mult

    def class_members(self, label: int) -> tuple[int, ...]:
        return tuple(v for v, lab in enumerate(self.labels) if lab == label)

    def is_frozen_vertex(self, v: int) -> bool:
        return self.labels[v] in self.frozen_labels


def _rows_to_dicts(rows: Rows) -> list[dict[int, int]]:
    return [dict(row) for row in rows]


def _dicts_to_rows(adj: list[dict[int, int]]) -> Rows:
    return tuple(
        tuple(sorted((v, m) for v, m in row.items() if m != 0)) for row in adj
    )


def _star_requirement(B: ExchangeMatrix, i: int) -> dict[int, tuple[int, int]]:
    """For a vertex labeled i: {j: (count, orientation)} with orientation
    +1 for arrows j -> center and -1 for center -> j."""
    req = {}
    for j in range(B.n):
        e = B.entries[j][i]
        if e:
            req[j] = (abs(e), 1 if e > 0 else -1)
    return req


class _Builder:
    def __init__(self, B: ExchangeMatrix):
        self.B = B
        self.labels: list[int] = []
        self.depths: list[int] = []
        self.adj: list[dict[int, int]] = []

    def add_vertex(self, label: int, depth: int) -> int:
        self.labels.append(label)
        self.depths.append(depth)
        self.adj.append({})
        return len(self.labels) - 1

    def add_arrow(self, u: int, v: int):
        self.adj[u][v] = self.adj[u].get(v, 0) + 1
        self.adj[v][u] = self.adj[v].get(u, 0) - 1

    def complete_star(self, v: int, depth: int) -> list[int]:
        """Add fresh neighbors until v's neighborhood matches its label's
        star; gluing never identifies two existing vertices, so the result
        stays a tree."""
        fresh = []
        have: dict[int, int] = {}
        for w in self.adj[v]:
            have[self.labels[w]] = have.get(self.labels[w], 0) + 1
        for j, (count, orient) in _star_requirement(self.B, self.labels[v]).items():
            missing = count - have.get(j, 0)
            assert missing >= 0, "existing arrows exceed the star requirement"
            for _ in range(missing):
                w = self.add_vertex(j, depth)
                if orient > 0:
                    self.add_arrow(w, v)
                else:
                    self.add_arrow(v, w)
                fresh.append(w)
        return fresh

    def star_complete(self, v: int) -> bool:
        have: dict[int, int] = {}
        for w in self.adj[v]:
            have[self.labels[w]] = have.get(self.labels[w], 0) + 1
        need = {j: c for j, (c, _) in _star_requirement(self.B, self.labels[v]).items()}
        return have == need


def _validate_unfoldable(B: ExchangeMatrix):
    if not B.is_square():
        raise ValueError("a square matrix is required")
    if not is_sign_skew_symmetric(B):
        raise ValueError("matrix is not sign-skew-symmetric")
    if not is_acyclic(B):
        raise NotAcyclicError("sign digraph has a directed cycle")
    if not is_connected(B):
        raise NotConnectedError("sign digraph is not connected")


def local_quiver(B: ExchangeMatrix, i: int) -> LabeledQuiver:
    """The star of label i: a center plus |b_ji| vertices labeled j for
    each j, arrows j -> i when b_ji > 0 and i -> j when b_ji < 0."""
    if not B.is_square():
        raise ValueError("a square matrix is required")
    if not is_sign_skew_symmetric(B):
        raise ValueError("matrix is not sign-skew-symmetric")
    if not 0 <= i < B.n:
        raise IndexError(f"label {i} outside 0..{B.n - 1}")
    builder = _Builder(B)
    center = builder.add_vertex(i, 1)
    builder.complete_star(center, 1)
    complete = frozenset(
        v for v in range(len(builder.labels)) if builder.star_complete(v)
    )
    exact = len(complete) == len(builder.labels)
    return LabeledQuiver(
        labels=tuple(builder.labels),
        depths=tuple(builder.depths),
        rows=_dicts_to_rows(builder.adj),
        n_labels=B.n,
        frozen_labels=frozenset(),
        frontier_margin=None if exact else 0,
        certified=frozenset(range(len(builder.labels))) if exact else complete,
    )


def build_unfolding(
    B: ExchangeMatrix,
    depth: int,
    frozen_labels=(),
) -> LabeledQuiver:
    """Glue stars for `depth` generations starting from the star of label 1.

    Every vertex created before the last generation has a complete
    neighborhood. When a generation adds no vertices the construction has
    closed up: the quiver is finite, exact everywhere, and its frontier
    never runs out (margin None). Otherwise the margin starts at depth - 2
    and pays for one orbit mutation each; it is only a coarse budget. The
    `certified` set is the precise certificate, and it can shrink by more
    than one generation per mutation, because mutation composes arrows
    through the mutated class and thereby lengthens the reach of later
    erosions.
    """
    _validate_unfoldable(B)
    if depth < 1:
        raise ValueError("depth must be at least 1")
    builder = _Builder(B)
    center = builder.add_vertex(0, 1)
    shell = builder.complete_star(center, 1)
    stabilized = False
    for generation in range(2, depth + 1):
        nxt: list[int] = []
        for v in shell:
            nxt.extend(builder.complete_star(v, generation))
        shell = nxt
        if not shell:
            stabilized = True
            break
    total = len(builder.labels)
    if not stabilized:
        # the last generation may happen to need nothing further
        stabilized = all(builder.star_complete(v) for v in shell)
    if stabilized:
        certified = frozenset(range(total))
        margin = None
    else:
        certified = frozenset(
            v for v in range(total) if builder.star_complete(v)
        )
        margin = max(depth - 2, 0)
    return LabeledQuiver(
        labels=tuple(builder.labels),
        depths=tuple(builder.depths),
        rows=_dicts_to_rows(builder.adj),
        n_labels=B.n,
        frozen_labels=frozenset(frozen_labels),
        frontier_margin=margin,
        certified=certified,
    )


def _find_orbit_loop(Q: LabeledQuiver, label: int) -> tuple[int, int] | None:
    """An arrow between same-labeled vertices, seen from a certified
    endpoint (a certified vertex's stored arrows are all real)."""
    for u in Q.class_members(label):
        for v, mult in Q.rows[u]:
            if mult > 0 and Q.labels[v] == label:
                if u in Q.certified or v in Q.certified:
                    return (u, v)
    return None


def _find_orbit_two_cycle(Q: LabeledQuiver, label: int) -> tuple[int, int, int] | None:
    """Arrows u -> w -> v with label(u) = label(v) = label != label(w),
    witnessed at a certified middle vertex."""
    for w in Q.certified:
        if Q.labels[w] == label:
            continue
        ins = [u for u, m in Q.rows[w] if m < 0 and Q.labels[u] == label]
        outs = [v for v, m in Q.rows[w] if m > 0 and Q.labels[v] == label]
        if ins and outs:
            return (ins[0], w, outs[0])
    return None


def has_orbit_loops(Q: LabeledQuiver, label: int | None = None) -> bool:
    """Any arrow inside one label class, restricted to the certified part."""
    targets = range(Q.n_labels) if label is None else (label,)
    return any(_find_orbit_loop(Q, lab) is not None for lab in targets)


def has_orbit_two_cycles(Q: LabeledQuiver, label: int | None = None) -> bool:
    """Any length-2 arrow pattern leaving and re-entering one label class,
    restricted to the certified part."""
    targets = range(Q.n_labels) if label is None else (label,)
    return any(_find_orbit_two_cycle(Q, lab) is not None for lab in targets)


def _mutate_vertex_adj(adj: list[dict[int, int]], w: int):
    """Matrix mutation at index w on the quiver-as-matrix, in place."""
    ins = [(u, -m) for u, m in adj[w].items() if m < 0]
    outs = [(v, m) for v, m in adj[w].items() if m > 0]
    for u, a in ins:
        for v, c in outs:
            adj[u][v] = adj[u].get(v, 0) + a * c
            adj[v][u] = adj[v].get(u, 0) - a * c
    for v, m in list(adj[w].items()):
        adj[w][v] = -m
        adj[v][w] = m


def vertex_mutation_rows(Q: LabeledQuiver, vertices) -> Rows:
    """Rows after ordinary single-vertex mutation at each id in turn.

    A raw kernel with no class bookkeeping, mainly for checking that orbit
    mutation equals the composition of single mutations over a class.
    """
    adj = _rows_to_dicts(Q.rows)
    for w in vertices:
        _mutate_vertex_adj(adj, w)
    return _dicts_to_rows(adj)


def orbit_mutate(Q: LabeledQuiver, label: int) -> LabeledQuiver:
    """Mutate simultaneously at every vertex of one label class.

    For u, v outside the class the entry moves by the same-sign products
    through class members; arrows incident to the class flip. Requires a
    frontier budget, an unfrozen label, and no orbit loop or two-cycle at
    the class. The certified region erodes: a vertex stays certified when
    every stored neighbor of the mutated label is certified too.
    """
    if not 0 <= label < Q.n_labels:
        raise IndexError(f"label {label} outside 0..{Q.n_labels - 1}")
    if label in Q.frozen_labels:
        raise ValueError(f"label {label + 1} is frozen")
    if Q.frontier_margin is not None and Q.frontier_margin <= 0:
        raise FrontierExhaustedError(
            "frontier margin is 0; rebuild with a larger depth"
        )
    loop = _find_orbit_loop(Q, label)
    if loop is not None:
        raise OrbitLoopError(label, loop)
    two_cycle = _find_orbit_two_cycle(Q, label)
    if two_cycle is not None:
        raise OrbitTwoCycleError(label, two_cycle)

    members = set(Q.class_members(label))
    adj = _rows_to_dicts(Q.rows)
    for w in members:
        _mutate_vertex_adj(adj, w)

    if Q.frontier_margin is None:
        certified = Q.certified
        margin = None
    else:
        certified = frozenset(
            v
            for v in Q.certified
            if all(
                w in Q.certified
                for w, _ in Q.rows[v]
                if Q.labels[w] == label
            )
        )
        margin = Q.frontier_margin - 1
    return LabeledQuiver(
        labels=Q.labels,
        depths=Q.depths,
        rows=_dicts_to_rows(adj),
        n_labels=Q.n_labels,
        frozen_labels=Q.frozen_labels,
        frontier_margin=margin,
        certified=certified,
    )


def fold(Q: LabeledQuiver) -> ExchangeMatrix:
    """Sum arrows over label classes into an exchange matrix.

    Entry [a][j] is the total of b(u, r) over all vertices u labeled a,
    where r is a certified representative of label j; a second certified
    representative, when available, must give the same column. Frozen
    labels must sit after the exchangeable ones; their rows form the
    extension part and only exchangeable labels contribute columns.
    """
    if has_orbit_loops(Q) or has_orbit_two_cycles(Q):
        raise IllDefinedFoldingError("orbit loop or two-cycle present")
    exchangeable = [lab for lab in range(Q.n_labels) if lab not in Q.frozen_labels]
    if exchangeable != list(range(len(exchangeable))):
        raise IllDefinedFoldingError("frozen labels must be the trailing labels")

    by_label: dict[int, list[int]] = {lab: [] for lab in range(Q.n_labels)}
    for v in sorted(Q.certified):
        by_label[Q.labels[v]].append(v)

    def column(rep: int) -> list[int]:
        # rows[rep] holds b(rep, u); the folded column needs b(u, rep)
        col = [0] * Q.n_labels
        for u, mult in Q.rows[rep]:
            col[Q.labels[u]] -= mult
        return col

    entries = [[0] * len(exchangeable) for _ in range(Q.n_labels)]
    for j in exchangeable:
        reps = by_label[j]
        if not reps:
            raise MissingRepresentativeError(j)
        col = column(reps[0])
        for other in reps[1:2]:
            if column(other) != col:
                raise IllDefinedFoldingError(
                    f"representatives {reps[0]} and {other} of label {j + 1} disagree"
                )
        for a in range(Q.n_labels):
            entries[a][j] = col[a]
    folded = ExchangeMatrix(entries)
    if not is_sign_skew_symmetric(ExchangeMatrix(folded.principal_part())):
        raise IllDefinedFoldingError("folded principal part is not sign-skew-symmetric")
    return folded


def to_dot(Q: LabeledQuiver) -> str:
    """DOT text; vertices named v<id>_l<label>, frozen vertices boxed,
    arrow multiplicities above 1 shown as edge labels. Deterministic."""
    lines = ["digraph quiver {"]
    for v in range(Q.n_vertices):
        name = f"v{v}_l{Q.labels[v] + 1}"
        shape = "box" if Q.is_frozen_vertex(v) else "ellipse"
        lines.append(f'  {name} [shape={shape}];')
    for u, v, mult in Q.iter_arrows():
        edge = f"  v{u}_l{Q.labels[u] + 1} -> v{v}_l{Q.labels[v] + 1}"
        if mult > 1:
            edge += f' [label="{mult}"]'
        lines.append(edge + ";")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_snapshot(Q: LabeledQuiver) -> str:
    """Plain-text snapshot: `V E n_labels margin` (margin -1 for None),
    then one `id label frozen depth` line per vertex (labels 1-based),
    then one `u v mult` line per positive arrow entry, sorted."""
    arrows = list(Q.iter_arrows())
    lines = [
        f"{Q.n_vertices} {len(arrows)} {Q.n_labels} "
        f"{-1 if Q.frontier_margin is None else Q.frontier_margin}"
    ]
    for v in range(Q.n_vertices):
        frozen = 1 if Q.is_frozen_vertex(v) else 0
        lines.append(f"{v} {Q.labels[v] + 1} {frozen} {Q.depths[v]}")
    for u, v, mult in arrows:
        lines.append(f"{u} {v} {mult}")
    return "\n".join(lines) + "\n"


def read_snapshot(text: str) -> LabeledQuiver:
    """Inverse of write_snapshot.

    The certified set is not serialized. With margin None everything is
    certified; a margin matching an untouched truncation restores the
    star-complete vertices; a snapshot of a mutated truncation comes back
    with nothing certified, because certification erodes along the
    mutation history and the format does not record it.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise SnapshotFormatError("empty snapshot")

    def ints(line: str, count: int, what: str) -> list[int]:
        parts = line.split()
        if len(parts) != count:
            raise SnapshotFormatError(f"{what}: expected {count} fields, got {line!r}")
        try:
            return [int(p) for p in parts]
        except ValueError:
            raise SnapshotFormatError(f"{what}: non-integer field in {line!r}") from None

    n_vertices, n_arrows, n_labels, margin_raw = ints(lines[0], 4, "header")
    if len(lines) != 1 + n_vertices + n_arrows:
        raise SnapshotFormatError(
            f"expected {1 + n_vertices + n_arrows} lines, got {len(lines)}"
        )
    labels = [0] * n_vertices
    depths = [0] * n_vertices
    frozen_flags = [0] * n_vertices
    for line in lines[1 : 1 + n_vertices]:
        vid, label, frozen, depth = ints(line, 4, "vertex")
        if not 0 <= vid < n_vertices:
            raise SnapshotFormatError(f"vertex id {vid} out of range")
        if not 1 <= label <= n_labels:
            raise SnapshotFormatError(f"label {label} out of range 1..{n_labels}")
        labels[vid] = label - 1
        depths[vid] = depth
        frozen_flags[vid] = frozen
    frozen_labels = {labels[v] for v in range(n_vertices) if frozen_flags[v]}
    for v in range(n_vertices):
        if (labels[v] in frozen_labels) != bool(frozen_flags[v]):
            raise SnapshotFormatError(
                f"frozen flag of vertex {v} disagrees with its label class"
            )
    adj: list[dict[int, int]] = [{} for _ in range(n_vertices)]
    for line in lines[1 + n_vertices :]:
        u, v, mult = ints(line, 3, "arrow")
        if not (0 <= u < n_vertices and 0 <= v < n_vertices) or mult <= 0:
            raise SnapshotFormatError(f"bad arrow line {line!r}")
        adj[u][v] = mult
        adj[v][u] = -mult
    margin = None if margin_raw == -1 else margin_raw
    max_depth = max(depths) if depths else 0
    if margin is None:
        certified = frozenset(range(n_vertices))
    elif margin == max_depth - 2:
        # untouched truncation: exactly the star-complete vertices
        certified = frozenset(
            v for v in range(n_vertices) if depths[v] < max_depth
        )
    else:
        # the certificate erodes along the mutation history, which the
        # format does not record; nothing can be soundly reclaimed
        certified = frozenset()
    return LabeledQuiver(
        labels=tuple(labels),
        depths=tuple(depths),
        rows=_dicts_to_rows(adj),
        n_labels=n_labels,
        frozen_labels=frozenset(frozen_labels),
        frontier_margin=margin,
        certified=certified,
    )
