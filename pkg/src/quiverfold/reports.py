"""Structured results for the verification campaigns.

Every verifier in this package returns a :class:`VerificationReport`. The
serialized form is stable: identical configuration (including the PRNG seed)
produces byte-identical output except for the ``elapsed_ms`` field, which is
measured wall time and documented as outside the determinism contract.
Witness sequences inside reports are 1-based, matching the CLI convention.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Failure:
    """One counterexample: the witness sequence and the two differing values."""

    sequence: tuple[int, ...]
    lhs: str
    rhs: str
    note: str = ""

    def to_dict(self) -> dict:
        d = {"sequence": list(self.sequence), "lhs": self.lhs, "rhs": self.rhs}
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class VerificationReport:
    theorem: str
    input_matrix: str
    depth: int | None
    prng_seed: int | None
    sequences_tried: int
    failures: list[Failure] = field(default_factory=list)
    elapsed_ms: float = 0.0
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "input_matrix": self.input_matrix,
            "depth": self.depth,
            "prng_seed": self.prng_seed,
            "sequences_tried": self.sequences_tried,
            "failures": [f.to_dict() for f in sorted_failures(self.failures)],
            "elapsed_ms": self.elapsed_ms,
            "stats": self.stats,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        lines = [
            f"theorem: {self.theorem}",
            "matrix:",
        ]
        lines += ["  " + row for row in self.input_matrix.splitlines()]
        if self.depth is not None:
            lines.append(f"depth: {self.depth}")
        if self.prng_seed is not None:
            lines.append(f"prng seed: {self.prng_seed}")
        lines.append(f"sequences tried: {self.sequences_tried}")
        if self.stats:
            for key in sorted(self.stats):
                lines.append(f"{key}: {self.stats[key]}")
        if self.ok:
            lines.append("failures: 0")
        else:
            lines.append(f"failures: {len(self.failures)}")
            for f in sorted_failures(self.failures):
                seq = " ".join(str(s) for s in f.sequence)
                lines.append(f"  seq [{seq}]: {f.lhs} != {f.rhs}" + (f" ({f.note})" if f.note else ""))
        lines.append(f"elapsed ms: {self.elapsed_ms:.1f}")
        return "\n".join(lines) + "\n"


def sorted_failures(failures: list[Failure]) -> list[Failure]:
    return sorted(failures, key=lambda f: (len(f.sequence), f.sequence, f.lhs, f.rhs))


def combine(theorem: str, reports: list[VerificationReport]) -> VerificationReport:
    """Merge per-sequence reports from one campaign into a single report.

    All inputs must concern the same matrix; depth is kept when shared,
    dropped when the sequences used different depths.
    """
    if not reports:
        raise ValueError("nothing to combine")
    matrices = {r.input_matrix for r in reports}
    if len(matrices) != 1:
        raise ValueError("reports concern different matrices")
    depths = {r.depth for r in reports}
    seeds = {r.prng_seed for r in reports} - {None}
    merged_stats: dict = {}
    for r in reports:
        merged_stats.update(r.stats)
    return VerificationReport(
        theorem=theorem,
        input_matrix=reports[0].input_matrix,
        depth=depths.pop() if len(depths) == 1 else None,
        prng_seed=seeds.pop() if len(seeds) == 1 else None,
        sequences_tried=sum(r.sequences_tried for r in reports),
        failures=[f for r in reports for f in r.failures],
        elapsed_ms=sum(r.elapsed_ms for r in reports),
        stats=merged_stats,
    )
