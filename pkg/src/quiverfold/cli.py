"""Command-line front end.

Three subcommands wire the library to files:

``mutate FILE --seq "1 2 1"``
    apply matrix mutations and print the result in the matrix text format

``unfold FILE --depth D [--dot PATH]``
    build the depth-D covering quiver truncation and print its snapshot

``verify KIND FILE [options]``
    run one verification campaign and print its report; KIND is one of
    totality, covering, pi, positivity, fpoly, laurent

All sequences and direction indices on the command line are 1-based. Exit
codes: 0 on success, 1 when a verifier found a counterexample, 2 on invalid
input or usage. For a fixed configuration (including ``--seed``) the emitted
report is byte-identical across runs except for the ``elapsed_ms`` field.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bridge import verify_covering_commutation, verify_pi_commutation
from .matrices import (
    ExchangeMatrix,
    format_matrix,
    fuzz_totality,
    mutate,
    parse_matrix,
)
from .quivers import build_unfolding, to_dot, write_snapshot
from .seeds import verify_fpolynomials, verify_laurent_adjacent, verify_positivity

__all__ = ["build_parser", "main"]


class UsageError(ValueError):
    pass


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quiverfold",
        description="Exact mutation engine for sign-skew-symmetric exchange "
        "matrices and their covering quivers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_mut = sub.add_parser("mutate", help="apply matrix mutations to a matrix file")
    p_mut.add_argument("matrix", help="path to a matrix file")
    p_mut.add_argument(
        "--seq", default="", help="1-based mutation directions, space separated"
    )
    p_mut.add_argument("--out", help="write output here instead of stdout")

    p_unf = sub.add_parser("unfold", help="build the covering quiver truncation")
    p_unf.add_argument("matrix", help="path to a matrix file")
    p_unf.add_argument("--depth", type=_positive, required=True)
    p_unf.add_argument("--dot", help="also write a DOT rendering to this path")
    p_unf.add_argument("--out", help="write the snapshot here instead of stdout")

    p_ver = sub.add_parser("verify", help="run one verification campaign")
    p_ver.add_argument(
        "kind",
        choices=("totality", "covering", "pi", "positivity", "fpoly", "laurent"),
    )
    p_ver.add_argument("matrix", help="path to a matrix file")
    p_ver.add_argument(
        "--seq", help="orbit-label sequence for covering/pi, 1-based"
    )
    p_ver.add_argument(
        "--depth",
        type=_positive,
        help="truncation depth for covering/pi (default: sequence length + 2)",
    )
    p_ver.add_argument("--max-len", type=_positive, dest="max_len")
    p_ver.add_argument("--trials", type=_positive)
    p_ver.add_argument("--seed", type=int, default=0, help="PRNG seed (default 0)")
    p_ver.add_argument(
        "--max-terms",
        type=_positive,
        dest="max_terms",
        help="refuse any expansion step predicted to exceed this many terms",
    )
    p_ver.add_argument(
        "--invert-coeffs",
        action="store_true",
        dest="invert_coeffs",
        help="adjoin inverses of the frozen variables to the ground ring "
        "(laurent only)",
    )
    p_ver.add_argument("--json", action="store_true", help="emit JSON, not text")
    p_ver.add_argument("--out", help="write the report here instead of stdout")
    return parser


def _read_matrix(path: str) -> ExchangeMatrix:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise UsageError(str(e)) from None
    return parse_matrix(text)


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _parse_sequence(text: str, n: int) -> tuple[int, ...]:
    """1-based space-separated directions, returned 0-based."""
    out = []
    for token in text.split():
        try:
            k = int(token)
        except ValueError:
            raise UsageError(f"sequence entry {token!r} is not an integer") from None
        if not 1 <= k <= n:
            raise UsageError(f"direction {k} outside 1..{n}")
        out.append(k - 1)
    return tuple(out)


def _cmd_mutate(args: argparse.Namespace) -> int:
    B = _read_matrix(args.matrix)
    for k in _parse_sequence(args.seq, B.n):
        B = mutate(B, k)
    _emit(format_matrix(B), args.out)
    return 0


def _cmd_unfold(args: argparse.Namespace) -> int:
    B = _read_matrix(args.matrix)
    Q = build_unfolding(B, args.depth)
    _emit(write_snapshot(Q), args.out)
    if args.dot:
        Path(args.dot).write_text(to_dot(Q))
    return 0


_VERIFY_FLAGS: dict[str, set[str]] = {
    "totality": {"max_len", "trials"},
    "covering": {"seq", "depth"},
    "pi": {"seq", "depth", "max_terms"},
    "positivity": {"max_len", "trials", "max_terms"},
    "fpoly": {"max_len", "trials", "max_terms"},
    "laurent": {"max_len", "trials", "max_terms", "invert_coeffs"},
}

_FLAG_SPELLING = {
    "seq": "--seq",
    "depth": "--depth",
    "max_len": "--max-len",
    "trials": "--trials",
    "max_terms": "--max-terms",
    "invert_coeffs": "--invert-coeffs",
}


def _cmd_verify(args: argparse.Namespace) -> int:
    kind = args.kind
    given = {
        name
        for name in _FLAG_SPELLING
        if getattr(args, name) not in (None, False)
    }
    stray = given - _VERIFY_FLAGS[kind]
    if stray:
        spelled = ", ".join(sorted(_FLAG_SPELLING[name] for name in stray))
        raise UsageError(f"not valid for 'verify {kind}': {spelled}")

    B = _read_matrix(args.matrix)
    if kind in ("covering", "pi"):
        seq = _parse_sequence(args.seq or "", B.n)
        depth = args.depth if args.depth is not None else len(seq) + 2
        if depth < len(seq) + 2:
            raise UsageError(
                f"depth {depth} leaves no exactness frontier for a "
                f"length-{len(seq)} sequence; need at least {len(seq) + 2}"
            )
        if kind == "covering":
            report = verify_covering_commutation(B, seq, depth)
        else:
            report = verify_pi_commutation(B, seq, depth, max_terms=args.max_terms)
    elif kind == "totality":
        report = fuzz_totality(
            B,
            max_len=args.max_len if args.max_len is not None else 8,
            trials=args.trials if args.trials is not None else 200,
            prng_seed=args.seed,
        )
    else:
        kwargs: dict = {"prng_seed": args.seed}
        if args.max_len is not None:
            kwargs["max_len"] = args.max_len
        if args.trials is not None:
            kwargs["trials"] = args.trials
        if args.max_terms is not None:
            kwargs["max_terms"] = args.max_terms
        if kind == "positivity":
            report = verify_positivity(B, **kwargs)
        elif kind == "fpoly":
            report = verify_fpolynomials(B, **kwargs)
        else:
            report = verify_laurent_adjacent(
                B, invert_coeffs=args.invert_coeffs, **kwargs
            )

    _emit(report.to_json() if args.json else report.to_text(), args.out)
    return 0 if report.ok else 1


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "mutate":
            return _cmd_mutate(args)
        if args.command == "unfold":
            return _cmd_unfold(args)
        return _cmd_verify(args)
    except (ValueError, IndexError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
