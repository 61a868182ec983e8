"""Exact multivariate Laurent polynomials with integer coefficients.

Variables split into an exchangeable block (negative exponents allowed) and a
frozen block (exponents >= 0 in the default ground ring; a ring flag makes
the frozen block invertible too). Terms are stored sparsely as a map from
dense exponent tuples to nonzero integer coefficients; a zero polynomial has
no terms. Python integers keep every coefficient exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = ["LaurentRing", "LaurentPoly", "InexactDivisionError", "PolyFormatError"]


class InexactDivisionError(ArithmeticError):
    """Division left a remainder; carries the remainder as a witness."""

    def __init__(self, message: str, remainder=None):
        super().__init__(message)
        self.remainder = remainder


class PolyFormatError(ValueError):
    pass


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class LaurentRing:
    """Variable names and domain rules shared by a family of polynomials."""

    names: tuple[str, ...]
    n_exchangeable: int
    invert_frozen: bool = False

    def __post_init__(self):
        if not 0 <= self.n_exchangeable <= len(self.names):
            raise ValueError("exchangeable count out of range")
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        for name in self.names:
            if not _NAME.fullmatch(name):
                raise ValueError(f"bad variable name {name!r}")

    @property
    def n_vars(self) -> int:
        return len(self.names)

    @property
    def n_frozen(self) -> int:
        return len(self.names) - self.n_exchangeable

    def _check_exponents(self, exps: tuple[int, ...]) -> None:
        if len(exps) != self.n_vars:
            raise ValueError(f"expected {self.n_vars} exponents, got {len(exps)}")
        if not self.invert_frozen:
            for i in range(self.n_exchangeable, self.n_vars):
                if exps[i] < 0:
                    raise ValueError(
                        f"negative exponent on frozen variable {self.names[i]}"
                    )

    def zero(self) -> "LaurentPoly":
        return LaurentPoly(self, {})

    def one(self) -> "LaurentPoly":
        return self.constant(1)

    def constant(self, c: int) -> "LaurentPoly":
        zero = (0,) * self.n_vars
        return LaurentPoly(self, {zero: c} if c else {})

    def variable(self, index: int) -> "LaurentPoly":
        exps = tuple(1 if i == index else 0 for i in range(self.n_vars))
        return LaurentPoly(self, {exps: 1})

    def monomial(self, exps, coeff: int = 1) -> "LaurentPoly":
        exps = tuple(exps)
        return LaurentPoly(self, {exps: coeff} if coeff else {})

    def poly(self, terms: dict) -> "LaurentPoly":
        return LaurentPoly(self, dict(terms))

    def parse(self, text: str) -> "LaurentPoly":
        return _parse_poly(self, text)


def _glex_key(exps: tuple[int, ...]):
    return (sum(exps), exps)


class LaurentPoly:
    """Immutable by convention; arithmetic returns new polynomials."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: LaurentRing, terms: dict):
        cleaned = {}
        for exps, coeff in terms.items():
            if coeff == 0:
                continue
            exps = tuple(exps)
            ring._check_exponents(exps)
            if not isinstance(coeff, int) or isinstance(coeff, bool):
                raise ValueError(f"non-integer coefficient {coeff!r}")
            cleaned[exps] = coeff
        self.ring = ring
        self.terms = cleaned

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return self.terms == {(0,) * self.ring.n_vars: 1}

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.ring.n_vars, 0)

    def coefficient(self, exps) -> int:
        return self.terms.get(tuple(exps), 0)

    def total_degree(self) -> int | None:
        """Max total degree over all terms, None for the zero polynomial."""
        if not self.terms:
            return None
        return max(sum(e) for e in self.terms)

    def min_exponents(self) -> tuple[int, ...]:
        """Componentwise minimum exponent vector over the support."""
        if not self.terms:
            raise ValueError("zero polynomial has no support")
        cols = zip(*self.terms.keys())
        return tuple(min(col) for col in cols)

    def denominator_exponents(self) -> tuple[int, ...]:
        """d with self * prod(v_i^d_i) free of negative exponents.

        Every value in this representation has a single monomial denominator
        by construction; this extracts it.
        """
        if not self.terms:
            return (0,) * self.ring.n_vars
        return tuple(max(0, -e) for e in self.min_exponents())

    def leading_term(self) -> tuple[tuple[int, ...], int]:
        """Greatest term under graded lexicographic order on exponents."""
        exps = max(self.terms, key=_glex_key)
        return exps, self.terms[exps]

    # -- arithmetic --------------------------------------------------------

    def _same_ring(self, other: "LaurentPoly") -> None:
        if self.ring != other.ring:
            raise ValueError("mixed rings")

    def __add__(self, other):
        if isinstance(other, int):
            other = self.ring.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        self._same_ring(other)
        out = dict(self.terms)
        for exps, coeff in other.terms.items():
            c = out.get(exps, 0) + coeff
            if c:
                out[exps] = c
            else:
                out.pop(exps, None)
        return LaurentPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = self.ring.constant(other)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return self.ring.zero()
            return LaurentPoly(self.ring, {e: c * other for e, c in self.terms.items()})
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        self._same_ring(other)
        out: dict = {}
        for ea, ca in self.terms.items():
            for eb, cb in other.terms.items():
                key = tuple(x + y for x, y in zip(ea, eb))
                c = out.get(key, 0) + ca * cb
                if c:
                    out[key] = c
                else:
                    out.pop(key, None)
        return LaurentPoly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base_needed = k > 1
            k >>= 1
            if base_needed:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ring, frozenset(self.terms.items())))

    def exact_div(self, divisor: "LaurentPoly") -> "LaurentPoly":
        """Exact quotient self / divisor, or InexactDivisionError.

        Both operands are normalized by their minimal exponent vectors, the
        numerator is then reduced term by term against the divisor's leading
        term under graded lex order. Any stuck leading term means the
        division is inexact and is raised with the remainder as witness.
        """
        self._same_ring(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return self.ring.zero()
        a_shift = self.min_exponents()
        b_shift = divisor.min_exponents()
        num = {tuple(e - s for e, s in zip(exps, a_shift)): c
               for exps, c in self.terms.items()}
        den = {tuple(e - s for e, s in zip(exps, b_shift)): c
               for exps, c in divisor.terms.items()}
        lead_b = max(den, key=_glex_key)
        cb = den[lead_b]
        quot: dict = {}
        while num:
            lead_a = max(num, key=_glex_key)
            ca = num[lead_a]
            qe = tuple(x - y for x, y in zip(lead_a, lead_b))
            if any(e < 0 for e in qe) or ca % cb != 0:
                remainder = LaurentPoly(
                    _unrestricted(self.ring),
                    {tuple(e + s for e, s in zip(exps, a_shift)): c
                     for exps, c in num.items()},
                )
                raise InexactDivisionError(
                    f"inexact division, {len(num)} remainder term(s)",
                    remainder=remainder,
                )
            qc = ca // cb
            quot[qe] = qc
            for eb, coefb in den.items():
                key = tuple(x + y for x, y in zip(qe, eb))
                c = num.get(key, 0) - qc * coefb
                if c:
                    num[key] = c
                else:
                    num.pop(key, None)
        net = tuple(sa - sb for sa, sb in zip(a_shift, b_shift))
        out = {}
        for exps, c in quot.items():
            key = tuple(e + s for e, s in zip(exps, net))
            out[key] = c
        try:
            return LaurentPoly(self.ring, out)
        except ValueError:
            raise InexactDivisionError(
                "quotient leaves the ground ring (frozen variable in denominator)",
                remainder=self.ring.zero(),
            ) from None

    # -- rendering ---------------------------------------------------------

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"LaurentPoly({format_poly(self)})"


def _unrestricted(ring: LaurentRing) -> LaurentRing:
    """Same variables with the frozen block invertible (for witnesses)."""
    if ring.invert_frozen:
        return ring
    return LaurentRing(ring.names, ring.n_exchangeable, invert_frozen=True)


def _display_key(exps: tuple[int, ...]):
    return (sum(e for e in exps if e > 0), exps)


def format_poly(p: LaurentPoly) -> str:
    """Canonical text: terms descending by numerator degree, then lex.

    Example: ``3*x1^-2*x2*y1 + 1``. The zero polynomial renders as ``0``.
    """
    if not p.terms:
        return "0"
    parts = []
    for exps in sorted(p.terms, key=_display_key, reverse=True):
        coeff = p.terms[exps]
        factors = []
        for name, e in zip(p.ring.names, exps):
            if e == 0:
                continue
            factors.append(name if e == 1 else f"{name}^{e}")
        mag = abs(coeff)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        parts.append(("-" if coeff < 0 else "+", body))
    sign, body = parts[0]
    text = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        text += f" {sign} {body}"
    return text


_FACTOR = re.compile(rf"({_NAME.pattern})(?:\^(-?\d+))?$")


def _split_terms(text: str) -> list[str]:
    """Split into signed term strings; +/- after '^' or '*' binds tighter."""
    terms = []
    buf = ""
    for i, ch in enumerate(text):
        if ch in "+-" and buf and text[i - 1] not in "^*+-":
            terms.append(buf)
            buf = ch if ch == "-" else ""
        else:
            buf += ch
    terms.append(buf)
    return terms


def _parse_poly(ring: LaurentRing, text: str) -> LaurentPoly:
    text = "".join(text.split())
    if not text:
        raise PolyFormatError("empty polynomial text")
    if text == "0":
        return ring.zero()
    index = {name: i for i, name in enumerate(ring.names)}
    total: dict = {}
    for chunk in _split_terms(text):
        sgn = 1
        while chunk.startswith("-") or chunk.startswith("+"):
            if chunk[0] == "-":
                sgn = -sgn
            chunk = chunk[1:]
        if not chunk:
            raise PolyFormatError("dangling sign")
        coeff = sgn
        exps = [0] * ring.n_vars
        for factor in chunk.split("*"):
            if not factor:
                raise PolyFormatError(f"empty factor in {chunk!r}")
            if factor.isdigit():
                coeff *= int(factor)
                continue
            match = _FACTOR.fullmatch(factor)
            if not match or match.group(1) not in index:
                raise PolyFormatError(f"unknown factor {factor!r}")
            exps[index[match.group(1)]] += int(match.group(2) or 1)
        key = tuple(exps)
        c = total.get(key, 0) + coeff
        if c:
            total[key] = c
        else:
            total.pop(key, None)
    return LaurentPoly(ring, total)
