"""Laurent polynomial arithmetic, exact division, and the text form."""

from __future__ import annotations

import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from quiverfold.laurent import (
    InexactDivisionError,
    LaurentPoly,
    LaurentRing,
    PolyFormatError,
    format_poly,
)

R2 = LaurentRing(("x1", "x2", "y1"), 2)
X1, X2, Y1 = (R2.variable(i) for i in range(3))


def to_sympy(p: LaurentPoly):
    symbols = sympy.symbols(p.ring.names)
    expr = sympy.Integer(0)
    for exps, coeff in p.terms.items():
        term = sympy.Integer(coeff)
        for s, e in zip(symbols, exps):
            term *= s**e
        expr += term
    return sympy.expand(expr)


def random_poly(rng: random.Random, ring: LaurentRing, n_terms: int, span: int):
    terms = {}
    for _ in range(n_terms):
        exps = []
        for i in range(ring.n_vars):
            lo = -span if (i < ring.n_exchangeable or ring.invert_frozen) else 0
            exps.append(rng.randint(lo, span))
        terms[tuple(exps)] = rng.randint(-5, 5)
    return LaurentPoly(ring, terms)


def test_constructor_drops_zero_coefficients():
    p = LaurentPoly(R2, {(1, 0, 0): 0, (0, 1, 0): 2})
    assert p.terms == {(0, 1, 0): 2}


def test_ground_ring_rejects_negative_frozen_exponents():
    with pytest.raises(ValueError, match="frozen"):
        R2.monomial((0, 0, -1))
    inverted = LaurentRing(R2.names, 2, invert_frozen=True)
    assert inverted.monomial((0, 0, -1)).terms == {(0, 0, -1): 1}


def test_basic_identities():
    p = (X1 + X2) * (X1 - X2)
    assert p == X1 * X1 - X2 * X2
    assert (X1 + 1) - (X1 + 1) == R2.zero()
    assert (X1 + Y1) * R2.zero() == R2.zero()
    assert (X1 + Y1) ** 0 == R2.one()
    assert X1**3 == X1 * X1 * X1


def test_mul_matches_sympy_on_random_inputs():
    rng = random.Random(3)
    for _ in range(120):
        a = random_poly(rng, R2, rng.randint(1, 5), 3)
        b = random_poly(rng, R2, rng.randint(1, 5), 3)
        assert to_sympy(a * b) == sympy.expand(to_sympy(a) * to_sympy(b))
        assert to_sympy(a + b) == to_sympy(a) + to_sympy(b)


def test_exact_div_recovers_factor():
    rng = random.Random(5)
    checked = 0
    while checked < 150:
        a = random_poly(rng, R2, rng.randint(1, 4), 2)
        b = random_poly(rng, R2, rng.randint(1, 4), 2)
        if b.is_zero():
            continue
        assert (a * b).exact_div(b) == a
        checked += 1


def test_exact_div_monomials_always_divide():
    p = X1 + X2 * Y1
    q = p.exact_div(R2.monomial((2, 0, 0), 1))
    assert q == R2.poly({(-1, 0, 0): 1, (-2, 1, 1): 1})


def test_exact_div_detects_remainder():
    with pytest.raises(InexactDivisionError) as err:
        (X1 * X1 + 1).exact_div(X1 + 1)
    assert err.value.remainder is not None
    assert not err.value.remainder.is_zero()


def test_exact_div_integer_content_matters():
    two_x = 2 * X1
    with pytest.raises(InexactDivisionError):
        X1.exact_div(two_x)
    assert (two_x * two_x).exact_div(two_x) == two_x


def test_exact_div_frozen_denominator_is_rejected():
    # x1 = (1/y1) * (x1*y1) is exact only with an invertible frozen block
    with pytest.raises(InexactDivisionError):
        X1.exact_div(X1 * Y1)
    inverted = LaurentRing(R2.names, 2, invert_frozen=True)
    a = inverted.monomial((1, 0, 0))
    b = inverted.monomial((1, 0, 1))
    assert a.exact_div(b) == inverted.monomial((0, 0, -1))


def test_exact_div_laurent_shifts():
    num = R2.poly({(-1, 1, 0): 1, (-1, 0, 1): 1})  # (x2 + y1)/x1
    assert num.exact_div(X2 + Y1) == R2.monomial((-1, 0, 0))
    assert num.exact_div(R2.monomial((-1, 0, 0))) == X2 + Y1


def test_zero_division_raises():
    with pytest.raises(ZeroDivisionError):
        X1.exact_div(R2.zero())
    assert R2.zero().exact_div(X1) == R2.zero()


def test_leading_term_uses_graded_lex():
    p = R2.poly({(2, 0, 0): 1, (1, 2, 0): 1, (0, 0, 1): 5})
    exps, coeff = p.leading_term()
    assert exps == (1, 2, 0) and coeff == 1  # degree 3 beats degree 2


def test_denominator_exponents():
    p = R2.poly({(-2, 1, 0): 3, (0, -1, 1): 1})
    assert p.denominator_exponents() == (2, 1, 0)
    assert R2.zero().denominator_exponents() == (0, 0, 0)


def test_format_canonical_examples():
    assert format_poly(R2.zero()) == "0"
    assert format_poly(R2.one()) == "1"
    assert format_poly(-R2.one()) == "-1"
    assert format_poly(X1 + 1) == "x1 + 1"
    assert format_poly(3 * X1 - X2) == "3*x1 - x2"
    p = R2.poly({(-2, 1, 1): 3, (0, 0, 0): 1})
    assert format_poly(p) == "3*x1^-2*x2*y1 + 1"


def test_parse_round_trip():
    rng = random.Random(9)
    for _ in range(200):
        p = random_poly(rng, R2, rng.randint(0, 6), 3)
        assert R2.parse(format_poly(p)) == p


def test_parse_tolerates_spacing_and_signs():
    assert R2.parse("x1+x2") == X1 + X2
    assert R2.parse("-x1 + 2") == 2 - X1
    assert R2.parse("2*x1^-1*y1") == R2.monomial((-1, 0, 1), 2)
    assert R2.parse("x1*x1") == X1 * X1
    assert R2.parse("x1 - -1") == X1 + 1


def test_parse_rejects_garbage():
    for bad in ("", "x3", "x1^", "* x1", "x1 +", "x1**2"):
        with pytest.raises(PolyFormatError):
            R2.parse(bad)


def test_mixed_ring_operations_fail():
    other = LaurentRing(("x1", "x2"), 2)
    with pytest.raises(ValueError, match="mixed"):
        X1 + other.variable(0)


@st.composite
def small_polys(draw):
    n_terms = draw(st.integers(0, 4))
    terms = {}
    for _ in range(n_terms):
        exps = (
            draw(st.integers(-2, 2)),
            draw(st.integers(-2, 2)),
            draw(st.integers(0, 2)),
        )
        terms[exps] = draw(st.integers(-4, 4))
    return LaurentPoly(R2, terms)


@settings(max_examples=150, deadline=None)
@given(small_polys(), small_polys(), small_polys())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + R2.zero() == a
    assert a * R2.one() == a


@settings(max_examples=100, deadline=None)
@given(small_polys(), small_polys())
def test_product_then_exact_div_round_trips(a, b):
    if b.is_zero():
        return
    assert (a * b).exact_div(b) == a
