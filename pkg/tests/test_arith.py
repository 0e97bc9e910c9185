from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bianchi_cohomology.arith import (
    FieldElement,
    IdealLevel,
    LevelSyntaxError,
    NoWitness,
    Matrix2,
    RingElement,
    classify_prime,
    complete_to_matrix,
    discriminant,
    gamma0_index,
    ideal_membership,
    identity,
    in_gamma0,
    parse_element,
    parse_level,
    prime_ideals_over,
    splitting_kind,
    units,
)

FIELDS = (1, 2, 3, 5, 6, 7, 10, 11, 13, 14, 15)
small = st.integers(-50, 50)


@st.composite
def elements(draw, m=None):
    m = draw(st.sampled_from(FIELDS)) if m is None else m
    return RingElement(draw(small), draw(small), m)


@st.composite
def pairs(draw):
    m = draw(st.sampled_from(FIELDS))
    return draw(elements(m)), draw(elements(m))


def test_norm_examples():
    assert RingElement(1, 2, 11).norm() == 11
    assert RingElement(1, 0, 7).norm() == 1
    assert RingElement(3, 2, 2).norm() == 17


def test_omega_squared_m11():
    w = RingElement(0, 1, 11)
    assert w * w == RingElement(-3, -1, 11)


def test_classify_prime_examples():
    assert classify_prime(5, 2).kind == "inert"
    s = classify_prime(11, 11)
    assert s.kind == "ramified" and s.pi.norm() == 11
    assert {s.pi, s.pi.conj()} >= {RingElement(1, 2, 11)} or (s.pi * s.pi).norm() == 121
    s = classify_prime(3, 2)
    assert s.kind == "split"
    assert {s.pi, s.pi_bar} == {RingElement(1, 1, 2), RingElement(1, -1, 2)}


@pytest.mark.parametrize("m", FIELDS)
@pytest.mark.parametrize("p", (3, 5, 7, 11, 13, 17, 19))
def test_splitting_laws(m, p):
    kind = splitting_kind(p, m)
    assert (kind == "ramified") == (discriminant(m) % p == 0)
    primes = prime_ideals_over(p, m)
    assert len(primes) == {"inert": 1, "ramified": 1, "split": 2}[kind]
    assert sum(P.norm() for P in primes) == {"inert": p * p, "ramified": p, "split": 2 * p}[kind]
    try:
        s = classify_prime(p, m)
    except NoWitness:
        # split or ramified into non-principal primes
        assert kind != "inert" and m not in (1, 2, 3, 7, 11)
        return
    assert s.kind == kind
    if kind == "split":
        assert s.pi.norm() == p
        assert s.pi * s.pi_bar == p
    if kind == "ramified":
        assert s.pi.norm() == p
        assert IdealLevel((s.pi * s.pi,), m).same_ideal(IdealLevel((RingElement(p, 0, m),), m))


def test_in_gamma0_examples():
    eta = parse_level("sqrt(-2)", 2)
    assert in_gamma0(identity(2), eta)
    assert in_gamma0(Matrix2.from_ints(2, 1, 0, (0, 1), 1), eta)
    assert not in_gamma0(Matrix2.from_ints(2, 1, 0, 1, 1), parse_level("5", 2))


def test_ideal_membership_examples():
    eta = parse_level("sqrt(-2)", 2)
    assert ideal_membership(RingElement(2, 0, 2), eta)
    assert not ideal_membership(parse_element("1+sqrt(-2)", 2), eta)
    eta14 = parse_level("[6, 2+sqrt(-14)]", 14)
    assert ideal_membership(parse_element("2+sqrt(-14)", 14), eta14)
    assert eta14.norm() == 6


def test_level_grammar():
    assert parse_level("3+2w", 2).same_ideal(parse_level("3+2*sqrt(-2)", 2))
    assert parse_level("(-1+sqrt(-11))/2", 11).same_ideal(parse_level("w", 11))
    assert parse_level("(1-sqrt(-11))/2", 11).same_ideal(parse_level("w", 11))
    assert parse_level("3*[2, 1+w]", 13).norm() == 18
    with pytest.raises(LevelSyntaxError):
        parse_level("[2, 1+w", 13)
    with pytest.raises(LevelSyntaxError):
        parse_level("sqrt(-11)/2", 11)


def test_gamma0_index():
    assert gamma0_index(parse_level("5", 2)) == 26
    assert gamma0_index(parse_level("sqrt(-2)", 2)) == 3
    assert gamma0_index(parse_level("2", 2)) == 6
    assert gamma0_index(parse_level("1", 2)) == 1


@pytest.mark.parametrize("m", (1, 2, 3, 7, 11))
def test_units(m):
    us = units(m)
    assert all(u.norm() == 1 for u in us)
    assert len(us) == {1: 4, 3: 6}.get(m, 2)


def test_complete_to_matrix():
    M = complete_to_matrix(RingElement(5, 0, 2), RingElement(2, 1, 2))
    assert M.c == 5 and M.d == RingElement(2, 1, 2)


@settings(max_examples=1000, deadline=None)
@given(pairs())
def test_norm_multiplicative(xy):
    x, y = xy
    assert (x * y).norm() == x.norm() * y.norm()


@settings(max_examples=300, deadline=None)
@given(st.sampled_from(FIELDS).flatmap(lambda m: st.tuples(elements(m), elements(m), elements(m))))
def test_ring_laws(xyz):
    x, y, z = xyz
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert (x * y).conj() == x.conj() * y.conj()


@settings(max_examples=200, deadline=None)
@given(pairs())
def test_field_matches_complex(xy):
    x, y = xy
    if y.is_zero():
        return
    q = x / y
    assert isinstance(q, FieldElement)
    assert abs(q.to_complex() - x.to_field().to_complex() / y.to_field().to_complex()) < 1e-9
    assert q * y == x


@settings(max_examples=200, deadline=None)
@given(st.sampled_from((1, 2, 3, 7, 11)).flatmap(lambda m: st.tuples(elements(m), elements(m))))
def test_completed_matrices_have_det_one(cd):
    c, d = cd
    if c.is_zero() and d.is_zero():
        return
    g = IdealLevel(tuple(e for e in (c, d) if not e.is_zero()), c.m)
    if not g.is_unit_ideal():
        return
    M = complete_to_matrix(c, d)
    assert M.c == c and M.d == d
    assert M.a * M.d - M.b * M.c == 1


def test_rational_lowest_terms():
    f = FieldElement(Fraction(6, 4), Fraction(-3, 9), 2)
    assert f.x == Fraction(3, 2) and f.y.denominator == 3
