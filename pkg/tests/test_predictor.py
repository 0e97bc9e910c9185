from math import isqrt

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import factorint

from bianchi_cohomology.arith import IdealLevel, RingElement, discriminant, parse_level
from bianchi_cohomology.predictor import (
    DiscriminantExcluded,
    DiscriminantProfile,
    Unknown,
    pell_representable_2,
    predict,
)

from tables import NONEMPTY, component_counts


def _brute_pell(m, bound=2000):
    return any(isqrt(2 + m * y * y) ** 2 == 2 + m * y * y for y in range(bound))


@pytest.mark.parametrize("m,want", [(2, True), (6, False), (14, True), (10, False), (34, True)])
def test_pell_examples(m, want):
    assert pell_representable_2(m) is want


@pytest.mark.parametrize("m", [m for m in range(2, 200) if m % 4 == 2 and all(e == 1 for e in factorint(m).values())])
def test_pell_matches_search(m):
    assert pell_representable_2(m) == _brute_pell(m)


@pytest.mark.parametrize("row", NONEMPTY, ids=lambda r: f"{r[0]}-{r[1]}")
def test_table_component_column(row):
    m, level, comps = row[:3]
    p = predict(m, parse_level(level, m))
    want = component_counts(comps)
    for tag, n in p.counts().items():
        if n is Unknown:
            assert p.notes == ()
            continue
        assert n == want[tag]
    assert p.notes


def test_worked_predictions():
    p = predict(11, parse_level("2", 11))
    assert (p.iota_count, p.theta_count, p.dumbbell_count) == (1, 0, 0)
    p = predict(2, parse_level("sqrt(-2)", 2))
    assert p.dumbbell_count == 1 and p.theta_count == 0
    p = predict(2, parse_level("2", 2))
    assert p.theta_count == 1


def test_m14_level_2_has_trace():
    p = predict(14, parse_level("2", 14))
    assert p.multiset() == ()
    assert any("Q8" in n for n in p.notes)


def test_gaussian_field_excluded():
    with pytest.raises(DiscriminantExcluded):
        predict(1, parse_level("2", 1))


def test_profile():
    prof = DiscriminantProfile.of(10)
    assert prof.delta == -40 and prof.t == 2
    assert prof.residues == {2: 2, 5: 5}
    assert DiscriminantProfile.of(11).delta == -11


def _squarefree(m):
    return m > 1 and all(e == 1 for e in factorint(m).values())


def _levels(m):
    out = [IdealLevel((RingElement(2, 0, m),), m)]
    if m % 4 == 2:
        out.append(parse_level("[2, sqrt(-%d)]" % m, m))
    elif m % 4 == 1:
        out.append(parse_level("[2, 1+sqrt(-%d)]" % m, m))
    return out


fields = st.integers(2, 400).filter(_squarefree)


@settings(max_examples=150, deadline=None)
@given(fields, st.integers(0, 1))
def test_theta_and_dumbbell_exclusive(m, which):
    levels = _levels(m)
    p = predict(m, levels[which % len(levels)])
    both = [p.theta_count, p.dumbbell_count]
    if Unknown not in both:
        assert not (both[0] > 0 and both[1] > 0)


@settings(max_examples=150, deadline=None)
@given(fields, st.integers(0, 1))
def test_positive_counts_exclude_seven_mod_eight(m, which):
    levels = _levels(m)
    p = predict(m, levels[which % len(levels)])
    counts = [n for n in p.counts().values() if n is not Unknown]
    if any(n > 0 for n in counts):
        primes = factorint(-discriminant(m))
        assert all(q % 8 != 7 for q in primes)


@settings(max_examples=100, deadline=None)
@given(fields)
def test_counts_are_powers_of_two(m):
    for eta in _levels(m):
        for n in predict(m, eta).counts().values():
            if n is not Unknown and n:
                assert n & (n - 1) == 0
