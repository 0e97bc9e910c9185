from fractions import Fraction

import pytest

from bianchi_cohomology.arith import Matrix2, RingElement, gamma0_index, in_gamma0, parse_level
from bianchi_cohomology.ford import (
    BudgetExceeded,
    FixesInfinity,
    UnsupportedField,
    act,
    bianchi_covolume,
    build_domain,
    covers,
    domain_to_json,
    domain_volume,
    isometric_sphere,
    swan_enumerate,
)

from conftest import EXAMPLE_LEVELS, pipeline


def _complex_height2(m, spheres, x, y):
    """Float height^2 of the envelope above x + y w, scanning lattice translates."""
    w = complex(-0.5, (m**0.5) / 2) if m % 4 == 3 else complex(0, m**0.5)
    z = x + y * w
    best = -1.0
    for s in spheres:
        c0 = s.center.to_complex()
        for a in range(-2, 3):
            for b in range(-2, 3):
                c = c0 + a + b * w
                best = max(best, float(s.radius_sq) - abs(z - c) ** 2)
    return best


def test_full_group_m11_vertices():
    dom = build_domain(parse_level("1", 11))
    got = {(v.x, v.y, v.h2) for v in dom.vertices}
    assert got == {(Fraction(3, 11), Fraction(6, 11), Fraction(2, 11)), (Fraction(8, 11), Fraction(5, 11), Fraction(2, 11))}


def test_m11_six_points_reduce_to_two_classes():
    m = 11
    pts = [(Fraction(3, 11), Fraction(6, 11)), (Fraction(-3, 11), Fraction(5, 11)), (Fraction(8, 11), Fraction(5, 11))]
    classes = set()
    for x, y in pts:
        for s in (1, -1):
            classes.add(((s * x) % 1, (s * y) % 1))
    assert classes == {(Fraction(3, 11), Fraction(6, 11)), (Fraction(8, 11), Fraction(5, 11))}
    # each lies at height^2 2/11 below the unit spheres of the full group
    dom = build_domain(parse_level("1", m))
    for x, y in pts:
        assert _complex_height2(m, dom.spheres, x, y) == pytest.approx(2 / 11, abs=1e-12)


def test_sqrt_minus_11_sphere_counts():
    dom = build_domain(parse_level("sqrt(-11)", 11))
    radii = [s.radius_sq for s in dom.spheres]
    assert radii.count(Fraction(1, 11)) == 10
    assert radii.count(Fraction(1, 33)) == 4
    assert len(radii) == 14
    assert dom.min_height_sq() == Fraction(2, 121)


def test_isometric_sphere_examples():
    M = Matrix2.from_ints(2, 1, 0, 5, 1)
    s = isometric_sphere(M)
    assert s.radius_sq == Fraction(1, 25)
    assert s.center.x == Fraction(-1, 5) and s.center.y == 0
    with pytest.raises(FixesInfinity):
        isometric_sphere(Matrix2.from_ints(2, 1, 1, 0, 1))


def test_covers():
    s = isometric_sphere(Matrix2.from_ints(2, 0, -1, 1, 0))
    assert covers(s, RingElement(0, 0, 2).to_field())
    assert not covers(s, RingElement(1, 0, 2).to_field())


def test_unsupported_field():
    with pytest.raises(UnsupportedField):
        swan_enumerate(parse_level("2", 5))


def test_budget_exceeded_carries_partial_system():
    with pytest.raises(BudgetExceeded) as info:
        swan_enumerate(parse_level("5", 2), budget=2, start=2)
    assert info.value.partial is not None


@pytest.mark.parametrize("m,level", EXAMPLE_LEVELS)
def test_pairings_lie_in_gamma0_and_map_faces(m, level):
    dom = pipeline(m, level).domain
    assert dom.pairings and len(dom.pairings) == len(dom.faces)
    for i, (j, g) in dom.pairings.items():
        assert in_gamma0(g, dom.level)
        img = sorted(act(g, p) for p in dom.faces[i].points)
        assert img == sorted(dom.faces[j].points)
        back, _ = dom.pairings[j]
        assert back == i


@pytest.mark.parametrize("m,level", EXAMPLE_LEVELS)
def test_vertices_lie_on_envelope(m, level):
    dom = pipeline(m, level).domain
    for v in dom.vertices:
        h = _complex_height2(m, dom.spheres, v.x, v.y)
        assert h == pytest.approx(float(v.h2), abs=1e-12)


@pytest.mark.parametrize("m,level", [(2, "1"), (2, "5"), (11, "1"), (11, "sqrt(-11)"), (7, "sqrt(-7)")])
def test_volume_ratio_is_index(m, level):
    dom = build_domain(parse_level(level, m))
    ratio = domain_volume(dom) / bianchi_covolume(m)
    assert ratio == pytest.approx(gamma0_index(dom.level), rel=1e-9)


def test_domain_json_is_exact():
    data = domain_to_json(pipeline(11, "sqrt(-11)").domain)
    assert data["m"] == 11
    assert all(isinstance(c, str) for s in data["spheres"] for c in s["center"])
    assert len(data["pairings"]) == len(data["faces"])
