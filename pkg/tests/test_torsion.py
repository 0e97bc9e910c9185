import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bianchi_cohomology.torsion import (
    CIRCLE,
    DUMBBELL,
    IOTA,
    THETA,
    TorsionGraph,
    UnknownComponent,
    census,
    classify,
    reduce,
    subdivide_edge,
)

from conftest import EXAMPLE_LEVELS, pipeline

# (m, level) -> (l=2 components, l=3 components)
SECTION_TABLE = {
    (2, "sqrt(-2)"): ("db", "empty"),
    (2, "2"): ("theta", "empty"),
    (2, "5"): ("o o", "o o"),
    (2, "1+sqrt(-2)"): ("empty", "o"),
    (2, "3+2*sqrt(-2)"): ("o o", "empty"),
    (11, "2"): ("i", "o o"),
    (11, "(-1+sqrt(-11))/2"): ("empty", "o"),
}


@pytest.mark.parametrize("key", sorted(SECTION_TABLE))
def test_component_table(key):
    r = pipeline(*key)
    want2, want3 = SECTION_TABLE[key]
    assert r.census2.symbols() == want2
    assert r.census3.symbols() == want3


def test_census_sqrt_minus_2():
    c = pipeline(2, "sqrt(-2)").census2
    assert (c.k, c.m, c.n, c.v, c.chi, c.c) == (0, 2, 0, 2, -1, 0)
    assert c.sign_v == 1


def test_census_level_5():
    c = pipeline(2, "5").census2
    assert c.k == 2 and c.c == 1
    assert (c.m, c.n, c.v, c.chi) == (0, 0, 0, 0)


def test_empty_subcomplex_census():
    c = pipeline(2, "1+sqrt(-2)").census2
    assert (c.k, c.m, c.n, c.v, c.chi, c.c) == (0, 0, 0, 0, 0, 0)
    assert c.multiset == ()


def test_chain_between_tetrahedral_vertices_reduces_to_iota():
    g = TorsionGraph(
        2,
        {0: "Te", 1: "Z/4", 2: "Z/4", 3: "Te"},
        {10: (0, 1, "Z/4"), 11: (1, 2, "Z/4"), 12: (2, 3, "Z/4")},
    )
    red = reduce(g)
    assert red.vertices == {0: "Te", 3: "Te"}
    assert len(red.edges) == 1
    assert sorted(red.paths[next(iter(red.edges))]) == [10, 11, 12]
    assert [t.tag for t in classify(red)] == [IOTA]


def test_theta_is_a_fixed_point():
    g = TorsionGraph(2, {0: "Q8", 1: "Q8"}, {0: (0, 1, "Z/4"), 1: (0, 1, "Z/4"), 2: (1, 0, "Z/4")})
    red = reduce(g)
    assert red.vertices == g.vertices and red.edges == g.edges
    assert [t.tag for t in classify(red)] == [THETA]


def test_dumbbell_and_circle_shapes():
    g = TorsionGraph(
        2,
        {0: "Q8", 1: "Q8", 2: "Z/4", 3: "Z/4"},
        {0: (0, 0, "Z/4"), 1: (0, 1, "Z/4"), 2: (1, 1, "Z/4"), 3: (2, 3, "Z/4"), 4: (3, 2, "Z/4")},
    )
    assert [t.tag for t in classify(g)] == [CIRCLE, DUMBBELL]


def test_unknown_component_is_reported():
    g = TorsionGraph(2, {0: "Q8", 1: "Te"}, {0: (0, 1, "Z/4"), 1: (0, 0, "Z/4")})
    with pytest.raises(UnknownComponent, match="vertices"):
        classify(g)


@pytest.mark.parametrize("m,level", EXAMPLE_LEVELS)
def test_degree_law(m, level):
    r = pipeline(m, level)
    red = reduce(r.graphs[2])
    for v, typ in red.vertices.items():
        want = {"Q8": 3, "Te": 1, "Z/4": 2}[typ]
        assert red.degree(v) == want
    for _, _, typ in red.edges.values():
        assert typ == "Z/4"


@pytest.mark.parametrize("m,level", EXAMPLE_LEVELS)
@pytest.mark.parametrize("ell", (2, 3))
def test_census_invariants(m, level, ell):
    r = pipeline(m, level)
    c = r.census2 if ell == 2 else r.census3
    assert c.m % 2 == 0 and c.n % 2 == 0
    assert c.v == c.m + c.n
    assert c.sign_v in (0, 1)
    if ell == 2:
        assert c.chi == c.n // 2 - c.m // 2
    else:
        assert set(c.multiset) <= {CIRCLE, IOTA}
    assert c.extra["c_reduced"] == c.c


def _signature(c):
    return (c.k, c.m, c.n, c.v, c.chi, c.c, c.multiset)


@pytest.mark.parametrize("m,level", EXAMPLE_LEVELS)
def test_census_invariant_under_each_subdivision(m, level):
    r = pipeline(m, level)
    g = r.graphs[2]
    base = _signature(r.census2)
    for e in sorted(g.edges):
        g2, ch = subdivide_edge(g, r.cx, e)
        assert _signature(census(g2, ch)) == base


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([lv for lv in EXAMPLE_LEVELS if pipeline(*lv).graphs[2].edges]), st.data())
def test_census_invariant_under_repeated_subdivision(lv, data):
    r = pipeline(*lv)
    g, ch = r.graphs[2], r.cx
    for _ in range(data.draw(st.integers(1, 3))):
        e = data.draw(st.sampled_from(sorted(g.edges)))
        g, ch = subdivide_edge(g, ch, e)
    assert _signature(census(g, ch)) == _signature(r.census2)
