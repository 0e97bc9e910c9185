import functools
from dataclasses import dataclass

import pytest

from bianchi_cohomology.arith import parse_level
from bianchi_cohomology.complex import build_quotient, homology, presentation_and_abelianization
from bianchi_cohomology.ford import build_domain
from bianchi_cohomology.torsion import census, extract


@dataclass
class Run:
    m: int
    level: str
    eta: object
    domain: object
    cx: object
    homology: object
    sl: object
    psl: object

    @functools.cached_property
    def graphs(self):
        return {ell: extract(self.cx, ell) for ell in (2, 3)}

    @functools.cached_property
    def census2(self):
        return census(self.graphs[2], self.cx)

    @functools.cached_property
    def census3(self):
        return census(self.graphs[3], self.cx)


@functools.lru_cache(maxsize=None)
def pipeline(m: int, level: str) -> Run:
    eta = parse_level(level, m)
    dom = build_domain(eta)
    cx = build_quotient(dom)
    return Run(
        m,
        level,
        eta,
        dom,
        cx,
        homology(cx),
        presentation_and_abelianization(cx),
        presentation_and_abelianization(cx, projective=True),
    )


# every level the geometric tests touch; the property suites iterate over these
EXAMPLE_LEVELS = (
    (2, "sqrt(-2)"),
    (2, "2"),
    (2, "5"),
    (2, "1+sqrt(-2)"),
    (2, "3+2*sqrt(-2)"),
    (2, "1-sqrt(-2)"),
    (2, "2+sqrt(-2)"),
    (11, "2"),
    (11, "(-1+sqrt(-11))/2"),
    (11, "sqrt(-11)"),
    (7, "sqrt(-7)"),
)


@pytest.fixture(scope="session")
def run():
    return pipeline


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
