"""Mod-2 cohomology of Gamma_0(eta) from the equivariant spectral sequence.

The E_2 page is assembled from the quotient Betti numbers and the reduced
2-torsion census; d_2 ranks come from vanishing rules, from the abelianization
through the universal coefficient theorem, or from supplied override records.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .torsion import CIRCLE, DUMBBELL, IOTA, THETA, TorsionCensus


class CohomologyError(Exception):
    pass


class ParityError(CohomologyError):
    pass


class InconsistentCensus(CohomologyError):
    pass


class NegativeRank(CohomologyError):
    pass


class MissingRank(CohomologyError):
    pass


class UnlistedInclusion(CohomologyError):
    pass


class FiniteCohomologyTable:
    """dim H^q(G; F_2) for the finite subgroups of SL_2 over imaginary quadratic orders."""

    PERIODIC = {
        "Z/2": (1, 1, 1, 1),
        "Z/4": (1, 1, 1, 1),
        "Z/6": (1, 1, 1, 1),
        "Di": (1, 1, 1, 1),
        "Q8": (1, 2, 2, 1),
        "Te": (1, 0, 0, 1),
    }

    @classmethod
    def dim(cls, group: str, q: int) -> int:
        if q < 0:
            return 0
        if group == "trivial":
            return 1 if q == 0 else 0
        try:
            return cls.PERIODIC[group][q % 4]
        except KeyError:
            raise ValueError(f"unknown group type {group!r}") from None


def restriction_table(source: str, target: str, q: int) -> int:
    """Rank of res: H^q(source; F_2) -> H^q(target; F_2) for one embedded copy."""
    if q < 0:
        raise ValueError("degree must be nonnegative")
    if source == target:
        return FiniteCohomologyTable.dim(source, q)
    if q == 0 and (source, target) in _LISTED:
        return 1
    if (source, target) == ("Di", "Z/4"):
        return 1
    if (source, target) == ("Z/6", "Z/2"):
        return 1
    if (source, target) == ("Q8", "Z/4"):
        return {0: 1, 1: 1, 2: 0, 3: 0}[q % 4]
    if (source, target) == ("Te", "Z/4"):
        return 1 if q % 4 == 0 else 0
    if (source, target) in (("Z/4", "Z/2"), ("Di", "Z/2"), ("Di", "Z/6")):
        # e_2 -> e_1^2 and the exterior class dies
        return 1 if q % 2 == 0 else 0
    if (source, target) in (("Q8", "Z/2"), ("Te", "Z/2"), ("Te", "Z/6")):
        return 1 if q % 4 == 0 else 0
    raise UnlistedInclusion(f"no restriction rule for {source} -> {target}")


_LISTED = {
    ("Di", "Z/4"), ("Z/6", "Z/2"), ("Q8", "Z/4"), ("Te", "Z/4"), ("Z/4", "Z/2"),
    ("Di", "Z/2"), ("Di", "Z/6"), ("Q8", "Z/2"), ("Te", "Z/2"), ("Te", "Z/6"),
}


def q8_restriction_rows(q: int) -> tuple[tuple[int, ...], ...]:
    """Matrices of H^q(Q8) -> H^q(Z/4) for the three cyclic subgroups, in a fixed basis.

    In degree 1 mod 4 each basis class x, y is non-zero on exactly two of the three
    subgroups: x on the first and third, y on the second and third.
    """
    r = q % 4
    if r == 1:
        return ((1, 0), (0, 1), (1, 1))
    if r == 0:
        return ((1,), (1,), (1,))
    if r == 2:
        return ((0, 0), (0, 0), (0, 0))
    return ((0,), (0,), (0,))


def component_e2(m: int, n: int, k: int = 0) -> dict[tuple[int, int], int]:
    """E_2^{p,q}(X_s) for p in {0, 1} and q mod 4, from non-circle and circle components."""
    if m % 2 or n % 2:
        raise ParityError(f"m = {m} and n = {n} must both be even")
    p0 = (m // 2 + n // 2, m, 2 * m, m + n)
    p1 = (m, m // 2 + n // 2, 3 * m // 2 + n // 2, 3 * m // 2 + n // 2)
    out = {}
    for qc in range(4):
        out[(0, qc)] = p0[qc] + k
        out[(1, qc)] = p1[qc] + k
    return out


def d1_rank_degree1(component: str) -> int:
    """dim ker d_1^{0,1} on one non-circle component, equal to its first Betti number."""
    if component == CIRCLE:
        raise ValueError("circle components are handled separately")
    return {THETA: 2, DUMBBELL: 2, IOTA: 0}[component]


def _sign(v: int) -> int:
    return 1 if v > 0 else 0


@dataclass(frozen=True)
class E2Page:
    entries: dict  # (p, q mod 4) -> dim
    a1: int
    a2: int
    a3: int
    empty: bool

    def dim(self, p: int, q: int) -> int:
        if p not in (0, 1, 2) or q < 0:
            return 0
        return self.entries[(p, q % 4)]

    def rows(self) -> list[tuple[int, int, int]]:
        return [tuple(self.entries[(p, qc)] for p in range(3)) for qc in range(4)]


def _check_census(census: TorsionCensus) -> None:
    if census.v != census.m + census.n:
        raise InconsistentCensus("v must equal m + n")
    if census.m % 2 or census.n % 2:
        raise ParityError(f"m = {census.m} and n = {census.n} must both be even")


def is_empty(census: TorsionCensus) -> bool:
    return census.k == 0 and census.v == 0


def e2_page(census: TorsionCensus, beta1: int, beta2: int) -> E2Page:
    _check_census(census)
    if is_empty(census):
        e = {(p, qc): (1, beta1, beta2)[p] for p in range(3) for qc in range(4)}
        return E2Page(e, 0, 0, 0, True)
    m, n, k, v, c = census.m, census.n, census.k, census.v, census.c
    a1 = census.chi - 1 + beta1 + c
    a2 = beta2 + c
    a3 = beta1 + v - _sign(v)
    ce = component_e2(m, n, k)
    e = {
        (0, 0): 1, (1, 0): beta1, (2, 0): beta2,
        (0, 1): ce[(0, 1)], (1, 1): ce[(1, 1)] + a1, (2, 1): a2,
        (0, 2): 2 * m + 1 - _sign(v), (1, 2): a3, (2, 2): beta2,
        (0, 3): ce[(0, 3)], (1, 3): ce[(1, 3)] + a1, (2, 3): a2,
    }
    if any(x < 0 for x in e.values()):
        raise InconsistentCensus(f"negative E_2 entry: {e}")
    return E2Page(e, a1, a2, a3, False)


PROVENANCE = ("lemma-forced", "abelianization", "supplied", "unknown")


@dataclass(frozen=True)
class D2Ranks:
    """Ranks r^{0,q} of d_2: E_2^{0,q} -> E_2^{2,q-1} for q = 1, 2, 3 mod 4; None if unknown."""

    r01: int | None
    r02: int | None
    r03: int | None
    provenance: dict = field(default_factory=dict, compare=False)

    def get(self, name: str) -> int | None:
        return getattr(self, name)

    def to_json(self) -> dict:
        return {
            name: {"value": self.get(name), "provenance": self.provenance.get(name, "unknown")}
            for name in ("r01", "r02", "r03")
        }


def e2_01(census: TorsionCensus) -> int:
    """dim E_2^{0,1}, the term fed into the universal coefficient identity."""
    if is_empty(census):
        return 1
    return census.m + census.k


def d2_ranks(
    census: TorsionCensus,
    beta1: int | None = None,
    hom_gamma: int | None = None,
    overrides: dict | None = None,
) -> D2Ranks:
    """d_2 ranks from the vanishing rules, the abelianization and optional overrides."""
    _check_census(census)
    vals: dict[str, int | None] = {"r01": None, "r02": None, "r03": None}
    prov = {name: "unknown" for name in vals}

    def put(name, value, how):
        if value is not None and value < 0:
            raise NegativeRank(f"{name} = {value} < 0")
        vals[name] = value
        prov[name] = how

    if is_empty(census):
        for name in vals:
            put(name, 0, "lemma-forced")
    else:
        circles_only = census.v == 0
        if hom_gamma is not None and beta1 is not None:
            put("r01", e2_01(census) + beta1 - hom_gamma, "abelianization")
        if census.c == 0 or circles_only:
            put("r02", 0, "lemma-forced")
        if census.k == 0:
            put("r03", 0, "lemma-forced")
        elif circles_only and vals["r01"] is not None:
            put("r03", vals["r01"], "lemma-forced")
        elif vals["r01"] == 0:
            # r03 lives on the circles, where it equals the circle part of r01
            put("r03", 0, "lemma-forced")
    for name, value in (overrides or {}).items():
        if name not in vals:
            raise KeyError(f"unknown rank {name!r} in overrides")
        if vals[name] is not None and prov[name] == "lemma-forced" and vals[name] != value:
            raise InconsistentCensus(f"override {name} = {value} contradicts a forced value {vals[name]}")
        put(name, int(value), "supplied")
    return D2Ranks(vals["r01"], vals["r02"], vals["r03"], prov)


@dataclass(frozen=True)
class Dim:
    """A dimension that may still subtract unknown d_2 ranks."""

    value: int
    unknown: tuple[str, ...] = ()

    @property
    def known(self) -> bool:
        return not self.unknown

    def __str__(self):
        return str(self.value) + "".join(f"-{u}" for u in self.unknown)

    def __int__(self):
        if self.unknown:
            raise MissingRank(f"dimension {self} depends on unknown ranks")
        return self.value


def _dim(const: int, ranks: D2Ranks, used: tuple[str, ...]) -> Dim:
    value = const
    missing = []
    for name in used:
        r = ranks.get(name)
        if r is None:
            missing.append(name)
        else:
            value -= r
    return Dim(value, tuple(missing))


@dataclass(frozen=True)
class DimensionProfile:
    h1: Dim
    h_mod4: tuple[Dim, Dim, Dim, Dim]  # q = 2, 3, 4, 5 and every q' = q mod 4 above
    beta1: int
    beta2: int
    census: TorsionCensus
    ranks: D2Ranks
    case: str

    def h(self, q: int) -> Dim:
        if q < 1:
            raise ValueError("q must be at least 1")
        if q == 1:
            return self.h1
        return self.h_mod4[(q - 2) % 4]

    def values(self, upto: int = 5) -> list[Dim]:
        return [self.h(q) for q in range(1, upto + 1)]

    @property
    def symbolic(self) -> bool:
        return not all(d.known for d in (self.h1, *self.h_mod4))

    def numeric(self, upto: int = 5) -> tuple[int, ...]:
        return tuple(int(d) for d in self.values(upto))


def dimension_profile(
    census: TorsionCensus, beta1: int, beta2: int, ranks: D2Ranks, strict: bool = False
) -> DimensionProfile:
    """dim H^q(Gamma; F_2) for q >= 1, four-periodic from q = 2 on."""
    _check_census(census)
    b1, b2 = beta1, beta2
    m, n, k, c = census.m, census.n, census.k, census.c
    if is_empty(census):
        case = "empty"
        h1 = Dim(b1 + 1)
        rest = (Dim(b2 + b1 + 1),) * 4
    elif census.v == 0:
        case = "circles"
        h1 = _dim(b1 + k, ranks, ("r01",))
        rest = (_dim(b2 + b1 + k + c, ranks, ("r01",)),) * 4
    else:
        case = "general"
        h1 = _dim(b1 + m + k, ranks, ("r01",))
        rest = (
            _dim(b2 + b1 + 2 * m + n + k - 1 + c, ranks, ("r01", "r02")),
            _dim(b2 + b1 + 2 * (m + n) + k - 1 + c, ranks, ("r03", "r02")),
            _dim(b2 + b1 + m + n + k + c, ranks, ("r03",)),
            _dim(b2 + b1 + m + k + c, ranks, ("r01",)),
        )
    prof = DimensionProfile(h1, tuple(rest), b1, b2, census, ranks, case)
    if strict and prof.symbolic:
        raise MissingRank("profile depends on unknown d_2 ranks: " + ", ".join(str(d) for d in prof.values()))
    for d in prof.values():
        if d.known and d.value < 0:
            raise NegativeRank(f"negative cohomology dimension {d.value}")
    return prof


# override records


@dataclass(frozen=True)
class OverrideRecord:
    m: int
    level: str
    ranks: dict
    source: str


def load_overrides(path: str | Path | None = None) -> list[OverrideRecord]:
    """Rank overrides from a JSON file; the built-in file when no path is given."""
    if path is None:
        text = resources.files("bianchi_cohomology").joinpath("data/overrides.json").read_text()
    else:
        text = Path(path).read_text()
    data = json.loads(text)
    out = []
    for rec in data.get("records", []):
        ranks = {k: int(v) for k, v in rec["ranks"].items()}
        out.append(OverrideRecord(int(rec["m"]), rec["level"], ranks, rec.get("source", "")))
    return out


def find_override(records: list[OverrideRecord], m: int, eta) -> dict | None:
    from .arith import parse_level

    for rec in records:
        if rec.m == m and parse_level(rec.level, m).same_ideal(eta):
            return dict(rec.ranks)
    return None
