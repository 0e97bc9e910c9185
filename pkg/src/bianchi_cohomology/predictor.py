"""Number-theoretic prediction of the reduced 2-torsion component census of Gamma_0(eta)."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt

from sympy import divisors, primefactors

from .arith import IdealLevel, RingElement, check_m, discriminant, format_level


class DiscriminantExcluded(ValueError):
    pass


class _Unknown:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "Unknown"

    __str__ = __repr__


Unknown = _Unknown()


@dataclass(frozen=True)
class DiscriminantProfile:
    delta: int
    m: int
    t: int
    residues: dict[int, int] = field(compare=False)

    @classmethod
    def of(cls, m: int) -> DiscriminantProfile:
        check_m(m)
        d = discriminant(m)
        ps = primefactors(-d)
        return cls(d, m, len(ps), {p: p % 8 for p in ps})

    @property
    def odd_primes(self) -> list[int]:
        return [p for p in self.residues if p != 2]


@dataclass(frozen=True)
class PredictedCensus:
    m: int
    level: str
    iota_count: int | _Unknown
    theta_count: int | _Unknown
    dumbbell_count: int | _Unknown
    notes: tuple[str, ...] = ()

    def counts(self) -> dict[str, int | _Unknown]:
        return {"i": self.iota_count, "theta": self.theta_count, "db": self.dumbbell_count}

    def multiset(self) -> tuple[str, ...] | None:
        """Non-circle component symbols, or None if any count is unknown."""
        out: list[str] = []
        for tag, n in self.counts().items():
            if n is Unknown:
                return None
            out += [tag] * n
        return tuple(out)

    def to_json(self) -> dict:
        enc = lambda v: "unknown" if v is Unknown else v  # noqa: E731
        return {
            "m": self.m,
            "level": self.level,
            "iota_count": enc(self.iota_count),
            "theta_count": enc(self.theta_count),
            "dumbbell_count": enc(self.dumbbell_count),
            "notes": list(self.notes),
        }


def pell_representable_2(m: int) -> bool:
    """Is x^2 - m y^2 = 2 solvable in integers?"""
    check_m(m)
    r = isqrt(m)
    if r * r == m:
        raise ValueError("m must not be a square")
    # convergents of sqrt(m): p_k^2 - m q_k^2 runs through every value of absolute
    # value below sqrt(m) represented by the form, within one period
    bound = 4 * (r + 1)
    P, Q, a = 0, 1, r
    p_prev, p = 1, a
    q_prev, q = 0, 1
    for _ in range(bound):
        if p * p - m * q * q == 2:
            return True
        P = a * Q - P
        Q = (m - P * P) // Q
        a = (r + P) // Q
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    # |N| = 2 exceeds sqrt(m) only for m <= 3; cover it with a direct search
    for y in range(0, 10**4 + 1):
        x2 = 2 + m * y * y
        x = isqrt(x2)
        if x * x == x2:
            return True
    return False


def _ideal_two(m: int) -> IdealLevel:
    return IdealLevel((RingElement(2, 0, m),), m)


def predict(m: int, eta: IdealLevel) -> PredictedCensus:
    prof = DiscriminantProfile.of(m)
    if prof.delta == -4:
        raise DiscriminantExcluded("the Gaussian field (discriminant -4) is excluded")
    two = _ideal_two(m)
    is_two = eta.same_ideal(two)
    sq_two = (eta * eta).same_ideal(two)
    t = prof.t
    odd = prof.odd_primes
    notes: list[str] = []

    iota: int | _Unknown = 0
    if is_two and m % 8 == 3 and all(p % 8 in (1, 3) for p in prof.residues):
        iota = 2 ** (t - 1)
        notes.append("iota: eta = <2>, m = 3 mod 8, all p | D are 1 or 3 mod 8")
    else:
        notes.append("iota: none, existence condition fails")

    q8 = False
    if m % 4 != 3:
        if is_two and all(p % 4 == 1 for p in odd):
            q8 = True
            notes.append("Q8 exist: eta = <2>, all odd p | D are 1 mod 4")
        elif sq_two and all(d % 8 != 7 for d in divisors(-prof.delta)):
            q8 = True
            notes.append("Q8 exist: eta^2 = <2>, no divisor of D is 7 mod 8")

    if not q8:
        notes.append("Q8: none, so no theta or dumbbell components")

    theta: int | _Unknown = 0
    dumbbell: int | _Unknown = 0
    if q8:
        pell = m % 4 == 2 and sq_two and pell_representable_2(m)
        if sq_two and m % 4 == 2 and pell:
            dumbbell = 2 ** (t - 1)
            notes.append("dumbbell: eta^2 = <2>, m = 2 mod 4, x^2 - m y^2 = 2 solvable")
        else:
            if is_two:
                theta = 2 ** (t - 1)
                notes.append("theta: eta = <2>")
            elif sq_two and all(p % 8 == 1 for p in odd):
                theta = 2 ** (t - 1)
                notes.append("theta: eta^2 = <2>, all odd p | D are 1 mod 8")
            elif sq_two and any(p % 8 in (3, 5) for p in prof.residues):
                theta = 2 ** (t - 2)
                notes.append("theta: eta^2 = <2>, some p | D is 3 or 5 mod 8")
            else:
                theta = Unknown
                notes = []  # no clause decides theta versus dumbbell
    return PredictedCensus(m, format_level(eta), iota, theta, dumbbell, tuple(notes))
