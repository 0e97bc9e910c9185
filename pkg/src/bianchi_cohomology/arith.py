"""Exact arithmetic in imaginary quadratic orders and their fraction fields.

Elements are written on the integral basis {1, w} where w = sqrt(-m) when
m = 1, 2 (mod 4) and w = (-1 + sqrt(-m))/2 when m = 3 (mod 4).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterator, Sequence, Union

from sympy import factorint, isprime

Rational = Fraction
EUCLIDEAN_FIELDS = (1, 2, 3, 7, 11)


class ArithmeticError_(ValueError):
    pass


class NoWitness(ArithmeticError_):
    pass


class LevelSyntaxError(ArithmeticError_):
    pass


def is_squarefree(n: int) -> bool:
    return n > 0 and all(e == 1 for e in factorint(n).values())


def check_m(m: int) -> int:
    if not isinstance(m, int) or not is_squarefree(m):
        raise ValueError(f"m must be a square-free positive integer, got {m!r}")
    return m


def omega_mode(m: int) -> int:
    """1 when w = sqrt(-m), 2 when w = (-1 + sqrt(-m))/2."""
    return 2 if m % 4 == 3 else 1


def discriminant(m: int) -> int:
    return -m if m % 4 == 3 else -4 * m


def _mul(m, a, b, c, d):
    # (a + b w)(c + d w)
    if m % 4 == 3:
        k = (m + 1) // 4
        return a * c - k * b * d, a * d + b * c - b * d
    return a * c - m * b * d, a * d + b * c


def _conj(m, a, b):
    if m % 4 == 3:
        return a - b, -b
    return a, -b


def _norm(m, a, b):
    if m % 4 == 3:
        return a * a - a * b + (m + 1) // 4 * b * b
    return a * a + m * b * b


def _trace(m, a, b):
    return 2 * a - b if m % 4 == 3 else 2 * a


@dataclass(frozen=True, order=True)
class RingElement:
    """a + b w in the maximal order of Q(sqrt(-m))."""

    a: int
    b: int
    m: int = field(compare=False)

    def __post_init__(self):
        if not isinstance(self.a, int) or not isinstance(self.b, int):
            raise TypeError("RingElement coordinates must be integers")

    def _coerce(self, other) -> RingElement:
        if isinstance(other, RingElement):
            if other.m != self.m:
                raise ValueError("elements of different orders")
            return other
        if isinstance(other, int):
            return RingElement(other, 0, self.m)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RingElement(self.a + o.a, self.b + o.b, self.m)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RingElement(self.a - o.a, self.b - o.b, self.m)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return RingElement(-self.a, -self.b, self.m)

    def __mul__(self, other):
        if isinstance(other, FieldElement):
            return self.to_field() * other
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return RingElement(*_mul(self.m, self.a, self.b, o.a, o.b), self.m)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self.to_field() / other

    def __eq__(self, other):
        if isinstance(other, int):
            return self.a == other and self.b == 0
        if isinstance(other, RingElement):
            return (self.a, self.b, self.m) == (other.a, other.b, other.m)
        if isinstance(other, FieldElement):
            return self.to_field() == other
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.m))

    def conj(self) -> RingElement:
        return RingElement(*_conj(self.m, self.a, self.b), self.m)

    def norm(self) -> int:
        return _norm(self.m, self.a, self.b)

    def trace(self) -> int:
        return _trace(self.m, self.a, self.b)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def to_field(self) -> FieldElement:
        return FieldElement(Fraction(self.a), Fraction(self.b), self.m)

    def divides(self, other: RingElement) -> bool:
        if self.is_zero():
            return other.is_zero()
        return (other / self).is_integral()

    def exact_div(self, other) -> RingElement:
        q = self / other
        if not q.is_integral():
            raise ArithmeticError_(f"{other} does not divide {self}")
        return q.to_ring()

    def __repr__(self):
        return format_element(self.a, self.b)


@dataclass(frozen=True)
class FieldElement:
    """x + y w in Q(sqrt(-m)) with rational coordinates."""

    x: Fraction
    y: Fraction
    m: int

    def __post_init__(self):
        if not isinstance(self.x, Fraction):
            object.__setattr__(self, "x", Fraction(self.x))
        if not isinstance(self.y, Fraction):
            object.__setattr__(self, "y", Fraction(self.y))

    def _coerce(self, other) -> FieldElement:
        if isinstance(other, FieldElement):
            if other.m != self.m:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, RingElement):
            return other.to_field()
        if isinstance(other, (int, Fraction)):
            return FieldElement(Fraction(other), Fraction(0), self.m)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.x + o.x, self.y + o.y, self.m)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(self.x - o.x, self.y - o.y, self.m)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FieldElement(-self.x, -self.y, self.m)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return FieldElement(*_mul(self.m, self.x, self.y, o.x, o.y), self.m)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.x == o.x and self.y == o.y and self.m == o.m

    def __hash__(self):
        if self.y == 0 and self.x.denominator == 1:
            return hash((int(self.x), 0, self.m))
        return hash((self.x, self.y, self.m))

    def conj(self) -> FieldElement:
        return FieldElement(*_conj(self.m, self.x, self.y), self.m)

    def norm(self) -> Fraction:
        return _norm(self.m, self.x, self.y)

    def trace(self) -> Fraction:
        return _trace(self.m, self.x, self.y)

    def inverse(self) -> FieldElement:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("inverse of zero")
        c = self.conj()
        return FieldElement(c.x / n, c.y / n, self.m)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0

    def is_integral(self) -> bool:
        return self.x.denominator == 1 and self.y.denominator == 1

    def to_ring(self) -> RingElement:
        if not self.is_integral():
            raise ArithmeticError_(f"{self} is not integral")
        return RingElement(int(self.x), int(self.y), self.m)

    def to_complex(self) -> complex:
        """Floating-point value, for plotting and sanity checks only."""
        if self.m % 4 == 3:
            re_ = float(self.x) - float(self.y) / 2
            im_ = float(self.y) * (self.m ** 0.5) / 2
        else:
            re_ = float(self.x)
            im_ = float(self.y) * self.m ** 0.5
        return complex(re_, im_)

    def __repr__(self):
        return format_element(self.x, self.y)


def format_element(a, b) -> str:
    def fmt(q):
        return str(q)

    if b == 0:
        return fmt(a)
    wb = "w" if b == 1 else "-w" if b == -1 else f"{fmt(b)}w"
    if a == 0:
        return wb
    if wb.startswith("-"):
        return f"{fmt(a)}{wb}"
    return f"{fmt(a)}+{wb}"


Number = Union[int, Fraction, RingElement, FieldElement]


def ring(a: int, b: int, m: int) -> RingElement:
    return RingElement(a, b, m)


def sqrt_neg(m: int) -> RingElement:
    """The element sqrt(-m) written on the basis {1, w}."""
    if m % 4 == 3:
        return RingElement(1, 2, m)
    return RingElement(0, 1, m)


def units(m: int) -> tuple[RingElement, ...]:
    if m == 1:
        return tuple(RingElement(a, b, m) for a, b in ((1, 0), (0, 1), (-1, 0), (0, -1)))
    if m == 3:
        # w is a primitive cube root of unity
        w = RingElement(0, 1, m)
        out, u = [], RingElement(1, 0, m)
        for _ in range(6):
            out.append(u)
            u = u * (-w * w)
        return tuple(out)
    return (RingElement(1, 0, m), RingElement(-1, 0, m))


def elements_of_norm_at_most(m: int, bound) -> Iterator[RingElement]:
    """All a + b w with norm <= bound, ordered by (norm, a, b)."""
    bound = Fraction(bound)
    if bound < 0:
        return iter(())
    out = []
    if m % 4 == 3:
        # norm = (a - b/2)^2 + m b^2 / 4
        bmax = isqrt(int(4 * bound / m)) + 1
        for b in range(-bmax, bmax + 1):
            rest = bound - Fraction(m * b * b, 4)
            if rest < 0:
                continue
            r = isqrt(int(rest)) + 2
            for a in range(b // 2 - r, b // 2 + r + 1):
                if _norm(m, a, b) <= bound:
                    out.append((_norm(m, a, b), a, b))
    else:
        bmax = isqrt(int(bound / m)) + 1
        for b in range(-bmax, bmax + 1):
            rest = bound - m * b * b
            if rest < 0:
                continue
            r = isqrt(int(rest)) + 1
            for a in range(-r, r + 1):
                if _norm(m, a, b) <= bound:
                    out.append((_norm(m, a, b), a, b))
    out.sort()
    return (RingElement(a, b, m) for _, a, b in out)


def lattice_points_near(center: FieldElement, radius_sq) -> list[RingElement]:
    """Ring elements d with norm(d - center) <= radius_sq."""
    m = center.m
    radius_sq = Fraction(radius_sq)
    out = []
    if radius_sq < 0:
        return out
    if m % 4 == 3:
        span_b = isqrt(int(4 * radius_sq / m) + 1) + 1
    else:
        span_b = isqrt(int(radius_sq / m) + 1) + 1
    span_a = isqrt(int(radius_sq) + 1) + span_b + 1
    b0 = int(center.y)
    a0 = int(center.x)
    for b in range(b0 - span_b - 1, b0 + span_b + 2):
        for a in range(a0 - span_a - 1, a0 + span_a + 2):
            dx, dy = a - center.x, b - center.y
            if _norm(m, dx, dy) <= radius_sq:
                out.append(RingElement(a, b, m))
    return out


def round_quotient(x: FieldElement) -> RingElement:
    """A ring element q minimising norm(x - q)."""
    best = None
    fx, fy = x.x.__floor__(), x.y.__floor__()
    for b in (fy - 1, fy, fy + 1, fy + 2):
        for a in (fx - 1, fx, fx + 1, fx + 2):
            n = _norm(x.m, x.x - a, x.y - b)
            key = (n, abs(a), abs(b), a, b)
            if best is None or key < best[0]:
                best = (key, a, b)
    return RingElement(best[1], best[2], x.m)


def euclid_divmod(n: RingElement, d: RingElement) -> tuple[RingElement, RingElement]:
    q = round_quotient(n / d)
    r = n - q * d
    if not r.norm() < d.norm():
        raise ArithmeticError_(f"Q(sqrt(-{n.m})) is not norm-Euclidean for this pair")
    return q, r


def ext_gcd(x: RingElement, y: RingElement) -> tuple[RingElement, RingElement, RingElement]:
    """Return (g, s, t) with s x + t y = g, a gcd of x and y (Euclidean fields only)."""
    m = x.m
    one, zero = RingElement(1, 0, m), RingElement(0, 0, m)
    r0, r1 = x, y
    s0, s1 = one, zero
    t0, t1 = zero, one
    while not r1.is_zero():
        q, r = euclid_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, s0 - q * s1
        t0, t1 = t1, t0 - q * t1
    return r0, s0, t0


# ---------------------------------------------------------------- ideals


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def hermite_basis(vectors: Sequence[tuple[int, int]]) -> tuple[int, int, int]:
    """Hermite form (alpha, beta, delta) of a full-rank lattice in Z^2.

    The lattice is spanned by (alpha, beta) and (0, delta), alpha, delta > 0,
    0 <= beta < delta.
    """
    alpha, w = 0, (0, 0)
    for x, y in vectors:
        g, s, t = _xgcd(alpha, x)
        if g == 0:
            continue
        w = (s * w[0] + t * x, s * w[1] + t * y)
        alpha = g
    if alpha == 0:
        raise ArithmeticError_("lattice is not of full rank")
    delta = 0
    for x, y in vectors:
        delta = gcd(delta, y - (x // alpha) * w[1])
    # the generating vector w itself is in the lattice
    delta = gcd(delta, w[1] - (w[0] // alpha) * w[1])
    if delta == 0:
        raise ArithmeticError_("lattice is not of full rank")
    return alpha, w[1] % delta, delta


@dataclass(frozen=True)
class IdealLevel:
    """A nonzero ideal of O_{-m}, remembered by its generators and Hermite form."""

    generators: tuple[RingElement, ...]
    m: int
    hnf: tuple[int, int, int] = field(init=False, compare=False)

    def __post_init__(self):
        gens = tuple(self.generators)
        if not 1 <= len(gens) or any(g.m != self.m for g in gens):
            raise ValueError("an ideal needs generators in the same order")
        if all(g.is_zero() for g in gens):
            raise ValueError("the zero ideal is not a level")
        object.__setattr__(self, "generators", gens)
        w = RingElement(0, 1, self.m)
        vecs = []
        for g in gens:
            gw = g * w
            vecs += [(g.a, g.b), (gw.a, gw.b)]
        object.__setattr__(self, "hnf", hermite_basis(vecs))

    @classmethod
    def of(cls, *gens: RingElement) -> IdealLevel:
        return cls(tuple(gens), gens[0].m)

    @property
    def is_principal_presented(self) -> bool:
        return len(self.generators) == 1

    def norm(self) -> int:
        alpha, _, delta = self.hnf
        return alpha * delta

    def contains(self, x: RingElement) -> bool:
        alpha, beta, delta = self.hnf
        if x.a % alpha:
            return False
        return (x.b - (x.a // alpha) * beta) % delta == 0

    def __contains__(self, x) -> bool:
        if isinstance(x, int):
            x = RingElement(x, 0, self.m)
        return self.contains(x)

    def same_ideal(self, other: IdealLevel) -> bool:
        return self.m == other.m and self.hnf == other.hnf

    def __mul__(self, other: IdealLevel) -> IdealLevel:
        gens = tuple(g * h for g in self.generators for h in other.generators)
        return IdealLevel(gens, self.m)

    def is_unit_ideal(self) -> bool:
        return self.hnf == (1, 0, 1)

    def contained_in(self, other: IdealLevel) -> bool:
        return all(other.contains(g) for g in self.generators)

    def generator(self) -> RingElement:
        """A single generator; for two-generator presentations search for one."""
        if len(self.generators) == 1:
            return self.generators[0]
        n = self.norm()
        for x in elements_of_norm_at_most(self.m, n):
            if x.norm() == n and self.contains(x):
                return x
        raise ArithmeticError_("ideal is not principal")

    def residues(self) -> list[RingElement]:
        """Representatives of O / eta."""
        alpha, beta, delta = self.hnf
        # O/eta: x in [0, alpha), y in [0, delta)
        return [RingElement(x, y, self.m) for y in range(delta) for x in range(alpha)]

    def __repr__(self):
        return "<" + ", ".join(map(repr, self.generators)) + ">"


def ideal_membership(x: RingElement, eta: IdealLevel) -> bool:
    return eta.contains(x)


def coprime(x: RingElement, y: RingElement) -> bool:
    if x.is_zero() and y.is_zero():
        return False
    gens = tuple(g for g in (x, y) if not g.is_zero())
    return IdealLevel(gens, x.m).is_unit_ideal()


# ---------------------------------------------------------------- primes


@dataclass(frozen=True)
class PrimeSplitting:
    kind: str  # "split", "inert" or "ramified"
    p: int
    m: int
    pi: RingElement | None = None
    pi_bar: RingElement | None = None

    def primes(self) -> tuple[RingElement, ...]:
        if self.kind == "inert":
            return (RingElement(self.p, 0, self.m),)
        if self.kind == "ramified":
            return (self.pi,)
        return (self.pi, self.pi_bar)


def kronecker(d: int, p: int) -> int:
    """Kronecker symbol (d/p) for a prime p."""
    if p == 2:
        if d % 2 == 0:
            return 0
        return 1 if d % 8 in (1, 7) else -1
    r = pow(d % p, (p - 1) // 2, p)
    return 0 if r == 0 else (1 if r == 1 else -1)


def splitting_kind(p: int, m: int) -> str:
    s = kronecker(discriminant(m), p)
    return {0: "ramified", 1: "split", -1: "inert"}[s]


def _witness_key(x: RingElement):
    return (abs(x.a) + abs(x.b), x.a <= 0, x.b <= 0, abs(x.a), x.a, x.b)


def classify_prime(p: int, m: int) -> PrimeSplitting:
    """Decompose the rational prime p in O_{-m} with explicit prime witnesses."""
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    kind = splitting_kind(p, m)
    if kind == "inert":
        return PrimeSplitting("inert", p, m)
    found = [
        RingElement(a, b, m)
        for a in range(-p, p + 1)
        for b in range(-p, p + 1)
        if _norm(m, a, b) == p
    ]
    if not found:
        raise NoWitness(f"no element of norm {p} in O_-{m}")
    pi = min(found, key=_witness_key)
    if kind == "ramified":
        return PrimeSplitting("ramified", p, m, pi, pi.conj())
    return PrimeSplitting("split", p, m, pi, pi.conj())


def prime_ideals_over(p: int, m: int) -> list[IdealLevel]:
    """Prime ideals above p as two-generator ideals <p, w - r>."""
    one = RingElement(p, 0, m)
    if splitting_kind(p, m) == "inert":
        return [IdealLevel((one,), m)]
    out = []
    for r in range(p):
        # minimal polynomial of w evaluated at r
        val = r * r + r + (m + 1) // 4 if m % 4 == 3 else r * r + m
        if val % p == 0:
            out.append(IdealLevel((one, RingElement(-r, 1, m)), m))
    return out


def prime_ideal_divisors(eta: IdealLevel) -> list[IdealLevel]:
    out = []
    for p in sorted(factorint(eta.norm())):
        for P in prime_ideals_over(p, eta.m):
            if eta.contained_in(P):
                out.append(P)
    return out


def gamma0_index(eta: IdealLevel) -> int:
    """[SL_2(O) : Gamma_0(eta)] = N(eta) prod (1 + 1/N(P))."""
    idx = Fraction(eta.norm())
    for P in prime_ideal_divisors(eta):
        idx *= 1 + Fraction(1, P.norm())
    assert idx.denominator == 1
    return int(idx)


# ---------------------------------------------------------------- matrices


@dataclass(frozen=True)
class Matrix2:
    a: RingElement
    b: RingElement
    c: RingElement
    d: RingElement

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError("matrix does not have determinant 1")

    @classmethod
    def from_ints(cls, m: int, a, b, c, d) -> Matrix2:
        def conv(x):
            if isinstance(x, RingElement):
                return x
            if isinstance(x, tuple):
                return RingElement(x[0], x[1], m)
            return RingElement(x, 0, m)

        return cls(conv(a), conv(b), conv(c), conv(d))

    @property
    def m(self) -> int:
        return self.a.m

    def __matmul__(self, o: Matrix2) -> Matrix2:
        return Matrix2(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )

    def __neg__(self) -> Matrix2:
        return Matrix2(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> Matrix2:
        return Matrix2(self.d, -self.b, -self.c, self.a)

    def trace(self) -> RingElement:
        return self.a + self.d

    def is_identity(self) -> bool:
        return self.a == 1 and self.d == 1 and self.b.is_zero() and self.c.is_zero()

    def is_central(self) -> bool:
        return self.b.is_zero() and self.c.is_zero() and self.a == self.d and self.a.is_unit()

    def entries(self) -> tuple[RingElement, ...]:
        return (self.a, self.b, self.c, self.d)

    def key(self) -> tuple[int, ...]:
        return tuple(v for e in self.entries() for v in (e.a, e.b))

    def projective_key(self) -> tuple[int, ...]:
        """Key identifying the matrix up to sign."""
        k, nk = self.key(), (-self).key()
        return min(k, nk)

    def order(self) -> int | None:
        """Order in SL_2 for elements of finite order, None otherwise."""
        t = self.trace()
        if t.b != 0:
            return None
        t = t.a
        if t == 2:
            return 1 if self.is_identity() else None
        if t == -2:
            return 2 if (-self).is_identity() else None
        return {0: 4, 1: 6, -1: 3}.get(t)

    def __repr__(self):
        return f"[[{self.a!r}, {self.b!r}], [{self.c!r}, {self.d!r}]]"


def identity(m: int) -> Matrix2:
    return Matrix2.from_ints(m, 1, 0, 0, 1)


def in_gamma0(M: Matrix2, eta: IdealLevel) -> bool:
    return eta.contains(M.c)


def complete_to_matrix(c: RingElement, d: RingElement) -> Matrix2:
    """An SL_2 matrix with bottom row (c, d); c and d must be coprime."""
    m = c.m
    if c.is_zero():
        if not d.is_unit():
            raise ArithmeticError_("bottom row is not primitive")
        return Matrix2(d.conj(), RingElement(0, 0, m), c, d)
    g, s, t = ext_gcd(d, c)
    if not g.is_unit():
        raise ArithmeticError_("bottom row is not primitive")
    ginv = g.conj()  # units satisfy g^-1 = conj(g)
    a, b = s * ginv, -(t * ginv)
    return Matrix2(a, b, c, d)


# ---------------------------------------------------------------- levels

_TOKEN = re.compile(r"\s*(sqrt\(\s*-\s*\d+\s*\)|\d+|w|[-+*/()\[\],])")


class _Parser:
    def __init__(self, text: str, m: int):
        self.m = m
        self.tokens = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            mt = _TOKEN.match(text, pos)
            if not mt:
                raise LevelSyntaxError(f"unexpected input at {text[pos:]!r}")
            self.tokens.append(mt.group(1).replace(" ", ""))
            pos = mt.end()
            while pos < len(text) and text[pos].isspace():
                pos += 1
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self, tok=None):
        t = self.peek()
        if t is None or (tok is not None and t != tok):
            raise LevelSyntaxError(f"expected {tok!r}, found {t!r}")
        self.i += 1
        return t

    def expr(self) -> FieldElement:
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        v = self.term() * sign
        while self.peek() in ("+", "-"):
            op = self.take()
            t = self.term()
            v = v + t if op == "+" else v - t
        return v

    def term(self) -> FieldElement:
        v = self.factor()
        while True:
            t = self.peek()
            if t == "*":
                self.take()
                v = v * self.factor()
            elif t == "/":
                self.take()
                v = v / self.factor()
            elif t is not None and (t == "w" or t == "(" or t.startswith("sqrt")):
                v = v * self.factor()  # implicit product such as 2w or 3(1+w)
            else:
                return v

    def factor(self) -> FieldElement:
        t = self.take()
        m = self.m
        if t == "(":
            v = self.expr()
            self.take(")")
            return v
        if t == "w":
            return FieldElement(Fraction(0), Fraction(1), m)
        if t.startswith("sqrt"):
            n = int(re.search(r"\d+", t).group())
            if n != m:
                raise LevelSyntaxError(f"sqrt(-{n}) does not belong to m={m}")
            return sqrt_neg(m).to_field()
        if t.isdigit():
            return FieldElement(Fraction(int(t)), Fraction(0), m)
        raise LevelSyntaxError(f"unexpected token {t!r}")


def parse_element(text: str, m: int) -> RingElement:
    p = _Parser(text, m)
    v = p.expr()
    if p.peek() is not None:
        raise LevelSyntaxError(f"trailing input in {text!r}")
    if not v.is_integral():
        raise LevelSyntaxError(f"{text!r} is not an algebraic integer of O_-{m}")
    return v.to_ring()


def parse_level(text: str, m: int) -> IdealLevel:
    """Parse `<int>`, `<int>+<int>w`, `sqrt(-m)` sugar, `[g1, g2]` or `c*[g1, g2]`."""
    check_m(m)
    s = text.strip()
    star = s.find("*[")
    if star > 0:
        scale = parse_element(s[:star], m)
        inner = parse_level(s[star + 1:], m)
        return IdealLevel(tuple(scale * g for g in inner.generators), m)
    if s.startswith("[") or s.startswith("<"):
        if not (s.endswith("]") or s.endswith(">")):
            raise LevelSyntaxError(f"unbalanced brackets in {text!r}")
        parts = _split_top(s[1:-1])
        gens = tuple(parse_element(x, m) for x in parts)
    else:
        gens = (parse_element(s, m),)
    gens = tuple(g for g in gens if not g.is_zero())
    if not gens:
        raise LevelSyntaxError("the zero ideal is not a level")
    return IdealLevel(gens, m)


def _split_top(s: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
        else:
            cur += ch
    out.append(cur)
    return [x.strip() for x in out if x.strip()]


def format_level(eta: IdealLevel) -> str:
    inner = ", ".join(format_element(g.a, g.b) for g in eta.generators)
    return f"[{inner}]" if len(eta.generators) > 1 else inner
