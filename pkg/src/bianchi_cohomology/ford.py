"""Ford fundamental domains for Gamma_0(eta) acting on upper half space.

The visible part of a family of isometric spheres is the upper envelope of
the functions f_S(z) = r_S^2 - |z - c_S|^2.  Differences of two such
functions are affine in z, so the projection of the floor of the domain is
a power diagram and every vertex has coordinates in K and rational squared
height.  All decisions below are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .arith import (
    EUCLIDEAN_FIELDS,
    FieldElement,
    IdealLevel,
    Matrix2,
    PrimeSplitting,
    RingElement,
    classify_prime,
    complete_to_matrix,
    elements_of_norm_at_most,
    ext_gcd,
    gamma0_index,
    units,
)


class FordError(Exception):
    pass


class FixesInfinity(FordError):
    pass


class UnsupportedField(FordError):
    pass


class BudgetExceeded(FordError):
    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class UnpairedFace(FordError):
    pass


class DegenerateIntersection(FordError):
    pass


# ---------------------------------------------------------------- points


@dataclass(frozen=True, order=True)
class Point:
    """A point z + t j of upper half space (h2 = t^2), or a cusp when h2 = 0."""

    x: Fraction
    y: Fraction
    h2: Fraction
    m: int = field(compare=False)

    @classmethod
    def of(cls, z: FieldElement, h2) -> Point:
        return cls(z.x, z.y, Fraction(h2), z.m)

    @property
    def z(self) -> FieldElement:
        return FieldElement(self.x, self.y, self.m)

    def is_ideal(self) -> bool:
        return self.h2 == 0

    def shifted(self, lx: int, ly: int) -> Point:
        return Point(self.x + lx, self.y + ly, self.h2, self.m)

    def __repr__(self):
        return f"P({self.x}, {self.y}; {self.h2})"


def act(g: Matrix2, p: Point) -> Point:
    """Image of a point under the Moebius action of g."""
    z = p.z
    a, b, c, d = (e.to_field() for e in g.entries())
    czd = c * z + d
    if p.h2 == 0:
        if czd.is_zero():
            raise FordError("point is sent to the cusp at infinity")
        return Point.of((a * z + b) / czd, 0)
    D = czd.norm() + c.norm() * p.h2
    zn = ((a * z + b) * czd.conj() + a * c.conj() * p.h2) / D
    return Point.of(zn, p.h2 / (D * D))


def floor_offset(x: Fraction, y: Fraction) -> tuple[int, int]:
    return math.floor(x), math.floor(y)


def translation(m: int, lx: int, ly: int) -> Matrix2:
    return Matrix2.from_ints(m, 1, (lx, ly), 0, 1)


# ---------------------------------------------------------------- spheres


@dataclass(frozen=True)
class IsometricSphere:
    center: FieldElement
    radius_sq: Fraction
    witness: Matrix2 | None = field(default=None, compare=False)

    @property
    def m(self) -> int:
        return self.center.m

    def key(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.center.x % 1, self.center.y % 1, self.radius_sq)

    def power(self, x, y) -> Fraction:
        """r^2 - |z - center|^2 at the point z = x + y w."""
        return self.radius_sq - norm_xy(self.m, x - self.center.x, y - self.center.y)

    def height_sq(self, z: FieldElement) -> Fraction:
        return self.power(z.x, z.y)


def norm_xy(m: int, x, y):
    if m % 4 == 3:
        return x * x - x * y + (m + 1) // 4 * y * y
    return x * x + m * y * y


def bilinear(m: int, u: tuple, v: tuple):
    if m % 4 == 3:
        k = (m + 1) // 4
        return u[0] * v[0] - (u[0] * v[1] + u[1] * v[0]) / 2 + k * u[1] * v[1]
    return u[0] * v[0] + m * u[1] * v[1]


def isometric_sphere(M: Matrix2) -> IsometricSphere:
    if M.c.is_zero():
        raise FixesInfinity("an element with c = 0 fixes infinity")
    center = -(M.d / M.c)
    return IsometricSphere(center, Fraction(1, M.c.norm()), M)


def covers(s: IsometricSphere, p: FieldElement) -> bool:
    return (p - s.center).norm() < s.radius_sq


def image_sphere(M: Matrix2) -> IsometricSphere:
    """Isometric sphere of the inverse, with centre a/c."""
    return isometric_sphere(M.inverse())


# ---------------------------------------------------------------- power diagram

Polygon = list  # list of (x, y) Fraction pairs, counter-clockwise


def _halfplane(m: int, s: IsometricSphere, tc: tuple, tr2: Fraction):
    """Coefficients (A, B, C) with f_s - f_t = A x + B y + C."""
    vx, vy = s.center.x - tc[0], s.center.y - tc[1]
    if m % 4 == 3:
        k = (m + 1) // 4
        A, B = 2 * vx - vy, -vx + 2 * k * vy
    else:
        A, B = 2 * vx, 2 * m * vy
    C = s.radius_sq - tr2 - norm_xy(m, s.center.x, s.center.y) + norm_xy(m, tc[0], tc[1])
    return A, B, C


def _clip(poly: Polygon, A, B, C) -> Polygon:
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = A * p[0] + B * p[1] + C
        fq = A * q[0] + B * q[1] + C
        if fp >= 0:
            out.append(p)
        if (fp > 0 and fq < 0) or (fp < 0 and fq > 0):
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return _clean(out)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _clean(poly: Polygon) -> Polygon:
    pts = []
    for p in poly:
        if not pts or pts[-1] != p:
            pts.append(p)
    while len(pts) > 1 and pts[0] == pts[-1]:
        pts.pop()
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        for i in range(len(pts)):
            o, a, b = pts[i - 1], pts[i], pts[(i + 1) % len(pts)]
            if _cross(o, a, b) == 0:
                del pts[i]
                changed = True
                break
    return pts


def polygon_area2(poly: Polygon):
    return sum(_cross((0, 0), poly[i], poly[(i + 1) % len(poly)]) for i in range(len(poly)))


def _dist2_to_polygon(m: int, c: tuple, poly: Polygon):
    if len(poly) >= 3 and all(_cross(poly[i], poly[(i + 1) % len(poly)], c) >= 0 for i in range(len(poly))):
        return Fraction(0)
    best = None
    for i in range(len(poly)):
        p, q = poly[i], poly[(i + 1) % len(poly)]
        d = (q[0] - p[0], q[1] - p[1])
        w = (c[0] - p[0], c[1] - p[1])
        dd = norm_xy(m, *d)
        t = bilinear(m, w, d) / dd if dd else Fraction(0)
        t = min(max(t, Fraction(0)), Fraction(1))
        e = norm_xy(m, w[0] - t * d[0], w[1] - t * d[1])
        if best is None or e < best:
            best = e
    return best


def _box(s: IsometricSphere) -> Polygon:
    R = (s.radius_sq + 1) / 2  # R >= r
    hx = R if s.m % 4 != 3 else 2 * R
    hy = R if s.m % 4 != 3 else 2 * R
    cx, cy = s.center.x, s.center.y
    return [(cx - hx, cy - hy), (cx + hx, cy - hy), (cx + hx, cy + hy), (cx - hx, cy + hy)]


def _float_center(s: IsometricSphere) -> complex:
    return s.center.to_complex()


class _Index:
    """Spatial lookup of sphere translates by floating-point prefilter.

    The prefilter is conservative; every retained pair is tested exactly.
    """

    def __init__(self, m: int):
        self.m = m
        self.items: list[IsometricSphere] = []
        self.fc: list[complex] = []
        self.fr: list[float] = []

    def add(self, s: IsometricSphere):
        self.items.append(s)
        self.fc.append(_float_center(s))
        self.fr.append(math.sqrt(float(s.radius_sq)))

    def remove(self, keys: set):
        keep = [i for i, s in enumerate(self.items) if s.key() not in keys]
        self.items = [self.items[i] for i in keep]
        self.fc = [self.fc[i] for i in keep]
        self.fr = [self.fr[i] for i in keep]

    def neighbours(self, s: IsometricSphere, skip_self=True):
        m = self.m
        sc = _float_center(s)
        sr = math.sqrt(float(s.radius_sq))
        one = FieldElement(1, 0, m).to_complex()
        w = FieldElement(0, 1, m).to_complex()
        out = []
        for t, tc, tr in zip(self.items, self.fc, self.fr):
            base_x = math.floor(s.center.x - t.center.x)
            base_y = math.floor(s.center.y - t.center.y)
            for ly in range(base_y - 2, base_y + 4):
                for lx in range(base_x - 3, base_x + 5):
                    c = tc + lx * one + ly * w
                    if abs(c - sc) > sr + tr + 1e-9:
                        continue
                    tcx, tcy = t.center.x + lx, t.center.y + ly
                    if skip_self and tcx == s.center.x and tcy == s.center.y and t.radius_sq == s.radius_sq:
                        continue
                    if _disks_overlap(m, (s.center.x, s.center.y), s.radius_sq, (tcx, tcy), t.radius_sq):
                        out.append((t, (tcx, tcy), (lx, ly)))
        return out


def _disks_overlap(m, c1, r1, c2, r2) -> bool:
    d2 = norm_xy(m, c1[0] - c2[0], c1[1] - c2[1])
    lhs = d2 - r1 - r2
    if lhs < 0:
        return True
    return lhs * lhs < 4 * r1 * r2


def power_cell(s: IsometricSphere, neighbours) -> Polygon:
    poly = _box(s)
    for t, tc, _ in neighbours:
        A, B, C = _halfplane(s.m, s, tc, t.radius_sq)
        poly = _clip(poly, A, B, C)
        if len(poly) < 3:
            return []
    return poly


def is_visible_cell(s: IsometricSphere, poly: Polygon) -> bool:
    if len(poly) < 3 or polygon_area2(poly) <= 0:
        return False
    return _dist2_to_polygon(s.m, (s.center.x, s.center.y), poly) < s.radius_sq


# ---------------------------------------------------------------- sphere systems


def _canon(c: RingElement) -> bool:
    return min(((u * c).a, (u * c).b) for u in units(c.m)) == (c.a, c.b)


def normalized_sphere(c: RingElement, d: RingElement) -> IsometricSphere:
    """The sphere of bottom row (c, d), translated into the unit cell, with witness."""
    center = -(d / c)
    lx, ly = floor_offset(center.x, center.y)
    d2 = d + c * RingElement(lx, ly, c.m)
    M = complete_to_matrix(c, d2)
    return IsometricSphere(-(d2 / c), Fraction(1, c.norm()), M)


def candidate_spheres(eta: IdealLevel, lo, hi) -> list[tuple[int, tuple, RingElement, RingElement]]:
    """Bottom rows (c, d) with lo < N(c) <= hi, c in eta, gcd(c, d) = 1, up to units and translation."""
    m = eta.m
    out = {}
    for c in elements_of_norm_at_most(m, hi):
        n = c.norm()
        if n <= lo or c.is_zero() or not eta.contains(c) or not _canon(c):
            continue
        for d in IdealLevel((c,), m).residues():
            g, _, _ = ext_gcd(c, d) if not d.is_zero() else (c, None, None)
            if not g.is_unit():
                continue
            center = -(d / c)
            key = (center.x % 1, center.y % 1, Fraction(1, n))
            if key not in out:
                out[key] = (n, key, c, d)
    return sorted(out.values(), key=lambda t: (t[0], t[1]))


@dataclass
class SphereSystem:
    """Visible isometric spheres modulo the translations by O."""

    m: int
    level: IdealLevel
    spheres: list[IsometricSphere]
    budget: int
    cells: dict = field(default_factory=dict)

    def keys(self) -> set:
        return {s.key() for s in self.spheres}

    def by_key(self) -> dict:
        return {s.key(): s for s in self.spheres}


def _visible_subset(m: int, spheres: Sequence[IsometricSphere]):
    """Filter to the visible spheres and return their power cells."""
    spheres = list(spheres)
    while True:
        idx = _Index(m)
        for s in spheres:
            idx.add(s)
        cells, drop = {}, set()
        for s in spheres:
            poly = power_cell(s, idx.neighbours(s))
            if is_visible_cell(s, poly):
                cells[s.key()] = poly
            else:
                drop.add(s.key())
        if not drop:
            return spheres, cells
        spheres = [s for s in spheres if s.key() not in drop]


def _grow(m: int, visible: list, idx: _Index, cands) -> None:
    for n, key, c, d in cands:
        s = IsometricSphere(FieldElement(key[0], key[1], m), key[2], None)
        poly = power_cell(s, idx.neighbours(s))
        if is_visible_cell(s, poly):
            s = normalized_sphere(c, d)
            visible.append(s)
            idx.add(s)


def system_status(system: SphereSystem):
    """Return (gap, hmin): whether the envelope dips below the ground, and the minimal positive vertex height."""
    gap, hmin = not system.spheres, None
    for s in system.spheres:
        for p in system.cells[s.key()]:
            h = s.power(*p)
            if h < 0:
                gap = True
            elif h > 0 and (hmin is None or h < hmin):
                hmin = h
    return gap, hmin


def swan_enumerate(eta: IdealLevel, budget: int | None = 4096, start: int | None = None) -> SphereSystem:
    """Enumerate spheres of Gamma_0(eta) by increasing N(c) until the floor is complete."""
    m = eta.m
    if m not in EUCLIDEAN_FIELDS:
        raise UnsupportedField(f"geometric constructions need m in {EUCLIDEAN_FIELDS}")
    bound = start or max(4, 2 * eta.norm())
    lo = 0
    visible: list[IsometricSphere] = []
    idx = _Index(m)
    while True:
        _grow(m, visible, idx, candidate_spheres(eta, lo, bound))
        lo = bound
        visible, cells = _visible_subset(m, visible)
        idx = _Index(m)
        for s in visible:
            idx.add(s)
        system = SphereSystem(m, eta, visible, bound, cells)
        gap, hmin = system_status(system)
        need = bound
        if gap:
            need = 2 * bound
        elif hmin is not None and hmin * bound < 1:
            need = max(2 * bound, math.ceil(1 / hmin))
        elif not _pairings_close(system):
            need = 2 * bound
        if need == bound:
            return system
        if budget is not None and need > budget:
            raise BudgetExceeded(f"norm budget {budget} exhausted for level {eta}", system)
        bound = need


def _pairings_close(system: SphereSystem) -> bool:
    try:
        dom = compute_cells(system)
        side_pairings(dom)
    except (UnpairedFace, FordError):
        return False
    return True


# ---------------------------------------------------------------- prime levels


def _explicit_m11_system(split: PrimeSplitting) -> list[IsometricSphere]:
    m, p = 11, split.p
    w = RingElement(0, 1, m)
    out = []
    pi = RingElement(p, 0, m) if split.kind == "inert" else split.pi
    n = pi.norm()
    for alpha in IdealLevel((pi,), m).residues():
        if not alpha.is_zero():
            out.append(IsometricSphere(alpha / pi, Fraction(1, n)))
    for c in (w * pi, (w + 1) * pi):
        for sign in (1, -1):
            M = Matrix2.from_ints(m, 1, 0, c * sign, 1)
            out.append(isometric_sphere(M))
    return out


def revealed_spheres(m: int) -> list[IsometricSphere]:
    """Spheres of SL_2(O) that become visible near 0 once the sphere at 0 is removed."""
    full = full_group_system(m)
    zero = RingElement(0, 0, m)
    base = []
    for s in full.spheres:
        for lx in range(-2, 3):
            for ly in range(-2, 3):
                c = FieldElement(s.center.x + lx, s.center.y + ly, m)
                if s.radius_sq == 1 and c.is_zero():
                    continue
                base.append(IsometricSphere(c, s.radius_sq, s.witness))
    found = []
    for c in elements_of_norm_at_most(m, 12):
        if c.norm() <= 1:
            continue
        for d in lattice_units_near_zero(c):
            s = IsometricSphere(-(d / c), Fraction(1, c.norm()), None)
            if (s.center.norm() >= 1):
                continue
            found.append((c, d, s))
    cand = base + [s for _, _, s in found]
    out = {}
    for c, d, s in found:
        nb = [
            (t, (t.center.x, t.center.y), (0, 0))
            for t in cand
            if not (t.center == s.center and t.radius_sq == s.radius_sq)
            and _disks_overlap(m, (s.center.x, s.center.y), s.radius_sq, (t.center.x, t.center.y), t.radius_sq)
        ]
        poly = power_cell(s, nb)
        if is_visible_cell(s, poly):
            t = isometric_sphere(complete_to_matrix(c, d))
            out[(t.center.x, t.center.y, t.radius_sq)] = t
    return [out[k] for k in sorted(out)]


def lattice_units_near_zero(c: RingElement) -> list[RingElement]:
    from .arith import lattice_points_near

    out = []
    for d in lattice_points_near(FieldElement(0, 0, c.m), c.norm()):
        g, _, _ = ext_gcd(c, d) if not d.is_zero() else (c, None, None)
        if g.is_unit():
            out.append(d)
    return out


def prime_level_sphere_system(split: PrimeSplitting, m: int) -> list[IsometricSphere]:
    """Visible spheres for the level generated by a prime element.

    For m = 11 the system is written down explicitly: big spheres of
    radius^2 1/N(pi) at alpha/pi and the small spheres coming from the
    witnesses [[1,0],[w pi,1]], [[1,0],[(w+1) pi,1]] and their inverses.  For
    the other Euclidean fields the small spheres are obtained by removing the
    sphere at 0 from the full-group system and rescaling by 1/pi.
    """
    if m not in EUCLIDEAN_FIELDS:
        raise UnsupportedField(f"prime level systems need m in {EUCLIDEAN_FIELDS}")
    if split.m != m:
        raise ValueError("splitting belongs to another field")
    if m == 11:
        return _normalize_all(_explicit_m11_system(split))
    pi = split.pi if split.kind != "inert" else RingElement(split.p, 0, m)
    n = pi.norm()
    out = []
    for alpha in IdealLevel((pi,), m).residues():
        if alpha.is_zero():
            continue
        out.append(IsometricSphere(alpha / pi, Fraction(1, n)))
    for s in revealed_spheres(m):
        M = s.witness
        out.append(_rescaled(M, pi))
    return _normalize_all(out)


def _rescaled(M: Matrix2, pi: RingElement) -> IsometricSphere:
    # bottom row (c, d) -> (pi c, d): centre divided by pi, radius^2 by N(pi)
    center = -(M.d / (M.c * pi))
    return IsometricSphere(center, Fraction(1, (M.c * pi).norm()))


def _normalize_all(spheres: Iterable[IsometricSphere]) -> list[IsometricSphere]:
    out = {}
    for s in spheres:
        c = s.center
        lx, ly = floor_offset(c.x, c.y)
        t = IsometricSphere(FieldElement(c.x - lx, c.y - ly, c.m), s.radius_sq, s.witness)
        out[t.key()] = t
    return [out[k] for k in sorted(out)]


_FULL_CACHE: dict = {}


def full_group_system(m: int) -> SphereSystem:
    if m not in _FULL_CACHE:
        _FULL_CACHE[m] = swan_enumerate(IdealLevel((RingElement(1, 0, m),), m))
    return _FULL_CACHE[m]


# ---------------------------------------------------------------- cells


@dataclass
class Face:
    sphere: IsometricSphere
    points: tuple[Point, ...]  # counter-clockwise in projection


@dataclass
class FordDomain:
    m: int
    level: IdealLevel
    spheres: list[IsometricSphere]
    faces: list[Face]
    vertices: list[Point]  # representatives in the unit cell
    edges: list[tuple[Point, Point]]
    cusps: list[Point]
    pairings: dict = field(default_factory=dict)  # face index -> (face index, Matrix2)
    budget: int = 0

    def min_height_sq(self) -> Fraction:
        return min(v.h2 for v in self.vertices if v.h2 > 0)


def normalize_point(p: Point) -> tuple[Point, tuple[int, int]]:
    lx, ly = floor_offset(p.x, p.y)
    return p.shifted(-lx, -ly), (lx, ly)


def compute_cells(system: SphereSystem) -> FordDomain:
    m = system.m
    faces = []
    for s in system.spheres:
        poly = system.cells[s.key()]
        pts = []
        for x, y in poly:
            h = s.power(x, y)
            if h < 0:
                raise FordError("sphere system leaves part of the ground uncovered")
            pts.append(Point(x, y, h, m))
        faces.append(Face(s, tuple(pts)))
    # every corner of a convex cell is a vertex of the diagram
    corner_set = {}
    for f in faces:
        for p in f.points:
            q, _ = normalize_point(p)
            corner_set[q] = q
    corners = sorted(corner_set)
    # insert diagram vertices lying inside sides of neighbouring cells
    new_faces = []
    for f in faces:
        pts = list(f.points)
        out = []
        for i in range(len(pts)):
            p, q = pts[i], pts[(i + 1) % len(pts)]
            out.append(p)
            inner = []
            for v in corners:
                for lx in range(math.floor(min(p.x, q.x) - v.x) - 1, math.floor(max(p.x, q.x) - v.x) + 2):
                    for ly in range(math.floor(min(p.y, q.y) - v.y) - 1, math.floor(max(p.y, q.y) - v.y) + 2):
                        vx, vy = v.x + lx, v.y + ly
                        if (vx, vy) in ((p.x, p.y), (q.x, q.y)):
                            continue
                        if _cross((p.x, p.y), (q.x, q.y), (vx, vy)) != 0:
                            continue
                        t = (vx - p.x) / (q.x - p.x) if q.x != p.x else (vy - p.y) / (q.y - p.y)
                        if 0 < t < 1:
                            inner.append((t, Point(vx, vy, v.h2, m)))
            out.extend(pt for _, pt in sorted(inner, key=lambda u: u[0]))
        for pt in out:
            if f.sphere.power(pt.x, pt.y) != pt.h2:
                raise DegenerateIntersection("vertex heights disagree between incident spheres")
        new_faces.append(Face(f.sphere, tuple(out)))
    verts = {}
    edges = {}
    for f in new_faces:
        n = len(f.points)
        for i in range(n):
            p, q = f.points[i], f.points[(i + 1) % n]
            np_, off = normalize_point(p)
            verts[np_] = np_
            a, b = sorted((p, q))
            na, off = normalize_point(a)
            edges[(na, b.shifted(-off[0], -off[1]))] = True
    vertices = sorted(verts)
    return FordDomain(
        m=m,
        level=system.level,
        spheres=list(system.spheres),
        faces=new_faces,
        vertices=[v for v in vertices if v.h2 > 0],
        edges=sorted(edges),
        cusps=[v for v in vertices if v.h2 == 0],
        budget=system.budget,
    )


def face_key(points: Iterable[Point]) -> tuple:
    """Translation-invariant key of a finite set of points."""
    pts = sorted(points)
    lx, ly = floor_offset(pts[0].x, pts[0].y)
    return tuple(p.shifted(-lx, -ly) for p in pts)


def side_pairings(domain: FordDomain) -> dict:
    """For each face, the partner face and the group element carrying it there."""
    m = domain.m
    index = {}
    for i, f in enumerate(domain.faces):
        index[face_key(f.points)] = i
    by_sphere = {f.sphere.key(): i for i, f in enumerate(domain.faces)}
    pairings = {}
    for i, f in enumerate(domain.faces):
        g = f.sphere.witness
        if g is None:
            raise UnpairedFace("sphere has no witness matrix")
        img = [act(g, p) for p in f.points]
        partner = index.get(face_key(img))
        if partner is None:
            raise UnpairedFace(f"face on sphere {f.sphere.center} has no partner")
        target = domain.faces[partner]
        # translate so that the image lands exactly on the stored partner face
        a = min(img)
        b = min(target.points)
        lx, ly = b.x - a.x, b.y - a.y
        assert lx.denominator == 1 and ly.denominator == 1
        h = translation(m, int(lx), int(ly)) @ g
        if not domain.level.contains(h.c):
            raise UnpairedFace("pairing element is not in the congruence subgroup")
        if target.sphere.key() != image_sphere(g).key():
            raise UnpairedFace("partner sphere mismatch")
        pairings[i] = (partner, h)
    domain.pairings = pairings
    return pairings


def build_domain(eta: IdealLevel, budget: int | None = 4096) -> FordDomain:
    system = swan_enumerate(eta, budget)
    dom = compute_cells(system)
    side_pairings(dom)
    return dom


def domain_to_json(domain: FordDomain) -> dict:
    """Exact data of a Ford domain; rationals are written as strings."""

    def pt(p: Point):
        return [str(p.x), str(p.y), str(p.h2)]

    def mat(g: Matrix2):
        return [[e.a, e.b] for e in g.entries()]

    return {
        "m": domain.m,
        "level": [[g.a, g.b] for g in domain.level.generators],
        "spheres": [
            {"center": [str(s.center.x), str(s.center.y)], "radius_sq": str(s.radius_sq)} for s in domain.spheres
        ],
        "faces": [{"sphere": i, "points": [pt(p) for p in f.points]} for i, f in enumerate(domain.faces)],
        "vertices": [pt(v) for v in domain.vertices],
        "cusps": [pt(v) for v in domain.cusps],
        "pairings": {str(i): {"face": j, "matrix": mat(h)} for i, (j, h) in sorted(domain.pairings.items())},
        "budget": domain.budget,
    }


# ---------------------------------------------------------------- volume


def _segment_integral(m: int, s: IsometricSphere, p: Point, q: Point) -> float:
    from scipy.integrate import quad

    c = s.center.to_complex()
    zp = p.z.to_complex() - c
    zq = q.z.to_complex() - c
    R2 = float(s.radius_sq)
    d = zq - zp
    cross = (zp.real * d.imag - zp.imag * d.real)
    if cross == 0:
        return 0.0

    def integrand(t):
        w = zp + t * d
        r2 = abs(w) ** 2
        if r2 == 0:
            return 0.0
        inside = max(R2 - r2, 1e-300)
        return 0.25 * math.log(R2 / inside) * cross / r2

    val, _ = quad(integrand, 0.0, 1.0, limit=200)
    return val


def domain_volume(domain: FordDomain) -> float:
    """Hyperbolic volume above the floor over one period lattice cell (floating point)."""
    total = 0.0
    for f in domain.faces:
        pts = f.points
        for i in range(len(pts)):
            total += _segment_integral(domain.m, f.sphere, pts[i], pts[(i + 1) % len(pts)])
    return total


def bianchi_covolume(m: int) -> float:
    """Covolume of PSL_2(O_{-m}) from the zeta value of the field (floating point)."""
    from scipy.special import zeta
    from sympy import factorint

    from .arith import discriminant, kronecker

    D = discriminant(m)
    N = abs(D)

    def chi(a):
        v = 1
        for p, e in factorint(a).items():
            v *= kronecker(D, p) ** e
        return v

    L = sum(chi(a) * zeta(2, a / N) for a in range(1, N + 1)) / N**2
    return N**1.5 * (math.pi**2 / 6) * L / (4 * math.pi**2)
