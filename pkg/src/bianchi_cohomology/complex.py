"""Quotient of the two-dimensional retract by Gamma_0(eta).

The retract is the orbit of the floor of the Ford domain together with one
horospherical polygon around every cusp on the floor.  Cells are handled in
the universal cover; a cell is identified modulo the translations by O via
its normalised vertex set, and orbits under the group are generated by the
side pairings.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Union

from .arith import IdealLevel, Matrix2, RingElement, elements_of_norm_at_most, identity, lattice_points_near, units
from .ford import (
    FordDomain,
    FordError,
    Point,
    act,
    bilinear,
    floor_offset,
    norm_xy,
    translation,
)
from .snf import AbelianGroup, SmithForm, cokernel, homology_group, rank_mod_p, smith_normal_form


class ComplexError(Exception):
    pass


class UnexpectedGroup(ComplexError):
    pass


class UnsupportedLevel(ComplexError):
    pass


# ---------------------------------------------------------------- vertices


@dataclass(frozen=True)
class Trunc:
    """The point where the geodesic from u towards the cusp v meets the horosphere at v."""

    v: Point
    u: Point

    def shifted(self, lx: int, ly: int) -> Trunc:
        return Trunc(self.v.shifted(lx, ly), self.u.shifted(lx, ly))

    def __repr__(self):
        return f"T({self.v!r} <- {self.u!r})"


Vertex = Union[Point, Trunc]


def vkey(p: Vertex) -> tuple:
    if isinstance(p, Point):
        return (0, p.x, p.y, p.h2)
    return (1, p.v.x, p.v.y, p.u.x, p.u.y, p.u.h2)


def vact(g: Matrix2, p: Vertex) -> Vertex:
    if isinstance(p, Point):
        return act(g, p)
    return Trunc(act(g, p.v), act(g, p.u))


def vshift(p: Vertex, lx: int, ly: int) -> Vertex:
    return p.shifted(lx, ly)


def anchor_xy(p: Vertex) -> tuple[Fraction, Fraction]:
    return (p.x, p.y) if isinstance(p, Point) else (p.v.x, p.v.y)


def normalize_cell(pts: Iterable[Vertex]) -> tuple[tuple, tuple[int, int]]:
    """Translation-normal form of a vertex set and the offset that was removed."""
    pts = sorted(pts, key=vkey)
    ax, ay = anchor_xy(pts[0])
    lx, ly = floor_offset(ax, ay)
    return tuple(vshift(p, -lx, -ly) for p in pts), (lx, ly)


def finite_point(p: Vertex) -> Point:
    return p if isinstance(p, Point) else p.u


# ---------------------------------------------------------------- stabilisers

STAB_TYPES = ("trivial", "Z/2", "Z/4", "Z/6", "Q8", "Di", "Te")


@dataclass(frozen=True)
class StabilizerRecord:
    generators: tuple[Matrix2, ...]
    type: str
    contains_minus_one: bool
    order: int
    elements: tuple[Matrix2, ...] = field(default=(), repr=False, compare=False)

    def has_noncentral_order(self, ell: int) -> bool:
        """Whether some element of order ell modulo the centre exists."""
        for g in self.elements:
            o = g.order()
            if ell == 2 and o == 4:
                return True
            if ell == 3 and o in (3, 6):
                return True
        return False


def point_stabilizer(p: Point, eta: IdealLevel, bound_factor: int = 1) -> list[Matrix2]:
    """All matrices of Gamma_0(eta) fixing the point p of upper half space.

    A fixing element has |cz+d|^2 + |c|^2 h^2 = 1, hence N(c) <= 1/h^2; with
    bound_factor > 1 the enumeration runs over a larger range of c and d as a
    consistency check.
    """
    if p.h2 <= 0:
        raise ComplexError("stabilisers are only enumerated for interior points")
    m = p.m
    z = p.z
    out = []
    limit = bound_factor / p.h2
    for c in [RingElement(0, 0, m)] + list(elements_of_norm_at_most(m, math.floor(limit))):
        if not c.is_zero() and not eta.contains(c):
            continue
        if c.is_zero():
            for d in units(m):
                a = d.conj()
                bf = z * (d - d.conj())
                if not bf.is_integral():
                    continue
                g = Matrix2(a, bf.to_ring(), c, d)
                if act(g, p) == p:
                    out.append(g)
            continue
        cz = c.to_field() * z
        rest = 1 - c.norm() * p.h2
        if rest < 0:
            continue
        for d in lattice_points_near(-cz, rest * bound_factor):
            if (cz + d).norm() != rest:
                continue
            af = cz + cz.conj() + d.to_field().conj()
            if not af.is_integral():
                continue
            a = af.to_ring()
            bf = (a * d - 1).to_field() / c.to_field()
            if not bf.is_integral():
                continue
            g = Matrix2(a, bf.to_ring(), c, d)
            if act(g, p) == p:
                out.append(g)
    uniq = {g.key(): g for g in out}
    return [uniq[k] for k in sorted(uniq)]


def classify_group(elements: list[Matrix2]) -> str:
    n = len(elements)
    orders = sorted(g.order() or 0 for g in elements)
    if 0 in orders:
        raise UnexpectedGroup("stabiliser contains an element of infinite order")
    count = {o: orders.count(o) for o in set(orders)}
    if n == 1:
        return "trivial"
    if n == 2:
        return "Z/2"
    if n == 4 and count.get(4) == 2:
        return "Z/4"
    if n == 6 and count.get(6) == 2:
        return "Z/6"
    if n == 8 and count.get(4) == 6:
        return "Q8"
    if n == 12 and count.get(4) == 6 and count.get(3) == 2 and count.get(6) == 2:
        return "Di"
    if n == 24 and count.get(4) == 6 and count.get(3) == 8 and count.get(6) == 8:
        return "Te"
    raise UnexpectedGroup(f"order profile {count} of a group of order {n} is not in the list")


def _generators(elements: list[Matrix2]) -> tuple[Matrix2, ...]:
    """A small generating set chosen greedily by element order."""
    if not elements:
        return ()
    m = elements[0].m
    ordered = sorted(elements, key=lambda g: (-(g.order() or 0), g.key()))
    gens: list[Matrix2] = []
    span = {identity(m).key()}
    for g in ordered:
        if g.key() in span:
            continue
        gens.append(g)
        span = _closure(gens)
        if len(span) == len(elements):
            break
    return tuple(gens)


def _closure(gens: list[Matrix2]) -> set:
    m = gens[0].m
    seen = {identity(m).key(): identity(m)}
    frontier = [identity(m)]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = x @ g
                if y.key() not in seen:
                    seen[y.key()] = y
                    nxt.append(y)
        frontier = nxt
    return set(seen)


def make_record(elements: list[Matrix2]) -> StabilizerRecord:
    typ = classify_group(elements)
    minus = any((-g).is_identity() for g in elements)
    return StabilizerRecord(_generators(elements), typ, minus, len(elements), tuple(elements))


# ---------------------------------------------------------------- complex


@dataclass
class Orbit:
    dim: int
    rep: tuple  # ordered vertex tuple (edge: sorted pair, face: cycle)
    key: tuple
    stabilizer: StabilizerRecord | None = None
    horo: bool = False


@dataclass
class EquivariantCellComplex:
    m: int
    level: IdealLevel
    orbits: list[list[Orbit]]  # by dimension
    d1: list[list[int]]  # rows: vertices, cols: edges
    d2: list[list[int]]  # rows: edges, cols: faces
    locate_table: dict  # normalised key -> (dim, orbit index, transport)
    cusp_classes: int
    domain: FordDomain | None = field(default=None, repr=False)

    def counts(self) -> tuple[int, int, int]:
        return tuple(len(o) for o in self.orbits)

    def locate(self, cell: tuple) -> tuple[int, Matrix2]:
        """Orbit index and an element g with cell = g(rep) as vertex sets."""
        key, (lx, ly) = normalize_cell(cell)
        dim, idx, g = self.locate_table[key]
        return idx, translation(self.m, lx, ly) @ g

    def edge_sign(self, p: Vertex, q: Vertex) -> tuple[int, int, Matrix2]:
        idx, g = self.locate((p, q))
        rep = self.orbits[1][idx].rep
        if vact(g, rep[0]) == p:
            return idx, 1, g
        return idx, -1, g

    def euler_characteristic(self) -> int:
        a, b, c = self.counts()
        return a - b + c


def _cycle_edges(cycle: tuple) -> list[tuple]:
    return [(cycle[i], cycle[(i + 1) % len(cycle)]) for i in range(len(cycle))]


def _subcells(cycle: tuple) -> list[tuple]:
    out = [tuple(cycle)]
    out += [e for e in _cycle_edges(cycle)]
    out += [(p,) for p in cycle]
    return out


def _insert_points(cycle: list[Point], extra: list[Point]) -> list[Point]:
    """Insert translates of the given points lying inside the sides of a polygon."""
    out = []
    n = len(cycle)
    for i in range(n):
        p, q = cycle[i], cycle[(i + 1) % n]
        out.append(p)
        if p.is_ideal() and q.is_ideal():
            continue
        inner = []
        for v in extra:
            lo_x = math.floor(min(p.x, q.x) - v.x) - 1
            hi_x = math.floor(max(p.x, q.x) - v.x) + 1
            lo_y = math.floor(min(p.y, q.y) - v.y) - 1
            hi_y = math.floor(max(p.y, q.y) - v.y) + 1
            for lx in range(lo_x, hi_x + 1):
                for ly in range(lo_y, hi_y + 1):
                    w = v.shifted(lx, ly)
                    if w in (p, q):
                        continue
                    if (q.x - p.x) * (w.y - p.y) - (q.y - p.y) * (w.x - p.x) != 0:
                        continue
                    t = (w.x - p.x) / (q.x - p.x) if q.x != p.x else (w.y - p.y) / (q.y - p.y)
                    if 0 < t < 1:
                        inner.append((t, w))
        out.extend(w for _, w in sorted(inner, key=lambda u: u[0]))
    return out


def _on_sphere(face, x, y) -> Point:
    return Point(x, y, face.sphere.power(x, y), face.sphere.m)


def _reflection_chord(face, g: Matrix2) -> tuple[Point, Point]:
    """Boundary points of the fixed line of a face-preserving half turn."""
    m = face.sphere.m
    pts = face.points
    moved = next((p for p in pts if act(g, p) != p), None)
    if moved is None:
        raise ComplexError("half turn fixes the face pointwise")
    gp = act(g, moved)
    # fixed line: 2 B(z, gp - p) = N(gp) - N(p)
    v = (gp.x - moved.x, gp.y - moved.y)
    rhs = norm_xy(m, gp.x, gp.y) - norm_xy(m, moved.x, moved.y)

    def f(x, y):
        return 2 * bilinear(m, (x, y), v) - rhs

    hits = []
    n = len(pts)
    for i in range(n):
        p, q = pts[i], pts[(i + 1) % n]
        fp, fq = f(p.x, p.y), f(q.x, q.y)
        if fp == 0:
            hits.append(p)
        elif fp * fq < 0:
            t = fp / (fp - fq)
            hits.append(_on_sphere(face, p.x + t * (q.x - p.x), p.y + t * (q.y - p.y)))
    uniq = []
    for h in hits:
        if h not in uniq:
            uniq.append(h)
    if len(uniq) != 2:
        raise ComplexError("fixed line of a half turn does not cut the face in a chord")
    for h in uniq:
        if act(g, h) != h:
            raise ComplexError("chord endpoint is not fixed")
    return uniq[0], uniq[1]


def _split_cycle(cycle: list[Point], a: Point, b: Point) -> list[tuple]:
    i, j = cycle.index(a), cycle.index(b)
    if i > j:
        i, j = j, i
    first = cycle[i : j + 1]
    second = cycle[j:] + cycle[: i + 1]
    return [tuple(first), tuple(second)]


class _Orbits:
    """Orbits of cells under the groupoid generated by side pairings."""

    def __init__(self, m: int, cells: dict, moves: list):
        self.m = m
        self.cells = cells  # key -> ordered tuple
        adj: dict = {k: [] for k in cells}
        for k1, k2, g in moves:
            adj[k1].append((k2, g))
            adj[k2].append((k1, g.inverse()))
        self.transport: dict = {}
        self.rep_of: dict = {}
        self.reps: list = []
        self.stab: dict = {}
        for start in sorted(cells, key=lambda k: (len(k), [vkey(p) for p in k])):
            if start in self.transport:
                continue
            self.reps.append(start)
            self.transport[start] = identity(m)
            self.rep_of[start] = start
            self.stab[start] = {}
            queue = deque([start])
            while queue:
                k = queue.popleft()
                gk = self.transport[k]
                for k2, g in adj[k]:
                    h = g @ gk
                    if k2 in self.transport:
                        s = self.transport[k2].inverse() @ h
                        if not s.is_central():
                            self.stab[start][s.projective_key()] = s
                        continue
                    self.transport[k2] = h
                    self.rep_of[k2] = start
                    queue.append(k2)


def _cell_moves(m: int, parent_cells: dict, pairings: dict, universe: dict) -> list:
    moves = []
    for i, (j, h) in pairings.items():
        for cell in parent_cells[i]:
            k1, (ax, ay) = normalize_cell(cell)
            img = tuple(vact(h, p) for p in cell)
            k2, (bx, by) = normalize_cell(img)
            if k1 not in universe or k2 not in universe:
                raise ComplexError("side pairing does not respect the cell structure")
            g = translation(m, -bx, -by) @ h @ translation(m, ax, ay)
            moves.append((k1, k2, g))
    return moves


def _universe(parent_cells: dict) -> dict:
    uni = {}
    for cells in parent_cells.values():
        for cell in cells:
            k, (lx, ly) = normalize_cell(cell)
            if k not in uni:
                uni[k] = tuple(vshift(p, -lx, -ly) for p in cell)
    return uni


def _parent_cells(faces: dict) -> dict:
    out = {}
    for i, cycles in faces.items():
        cells = []
        seen = set()
        for cyc in cycles:
            for c in _subcells(cyc):
                key = tuple(sorted((vkey(p) for p in c)))
                if key not in seen:
                    seen.add(key)
                    cells.append(c)
        out[i] = cells
    return out


def _subdivide(domain: FordDomain) -> dict:
    """Face index -> list of polygon cycles, refined so that stabilisers fix cells pointwise."""
    m = domain.m
    faces = {i: [tuple(f.points)] for i, f in enumerate(domain.faces)}
    parent = _parent_cells(faces)
    uni = _universe(parent)
    orb = _Orbits(m, uni, _cell_moves(m, parent, domain.pairings, uni))
    extra: list[Point] = []
    chords: dict = {}
    for rep in orb.reps:
        stab = list(orb.stab[rep].values())
        if not stab:
            continue
        cell = uni[rep]
        if len(cell) == 2:
            p, q = cell
            rev = [g for g in stab if act(g, p) == q]
            if not rev:
                continue
            face = next(f for f in domain.faces if _has_edge_translate(f.points, p, q))
            mid = _edge_midpoint(face, p, q)
            if act(rev[0], mid) != mid:
                raise ComplexError("edge reversal does not fix the midpoint")
            extra.append(mid)
        elif len(cell) > 2:
            idx = next(i for i, f in enumerate(domain.faces) if normalize_cell(f.points)[0] == rep)
            face = domain.faces[idx]
            lx, ly = normalize_cell(face.points)[1]
            g = translation(m, lx, ly) @ stab[0] @ translation(m, -lx, -ly)
            a, b = _reflection_chord(face, g)
            chords[idx] = (a, b)
            extra.extend([a, b])
    if not extra:
        return faces
    # close the new points under the side pairings
    extra_set = {normalize_cell((p,))[0][0] for p in extra}
    changed = True
    while changed:
        changed = False
        for i, (j, h) in domain.pairings.items():
            f = domain.faces[i]
            for x in _points_on_boundary(f.points, list(extra_set)):
                y = normalize_cell((act(h, x),))[0][0]
                if y not in extra_set:
                    extra_set.add(y)
                    changed = True
    extra_list = sorted(extra_set, key=vkey)
    out = {}
    for i, f in enumerate(domain.faces):
        cyc = _insert_points(list(f.points), extra_list)
        if i in chords:
            out[i] = _split_cycle(cyc, *chords[i])
        else:
            out[i] = [tuple(cyc)]
    return out


def _has_edge_translate(points, p, q) -> bool:
    n = len(points)
    for i in range(n):
        a, b = points[i], points[(i + 1) % n]
        for x, y in ((a, b), (b, a)):
            dx, dy = x.x - p.x, x.y - p.y
            if dx.denominator == 1 and dy.denominator == 1 and y == q.shifted(int(dx), int(dy)) and x == p.shifted(int(dx), int(dy)):
                return True
    return False


def _edge_midpoint(face, p, q) -> Point:
    # locate the translate of (p, q) on this face and lift the projected midpoint
    for i in range(len(face.points)):
        a, b = face.points[i], face.points[(i + 1) % len(face.points)]
        for x, y in ((a, b), (b, a)):
            dx, dy = x.x - p.x, x.y - p.y
            if dx.denominator == 1 and dy.denominator == 1 and x == p.shifted(int(dx), int(dy)) and y == q.shifted(int(dx), int(dy)):
                mid = _on_sphere(face, (x.x + y.x) / 2, (x.y + y.y) / 2)
                return mid.shifted(-int(dx), -int(dy))
    raise ComplexError("edge not found on face")


def _points_on_boundary(points, extra) -> list[Point]:
    found = []
    full = _insert_points(list(points), extra)
    for w in full:
        if w not in points:
            found.append(w)
    return found


def _truncate(cycle: tuple) -> tuple:
    out = []
    n = len(cycle)
    for i, p in enumerate(cycle):
        if isinstance(p, Point) and p.is_ideal():
            u, w = cycle[i - 1], cycle[(i + 1) % n]
            out.append(Trunc(p, u))
            out.append(Trunc(p, w))
        else:
            out.append(p)
    return tuple(out)


def _horo_cells(faces: dict) -> list[tuple]:
    """One polygon per cusp of the floor modulo translations."""
    sides: dict = {}
    for cycles in faces.values():
        for cyc in cycles:
            n = len(cyc)
            for i, p in enumerate(cyc):
                if not (isinstance(p, Point) and p.is_ideal()):
                    continue
                lx, ly = floor_offset(p.x, p.y)
                v = p.shifted(-lx, -ly)
                u = cyc[i - 1].shifted(-lx, -ly)
                w = cyc[(i + 1) % n].shifted(-lx, -ly)
                sides.setdefault(v, []).append((Trunc(v, u), Trunc(v, w)))
    out = []
    for v in sorted(sides, key=vkey):
        nxt = {}
        for a, b in sides[v]:
            if a in nxt:
                raise ComplexError("faces around a cusp do not form a cycle")
            nxt[a] = b
        start = min(nxt, key=vkey)
        cyc = [start]
        while True:
            b = nxt[cyc[-1]]
            if b == start:
                break
            cyc.append(b)
            if len(cyc) > len(nxt):
                raise ComplexError("faces around a cusp do not close up")
        if len(cyc) != len(nxt):
            raise ComplexError("cusp link is not a single cycle")
        out.append(tuple(cyc))
    return out


def _rotate_min(cycle: tuple) -> tuple:
    i = min(range(len(cycle)), key=lambda j: vkey(cycle[j]))
    return tuple(cycle[i:]) + tuple(cycle[:i])


def build_quotient(domain: FordDomain, with_stabilizers: bool = True) -> EquivariantCellComplex:
    m = domain.m
    if m in (1, 3):
        raise UnsupportedLevel("cusp stabilisers with torsion (m = 1, 3) are not supported by the cell construction")
    if not domain.pairings:
        raise ComplexError("side pairings have not been computed")
    faces = _subdivide(domain)
    tfaces = {i: [_truncate(c) for c in cycles] for i, cycles in faces.items()}
    horos = _horo_cells(faces)
    parent = _parent_cells(tfaces)
    uni = _universe(parent)
    horo_keys = []
    for h in horos:
        for c in _subcells(h):
            k, (lx, ly) = normalize_cell(c)
            if k not in uni:
                if len(c) <= 2:
                    raise ComplexError("horospherical cell has a side outside the floor")
                uni[k] = tuple(vshift(p, -lx, -ly) for p in c)
        horo_keys.append(normalize_cell(h)[0])
    orb = _Orbits(m, uni, _cell_moves(m, parent, domain.pairings, uni))
    # pointwise fixing
    for rep in orb.reps:
        for s in orb.stab[rep].values():
            for p in uni[rep]:
                if vact(s, p) != p:
                    raise ComplexError(f"cell stabiliser does not fix the cell {rep} pointwise")
    orbits: list[list[Orbit]] = [[], [], []]
    index = {}
    for rep in orb.reps:
        cell = uni[rep]
        dim = min(len(cell) - 1, 2)
        if dim == 1:
            cell = tuple(sorted(cell, key=vkey))
        elif dim == 2:
            cell = _rotate_min(cell)
        index[rep] = (dim, len(orbits[dim]))
        orbits[dim].append(Orbit(dim, cell, rep, horo=rep in horo_keys))
    table = {}
    for k, start in orb.rep_of.items():
        dim, idx = index[start]
        table[k] = (dim, idx, orb.transport[k])
    cx = EquivariantCellComplex(m, domain.level, orbits, [], [], table, len(horos), domain)
    nv, ne, nf = cx.counts()
    d1 = [[0] * ne for _ in range(nv)]
    for j, o in enumerate(orbits[1]):
        p, q = o.rep
        d1[cx.locate((q,))[0]][j] += 1
        d1[cx.locate((p,))[0]][j] -= 1
    d2 = [[0] * nf for _ in range(ne)]
    for j, o in enumerate(orbits[2]):
        for p, q in _cycle_edges(o.rep):
            idx, sign, _ = cx.edge_sign(p, q)
            d2[idx][j] += sign
    cx.d1, cx.d2 = d1, d2
    if with_stabilizers:
        for dim in range(3):
            for o in orbits[dim]:
                o.stabilizer = stabilizer(o.rep, domain.level)
    return cx


def stabilizer(cell: tuple, eta: IdealLevel, bound_factor: int = 1) -> StabilizerRecord:
    """Matrices of Gamma_0(eta) fixing every vertex of the cell."""
    p = finite_point(min(cell, key=lambda x: (finite_point(x).h2 == 0, -finite_point(x).h2)))
    elems = [g for g in point_stabilizer(p, eta, bound_factor) if all(vact(g, x) == x for x in cell)]
    return make_record(elems)


# ---------------------------------------------------------------- homology


@dataclass(frozen=True)
class Homology:
    H0: AbelianGroup
    H1: AbelianGroup
    H2: AbelianGroup
    beta1_mod2: int
    beta2_mod2: int
    betti1_rational: int


def homology(cx: EquivariantCellComplex) -> Homology:
    nv, ne, nf = cx.counts()
    H0 = homology_group(cx.d1, None, nv)
    H1 = homology_group(cx.d2, cx.d1, ne)
    H2 = homology_group(None, cx.d2, nf)
    r1 = rank_mod_p(cx.d1, 2) if ne else 0
    r2 = rank_mod_p(cx.d2, 2) if nf else 0
    b1 = ne - r1 - r2
    b2 = nf - r2
    return Homology(H0, H1, H2, b1, b2, H1.free)


def boundary_snf(cx: EquivariantCellComplex) -> tuple[SmithForm, SmithForm]:
    nv, ne, nf = cx.counts()
    return smith_normal_form(cx.d2, cols=nf), smith_normal_form(cx.d1, cols=ne)


def check_boundary(cx: EquivariantCellComplex) -> bool:
    nv, ne, nf = cx.counts()
    for i in range(nv):
        for j in range(nf):
            if sum(cx.d1[i][k] * cx.d2[k][j] for k in range(ne)):
                return False
    return True


# ---------------------------------------------------------------- presentation


@dataclass(frozen=True)
class Presentation:
    """Abelianised presentation of the group from its action on the retract.

    Generators are the elements of the vertex stabilisers together with one
    letter per edge orbit; relators are the stabiliser multiplication tables,
    the edge inclusions and one word per 2-cell.
    """

    generators: tuple[str, ...]
    relators: tuple[tuple[int, ...], ...]
    abelianization: AbelianGroup
    projective: bool

    @property
    def hom_to_f2(self) -> int:
        return self.abelianization.hom_to_f2_dim()


def presentation_and_abelianization(cx: EquivariantCellComplex, projective: bool = False, shuffle_seed: int | None = None) -> Presentation:
    m = cx.m
    one = identity(m)

    def key(g: Matrix2):
        return g.projective_key() if projective else g.key()

    V, E, F = cx.orbits
    for o in V + E:
        if o.stabilizer is None:
            o.stabilizer = stabilizer(o.rep, cx.level)
    # spanning tree and adjusted representatives
    a = {0: one}
    tree = set()
    b_e: dict = {}
    ends = []
    for j, e in enumerate(E):
        v0, k0 = cx.locate((e.rep[0],))
        v1, k1 = cx.locate((e.rep[1],))
        ends.append((v0, k0, v1, k1))
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for j, (v0, k0, v1, k1) in enumerate(ends):
            if j in tree:
                continue
            if v0 == u and v1 not in a:
                b = a[u] @ k0.inverse()
                a[v1] = b @ k1
                b_e[j] = b
                tree.add(j)
                queue.append(v1)
            elif v1 == u and v0 not in a:
                b = a[u] @ k1.inverse()
                a[v0] = b @ k0
                b_e[j] = b
                tree.add(j)
                queue.append(v0)
    if len(a) != len(V):
        raise ComplexError("quotient complex is not connected")
    g_e: dict = {}
    for j, (v0, k0, v1, k1) in enumerate(ends):
        if j not in b_e:
            b_e[j] = a[v0] @ k0.inverse()
        g_e[j] = b_e[j] @ k1 @ a[v1].inverse()
    # generators
    gens: list[str] = []
    gidx: dict = {}
    vstab: dict = {}
    for v, o in enumerate(V):
        conj = [a[v] @ g @ a[v].inverse() for g in o.stabilizer.elements]
        elems = {}
        for g in conj:
            elems.setdefault(key(g), g)
        vstab[v] = elems
        for k in sorted(elems):
            gidx[(v, k)] = len(gens)
            gens.append(f"v{v}:{k}")
    tidx = {}
    for j in range(len(E)):
        tidx[j] = len(gens)
        gens.append(f"t{j}")
    n = len(gens)
    rels: list[list[int]] = []

    def el(v, g):
        k = key(g)
        if (v, k) not in gidx:
            raise ComplexError("element expected in a vertex stabiliser is missing")
        return gidx[(v, k)]

    for v, elems in vstab.items():
        items = list(elems.values())
        for x in items:
            for y in items:
                r = [0] * n
                r[el(v, x)] += 1
                r[el(v, y)] += 1
                r[el(v, x @ y)] -= 1
                rels.append(r)
    for j in tree:
        r = [0] * n
        r[tidx[j]] = 1
        rels.append(r)
    for j, e in enumerate(E):
        v0, _, v1, _ = ends[j]
        b = b_e[j]
        for h in e.stabilizer.elements:
            hh = b @ h @ b.inverse()
            r = [0] * n
            r[el(v0, hh)] += 1
            r[el(v1, g_e[j].inverse() @ hh @ g_e[j])] -= 1
            rels.append(r)
    for f in F:
        cyc = f.rep
        r = [0] * n
        x0v, x0k = cx.locate((cyc[0],))
        k0 = x0k @ a[x0v].inverse()
        k = k0
        for p, q in _cycle_edges(cyc):
            j, H = cx.locate((p, q))
            e = E[j]
            h_eps = H @ b_e[j].inverse()
            v0, _, v1, _ = ends[j]
            if vact(H, e.rep[0]) == p:
                s = k.inverse() @ h_eps
                r[el(v0, s)] += 1
                r[tidx[j]] += 1
                k = h_eps @ g_e[j]
            else:
                s = k.inverse() @ h_eps @ g_e[j]
                r[el(v1, s)] += 1
                r[tidx[j]] -= 1
                k = h_eps
        r[el(x0v, k0.inverse() @ k)] -= 1
        rels.append(r)
    if shuffle_seed is not None:
        import random

        random.Random(shuffle_seed).shuffle(rels)
    ab = cokernel(rels, n)
    return Presentation(tuple(gens), tuple(tuple(r) for r in rels), ab, projective)


# ---------------------------------------------------------------- serialisation


def _vjson(p: Vertex):
    if isinstance(p, Point):
        return [str(p.x), str(p.y), str(p.h2)]
    return {"cusp": _vjson(p.v), "towards": _vjson(p.u)}


def complex_to_json(cx: EquivariantCellComplex) -> dict:
    return {
        "m": cx.m,
        "counts": list(cx.counts()),
        "cusp_cells": cx.cusp_classes,
        "cells": [
            [
                {
                    "vertices": [_vjson(p) for p in o.rep],
                    "stabilizer": o.stabilizer.type if o.stabilizer else None,
                    "horospherical": o.horo,
                }
                for o in cx.orbits[d]
            ]
            for d in range(3)
        ],
        "d1": cx.d1,
        "d2": cx.d2,
    }
