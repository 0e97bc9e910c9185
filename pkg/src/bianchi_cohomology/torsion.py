"""Non-central l-torsion subcomplexes of the quotient and their reduction."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .snf import rank_mod_p


class TorsionError(Exception):
    pass


class NotOneDimensional(TorsionError):
    pass


class UnknownComponent(TorsionError):
    pass


CIRCLE, IOTA, THETA, DUMBBELL = "o", "i", "theta", "db"
COMPONENT_ORDER = (CIRCLE, IOTA, THETA, DUMBBELL)

# vertex types whose mod-l cohomology restricts isomorphically to the edge type
_MERGEABLE = {2: {"Z/4", "Di"}, 3: {"Z/6", "Te"}}
_EDGE_TYPE = {2: "Z/4", 3: "Z/6"}


@dataclass
class TorsionGraph:
    """Quotient of a torsion subcomplex as a multigraph with stabiliser labels.

    Vertex and edge identifiers refer to orbit indices of the ambient complex
    until the graph is reduced; reduction keeps the identifiers of surviving
    cells.
    """

    ell: int
    vertices: dict[int, str]  # id -> stabiliser type
    edges: dict[int, tuple[int, int, str]]  # id -> (tail, head, stabiliser type)
    reduced: bool = False
    # surviving edge -> original edges it replaces
    paths: dict[int, tuple[int, ...]] | None = None

    def degree(self, v: int) -> int:
        return sum((a == v) + (b == v) for a, b, _ in self.edges.values())

    def euler_characteristic(self) -> int:
        return len(self.vertices) - len(self.edges)

    def components(self) -> list[tuple[list[int], list[int]]]:
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b, _ in self.edges.values():
            parent[find(a)] = find(b)
        groups: dict[int, tuple[list, list]] = {}
        for v in sorted(self.vertices):
            groups.setdefault(find(v), ([], []))[0].append(v)
        for e in sorted(self.edges):
            groups[find(self.edges[e][0])][1].append(e)
        return [groups[k] for k in sorted(groups)]


@dataclass(frozen=True)
class ComponentType:
    tag: str

    def __str__(self):
        return self.tag


@dataclass(frozen=True)
class TorsionCensus:
    ell: int
    k: int
    m: int
    n: int
    v: int
    chi: int
    c: int
    multiset: tuple[str, ...]
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def sign_v(self) -> int:
        return 1 if self.v > 0 else 0

    def symbols(self) -> str:
        return " ".join(self.multiset) if self.multiset else "empty"

    def counts(self) -> dict[str, int]:
        c = Counter(self.multiset)
        return {t: c.get(t, 0) for t in COMPONENT_ORDER}


def extract(cx, ell: int) -> TorsionGraph:
    """Cells whose stabiliser has a non-central element of order ell."""
    if ell not in (2, 3):
        raise ValueError("only l = 2 and l = 3 are supported")
    V, E, F = cx.orbits
    for o in F:
        if o.stabilizer is not None and o.stabilizer.has_noncentral_order(ell):
            raise NotOneDimensional("a 2-cell carries non-central torsion")
    verts = {i: o.stabilizer.type for i, o in enumerate(V) if o.stabilizer.has_noncentral_order(ell)}
    edges = {}
    for j, o in enumerate(E):
        if not o.stabilizer.has_noncentral_order(ell):
            continue
        a = cx.locate((o.rep[0],))[0]
        b = cx.locate((o.rep[1],))[0]
        if a not in verts or b not in verts:
            raise TorsionError("torsion edge with a vertex outside the subcomplex")
        edges[j] = (a, b, o.stabilizer.type)
    return TorsionGraph(ell, verts, edges)


def reduce(graph: TorsionGraph) -> TorsionGraph:
    """Merge the two edges at every degree-2 vertex with matching cohomology."""
    verts = dict(graph.vertices)
    edges = dict(graph.edges)
    paths = dict(graph.paths) if graph.paths else {e: (e,) for e in edges}
    ok = _MERGEABLE[graph.ell]
    edge_type = _EDGE_TYPE[graph.ell]
    changed = True
    while changed:
        changed = False
        for v in sorted(verts):
            if verts[v] not in ok:
                continue
            inc = [e for e, (a, b, _) in edges.items() if v in (a, b)]
            if len(inc) != 2:
                continue
            e1, e2 = inc
            if edges[e1][2] != edge_type or edges[e2][2] != edge_type:
                continue
            other1 = edges[e1][1] if edges[e1][0] == v else edges[e1][0]
            other2 = edges[e2][1] if edges[e2][0] == v else edges[e2][0]
            if other1 == v or other2 == v:
                continue  # loop at v: the vertex of a circle
            del edges[e2]
            edges[e1] = (other1, other2, edge_type)
            paths[e1] = paths[e1] + paths.pop(e2)
            del verts[v]
            changed = True
            break
    return TorsionGraph(graph.ell, verts, edges, reduced=True, paths=paths)


def _classify_component(g: TorsionGraph, vs: list[int], es: list[int]) -> str:
    vt = sorted(g.vertices[v] for v in vs)
    loops = sum(1 for e in es if g.edges[e][0] == g.edges[e][1])
    ne = len(es)
    if g.ell == 2:
        if len(vs) == 1 and ne == 1 and loops == 1 and vt[0] in ("Z/4", "Di"):
            return CIRCLE
        if vt == ["Te", "Te"] and ne == 1 and loops == 0:
            return IOTA
        if vt == ["Q8", "Q8"] and ne == 3 and loops == 0:
            return THETA
        if vt == ["Q8", "Q8"] and ne == 3 and loops == 2:
            return DUMBBELL
    else:
        if len(vs) == 1 and ne == 1 and loops == 1 and vt[0] in ("Z/6", "Te"):
            return CIRCLE
        if len(vs) == 2 and ne == 1 and loops == 0 and vt == ["Di", "Di"]:
            return IOTA
    detail = {"vertices": {v: g.vertices[v] for v in vs}, "edges": {e: g.edges[e] for e in es}}
    raise UnknownComponent(f"component does not match a known type: {detail}")


def classify(graph: TorsionGraph) -> list[ComponentType]:
    if not graph.reduced:
        graph = reduce(graph)
    out = [ComponentType(_classify_component(graph, vs, es)) for vs, es in graph.components()]
    return sorted(out, key=lambda t: COMPONENT_ORDER.index(t.tag))


def _nullspace_mod2(M: list[list[int]], ncols: int) -> list[list[int]]:
    """Basis of {x : M x = 0} over F_2."""
    rows = [[v % 2 for v in r] for r in M]
    pivots = []
    r = 0
    for j in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][j]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][j]:
                rows[i] = [(a + b) % 2 for a, b in zip(rows[i], rows[r])]
        pivots.append(j)
        r += 1
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        x = [0] * ncols
        x[f] = 1
        for i, pj in enumerate(pivots):
            if rows[i][f]:
                x[pj] = 1
        basis.append(x)
    return basis


def cokernel_rank(graph: TorsionGraph, d1, d2, nv: int, ne: int, nf: int) -> int:
    """Corank of H^1(quotient; F_2) -> H^1(subcomplex; F_2)."""
    vs = sorted(graph.vertices)
    es = sorted(graph.edges)
    if not es:
        return 0
    # 1-cocycles of the full quotient: functions on edges vanishing on boundaries of 2-cells
    d2t = [[d2[i][j] for i in range(ne)] for j in range(nf)]
    cocycles = _nullspace_mod2(d2t, ne) if nf else [[1 if i == j else 0 for i in range(ne)] for j in range(ne)]
    paths = graph.paths or {e: (e,) for e in es}
    restricted = [[sum(z[x] for x in paths[e]) % 2 for e in es] for z in cocycles]
    # coboundaries of the subgraph
    cob = []
    for v in vs:
        row = []
        for e in es:
            a, b, _ = graph.edges[e]
            row.append(((a == v) + (b == v)) % 2 if a != b else 0)
        cob.append(row)
    r_cob = rank_mod_p(cob, 2) if cob else 0
    h1_sub = len(es) - r_cob
    r_img = (rank_mod_p(restricted + cob, 2) if restricted + cob else 0) - r_cob
    return h1_sub - r_img


def census(graph: TorsionGraph, cx) -> TorsionCensus:
    """Census of the reduced graph; c is computed on the unreduced graph.

    The same cokernel rank evaluated on the reduced graph is kept in
    ``extra["c_reduced"]`` as a diagnostic.
    """
    unreduced = graph if not graph.reduced else None
    red = reduce(graph) if not graph.reduced else graph
    types = [t.tag for t in classify(red)]
    k = types.count(CIRCLE)
    if graph.ell == 2:
        m_ = sum(1 for t in red.vertices.values() if t == "Q8")
        n_ = sum(1 for t in red.vertices.values() if t == "Te")
    else:
        m_ = 0
        n_ = sum(1 for t in red.vertices.values() if t == "Di")
    chi = red.euler_characteristic()
    c = 0
    extra = {}
    if cx is not None:
        nv, ne, nf = cx.counts()
        c_red = cokernel_rank(red, cx.d1, cx.d2, nv, ne, nf)
        c = cokernel_rank(unreduced, cx.d1, cx.d2, nv, ne, nf) if unreduced is not None else c_red
        extra["c_reduced"] = c_red
    return TorsionCensus(graph.ell, k, m_, n_, m_ + n_, chi, c, tuple(types), extra)


def subdivide_edge(graph: TorsionGraph, chains, edge: int):
    """Subdivide one subcomplex edge in the graph and in the ambient chain complex.

    Returns the new graph and a chain-complex stand-in with d1, d2 and counts.
    """
    nv, ne, nf = chains.counts()
    a, b, typ = graph.edges[edge]
    w, e2 = nv, ne
    d1 = [row[:] + [0] for row in chains.d1] + [[0] * (ne + 1)]
    # old edge now runs a -> w, new edge runs w -> b
    col = [d1[i][edge] for i in range(nv)]
    for i in range(nv):
        d1[i][edge] = 0
    tail = next((i for i in range(nv) if col[i] < 0), None)
    head = next((i for i in range(nv) if col[i] > 0), None)
    if tail is None:  # loop
        tail = head = a
    d1[tail][edge] -= 1
    d1[w][edge] += 1
    d1[w][e2] -= 1
    d1[head][e2] += 1
    d2 = [row[:] for row in chains.d2] + [chains.d2[edge][:] if nf else []]
    verts = dict(graph.vertices)
    verts[w] = typ
    edges = dict(graph.edges)
    edges[edge] = (tail, w, typ)
    edges[e2] = (w, head, typ)
    return TorsionGraph(graph.ell, verts, edges), _Chains(d1, d2, (nv + 1, ne + 1, nf))


@dataclass
class _Chains:
    d1: list
    d2: list
    shape: tuple

    def counts(self):
        return self.shape
