"""Oriented trivalent foliation graphs with a circle-valued height.

A graph models a closed surface carrying a rank-one Morse form with all
leaves compact: vertices are the saddle leaves (MERGE = two leaves flowing
into one, SPLIT = one into two), edges are annuli of regular leaves, the
vertex angle is the critical value on the circle (in turn units), and an
edge's winding counts the extra full turns its annulus makes.  The Calabi
property of the form becomes strong connectivity of the directed graph.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from fractions import Fraction

MERGE = "MERGE"
SPLIT = "SPLIT"

IN_SLOTS = {MERGE: ("in0", "in1"), SPLIT: ("in0",)}
OUT_SLOTS = {MERGE: ("out0",), SPLIT: ("out0", "out1")}


@dataclass(frozen=True)
class Vertex:
    id: str
    kind: str
    angle: Fraction


@dataclass(frozen=True)
class End:
    vertex: str
    slot: str


@dataclass(frozen=True)
class Edge:
    id: str
    tail: End
    head: End
    winding: int


@dataclass(frozen=True)
class FoliationGraph:
    name: str
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        # Canonical id order makes equality structural and serialization
        # order-independent.
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices, key=lambda v: v.id)))
        object.__setattr__(self, "edges", tuple(sorted(self.edges, key=lambda e: e.id)))

    def vertex(self, vid: str) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise KeyError(vid)

    def merge_count(self) -> int:
        return sum(1 for v in self.vertices if v.kind == MERGE)

    def split_count(self) -> int:
        return sum(1 for v in self.vertices if v.kind == SPLIT)

    def out_edges(self, vid: str) -> list[Edge]:
        return sorted(
            (e for e in self.edges if e.tail.vertex == vid), key=lambda e: e.id
        )

    def in_edges(self, vid: str) -> list[Edge]:
        return sorted(
            (e for e in self.edges if e.head.vertex == vid), key=lambda e: e.id
        )


@dataclass(frozen=True)
class FreeCircle:
    """Vertex-free foliation graph: the height map is a degree-w covering."""

    name: str
    winding: int


Foliation = FoliationGraph | FreeCircle


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[str, ...]


@dataclass(frozen=True)
class Obstruction:
    """Witness that no positive path runs from ``source`` to ``target``.

    ``out_set`` is everything positively reachable from ``source``; by
    construction it has no outgoing edges leaving it.
    """

    source: str
    target: str
    out_set: tuple[str, ...]


@dataclass(frozen=True)
class CalabiCertificate:
    verdict: bool
    cycles: tuple[tuple[str, ...], ...] = ()
    obstruction: Obstruction | None = None


@dataclass(frozen=True)
class NoPath:
    out_set: tuple[str, ...]


def _turn(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


def validate(g: Foliation) -> ValidationReport:
    """Check every structural invariant, reporting all failures."""
    bad: list[str] = []
    if isinstance(g, FreeCircle):
        if g.winding < 1:
            bad.append("free circle winding must be >= 1")
        return ValidationReport(not bad, tuple(bad))

    ids = [v.id for v in g.vertices]
    if len(set(ids)) != len(ids):
        bad.append("duplicate vertex ids")
    eids = [e.id for e in g.edges]
    if len(set(eids)) != len(eids):
        bad.append("duplicate edge ids")
    if not g.vertices:
        bad.append("graph has no vertices (use a free circle record instead)")
        return ValidationReport(False, tuple(bad))

    byid = {v.id: v for v in g.vertices}
    for v in g.vertices:
        if v.kind not in (MERGE, SPLIT):
            bad.append(f"vertex {v.id}: unknown kind {v.kind}")
        if not 0 <= v.angle < 1:
            bad.append(f"vertex {v.id}: angle {v.angle} outside [0, 1)")

    # Slot discipline: every slot of every vertex used by exactly one
    # edge end (an edge may occupy two slots of one vertex).
    usage: Counter[tuple[str, str]] = Counter()
    for e in g.edges:
        for end, direction in ((e.tail, "out"), (e.head, "in")):
            v = byid.get(end.vertex)
            if v is None:
                bad.append(f"edge {e.id}: unknown vertex {end.vertex}")
                continue
            legal = OUT_SLOTS if direction == "out" else IN_SLOTS
            if end.slot not in legal.get(v.kind, ()):
                bad.append(
                    f"edge {e.id}: slot {end.vertex}.{end.slot} not an "
                    f"{direction}-slot of a {v.kind} vertex"
                )
            else:
                usage[(end.vertex, end.slot)] += 1
        if e.winding < 0:
            bad.append(f"edge {e.id}: negative winding")
        if e.tail.vertex == e.head.vertex and e.winding < 1:
            bad.append(f"edge {e.id}: loop needs winding >= 1")
    for v in g.vertices:
        if v.kind not in (MERGE, SPLIT):
            continue
        for slot in IN_SLOTS[v.kind] + OUT_SLOTS[v.kind]:
            n = usage.get((v.id, slot), 0)
            if n == 0:
                bad.append(f"vertex {v.id}: slot {slot} unused")
            elif n > 1:
                bad.append(f"vertex {v.id}: slot {slot} reused ({n} edge ends)")

    angles = [v.angle for v in g.vertices]
    if len(set(angles)) != len(angles):
        bad.append("vertex angles not pairwise distinct (critical values must differ)")

    if g.merge_count() != g.split_count():
        bad.append(
            f"#MERGE = {g.merge_count()} differs from #SPLIT = {g.split_count()}"
        )
    if 2 * len(g.edges) != 3 * len(g.vertices):
        bad.append(f"2E = {2 * len(g.edges)} differs from 3V = {3 * len(g.vertices)}")

    # Connectivity of the underlying undirected graph.
    if not bad or all("unknown vertex" not in b for b in bad):
        nbrs: dict[str, set[str]] = {v.id: set() for v in g.vertices}
        for e in g.edges:
            if e.tail.vertex in nbrs and e.head.vertex in nbrs:
                nbrs[e.tail.vertex].add(e.head.vertex)
                nbrs[e.head.vertex].add(e.tail.vertex)
        seen = {g.vertices[0].id}
        queue = deque(seen)
        while queue:
            for w in nbrs[queue.popleft()]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        if len(seen) != len(g.vertices):
            bad.append("underlying graph not connected")

    return ValidationReport(not bad, tuple(bad))


def builtin(name: str) -> Foliation:
    """Built-in graphs: ``theta``, ``dumbbell``, ``free-circle(w)``.

    theta is the classic Calabi genus-2 graph (complexity 1); dumbbell is
    its non-Calabi companion (complexity 2) with a loop on each vertex.
    """
    if name == "theta":
        s = Vertex("s", SPLIT, Fraction(1, 4))
        m = Vertex("m", MERGE, Fraction(3, 4))
        return FoliationGraph(
            "theta",
            (s, m),
            (
                Edge("e0", End("m", "out0"), End("s", "in0"), 0),
                Edge("e1", End("s", "out0"), End("m", "in0"), 0),
                Edge("e2", End("s", "out1"), End("m", "in1"), 0),
            ),
        )
    if name == "dumbbell":
        s = Vertex("s", SPLIT, Fraction(1, 4))
        m = Vertex("m", MERGE, Fraction(3, 4))
        return FoliationGraph(
            "dumbbell",
            (s, m),
            (
                Edge("e1", End("s", "out0"), End("m", "in0"), 0),
                Edge("e2", End("s", "out1"), End("s", "in0"), 1),
                Edge("e3", End("m", "out0"), End("m", "in1"), 1),
            ),
        )
    if name.startswith("free-circle(") and name.endswith(")"):
        w = int(name[len("free-circle(") : -1])
        if w < 1:
            raise ValueError("free circle winding must be >= 1")
        return FreeCircle(name, w)
    raise ValueError(f"unknown builtin graph {name!r}")


def _edge_crossings(g: FoliationGraph, e: Edge, a: Fraction) -> int:
    """How many times edge ``e`` crosses the regular level ``a``."""
    t = g.vertex(e.tail.vertex).angle
    h = g.vertex(e.head.vertex).angle
    span = _turn(h - t)
    inside = 0 < _turn(a - t) < span
    return e.winding + (1 if inside else 0)


def crossing_count(g: Foliation, a: Fraction) -> int:
    """Cardinality of the height preimage of the regular angle ``a``."""
    if isinstance(g, FreeCircle):
        return g.winding
    a = _turn(Fraction(a))
    if any(v.angle == a for v in g.vertices):
        raise ValueError(f"angle {a} is a critical value")
    return sum(_edge_crossings(g, e, a) for e in g.edges)


def regular_levels(g: FoliationGraph) -> list[Fraction]:
    """One regular sample angle per interval between consecutive critical
    values, in increasing order: the circular midpoints."""
    angles = sorted(v.angle for v in g.vertices)
    mids = []
    for i, lo in enumerate(angles):
        hi = angles[i + 1] if i + 1 < len(angles) else angles[0] + 1
        mids.append(_turn((lo + hi) / 2))
    return sorted(mids)


def complexity(g: Foliation) -> tuple[int, Fraction]:
    """Minimum crossing count over regular levels, with the smallest
    minimizing sample angle as witness."""
    if isinstance(g, FreeCircle):
        return g.winding, Fraction(0)
    best: tuple[int, Fraction] | None = None
    for a in regular_levels(g):
        c = crossing_count(g, a)
        if best is None or c < best[0]:
            best = (c, a)
    assert best is not None
    return best


def _successors(g: FoliationGraph) -> dict[str, list[Edge]]:
    return {v.id: g.out_edges(v.id) for v in g.vertices}


def _reachable(g: FoliationGraph, start: str) -> set[str]:
    succ = _successors(g)
    seen = {start}
    queue = deque([start])
    while queue:
        for e in succ[queue.popleft()]:
            if e.head.vertex not in seen:
                seen.add(e.head.vertex)
                queue.append(e.head.vertex)
    return seen


def positive_path(g: FoliationGraph, x: str, y: str) -> list[str] | NoPath:
    """Shortest sequence of edges traversed tail-to-head from x to y.

    For x == y a nonempty closed path is returned.  When no path exists
    the positively reachable set of x is returned as evidence.
    """
    if isinstance(g, FreeCircle):
        raise ValueError("free circles have no vertices")
    g.vertex(x), g.vertex(y)
    succ = _successors(g)

    def bfs(sources: list[tuple[str, list[str]]]) -> list[str] | None:
        seen = {v for v, _ in sources}
        queue = deque(sources)
        while queue:
            v, path = queue.popleft()
            if v == y:
                return path
            for e in succ[v]:
                w = e.head.vertex
                if w == y:
                    return path + [e.id]
                if w not in seen:
                    seen.add(w)
                    queue.append((w, path + [e.id]))
        return None

    if x != y:
        found = bfs([(x, [])])
    else:
        # Closed walk: leave x along each out-edge and come back.
        found = None
        for e in succ[x]:
            tail = [e.id] if e.head.vertex == y else None
            if tail is None:
                cont = bfs([(e.head.vertex, [e.id])])
                tail = cont
            if tail is not None and (found is None or len(tail) < len(found)):
                found = tail
    if found is not None:
        return found
    return NoPath(tuple(sorted(_reachable(g, x))))


def is_calabi(g: Foliation) -> CalabiCertificate:
    """Decide the Calabi property: every point lies on a positive cycle.

    For a connected oriented graph this coincides with strong
    connectivity, so the certificate is either a family of directed
    cycles covering every edge or a vertex pair with an empty positive
    out-set between them.
    """
    if isinstance(g, FreeCircle):
        return CalabiCertificate(True)
    for v in sorted(g.vertices, key=lambda v: v.id):
        reach = _reachable(g, v.id)
        if len(reach) != len(g.vertices):
            target = min(u.id for u in g.vertices if u.id not in reach)
            return CalabiCertificate(
                False, obstruction=Obstruction(v.id, target, tuple(sorted(reach)))
            )
    cycles = []
    for e in sorted(g.edges, key=lambda e: e.id):
        if e.head.vertex == e.tail.vertex:
            cycles.append((e.id,))
            continue
        back = positive_path(g, e.head.vertex, e.tail.vertex)
        assert not isinstance(back, NoPath)
        cycle = [e.id] + back
        k = cycle.index(min(cycle))
        cycles.append(tuple(cycle[k:] + cycle[:k]))
    unique = tuple(dict.fromkeys(cycles))
    return CalabiCertificate(True, cycles=unique)


def euler_genus(g: Foliation) -> tuple[int, int]:
    """Euler characteristic and genus of the modeled surface."""
    if isinstance(g, FreeCircle):
        return 0, 1
    nv, ne = len(g.vertices), len(g.edges)
    genus = (nv + 2) // 2
    betti = ne - nv + 1
    if genus != betti or (nv + 2) % 2:
        raise ValueError("graph violates 2E = 3V; validate it first")
    return -nv, genus


def _multi_adjacency(g: FoliationGraph) -> Counter[tuple[str, str]]:
    return Counter((e.tail.vertex, e.head.vertex) for e in g.edges)


def isomorphic(g1: Foliation, g2: Foliation) -> bool:
    """Kind-preserving bijection matching oriented incidence.

    Slots within {in0,in1} and {out0,out1} are interchangeable, and angles
    and windings carry no structure here, so the comparison reduces to the
    directed multigraphs with vertex kinds.
    """
    if isinstance(g1, FreeCircle) or isinstance(g2, FreeCircle):
        return isinstance(g1, FreeCircle) and isinstance(g2, FreeCircle)
    if len(g1.vertices) != len(g2.vertices) or len(g1.edges) != len(g2.edges):
        return False
    if g1.merge_count() != g2.merge_count():
        return False

    adj1, adj2 = _multi_adjacency(g1), _multi_adjacency(g2)
    kind1 = {v.id: v.kind for v in g1.vertices}
    kind2 = {v.id: v.kind for v in g2.vertices}

    def signature(adj, kinds, vid):
        outs = Counter()
        ins = Counter()
        loops = 0
        for (t, h), n in adj.items():
            if t == h == vid:
                loops = n
            elif t == vid:
                outs[kinds[h]] += n
            elif h == vid:
                ins[kinds[t]] += n
        return (kinds[vid], loops, tuple(sorted(outs.items())), tuple(sorted(ins.items())))

    sig1 = {v.id: signature(adj1, kind1, v.id) for v in g1.vertices}
    sig2 = {v.id: signature(adj2, kind2, v.id) for v in g2.vertices}
    if sorted(sig1.values()) != sorted(sig2.values()):
        return False

    order = sorted(sig1, key=lambda v: (sig1[v], v))
    candidates = {v: [w for w in sig2 if sig2[w] == sig1[v]] for v in order}

    def extend(i: int, mapping: dict[str, str], used: set[str]) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for w in candidates[v]:
            if w in used:
                continue
            ok = adj1.get((v, v), 0) == adj2.get((w, w), 0)
            for u, img in mapping.items():
                if not ok:
                    break
                ok = (
                    adj1.get((v, u), 0) == adj2.get((w, img), 0)
                    and adj1.get((u, v), 0) == adj2.get((img, w), 0)
                )
            if ok:
                mapping[v] = w
                used.add(w)
                if extend(i + 1, mapping, used):
                    return True
                del mapping[v]
                used.remove(w)
        return False

    return extend(0, {}, set())
