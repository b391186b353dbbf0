"""One-inclusion hypergraphs: construction, degree statistics, shifting,
maximum density, and min-max list orientations via an integer flow network.

The one-inclusion graph of a class groups its patterns into hyperedges, one
per (direction i, assignment to the other coordinates): the patterns that
agree everywhere except possibly at i.  Every vertex lies in exactly n edges,
one per direction (its own line, possibly a singleton).

A list orientation assigns to each edge at most ell of its own vertices; a
vertex pays one unit of ell-outdegree for every incident edge that does not
select it.  The least achievable maximum ell-outdegree equals the least
integer c for which a layered flow network (source -> edges -> vertices ->
sink, with capacities (|e|-ell)_+, 1, and c) carries a flow saturating the
source.  We binary-search c and read the orientation off an integral
maximum flow, so the result is an exact optimum, not an upper bound.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .classes import CapExceeded, HypothesisClass, Pattern

DENSITY_BRUTEFORCE_CAP = 14


@dataclass(frozen=True)
class Edge:
    """A hyperedge: the patterns agreeing with ``fixed`` off ``direction``."""

    direction: int
    fixed: Pattern
    members: tuple[Pattern, ...]

    def __len__(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class OneInclusionGraph:
    n: int
    k: int
    vertices: tuple[Pattern, ...]
    edges: tuple[Edge, ...]


def build_oig(h: HypothesisClass) -> OneInclusionGraph:
    """Build the complete hyperedge set; total edge membership is n * |H|."""
    if h.is_empty:
        raise ValueError("the one-inclusion graph of the empty class is undefined")
    groups: dict[tuple[int, Pattern], list[Pattern]] = defaultdict(list)
    for p in h.patterns:
        for i in range(h.n):
            groups[(i, p[:i] + p[i + 1:])].append(p)
    edges = tuple(Edge(direction=i, fixed=f, members=tuple(sorted(groups[(i, f)])))
                  for (i, f) in sorted(groups))
    return OneInclusionGraph(n=h.n, k=h.k, vertices=tuple(sorted(h.patterns)), edges=edges)


@dataclass(frozen=True)
class DegreeStats:
    """Per-vertex ell-degrees plus the two exact-rational averages.

    avd averages |e| over edges larger than ell; savd averages the overhangs
    (|e| - ell)_+ over all edges.  Always savd <= avd."""

    ell: int
    degrees: dict[Pattern, int]
    avd: Fraction
    savd: Fraction


def degree_stats(g: OneInclusionGraph, ell: int) -> DegreeStats:
    degrees = {v: 0 for v in g.vertices}
    big_total = 0
    overhang = 0
    for e in g.edges:
        s = len(e)
        if s > ell:
            big_total += s
            overhang += s - ell
            for v in e.members:
                degrees[v] += 1
    nv = len(g.vertices)
    return DegreeStats(ell=ell, degrees=degrees,
                       avd=Fraction(big_total, nv), savd=Fraction(overhang, nv))


def shift(h: HypothesisClass, i: int) -> HypothesisClass:
    """Push every direction-i edge downward: an edge of size s is re-laid on
    the labels {0, ..., s-1}.  Size-preserving; labels are 0-based here."""
    if not (0 <= i < h.n):
        raise ValueError(f"direction {i} out of range [0,{h.n})")
    groups: dict[Pattern, int] = defaultdict(int)
    for p in h.patterns:
        groups[p[:i] + p[i + 1:]] += 1
    shifted = set()
    for f, s in groups.items():
        for v in range(s):
            shifted.add(f[:i] + (v,) + f[i:])
    return HypothesisClass(h.n, h.k, frozenset(shifted))


def shift_fixed_point(h: HypothesisClass) -> HypothesisClass:
    """Apply shifts round-robin over directions until a full sweep is a no-op.

    Terminates because the total coordinate sum strictly drops on any change.
    The result is downward closed (verified before returning) and has the
    same cardinality as the input.
    """
    current = h
    changed = True
    while changed:
        changed = False
        for i in range(h.n):
            nxt = shift(current, i)
            if nxt.patterns != current.patterns:
                current = nxt
                changed = True
    assert is_downward_closed(current), "shift fixed point must be downward closed"
    assert len(current) == len(h), "shifting must preserve cardinality"
    return current


def is_downward_closed(h: HypothesisClass) -> bool:
    """Every single-coordinate decrement of a member is a member."""
    pats = h.patterns
    for p in pats:
        for i, v in enumerate(p):
            if v > 0 and p[:i] + (v - 1,) + p[i + 1:] not in pats:
                return False
    return True


def max_density_bruteforce(h: HypothesisClass, ell: int,
                           cap: int = DENSITY_BRUTEFORCE_CAP) -> Fraction:
    """Exact maximum of savd over all nonempty sub-classes, by enumeration.

    Exponential in |H|; refuses inputs above ``cap``.
    """
    if h.is_empty:
        raise ValueError("maximum density of the empty class is undefined")
    if len(h) > cap:
        raise CapExceeded(f"|H| = {len(h)} exceeds subset-enumeration cap {cap}")
    pats = sorted(h.patterns)
    best = Fraction(0)
    for r in range(1, len(pats) + 1):
        for subset in combinations(pats, r):
            groups: dict[tuple[int, Pattern], int] = defaultdict(int)
            for p in subset:
                for i in range(h.n):
                    groups[(i, p[:i] + p[i + 1:])] += 1
            overhang = sum(s - ell for s in groups.values() if s > ell)
            best = max(best, Fraction(overhang, r))
    return best


# ---------------------------------------------------------------------------
# Integer flow network and min-max orientation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FlowNetwork:
    """Layered network: source -> one node per demanding edge -> one node per
    vertex -> sink.  Source arcs carry (|e|-ell)_+, middle arcs 1, sink arcs
    the uniform budget c."""

    edge_demands: tuple[int, ...]
    incidence: tuple[tuple[int, ...], ...]  # per demanding edge: vertex indices
    num_vertices: int
    sink_capacity: int


class _Dinic:
    """Max flow on integer capacities; augmentation order is fixed by arc
    insertion order, so results are reproducible."""

    def __init__(self, size: int):
        self.adj: list[list[list[int]]] = [[] for _ in range(size)]

    def add_arc(self, u: int, v: int, cap: int) -> list[int]:
        arc = [v, cap, len(self.adj[v])]
        rev = [u, 0, len(self.adj[u])]
        self.adj[u].append(arc)
        self.adj[v].append(rev)
        return arc

    def max_flow(self, s: int, t: int) -> int:
        flow = 0
        while True:
            level = [-1] * len(self.adj)
            level[s] = 0
            queue = [s]
            for u in queue:
                for v, cap, _ in self.adj[u]:
                    if cap > 0 and level[v] < 0:
                        level[v] = level[u] + 1
                        queue.append(v)
            if level[t] < 0:
                return flow
            it = [0] * len(self.adj)

            def dfs(u: int, limit: int) -> int:
                if u == t:
                    return limit
                while it[u] < len(self.adj[u]):
                    arc = self.adj[u][it[u]]
                    v, cap, rev = arc
                    if cap > 0 and level[v] == level[u] + 1:
                        pushed = dfs(v, min(limit, cap))
                        if pushed:
                            arc[1] -= pushed
                            self.adj[v][rev][1] += pushed
                            return pushed
                    it[u] += 1
                return 0

            while True:
                pushed = dfs(s, 1 << 62)
                if not pushed:
                    break
                flow += pushed


def build_flow_network(g: OneInclusionGraph, ell: int, sink_capacity: int) -> FlowNetwork:
    """Network over the demanding edges (|e| > ell) of ``g``."""
    index = {v: j for j, v in enumerate(g.vertices)}
    demands = []
    incidence = []
    for e in g.edges:
        d = len(e) - ell
        if d > 0:
            demands.append(d)
            incidence.append(tuple(index[v] for v in e.members))
    return FlowNetwork(edge_demands=tuple(demands), incidence=tuple(incidence),
                       num_vertices=len(g.vertices), sink_capacity=sink_capacity)


def max_flow_value(net: FlowNetwork) -> int:
    value, _ = _solve_flow(net)
    return value


def _solve_flow(net: FlowNetwork) -> tuple[int, list[list[int]]]:
    """Returns (flow value, per-edge list of vertex indices receiving 1 unit)."""
    ne = len(net.edge_demands)
    source = 0
    sink = 1 + ne + net.num_vertices
    dinic = _Dinic(sink + 1)
    mid_arcs: list[list[list[int]]] = []
    for j, (demand, members) in enumerate(zip(net.edge_demands, net.incidence)):
        dinic.add_arc(source, 1 + j, demand)
        mid_arcs.append([dinic.add_arc(1 + j, 1 + ne + v, 1) for v in members])
    for v in range(net.num_vertices):
        dinic.add_arc(1 + ne + v, sink, net.sink_capacity)
    value = dinic.max_flow(source, sink)
    routed = [[v for arc, v in zip(arcs, members) if arc[1] == 0]
              for arcs, members in zip(mid_arcs, net.incidence)]
    return value, routed


@dataclass(frozen=True)
class ListOrientation:
    """Assignment of at most ell own vertices to every edge."""

    ell: int
    assignment: dict[Edge, frozenset[Pattern]]


def min_max_orientation_indexed(num_vertices: int, edges: list[tuple[int, ...]],
                                ell: int) -> tuple[list[frozenset[int]], int]:
    """Core routine on integer-indexed vertices.

    Returns per-edge selected vertex sets (each of size min(|e|, ell)) and the
    exact least achievable maximum ell-outdegree.  Feasibility of an
    outdegree budget c is precisely the saturating-flow condition, so the
    binary search returns the true optimum.
    """
    demands = [max(len(e) - ell, 0) for e in edges]
    total = sum(demands)
    if total == 0:
        return [frozenset(e) for e in edges], 0
    deg = [0] * num_vertices
    for e, d in zip(edges, demands):
        if d > 0:
            for v in e:
                deg[v] += 1
    lo, hi = 1, max(deg)  # c = max ell-degree is always feasible
    demanding = [e for e, d in zip(edges, demands) if d > 0]
    net_base = FlowNetwork(edge_demands=tuple(d for d in demands if d > 0),
                           incidence=tuple(tuple(e) for e in demanding),
                           num_vertices=num_vertices, sink_capacity=0)

    def routed_at(c: int):
        net = FlowNetwork(net_base.edge_demands, net_base.incidence, num_vertices, c)
        value, routed = _solve_flow(net)
        return routed if value == total else None

    best = routed_at(hi)
    assert best is not None, "max ell-degree budget must admit a saturating flow"
    while lo < hi:
        mid = (lo + hi) // 2
        routed = routed_at(mid)
        if routed is None:
            lo = mid + 1
        else:
            hi = mid
            best = routed
    selection: list[frozenset[int]] = []
    it = iter(best)
    for e, d in zip(edges, demands):
        if d == 0:
            selection.append(frozenset(e))
        else:
            charged = set(next(it))
            selection.append(frozenset(v for v in e if v not in charged))
    return selection, lo


def orient_minmax(g: OneInclusionGraph, ell: int) -> tuple[ListOrientation, int]:
    """Exact min-max ell-outdegree orientation of ``g``.

    The selected set of every edge is its vertices that carry no flow; its
    size is min(|e|, ell).  The returned integer is the optimum over all
    list orientations.
    """
    index = {v: j for j, v in enumerate(g.vertices)}
    indexed = [tuple(index[v] for v in e.members) for e in g.edges]
    selection, cstar = min_max_orientation_indexed(len(g.vertices), indexed, ell)
    assignment = {e: frozenset(g.vertices[j] for j in sel)
                  for e, sel in zip(g.edges, selection)}
    return ListOrientation(ell=ell, assignment=assignment), cstar


def outdegrees(g: OneInclusionGraph, sigma: ListOrientation) -> dict[Pattern, int]:
    """Per-vertex count of incident edges whose selection omits the vertex."""
    out = {v: 0 for v in g.vertices}
    for e in g.edges:
        chosen = sigma.assignment[e]
        for v in e.members:
            if v not in chosen:
                out[v] += 1
    return out


def format_orientation(g: OneInclusionGraph, sigma: ListOrientation) -> str:
    """Deterministic text dump: one line per edge, vertices as indices into
    the canonical vertex order."""
    index = {v: j for j, v in enumerate(g.vertices)}
    lines = []
    for e in g.edges:
        fixed = ",".join(str(v) for v in e.fixed)
        chosen = " ".join(str(index[v]) for v in sorted(sigma.assignment[e]))
        lines.append(f"dir={e.direction} fixed={fixed} list={chosen}")
    return "\n".join(lines) + "\n"
