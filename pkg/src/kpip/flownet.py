"""Max flow, residual graphs and the poset of all minimum s-t cuts.

Vertices are integers 0..V-1 (names are kept by callers).  Capacities
are exact (int or Fraction); there is no tolerance anywhere.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Hashable, List, Optional, Sequence, Set, Tuple

import networkx as nx

from .pip import Pip


@dataclass
class FlowNetwork:
    """Directed network; ``arcs`` are (u, v, cap) and may be parallel."""

    num_vertices: int
    s: int
    t: int
    arcs: List[Tuple[int, int, object]] = field(default_factory=list)
    names: Optional[List[Hashable]] = None

    def __post_init__(self):
        if self.s == self.t:
            raise ValueError("source and sink coincide")
        for u, v, c in self.arcs:
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"arc ({u}, {v}) out of range")
            if isinstance(c, float) or c < 0:
                raise ValueError(f"bad capacity {c!r} on arc ({u}, {v})")

    def add_arc(self, u: int, v: int, cap) -> int:
        self.arcs.append((u, v, cap))
        return len(self.arcs) - 1

    def add_edge(self, u: int, v: int, cap) -> Tuple[int, int]:
        """Undirected edge as two opposite arcs of capacity cap."""
        return self.add_arc(u, v, cap), self.add_arc(v, u, cap)

    def cut_capacity(self, X) -> object:
        X = set(X)
        return sum((c for u, v, c in self.arcs if u in X and v not in X), 0)

    def name(self, v: int):
        return self.names[v] if self.names is not None else v


class Dinic:
    """Dinic's algorithm on an edge list; arc j of the network is edge record 2j.

    Capacities may be raised between calls to ``augment`` and the flow
    found so far is kept, which allows phased flows.
    """

    def __init__(self, num_vertices: int):
        self.n = num_vertices
        self.head: List[List[int]] = [[] for _ in range(num_vertices)]
        self.to: List[int] = []
        self.res: List[object] = []
        self.cap: List[object] = []

    def add_arc(self, u: int, v: int, cap) -> int:
        eid = len(self.to)
        self.to += [v, u]
        self.res += [cap, 0]
        self.cap += [cap, 0]
        self.head[u].append(eid)
        self.head[v].append(eid + 1)
        return eid // 2

    def raise_capacity(self, arc: int, cap) -> None:
        e = 2 * arc
        if cap < self.cap[e]:
            raise ValueError("capacities may only grow")
        self.res[e] += cap - self.cap[e]
        self.cap[e] = cap

    def flow(self, arc: int):
        return self.res[2 * arc + 1]

    def _bfs(self, s: int, t: int) -> Optional[List[int]]:
        level = [-1] * self.n
        level[s] = 0
        q = deque([s])
        while q:
            u = q.popleft()
            for e in self.head[u]:
                v = self.to[e]
                if level[v] < 0 and self.res[e] > 0:
                    level[v] = level[u] + 1
                    q.append(v)
        return level if level[t] >= 0 else None

    def _dfs(self, s: int, t: int, level: List[int], it: List[int]):
        total = 0
        while True:
            # iterative search for one augmenting path in the level graph
            path: List[int] = []
            u = s
            while u != t:
                advanced = False
                while it[u] < len(self.head[u]):
                    e = self.head[u][it[u]]
                    v = self.to[e]
                    if self.res[e] > 0 and level[v] == level[u] + 1:
                        path.append(e)
                        u = v
                        advanced = True
                        break
                    it[u] += 1
                if not advanced:
                    if u == s:
                        return total
                    level[u] = -1
                    e = path.pop()
                    u = self.to[e ^ 1]
                    it[u] += 1
            push = min(self.res[e] for e in path)
            for e in path:
                self.res[e] -= push
                self.res[e ^ 1] += push
            total += push

    def augment(self, s: int, t: int):
        total = 0
        while True:
            level = self._bfs(s, t)
            if level is None:
                return total
            it = [0] * self.n
            total += self._dfs(s, t, level, it)


def _solver(net: FlowNetwork, order: str = "forward") -> Dinic:
    d = Dinic(net.num_vertices)
    idx = list(range(len(net.arcs)))
    if order == "reverse":
        idx.reverse()
    slots = {}
    for j in idx:
        u, v, c = net.arcs[j]
        slots[j] = d.add_arc(u, v, c)
    d.arc_slot = slots
    return d


def max_flow(net: FlowNetwork, order: str = "forward"):
    """Return (value, per-arc flows).  ``order`` changes arc insertion order only."""
    d = _solver(net, order)
    value = d.augment(net.s, net.t)
    flows = [d.flow(d.arc_slot[j]) for j in range(len(net.arcs))]
    return value, flows


def check_flow(net: FlowNetwork, flows: Sequence) -> None:
    if len(flows) != len(net.arcs):
        raise ValueError("flow length does not match arc count")
    bal = [0] * net.num_vertices
    for (u, v, c), f in zip(net.arcs, flows):
        if f < 0 or f > c:
            raise ValueError(f"flow {f} violates capacity {c} on ({u}, {v})")
        bal[u] -= f
        bal[v] += f
    for v in range(net.num_vertices):
        if v not in (net.s, net.t) and bal[v] != 0:
            raise ValueError(f"conservation fails at vertex {v}")


def residual(net: FlowNetwork, flows: Sequence) -> Set[Tuple[int, int]]:
    """Residual arc set: unsaturated arcs plus reversals of arcs with positive flow."""
    check_flow(net, flows)
    out = set()
    for (u, v, c), f in zip(net.arcs, flows):
        if f < c:
            out.add((u, v))
        if f > 0:
            out.add((v, u))
    return out


def _reach(adj: Dict[int, List[int]], start: int) -> Set[int]:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return seen


@dataclass
class PQPoset:
    """Strongly connected components of a max-flow residual graph between the two ends.

    ``elements`` are vertex sets, ``order`` pairs (lo, hi) mean lo is
    reachable from hi; ideals I map to minimum cuts X0 ∪ ⋃I.
    """

    elements: List[FrozenSet[int]]
    order: List[Tuple[int, int]]
    base: FrozenSet[int]
    value: object
    residual_arcs: Set[Tuple[int, int]]
    all_sccs: List[FrozenSet[int]] = field(default_factory=list)
    scc_order: List[Tuple[int, int]] = field(default_factory=list)

    def pip(self) -> Pip:
        return Pip(len(self.elements), self.order, extra=self.elements)

    def tau(self, ideal) -> FrozenSet[int]:
        out = set(self.base)
        for i in ideal:
            out |= self.elements[i]
        return frozenset(out)


def scc_condensation(num_vertices: int, arcs: Set[Tuple[int, int]]):
    """SCCs sorted by least vertex and the strict reachability pairs (lo, hi): lo reachable from hi."""
    g = nx.DiGraph()
    g.add_nodes_from(range(num_vertices))
    g.add_edges_from(sorted(arcs))
    comps = sorted((frozenset(c) for c in nx.strongly_connected_components(g)), key=min)
    comp_of = {}
    for i, c in enumerate(comps):
        for v in c:
            comp_of[v] = i
    dag = nx.DiGraph()
    dag.add_nodes_from(range(len(comps)))
    for u, v in arcs:
        if comp_of[u] != comp_of[v]:
            dag.add_edge(comp_of[u], comp_of[v])
    pairs = []
    for hi in range(len(comps)):
        for lo in nx.descendants(dag, hi):
            pairs.append((lo, hi))
    return comps, sorted(pairs), comp_of


def pq_poset(net: FlowNetwork, flows: Optional[Sequence] = None, value=None) -> PQPoset:
    if flows is None:
        value, flows = max_flow(net)
    elif value is None:
        value = sum((f for (u, v, c), f in zip(net.arcs, flows) if u == net.s), 0) - sum(
            (f for (u, v, c), f in zip(net.arcs, flows) if v == net.s), 0
        )
    arcs = residual(net, flows)
    fwd: Dict[int, List[int]] = {}
    bwd: Dict[int, List[int]] = {}
    for u, v in arcs:
        fwd.setdefault(u, []).append(v)
        bwd.setdefault(v, []).append(u)
    from_s = _reach(fwd, net.s)
    to_t = _reach(bwd, net.t)
    if net.t in from_s:
        raise ValueError("flow is not maximum")
    comps, pairs, _ = scc_condensation(net.num_vertices, arcs)
    keep = [i for i, c in enumerate(comps) if not (c & from_s) and not (c & to_t)]
    new = {c: i for i, c in enumerate(keep)}
    order = [(new[a], new[b]) for a, b in pairs if a in new and b in new]
    return PQPoset(
        elements=[comps[i] for i in keep],
        order=order,
        base=frozenset(from_s),
        value=value,
        residual_arcs=arcs,
        all_sccs=comps,
        scc_order=pairs,
    )


def minimal_min_cut(net: FlowNetwork) -> FrozenSet[int]:
    """The inclusion-minimal minimum cut: vertices reachable from s in the residual graph."""
    value, flows = max_flow(net)
    arcs = residual(net, flows)
    fwd: Dict[int, List[int]] = {}
    for u, v in arcs:
        fwd.setdefault(u, []).append(v)
    return frozenset(_reach(fwd, net.s))


def min_cut_value(net: FlowNetwork):
    return max_flow(net)[0]
