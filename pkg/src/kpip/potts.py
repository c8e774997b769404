"""Potts k-submodular functions: terminal/fringe network, isolating cuts and the glued PIP.

g~(x) = sum_i g~_i(x_i) + sum_{ij} lambda_ij d(x_i, x_j) with d = 0 on equal
labels, 1 on distinct nonzero labels and 1/2 otherwise.  Every unary term is
split as g~_i(gamma_i) + mu_i d(gamma_i, x_i) + sum_a sigma_ia [x_i = a], which
becomes terminal edges {i, s_gamma} and fringe edges {i, i^a}.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from .core import KVector, TableFunction, as_value
from .flownet import FlowNetwork, PQPoset, _solver, max_flow, pq_poset
from .pip import Pip, recover_parts


def d_potts(a: int, b: int) -> Fraction:
    if a == b:
        return Fraction(0)
    if a and b:
        return Fraction(1)
    return Fraction(1, 2)


@dataclass
class PottsInstance:
    n: int
    k: int
    edges: List[Tuple[int, int, object]]
    unary: List[List[object]]  # unary[i][a] = g~_i(a) for a in 0..k
    raw: Optional[List[List[object]]] = None  # raw[i][a-1] = g_i(a) when built from a labeling problem

    def __post_init__(self):
        self.edges = [(int(u), int(v), as_value(lam)) for u, v, lam in self.edges]
        self.unary = [[as_value(v) for v in row] for row in self.unary]
        if self.raw is not None:
            self.raw = [[as_value(v) for v in row] for row in self.raw]

    def validate(self) -> None:
        if self.k < 1 or self.n < 1:
            raise ValueError("need n >= 1 and k >= 1")
        if len(self.unary) != self.n or any(len(r) != self.k + 1 for r in self.unary):
            raise ValueError("unary tables must be n rows of k+1 values")
        seen = set()
        for u, v, lam in self.edges:
            if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
                raise ValueError(f"bad edge ({u}, {v})")
            if lam <= 0:
                raise ValueError(f"edge ({u}, {v}) has non-positive weight")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        if not _connected(self.n, self.edges):
            raise ValueError("graph is not connected")
        for i, row in enumerate(self.unary):
            for a, b in itertools.combinations(range(1, self.k + 1), 2):
                if row[a] + row[b] < 2 * row[0]:
                    raise ValueError(f"unary term of vertex {i} is not k-submodular (labels {a}, {b})")

    def value(self, x: KVector) -> Fraction:
        tot = Fraction(0)
        for i, a in enumerate(x):
            tot += self.unary[i][a]
        for u, v, lam in self.edges:
            tot += lam * d_potts(x[u], x[v])
        return tot

    def table(self) -> TableFunction:
        return TableFunction.from_callable(self.n, self.k, self.value)

    def energy(self, y: Sequence[int]) -> Fraction:
        """Potts energy of a full labeling y in [k]^n.

        Uses the raw labeling costs when present, else the relaxed tables
        restricted to nonzero labels.
        """
        if len(y) != self.n or any(not 1 <= a <= self.k for a in y):
            raise ValueError("energy needs a full labeling")
        rows = self.raw if self.raw is not None else [r[1:] for r in self.unary]
        tot = Fraction(0)
        for i, a in enumerate(y):
            tot += rows[i][a - 1]
        for u, v, lam in self.edges:
            if y[u] != y[v]:
                tot += lam
        return tot


def _connected(n: int, edges) -> bool:
    adj = {i: [] for i in range(n)}
    for u, v, _ in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def relax_potts(raw: Sequence[Sequence[object]], mode: str = "average") -> List[List[Fraction]]:
    """Unary k-submodular tables from labeling costs g_i(1..k).

    "average": g~(a) = g(a), g~(0) = mean of the two smallest costs.
    "kovtun":  g~(a) = (g(a) - min_{b != a} g(b)) / 2, g~(0) = 0.
    """
    out = []
    for row in raw:
        row = [Fraction(as_value(v)) for v in row]
        k = len(row)
        if k < 2:
            raise ValueError("relaxation needs k >= 2")
        if mode == "average":
            a, b = sorted(row)[:2]
            out.append([(a + b) / 2] + row)
        elif mode == "kovtun":
            t = [Fraction(0)]
            for a in range(k):
                other = min(row[b] for b in range(k) if b != a)
                t.append((row[a] - other) / 2)
            out.append(t)
        else:
            raise ValueError(f"unknown relaxation {mode!r}")
    return out


@dataclass
class UnaryTerm:
    gamma: int
    mu: Fraction
    sigma: Dict[int, Fraction]  # labels a != gamma
    base: Fraction  # g~_i(gamma)


def decompose_unary(table: Sequence[object]) -> UnaryTerm:
    """Split one unary table; gamma is the smallest minimizer in the order 0, 1, ..., k."""
    t = [Fraction(as_value(v)) for v in table]
    k = len(t) - 1
    m = min(t)
    gamma = t.index(m)
    mu = 2 * (t[0] - t[gamma])
    sigma = {}
    for a in range(1, k + 1):
        if a == gamma:
            continue
        s = t[a] - 2 * t[0] + t[gamma]
        if s < 0:
            raise ValueError(f"negative fringe weight for label {a}; unary term is not k-submodular")
        sigma[a] = s
    term = UnaryTerm(gamma, mu, sigma, t[gamma])
    for x in range(k + 1):
        rebuilt = t[gamma] + mu * d_potts(gamma, x) + (sigma.get(x, 0) if x else 0)
        if rebuilt != t[x]:
            raise AssertionError("unary decomposition does not reproduce the table")
    return term


# ---------------------------------------------------------------------------
# the terminal + fringe network

@dataclass
class PottsNetwork:
    """Undirected network; vertex ids: 0..n-1 graph vertices, then terminals, then fringes.

    Capacities are integers: the true capacities (lambda, mu, 2 sigma)
    multiplied by ``scale``.
    """

    n: int
    k: int
    edges: List[Tuple[int, int, int, str]]
    scale: int
    base: Fraction
    terms: List[UnaryTerm]
    fringe_vertex: Dict[Tuple[int, int], int]
    fringe_info: Dict[int, Tuple[int, int]]

    @property
    def num_vertices(self) -> int:
        return self.n + self.k + len(self.fringe_info)

    def terminal(self, a: int) -> int:
        return self.n + a - 1

    def cut_capacity(self, X) -> int:
        X = set(X)
        return sum(c for u, v, c, _ in self.edges if (u in X) != (v in X))


def build_potts_network(inst: PottsInstance) -> PottsNetwork:
    inst.validate()
    terms = [decompose_unary(row) for row in inst.unary]
    raw_caps = [lam for _, _, lam in inst.edges]
    for t in terms:
        raw_caps.append(t.mu)
        raw_caps.extend(2 * s for s in t.sigma.values())
    scale = 1
    for c in raw_caps:
        c = Fraction(c)
        scale = scale * c.denominator // math.gcd(scale, c.denominator)
    edges = []
    for u, v, lam in inst.edges:
        edges.append((u, v, int(Fraction(lam) * scale), "graph"))
    fringe_vertex = {}
    fringe_info = {}
    nxt = inst.n + inst.k
    for i, t in enumerate(terms):
        if t.mu > 0:
            edges.append((i, inst.n + t.gamma - 1, int(t.mu * scale), "terminal"))
    for i, t in enumerate(terms):
        for a in sorted(t.sigma):
            if t.sigma[a] > 0:
                fringe_vertex[(i, a)] = nxt
                fringe_info[nxt] = (i, a)
                edges.append((i, nxt, int(2 * t.sigma[a] * scale), "fringe"))
                nxt += 1
    base = sum((t.base for t in terms), Fraction(0))
    return PottsNetwork(inst.n, inst.k, edges, scale, base, terms, fringe_vertex, fringe_info)


def check_cut_identity(inst: PottsInstance, netw: PottsNetwork) -> Tuple[bool, Optional[str]]:
    """Check 2*scale*(g~(x) - base) == sum_a c(X_a) for every point, X the admissible semi-multicut of x."""
    n, k = inst.n, inst.k
    pts = np.array(list(itertools.product(range(k + 1), repeat=n)), dtype=np.int64).reshape(-1, n)
    P = len(pts)
    # part of every network vertex under each point
    parts = np.zeros((P, netw.num_vertices), dtype=np.int64)
    parts[:, :n] = pts
    for a in range(1, k + 1):
        parts[:, netw.terminal(a)] = a
    for fv, (i, a) in netw.fringe_info.items():
        xi = pts[:, i]
        parts[:, fv] = np.where((xi == 0) | (xi == a), 0, xi)
    rhs = np.zeros(P, dtype=object)
    for u, v, c, _ in netw.edges:
        pu, pv = parts[:, u], parts[:, v]
        cnt = np.where(pu != pv, (pu != 0).astype(np.int64) + (pv != 0).astype(np.int64), 0)
        rhs = rhs + cnt.astype(object) * c
    # left side in exact arithmetic, vectorized per term with a common denominator
    den = 2 * netw.scale
    lhs = np.zeros(P, dtype=object)
    for i in range(n):
        col = np.array([Fraction(v) * den for v in inst.unary[i]], dtype=object)
        lhs = lhs + col[pts[:, i]]
    dtab = np.array([[d_potts(a, b) for b in range(k + 1)] for a in range(k + 1)], dtype=object)
    for u, v, lam in inst.edges:
        lhs = lhs + dtab[pts[:, u], pts[:, v]] * (Fraction(lam) * den)
    lhs = lhs - netw.base * den
    bad = np.nonzero(lhs != rhs)[0]
    if len(bad):
        x = tuple(int(a) for a in pts[bad[0]])
        return False, f"identity fails at {x}: {lhs[bad[0]]} != {rhs[bad[0]]}"
    return True, None


# ---------------------------------------------------------------------------
# alpha-isolating cuts

@dataclass
class AlphaCut:
    alpha: int
    value: object  # scaled capacity of a minimum alpha-cut
    reach: FrozenSet[int]  # graph vertices reachable from s_alpha in the residual graph
    elements: List[FrozenSet[int]]
    order: List[Tuple[int, int]]
    pq: PQPoset = field(repr=False, default=None)

    def poset(self) -> Pip:
        return Pip(len(self.elements), self.order)


def g_alpha_network(netw: PottsNetwork, alpha: int):
    """Directed network for label alpha.

    Vertex n is s_alpha and n+1 is the merged sink (other terminals and
    alpha-fringes); other fringes are dropped.  Returns the network and,
    per original edge id, the pair of arc indices (u->v, v->u) or None.
    """
    n = netw.n
    src, snk = n, n + 1

    def where(v):
        if v < n:
            return v
        if v < n + netw.k:
            return src if v - n + 1 == alpha else snk
        i, a = netw.fringe_info[v]
        return snk if a == alpha else None

    net = FlowNetwork(n + 2, src, snk, [])
    arc_of = []
    for u, v, c, _ in netw.edges:
        a, b = where(u), where(v)
        if a is None or b is None or a == b:
            arc_of.append(None)
            continue
        arc_of.append(net.add_edge(a, b, c))
    return net, arc_of


def _cut_from_pq(netw: PottsNetwork, alpha: int, pq: PQPoset) -> AlphaCut:
    n = netw.n
    for X in pq.elements:
        if any(v >= n for v in X):
            raise AssertionError("an isolating-cut poset element contains a terminal or fringe")
    reach = frozenset(v for v in pq.base if v < n)
    return AlphaCut(alpha, pq.value, reach, list(pq.elements), list(pq.order), pq)


def alpha_mincut(netw: PottsNetwork, alpha: int) -> AlphaCut:
    net, _ = g_alpha_network(netw, alpha)
    value, flows = max_flow(net)
    return _cut_from_pq(netw, alpha, pq_poset(net, flows, value))


def alpha_cuts(netw: PottsNetwork, jobs: int = 1) -> Dict[int, AlphaCut]:
    labels = list(range(1, netw.k + 1))
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(jobs) as ex:
            res = list(ex.map(lambda a: alpha_mincut(netw, a), labels))
    else:
        res = [alpha_mincut(netw, a) for a in labels]
    return dict(zip(labels, res))


def min_semi_multicut(netw: PottsNetwork, cuts: Dict[int, AlphaCut]) -> Tuple[KVector, Fraction]:
    """Point of the minimal semi-multicut and its (unscaled) capacity."""
    x = [0] * netw.n
    for a, cut in cuts.items():
        for v in cut.reach:
            if x[v]:
                raise AssertionError("minimal isolating cuts overlap")
            x[v] = a
    cap = Fraction(sum(c.value for c in cuts.values()), 2 * netw.scale)
    return tuple(x), cap


def check_layer_overlap(cuts: Dict[int, AlphaCut]) -> None:
    """Elements of different layers are equal or disjoint; shared elements reverse their order."""
    labels = sorted(cuts)
    for a, b in itertools.combinations(labels, 2):
        A, B = cuts[a], cuts[b]
        pos_b = {X: j for j, X in enumerate(B.elements)}
        for X in A.elements:
            for Y in B.elements:
                if X != Y and X & Y:
                    raise AssertionError(f"layers {a} and {b} have properly intersecting elements")
        shared = [X for X in A.elements if X in pos_b]
        pa, pb = A.poset(), B.poset()
        pos_a = {X: j for j, X in enumerate(A.elements)}
        for X, Y in itertools.permutations(shared, 2):
            if pa.leq(pos_a[X], pos_a[Y]) and not pb.leq(pos_b[Y], pos_b[X]):
                raise AssertionError(f"order is not reversed between layers {a} and {b}")


def ideal_point(netw: PottsNetwork, cuts: Dict[int, AlphaCut], members) -> KVector:
    """Point of the semi-multicut attached to a set of (element, label) pairs."""
    x = [0] * netw.n
    for a, cut in cuts.items():
        for v in cut.reach:
            x[v] = a
    for X, a in members:
        for v in X:
            if x[v] and x[v] != a:
                raise AssertionError("inconsistent set of glued elements")
            x[v] = a
    return tuple(x)


def glue_pip(netw: PottsNetwork, cuts: Dict[int, AlphaCut]) -> Tuple[Pip, List[Tuple[FrozenSet[int], int]]]:
    check_layer_overlap(cuts)
    elems: List[Tuple[FrozenSet[int], int]] = []
    offset = {}
    order = []
    for a in sorted(cuts):
        offset[a] = len(elems)
        elems.extend((X, a) for X in cuts[a].elements)
        order.extend((offset[a] + lo, offset[a] + hi) for lo, hi in cuts[a].order)
    where: Dict[FrozenSet[int], List[int]] = {}
    for j, (X, a) in enumerate(elems):
        where.setdefault(X, []).append(j)
    mic = []
    for js in where.values():
        mic.extend(itertools.combinations(js, 2))
    shell = Pip(len(elems), order)
    payloads = []
    for j in range(len(elems)):
        members = [elems[u] for u in range(len(elems)) if shell.leq(u, j)]
        payloads.append(ideal_point(netw, cuts, members))
    bottom = ideal_point(netw, cuts, [])
    p = Pip(len(elems), order, mic, payloads=payloads, bottom=bottom, extra=elems)
    p.parts = recover_parts(p)
    return p, elems


@dataclass
class PottsBuild:
    pip: Pip
    minimum_minimizer: KVector
    min_value: Fraction
    cuts: Dict[int, AlphaCut]
    network: PottsNetwork
    elements: List[Tuple[FrozenSet[int], int]]


def build_pip_potts(inst: PottsInstance, locking: bool = False, jobs: int = 1) -> PottsBuild:
    netw = build_potts_network(inst)
    if locking:
        mf = locking_multiflow(netw)
        cuts = cuts_from_multiflow(netw, mf)
    else:
        cuts = alpha_cuts(netw, jobs)
    x, cap = min_semi_multicut(netw, cuts)
    p, elems = glue_pip(netw, cuts)
    return PottsBuild(p, x, cap + netw.base, cuts, netw, elems)


# ---------------------------------------------------------------------------
# locking multiflow

@dataclass
class Path:
    ends: Tuple[tuple, tuple]  # ("t", label) or ("f", fringe vertex)
    verts: List[int]
    edges: List[int]
    amount: Fraction

    def reversed(self) -> "Path":
        return Path((self.ends[1], self.ends[0]), self.verts[::-1], self.edges[::-1], self.amount)


@dataclass
class Multiflow:
    paths: List[Path]
    values: Dict[int, Fraction]  # |f_a| per real label


class _LNet:
    """Working network of the locking recursion (original edge ids kept through contractions)."""

    def __init__(self, edges, terminals, fringes):
        self.edges: Dict[int, Tuple[int, int, object]] = edges
        self.terminals: Dict[object, int] = terminals  # label -> vertex
        self.fringes: Dict[int, object] = fringes  # fringe vertex -> label

    def vertices(self):
        vs = set(self.terminals.values()) | set(self.fringes)
        for u, v, _ in self.edges.values():
            vs.add(u)
            vs.add(v)
        return vs

    def labels(self):
        return sorted(self.terminals, key=_label_key)


def _label_key(label):
    return (0, label) if isinstance(label, int) else (1, label[1])


class _Ids:
    def __init__(self, start):
        self.next = start
        self.aux = 0

    def vertex(self):
        self.next += 1
        return self.next - 1

    def label(self):
        self.aux += 1
        return ("aux", self.aux)


def _flow_problem(L: _LNet, sources: Dict[int, object], sinks: Dict[int, object]):
    """Dinic-ready network with super source/sink; returns (net, arc ids per edge, index map)."""
    verts = sorted(L.vertices())
    idx = {v: i for i, v in enumerate(verts)}
    S, T = len(verts), len(verts) + 1
    net = FlowNetwork(len(verts) + 2, S, T, [])
    arc_of = {}
    for eid in sorted(L.edges):
        u, v, c = L.edges[eid]
        arc_of[eid] = net.add_edge(idx[u], idx[v], c)
    big = sum((c for _, _, c in L.edges.values()), 0) + 1
    for v, cap in sources.items():
        net.add_arc(S, idx[v], big if cap is None else cap)
    for v, cap in sinks.items():
        net.add_arc(idx[v], T, big if cap is None else cap)
    return net, arc_of, idx, verts


def _net_flows(L: _LNet, net_flows, arc_of) -> Dict[int, object]:
    out = {}
    for eid, (a, b) in arc_of.items():
        f = net_flows[a] - net_flows[b]
        if f:
            out[eid] = f  # positive: along (u, v) of L.edges[eid]
    return out


def _decompose(L: _LNet, flow: Dict[int, object], supply: Dict[int, object], demand: Dict[int, object], end_tag) -> List[Path]:
    """Split an edge flow into source-sink paths (cycles are cancelled and dropped)."""
    out_arcs: Dict[int, List[list]] = {}
    for eid in sorted(flow):
        u, v, _ = L.edges[eid]
        f = flow[eid]
        if f > 0:
            out_arcs.setdefault(u, []).append([eid, v, f])
        else:
            out_arcs.setdefault(v, []).append([eid, u, -f])
    supply = {v: Fraction(s) for v, s in supply.items() if s}
    demand = {v: Fraction(s) for v, s in demand.items() if s}
    ends = set(L.terminals.values()) | set(L.fringes)
    paths = []
    for s in sorted(supply):
        while supply[s] > 0:
            verts, arcs = [s], []
            pos = {s: 0}
            cur = s
            while not (cur != s and demand.get(cur, 0) > 0):
                if cur != s and cur in ends:
                    raise AssertionError("flow passes through a terminal")
                lst = out_arcs.get(cur, [])
                while lst and lst[0][2] == 0:
                    lst.pop(0)
                if not lst:
                    raise AssertionError("flow decomposition got stuck")
                arc = lst[0]
                nxt = arc[1]
                if nxt in pos:
                    cyc = arcs[pos[nxt]:] + [arc]
                    m = min(a[2] for a in cyc)
                    for a in cyc:
                        a[2] -= m
                    for w in verts[pos[nxt] + 1:]:
                        del pos[w]
                    verts = verts[: pos[nxt] + 1]
                    arcs = arcs[: pos[nxt]]
                    cur = nxt
                    continue
                arcs.append(arc)
                verts.append(nxt)
                pos[nxt] = len(verts) - 1
                cur = nxt
            amt = min([supply[s], demand[cur]] + [a[2] for a in arcs])
            for a in arcs:
                a[2] -= amt
            supply[s] -= amt
            demand[cur] -= amt
            paths.append(Path((end_tag(s), end_tag(cur)), verts, [a[0] for a in arcs], amt))
    if any(v != 0 for v in demand.values()):
        raise AssertionError("flow decomposition left unmet demand")
    return paths


def _tagger(L: _LNet):
    term_of = {v: lab for lab, v in L.terminals.items()}

    def tag(v):
        if v in term_of:
            return ("t", term_of[v])
        return ("f", v)

    return tag


def _single_source(L: _LNet, label) -> List[Path]:
    """Max flow from one terminal to every other terminal, then on to its own fringes."""
    s = L.terminals[label]
    others = [v for lab, v in L.terminals.items() if lab != label]
    own = [v for v, lab in L.fringes.items() if lab == label]
    if any(lab != label for lab in L.fringes.values()):
        raise AssertionError("foreign fringes in a single-source step")
    sinks = {v: None for v in others}
    sinks.update({v: 0 for v in own})
    net, arc_of, idx, verts = _flow_problem(L, {s: None}, sinks)
    d = _solver(net)
    S, T = net.s, net.t
    sink_arcs = {verts[u]: j for j, (u, v, c) in enumerate(net.arcs) if v == T}
    # phase 1 saturates the paths to other terminals, phase 2 opens the fringes
    d.augment(S, T)
    big = sum((c for _, _, c in L.edges.values()), 0) + 1
    for v in own:
        d.raise_capacity(d.arc_slot[sink_arcs[v]], big)
    d.augment(S, T)
    flows = [d.flow(d.arc_slot[j]) for j in range(len(net.arcs))]
    edge_flow = _net_flows(L, flows, arc_of)
    demand = {v: flows[sink_arcs[v]] for v in others + own}
    total = sum(demand.values(), 0)
    return _decompose(L, edge_flow, {s: total}, demand, _tagger(L))


def _isolating_value(L: _LNet, label):
    s = L.terminals[label]
    others = {v: None for lab, v in L.terminals.items() if lab != label}
    others.update({v: None for v, lab in L.fringes.items() if lab == label})
    net, _, _, _ = _flow_problem(L, {s: None}, others)
    return max_flow(net)[0]


def _three_terminals(L: _LNet) -> List[Path]:
    """Locking flow for three fringe-free terminals via the sum/difference two-commodity trick."""
    a, b, c = L.labels()
    va, vb, vc = (L.terminals[x] for x in (a, b, c))
    ca, cb, cc = (Fraction(_isolating_value(L, x)) for x in (a, b, c))
    x_ab = (ca + cb - cc) / 2
    x_ac = (ca + cc - cb) / 2
    x_bc = (cb + cc - ca) / 2
    if min(x_ab, x_ac, x_bc) < 0:
        raise AssertionError("isolating cut values violate the triangle inequality")
    # commodity 1: a -> b (x_ab); commodity 2: c -> a (x_ac) and c -> b (x_bc)
    d1 = {va: x_ab, vb: -x_ab, vc: Fraction(0)}
    d2 = {va: -x_ac, vb: -x_bc, vc: x_ac + x_bc}

    def route(div):
        src = {v: q for v, q in div.items() if q > 0}
        snk = {v: -q for v, q in div.items() if q < 0}
        net, arc_of, idx, verts = _flow_problem(L, src, snk)
        value, flows = max_flow(net)
        if value != sum(src.values(), Fraction(0)):
            raise AssertionError("two-commodity routing is infeasible")
        return _net_flows(L, flows, arc_of)

    X = route({v: d1[v] + d2[v] for v in d1})
    Y = route({v: d1[v] - d2[v] for v in d1})
    keys = set(X) | set(Y)
    f1 = {e: (X.get(e, 0) + Y.get(e, 0)) / Fraction(2) for e in keys}
    f2 = {e: (X.get(e, 0) - Y.get(e, 0)) / Fraction(2) for e in keys}
    f1 = {e: v for e, v in f1.items() if v}
    f2 = {e: v for e, v in f2.items() if v}
    tag = _tagger(L)
    paths = _decompose(L, f1, {va: x_ab}, {vb: x_ab}, tag)
    paths += _decompose(L, f2, {vc: x_ac + x_bc}, {va: x_ac, vb: x_bc}, tag)
    return paths


def _two_terminals(L: _LNet) -> List[Path]:
    a = L.labels()[0]
    return _single_source(L, a)


def _split(L: _LNet, first: List[object], ids: _Ids) -> List[Path]:
    rest = [lab for lab in L.labels() if lab not in first]
    ffree = _LNet({e: t for e, t in L.edges.items() if t[0] not in L.fringes and t[1] not in L.fringes},
                  dict(L.terminals), {})
    net, arc_of, idx, verts = _flow_problem(
        ffree, {L.terminals[x]: None for x in first}, {L.terminals[x]: None for x in rest}
    )
    value, flows = max_flow(net)
    pq = pq_poset(net, flows, value)
    X = {verts[i] for i in pq.base if i < len(verts)}
    owner = {}
    for eid, (u, v, _) in L.edges.items():
        if u in L.fringes:
            owner[u] = v
        elif v in L.fringes:
            owner[v] = u
    for f, o in owner.items():
        if o in X:
            X.add(f)
    lab_first, lab_rest = set(first), set(rest)
    s1, s2 = ids.vertex(), ids.vertex()
    aux1, aux2 = ids.label(), ids.label()

    def contract(inside, hub, drop_labels):
        edges = {}
        for eid, (u, v, c) in L.edges.items():
            iu, iv = u in inside, v in inside
            if not iu and not iv:
                continue
            if (u in L.fringes and L.fringes[u] in drop_labels) or (v in L.fringes and L.fringes[v] in drop_labels):
                continue
            edges[eid] = (u if iu else hub, v if iv else hub, c)
        terms = {lab: v for lab, v in L.terminals.items() if v in inside}
        fr = {f: lab for f, lab in L.fringes.items() if f in inside and lab not in drop_labels}
        return edges, terms, fr

    e1, t1, fr1 = contract(X, s1, lab_rest)
    t1[aux1] = s1
    outside = L.vertices() - X
    e2, t2, fr2 = contract(outside, s2, lab_first)
    t2[aux2] = s2
    P1 = _locking(_LNet(e1, t1, fr1), ids)
    P2 = _locking(_LNet(e2, t2, fr2), ids)
    return _aggregate(L, P1, P2, ("t", aux1), ("t", aux2), {eid for eid in L.edges if (eid in e1 and s1 in e1[eid][:2])})


def _aggregate(L: _LNet, P1: List[Path], P2: List[Path], end1, end2, cut_edges) -> List[Path]:
    out = []
    into: Dict[int, List[Path]] = {}
    outof: Dict[int, List[Path]] = {}
    for p in P1:
        if end1 in p.ends:
            q = p if p.ends[1] == end1 else p.reversed()
            into.setdefault(q.edges[-1], []).append(q)
        else:
            out.append(p)
    for p in P2:
        if end2 in p.ends:
            q = p if p.ends[0] == end2 else p.reversed()
            outof.setdefault(q.edges[0], []).append(q)
        else:
            out.append(p)
    for e in sorted(cut_edges):
        A = [Path(q.ends, q.verts, q.edges, q.amount) for q in into.get(e, [])]
        B = [Path(q.ends, q.verts, q.edges, q.amount) for q in outof.get(e, [])]
        cap = L.edges[e][2]
        if sum((q.amount for q in A), 0) != cap or sum((q.amount for q in B), 0) != cap:
            raise AssertionError("a cut edge is not saturated from both sides")
        i = j = 0
        while i < len(A) and j < len(B):
            m = min(A[i].amount, B[j].amount)
            if m > 0:
                out.append(Path((A[i].ends[0], B[j].ends[1]), A[i].verts[:-1] + B[j].verts[1:],
                                A[i].edges + B[j].edges[1:], m))
            A[i].amount -= m
            B[j].amount -= m
            if A[i].amount == 0:
                i += 1
            if B[j].amount == 0:
                j += 1
    for e in set(into) | set(outof):
        if e not in cut_edges:
            raise AssertionError("a path reaches a contracted terminal through a non-cut edge")
    return out


def _locking(L: _LNet, ids: _Ids) -> List[Path]:
    labels = L.labels()
    if len(labels) == 1:
        return _single_source(L, labels[0])
    if len(labels) >= 4:
        return _split(L, labels[: len(labels) // 2], ids)
    with_fringes = [lab for lab in labels if lab in set(L.fringes.values())]
    if len(labels) == 2 and len(with_fringes) <= 1:
        return _single_source(L, with_fringes[0] if with_fringes else labels[0])
    if with_fringes:
        return _split(L, [with_fringes[0]], ids)
    return _three_terminals(L)


def locking_multiflow(netw: PottsNetwork) -> Multiflow:
    edges = {eid: (u, v, c) for eid, (u, v, c, _) in enumerate(netw.edges)}
    terminals = {a: netw.terminal(a) for a in range(1, netw.k + 1)}
    fringes = {fv: a for fv, (i, a) in netw.fringe_info.items()}
    L = _LNet(edges, terminals, fringes)
    paths = _locking(L, _Ids(netw.num_vertices))
    values = {a: Fraction(0) for a in terminals}
    for p in paths:
        for tag in p.ends:
            if tag[0] == "t":
                if not isinstance(tag[1], int):
                    raise AssertionError("auxiliary terminal left in the final multiflow")
                values[tag[1]] += p.amount
    return Multiflow(paths, values)


def check_multiflow(netw: PottsNetwork, mf: Multiflow) -> Tuple[bool, Optional[str]]:
    """Joint capacities, path validity and end-point types."""
    use: Dict[int, Fraction] = {}
    fringe_label = {fv: a for fv, (i, a) in netw.fringe_info.items()}
    for p in mf.paths:
        if p.amount <= 0:
            return False, "non-positive path amount"
        if len(p.verts) != len(p.edges) + 1:
            return False, "malformed path"
        for j, e in enumerate(p.edges):
            u, v, _, _ = netw.edges[e]
            if {u, v} != {p.verts[j], p.verts[j + 1]}:
                return False, f"path edge {e} does not join consecutive vertices"
            use[e] = use.get(e, 0) + p.amount
        if len(set(p.verts)) != len(p.verts):
            return False, "path repeats a vertex"
        labs = [t[1] if t[0] == "t" else fringe_label[t[1]] for t in p.ends]
        kinds = [t[0] for t in p.ends]
        if kinds == ["f", "f"]:
            return False, "path joins two fringes"
        if "f" in kinds:
            term = labs[kinds.index("t")]
            if term != labs[kinds.index("f")]:
                return False, "fringe path ends at a terminal of another label"
        elif labs[0] == labs[1]:
            return False, "path joins a terminal to itself"
    for e, f in use.items():
        if f > netw.edges[e][2]:
            return False, f"edge {e} carries {f} > capacity {netw.edges[e][2]}"
    return True, None


def cuts_from_multiflow(netw: PottsNetwork, mf: Multiflow) -> Dict[int, AlphaCut]:
    """Per-label residual posets rebuilt from the alpha-subflows of a locking multiflow."""
    fringe_label = {fv: a for fv, (i, a) in netw.fringe_info.items()}
    out = {}
    for alpha in range(1, netw.k + 1):
        net, arc_of = g_alpha_network(netw, alpha)
        flows = [Fraction(0)] * len(net.arcs)
        total = Fraction(0)
        for p in mf.paths:
            labs = [("t", t[1]) if t[0] == "t" else ("f", fringe_label[t[1]]) for t in p.ends]
            if ("t", alpha) not in labs:
                continue
            q = p if labs[0] == ("t", alpha) else p.reversed()
            total += q.amount
            for j, e in enumerate(q.edges):
                u, v, _, _ = netw.edges[e]
                arcs = arc_of[e]
                if arcs is None:
                    raise AssertionError("alpha-path uses an edge missing from the alpha network")
                fwd = q.verts[j] == u
                flows[arcs[0] if fwd else arcs[1]] += q.amount
        # cancel opposite flows on each undirected edge
        for arcs in arc_of:
            if arcs is None:
                continue
            a, b = arcs
            m = min(flows[a], flows[b])
            flows[a] -= m
            flows[b] -= m
        out[alpha] = _cut_from_pq(netw, alpha, pq_poset(net, flows, total))
    return out


# ---------------------------------------------------------------------------
# maximal minimizers

def potts_layers(cuts: Dict[int, AlphaCut]):
    from .enumerate import Layer

    return {a: Layer(list(c.elements), list(c.order)) for a, c in cuts.items()}


def r_poset(build: PottsBuild):
    from .enumerate import build_r_poset

    return build_r_poset(potts_layers(build.cuts))


def maximal_minimizers(build: PottsBuild, R=None):
    """Stream of all maximal minimizers, one per ideal of the R poset (and per shared-label choice)."""
    from .enumerate import maximal_minimizers_via_r

    R = R if R is not None else r_poset(build)
    return maximal_minimizers_via_r(R, lambda members: ideal_point(build.network, build.cuts, members))
