"""PIPs of minimizer sets of network-representable k-submodular functions.

A grouped network has source s, sink t and vertices v_i^a (one group
U_i = {v_i^1, ..., v_i^k} per variable).  A point x corresponds to the
legal cut psi(x) = {s} ∪ {v_i^{x_i} : x_i != 0}.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .core import INF, KVector, TableFunction, all_points
from .flownet import FlowNetwork, PQPoset, max_flow, pq_poset
from .pip import Pip, _bits, _norm_pair, minimal_pairs, recover_parts


@dataclass
class GroupedNetwork:
    net: FlowNetwork
    groups: List[List[int]]  # groups[i][a - 1] is the vertex v_i^a
    K: object = 0

    def __post_init__(self):
        seen = set()
        ks = {len(g) for g in self.groups}
        if len(ks) > 1:
            raise ValueError("groups must all have k vertices")
        for g in self.groups:
            for v in g:
                if v in seen or v in (self.net.s, self.net.t):
                    raise ValueError(f"vertex {v} is a terminal or in two groups")
                seen.add(v)
        others = set(range(self.net.num_vertices)) - {self.net.s, self.net.t}
        if seen != others:
            raise ValueError("groups must partition the non-terminal vertices")
        self.group_of = {}
        for i, g in enumerate(self.groups):
            for a, v in enumerate(g, start=1):
                self.group_of[v] = (i, a)

    @property
    def n(self) -> int:
        return len(self.groups)

    @property
    def k(self) -> int:
        return len(self.groups[0]) if self.groups else 1


def psi(gn: GroupedNetwork, x: KVector) -> FrozenSet[int]:
    if len(x) != gn.n:
        raise ValueError("dimension mismatch")
    out = {gn.net.s}
    for i, a in enumerate(x):
        if not 0 <= a <= gn.k:
            raise ValueError(f"label {a} out of range")
        if a:
            out.add(gn.groups[i][a - 1])
    return frozenset(out)


def psi_inverse(gn: GroupedNetwork, X) -> KVector:
    X = set(X)
    if gn.net.s not in X or gn.net.t in X:
        raise ValueError("not an (s,t)-cut")
    x = [0] * gn.n
    for v in X:
        if v == gn.net.s:
            continue
        i, a = gn.group_of[v]
        if x[i]:
            raise ValueError(f"cut is not legal: group {i} hit twice")
        x[i] = a
    return tuple(x)


def legalize(gn: GroupedNetwork, X) -> FrozenSet[int]:
    X = set(X)
    if gn.net.s not in X or gn.net.t in X:
        raise ValueError("not an (s,t)-cut")
    for g in gn.groups:
        if len(X.intersection(g)) >= 2:
            X.difference_update(g)
    return frozenset(X)


def represented_table(gn: GroupedNetwork) -> TableFunction:
    return TableFunction.from_callable(gn.n, gn.k, lambda x: gn.net.cut_capacity(psi(gn, x)) + gn.K)


def all_cuts(net: FlowNetwork):
    others = [v for v in range(net.num_vertices) if v not in (net.s, net.t)]
    for bits in itertools.product((0, 1), repeat=len(others)):
        yield frozenset([net.s] + [v for v, b in zip(others, bits) if b])


def verify_representation(gn: GroupedNetwork, f: Optional[TableFunction] = None) -> Tuple[bool, Optional[str]]:
    """Exhaustive NR1 (against f, or the stored K when f is None) and NR2."""
    if f is not None:
        if (f.n, f.k) != (gn.n, gn.k):
            return False, "NR1: dimension mismatch"
        K = None
        for x in all_points(gn.n, gn.k):
            v = f(x)
            if v is INF:
                return False, f"NR1: f is infinite at {x}; networks only represent finite functions"
            d = v - gn.net.cut_capacity(psi(gn, x))
            if K is None:
                K = d
            elif d != K:
                return False, f"NR1: offset differs at {x}"
        if K != gn.K:
            return False, f"NR1: offset is {K}, network states {gn.K}"
    for X in all_cuts(gn.net):
        if gn.net.cut_capacity(legalize(gn, X)) > gn.net.cut_capacity(X):
            return False, f"NR2: legalizing {sorted(X)} raises the capacity"
    return True, None


# ---------------------------------------------------------------------------
# exclusion rules

def _hits(gn: GroupedNetwork, X) -> Dict[int, Set[int]]:
    h: Dict[int, Set[int]] = {}
    for v in X:
        if v in gn.group_of:
            h.setdefault(gn.group_of[v][0], set()).add(v)
    return h


def _double_hit(gn: GroupedNetwork, X) -> bool:
    return any(len(s) >= 2 for s in _hits(gn, X).values())


def _scc_graph(pq: PQPoset):
    comp_of = {}
    for i, c in enumerate(pq.all_sccs):
        for v in c:
            comp_of[v] = i
    succ: Dict[int, Set[int]] = {i: set() for i in range(len(pq.all_sccs))}
    for u, v in pq.residual_arcs:
        a, b = comp_of[u], comp_of[v]
        if a != b:
            succ[a].add(b)
    return succ


def apply_exclusion_rules(gn: GroupedNetwork, pq: PQPoset) -> List[int]:
    """Indices (into pq.all_sccs) of the SCCs surviving all four rules.

    Rules 1-2 come from the min-cut poset; rule 3 removes SCCs that reach
    an SCC hitting a group twice; rule 4 is detected by accumulating, in
    reverse topological order, the group vertices reachable from each SCC.
    """
    comps = pq.all_sccs
    index = {c: i for i, c in enumerate(comps)}
    alive = {index[c] for c in pq.elements}
    succ = _scc_graph(pq)
    pred: Dict[int, Set[int]] = {i: set() for i in succ}
    for a, bs in succ.items():
        for b in bs:
            pred[b].add(a)

    def kill_upward(start):
        stack = [start]
        seen = {start}
        while stack:
            u = stack.pop()
            alive.discard(u)
            for w in pred[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)

    for i in list(alive):
        if _double_hit(gn, comps[i]):
            kill_upward(i)
    # reverse topological order: successors first
    topo = _topological(succ)
    U: Dict[int, Dict[int, int]] = {}
    for x in reversed(topo):
        if x not in alive:
            continue
        ux = {gn.group_of[v][0]: v for v in comps[x] if v in gn.group_of}
        bad = False
        for y in sorted(succ[x]):
            if y not in alive:
                continue
            for g, v in U[y].items():
                if ux.setdefault(g, v) != v:
                    bad = True
                    break
            if bad:
                break
        if bad:
            kill_upward(x)
        else:
            U[x] = ux
    return sorted(alive)


def _topological(succ: Dict[int, Set[int]]) -> List[int]:
    indeg = {v: 0 for v in succ}
    for a in succ:
        for b in succ[a]:
            indeg[b] += 1
    ready = sorted(v for v, d in indeg.items() if d == 0)
    out = []
    while ready:
        v = ready.pop(0)
        out.append(v)
        for w in sorted(succ[v]):
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(w)
    return out


def exclusion_rules_direct(gn: GroupedNetwork, pq: PQPoset) -> List[int]:
    """Literal check of rules 3 and 4 over everything reachable, including excluded SCCs."""
    comps = pq.all_sccs
    index = {c: i for i, c in enumerate(comps)}
    reach: Dict[int, Set[int]] = {i: {i} for i in range(len(comps))}
    for lo, hi in pq.scc_order:
        reach[hi].add(lo)
    out = []
    for c in pq.elements:
        i = index[c]
        R = reach[i]
        if any(_double_hit(gn, comps[j]) for j in R):
            continue
        single: Dict[int, int] = {}
        clash = False
        for j in R:
            for g, vs in _hits(gn, comps[j]).items():
                if g in single and single[g] != j:
                    clash = True
                single[g] = j
        if not clash:
            out.append(i)
    return sorted(out)


@dataclass
class NetworkBuild:
    pip: Pip
    min_value: object
    minimum_minimizer: KVector
    sigma: List[FrozenSet[int]] = field(default_factory=list)


def pip_from_network(gn: GroupedNetwork, order: str = "forward") -> NetworkBuild:
    value, flows = max_flow(gn.net, order)
    pq = pq_poset(gn.net, flows, value)
    keep = apply_exclusion_rules(gn, pq)
    sigma = [pq.all_sccs[i] for i in keep]
    pos = {i: j for j, i in enumerate(keep)}
    order_pairs = [(pos[a], pos[b]) for a, b in pq.scc_order if a in pos and b in pos]
    shell = Pip(len(sigma), order_pairs)
    single = []
    for j, X in enumerate(sigma):
        for g, vs in _hits(gn, X).items():
            if len(vs) == 1:
                single.append((g, j))
    share: Dict[int, List[int]] = {}
    for g, j in single:
        share.setdefault(g, []).append(j)
    incons = set()
    for g, js in share.items():
        for a, b in itertools.combinations(sorted(set(js)), 2):
            for u in _bits(shell.above[a]):
                for w in _bits(shell.above[b]):
                    if u == w:
                        raise AssertionError("an SCC reaches two single hits of one group")
                    incons.add(_norm_pair(u, w))
    mic = minimal_pairs(shell, incons)
    base = pq.base
    bottom = psi_inverse(gn, base)
    payloads = []
    for j in range(len(sigma)):
        X = set(base)
        for u in range(len(sigma)):
            if shell.leq(u, j):
                X |= sigma[u]
        payloads.append(psi_inverse(gn, X))
    p = Pip(len(sigma), order_pairs, mic, payloads=payloads, bottom=bottom, extra=sigma)
    p.parts = recover_parts(p)
    return NetworkBuild(pip=p, min_value=value + gn.K, minimum_minimizer=bottom, sigma=sigma)
