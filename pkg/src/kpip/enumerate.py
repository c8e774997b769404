"""Enumeration of consistent ideals, maximal consistent ideals and poset ideals.

All enumerators are generators that branch on a fixed linear extension,
so each output is produced once without any hashing of emitted sets.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Hashable, Iterator, List, Optional, Sequence, Tuple

from .pip import Pip, _bits, is_consistent_ideal


def _linear_extension(p: Pip) -> List[int]:
    # Pip.topo is a topological order of the order relation; make it stable
    depth = [0] * p.size
    for v in p.topo:
        for u in p.lower_covers[v]:
            depth[v] = max(depth[v], depth[u] + 1)
    return sorted(range(p.size), key=lambda v: (depth[v], v))


def enumerate_consistent_ideals(p: Pip) -> Iterator[List[int]]:
    """Yield every consistent ideal of p once, as a sorted element list.

    Include/exclude branching along a linear extension; every branch
    ends in an output, so the delay is O(|P|) decisions.
    """
    order = _linear_extension(p)
    m = len(order)
    stack = [(0, 0)]
    while stack:
        t, mask = stack.pop()
        if t == m:
            yield sorted(_bits(mask))
            continue
        e = order[t]
        strict_below = p.below[e] & ~(1 << e)
        # exclude is pushed first so the include branch is explored first
        stack.append((t + 1, mask))
        if strict_below & ~mask == 0 and not (p.partners[e] & mask):
            stack.append((t + 1, mask | (1 << e)))


def count_consistent_ideals(p: Pip) -> int:
    return sum(1 for _ in enumerate_consistent_ideals(p))


def is_maximal_consistent_ideal(p: Pip, ideal) -> bool:
    mask = p.ideal_mask(ideal)
    if not is_consistent_ideal(p, ideal):
        return False
    for e in range(p.size):
        if mask >> e & 1:
            continue
        if (p.below[e] & ~(1 << e)) & ~mask == 0 and not (p.partners[e] & mask):
            return False
    return True


def enumerate_maximal_consistent_ideals(p: Pip) -> Iterator[List[int]]:
    """Yield the inclusion-maximal consistent ideals of p once each.

    Backtracking over a linear extension.  Excluding an element that could
    be added is only allowed if some inconsistent partner can still block
    it; maximality is certified at every leaf.  Worst-case exponential.
    """
    order = _linear_extension(p)
    pos = {e: i for i, e in enumerate(order)}
    later_partner = [0] * p.size
    for e in range(p.size):
        for u in _bits(p.partners[e]):
            if pos[u] > pos[e]:
                later_partner[e] |= 1 << u
    m = len(order)
    stack = [(0, 0, 0)]  # position, chosen mask, mask of excluded-but-addable elements
    while stack:
        t, mask, pending = stack.pop()
        if t == m:
            if all(p.partners[e] & mask for e in _bits(pending)):
                yield sorted(_bits(mask))
            continue
        e = order[t]
        addable = (p.below[e] & ~(1 << e)) & ~mask == 0 and not (p.partners[e] & mask)
        if addable:
            if later_partner[e]:
                stack.append((t + 1, mask, pending | (1 << e)))
            stack.append((t + 1, mask | (1 << e), pending))
        else:
            stack.append((t + 1, mask, pending))


def enumerate_poset_ideals(p: Pip) -> Iterator[List[int]]:
    """All ideals of the order of p (inconsistency ignored) by recursive splitting.

    Pick a minimal available element x: either x is out (drop everything
    above x) or x is in (drop only x).
    """
    order = _linear_extension(p)
    rank = {e: i for i, e in enumerate(order)}
    full = (1 << p.size) - 1
    stack = [(full, 0)]
    while stack:
        avail, chosen = stack.pop()
        if not avail:
            yield sorted(_bits(chosen))
            continue
        x = min(_bits(avail), key=rank.__getitem__)
        stack.append((avail & ~p.above[x], chosen))
        stack.append((avail & ~(1 << x), chosen | (1 << x)))


# ---------------------------------------------------------------------------
# counting ideals

def order_components(p: Pip) -> List[List[int]]:
    """Connected components of the comparability graph."""
    seen = [False] * p.size
    comps = []
    for s in range(p.size):
        if seen[s]:
            continue
        comp, stack = [], [s]
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in itertools.chain(p.lower_covers[v], p.upper_covers[v]):
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        comps.append(sorted(comp))
    return comps


def _count_frontier(p: Pip, comp: Sequence[int], max_width: int) -> Optional[int]:
    ext = [e for e in _linear_extension(p) if e in set(comp)]
    pos = {e: i for i, e in enumerate(ext)}
    last_use = {e: max((pos[u] for u in p.upper_covers[e]), default=-1) for e in ext}
    frontier: List[int] = []
    states: Dict[int, int] = {0: 1}
    for t, e in enumerate(ext):
        slots = {v: i for i, v in enumerate(frontier)}
        need = 0
        for u in p.lower_covers[e]:
            need |= 1 << slots[u]
        new_slot = len(frontier)
        nxt: Dict[int, int] = {}
        for st, c in states.items():
            nxt[st] = nxt.get(st, 0) + c
            if st & need == need:
                s2 = st | (1 << new_slot)
                nxt[s2] = nxt.get(s2, 0) + c
        frontier.append(e)
        # drop elements with no undecided upper covers
        keep = [i for i, v in enumerate(frontier) if last_use[v] > t]
        if len(keep) != len(frontier):
            remap: Dict[int, int] = {}
            for st, c in nxt.items():
                s2 = 0
                for j, i in enumerate(keep):
                    if st >> i & 1:
                        s2 |= 1 << j
                remap[s2] = remap.get(s2, 0) + c
            nxt = remap
            frontier = [frontier[i] for i in keep]
        if len(frontier) > max_width:
            return None
        states = nxt
    return sum(states.values())


def _count_split(p: Pip, comp: Sequence[int]) -> int:
    memo: Dict[int, int] = {}

    def rec(avail: int) -> int:
        if not avail:
            return 1
        if avail in memo:
            return memo[avail]
        x = min(_bits(avail), key=lambda v: bin(p.below[v] & avail).count("1"))
        r = rec(avail & ~p.above[x]) + rec(avail & ~(1 << x))
        memo[avail] = r
        return r

    mask = 0
    for e in comp:
        mask |= 1 << e
    return rec(mask)


def count_poset_ideals(p: Pip, max_width: int = 30) -> Tuple[int, List[int]]:
    """Number of ideals of the order of p and the per-component counts."""
    counts = []
    for comp in order_components(p):
        c = _count_frontier(p, comp, max_width)
        if c is None:
            c = _count_split(p, comp)
        counts.append(c)
    total = 1
    for c in counts:
        total *= c
    return total, counts


def factored(counts: Sequence[int]) -> List[List[int]]:
    """[[count, multiplicity], ...] sorted by count, trivial factors dropped."""
    cnt = Counter(c for c in counts if c != 1)
    return [[c, m] for c, m in sorted(cnt.items())]


# ---------------------------------------------------------------------------
# the R poset of a glued layer family

@dataclass
class Layer:
    """One layer: elements (hashable payloads) and its strict order pairs (lo, hi)."""

    elements: List[Hashable]
    order: List[Tuple[int, int]] = field(default_factory=list)

    def pip(self) -> Pip:
        return Pip(len(self.elements), self.order)


@dataclass
class RPoset:
    blocks: Dict[Tuple[int, int], List[Hashable]]
    fixed: Dict[int, List[Hashable]]
    pip: Pip
    tags: List[Tuple[int, int, Hashable]]  # element -> (alpha, beta, payload)
    # payloads lying in three or more layers; each maximal minimizer picks one of the labels
    choices: List[Tuple[Hashable, List[int]]] = field(default_factory=list)


def build_r_poset(layers: Dict[int, Layer]) -> RPoset:
    """Pairwise intersections of layers, ordered as in the lower label's layer."""
    labels = sorted(layers)
    index = {a: {x: i for i, x in enumerate(layers[a].elements)} for a in labels}
    closures = {a: layers[a].pip() for a in labels}
    owners: Dict[Hashable, List[int]] = {}
    for a in labels:
        for x in layers[a].elements:
            owners.setdefault(x, []).append(a)
    choices = []
    for x, ls in owners.items():
        if len(ls) > 2:
            # only possible for a zero-capacity shared set, which is then isolated in every layer
            for a in ls:
                i = index[a][x]
                if closures[a].below[i] != 1 << i or closures[a].above[i] != 1 << i:
                    raise AssertionError(f"element {sorted(x) if isinstance(x, frozenset) else x} lies in three layers {ls}")
            choices.append((x, ls))
    blocks: Dict[Tuple[int, int], List[Hashable]] = {}
    fixed: Dict[int, List[Hashable]] = {a: [] for a in labels}
    for a in labels:
        for x in layers[a].elements:
            ls = owners[x]
            if len(ls) == 1:
                fixed[a].append(x)
            elif len(ls) == 2 and ls[0] == a:
                blocks.setdefault((a, ls[1]), []).append(x)
    tags = []
    for (a, b), xs in sorted(blocks.items()):
        for x in xs:
            tags.append((a, b, x))
    ids = {(a, b, x): i for i, (a, b, x) in enumerate(tags)}
    order = []
    for i, (a, b, x) in enumerate(tags):
        for j, (a2, b2, y) in enumerate(tags):
            if i != j and (a, b) == (a2, b2) and closures[a].less(index[a][x], index[a][y]):
                order.append((i, j))
    return RPoset(blocks=blocks, fixed=fixed, pip=Pip(len(tags), order), tags=tags, choices=choices)


def j_bar(R: RPoset, ideal: Sequence[int], picks: Sequence[int] = ()) -> FrozenSet[Tuple[Hashable, int]]:
    """Consistent ideal of the glued PIP, as (payload, label) pairs, attached to an ideal of R.

    ``picks`` gives the chosen label for each entry of ``R.choices``.
    """
    inside = set(ideal)
    out = set()
    if len(picks) != len(R.choices):
        raise ValueError("one label is needed per shared element of three or more layers")
    for (x, ls), a in zip(R.choices, picks):
        if a not in ls:
            raise ValueError(f"label {a} does not own the shared element")
        out.add((x, a))
    for i, (a, b, x) in enumerate(R.tags):
        out.add((x, a) if i in inside else (x, b))
    for a, xs in R.fixed.items():
        for x in xs:
            out.add((x, a))
    return frozenset(out)


def maximal_minimizers_via_r(R: RPoset, to_point: Callable[[FrozenSet[Tuple[Hashable, int]]], tuple]) -> Iterator[tuple]:
    for picks in itertools.product(*(ls for _, ls in R.choices)):
        for ideal in enumerate_poset_ideals(R.pip):
            yield to_point(j_bar(R, ideal, picks))


def count_maximal_minimizers(R: RPoset, max_width: int = 30) -> dict:
    total, counts = count_poset_ideals(R.pip, max_width)
    counts = list(counts) + [len(ls) for _, ls in R.choices]
    for _, ls in R.choices:
        total *= len(ls)
    return {"total": str(total), "factored": factored(counts)}
