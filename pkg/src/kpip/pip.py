"""Posets with inconsistent pairs (PIPs) and their link to (meet, join)-closed sets.

A ``Pip`` stores elements 0..m-1, an order given by any generating set of
relations (reduced to covers), and the minimal inconsistent pairs.  Order
queries use bitset closures, so ``leq`` is O(1).
"""

from __future__ import annotations

import graphlib
import itertools
from collections import defaultdict
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .core import KVector, join_all, join_exists, meet_all, partial_leq, sq_join, sq_meet, support


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _norm_pair(a: int, b: int) -> Tuple[int, int]:
    return (a, b) if a < b else (b, a)


class Pip:
    """Poset with minimal inconsistent pairs.

    ``payloads`` optionally attaches a KVector to every element (the
    point of S_k^n it represents); ``bottom`` is the point the empty
    ideal represents.  ``parts`` is an optional partition of elements.
    """

    def __init__(
        self,
        size: int,
        order: Iterable[Tuple[int, int]] = (),
        min_inconsistent: Iterable[Tuple[int, int]] = (),
        payloads: Optional[Sequence] = None,
        parts: Optional[Sequence[Sequence[int]]] = None,
        bottom: Optional[KVector] = None,
        extra: Optional[Sequence] = None,
    ):
        self.size = size
        below_direct: List[Set[int]] = [set() for _ in range(size)]
        for lo, hi in order:
            if not (0 <= lo < size and 0 <= hi < size):
                raise ValueError(f"order pair ({lo}, {hi}) out of range")
            if lo == hi:
                continue
            below_direct[hi].add(lo)
        ts = graphlib.TopologicalSorter({v: below_direct[v] for v in range(size)})
        try:
            self.topo = list(ts.static_order())
        except graphlib.CycleError as exc:
            raise ValueError("order relation contains a cycle") from exc
        below = [0] * size
        for v in self.topo:
            m = 1 << v
            for u in below_direct[v]:
                m |= below[u]
            below[v] = m
        above = [0] * size
        for v in range(size):
            for u in _bits(below[v]):
                above[u] |= 1 << v
        self.below = below
        self.above = above
        covers = []
        for v in range(size):
            strict = below[v] & ~(1 << v)
            for u in _bits(strict):
                # u is covered by v iff nothing strictly between
                mid = strict & above[u] & ~(1 << u)
                if not mid:
                    covers.append((u, v))
        self.covers = sorted(covers)
        self.lower_covers = [[] for _ in range(size)]
        self.upper_covers = [[] for _ in range(size)]
        for u, v in self.covers:
            self.lower_covers[v].append(u)
            self.upper_covers[u].append(v)
        mic = set()
        for a, b in min_inconsistent:
            if not (0 <= a < size and 0 <= b < size):
                raise ValueError(f"inconsistent pair ({a}, {b}) out of range")
            mic.add(_norm_pair(a, b))
        self.min_inconsistent = frozenset(mic)
        partners = [0] * size
        for a, b in mic:
            partners[a] |= 1 << b
            partners[b] |= 1 << a
        self.partners = partners
        self.payloads = list(payloads) if payloads is not None else None
        self.parts = [sorted(p) for p in parts] if parts is not None else None
        self.bottom = tuple(bottom) if bottom is not None else None
        self.extra = list(extra) if extra is not None else None

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"Pip(size={self.size}, covers={len(self.covers)}, min_inconsistent={len(self.min_inconsistent)})"

    def leq(self, a: int, b: int) -> bool:
        return bool(self.below[b] >> a & 1)

    def less(self, a: int, b: int) -> bool:
        return a != b and self.leq(a, b)

    def comparable(self, a: int, b: int) -> bool:
        return self.leq(a, b) or self.leq(b, a)

    def down(self, a: int) -> int:
        return self.below[a]

    def up(self, a: int) -> int:
        return self.above[a]

    def ideal_mask(self, elems: Iterable[int]) -> int:
        m = 0
        for e in elems:
            m |= 1 << e
        return m

    def order_pairs(self) -> List[Tuple[int, int]]:
        """All strict relations (lo, hi)."""
        out = []
        for v in range(self.size):
            for u in _bits(self.below[v] & ~(1 << v)):
                out.append((u, v))
        return out

    def without_inconsistency(self) -> "Pip":
        return Pip(self.size, self.covers, (), self.payloads, self.parts, self.bottom, self.extra)


# ---------------------------------------------------------------------------
# axioms

def validate_pip(p: Pip) -> Tuple[bool, Optional[str]]:
    """Check the minimal-inconsistency axioms (acyclicity holds by construction)."""
    for a, b in sorted(p.min_inconsistent):
        if a == b:
            return False, f"MIC1: element {a} is inconsistent with itself"
        if p.above[a] & p.above[b]:
            return False, f"MIC1: pair ({a}, {b}) has a common upper bound"
    for a, b in sorted(p.min_inconsistent):
        for c, d in p.min_inconsistent:
            if (c, d) == (a, b):
                continue
            if (p.leq(c, a) and p.leq(d, b)) or (p.leq(d, a) and p.leq(c, b)):
                return False, f"MIC2: pair ({a}, {b}) dominates pair ({c}, {d})"
    return True, None


def check_inconsistency_relation(p: Pip, relation: Iterable[Tuple[int, int]]) -> Tuple[bool, Optional[str]]:
    """Check a full (not necessarily minimal) inconsistency relation against IC1/IC2."""
    rel = {_norm_pair(a, b) for a, b in relation}
    for a, b in sorted(rel):
        if a == b or p.above[a] & p.above[b]:
            return False, f"IC1: pair ({a}, {b}) has a common upper bound"
    for a, b in sorted(rel):
        for u in _bits(p.above[a]):
            for v in _bits(p.above[b]):
                if _norm_pair(u, v) not in rel:
                    return False, f"IC2: ({a}, {b}) inconsistent but ({u}, {v}) is not"
    return True, None


def inconsistency_closure(p: Pip) -> FrozenSet[Tuple[int, int]]:
    out = set()
    for a, b in p.min_inconsistent:
        for u in _bits(p.above[a]):
            for v in _bits(p.above[b]):
                out.add(_norm_pair(u, v))
    return frozenset(out)


def minimal_pairs(p: Pip, relation: Iterable[Tuple[int, int]]) -> FrozenSet[Tuple[int, int]]:
    """Minimal members of an upward-closed symmetric relation."""
    rel = {_norm_pair(a, b) for a, b in relation}
    out = set()
    for a, b in rel:
        ok = True
        for c in p.lower_covers[a]:
            if _norm_pair(c, b) in rel:
                ok = False
                break
        if ok:
            for d in p.lower_covers[b]:
                if _norm_pair(a, d) in rel:
                    ok = False
                    break
        if ok:
            out.add((a, b))
    return frozenset(out)


def is_consistent_ideal(p: Pip, ideal: Iterable[int]) -> bool:
    mask = p.ideal_mask(ideal)
    for e in _bits(mask):
        if p.below[e] & ~mask:
            return False
        if p.partners[e] & mask:
            return False
    return True


# ---------------------------------------------------------------------------
# closed sets

def _strict_below(x: KVector, M) -> List[KVector]:
    return [y for y in M if y != x and partial_leq(y, x)]


def join_irreducibles(M: Iterable[KVector], check: bool = True) -> List[KVector]:
    """Join-irreducible elements of a closed set, in lexicographic order.

    x is irreducible iff it is not the minimum and the join of everything
    strictly below it is not x itself (equivalently, x has one lower cover).
    """
    M = sorted(set(M))
    if check:
        from .core import is_closed_set

        if not is_closed_set(M):
            raise ValueError("input is not closed under meet and join")
    if not M:
        return []
    n = len(M[0])
    bottom = meet_all(M)
    out = []
    for x in M:
        if x == bottom:
            continue
        below = _strict_below(x, M)
        if join_all(below, n) != x:
            out.append(x)
    return out


def lower_cover(x: KVector, M: Iterable[KVector]) -> KVector:
    """The unique lower cover of a join-irreducible x in M."""
    M = list(M)
    below = _strict_below(x, M)
    if not below:
        raise ValueError("x is the minimum of M")
    lc = join_all(below, len(x))
    if lc == x or lc not in set(M):
        raise ValueError("x is not join-irreducible in M")
    return lc


def differential(x: KVector, M: Iterable[KVector], require_simple: bool = True) -> KVector:
    """Entries of x where its unique lower cover is 0 (other entries zeroed)."""
    M = list(M)
    if require_simple and any(meet_all(M)):
        raise ValueError("closed set is not simple (its minimum is nonzero)")
    lc = lower_cover(x, M)
    return tuple(a if b == 0 else 0 for a, b in zip(x, lc))


def differential_classes(M: Iterable[KVector]) -> Dict[FrozenSet[int], List[KVector]]:
    """Group join-irreducibles by the support of their differential."""
    M = sorted(set(M))
    classes: Dict[FrozenSet[int], List[KVector]] = defaultdict(list)
    for x in join_irreducibles(M, check=False):
        d = differential(x, M, require_simple=False)
        classes[support(d)].append(x)
    return dict(classes)


def normalize(M: Iterable[KVector]):
    """Contract coordinates of a simple closed set so every differential has one-point support.

    Returns (M', mapping) where mapping is a dict with
      "classes": tuple of coordinate tuples (one per new coordinate),
      "patterns": per class, the restriction patterns; label a is patterns[a-1],
      "phi": dict from old points to new points,
      "k": the new label count.
    """
    M = sorted(set(M))
    if any(meet_all(M)):
        raise ValueError("closed set is not simple (its minimum is nonzero)")
    classes = differential_classes(M)
    supports = sorted((tuple(sorted(s)) for s in classes), key=lambda c: c[0])
    flat = [i for c in supports for i in c]
    if len(flat) != len(set(flat)):
        raise AssertionError("differential supports overlap without coinciding")
    patterns = []
    for c in supports:
        pats = sorted({tuple(x[i] for i in c) for x in M} - {tuple(0 for _ in c)})
        patterns.append(pats)
    k_new = max((len(p) for p in patterns), default=1)
    phi = {}
    for x in M:
        y = []
        for c, pats in zip(supports, patterns):
            r = tuple(x[i] for i in c)
            y.append(0 if not any(r) else pats.index(r) + 1)
        phi[x] = tuple(y)
    if len(set(phi.values())) != len(M):
        raise AssertionError("contraction is not injective")
    mapping = {"classes": tuple(supports), "patterns": patterns, "phi": phi, "k": max(k_new, 1)}
    return sorted(phi.values()), mapping


def pip_from_closed_set(M: Iterable[KVector], check: bool = True) -> Pip:
    """Elementary PIP of join-irreducibles of a closed set.

    Elements are the irreducibles in lexicographic order with their vectors
    as payloads; x and y are inconsistent when their join does not exist in
    S_k^n; parts are the classes of equal differential support.
    """
    M = sorted(set(M))
    if not M:
        raise ValueError("empty closed set")
    if check:
        from .core import is_closed_set

        if not is_closed_set(M):
            raise ValueError("input is not closed under meet and join")
    bottom = meet_all(M)
    J = join_irreducibles(M, check=False)
    return pip_from_irreducibles(J, bottom, M=M)


def pip_from_irreducibles(J: Sequence[KVector], bottom: KVector, M=None, diffs=None, clique_parts: bool = False) -> Pip:
    """Build the PIP from the irreducible set alone.

    Differentials are taken from ``diffs`` if given, else recomputed from
    J: the lower cover of x is the join of bottom and the irreducibles
    strictly below x.  With ``clique_parts`` the minimal inconsistent
    pairs are all pairs inside a part instead of the minimal pairs
    without a join.
    """
    J = sorted(J)
    idx = {x: i for i, x in enumerate(J)}
    n = len(bottom)
    order = [(idx[y], idx[x]) for x in J for y in J if x != y and partial_leq(y, x)]
    if diffs is None:
        diffs = {}
        for x in J:
            below = [y for y in J if y != x and partial_leq(y, x)] + [bottom]
            lc = join_all(below, n)
            diffs[x] = tuple(a if b == 0 else 0 for a, b in zip(x, lc))
    groups: Dict[FrozenSet[int], List[int]] = defaultdict(list)
    for x in J:
        groups[support(diffs[x])].append(idx[x])
    parts = sorted(groups.values(), key=lambda g: min(J[i] for i in g))
    shell = Pip(len(J), order)
    if clique_parts:
        mic = [pair for g in parts for pair in itertools.combinations(sorted(g), 2)]
    else:
        incons = [(idx[x], idx[y]) for x, y in itertools.combinations(J, 2) if not join_exists(x, y)]
        mic = minimal_pairs(shell, incons)
    return Pip(len(J), shell.covers, mic, payloads=J, parts=parts, bottom=bottom)


# ---------------------------------------------------------------------------
# elementary PIPs

def recover_parts(p: Pip) -> List[List[int]]:
    """Connected components of the minimal-inconsistency graph, sorted by least member."""
    seen = [False] * p.size
    parts = []
    for s in range(p.size):
        if seen[s]:
            continue
        comp = []
        stack = [s]
        seen[s] = True
        while stack:
            v = stack.pop()
            comp.append(v)
            for u in _bits(p.partners[v]):
                if not seen[u]:
                    seen[u] = True
                    stack.append(u)
        parts.append(sorted(comp))
    parts.sort(key=lambda c: c[0])
    return parts


def is_elementary(p: Pip) -> Tuple[bool, Optional[str]]:
    parts = recover_parts(p)
    for comp in parts:
        for a, b in itertools.combinations(comp, 2):
            if (a, b) not in p.min_inconsistent:
                return False, f"EP0: part {comp} is not a clique of minimal inconsistent pairs"
    big = [c for c in parts if len(c) >= 2]
    singles = [c[0] for c in parts if len(c) == 1]
    for comp in big:
        for y in singles:
            for x in comp:
                if p.less(x, y):
                    return False, f"EP1: element {x} of part {comp} lies below singleton part {y}"
    for Pi, Pj in itertools.combinations(big, 2):
        if not any(p.comparable(x, y) for x in Pi for y in Pj):
            continue
        if crossing_elements(p, Pi, Pj) is None:
            return False, f"EP2: parts {Pi} and {Pj} are comparable without the crossing pattern"
    return True, None


def crossing_elements(p: Pip, Pi: Sequence[int], Pj: Sequence[int]) -> Optional[Tuple[int, int]]:
    """(x0, y0) with x0 below every member of Pj but y0, and y0 below every member of Pi but x0."""
    for x0 in Pi:
        for y0 in Pj:
            if all(p.less(x0, y) for y in Pj if y != y0) and all(p.less(y0, x) for x in Pi if x != x0):
                return x0, y0
    return None


def crossing_pairs(p: Pip) -> List[Tuple[int, int]]:
    """Crossing elements of every pair of comparable parts with two or more members."""
    big = [c for c in recover_parts(p) if len(c) >= 2]
    out = []
    for Pi, Pj in itertools.combinations(big, 2):
        if any(p.comparable(x, y) for x in Pi for y in Pj):
            pair = crossing_elements(p, Pi, Pj)
            if pair is not None:
                out.append(pair)
    return out


def closed_set_from_pip(p: Pip, verify: bool = True) -> Tuple[List[KVector], Dict[int, Tuple[int, int]]]:
    """Realize an elementary PIP as a closed set.

    Part i (components ordered by least element) becomes coordinate i and
    its members get labels 1, 2, ... in element order.  Returns the sorted
    closed set and the element -> (coordinate, label) map.
    """
    from .enumerate import enumerate_consistent_ideals

    ok, why = is_elementary(p)
    if not ok:
        raise ValueError(f"PIP is not elementary: {why}")
    parts = recover_parts(p)
    coord = {}
    for i, comp in enumerate(parts):
        for a, e in enumerate(comp, start=1):
            coord[e] = (i, a)
    n = len(parts)
    out = []
    for ideal in enumerate_consistent_ideals(p):
        x = [0] * n
        for e in ideal:
            i, a = coord[e]
            x[i] = a
        out.append(tuple(x))
    out.sort()
    if len(set(out)) != len(out):
        raise AssertionError("two consistent ideals realized the same point")
    if verify:
        from .core import is_closed_set

        if not is_closed_set(out):
            raise AssertionError("realized set is not closed")
    return out, coord


# ---------------------------------------------------------------------------
# comparison helpers

def canonical_form(p: Pip):
    """Payload-based canonical form.

    Parts are ranked by their least payload, elements sorted by
    (part rank, payload); covers and minimal inconsistent pairs are
    re-expressed in the new numbering and sorted.
    """
    if p.payloads is None:
        raise ValueError("canonical form needs payload vectors")
    parts = p.parts if p.parts is not None else recover_parts(p)
    part_of = {}
    ranked = sorted(parts, key=lambda c: min(tuple(p.payloads[e]) for e in c))
    for r, comp in enumerate(ranked):
        for e in comp:
            part_of[e] = r
    order = sorted(range(p.size), key=lambda e: (part_of[e], tuple(p.payloads[e])))
    new = {e: i for i, e in enumerate(order)}
    elements = tuple((part_of[e], tuple(p.payloads[e])) for e in order)
    covers = tuple(sorted((new[a], new[b]) for a, b in p.covers))
    mic = tuple(sorted(_norm_pair(new[a], new[b]) for a, b in p.min_inconsistent))
    return elements, covers, mic, (tuple(p.bottom) if p.bottom is not None else None)


def _signature(p: Pip, e: int):
    return (
        bin(p.below[e]).count("1"),
        bin(p.above[e]).count("1"),
        bin(p.partners[e]).count("1"),
        len(p.lower_covers[e]),
        len(p.upper_covers[e]),
    )


def pip_isomorphic(p: Pip, q: Pip) -> bool:
    """Structural isomorphism (order and minimal inconsistency), ignoring payloads."""
    if p.size != q.size or len(p.covers) != len(q.covers) or len(p.min_inconsistent) != len(q.min_inconsistent):
        return False
    sp = [_signature(p, e) for e in range(p.size)]
    sq = [_signature(q, e) for e in range(q.size)]
    if sorted(sp) != sorted(sq):
        return False
    order = sorted(range(p.size), key=lambda e: (sum(1 for s in sp if s == sp[e]), -sp[e][0]))
    mapping: Dict[int, int] = {}
    used = set()

    def consistent(a, b):
        for a2, b2 in mapping.items():
            if p.leq(a, a2) != q.leq(b, b2) or p.leq(a2, a) != q.leq(b2, b):
                return False
            if ((_norm_pair(a, a2) in p.min_inconsistent) != (_norm_pair(b, b2) in q.min_inconsistent)):
                return False
        return True

    def search(t):
        if t == len(order):
            return True
        a = order[t]
        for b in range(q.size):
            if b in used or sq[b] != sp[a]:
                continue
            if consistent(a, b):
                mapping[a] = b
                used.add(b)
                if search(t + 1):
                    return True
                del mapping[a]
                used.discard(b)
        return False

    return search(0)


def ideal_point(p: Pip, ideal: Iterable[int]) -> KVector:
    """Point represented by a consistent ideal: join of payloads over bottom."""
    if p.payloads is None or p.bottom is None:
        raise ValueError("PIP carries no payload vectors")
    return join_all([p.bottom] + [p.payloads[e] for e in ideal], len(p.bottom))


def represents(p: Pip, M: Iterable[KVector]) -> Tuple[bool, Optional[str]]:
    """Exhaustively check that consistent ideals of p map bijectively and order-isomorphically onto M."""
    from .enumerate import enumerate_consistent_ideals

    M = set(M)
    images = []
    for ideal in enumerate_consistent_ideals(p):
        images.append((p.ideal_mask(ideal), ideal_point(p, ideal)))
    pts = [x for _, x in images]
    if len(set(pts)) != len(pts):
        return False, "two consistent ideals map to the same point"
    if set(pts) != M:
        missing = sorted(M - set(pts))[:3]
        extra = sorted(set(pts) - M)[:3]
        return False, f"image differs from M (missing {missing}, extra {extra})"
    for (ma, xa), (mb, xb) in itertools.product(images, repeat=2):
        if ((ma & ~mb) == 0) != partial_leq(xa, xb):
            return False, f"order mismatch between {xa} and {xb}"
    return True, None
