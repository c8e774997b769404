"""Seeded random instance generators shared by the self-test harness and the test suite."""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import List, Optional

from .core import INF, TableFunction, is_k_submodular
from .flownet import FlowNetwork
from .netrep import GroupedNetwork, verify_representation
from .potts import PottsInstance, d_potts, relax_potts


def random_unary_ksub(rng: random.Random, k: int, spread: int = 3) -> List[int]:
    """Unary table t[0..k] with t[a] + t[b] >= 2 t[0] for distinct nonzero a, b."""
    while True:
        t = [rng.randint(0, spread) for _ in range(k + 1)]
        if all(t[a] + t[b] >= 2 * t[0] for a, b in itertools.combinations(range(1, k + 1), 2)):
            return t


def random_potts_sum_table(rng: random.Random, n: int, k: int) -> TableFunction:
    """Sum of weighted Potts pair terms lambda d(x_i, x_j) and unary k-submodular terms."""
    spread = rng.choice((1, 1, 2, 3))
    unary = [random_unary_ksub(rng, k, spread) for _ in range(n)]
    pairs = [(i, j, rng.randint(0, 2)) for i, j in itertools.combinations(range(n), 2) if rng.random() < 0.6]

    def f(x):
        v = Fraction(sum(unary[i][a] for i, a in enumerate(x)))
        for i, j, lam in pairs:
            v += lam * d_potts(x[i], x[j])
        return v

    return TableFunction.from_callable(n, k, f)


def random_small_table(rng: random.Random, k: int, tries: int = 100000) -> TableFunction:
    """Rejection-sampled k-submodular table on n = 2, values in {0, 1, 2} (and sometimes +inf)."""
    for _ in range(tries):
        vals = [rng.choice((0, 1, 1, 2, 2, 2)) for _ in range((k + 1) ** 2)]
        if rng.random() < 0.3:
            for j in range(len(vals)):
                if j and rng.random() < 0.2:
                    vals[j] = INF
        f = TableFunction(2, k, vals)
        if is_k_submodular(f)[0]:
            return f
    raise RuntimeError("no k-submodular table found")


def table_suite(seed: int = 0, count: int = 200) -> List[TableFunction]:
    """Suite of small k-submodular tables (n <= 4, k <= 3)."""
    rng = random.Random(seed)
    out = []
    for j in range(count):
        if j % 4 == 3:
            out.append(random_small_table(rng, rng.randint(1, 3)))
        else:
            k = rng.randint(1, 3)
            n = rng.randint(1, 4 if k <= 2 else 3)
            out.append(random_potts_sum_table(rng, n, k))
    return out


def random_potts_instance(rng: random.Random, n_max: int = 6, k_max: int = 4, spread: int = 4,
                          grid: Optional[bool] = None, relaxation: Optional[str] = None) -> PottsInstance:
    """Potts instance on a path or a small grid, small enough for brute force: (k+1)^n <= 15625."""
    k = rng.randint(2, k_max)
    n = rng.randint(1, n_max)
    while (k + 1) ** n > 15625:
        n -= 1
    grid = rng.random() < 0.5 if grid is None else grid
    edges = []
    if grid and n >= 4:
        w = 2 if n < 6 else 3
        for i in range(n):
            if (i + 1) % w and i + 1 < n:
                edges.append((i, i + 1, rng.randint(1, 3)))
            if i + w < n:
                edges.append((i, i + w, rng.randint(1, 3)))
    else:
        edges = [(i, i + 1, rng.randint(1, 3)) for i in range(n - 1)]
    raw = [[rng.randint(0, spread) for _ in range(k)] for _ in range(n)]
    relaxation = relaxation or rng.choice(("average", "kovtun"))
    return PottsInstance(n, k, edges, relax_potts(raw, relaxation), raw)


def potts_suite(seed: int = 0, count: int = 100) -> List[PottsInstance]:
    rng = random.Random(seed)
    return [random_potts_instance(rng) for _ in range(count)]


def random_star_instance(rng: random.Random, k_max: int = 8) -> PottsInstance:
    """A hub with many leaves and many labels: many terminals and fringes per vertex."""
    k = rng.randint(3, k_max)
    n = rng.randint(3, 9)
    edges = [(0, i, rng.randint(1, 4)) for i in range(1, n)]
    edges += [(i, i + 1, rng.randint(1, 2)) for i in range(1, n - 1) if rng.random() < 0.3]
    raw = [[rng.randint(0, 6) for _ in range(k)] for _ in range(n)]
    return PottsInstance(n, k, edges, relax_potts(raw, rng.choice(("average", "kovtun"))), raw)


def random_grouped_network(rng: random.Random, n: int = 2, k: int = 2, arcs: int = 6, cap_max: int = 3,
                           tries: int = 100000) -> GroupedNetwork:
    """Rejection-sampled grouped network satisfying the legal-cut condition (checked exhaustively)."""
    V = 2 + n * k
    s, t = 0, 1
    groups = [[2 + i * k + a for a in range(k)] for i in range(n)]
    for _ in range(tries):
        net = FlowNetwork(V, s, t, [], names=["s", "t"] + [f"v{i + 1}_{a + 1}" for i in range(n) for a in range(k)])
        for _ in range(rng.randint(1, arcs)):
            u = rng.choice([s] + list(range(2, V)))
            v = rng.choice([t] + list(range(2, V)))
            if u != v:
                net.add_arc(u, v, rng.randint(1, cap_max))
        gn = GroupedNetwork(net, groups, rng.randint(0, 2))
        if verify_representation(gn)[0]:
            return gn
    raise RuntimeError("no network satisfying the legal-cut condition found")
