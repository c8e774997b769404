import itertools
import random
from fractions import Fraction

import pytest

from kpip.enumerate import enumerate_poset_ideals
from kpip.flownet import (
    Dinic,
    FlowNetwork,
    check_flow,
    max_flow,
    min_cut_value,
    minimal_min_cut,
    pq_poset,
    scc_condensation,
)


def random_network(rng, fractional=False):
    V = rng.randint(2, 10)
    net = FlowNetwork(V, 0, V - 1)
    for _ in range(rng.randint(0, 3 * V)):
        u, v = rng.randrange(V), rng.randrange(V)
        if u != v:
            cap = rng.randint(0, 4)
            if fractional and rng.random() < 0.3:
                cap = Fraction(rng.randint(1, 7), rng.randint(1, 3))
            net.add_arc(u, v, cap)
    return net


def brute_min_cuts(net):
    others = [v for v in range(net.num_vertices) if v not in (net.s, net.t)]
    best, fam = None, set()
    for bits in itertools.product((0, 1), repeat=len(others)):
        X = frozenset([net.s] + [v for v, b in zip(others, bits) if b])
        c = net.cut_capacity(X)
        if best is None or c < best:
            best, fam = c, {X}
        elif c == best:
            fam.add(X)
    return best, fam


def test_min_cut_family_matches_brute_force():
    rng = random.Random(11)
    for _ in range(150):
        net = random_network(rng, fractional=True)
        best, fam = brute_min_cuts(net)
        value, flows = max_flow(net)
        check_flow(net, flows)
        assert value == best
        pq = pq_poset(net, flows, value)
        got = [pq.tau(I) for I in enumerate_poset_ideals(pq.pip())]
        assert len(got) == len(set(got))
        assert set(got) == fam
        assert minimal_min_cut(net) == min(fam, key=len)


def test_poset_does_not_depend_on_arc_order():
    rng = random.Random(5)
    for _ in range(50):
        net = random_network(rng)
        a = pq_poset(net, *reversed(max_flow(net)))
        b = pq_poset(net, *reversed(max_flow(net, "reverse")))
        assert sorted(map(sorted, a.elements)) == sorted(map(sorted, b.elements))
        assert a.base == b.base


def test_single_arc():
    net = FlowNetwork(2, 0, 1, [(0, 1, 3)])
    assert max_flow(net) == (3, [3])
    assert min_cut_value(net) == 3
    pq = pq_poset(net)
    assert pq.elements == [] and pq.base == {0}


def test_bad_networks():
    with pytest.raises(ValueError):
        FlowNetwork(2, 0, 0)
    with pytest.raises(ValueError):
        FlowNetwork(2, 0, 1, [(0, 1, -1)])
    with pytest.raises(ValueError):
        FlowNetwork(2, 0, 1, [(0, 1, 0.5)])
    with pytest.raises(ValueError):
        FlowNetwork(2, 0, 1, [(0, 2, 1)])


def test_non_maximum_flow_rejected():
    net = FlowNetwork(2, 0, 1, [(0, 1, 3)])
    with pytest.raises(ValueError):
        pq_poset(net, [1], 1)


def test_phased_augmentation_keeps_flow():
    d = Dinic(3)
    a = d.add_arc(0, 1, 1)
    b = d.add_arc(1, 2, 5)
    assert d.augment(0, 2) == 1
    d.raise_capacity(a, 4)
    assert d.augment(0, 2) == 3
    assert d.flow(a) == 4 and d.flow(b) == 4
    with pytest.raises(ValueError):
        d.raise_capacity(a, 2)


def test_scc_condensation_orders_by_reachability():
    comps, pairs, comp_of = scc_condensation(4, {(0, 1), (1, 0), (1, 2), (2, 3)})
    assert comps == [frozenset({0, 1}), frozenset({2}), frozenset({3})]
    assert pairs == [(1, 0), (2, 0), (2, 1)]
    assert comp_of[1] == 0
