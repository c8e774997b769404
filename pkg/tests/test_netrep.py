import json
import pathlib
import random

import pytest

from kpip.core import TableOracle, brute_minimizer_set
from kpip.flownet import FlowNetwork, max_flow, pq_poset
from kpip.formats import grouped_from_json, parse_value, pip_from_json
from kpip.netrep import (
    GroupedNetwork,
    apply_exclusion_rules,
    exclusion_rules_direct,
    legalize,
    pip_from_network,
    psi,
    psi_inverse,
    represented_table,
    verify_representation,
)
from kpip.oracle_builder import build_pip_via_oracle
from kpip.pip import canonical_form, pip_from_closed_set, represents
from kpip.random_instances import random_grouped_network

FIXTURES = sorted((pathlib.Path(__file__).parent / "fixtures" / "networks").glob("*.json"))


def load(path):
    d = json.loads(path.read_text())
    return grouped_from_json(d), d["expected"]


def test_corpus_size():
    assert len(FIXTURES) >= 10


@pytest.mark.parametrize("path", FIXTURES, ids=lambda p: p.stem)
def test_fixture(path):
    gn, expected = load(path)
    assert verify_representation(gn) == (True, None)
    f = represented_table(gn)
    assert verify_representation(gn, f) == (True, None)
    build = pip_from_network(gn)
    want = canonical_form(pip_from_json(expected["pip"]))
    assert canonical_form(build.pip) == want
    assert build.min_value == parse_value(expected["min_value"])
    assert canonical_form(build_pip_via_oracle(TableOracle(f)).pip) == want
    assert represents(build.pip, brute_minimizer_set(f)) == (True, None)
    assert len(brute_minimizer_set(f)) == expected["minimizers"]
    for order in ("forward", "reverse"):
        value, flows = max_flow(gn.net, order)
        pq = pq_poset(gn.net, flows, value)
        assert apply_exclusion_rules(gn, pq) == exclusion_rules_direct(gn, pq)
    assert canonical_form(pip_from_network(gn, "reverse").pip) == want


def test_random_networks_against_brute_force():
    rng = random.Random(99)
    for _ in range(30):
        n, k = rng.choice([(1, 2), (2, 2), (2, 3), (3, 2)])
        gn = random_grouped_network(rng, n, k, arcs=8, cap_max=3)
        M = brute_minimizer_set(represented_table(gn))
        build = pip_from_network(gn)
        assert canonical_form(build.pip) == canonical_form(pip_from_closed_set(M))
        pq = pq_poset(gn.net)
        assert apply_exclusion_rules(gn, pq) == exclusion_rules_direct(gn, pq)


def _small():
    net = FlowNetwork(6, 0, 1, [(0, 2, 1), (3, 1, 1), (4, 5, 2)], ["s", "t", "a1", "a2", "b1", "b2"])
    return GroupedNetwork(net, [[2, 3], [4, 5]], 0)


def test_psi_round_trip_and_legalize():
    gn = _small()
    assert psi(gn, (2, 1)) == {0, 3, 4}
    assert psi_inverse(gn, {0, 3, 4}) == (2, 1)
    with pytest.raises(ValueError):
        psi_inverse(gn, {0, 2, 3})
    with pytest.raises(ValueError):
        psi_inverse(gn, {2})
    assert legalize(gn, {0, 2, 3, 4}) == {0, 4}


def test_offset_mismatch_is_reported():
    gn = _small()
    f = represented_table(gn)
    bad = GroupedNetwork(gn.net, gn.groups, 5)
    ok, why = verify_representation(bad, f)
    assert not ok and why.startswith("NR1")


def test_double_hit_cheaper_is_reported():
    net = FlowNetwork(4, 0, 1, [(0, 2, 1), (0, 3, 1)], ["s", "t", "a1", "a2"])
    ok, why = verify_representation(GroupedNetwork(net, [[2, 3]], 0))
    assert not ok and why.startswith("NR2")


def test_groups_must_partition():
    net = FlowNetwork(4, 0, 1, [], ["s", "t", "a", "b"])
    with pytest.raises(ValueError):
        GroupedNetwork(net, [[2]], 0)
    with pytest.raises(ValueError):
        GroupedNetwork(net, [[2], [3, 0]], 0)
