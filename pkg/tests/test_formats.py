import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from goldens import GOLDEN_M, zero_inf_table
from kpip.core import INF, TableFunction
from kpip.formats import (
    FormatError,
    detect_kind,
    dumps,
    grouped_from_json,
    grouped_to_json,
    load_json,
    network_from_json,
    network_to_json,
    parse_value,
    pip_from_json,
    pip_to_dot,
    pip_to_json,
    potts_from_json,
    potts_to_json,
    table_from_json,
    table_to_json,
    value_json,
)
from kpip.pip import canonical_form, pip_from_closed_set
from kpip.potts import PottsInstance


def test_values():
    assert parse_value(3) == 3
    assert parse_value("6/4") == Fraction(3, 2)
    assert parse_value("-2") == -2
    assert parse_value("inf") is INF
    for bad in (0.5, True, "1/0", "x", None):
        with pytest.raises(FormatError):
            parse_value(bad)
    with pytest.raises(FormatError):
        parse_value("inf", allow_inf=False)
    assert value_json(Fraction(3, 2)) == "3/2" and value_json(Fraction(4, 2)) == 2 and value_json(INF) == "inf"


@given(st.fractions(max_denominator=50))
def test_value_round_trip(q):
    assert parse_value(value_json(q)) == q


def test_dumps_is_canonical():
    assert dumps({"b": Fraction(1, 3), "a": [1, INF]}) == '{"a":[1,"inf"],"b":"1/3"}'
    with pytest.raises(TypeError):
        dumps({"x": 0.5})


def test_table_round_trip():
    f = zero_inf_table(GOLDEN_M, 5, 3)
    g = table_from_json(json.loads(dumps(table_to_json(f))))
    assert g == f
    h = TableFunction.from_callable(2, 1, lambda x: Fraction(sum(x), 3))
    assert table_from_json(table_to_json(h)) == h


def test_table_errors():
    with pytest.raises(FormatError):
        table_from_json({"n": 1, "k": 1})
    with pytest.raises(FormatError):
        table_from_json({"n": 1, "k": 1, "entries": [{"x": [2], "value": 0}]})
    with pytest.raises(FormatError):
        table_from_json({"n": 1, "k": 1, "entries": [{"x": [1], "value": 0}, {"x": [1], "value": 1}]})


def test_pip_round_trip():
    p = pip_from_closed_set(GOLDEN_M)
    d = json.loads(dumps(pip_to_json(p)))
    assert d["bottom"] == [0, 0, 0, 0, 2]
    assert canonical_form(pip_from_json(d)) == canonical_form(p)
    # elements are written in canonical order
    assert [e["payload"] for e in d["elements"]] == [list(x) for _, x in canonical_form(p)[0]]


def test_pip_without_payloads():
    d = {"elements": [{"id": 0}, {"id": 1}], "covers": [[0, 1]], "min_inconsistent": []}
    p = pip_from_json(d)
    assert p.payloads is None and p.covers == [(0, 1)]
    assert pip_to_json(p)["covers"] == [[0, 1]]
    with pytest.raises(FormatError):
        pip_from_json({"elements": [{"id": 1}], "covers": [], "min_inconsistent": []})
    with pytest.raises(FormatError):
        pip_from_json({"elements": [{"id": 0}, {"id": 1}], "covers": [[0, 1], [1, 0]], "min_inconsistent": []})


def test_dot_export():
    text = pip_to_dot(pip_from_closed_set(GOLDEN_M))
    assert text.startswith("digraph pip {")
    assert text.count("style=dashed") == 4
    assert '"22312"' in text


def test_network_round_trip():
    d = {"vertices": ["s", "t", "a"], "s": "s", "t": "t",
         "arcs": [{"from": "s", "to": "a", "cap": "3/2"}, {"from": "a", "to": "t", "cap": 1}]}
    net = network_from_json(d)
    assert net.arcs == [(0, 2, Fraction(3, 2)), (2, 1, 1)]
    assert network_to_json(net) == {**d, "arcs": [{"from": "s", "to": "a", "cap": "3/2"}, {"from": "a", "to": "t", "cap": 1}]}
    with pytest.raises(FormatError):
        network_from_json({**d, "arcs": [{"from": "s", "to": "zz", "cap": 1}]})
    with pytest.raises(FormatError):
        network_from_json({**d, "arcs": [{"from": "s", "to": "a", "cap": -1}]})
    g = {**d, "groups": {"1": ["a"]}, "K": 2}
    gn = grouped_from_json(g)
    assert gn.K == 2 and gn.groups == [[2]]
    assert grouped_from_json(grouped_to_json(gn)).groups == gn.groups
    with pytest.raises(FormatError):
        grouped_from_json({**d, "groups": {"2": ["a"]}})


def test_potts_round_trip():
    inst = PottsInstance(2, 2, [(0, 1, Fraction(1, 2))], [[1, 1, 2], [0, 3, 0]])
    back = potts_from_json(json.loads(dumps(potts_to_json(inst))))
    assert back.unary == inst.unary and back.edges == inst.edges
    raw = {"n": 1, "k": 2, "edges": [], "unary_raw": [[4, 1]], "relaxation": "kovtun"}
    assert potts_from_json(raw).unary == [[0, Fraction(3, 2), Fraction(-3, 2)]]
    with pytest.raises(FormatError):
        potts_from_json({"n": 1, "k": 2, "edges": []})


def test_detect_kind(tmp_path):
    assert detect_kind({"entries": []}) == "table"
    assert detect_kind({"elements": []}) == "pip"
    assert detect_kind({"arcs": []}) == "network"
    assert detect_kind({"edges": [], "unary": []}) == "potts"
    with pytest.raises(FormatError):
        detect_kind({"what": 1})
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(FormatError):
        load_json(bad)
