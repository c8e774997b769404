import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from goldens import GOLDEN_M, X, XP, Y, YP, Z, ZP, three_pair_pip
from kpip.enumerate import (
    Layer,
    build_r_poset,
    count_consistent_ideals,
    count_maximal_minimizers,
    count_poset_ideals,
    enumerate_consistent_ideals,
    enumerate_maximal_consistent_ideals,
    enumerate_poset_ideals,
    factored,
    is_maximal_consistent_ideal,
    j_bar,
    maximal_minimizers_via_r,
)
from kpip.pip import Pip, crossing_pairs, ideal_point, is_consistent_ideal, is_elementary, pip_from_closed_set


def brute_ideals(p, consistent=True):
    out = []
    for r in range(p.size + 1):
        for c in itertools.combinations(range(p.size), r):
            m = p.ideal_mask(c)
            if any(p.below[e] & ~m for e in c):
                continue
            if consistent and not is_consistent_ideal(p, c):
                continue
            out.append(list(c))
    return out


@st.composite
def random_pips(draw):
    n = draw(st.integers(0, 8))
    order = [(a, b) for a in range(n) for b in range(a + 1, n) if draw(st.integers(0, 4)) == 0]
    p = Pip(n, order)
    pairs = []
    for a in range(n):
        for b in range(a + 1, n):
            if not (p.above[a] & p.above[b]) and draw(st.integers(0, 3)) == 0:
                pairs.append((a, b))
    return Pip(n, order, pairs)


@settings(max_examples=150, deadline=None)
@given(random_pips())
def test_enumerators_match_brute_force(p):
    cons = brute_ideals(p)
    got = list(enumerate_consistent_ideals(p))
    assert sorted(got) == sorted(cons) and len(got) == len(cons)
    maximal = [c for c in cons if is_maximal_consistent_ideal(p, c)]
    got = list(enumerate_maximal_consistent_ideals(p))
    assert sorted(got) == sorted(maximal) and len(got) == len(maximal)
    poset = brute_ideals(p, consistent=False)
    got = list(enumerate_poset_ideals(p))
    assert sorted(got) == sorted(poset) and len(got) == len(poset)
    assert count_poset_ideals(p)[0] == len(poset)
    assert count_poset_ideals(p, max_width=0)[0] == len(poset)


def test_consistent_ideals_of_eleven_point_pip():
    p = pip_from_closed_set(GOLDEN_M)
    pts = sorted(ideal_point(p, c) for c in enumerate_consistent_ideals(p))
    assert pts == sorted(GOLDEN_M)
    assert count_consistent_ideals(p) == 11


def has_crossing_property(p, ideal):
    """Exactly one crossing element of every pair of comparable parts lies in the ideal."""
    return all(len({x0, y0} & set(ideal)) == 1 for x0, y0 in crossing_pairs(p))


def test_three_pair_pip_has_no_maximal_ideal_with_crossing_property():
    p = three_pair_pip()
    assert sorted(p.min_inconsistent) == [(X, XP), (Y, YP), (Z, ZP)]
    assert is_elementary(p) == (True, None)
    assert sorted(tuple(sorted(c)) for c in crossing_pairs(p)) == [(XP, YP), (XP, ZP), (YP, ZP)]
    found = list(enumerate_maximal_consistent_ideals(p))
    assert sorted(found) == sorted(c for c in brute_ideals(p) if is_maximal_consistent_ideal(p, c))
    assert found
    assert not any(has_crossing_property(p, c) for c in found)


def test_three_pair_pip_meets_every_pair_once():
    # hitting each inconsistent pair once is a weaker condition and does hold here
    p = three_pair_pip()
    assert is_maximal_consistent_ideal(p, [XP, YP, ZP])


def test_poset_ideal_counts():
    assert count_poset_ideals(Pip(0, []))[0] == 1
    assert count_poset_ideals(Pip(2, [(0, 1)]))[0] == 3
    assert count_poset_ideals(Pip(3, []))[0] == 8
    assert factored([3, 1, 2, 3]) == [[2, 1], [3, 2]]


def test_r_poset_from_two_layers():
    # layer 1 holds sets a < b < c, layer 2 holds b, c and d; shared sets keep layer 1's order
    layers = {
        1: Layer(["a", "b", "c"], [(0, 1), (1, 2), (0, 2)]),
        2: Layer(["c", "b", "d"], [(0, 1)]),
    }
    R = build_r_poset(layers)
    assert R.fixed == {1: ["a"], 2: ["d"]}
    assert R.blocks == {(1, 2): ["b", "c"]}
    assert R.pip.size == 2 and R.pip.covers == [(0, 1)]
    assert count_maximal_minimizers(R) == {"total": "3", "factored": [[3, 1]]}
    pts = {frozenset(j_bar(R, ideal)) for ideal in enumerate_poset_ideals(R.pip)}
    assert frozenset({("a", 1), ("b", 2), ("c", 2), ("d", 2)}) in pts
    assert frozenset({("a", 1), ("b", 1), ("c", 1), ("d", 2)}) in pts
    assert len(pts) == 3


def test_r_poset_empty_and_shared_choice():
    R = build_r_poset({1: Layer(["a"]), 2: Layer(["b"])})
    assert R.pip.size == 0
    assert count_maximal_minimizers(R)["total"] == "1"
    R = build_r_poset({1: Layer(["s"]), 2: Layer(["s"]), 3: Layer(["s"])})
    assert R.choices == [("s", [1, 2, 3])]
    assert count_maximal_minimizers(R)["total"] == "3"
    got = list(maximal_minimizers_via_r(R, lambda J: tuple(sorted(J))))
    assert sorted(got) == [(("s", 1),), (("s", 2),), (("s", 3),)]
