"""Small hand-drawn PIPs and closed sets used across the tests."""

from kpip.pip import Pip


def vec(s):
    return tuple(int(c) for c in s)


# eleven points of a closed set in S_3^5 and its six join-irreducibles
GOLDEN_M = [vec(s) for s in (
    "00002", "00012", "00312", "13002", "13012", "13102",
    "13112", "13202", "13212", "13312", "22312",
)]
GOLDEN_IRREDUCIBLES = [vec(s) for s in ("00012", "00312", "13002", "13102", "13202", "22312")]
GOLDEN_COVERS = {(vec(a), vec(b)) for a, b in (
    ("13002", "13102"), ("13002", "13202"), ("00012", "00312"), ("00312", "22312"),
)}
GOLDEN_PAIRS = {frozenset((vec(a), vec(b))) for a, b in (
    ("13102", "13202"), ("13202", "00312"), ("13002", "22312"), ("13102", "00312"),
)}


def zero_inf_table(M, n, k):
    from kpip.core import INF, TableFunction

    return TableFunction.from_entries(n, k, {x: 0 for x in M}, default=INF)


def zero_one_table(M, n, k):
    from kpip.core import TableFunction

    return TableFunction.from_entries(n, k, {x: 0 for x in M}, default=1)


# six-element PIP with three inconsistent pairs x-x', y-y', z-z'
X, XP, Y, YP, Z, ZP = range(6)


def three_pair_pip():
    order = [(YP, X), (YP, Z), (ZP, Y), (ZP, X), (XP, Z), (XP, Y)]
    return Pip(6, order, [(X, XP), (Y, YP), (Z, ZP)])


# lettered five/six-element posets: c > a, c > b, e > d, f > c
A, B, C, D, E, F, G = range(7)
BASE_ORDER = [(A, C), (B, C), (D, E), (C, F)]
