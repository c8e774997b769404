"""Algebra of S_k^n and table-backed k-submodular functions.

A point of S_k^n is a plain tuple of ints with entries in {0, ..., k}.
Coordinates are 0-based throughout the library.  Values are exact:
ints, ``fractions.Fraction`` or the saturating sentinel ``INF``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np

KVector = Tuple[int, ...]


class _Infinity:
    """Positive infinity with saturating addition, for exact value arithmetic."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    __str__ = __repr__

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, other):
        if other == 0:
            raise ValueError("INF * 0 is undefined")
        if other < 0:
            raise ValueError("negative multiples of INF are not supported")
        return self

    __rmul__ = __mul__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("kpip-infinity")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(v) -> bool:
    return v is INF


def as_value(v):
    """Normalize an int/Fraction/INF to the canonical exact representation."""
    if v is INF:
        return INF
    if isinstance(v, bool):
        raise TypeError("booleans are not function values")
    if isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else v
    if isinstance(v, float):
        raise TypeError("floating point values are not accepted; use Fraction")
    raise TypeError(f"unsupported value type {type(v).__name__}")


# ---------------------------------------------------------------------------
# vector algebra

def check_vector(x: Sequence[int], n: Optional[int] = None, k: Optional[int] = None) -> KVector:
    x = tuple(int(a) for a in x)
    if n is not None and len(x) != n:
        raise ValueError(f"expected a vector of length {n}, got {len(x)}")
    if k is not None:
        for a in x:
            if a < 0 or a > k:
                raise ValueError(f"label {a} outside 0..{k}")
    else:
        for a in x:
            if a < 0:
                raise ValueError(f"negative label {a}")
    return x


def _same_length(x, y):
    if len(x) != len(y):
        raise ValueError(f"dimension mismatch: {len(x)} vs {len(y)}")


def sq_meet(x: KVector, y: KVector) -> KVector:
    """Coordinatewise min on comparable labels, 0 on incomparable ones."""
    _same_length(x, y)
    return tuple(a if a == b else 0 for a, b in zip(x, y))


def sq_join(x: KVector, y: KVector) -> KVector:
    """Coordinatewise max on comparable labels, 0 on incomparable ones."""
    _same_length(x, y)
    out = []
    for a, b in zip(x, y):
        if a == b or b == 0:
            out.append(a)
        elif a == 0:
            out.append(b)
        else:
            out.append(0)
    return tuple(out)


def partial_leq(x: KVector, y: KVector) -> bool:
    """x precedes y iff every x_i is 0 or equal to y_i."""
    _same_length(x, y)
    return all(a == 0 or a == b for a, b in zip(x, y))


def support(x: KVector) -> frozenset:
    return frozenset(i for i, a in enumerate(x) if a)


def join_exists(x: KVector, y: KVector) -> bool:
    """True iff x and y have a common upper bound in S_k^n."""
    return all(a == 0 or b == 0 or a == b for a, b in zip(x, y))


def join_all(vectors: Iterable[KVector], n: int) -> KVector:
    """Least upper bound of pairwise joinable vectors (zero vector if empty)."""
    out = [0] * n
    for v in vectors:
        for i, a in enumerate(v):
            if a:
                if out[i] and out[i] != a:
                    raise ValueError("vectors have no common upper bound")
                out[i] = a
    return tuple(out)


def meet_all(vectors: Iterable[KVector]) -> KVector:
    it = iter(vectors)
    try:
        acc = next(it)
    except StopIteration:
        raise ValueError("meet of an empty family") from None
    for v in it:
        acc = sq_meet(acc, v)
    return acc


def all_points(n: int, k: int) -> Iterator[KVector]:
    return itertools.product(range(k + 1), repeat=n)


# ---------------------------------------------------------------------------
# table functions

@dataclass(frozen=True)
class TableFunction:
    """Dense table of a function S_k^n -> Q u {INF}.

    Points are indexed in mixed radix base k+1 with coordinate 0 most
    significant, so index order equals lexicographic order of tuples.
    """

    n: int
    k: int
    values: tuple
    _weights: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.n < 0:
            raise ValueError("n must be nonnegative")
        size = (self.k + 1) ** self.n
        if len(self.values) != size:
            raise ValueError(f"expected {size} values, got {len(self.values)}")
        vals = tuple(as_value(v) for v in self.values)
        if all(v is INF for v in vals):
            raise ValueError("a table function needs at least one finite value")
        object.__setattr__(self, "values", vals)
        r = self.k + 1
        object.__setattr__(self, "_weights", tuple(r ** (self.n - 1 - i) for i in range(self.n)))

    @classmethod
    def from_callable(cls, n: int, k: int, fn: Callable[[KVector], object]) -> "TableFunction":
        return cls(n, k, tuple(fn(x) for x in all_points(n, k)))

    @classmethod
    def from_entries(cls, n: int, k: int, entries: Mapping[KVector, object], default=INF) -> "TableFunction":
        vals = [default] * ((k + 1) ** n)
        r = k + 1
        weights = [r ** (n - 1 - i) for i in range(n)]
        for x, v in entries.items():
            x = check_vector(x, n, k)
            vals[sum(a * w for a, w in zip(x, weights))] = v
        return cls(n, k, tuple(vals))

    def index(self, x: KVector) -> int:
        return sum(a * w for a, w in zip(x, self._weights))

    def point(self, idx: int) -> KVector:
        r = self.k + 1
        out = []
        for w in self._weights:
            out.append(idx // w % r)
        return tuple(out)

    def __call__(self, x: KVector):
        if len(x) != self.n:
            raise ValueError("dimension mismatch")
        return self.values[self.index(x)]

    def points(self) -> Iterator[KVector]:
        return all_points(self.n, self.k)

    def min_value(self):
        return min(v for v in self.values if v is not INF)

    def restrict(self, fixings: Mapping[int, int]) -> Iterator[Tuple[KVector, object]]:
        """All (point, value) pairs consistent with a partial assignment."""
        ranges = [
            (fixings[i],) if i in fixings else range(self.k + 1) for i in range(self.n)
        ]
        for x in itertools.product(*ranges):
            yield x, self.values[self.index(x)]


def scaled_int_values(values: Sequence) -> Tuple[int, list, list]:
    """Common-denominator integer scaling: returns (denominator, ints, finite mask)."""
    den = 1
    for v in values:
        if v is not INF and isinstance(v, Fraction):
            den = den * v.denominator // math.gcd(den, v.denominator)
    ints = []
    mask = []
    for v in values:
        if v is INF:
            ints.append(0)
            mask.append(False)
        else:
            ints.append(int(v * den))
            mask.append(True)
    return den, ints, mask


def _op_tables(k: int):
    r = k + 1
    meet = np.zeros((r, r), dtype=np.int64)
    join = np.zeros((r, r), dtype=np.int64)
    for a in range(r):
        for b in range(r):
            meet[a, b] = sq_meet((a,), (b,))[0]
            join[a, b] = sq_join((a,), (b,))[0]
    return meet, join


def is_k_submodular(f: TableFunction) -> Tuple[bool, Optional[Tuple[KVector, KVector]]]:
    """Exhaustive check of f(x) + f(y) >= f(x meet y) + f(x join y).

    Returns (True, None) or (False, first violating pair in index order).
    A pair with an infinite left-hand side never violates; a finite
    left-hand side with an infinite right-hand side always does.
    """
    n, k = f.n, f.k
    size = len(f.values)
    den, ints, mask = scaled_int_values(f.values)
    bound = max((abs(v) for v in ints), default=0)
    if bound >= 2 ** 60:
        return _is_k_submodular_slow(f)
    vals = np.array(ints, dtype=np.int64)
    fin = np.array(mask, dtype=bool)
    digits = np.array(list(f.points()), dtype=np.int64).reshape(size, n)
    weights = np.array(f._weights, dtype=np.int64)
    meet_t, join_t = _op_tables(k)
    chunk = max(1, 2_000_000 // max(size, 1))
    for start in range(0, size, chunk):
        xs = np.arange(start, min(size, start + chunk))
        dx = digits[xs]
        midx = np.zeros((len(xs), size), dtype=np.int64)
        jidx = np.zeros((len(xs), size), dtype=np.int64)
        for c in range(n):
            a = dx[:, c][:, None]
            b = digits[:, c][None, :]
            midx += meet_t[a, b] * weights[c]
            jidx += join_t[a, b] * weights[c]
        lhs_fin = fin[xs][:, None] & fin[None, :]
        rhs_fin = fin[midx] & fin[jidx]
        lhs = vals[xs][:, None] + vals[None, :]
        rhs = vals[midx] + vals[jidx]
        bad = lhs_fin & (~rhs_fin | (lhs < rhs))
        if bad.any():
            i, j = np.argwhere(bad)[0]
            return False, (f.point(int(xs[i])), f.point(int(j)))
    return True, None


def _is_k_submodular_slow(f: TableFunction):
    pts = list(f.points())
    for x in pts:
        fx = f(x)
        for y in pts:
            fy = f(y)
            if fx is INF or fy is INF:
                continue
            lhs = fx + fy
            rhs = f(sq_meet(x, y)) + f(sq_join(x, y))
            if rhs is INF or lhs < rhs:
                return False, (x, y)
    return True, None


def brute_minimizer_set(f: TableFunction) -> frozenset:
    m = f.min_value()
    return frozenset(x for x, v in zip(f.points(), f.values) if v is not INF and v == m)


def is_closed_set(M: Iterable[KVector]) -> bool:
    M = set(M)
    if not M:
        raise ValueError("closedness is defined for nonempty sets")
    items = list(M)
    for i, x in enumerate(items):
        for y in items[i + 1:]:
            if sq_meet(x, y) not in M or sq_join(x, y) not in M:
                return False
    return True


# ---------------------------------------------------------------------------
# minimizing oracles

class MinimizingOracle:
    """Evaluator plus minimization under partial assignments, with a call counter.

    Subclasses implement ``_minimize(fixings)`` returning (value, point).
    Every call of ``minimize`` counts as one oracle call.
    """

    def __init__(self, n: int, k: int):
        self.n = n
        self.k = k
        self.calls = 0

    def evaluate(self, x: KVector):
        raise NotImplementedError

    def _minimize(self, fixings: Mapping[int, int]):
        raise NotImplementedError

    def minimize(self, fixings: Optional[Mapping[int, int]] = None):
        fixings = dict(fixings or {})
        for i, a in fixings.items():
            if not 0 <= i < self.n or not 0 <= a <= self.k:
                raise ValueError(f"bad fixing {i}<-{a}")
        self.calls += 1
        value, x = self._minimize(fixings)
        x = tuple(x)
        for i, a in fixings.items():
            if x[i] != a:
                raise AssertionError("oracle returned a point violating its fixings")
        return value, x


class TableOracle(MinimizingOracle):
    """Brute-force oracle over a TableFunction.

    ``tie`` picks which minimizer to return: "first" (lexicographically
    smallest), "last", or a ``random.Random`` instance for arbitrary ties.
    """

    def __init__(self, f: TableFunction, tie="first"):
        super().__init__(f.n, f.k)
        self.f = f
        self.tie = tie

    def evaluate(self, x):
        return self.f(x)

    def _minimize(self, fixings):
        best = None
        arg = []
        for x, v in self.f.restrict(fixings):
            if v is INF:
                continue
            if best is None or v < best:
                best, arg = v, [x]
            elif v == best:
                arg.append(x)
        if best is None:
            return INF, next(x for x, _ in self.f.restrict(fixings))
        if self.tie == "first":
            return best, arg[0]
        if self.tie == "last":
            return best, arg[-1]
        return best, self.tie.choice(arg)


class CallableOracle(MinimizingOracle):
    """Oracle from a user-supplied minimize(fixings) -> (value, point)."""

    def __init__(self, n, k, minimize_fn, evaluate_fn=None):
        super().__init__(n, k)
        self._fn = minimize_fn
        self._eval = evaluate_fn

    def evaluate(self, x):
        if self._eval is None:
            raise NotImplementedError("no evaluator supplied")
        return self._eval(x)

    def _minimize(self, fixings):
        return self._fn(fixings)
