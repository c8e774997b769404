"""PIP of the minimizer set from a minimizing oracle alone."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .core import KVector, MinimizingOracle, support
from .pip import Pip, pip_from_irreducibles


@dataclass
class OracleBuildReport:
    pip: Pip
    minimum_minimizer: KVector
    min_value: object
    oracle_calls: int
    irreducibles: List[KVector] = field(default_factory=list)


def _minimum_from(f: MinimizingOracle, fixings: Dict[int, int], value, x: KVector) -> KVector:
    """Reduce a minimizer x under ``fixings`` to the minimum one.

    Each free coordinate in supp x is tested independently: it is 0 in the
    minimum minimizer iff fixing it to 0 keeps the minimum value.
    """
    y = list(x)
    for i in sorted(support(x)):
        if i in fixings:
            continue
        v, _ = f.minimize({**fixings, i: 0})
        if v == value:
            y[i] = 0
    return tuple(y)


def get_minimum_minimizer(f: MinimizingOracle, fixings: Optional[Dict[int, int]] = None) -> KVector:
    fixings = dict(fixings or {})
    value, x = f.minimize(fixings)
    return _minimum_from(f, fixings, value, x)


def get_join_irreducible_minimizers(f: MinimizingOracle):
    """Return (minimum minimizer, min value, irreducible minimizers in sorted order)."""
    value, x0 = f.minimize({})
    xmin = _minimum_from(f, {}, value, x0)
    base = {i: xmin[i] for i in support(xmin)}
    found = set()
    for i in range(f.n):
        if i in base:
            continue
        for a in range(1, f.k + 1):
            fix = {**base, i: a}
            v, y = f.minimize(fix)
            if v == value:
                found.add(_minimum_from(f, fix, v, y))
    return xmin, value, sorted(found)


def build_pip_via_oracle(f: MinimizingOracle) -> OracleBuildReport:
    start = f.calls
    xmin, value, J = get_join_irreducible_minimizers(f)
    pip = pip_from_irreducibles(J, xmin, clique_parts=True)
    return OracleBuildReport(
        pip=pip,
        minimum_minimizer=xmin,
        min_value=value,
        oracle_calls=f.calls - start,
        irreducibles=J,
    )
