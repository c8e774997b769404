"""JSON and DOT formats for tables, PIPs, networks and Potts instances.

Numbers are exact: integers, "p/q" strings, or "inf".  Floats are
rejected on input and never written.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any, Dict, List

from .core import INF, TableFunction, as_value, is_inf
from .flownet import FlowNetwork
from .netrep import GroupedNetwork
from .pip import Pip, canonical_form
from .potts import PottsInstance, relax_potts

_FRAC = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*$")


class FormatError(ValueError):
    pass


def parse_value(v, allow_inf: bool = True):
    if isinstance(v, bool):
        raise FormatError("booleans are not numbers")
    if isinstance(v, int):
        return v
    if isinstance(v, float):
        raise FormatError(f"floating point value {v!r}; write integers or \"p/q\" strings")
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "+inf", "infinity"):
            if not allow_inf:
                raise FormatError("infinite value not allowed here")
            return INF
        m = _FRAC.match(v)
        if m:
            num = int(m.group(1))
            den = int(m.group(2)) if m.group(2) else 1
            if den == 0:
                raise FormatError(f"zero denominator in {v!r}")
            return as_value(Fraction(num, den))
    raise FormatError(f"cannot read value {v!r}")


def value_json(v):
    if is_inf(v):
        return "inf"
    v = as_value(v)
    if isinstance(v, int):
        return v
    return f"{v.numerator}/{v.denominator}"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (frozenset, set)):
        return sorted(_plain(v) for v in obj)
    if isinstance(obj, Fraction) or is_inf(obj):
        return value_json(obj)
    if isinstance(obj, float):
        raise TypeError("floats are not written")
    if hasattr(obj, "item"):  # numpy scalars
        return _plain(obj.item())
    return obj


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, compact separators, no floats."""
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"))


def load_json(path) -> Any:
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"{path}: {exc}") from exc


def _need(d: dict, *keys):
    if not isinstance(d, dict):
        raise FormatError("expected a JSON object")
    for k in keys:
        if k not in d:
            raise FormatError(f"missing key {k!r}")


# ---------------------------------------------------------------------------
# tables

def table_from_json(d: dict) -> TableFunction:
    _need(d, "n", "k", "entries")
    n, k = d["n"], d["k"]
    if not (isinstance(n, int) and isinstance(k, int)) or n < 0 or k < 1:
        raise FormatError("n and k must be integers with n >= 0, k >= 1")
    default = parse_value(d.get("default", "inf"))
    entries = {}
    for e in d["entries"]:
        _need(e, "x", "value")
        x = tuple(e["x"])
        if len(x) != n or any(not isinstance(a, int) or not 0 <= a <= k for a in x):
            raise FormatError(f"bad point {e['x']!r}")
        if x in entries:
            raise FormatError(f"point {list(x)} listed twice")
        entries[x] = parse_value(e["value"])
    return TableFunction.from_entries(n, k, entries, default=default)


def table_to_json(f: TableFunction) -> dict:
    entries = [{"x": list(x), "value": value_json(f(x))} for x in f.points() if not is_inf(f(x))]
    return {"n": f.n, "k": f.k, "default": "inf", "entries": entries}


# ---------------------------------------------------------------------------
# PIPs

def pip_to_json(p: Pip) -> dict:
    """Elements in canonical order when payloads are known, else in stored order."""
    if p.payloads is not None:
        elements, covers, mic, bottom = canonical_form(p)
        out = {
            "elements": [{"id": i, "part": part, "payload": list(x)} for i, (part, x) in enumerate(elements)],
            "covers": [list(c) for c in covers],
            "min_inconsistent": [list(c) for c in mic],
        }
        if bottom is not None:
            out["bottom"] = list(bottom)
        return out
    from .pip import recover_parts

    parts = p.parts if p.parts is not None else recover_parts(p)
    part_of = {e: r for r, comp in enumerate(sorted(parts, key=min)) for e in comp}
    return {
        "elements": [{"id": i, "part": part_of[i], "payload": None} for i in range(p.size)],
        "covers": sorted([list(c) for c in p.covers]),
        "min_inconsistent": sorted([list(c) for c in p.min_inconsistent]),
    }


def pip_from_json(d: dict) -> Pip:
    _need(d, "elements", "covers", "min_inconsistent")
    elems = sorted(d["elements"], key=lambda e: e["id"])
    if [e["id"] for e in elems] != list(range(len(elems))):
        raise FormatError("element ids must be 0..m-1")
    payloads = [e.get("payload") for e in elems]
    if all(x is not None for x in payloads) and (elems or d.get("bottom") is not None):
        payloads = [tuple(x) for x in payloads]
    elif any(x is not None for x in payloads):
        raise FormatError("payloads must be given for all elements or none")
    else:
        payloads = None
    parts: Dict[int, List[int]] = {}
    for e in elems:
        parts.setdefault(e.get("part", e["id"]), []).append(e["id"])
    for pair in list(d["covers"]) + list(d["min_inconsistent"]):
        if len(pair) != 2:
            raise FormatError(f"bad pair {pair!r}")
    bottom = tuple(d["bottom"]) if d.get("bottom") is not None else None
    try:
        return Pip(
            len(elems),
            [tuple(c) for c in d["covers"]],
            [tuple(c) for c in d["min_inconsistent"]],
            payloads=payloads,
            parts=[parts[r] for r in sorted(parts)],
            bottom=bottom,
        )
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def pip_to_dot(p: Pip, name: str = "pip") -> str:
    """Covers as solid arrows from higher to lower elements, minimal inconsistent pairs dashed."""
    lines = [f"digraph {name} {{", "  rankdir=BT;"]
    for i in range(p.size):
        label = "".join(map(str, p.payloads[i])) if p.payloads is not None else str(i)
        lines.append(f'  e{i} [label="{label}"];')
    for lo, hi in sorted(p.covers):
        lines.append(f"  e{hi} -> e{lo};")
    for a, b in sorted(p.min_inconsistent):
        lines.append(f"  e{a} -> e{b} [style=dashed, dir=none, constraint=false];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# networks

def network_from_json(d: dict) -> FlowNetwork:
    _need(d, "vertices", "s", "t", "arcs")
    names = list(d["vertices"])
    if len(set(map(str, names))) != len(names):
        raise FormatError("duplicate vertex names")
    idx = {str(v): i for i, v in enumerate(names)}

    def v_of(x):
        if str(x) not in idx:
            raise FormatError(f"unknown vertex {x!r}")
        return idx[str(x)]

    arcs = []
    for a in d["arcs"]:
        _need(a, "from", "to", "cap")
        cap = parse_value(a["cap"], allow_inf=False)
        if cap < 0:
            raise FormatError("negative capacity")
        arcs.append((v_of(a["from"]), v_of(a["to"]), cap))
    try:
        return FlowNetwork(len(names), v_of(d["s"]), v_of(d["t"]), arcs, names)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def network_to_json(net: FlowNetwork) -> dict:
    name = net.name
    return {
        "vertices": [name(v) for v in range(net.num_vertices)],
        "s": name(net.s),
        "t": name(net.t),
        "arcs": [{"from": name(u), "to": name(v), "cap": value_json(c)} for u, v, c in net.arcs],
    }


def grouped_from_json(d: dict) -> GroupedNetwork:
    net = network_from_json(d)
    _need(d, "groups")
    idx = {str(v): i for i, v in enumerate(net.names)}
    keys = sorted(d["groups"], key=int)
    if [int(k) for k in keys] != list(range(1, len(keys) + 1)):
        raise FormatError("groups must be keyed 1..n")
    groups = []
    for key in keys:
        try:
            groups.append([idx[str(v)] for v in d["groups"][key]])
        except KeyError as exc:
            raise FormatError(f"unknown vertex {exc.args[0]!r} in group {key}") from exc
    try:
        return GroupedNetwork(net, groups, parse_value(d.get("K", 0), allow_inf=False))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def grouped_to_json(gn: GroupedNetwork) -> dict:
    out = network_to_json(gn.net)
    out["groups"] = {str(i + 1): [gn.net.name(v) for v in g] for i, g in enumerate(gn.groups)}
    out["K"] = value_json(gn.K)
    return out


# ---------------------------------------------------------------------------
# Potts instances

def potts_from_json(d: dict) -> PottsInstance:
    _need(d, "n", "k", "edges")
    n, k = d["n"], d["k"]
    edges = []
    for e in d["edges"]:
        _need(e, "u", "v", "lambda")
        edges.append((e["u"], e["v"], parse_value(e["lambda"], allow_inf=False)))
    raw = None
    if "unary" in d:
        unary = [[parse_value(v, allow_inf=False) for v in row] for row in d["unary"]]
    elif "unary_raw" in d:
        raw = [[parse_value(v, allow_inf=False) for v in row] for row in d["unary_raw"]]
        if any(len(r) != k for r in raw) or len(raw) != n:
            raise FormatError("unary_raw must be n rows of k values")
        unary = relax_potts(raw, d.get("relaxation", "average"))
    else:
        raise FormatError("need 'unary' or 'unary_raw'")
    inst = PottsInstance(n, k, edges, unary, raw)
    return inst


def potts_to_json(inst: PottsInstance) -> dict:
    return {
        "n": inst.n,
        "k": inst.k,
        "edges": [{"u": u, "v": v, "lambda": value_json(lam)} for u, v, lam in inst.edges],
        "unary": [[value_json(v) for v in row] for row in inst.unary],
    }


def detect_kind(d: dict) -> str:
    if not isinstance(d, dict):
        raise FormatError("expected a JSON object")
    if "elements" in d:
        return "pip"
    if "arcs" in d:
        return "network"
    if "edges" in d and ("unary" in d or "unary_raw" in d):
        return "potts"
    if "entries" in d:
        return "table"
    raise FormatError("cannot tell what kind of file this is")
