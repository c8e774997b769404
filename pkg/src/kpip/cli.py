"""Command line interface: kpip <subcommand> ...

Exit codes: 0 success, 2 unreadable arguments or input files, 3 input fails
validation (e.g. not k-submodular), 4 internal consistency check failed.
"""

from __future__ import annotations

import argparse
import logging
import os
import random
import sys
from typing import List, Optional

from . import formats
from .core import TableOracle, brute_minimizer_set, is_k_submodular
from .formats import FormatError, dumps

log = logging.getLogger("kpip")

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_INTERNAL = 0, 2, 3, 4


class ValidationFailure(Exception):
    """Input is well-formed but violates a precondition."""


def _emit(obj) -> None:
    sys.stdout.write(dumps(obj) + "\n")


def _setup_logging() -> None:
    level = os.environ.get("KPIP_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def _load(path, kind=None):
    d = formats.load_json(path)
    found = formats.detect_kind(d)
    if kind is not None and found != kind:
        raise FormatError(f"{path}: expected a {kind} file, found a {found} file")
    return found, d


def _checked_table(d):
    f = formats.table_from_json(d)
    ok, pair = is_k_submodular(f)
    if not ok:
        raise ValidationFailure(f"table is not k-submodular at x={list(pair[0])}, y={list(pair[1])}")
    return f


def _potts(d):
    inst = formats.potts_from_json(d)
    try:
        inst.validate()
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from exc
    return inst


def _grouped(d, verify: bool):
    gn = formats.grouped_from_json(d)
    if verify:
        ok, msg = _verify_network(gn)
        if not ok:
            raise ValidationFailure(msg)
    return gn


def _verify_network(gn):
    from .netrep import verify_representation

    if gn.net.num_vertices > 22:
        log.warning("network too large for the exhaustive legal-cut check; skipped")
        return True, None
    return verify_representation(gn)


# ---------------------------------------------------------------------------
# subcommands

def cmd_check(args) -> int:
    kind, d = _load(args.file)
    if kind == "table":
        f = formats.table_from_json(d)
        ok, pair = is_k_submodular(f)
        out = {"k_submodular": ok}
        if not ok:
            out["witness"] = [list(pair[0]), list(pair[1])]
        _emit(out)
        return EXIT_OK if ok else EXIT_INVALID
    if kind == "pip":
        from .pip import is_elementary, validate_pip

        p = formats.pip_from_json(d)
        ok, msg = validate_pip(p)
        el, why = is_elementary(p) if ok else (False, None)
        out = {"valid": ok, "elementary": el}
        if msg or why:
            out["reason"] = msg or why
        _emit(out)
        return EXIT_OK if ok else EXIT_INVALID
    if kind == "network":
        if "groups" in d:
            gn = formats.grouped_from_json(d)
            ok, msg = _verify_network(gn)
            _emit({"representable": ok, **({"reason": msg} if msg else {})})
            return EXIT_OK if ok else EXIT_INVALID
        from .flownet import max_flow

        net = formats.network_from_json(d)
        value, _ = max_flow(net)
        _emit({"max_flow": value})
        return EXIT_OK
    inst = formats.potts_from_json(d)
    try:
        inst.validate()
    except ValueError as exc:
        _emit({"valid": False, "reason": str(exc)})
        return EXIT_INVALID
    _emit({"valid": True})
    return EXIT_OK


def _build(kind, d, args):
    """Build a PIP from any input kind; returns (pip, report dict, extra)."""
    if kind == "pip":
        return formats.pip_from_json(d), {}, None
    if kind == "table":
        from .oracle_builder import build_pip_via_oracle

        f = _checked_table(d)
        tie = args.tie if args.tie in ("first", "last") else random.Random(args.seed)
        r = build_pip_via_oracle(TableOracle(f, tie))
        report = {"oracle_calls": r.oracle_calls, "min_value": r.min_value,
                  "minimum_minimizer": list(r.minimum_minimizer), "call_bound": 3 * f.k * f.n ** 2}
        return r.pip, report, r
    if kind == "network":
        from .netrep import pip_from_network

        gn = _grouped(d, not args.no_verify)
        b = pip_from_network(gn)
        report = {"min_value": b.min_value, "minimum_minimizer": list(b.minimum_minimizer)}
        return b.pip, report, b
    from .potts import build_pip_potts

    inst = _potts(d)
    b = build_pip_potts(inst, locking=getattr(args, "locking", False), jobs=args.jobs)
    report = {"min_value": b.min_value, "minimum_minimizer": list(b.minimum_minimizer),
              "route": "locking" if getattr(args, "locking", False) else "direct"}
    return b.pip, report, b


def cmd_build(args) -> int:
    route = "table" if args.oracle else "network" if args.network else "potts"
    kind, d = _load(args.file, route)
    p, report, _ = _build(kind, d, args)
    _emit({"pip": formats.pip_to_json(p), "report": report})
    return EXIT_OK


def cmd_enumerate(args) -> int:
    from .enumerate import enumerate_consistent_ideals, enumerate_maximal_consistent_ideals
    from .pip import ideal_point

    kind, d = _load(args.file)
    if kind == "table" and args.oracle_free:
        from .pip import pip_from_closed_set

        p, b = pip_from_closed_set(brute_minimizer_set(_checked_table(d))), None
    else:
        p, _, b = _build(kind, d, args)
    if kind == "potts" and (args.maximal or args.count):
        from .enumerate import count_maximal_minimizers
        from .potts import maximal_minimizers, r_poset

        R = r_poset(b)
        if args.count:
            _emit(count_maximal_minimizers(R))
        else:
            for x in maximal_minimizers(b, R):
                _emit(list(x))
        return EXIT_OK
    if args.count:
        total = sum(1 for _ in enumerate_maximal_consistent_ideals(p))
        _emit({"total": str(total)})
        return EXIT_OK
    stream = enumerate_maximal_consistent_ideals(p) if args.maximal else enumerate_consistent_ideals(p)
    for ideal in stream:
        if p.payloads is not None and p.bottom is not None:
            _emit(list(ideal_point(p, ideal)))
        else:
            _emit(sorted(ideal))
    return EXIT_OK


def cmd_stereo(args) -> int:
    from .labeling import load_pair, persistent_report, render, save_ppm, stereo_instance, synthetic_pair

    if args.synthetic:
        pair, _ = synthetic_pair(args.width, args.height, args.k, seed=args.seed)
    elif args.left and args.right:
        try:
            pair = load_pair(args.left, args.right)
        except (OSError, ValueError) as exc:
            raise FormatError(str(exc)) from exc
    else:
        raise FormatError("give --left and --right, or --synthetic")
    lam = formats.parse_value(args.lam, allow_inf=False)
    inst = stereo_instance(pair, args.k, lam, args.relaxation, rounding=not args.no_round, window=args.window)
    rep = persistent_report(inst, locking=args.locking, jobs=args.jobs)
    if args.out:
        save_ppm(render(rep, pair.width, pair.height, args.k), args.out)
    _emit(rep.stats())
    return EXIT_OK


def cmd_export(args) -> int:
    kind, d = _load(args.file)
    p, _, _ = _build(kind, d, args)
    text = formats.pip_to_dot(p)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _selftest_one(task):
    """Run one randomized cross-check; returns a failure message or None."""
    from . import random_instances as ri
    from .oracle_builder import build_pip_via_oracle
    from .pip import canonical_form, is_elementary, pip_from_closed_set, represents
    from .potts import build_pip_potts, check_cut_identity, build_potts_network

    kind, seed = task
    rng = random.Random(seed)
    if kind == "table":
        f = ri.table_suite(seed, 1)[0]
        M = brute_minimizer_set(f)
        p = pip_from_closed_set(M)
        if not is_elementary(p)[0] or not represents(p, M)[0]:
            return f"table seed {seed}: closed-set route"
        r = build_pip_via_oracle(TableOracle(f))
        if canonical_form(r.pip) != canonical_form(p) or r.oracle_calls > 3 * f.k * f.n ** 2:
            return f"table seed {seed}: oracle route"
        return None
    if kind == "network":
        from .netrep import pip_from_network, represented_table

        gn = ri.random_grouped_network(rng, *rng.choice([(2, 2), (2, 3), (3, 2)]), arcs=8)
        ref = pip_from_closed_set(brute_minimizer_set(represented_table(gn)))
        if canonical_form(pip_from_network(gn).pip) != canonical_form(ref):
            return f"network seed {seed}"
        return None
    inst = ri.random_potts_instance(rng)
    t = inst.table()
    ref = canonical_form(pip_from_closed_set(brute_minimizer_set(t)))
    if not check_cut_identity(inst, build_potts_network(inst))[0]:
        return f"potts seed {seed}: network identity"
    for locking in (False, True):
        b = build_pip_potts(inst, locking=locking)
        if canonical_form(b.pip) != ref or b.min_value != t.min_value():
            return f"potts seed {seed}: {'locking' if locking else 'direct'} route"
    return None


def cmd_selftest(args) -> int:
    tasks = [(kind, args.seed * 100003 + j) for j in range(args.count) for kind in ("table", "network", "potts")]
    if args.jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(args.jobs) as ex:
            results = list(ex.map(_selftest_one, tasks))
    else:
        results = [_selftest_one(t) for t in tasks]
    failures = [r for r in results if r]
    _emit({"instances": len(tasks), "failures": failures})
    return EXIT_OK if not failures else EXIT_INTERNAL


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kpip", description="Minimizer sets of k-submodular functions as PIPs.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for randomized choices")
    common.add_argument("--jobs", type=int, default=1, help="parallel workers")
    build_opts = argparse.ArgumentParser(add_help=False)
    build_opts.add_argument("--tie", choices=("first", "last", "random"), default="first",
                            help="which minimizer the brute-force oracle returns on ties")
    build_opts.add_argument("--no-verify", action="store_true", help="skip the exhaustive network check")
    build_opts.add_argument("--locking", action="store_true", help="Potts: use the locking multiflow")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="validate a table, PIP, network or Potts file")
    p.add_argument("file")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("build-pip", parents=[common, build_opts], help="construct the PIP of the minimizer set")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--oracle", action="store_true", help="input is a table; use the minimizing-oracle route")
    g.add_argument("--network", action="store_true", help="input is a grouped network")
    g.add_argument("--potts", action="store_true", help="input is a Potts instance")
    p.add_argument("file")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("enumerate", parents=[common, build_opts], help="list minimizers or count them")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true", help="all minimizers")
    g.add_argument("--maximal", action="store_true", help="maximal minimizers")
    g.add_argument("--count", action="store_true", help="number of maximal minimizers (factored for Potts input)")
    p.add_argument("--oracle-free", action="store_true", help="tables: build from the brute-force minimizer set")
    p.add_argument("file")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("stereo", parents=[common], help="persistent labeling of a stereo pair")
    p.add_argument("--left")
    p.add_argument("--right")
    p.add_argument("--synthetic", action="store_true", help="use a generated shifted-texture pair")
    p.add_argument("--width", type=int, default=32)
    p.add_argument("--height", type=int, default=24)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--lambda", dest="lam", default="1", help="smoothness weight (integer or p/q)")
    p.add_argument("--relaxation", choices=("average", "kovtun"), default="average")
    p.add_argument("--no-round", action="store_true", help="keep averaged SSD costs as exact fractions")
    p.add_argument("--window", type=int, default=9)
    p.add_argument("--locking", action="store_true")
    p.add_argument("--out", help="write the label map as PPM")
    p.set_defaults(func=cmd_stereo)

    p = sub.add_parser("export", parents=[common, build_opts], help="export a PIP")
    p.add_argument("--dot", action="store_true", required=True, help="Graphviz output")
    p.add_argument("--out")
    p.add_argument("file")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("selftest", parents=[common], help="randomized cross-checks against brute force")
    p.add_argument("--count", type=int, default=20, help="instances per family")
    p.set_defaults(func=cmd_selftest)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    _setup_logging()
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except FormatError as exc:
        print(f"kpip: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"kpip: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationFailure, ValueError) as exc:
        print(f"kpip: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except AssertionError as exc:
        print(f"kpip: internal check failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
