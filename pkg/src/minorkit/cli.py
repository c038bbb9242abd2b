"""Command-line front end.

Algebras are given either as JSON files::

    {"name": "...", "size": n, "signature": [{"name": "meet", "arity": 2}, ...],
     "tables": {"meet": [flat row-major table], ...}, "labels": [...]}

or as built-in names (``minorkit golden --list`` and ``--help`` show them).
Exit status: 0 on success, 1 when a check fails, 2 on usage or parse errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

from . import library
from .algebra import DEFAULT_HOM_LIMIT, DEFAULT_POWER_CAP, FiniteAlgebra, Signature
from .duality import AlterEgo, DualSpace, bidual_check, dualize, ego_by_name
from .dualspace import MinorSequence, dual_minor_poset, minor_sequence, tilde_classes
from .errors import MinorkitError, ParseError
from .oracle import census, minor_poset_bruteforce, nondualizability_report
from .posets import hasse_dot, poset_iso
from .predictions import (
    mv_relabel,
    predict_boolean,
    predict_complemented_dl,
    predict_median_boolean,
)

FORMATS = ("json", "csv", "dot")


def default_limit() -> int:
    raw = os.environ.get("MINORKIT_LIMIT")
    if raw is None:
        return DEFAULT_HOM_LIMIT
    try:
        value = int(raw)
    except ValueError as exc:
        raise ParseError(f"MINORKIT_LIMIT must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ParseError("MINORKIT_LIMIT must be positive")
    return value


# ---------------------------------------------------------------- parsing

def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _require(data: dict, key: str, kind, what: str):
    if not isinstance(data, dict) or key not in data:
        raise ParseError(f"{what}: missing field {key!r}")
    value = data[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise ParseError(f"{what}: field {key!r} has the wrong type")
    return value


def algebra_from_dict(data, what: str = "algebra") -> FiniteAlgebra:
    size = _require(data, "size", int, what)
    sig_raw = _require(data, "signature", list, what)
    ops = []
    for i, entry in enumerate(sig_raw):
        name = _require(entry, "name", str, f"{what}: signature[{i}]")
        arity = _require(entry, "arity", int, f"{what}: signature[{i}]")
        ops.append((name, arity))
    tables = _require(data, "tables", dict, what)
    for name, _ in ops:
        if name not in tables:
            raise ParseError(f"{what}: missing table for operation {name!r}")
    labels = data.get("labels")
    if labels is not None and (not isinstance(labels, list) or len(labels) != size):
        raise ParseError(f"{what}: 'labels' must list one label per element")
    try:
        sig = Signature(tuple(ops))
    except ValueError as exc:
        raise ParseError(f"{what}: {exc}") from exc
    return FiniteAlgebra(size, sig, tables, name=data.get("name"),
                         labels=[str(x) for x in labels] if labels else None)


def parse_algebra(text: str) -> FiniteAlgebra:
    return algebra_from_dict(_load_json(text, "algebra"))


def algebra_to_dict(A: FiniteAlgebra) -> dict:
    out = {"name": A.name, "size": A.size,
           "signature": [{"name": n, "arity": k} for n, k in A.sig],
           "tables": {n: A.flat_table(n) for n in A.sig.names}}
    if A.labels is not None:
        out["labels"] = list(A.labels)
    return out


def _builtin_algebras() -> dict[str, Callable[[str], FiniteAlgebra]]:
    def bundled(name):
        return lambda _: parse_algebra(resources.files("minorkit").joinpath("data", name).read_text())

    def ints(arg):
        return [int(x) for x in arg.split(",") if x]

    return {
        "two_element_ba": bundled("two_element_ba.json"),
        "fig1_lattice": bundled("fig1_lattice.json"),
        "boolean": lambda a: library.boolean_algebra(int(a or 1)),
        "boolean-lattice": lambda a: library.dl_reduct(library.boolean_algebra(int(a or 1))),
        "median-boolean": lambda a: library.median_of_lattice(library.dl_reduct(library.boolean_algebra(int(a or 1)))),
        "lukasiewicz": lambda a: library.lukasiewicz(int(a or 1)),
        "mv-product": lambda a: library.mv_product(ints(a)),
        "boolean-group": lambda _: library.boolean_group(),
        "two_element_dl": lambda _: library.two_element_dl(),
    }


BUILTIN_HELP = ("two_element_ba, fig1_lattice, two_element_dl, boolean:K, boolean-lattice:K, "
                "median-boolean:K, lukasiewicz:M, mv-product:M1,M2,..., boolean-group")


def load_algebra(spec: str) -> FiniteAlgebra:
    """A JSON file path or a built-in name such as ``boolean:3`` or ``mv-product:2,4``."""
    path = Path(spec)
    if path.suffix == ".json" or path.exists():
        try:
            text = path.read_text()
        except OSError as exc:
            raise ParseError(f"cannot read {spec}: {exc}") from exc
        return parse_algebra(text)
    name, _, arg = spec.partition(":")
    builders = _builtin_algebras()
    if name not in builders:
        raise ParseError(f"unknown algebra {spec!r}; built-ins: {BUILTIN_HELP}")
    try:
        return builders[name](arg)
    except ValueError as exc:
        raise ParseError(f"bad argument for {name!r}: {exc}") from exc


def _relations_from(data, what: str):
    out = []
    for i, r in enumerate(data.get("relations", [])):
        name = _require(r, "name", str, f"{what}: relations[{i}]")
        arity = _require(r, "arity", int, f"{what}: relations[{i}]")
        tuples = _require(r, "tuples", list, f"{what}: relations[{i}]")
        out.append((name, arity, [tuple(t) for t in tuples]))
    return tuple(out)


def parse_ego(text: str) -> AlterEgo:
    """Alter ego JSON: base algebra (inline object or name), constants, ops and relations."""
    data = _load_json(text, "alter ego")
    if not isinstance(data, dict) or "base" not in data:
        raise ParseError("alter ego: missing field 'base'")
    base = data["base"]
    base = algebra_from_dict(base, "alter ego base") if isinstance(base, dict) else load_algebra(str(base))
    try:
        return AlterEgo(base,
                        constants=tuple(data.get("constants", [])),
                        unary_ops=tuple(data.get("unary_ops", {}).items()),
                        partial_ops=tuple((n, [tuple(p) for p in g]) for n, g in data.get("partial_ops", {}).items()),
                        relations=_relations_from(data, "alter ego"),
                        name=data.get("name", "custom"))
    except (TypeError, AttributeError) as exc:
        raise ParseError(f"alter ego: {exc}") from exc


def load_ego(spec: str) -> AlterEgo:
    path = Path(spec)
    if path.suffix == ".json" or path.exists():
        try:
            return parse_ego(path.read_text())
        except OSError as exc:
            raise ParseError(f"cannot read {spec}: {exc}") from exc
    try:
        return ego_by_name(spec)
    except (KeyError, ValueError) as exc:
        raise ParseError(f"unknown alter ego {spec!r}; presets: boolean, dl, median, mvM") from exc


def dualspace_to_dict(X: DualSpace) -> dict:
    return {
        "size": X.size,
        "constants": [{"value": v, "point": p} for v, p in X.constants],
        "unary_ops": {n: list(t) for n, t in X.unary_ops},
        "partial_ops": {n: [list(p) for p in g] for n, g in X.partial_ops},
        "relations": [{"name": n, "arity": k, "tuples": [list(t) for t in ts]} for n, k, ts in X.relations],
        "labels": [X.label(p) for p in range(X.size)],
    }


def dualspace_from_dict(data) -> DualSpace:
    what = "dual space"
    size = _require(data, "size", int, what)
    try:
        return DualSpace(size,
                         tuple((c["value"], c["point"]) for c in data.get("constants", [])),
                         tuple(data.get("unary_ops", {}).items()),
                         tuple((n, [tuple(p) for p in g]) for n, g in data.get("partial_ops", {}).items()),
                         _relations_from(data, what),
                         point_labels=data.get("labels"))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{what}: {exc}") from exc


def ego_for(A: FiniteAlgebra, requested: str | None) -> AlterEgo:
    if requested:
        return load_ego(requested)
    names = set(A.sig.names)
    if names == {"zero", "one", "meet", "join", "neg"}:
        return ego_by_name("boolean")
    if names == {"meet", "join"}:
        return ego_by_name("dl")
    if names == {"m"}:
        return ego_by_name("median")
    raise ParseError("no default alter ego for this signature; pass --ego")


# ---------------------------------------------------------------- golden runs

@dataclass
class GoldenResult:
    ok: bool
    lines: list[str] = field(default_factory=list)


def _seq_line(label: str, got: MinorSequence, want: MinorSequence) -> tuple[bool, str]:
    ok = got == want
    return ok, f"{'ok  ' if ok else 'FAIL'} {label}: got {got.to_json()} expected {want.to_json()}"


def _self_sequence(A: FiniteAlgebra, ego: AlterEgo, limit: int) -> MinorSequence:
    X = dualize(A, ego, limit)
    return minor_sequence(X, X, limit)


def golden_stone(limit: int) -> GoldenResult:
    res = GoldenResult(True)
    ego = ego_by_name("boolean")
    for l, k in [(1, 1), (2, 2), (3, 3), (2, 3), (3, 2)]:
        # functions 2^l ... -> 2^k: dual of the target 2^k maps into copies of the dual of 2^l
        got = minor_sequence(dualize(library.boolean_algebra(k), ego, limit),
                             dualize(library.boolean_algebra(l), ego, limit), limit)
        ok, line = _seq_line(f"2^{l} -> 2^{k}", got, predict_boolean(l, k).as_minor_sequence())
        res.ok &= ok
        res.lines.append(line)
    return res


def golden_fig1(limit: int) -> GoldenResult:
    seq = _self_sequence(library.fig1_lattice(), ego_by_name("dl"), limit)
    ok, line = _seq_line("fig1 lattice", seq, MinorSequence({1: 29, 2: 30}, 6))
    return GoldenResult(ok, [line])


def golden_mv12(limit: int) -> GoldenResult:
    seq = _self_sequence(library.mv_product([2, 4, 4, 6]), ego_by_name("mv12"), limit)
    ok, line = _seq_line("L2xL4xL4xL6 in MV_12", seq, MinorSequence({4: 18}, 0))
    return GoldenResult(ok, [line])


def golden_complemented_dl(limit: int) -> GoldenResult:
    res = GoldenResult(True)
    for n in (1, 2, 3):
        seq = _self_sequence(library.dl_reduct(library.boolean_algebra(n)), ego_by_name("dl"), limit)
        ok, line = _seq_line(f"Boolean lattice with {n} atoms", seq, predict_complemented_dl(n).as_minor_sequence())
        res.ok &= ok
        res.lines.append(line)
    return res


def golden_median(limit: int) -> GoldenResult:
    res = GoldenResult(True)
    for k in (1, 2, 3):
        A = library.median_of_lattice(library.dl_reduct(library.boolean_algebra(k)))
        seq = _self_sequence(A, ego_by_name("median"), limit)
        ok, line = _seq_line(f"median reduct of 2^{k}", seq, predict_median_boolean(k).as_minor_sequence())
        res.ok &= ok
        res.lines.append(line)
    return res


def golden_mv_relabel(limit: int) -> GoldenResult:
    first = [2, 4]
    second = mv_relabel(4, 9, {2: 3}, first)
    a = _self_sequence(library.mv_product(first), ego_by_name("mv4"), limit)
    b = _self_sequence(library.mv_product(second), ego_by_name("mv9"), limit)
    ok = a == b
    return GoldenResult(ok, [f"{'ok  ' if ok else 'FAIL'} L2xL4 in MV_4: {a.to_json()}; "
                             f"L{second[0]}xL{second[1]} in MV_9: {b.to_json()}"])


def golden_boolean_group(limit: int) -> GoldenResult:
    report = nondualizability_report(library.boolean_group(), 3, limit)
    sum3 = (0, 1, 1, 0, 1, 0, 0, 1)
    hits = {v.criterion: v.detail for v in report.violations if v.function.table == sum3}
    ok = {"c", "d"} <= set(hits)
    lines = [f"{'ok  ' if ok else 'FAIL'} x+y+z on Z_2 flagged by criteria {sorted(hits)}"]
    lines += [f"     ({c}) {d}" for c, d in sorted(hits.items())]
    return GoldenResult(ok, lines)


GOLDEN: dict[str, Callable[[int], GoldenResult]] = {
    "stone": golden_stone,
    "fig1-lattice": golden_fig1,
    "mv12": golden_mv12,
    "complemented-dl": golden_complemented_dl,
    "median-boolean": golden_median,
    "mv-relabel": golden_mv_relabel,
    "boolean-group": golden_boolean_group,
}

GOLDEN_ALIASES = {
    "example-5.1": "stone",
    "example-5.2": "fig1-lattice",
    "example-5.17": "mv12",
    "prop-5.20": "complemented-dl",
    "prop-5.21": "median-boolean",
    "prop-5.18": "mv-relabel",
    "example-4.5": "boolean-group",
}


# ---------------------------------------------------------------- commands

def _emit(text: str, out: str | None):
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _csv(rows: dict[int, int]) -> str:
    lines = ["essential_arity,class_count"] + [f"{j},{c}" for j, c in sorted(rows.items())]
    return "\n".join(lines)


def cmd_dualize(args, limit):
    A = load_algebra(args.algebra)
    _emit(_dumps(dualspace_to_dict(dualize(A, ego_for(A, args.ego), limit))), args.output)
    return 0


def cmd_simclasses(args, limit):
    A = load_algebra(args.algebra)
    X = dualize(A, ego_for(A, args.ego), limit)
    tp = tilde_classes(X)
    _emit(_dumps({"classes": [list(c) for c in tp.classes],
                  "labels": [X.label(p) for p in range(X.size)]}), args.output)
    return 0


def cmd_minorseq(args, limit):
    A = load_algebra(args.algebra)
    B = load_algebra(args.target) if args.target else A
    ego = ego_for(A, args.ego)
    seq = minor_sequence(dualize(B, ego, limit), dualize(A, ego, limit), limit)
    if args.format == "csv":
        _emit(_csv({0: seq.ess0, **seq.counts}), args.output)
    else:
        _emit(_dumps(seq.to_dict()), args.output)
    return 0


def cmd_poset(args, limit):
    A = load_algebra(args.algebra)
    B = load_algebra(args.target) if args.target else A
    ego = ego_for(A, args.ego)
    P = dual_minor_poset(dualize(B, ego, limit), dualize(A, ego, limit), args.max_n, limit)
    _emit(hasse_dot(P, name="minors", label=lambda c: f"ess {c.ess} {c}"), args.output)
    return 0


def cmd_oracle(args, limit):
    A = load_algebra(args.algebra)
    B = load_algebra(args.target) if args.target else A
    P = minor_poset_bruteforce(A, B, args.max_n, limit, args.cap)
    data = census(P)
    if args.format == "csv":
        _emit(_csv(data["maximal"]), args.output)
    else:
        payload = {"max_n": args.max_n, "class_count": P.size,
                   "classes": {str(k): v for k, v in data["classes"].items()},
                   "maximal": {str(k): v for k, v in data["maximal"].items()}}
        _emit(_dumps(payload), args.output)
    return 0


def cmd_crosscheck(args, limit):
    A = load_algebra(args.algebra)
    ego = ego_for(A, args.ego)
    X = dualize(A, ego, limit)
    oracle_poset = minor_poset_bruteforce(A, A, args.max_n, limit, args.cap)
    dual_poset = dual_minor_poset(X, X, args.max_n, limit)
    same_census = census(oracle_poset) == census(dual_poset)
    iso = same_census and poset_iso(oracle_poset, dual_poset, cap=None, label_key=lambda c: c.ess)
    bidual = bidual_check(A, ego, limit)
    ok = iso and bidual
    _emit(_dumps({"oracle_classes": oracle_poset.size, "dual_classes": dual_poset.size,
                  "census_equal": same_census, "order_isomorphic": iso, "bidual": bidual, "ok": ok}),
          args.output)
    return 0 if ok else 1


def cmd_golden(args, limit):
    if args.list or not args.name:
        _emit("\n".join(f"{n}" + "".join(f" (alias {a})" for a, t in GOLDEN_ALIASES.items() if t == n)
                        for n in GOLDEN), args.output)
        return 0 if args.list else 2
    name = GOLDEN_ALIASES.get(args.name, args.name)
    if name not in GOLDEN:
        raise ParseError(f"unknown golden example {args.name!r}")
    result = GOLDEN[name](limit)
    _emit("\n".join(result.lines + [f"{name}: {'reproduced' if result.ok else 'NOT reproduced'}"]), args.output)
    return 0 if result.ok else 1


def cmd_nondualizable(args, limit):
    A = load_algebra(args.algebra)
    report = nondualizability_report(A, args.max_n, limit, args.cap)
    payload = {
        "max_n": report.max_n, "functions": report.function_count, "classes": report.class_count,
        "flagged": report.flagged, "inconclusive_components": report.inconclusive_components,
        "violations": [{"criterion": v.criterion, "arity": v.function.arity,
                        "table": list(v.function.table), "detail": v.detail} for v in report.violations],
    }
    _emit(_dumps(payload), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="minorkit", description="Minor posets of finite algebras via natural dualities.")
    parser.add_argument("--limit", type=int, default=None,
                        help="enumeration limit (default: $MINORKIT_LIMIT or 1000000)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, target=False, max_n=False, fmt=(), ego=True):
        p.add_argument("--algebra", "-a", required=True, help=f"JSON file or built-in ({BUILTIN_HELP})")
        if target:
            p.add_argument("--target", "-b", help="codomain algebra (default: same as --algebra)")
        if ego:
            p.add_argument("--ego", "-e", help="alter ego preset (boolean, dl, median, mvM) or JSON file")
        if max_n:
            p.add_argument("--max-n", type=int, default=2, help="largest arity to enumerate")
            p.add_argument("--cap", type=int, default=DEFAULT_POWER_CAP, help="largest |A|^n allowed")
        if fmt:
            p.add_argument("--format", "-f", choices=fmt, default=fmt[0])
        p.add_argument("--output", "-o", help="write to this file instead of stdout")

    common(sub.add_parser("dualize", help="dual space of an algebra as JSON"))
    common(sub.add_parser("simclasses", help="linked classes of the dual space"))
    common(sub.add_parser("minorseq", help="minor sequence (maximal classes by essential arity)"),
           target=True, fmt=("json", "csv"))
    p = sub.add_parser("poset", help="DOT drawing of the dual-side minor poset")
    common(p, target=True, max_n=True)
    common(sub.add_parser("oracle", help="brute-force census of minor classes"),
           target=True, max_n=True, fmt=("json", "csv"), ego=False)
    common(sub.add_parser("crosscheck", help="compare brute force with the dual side"), max_n=True)
    g = sub.add_parser("golden", help="reproduce a named worked example")
    g.add_argument("name", nargs="?")
    g.add_argument("--list", action="store_true")
    g.add_argument("--output", "-o")
    common(sub.add_parser("nondualizable", help="search the minor poset for obstructions"),
           max_n=True, ego=False)
    return parser


COMMANDS = {
    "dualize": cmd_dualize,
    "simclasses": cmd_simclasses,
    "minorseq": cmd_minorseq,
    "poset": cmd_poset,
    "oracle": cmd_oracle,
    "crosscheck": cmd_crosscheck,
    "golden": cmd_golden,
    "nondualizable": cmd_nondualizable,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        limit = args.limit if args.limit is not None else default_limit()
        return COMMANDS[args.command](args, limit)
    except ParseError as exc:
        print(f"minorkit: {exc}", file=sys.stderr)
        return 2
    except (MinorkitError, ValueError) as exc:
        print(f"minorkit: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
