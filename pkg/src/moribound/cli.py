"""Command-line interface.

Exit codes: 0 for a clean run, 1 when an instance violates an invariant or a
verification fails, 2 for usage or parse errors.  Every command is
deterministic: the same inputs (and seed, where applicable) produce the same
bytes.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .bounds import (
    CustomRule,
    DiagramInstance,
    Theorem12Rule,
    Theorem258Rule,
    diagram_from_json,
    diagram_pipeline,
    lemma14_max_n,
    max_integer_below,
    theorem12_bound,
)
from .core import format_rational, rational
from .generate import make_polytope, make_system
from .polytope import (
    CombinatorialPolytope,
    PolytopeError,
    a02_bound,
    average_faces,
    polytope_from_json,
    polytope_to_json,
)
from .raysystem import (
    RayDivisorSystem,
    RayType,
    SystemFormatError,
    check_lemma227,
    check_normalization,
    system_from_json,
    system_to_json,
    validate,
)
from .realized import RealizedModel, model_from_json
from .structure import (
    ClassificationFailure,
    check_lemma11,
    classify_eset,
    classify_report,
    condition_iii_full,
    check_condition_ii,
    find_esets,
)

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2


# ---------------------------------------------------------------------------
# Instance loading.
# ---------------------------------------------------------------------------


def detect_kind(data: object) -> str:
    if not isinstance(data, dict):
        raise SystemFormatError("instance file must contain a JSON object")
    if "system" in data and "polytope" in data:
        return "diagram"
    if "ray_vectors" in data:
        return "realized"
    if "vertices" in data and "facets" in data:
        return "polytope"
    if "rays" in data and "pairing" in data:
        return "system"
    raise SystemFormatError("unrecognized instance file (unknown key set)")


def _read_json(path: str) -> object:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def _emit(args: argparse.Namespace, payload: dict, text_lines: list[str]) -> None:
    if getattr(args, "format", "text") == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _write_atomic(path: str, content: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(content)
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# check
# ---------------------------------------------------------------------------


def contact_violations(s: RayDivisorSystem) -> list[tuple[str, str]]:
    """Co-facial type II pairs on distinct touching divisors that fail the
    cross-product inequality."""
    if s.faces is None:
        return []
    cofacial: set[tuple[str, str]] = set()
    for face in s.faces:
        for a, b in combinations(sorted(face), 2):
            cofacial.add((a, b))
    bad = []
    for a, b in sorted(cofacial):
        ra, rb = s.ray(a), s.ray(b)
        if ra.type is not RayType.II or rb.type is not RayType.II:
            continue
        if ra.divisor is None or rb.divisor is None or ra.divisor == rb.divisor:
            continue
        if not s.joined(ra.divisor, rb.divisor):
            continue
        if not check_lemma227(s, a, b):
            bad.append((a, b))
    return bad


def _check_system(s: RayDivisorSystem) -> tuple[list[dict], list[str]]:
    violations = [
        {"code": v.code, "subjects": list(v.subjects), "detail": v.detail}
        for v in validate(s)
    ]
    for a, b in contact_violations(s):
        violations.append(
            {
                "code": "contact-product",
                "subjects": [a, b],
                "detail": "cross pairings do not multiply below the self pairings",
            }
        )
    notes = [
        f"non-normalized: {v.code} ({', '.join(v.subjects)})"
        for v in check_normalization(s)
    ]
    return violations, notes


def check_one(path: str) -> dict:
    """Validate one instance file; the result dict always carries
    path/kind/ok plus violations, notes, and a parse error if any."""
    result: dict = {"path": path, "kind": None, "ok": False,
                    "violations": [], "notes": []}
    try:
        data = _read_json(path)
        kind = detect_kind(data)
        result["kind"] = kind
        if kind == "system":
            violations, notes = _check_system(system_from_json(data))
        elif kind == "realized":
            try:
                model = model_from_json(data)
            except SystemFormatError:
                raise
            except ValueError as exc:
                violations, notes = (
                    [{"code": "model-inconsistent", "subjects": [],
                      "detail": str(exc)}],
                    [],
                )
            else:
                violations, notes = _check_system(model.base_system)
        elif kind == "polytope":
            try:
                polytope_from_json(data)
                violations, notes = [], []
            except PolytopeError as exc:
                violations, notes = (
                    [{"code": "polytope-invalid", "subjects": [],
                      "detail": str(exc)}],
                    [],
                )
        else:  # diagram
            inst = diagram_from_json(data)
            violations, notes = _check_system(inst.system)
            try:
                from .bounds import validate_diagram

                validate_diagram(inst)
            except ValueError as exc:
                violations.append(
                    {"code": "correspondence-mismatch", "subjects": [],
                     "detail": str(exc)}
                )
        result["violations"] = violations
        result["notes"] = notes
        result["ok"] = not violations
    except (SystemFormatError, json.JSONDecodeError, OSError, KeyError, TypeError) as exc:
        result["error"] = f"{type(exc).__name__}: {exc}"
    return result


def _check_exit(results: list[dict]) -> int:
    if any("error" in r for r in results):
        return EXIT_USAGE
    if any(not r["ok"] for r in results):
        return EXIT_VIOLATION
    return EXIT_OK


def _check_text(r: dict) -> list[str]:
    if "error" in r:
        return [f"{r['path']}: unreadable ({r['error']})"]
    head = "OK" if r["ok"] else f"{len(r['violations'])} violation(s)"
    lines = [f"{r['path']}: {head} [{r['kind']}]"]
    for v in r["violations"]:
        subjects = ", ".join(v["subjects"])
        lines.append(f"  {v['code']} [{subjects}]: {v['detail']}")
    for note in r["notes"]:
        lines.append(f"  note: {note}")
    return lines


def cmd_check(args: argparse.Namespace) -> int:
    paths: list[str] = []
    for target in args.paths:
        if os.path.isdir(target):
            paths.extend(
                sorted(
                    os.path.join(target, name)
                    for name in os.listdir(target)
                    if name.endswith(".json")
                )
            )
        else:
            paths.append(target)
    if not paths:
        print("no instance files found", file=sys.stderr)
        return EXIT_USAGE
    if args.jobs > 1 and len(paths) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(check_one, paths))
    else:
        results = [check_one(p) for p in paths]
    if args.format == "json":
        payload = results[0] if len(results) == 1 else results
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for r in results:
            for line in _check_text(r):
                print(line)
    return _check_exit(results)


# ---------------------------------------------------------------------------
# classify / esets
# ---------------------------------------------------------------------------


def _load_system_file(path: str) -> RayDivisorSystem:
    data = _read_json(path)
    kind = detect_kind(data)
    if kind == "system":
        return system_from_json(data)
    if kind == "realized":
        return model_from_json(data).base_system
    if kind == "diagram":
        return diagram_from_json(data).system
    raise SystemFormatError(f"{path} holds a {kind}, not a ray-divisor system")


def cmd_classify(args: argparse.Namespace) -> int:
    s = _load_system_file(args.path)
    report = classify_report(s)
    lines = ["components:"]
    for comp in report["components"]:
        lines.append(f"  {comp['type']} [{', '.join(comp['rays'])}]")
    if not report["components"]:
        lines.append("  (none)")
    lines.append("minimal non-extremal sets:")
    for eset in report["esets"]:
        witness = eset["witness"]
        extra = f" witness={witness}" if witness is not None else ""
        lines.append(f"  case {eset['case']} [{', '.join(eset['rays'])}]{extra}")
    if not report["esets"]:
        lines.append("  (none)")
    lines.append("failures:")
    for fail in report["failures"]:
        lines.append(f"  {fail['reason']} [{', '.join(fail['rays'])}]")
    if not report["failures"]:
        lines.append("  (none)")
    lines.append("maximal extremal sets:")
    for ms in report["maximal_sets"]:
        verdict = "pass" if ms["passes_theorem258"] else "fail"
        lines.append(f"  [{', '.join(ms['rays'])}] shape filter: {verdict}")
    if report["e2_pairs"]:
        lines.append("contracting pairs with a small ray:")
        for pair in report["e2_pairs"]:
            lines.append(f"  [{', '.join(sorted(pair))}]")
    _emit(args, report, lines)
    return EXIT_OK


def cmd_esets(args: argparse.Namespace) -> int:
    s = _load_system_file(args.path)
    if s.faces is None:
        print("system has no face structure", file=sys.stderr)
        return EXIT_USAGE
    divisorial = [r.id for r in s.divisorial_rays]
    entries = []
    for eset in find_esets(s, divisorial):
        entry: dict = {"rays": sorted(eset)}
        try:
            etype = classify_eset(s, eset)
            entry["case"] = etype.kind
            entry["witness"] = etype.to_json()
        except ClassificationFailure as fail:
            entry["failure"] = fail.reason
        entry["condition_ii_members"] = check_condition_ii(s, eset)
        full = condition_iii_full(s, eset)
        entry["condition_iii_full"] = (
            None if full is None else [format_rational(c) for c in full]
        )
        if full is not None:
            entry["bipartition_arrows"] = check_lemma11(s, eset)
        entries.append(entry)
    lines = []
    for e in entries:
        if "case" in e:
            head = f"case {e['case']}"
            if e["witness"] is not None:
                head += f" witness={e['witness']}"
        else:
            head = f"unclassifiable ({e['failure']})"
        lines.append(f"[{', '.join(e['rays'])}]: {head}")
        lines.append(
            f"  members-only nonneg combination excluded: {e['condition_ii_members']}"
        )
        if e["condition_iii_full"] is not None:
            lines.append(
                f"  full nef combination: ({', '.join(e['condition_iii_full'])})"
            )
            lines.append(f"  bipartition arrows both ways: {e['bipartition_arrows']}")
        else:
            lines.append("  full nef combination: none")
    if not entries:
        lines = ["no minimal non-extremal sets"]
    _emit(args, {"esets": entries}, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# bound
# ---------------------------------------------------------------------------


def cmd_bound(args: argparse.Namespace) -> int:
    if args.lemma14:
        if args.C is None or args.D is None:
            print("--lemma14 needs --C and --D", file=sys.stderr)
            return EXIT_USAGE
        n = lemma14_max_n(args.C, args.D)
        payload = {
            "C": format_rational(args.C),
            "D": format_rational(args.D),
            "max_n": n,
            "rho_bound": n + 1,
        }
        lines = [
            f"C = {format_rational(args.C)}, D = {format_rational(args.D)}",
            f"max n = {n}",
            f"rho <= {n + 1}",
        ]
        _emit(args, payload, lines)
        return EXIT_OK
    if args.c1 is None or args.c2 is None:
        print("need --c1 and --c2 (or --lemma14 with --C/--D)", file=sys.stderr)
        return EXIT_USAGE
    value = theorem12_bound(args.c1, args.c2)
    cap = max_integer_below(value)
    payload = {
        "C1": format_rational(args.c1),
        "C2": format_rational(args.c2),
        "d": args.d,
        "bound": format_rational(value),
        "max_integer": cap,
        "relative_bound": cap + 1,
    }
    lines = [
        f"C1 = {format_rational(args.c1)}, C2 = {format_rational(args.c2)}, band d = {args.d}",
        f"dim gamma < {format_rational(value)}",
        f"dim N1 - dim alpha <= {cap + 1}",
    ]
    _emit(args, payload, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# polytope-stats
# ---------------------------------------------------------------------------


def cmd_polytope_stats(args: argparse.Namespace) -> int:
    data = _read_json(args.path)
    if detect_kind(data) != "polytope":
        raise SystemFormatError(f"{args.path} is not a polytope file")
    p = polytope_from_json(data)
    fv = p.fvector()
    payload: dict = {
        "dim": p.dim,
        "f_vector": list(fv.counts),
        "simple": p.is_simple,
    }
    lines = [
        f"dim = {p.dim}",
        f"f-vector = ({', '.join(str(c) for c in fv.counts)})",
        f"simple: {'yes' if p.is_simple else 'no'}",
    ]
    if not p.is_simple:
        lines.append("average-face bound skipped: the polytope is not simple")
        payload["bound_checked"] = False
        _emit(args, payload, lines)
        return EXIT_OK
    emp = average_faces(p, 0, 2)
    bnd = a02_bound(p.dim)
    strict = emp < bnd
    payload.update(
        {
            "bound_checked": True,
            "average_vertices_per_2face": format_rational(emp),
            "bound": format_rational(bnd),
            "margin": format_rational(bnd - emp),
            "strict": strict,
        }
    )
    lines += [
        f"average vertices per 2-face = {format_rational(emp)}",
        f"bound = {format_rational(bnd)}",
        f"margin = {format_rational(bnd - emp)}",
        f"strict inequality holds: {'yes' if strict else 'NO'}",
    ]
    _emit(args, payload, lines)
    return EXIT_OK if strict else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# diagram
# ---------------------------------------------------------------------------


def _make_rule(args: argparse.Namespace):
    if args.rule == "theorem12":
        return Theorem12Rule(args.d)
    if args.rule == "theorem258":
        return Theorem258Rule()
    raise ValueError(f"unknown rule {args.rule!r}")


def cmd_diagram(args: argparse.Namespace) -> int:
    data = _read_json(args.path)
    if detect_kind(data) != "diagram":
        raise SystemFormatError(f"{args.path} is not a diagram bundle")
    inst = diagram_from_json(data)
    rule = _make_rule(args)
    try:
        report = diagram_pipeline(inst, args.d, rule)
    except ValueError as exc:
        print(f"correspondence error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    j = report.to_json()
    lines = [
        f"rule: {j.get('rule', args.rule)}",
        f"n = {j['n']}, C = {j['C']}, D = {j['D']}",
        f"vertex sums within budget: {'yes' if report.condition1_holds else 'NO'}",
        f"2-face sums reach floor: {'yes' if report.condition2_holds else 'NO'}",
        f"chain: {j['chain']['lhs']} >= {j['chain']['total']} >= {j['chain']['rhs']}",
    ]
    if report.empirical_c1 is not None:
        lines.append(
            f"empirical C1 = {j['empirical_C1']}, C2 = {j['empirical_C2']}"
        )
    ib = j["implied_bound"]
    lines.append(
        f"implied: rhs(n) = {ib['rhs_for_n']}, strict: "
        f"{'yes' if ib['strict_ok'] else 'NO'}, max admissible n = {ib['max_admissible_n']}"
    )
    if report.replay is not None:
        lines.append(
            "contact-only replay agrees: "
            + ("yes" if j["replay"].get("agrees") else "NO")
        )
    for entry in j.get("eset_audit", []):
        lines.append(
            f"set [{', '.join(entry['rays'])}]: diameter {entry['diameter']}"
            f" {'ok' if entry['ok'] else 'EXCEEDS BAND'}"
        )
    for cx in j.get("counterexamples", []):
        parts = ", ".join(f"{k}={v}" for k, v in sorted(cx.items()) if k != "kind")
        lines.append(f"counterexample: {cx['kind']} ({parts})")
    conforming = bool(report.conforming)
    lines.append(f"conforming: {'yes' if conforming else 'NO'}")
    _emit(args, j, lines)
    return EXIT_OK if conforming else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

POLYTOPE_FAMILIES = ("simplex", "cube", "cyclic-dual", "product")
SYSTEM_FAMILIES = ("c2", "cm", "d2", "b2", "eset-a", "eset-d", "random-valid")


def cmd_gen(args: argparse.Namespace) -> int:
    if args.family in POLYTOPE_FAMILIES:
        p = make_polytope(args.family, n=args.n, m=args.m)
        payload = polytope_to_json(p)
    else:
        s, rejections = make_system(
            args.family, seed=args.seed, m=args.m if args.m is not None else 3,
            k=args.k,
        )
        payload = system_to_json(s)
        if args.family == "random-valid":
            print(f"rejections before a valid draw: {rejections}", file=sys.stderr)
    content = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        _write_atomic(args.out, content)
    else:
        sys.stdout.write(content)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser.
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moribound",
        description="Face-dimension bounds for contraction-ray systems: "
        "validation, classification, and weighted-angle verification.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("text", "json"), default="text")

    p_check = sub.add_parser("check", help="validate instance files")
    p_check.add_argument("paths", nargs="+", metavar="PATH",
                         help="instance files or directories of .json files")
    p_check.add_argument("--jobs", type=int, default=1)
    add_format(p_check)
    p_check.set_defaults(func=cmd_check)

    p_classify = sub.add_parser("classify", help="component and E-set report")
    p_classify.add_argument("path")
    add_format(p_classify)
    p_classify.set_defaults(func=cmd_classify)

    p_esets = sub.add_parser("esets", help="minimal non-extremal sets")
    p_esets.add_argument("path")
    add_format(p_esets)
    p_esets.set_defaults(func=cmd_esets)

    p_bound = sub.add_parser("bound", help="closed-form dimension bounds")
    p_bound.add_argument("--d", type=int, default=2, help="distance band width")
    p_bound.add_argument("--c1", type=rational, default=None)
    p_bound.add_argument("--c2", type=rational, default=None)
    p_bound.add_argument("--lemma14", action="store_true",
                         help="vertex-budget mode: max n from (C, D)")
    p_bound.add_argument("--C", type=rational, default=None)
    p_bound.add_argument("--D", type=rational, default=None)
    add_format(p_bound)
    p_bound.set_defaults(func=cmd_bound)

    p_stats = sub.add_parser("polytope-stats", help="f-vector and face averages")
    p_stats.add_argument("path")
    add_format(p_stats)
    p_stats.set_defaults(func=cmd_polytope_stats)

    p_diagram = sub.add_parser("diagram", help="weighted-angle verification")
    p_diagram.add_argument("path")
    p_diagram.add_argument("--d", type=int, default=2)
    p_diagram.add_argument("--rule", choices=("theorem12", "theorem258"),
                           default="theorem12")
    add_format(p_diagram)
    p_diagram.set_defaults(func=cmd_diagram)

    p_gen = sub.add_parser("gen", help="generate instance files")
    p_gen.add_argument("--family", required=True,
                       choices=POLYTOPE_FAMILIES + SYSTEM_FAMILIES)
    p_gen.add_argument("--n", type=int, default=3)
    p_gen.add_argument("--m", type=int, default=None)
    p_gen.add_argument("--k", type=int, default=3)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--out", default=None)
    p_gen.set_defaults(func=cmd_gen)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SystemFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PolytopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


def run() -> None:  # console-script entry point
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
