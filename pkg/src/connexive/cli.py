"""Command-line front end.

Exit codes: 0 success, 1 check or verification failed, 2 usage error,
3 input parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path
from typing import Any, Sequence

from . import hilbert, principles
from .formula import ParseError, atoms, parse, render
from .matrix import BUILTIN_NAMES, CONNECTIVES, LogicError, MatrixLogic, builtin, load_logic, save_logic
from .search import SearchError, SearchSpec, effective_signature, raw_count, result_to_json, search, spec_from_json
from .semantics import evaluate

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_PARSE = 3

FULL_SEARCH_CEILING = 4


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _emit(args, payload: Any, text: str) -> None:
    if args.format == "json":
        json.dump(payload, sys.stdout, indent=2, ensure_ascii=False)
        sys.stdout.write("\n")
    else:
        sys.stdout.write(text.rstrip("\n") + "\n")


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise CliError(f"no such file: {path}", EXIT_USAGE) from None
    except json.JSONDecodeError as exc:
        raise CliError(f"{path}: invalid JSON: {exc}", EXIT_PARSE) from None


def resolve_logic(source: str) -> MatrixLogic:
    """A builtin by bare name, or a Logic JSON file (the path needs an extension)."""
    if source in BUILTIN_NAMES:
        return builtin(source)
    if not Path(source).suffix:
        raise CliError(
            f"unknown logic {source!r}; builtins: {', '.join(BUILTIN_NAMES)} (file paths need an extension)",
            EXIT_USAGE,
        )
    doc = _read_json(source)
    try:
        return load_logic(doc)
    except LogicError as exc:
        raise CliError(f"{source}: {exc}", EXIT_PARSE) from None


def _parse_formula(text: str, mode: str = "formula"):
    try:
        return parse(text, mode=mode)
    except ParseError as exc:
        pointer = " " * exc.position + "^"
        raise CliError(f"parse error: {exc}\n  {text}\n  {pointer}", EXIT_PARSE) from None


def parse_assignment(text: str, m: MatrixLogic) -> dict[str, int]:
    out: dict[str, int] = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        name, sep, label = part.partition("=")
        if not sep or not name.strip():
            raise CliError(f"bad assignment item {part!r}; expected name=value", EXIT_USAGE)
        try:
            out[name.strip()] = m.value(label.strip())
        except LogicError as exc:
            raise CliError(str(exc), EXIT_USAGE) from None
    return out


def format_matrix(m: MatrixLogic) -> str:
    lab = m.labels
    width = max(len(x) for x in lab)
    cell = lambda s: s.rjust(width)  # noqa: E731
    lines = [
        f"logic {m.name}: values {' '.join(lab)}; designated {' '.join(lab[v] for v in sorted(m.designated))}"
    ]
    consts = [f"{c} = {lab[getattr(m, c)]}" for c in ("bot", "top") if getattr(m, c) is not None]
    if consts:
        lines.append("  " + ", ".join(consts))
    if m.neg is not None:
        lines.append("  ~  | " + " ".join(cell(x) for x in lab))
        lines.append("     | " + " ".join(cell(lab[v]) for v in m.neg))
    symbols = {"and": "&", "or": "|", "imp": "->"}
    for conn in CONNECTIVES[1:]:
        table = m.table(conn)
        if table is None:
            continue
        lines.append(f"  {symbols[conn]:<3}| " + " ".join(cell(x) for x in lab))
        for a, row in enumerate(table):
            lines.append(f"  {cell(lab[a]):<3}| " + " ".join(cell(lab[v]) for v in row))
    return "\n".join(lines)


# ---------------------------------------------------------------- commands

def cmd_eval(args) -> int:
    m = resolve_logic(args.logic)
    f = _parse_formula(args.formula)
    a = parse_assignment(args.assign, m)
    missing = sorted(set(atoms(f)) - set(a))
    if missing:
        raise CliError(f"no value assigned to {', '.join(missing)}", EXIT_USAGE)
    try:
        v = evaluate(m, f, a)
    except LogicError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    designated = m.is_designated(v)
    payload = {
        "logic": m.name,
        "formula": render(f),
        "assignment": {k: m.label(x) for k, x in sorted(a.items())},
        "value": m.label(v),
        "designated": designated,
    }
    text = f"{render(f)} = {m.label(v)} ({'designated' if designated else 'undesignated'})"
    _emit(args, payload, text)
    return EXIT_OK


def _verdict_line(pid: str, v: principles.Verdict, m: MatrixLogic) -> str:
    line = f"{pid}: {v.status}"
    ev = v.counterexample if v.counterexample is not None else v.witness
    if ev is not None and not v.holds:
        label = "counterexample" if v.counterexample is not None else "witness"
        assignment = ", ".join(f"{k}={m.label(x)}" for k, x in ev.assignment.items()) or "(no variables)"
        values = "; ".join(f"{f} = {m.label(x)}" for f, x in ev.values)
        line += f"  {label}: {assignment}  [{values}]"
    if v.missing:
        line += f"  (missing {', '.join(v.missing)})"
    return line


def cmd_check(args) -> int:
    m = resolve_logic(args.logic)
    if args.all:
        ids = [p.id for p in principles.catalog()]
    elif args.principle:
        ids = args.principle
    else:
        raise CliError("check needs --principle ID or --all", EXIT_USAGE)
    try:
        verdicts = principles.check_all(m, ids)
    except KeyError as exc:
        raise CliError(f"unknown principle {exc.args[0]!r}", EXIT_USAGE) from None
    payload = {"logic": m.name, "principles": {pid: v.to_json(m) for pid, v in verdicts.items()}}
    text = "\n".join(_verdict_line(pid, v, m) for pid, v in verdicts.items())
    _emit(args, payload, text)
    return EXIT_OK if all(v.holds for v in verdicts.values()) else EXIT_FAILED


def cmd_classify(args) -> int:
    m = resolve_logic(args.logic)
    report = principles.classify(m)
    mark = lambda b: "yes" if b else "no"  # noqa: E731
    lines = [f"{name}: {mark(flag)}" for name, flag in report.labels.items()]
    lines.append("")
    lines += [_verdict_line(pid, v, m) for pid, v in report.verdicts.items()]
    _emit(args, report.to_json(m), "\n".join(lines))
    return EXIT_OK


def _soundness_json(s: hilbert.SoundnessReport) -> dict[str, Any]:
    return {"applicable": s.applicable, "ok": s.ok, "reason": s.reason, "line_ok": list(s.line_ok)}


def cmd_verify(args) -> int:
    against = resolve_logic(args.against) if args.against else None
    if args.corpus:
        if args.path:
            raise CliError("give proof paths or --corpus, not both", EXIT_USAGE)
        docs = [(d.name, d) for d in hilbert.corpus()]
    elif args.path:
        docs = []
        for path in args.path:
            doc = _read_json(path)
            try:
                docs.append((path, hilbert.proof_from_json(doc)))
            except hilbert.ProofError as exc:
                raise CliError(f"{path}: {exc}", EXIT_PARSE) from None
    else:
        raise CliError("verify needs a proof path or --corpus", EXIT_USAGE)

    reports = []
    lines = []
    ok = True
    for _, proof in docs:
        rep = hilbert.verify_proof(proof)
        entry = rep.to_json()
        lines.append(rep.summary())
        ok = ok and rep.accepted
        if against is not None:
            snd = hilbert.soundness_check(proof, against)
            entry["soundness"] = _soundness_json(snd)
            if snd.applicable:
                lines.append(f"  soundness in {against.name}: {'ok' if snd.ok else 'FAILED'}")
                ok = ok and snd.ok
            else:
                lines.append(f"  soundness in {against.name}: not applicable ({snd.reason})")
        reports.append(entry)
    accepted = sum(r["accepted"] for r in reports)
    lines.append(f"{accepted}/{len(reports)} accepted")
    if len(reports) == 1 and not args.corpus:
        payload = reports[0]
    else:
        payload = {"checked": len(reports), "accepted": accepted, "reports": reports}
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAILED


def _split(values: Sequence[str] | None) -> list[str]:
    out: list[str] = []
    for v in values or ():
        out += [x.strip() for x in v.split(",") if x.strip()]
    return out


def _spec_from_args(args) -> SearchSpec:
    if args.spec:
        try:
            spec = spec_from_json(_read_json(args.spec))
        except SearchError as exc:
            raise CliError(f"{args.spec}: {exc}", EXIT_PARSE) from None
        if args.limit is not None:
            spec = replace(spec, limit=args.limit)
        return spec
    if args.values is None:
        raise CliError("search needs --values N or --spec FILE", EXIT_USAGE)
    n = args.values
    fixed: dict[str, Any] = {}
    labels = None
    for item in args.fix or ():
        conn, sep, source = item.partition("=")
        if not sep:
            raise CliError(f"bad --fix {item!r}; expected conn=LOGIC", EXIT_USAGE)
        m = resolve_logic(source)
        if m.n != n:
            raise CliError(f"--fix {item}: {m.name} has {m.n} values, search has {n}", EXIT_USAGE)
        table = m.table(conn)
        if table is None:
            raise CliError(f"--fix {item}: {m.name} has no {conn} table", EXIT_USAGE)
        fixed[conn] = table
        labels = labels or m.labels
    labels = labels or tuple(str(i) for i in range(n))
    designated = None
    if args.designated:
        try:
            designated = tuple(
                frozenset(labels.index(x.strip()) for x in opt.split(",")) for opt in args.designated
            )
        except ValueError:
            raise CliError(f"--designated uses labels outside {', '.join(labels)}", EXIT_USAGE) from None
    signature = frozenset(_split(args.signature)) if args.signature else None
    return SearchSpec(
        values=n,
        signature=signature,
        designated_options=designated,
        require_valid=tuple(_split(args.require_valid)),
        require_invalid=tuple(_split(args.require_invalid)),
        require_unsat=tuple(args.require_unsat or ()),
        require_sat=tuple(args.require_sat or ()),
        require_rules_preserving=tuple(_split(args.require_rule)),
        bot_undesignated=not args.allow_designated_bot,
        dedupe_isomorphic=args.dedupe,
        limit=args.limit,
        fixed_tables=fixed,
        labels=labels,
        prune=not args.no_prune,
    )


def cmd_search(args) -> int:
    spec = _spec_from_args(args)
    try:
        size = raw_count(spec)
    except SearchError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    binary = effective_signature(spec) & {"and", "or", "imp"}
    if spec.values >= FULL_SEARCH_CEILING and binary and not spec.fixed_tables and not args.force:
        raise CliError(
            f"refusing an unpinned search over {spec.values} values: the raw space has {size} matrices. "
            "Pin tables with --fix (for example --fix neg=cc1_bot --fix and=cc1_bot) "
            "or pass --force to run it anyway.",
            EXIT_USAGE,
        )
    result = search(spec, jobs=args.jobs)
    lines = [format_matrix(m) for m in result.matrices]
    st = result.stats()
    summary = (
        f"found {st['found']} matrices; enumerated {st['enumerated']}, pruned {st['pruned']}"
        f"{' (truncated at limit)' if st['truncated'] else ''}; {st['elapsed_seconds']:.3f}s"
    )
    if not result.matrices:
        summary += f"\nno matrix with {spec.values} values meets the constraints (a small-model fact, not a proof about other sizes)"
    lines.append(summary)
    _emit(args, result_to_json(result), "\n\n".join(lines))
    return EXIT_OK


def cmd_list_principles(args) -> int:
    rows = []
    for p in principles.catalog():
        rows.append(
            {
                "id": p.id,
                "kind": p.kind,
                "name": p.name,
                "schemata": [render(s) for s in p.payload],
                "needs": sorted(p.needs),
            }
        )
    text = "\n".join(f"{r['id']:<24} {r['kind']:<9} {' ; '.join(r['schemata']) or '(structural)'}" for r in rows)
    _emit(args, rows, text)
    return EXIT_OK


def cmd_list_logics(args) -> int:
    docs = [save_logic(builtin(name)) for name in BUILTIN_NAMES]
    text = "\n".join(
        f"{d['name']:<18} values {' '.join(d['values'])}; designated {' '.join(d['designated'])}; "
        f"tables {', '.join(d['tables'])}" for d in docs
    )
    _emit(args, docs, text)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")

    parser = argparse.ArgumentParser(prog="connexive", description="Finite-matrix connexive logic workbench.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a formula under an assignment")
    p.add_argument("--logic", required=True)
    p.add_argument("--formula", required=True)
    p.add_argument("--assign", default="", help="e.g. p=3,q=1 using display labels")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("check", parents=[common], help="check catalog principles")
    p.add_argument("--logic", required=True)
    p.add_argument("--principle", action="append", metavar="ID")
    p.add_argument("--all", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("classify", parents=[common], help="connexivity report")
    p.add_argument("--logic", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", parents=[common], help="verify Hilbert-style proofs")
    p.add_argument("path", nargs="*")
    p.add_argument("--corpus", action="store_true", help="replay the shipped proof corpus")
    p.add_argument("--against", metavar="LOGIC", help="also cross-check soundness in a matrix")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser(
        "search",
        parents=[common],
        help="search small matrices",
        description=(
            "Enumerate matrices and keep those meeting the constraints. "
            f"Searches over {FULL_SEARCH_CEILING} or more values with a binary connective are refused "
            "unless some table is pinned with --fix or --force is given."
        ),
    )
    p.add_argument("--spec", metavar="FILE", help="search spec as JSON")
    p.add_argument("--values", type=int)
    p.add_argument("--signature", action="append", help="comma list from neg,and,or,imp,bot,top")
    p.add_argument("--designated", action="append", metavar="LABELS", help="candidate designated set, e.g. 1,2")
    p.add_argument("--require-valid", action="append", metavar="ID|SCHEMA")
    p.add_argument("--require-invalid", action="append", metavar="ID|SCHEMA")
    p.add_argument("--require-unsat", action="append", metavar="SCHEMA")
    p.add_argument("--require-sat", action="append", metavar="SCHEMA")
    p.add_argument("--require-rule", action="append", metavar="RULE")
    p.add_argument("--bot-undesignated", action="store_true", help="the default; kept for explicitness")
    p.add_argument("--allow-designated-bot", action="store_true")
    p.add_argument("--dedupe", dest="dedupe", action="store_true", default=None)
    p.add_argument("--no-dedupe", dest="dedupe", action="store_false")
    p.add_argument("--limit", type=int)
    p.add_argument("--fix", action="append", metavar="CONN=LOGIC", help="pin a table from a logic")
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--force", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("list-principles", parents=[common], help="show the principle catalog")
    p.set_defaults(func=cmd_list_principles)
    p = sub.add_parser("list-logics", parents=[common], help="show builtin logics")
    p.set_defaults(func=cmd_list_logics)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except SearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
