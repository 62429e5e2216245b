"""Hilbert-style proof documents, their verifier, and the bundled corpus.

Axioms are catalog schemata instantiated at the point of use, so uniform
substitution into axioms needs no separate rule. An explicit ``sub`` step
(substitute into any earlier line) is available when a system lists SUB.

Line references are 1-based, as in printed derivations. An ``mp`` step
with references ``[m1, ..., mk, major]`` detaches the minors one after the
other: the major premise must read ``m1 -> (m2 -> ... (mk -> line))``. The
binary case ``[i, j]`` is ordinary modus ponens with line ``j`` the
conditional.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterator, Mapping, Sequence

from . import principles
from .formula import (
    Conjunction,
    Formula,
    Implication,
    Metavariable,
    Negation,
    ParseError,
    match_schema,
    metavariables,
    parse_schema,
    render,
    substitute,
)
from .matrix import MatrixLogic
from .semantics import entails, schema_valid

__all__ = [
    "ProofError",
    "RULE_IDS",
    "KINDS",
    "SystemSpec",
    "Justification",
    "ProofLine",
    "ProofDocument",
    "LineVerdict",
    "VerificationReport",
    "ReplaySummary",
    "load_proof",
    "dump_proof",
    "verify_proof",
    "corpus",
    "corpus_manifest",
    "replay_all",
    "mutants",
    "mutation_sweep",
    "soundness_check",
]

RULE_IDS = ("MP", "ADJ", "TRANS", "CONTRA", "SUB")
KINDS = ("axiom", "hyp", "mp", "adj", "trans", "contra", "sub")
_KIND_RULE = {"mp": "MP", "adj": "ADJ", "trans": "TRANS", "contra": "CONTRA", "sub": "SUB"}


class ProofError(ValueError):
    """A proof document that cannot even be read (bad JSON, bad shape, unparsable schema)."""


@dataclass(frozen=True)
class SystemSpec:
    axioms: tuple[str, ...]
    rules: frozenset[str]
    hypotheses: bool = False


@dataclass(frozen=True)
class Justification:
    kind: str
    axiom_id: str | None = None
    subst: Mapping[str, Formula] | None = None
    refs: tuple[int, ...] = ()

    def describe(self) -> str:
        if self.kind == "axiom":
            return f"axiom {self.axiom_id}"
        if self.kind == "hyp":
            return "hyp"
        return f"{self.kind} {','.join(map(str, self.refs))}"


@dataclass(frozen=True)
class ProofLine:
    schema: Formula
    by: Justification


@dataclass(frozen=True)
class ProofDocument:
    name: str
    system: SystemSpec
    goal: Formula
    lines: tuple[ProofLine, ...]
    premises: tuple[Formula, ...] = ()
    claim: str = ""

    def with_line(self, index: int, by: Justification) -> "ProofDocument":
        """Copy with the justification of 1-based line ``index`` replaced."""
        lines = list(self.lines)
        lines[index - 1] = ProofLine(lines[index - 1].schema, by)
        return ProofDocument(self.name, self.system, self.goal, tuple(lines), self.premises, self.claim)


@dataclass(frozen=True)
class LineVerdict:
    index: int
    ok: bool
    reason: str = ""


@dataclass(frozen=True)
class VerificationReport:
    name: str
    accepted: bool
    lines: tuple[LineVerdict, ...]
    goal_ok: bool
    derives_arbitrary: bool
    error: str = ""

    @property
    def first_failure(self) -> LineVerdict | None:
        return next((lv for lv in self.lines if not lv.ok), None)

    def summary(self) -> str:
        if self.accepted:
            extra = " (derives arbitrary schema)" if self.derives_arbitrary else ""
            return f"{self.name}: accepted, {len(self.lines)} lines{extra}"
        bad = self.first_failure
        if bad is not None:
            return f"{self.name}: rejected at line {bad.index}: {bad.reason}"
        return f"{self.name}: rejected: {self.error}"

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "name": self.name,
            "accepted": self.accepted,
            "goal_ok": self.goal_ok,
            "derives_arbitrary": self.derives_arbitrary,
            "lines": [
                {"index": lv.index, "ok": lv.ok, **({"reason": lv.reason} if lv.reason else {})}
                for lv in self.lines
            ],
        }
        bad = self.first_failure
        if bad is not None:
            out["first_failure"] = {"index": bad.index, "reason": bad.reason}
        if self.error:
            out["error"] = self.error
        return out


# ---------------------------------------------------------------- JSON I/O

def _schema(text: Any, where: str) -> Formula:
    if not isinstance(text, str):
        raise ProofError(f"{where}: expected a schema string")
    try:
        return parse_schema(text)
    except ParseError as exc:
        raise ProofError(f"{where}: {exc}") from exc


def _keys(obj: Any, allowed: set[str], where: str) -> dict:
    if not isinstance(obj, dict):
        raise ProofError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ProofError(f"{where}: unknown key(s) {', '.join(sorted(unknown))}")
    return obj


def proof_from_json(doc: Mapping[str, Any]) -> ProofDocument:
    _keys(doc, {"name", "system", "goal", "lines", "premises", "claim"}, "proof")
    for key in ("name", "system", "goal", "lines"):
        if key not in doc:
            raise ProofError(f"proof: missing {key}")
    system = _keys(doc["system"], {"axioms", "rules", "hypotheses"}, "system")
    axioms = system.get("axioms", [])
    rules = system.get("rules", [])
    if not all(isinstance(a, str) for a in axioms) or not all(isinstance(r, str) for r in rules):
        raise ProofError("system: axioms and rules must be lists of ids")
    spec = SystemSpec(tuple(axioms), frozenset(rules), bool(system.get("hypotheses", False)))
    lines = []
    if not isinstance(doc["lines"], list):
        raise ProofError("proof: lines must be a list")
    for i, raw in enumerate(doc["lines"], start=1):
        raw = _keys(raw, {"schema", "by"}, f"line {i}")
        by = _keys(raw.get("by"), {"kind", "axiom_id", "subst", "refs"}, f"line {i}.by")
        kind = by.get("kind")
        if kind not in KINDS:
            raise ProofError(f"line {i}: unknown justification kind {kind!r}")
        subst = by.get("subst")
        if subst is not None:
            if not isinstance(subst, dict):
                raise ProofError(f"line {i}: subst must be an object")
            subst = {k: _schema(v, f"line {i}.subst.{k}") for k, v in subst.items()}
        refs = by.get("refs", [])
        if not isinstance(refs, list) or not all(isinstance(r, int) for r in refs):
            raise ProofError(f"line {i}: refs must be a list of integers")
        lines.append(
            ProofLine(
                _schema(raw.get("schema"), f"line {i}.schema"),
                Justification(kind, by.get("axiom_id"), subst, tuple(refs)),
            )
        )
    return ProofDocument(
        name=str(doc["name"]),
        system=spec,
        goal=_schema(doc["goal"], "goal"),
        lines=tuple(lines),
        premises=tuple(_schema(p, "premises") for p in doc.get("premises", [])),
        claim=str(doc.get("claim", "")),
    )


def load_proof(source: Mapping[str, Any] | str | Path) -> ProofDocument:
    if isinstance(source, (str, Path)):
        try:
            source = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise ProofError(f"malformed proof file: {exc}") from exc
    return proof_from_json(source)


def dump_proof(p: ProofDocument) -> dict[str, Any]:
    lines = []
    for line in p.lines:
        by: dict[str, Any] = {"kind": line.by.kind}
        if line.by.axiom_id is not None:
            by["axiom_id"] = line.by.axiom_id
        if line.by.subst is not None:
            by["subst"] = {k: render(v) for k, v in line.by.subst.items()}
        if line.by.refs:
            by["refs"] = list(line.by.refs)
        lines.append({"schema": render(line.schema), "by": by})
    out: dict[str, Any] = {
        "name": p.name,
        "system": {
            "axioms": list(p.system.axioms),
            "rules": sorted(p.system.rules),
            "hypotheses": p.system.hypotheses,
        },
        "goal": render(p.goal),
        "lines": lines,
    }
    if p.premises:
        out["premises"] = [render(f) for f in p.premises]
    if p.claim:
        out["claim"] = p.claim
    return out


# ---------------------------------------------------------------- verification

def _system_error(system: SystemSpec) -> str:
    for aid in system.axioms:
        try:
            pr = principles.get(aid)
        except KeyError:
            return f"unknown axiom id {aid}"
        if pr.kind != principles.VALIDITY:
            return f"{aid} is not a validity schema"
    for rid in system.rules:
        if rid not in RULE_IDS:
            return f"unknown rule id {rid}"
    return ""


def check_line(p: ProofDocument, index: int, by: Justification | None = None) -> str:
    """Return an empty string if line ``index`` is justified, else the reason."""
    line = p.lines[index - 1]
    by = line.by if by is None else by
    target = line.schema
    system = p.system

    for r in by.refs:
        if not 1 <= r < index:
            return f"bad reference {r} (must point to an earlier line)"
    rule = _KIND_RULE.get(by.kind)
    if rule is not None and rule not in system.rules:
        return f"rule {rule} not in system"
    ref = [p.lines[r - 1].schema for r in by.refs]

    if by.kind == "axiom":
        if by.axiom_id not in system.axioms:
            return f"axiom {by.axiom_id} not in system"
        schema = principles.get(by.axiom_id).schema
        if by.subst is None:
            if match_schema(schema, target) is None:
                return f"axiom mismatch: {render(target)} is not an instance of {render(schema)}"
            return ""
        extra = set(by.subst) - set(metavariables(schema))
        if extra:
            return f"substitution binds {', '.join(sorted(extra))}, absent from {by.axiom_id}"
        missing = [v for v in metavariables(schema) if v not in by.subst]
        if missing:
            return f"unbound metavariable {missing[0]} in {by.axiom_id}"
        expected = substitute(schema, by.subst)
        if expected != target:
            return f"axiom mismatch: expected {render(expected)}, got {render(target)}"
        return ""

    if by.kind == "hyp":
        if not system.hypotheses:
            return "hypothesis in hypothesis-free system"
        if target not in p.premises:
            return f"hypothesis {render(target)} is not a declared premise"
        return ""

    if by.kind == "mp":
        if len(ref) < 2:
            return "mp needs at least two references"
        current = ref[-1]
        for minor in ref[:-1]:
            if not isinstance(current, Implication) or current.left != minor:
                return f"mp: {render(current)} is not a conditional with antecedent {render(minor)}"
            current = current.right
        if current != target:
            return f"mp yields {render(current)}, not {render(target)}"
        return ""

    if by.kind == "adj":
        if len(ref) != 2:
            return "adj needs two references"
        if target != Conjunction(ref[0], ref[1]):
            return f"adj yields {render(Conjunction(ref[0], ref[1]))}, not {render(target)}"
        return ""

    if by.kind == "trans":
        if len(ref) != 2:
            return "trans needs two references"
        first, second = ref
        if not (isinstance(first, Implication) and isinstance(second, Implication)):
            return "trans needs two conditionals"
        if first.right != second.left:
            return "trans: middle terms differ"
        if target != Implication(first.left, second.right):
            return f"trans yields {render(Implication(first.left, second.right))}, not {render(target)}"
        return ""

    if by.kind == "contra":
        if len(ref) != 1:
            return "contra needs one reference"
        (src,) = ref
        if not isinstance(src, Implication):
            return "contra needs a conditional"
        expected = Implication(Negation(src.right), Negation(src.left))
        if target != expected:
            return f"contra yields {render(expected)}, not {render(target)}"
        return ""

    if by.kind == "sub":
        if len(ref) != 1:
            return "sub needs one reference"
        if by.subst is None:
            return "sub needs a substitution"
        expected = substitute(ref[0], by.subst, partial=True)
        if expected != target:
            return f"sub yields {render(expected)}, not {render(target)}"
        return ""

    return f"unknown justification kind {by.kind!r}"


def verify_proof(p: ProofDocument) -> VerificationReport:
    derives_arbitrary = isinstance(p.goal, Metavariable) and all(
        p.goal.name not in metavariables(h) for h in p.premises
    )
    error = _system_error(p.system)
    if error:
        return VerificationReport(p.name, False, (), False, derives_arbitrary, error)
    if not p.lines:
        return VerificationReport(p.name, False, (), False, derives_arbitrary, "proof has no lines")
    verdicts = []
    for i in range(1, len(p.lines) + 1):
        reason = check_line(p, i)
        verdicts.append(LineVerdict(i, not reason, reason))
    goal_ok = p.lines[-1].schema == p.goal
    accepted = goal_ok and all(v.ok for v in verdicts)
    error = "" if goal_ok else f"final line {render(p.lines[-1].schema)} does not match goal {render(p.goal)}"
    return VerificationReport(p.name, accepted, tuple(verdicts), goal_ok, derives_arbitrary, error)


# ---------------------------------------------------------------- corpus

def _corpus_dir() -> Path:
    return Path(str(resources.files("connexive") / "proofs"))


def corpus_manifest(directory: str | Path | None = None) -> dict[str, Any]:
    directory = _corpus_dir() if directory is None else Path(directory)
    manifest = directory / "manifest.json"
    if manifest.exists():
        return json.loads(manifest.read_text())
    names = sorted(f.stem for f in directory.glob("*.json"))
    return {"documents": names, "meta": []}


def corpus(directory: str | Path | None = None) -> list[ProofDocument]:
    directory = _corpus_dir() if directory is None else Path(directory)
    manifest = corpus_manifest(directory)
    return [load_proof(directory / f"{name}.json") for name in manifest["documents"]]


@dataclass(frozen=True)
class ReplaySummary:
    reports: tuple[VerificationReport, ...]
    errors: tuple[tuple[str, str], ...] = ()

    @property
    def checked(self) -> int:
        return len(self.reports) + len(self.errors)

    @property
    def accepted(self) -> int:
        return sum(r.accepted for r in self.reports)

    @property
    def ok(self) -> bool:
        return self.checked > 0 and self.accepted == self.checked

    def lines(self) -> list[str]:
        out = [r.summary() for r in self.reports]
        out += [f"{name}: unreadable: {msg}" for name, msg in self.errors]
        if self.checked == 0:
            out.append("no proof documents found")
        out.append(f"{self.accepted}/{self.checked} accepted")
        return out


def replay_all(directory: str | Path | None = None) -> ReplaySummary:
    directory = _corpus_dir() if directory is None else Path(directory)
    reports, errors = [], []
    for name in corpus_manifest(directory)["documents"]:
        try:
            doc = load_proof(directory / f"{name}.json")
        except (ProofError, OSError) as exc:
            errors.append((name, str(exc)))
            continue
        reports.append(verify_proof(doc))
    return ReplaySummary(tuple(reports), tuple(errors))


# ---------------------------------------------------------------- mutation sweep

def mutants(p: ProofDocument, max_mp_refs: int = 3) -> Iterator[tuple[int, Justification]]:
    """Every replacement of one line's justification by one of another kind.

    Axiom mutants use schema matching for the substitution, and reference
    mutants range over all earlier lines, so a surviving mutant would mean
    the line genuinely has a second justification.
    """
    for index, line in enumerate(p.lines, start=1):
        earlier = range(1, index)
        for kind in KINDS:
            if kind == line.by.kind:
                continue
            if kind == "axiom":
                for aid in p.system.axioms:
                    yield index, Justification("axiom", aid)
            elif kind == "hyp":
                yield index, Justification("hyp")
            elif kind == "mp":
                for k in range(2, max_mp_refs + 1):
                    for refs in itertools.product(earlier, repeat=k):
                        yield index, Justification("mp", refs=refs)
            elif kind in ("adj", "trans"):
                for refs in itertools.product(earlier, repeat=2):
                    yield index, Justification(kind, refs=refs)
            elif kind == "contra":
                for r in earlier:
                    yield index, Justification("contra", refs=(r,))
            elif kind == "sub":
                for r in earlier:
                    sigma = match_schema(p.lines[r - 1].schema, line.schema) or {}
                    yield index, Justification("sub", subst=sigma, refs=(r,))


@dataclass(frozen=True)
class SweepResult:
    total: int
    rejected: int
    survivors: tuple[tuple[int, Justification], ...] = field(default=())

    @property
    def rate(self) -> float:
        return self.rejected / self.total if self.total else 1.0


def mutation_sweep(p: ProofDocument) -> SweepResult:
    total = rejected = 0
    survivors = []
    for index, by in mutants(p):
        total += 1
        if verify_proof(p.with_line(index, by)).accepted:
            survivors.append((index, by))
        else:
            rejected += 1
    return SweepResult(total, rejected, tuple(survivors))


# ---------------------------------------------------------------- semantics bridge

@dataclass(frozen=True)
class SoundnessReport:
    applicable: bool
    reason: str
    line_ok: tuple[bool, ...] = ()

    @property
    def ok(self) -> bool:
        return self.applicable and all(self.line_ok)


def soundness_check(p: ProofDocument, m: MatrixLogic) -> SoundnessReport:
    """Cross-check a proof against a matrix.

    Applies only when every axiom of the system is valid in ``m`` and every
    rule preserves designation there. Then each line must be valid, or,
    for proofs from premises, entailed by the premises.
    """
    for aid in p.system.axioms:
        if not principles.check_principle(m, aid).holds:
            return SoundnessReport(False, f"axiom {aid} not valid in {m.name}")
    for rid in p.system.rules:
        if not principles.check_principle(m, rid).holds:
            return SoundnessReport(False, f"rule {rid} not designation-preserving in {m.name}")
    if p.premises:
        flags = tuple(entails(m, list(p.premises), line.schema) for line in p.lines)
    else:
        flags = tuple(bool(schema_valid(m, line.schema)) for line in p.lines)
    return SoundnessReport(True, "", flags)
