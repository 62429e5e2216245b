"""The principle catalog and the connexivity classifier."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any

from .formula import Formula, connectives, parse_schema
from .matrix import MatrixLogic
from .semantics import (
    Counterexample,
    rule_preserves_designation,
    schema_satisfiable,
    schema_valid,
    schemata_co_satisfiable,
)

__all__ = [
    "VALIDITY",
    "UNSAT",
    "CO_UNSAT",
    "RULE",
    "Principle",
    "Verdict",
    "ConnexivityReport",
    "catalog",
    "get",
    "check_principle",
    "check_all",
    "classify",
]

VALIDITY = "validity"
UNSAT = "unsat"
CO_UNSAT = "co_unsat"
RULE = "rule"

HOLDS = "holds"
FAILS = "fails"
NOT_APPLICABLE = "not-applicable"


@dataclass(frozen=True)
class Principle:
    """A catalog entry.

    ``payload`` holds the schemata. For rules the last schema is the
    conclusion and the rest are premises. ``structural`` marks SUB, which
    has no premise/conclusion schemata and holds in every matrix.
    """

    id: str
    kind: str
    payload: tuple[Formula, ...]
    name: str
    source: str
    structural: bool = False

    @property
    def schema(self) -> Formula:
        if len(self.payload) != 1:
            raise ValueError(f"principle {self.id} has {len(self.payload)} schemata")
        return self.payload[0]

    @property
    def premises(self) -> tuple[Formula, ...]:
        return self.payload[:-1]

    @property
    def conclusion(self) -> Formula:
        return self.payload[-1]

    @property
    def needs(self) -> frozenset[str]:
        out: set[str] = set()
        for s in self.payload:
            out |= connectives(s)
        return frozenset(out)


# id, kind, schemata, display name, family
_ENTRIES: list[tuple[str, str, tuple[str, ...], str, str]] = [
    ("AT1", VALIDITY, ("~(A -> ~A)",), "Aristotle's thesis 1", "connexive"),
    ("AT2", VALIDITY, ("~(~A -> A)",), "Aristotle's thesis 2", "connexive"),
    ("BT1", VALIDITY, ("(A -> B) -> ~(A -> ~B)",), "Boethius' thesis 1", "connexive"),
    ("BT2", VALIDITY, ("(A -> ~B) -> ~(A -> B)",), "Boethius' thesis 2", "connexive"),
    ("UNSAT1", UNSAT, ("A -> ~A", "~A -> A"), "UnSat1", "strong connexivity"),
    ("UNSAT2", CO_UNSAT, ("A -> B", "A -> ~B"), "UnSat2", "strong connexivity"),
    ("UNSAT3", CO_UNSAT, ("A -> B", "~A -> B"), "UnSat3", "strong connexivity"),
    ("SA1", VALIDITY, ("(A -> ~A) -> B",), "Super-Aristotle 1", "superconnexive"),
    ("SA2", VALIDITY, ("(~A -> A) -> B",), "Super-Aristotle 2", "superconnexive"),
    ("SB1", VALIDITY, ("(A -> B) -> ((A -> ~B) -> C)",), "Super-Boethius 1", "superconnexive"),
    ("SB2", VALIDITY, ("(A -> ~B) -> ((A -> B) -> C)",), "Super-Boethius 2", "superconnexive"),
    ("S_BOT_A1", VALIDITY, ("(A -> ~A) -> bot",), "Super-Bot-Aristotle 1", "super-bot"),
    ("S_BOT_A2", VALIDITY, ("(~A -> A) -> bot",), "Super-Bot-Aristotle 2", "super-bot"),
    ("S_BOT_B1", VALIDITY, ("(A -> B) -> ((A -> ~B) -> bot)",), "Super-Bot-Boethius 1", "super-bot"),
    ("S_BOT_B2", VALIDITY, ("(A -> ~B) -> ((A -> B) -> bot)",), "Super-Bot-Boethius 2", "super-bot"),
    ("ABELARD", VALIDITY, ("~((A -> B) & (A -> ~B))",), "Abelard's thesis", "connexive"),
    ("ARISTOTLE2", VALIDITY, ("~((A -> B) & (~A -> B))",), "Aristotle's second thesis", "connexive"),
    ("SUPER_ABELARD", VALIDITY, ("(A -> B) & (A -> ~B) -> C",), "Super-Abelard", "superconnexive"),
    ("SUPER_ARISTOTLE2", VALIDITY, ("(A -> B) & (~A -> B) -> C",), "Super-Aristotle 2nd", "superconnexive"),
    ("S_BOT_ABELARD", VALIDITY, ("(A -> B) & (A -> ~B) -> bot",), "Super-Bot-Abelard", "super-bot"),
    ("S_BOT_ARISTOTLE2", VALIDITY, ("(A -> B) & (~A -> B) -> bot",), "Super-Bot-Aristotle 2nd", "super-bot"),
    (
        "COND_SUPER_ARISTOTLE2",
        VALIDITY,
        ("(A -> B) -> ((~A -> B) -> C)",),
        "conditionalized Super-Aristotle 2nd",
        "superconnexive",
    ),
    (
        "COND_S_BOT_ARISTOTLE2",
        VALIDITY,
        ("(A -> B) -> ((~A -> B) -> bot)",),
        "conditionalized Super-Bot-Aristotle 2nd",
        "super-bot",
    ),
    ("ECQ_AND", VALIDITY, ("A & ~A -> B",), "ex contradictione quodlibet (conjunctive)", "explosion"),
    ("ECQ_ARROW", VALIDITY, ("A -> ~A -> B",), "ex contradictione quodlibet (arrow)", "explosion"),
    ("ECF_AND", VALIDITY, ("A & ~A -> bot",), "ex contradictione falsum (conjunctive)", "explosion"),
    ("ECF_ARROW", VALIDITY, ("A -> ~A -> bot",), "ex contradictione falsum (arrow)", "explosion"),
    ("EFQ", VALIDITY, ("bot -> A",), "ex falso quodlibet", "explosion"),
    ("WEAKENING", VALIDITY, ("A -> B -> A",), "Weakening", "auxiliary"),
    ("PEIRCE", VALIDITY, ("((A -> B) -> A) -> A",), "Peirce's law", "auxiliary"),
    ("DNE", VALIDITY, ("~~A -> A",), "double negation elimination", "auxiliary"),
    ("DNI", VALIDITY, ("A -> ~~A",), "double negation introduction", "auxiliary"),
    ("EXPORTATION", VALIDITY, ("(A & B -> C) -> A -> B -> C",), "Exportation", "auxiliary"),
    ("A_TO_TOP", VALIDITY, ("A -> top",), "A -> top", "auxiliary"),
    ("NEG_TOP_TO_A", VALIDITY, ("~top -> A",), "~top -> A", "auxiliary"),
    ("A_TO_NEG_BOT", VALIDITY, ("A -> ~bot",), "A -> ~bot", "auxiliary"),
    ("NEG_BOT", VALIDITY, ("~bot",), "~bot", "auxiliary"),
    ("CONJ_ELIM1", VALIDITY, ("A & B -> A",), "conjunction elimination (left)", "auxiliary"),
    ("CONJ_ELIM2", VALIDITY, ("A & B -> B",), "conjunction elimination (right)", "auxiliary"),
    ("DISJ_INTRO1", VALIDITY, ("A -> A | B",), "disjunction introduction (left)", "auxiliary"),
    ("DISJ_INTRO2", VALIDITY, ("B -> A | B",), "disjunction introduction (right)", "auxiliary"),
    ("MP", RULE, ("A", "A -> B", "B"), "modus ponens", "rule"),
    ("SUB", RULE, (), "uniform substitution", "rule"),
    ("ADJ", RULE, ("A", "B", "A & B"), "Adjunction", "rule"),
    ("TRANS", RULE, ("A -> B", "B -> C", "A -> C"), "Transitivity", "rule"),
    ("CONTRA", RULE, ("A -> B", "~B -> ~A"), "Contraposition", "rule"),
    ("BT1_RULE", RULE, ("A -> B", "~(A -> ~B)"), "Boethius 1, rule form", "connexive"),
    ("BT2_RULE", RULE, ("A -> ~B", "~(A -> B)"), "Boethius 2, rule form", "connexive"),
]


@lru_cache(maxsize=None)
def _catalog() -> tuple[Principle, ...]:
    out = []
    for pid, kind, schemata, name, source in _ENTRIES:
        out.append(
            Principle(
                id=pid,
                kind=kind,
                payload=tuple(parse_schema(s) for s in schemata),
                name=name,
                source=source,
                structural=(pid == "SUB"),
            )
        )
    return tuple(out)


def catalog() -> list[Principle]:
    return list(_catalog())


@lru_cache(maxsize=None)
def _index() -> dict[str, Principle]:
    return {p.id: p for p in _catalog()}


def get(pid: str) -> Principle:
    try:
        return _index()[pid]
    except KeyError:
        raise KeyError(f"unknown principle {pid!r}") from None


@dataclass(frozen=True)
class Verdict:
    principle: str
    kind: str
    status: str
    counterexample: Counterexample | None = None
    witness: Counterexample | None = None
    admissible: bool | None = None
    missing: tuple[str, ...] = ()

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def to_json(self, m: MatrixLogic) -> dict[str, Any]:
        out: dict[str, Any] = {"verdict": self.status, "kind": self.kind}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample.labelled(m)
        if self.witness is not None:
            out["witness"] = self.witness.labelled(m)
        if self.admissible is not None:
            out["admissible"] = self.admissible
        if self.missing:
            out["missing"] = list(self.missing)
        return out


def check_principle(m: MatrixLogic, p: Principle | str) -> Verdict:
    if isinstance(p, str):
        p = get(p)
    missing = tuple(sorted(p.needs - m.signature))
    if missing:
        return Verdict(p.id, p.kind, NOT_APPLICABLE, missing=missing)
    if p.kind == VALIDITY:
        out = schema_valid(m, p.schema)
        return Verdict(p.id, p.kind, HOLDS if out else FAILS, counterexample=out.evidence)
    if p.kind == UNSAT:
        for s in p.payload:
            out = schema_satisfiable(m, s)
            if out:
                return Verdict(p.id, p.kind, FAILS, witness=out.evidence)
        return Verdict(p.id, p.kind, HOLDS)
    if p.kind == CO_UNSAT:
        out = schemata_co_satisfiable(m, p.payload)
        if out:
            return Verdict(p.id, p.kind, FAILS, witness=out.evidence)
        return Verdict(p.id, p.kind, HOLDS)
    if p.structural:
        # matrix validity is closed under uniform substitution
        return Verdict(p.id, p.kind, HOLDS, admissible=True)
    rule = rule_preserves_designation(m, p.premises, p.conclusion)
    return Verdict(
        p.id,
        p.kind,
        HOLDS if rule.preserving else FAILS,
        counterexample=rule.counterexample,
        admissible=rule.admissible,
    )


def check_all(m: MatrixLogic, ids=None) -> dict[str, Verdict]:
    principles = catalog() if ids is None else [get(i) for i in ids]
    return {p.id: check_principle(m, p) for p in principles}


WEAK_IDS = ("AT1", "AT2", "BT1", "BT2")
STRONG_EXTRA_IDS = ("UNSAT1", "UNSAT2")
SUPER_BOT_IDS = ("S_BOT_A1", "S_BOT_A2", "S_BOT_B1", "S_BOT_B2")
SUPER_IDS = ("SA1", "SA2", "SB1", "SB2")


@dataclass(frozen=True)
class ConnexivityReport:
    logic: str
    verdicts: dict[str, Verdict] = field(repr=False)
    weakly_connexive: bool
    strongly_connexive: bool
    super_bot_connexive: bool
    super_connexive: bool
    super_bot_without_at_bt: bool

    @classmethod
    def from_verdicts(cls, m: MatrixLogic, verdicts: dict[str, Verdict]) -> "ConnexivityReport":
        def all_hold(ids):
            return all(verdicts[i].holds for i in ids)

        weak = all_hold(WEAK_IDS)
        strong = weak and all_hold(STRONG_EXTRA_IDS)
        bot_ok = m.bot is not None and m.bot not in m.designated
        super_bot = bot_ok and all_hold(SUPER_BOT_IDS)
        return cls(
            logic=m.name,
            verdicts=verdicts,
            weakly_connexive=weak,
            strongly_connexive=strong,
            super_bot_connexive=super_bot,
            super_connexive=strong and all_hold(SUPER_IDS),
            super_bot_without_at_bt=super_bot and not weak,
        )

    @property
    def labels(self) -> dict[str, bool]:
        return {
            "weakly_connexive": self.weakly_connexive,
            "strongly_connexive": self.strongly_connexive,
            "super_bot_connexive": self.super_bot_connexive,
            "super_connexive": self.super_connexive,
            "super_bot_without_at_bt": self.super_bot_without_at_bt,
        }

    def to_json(self, m: MatrixLogic) -> dict[str, Any]:
        return {
            "logic": self.logic,
            "labels": self.labels,
            "principles": {pid: v.to_json(m) for pid, v in self.verdicts.items()},
        }


def classify(m: MatrixLogic) -> ConnexivityReport:
    return ConnexivityReport.from_verdicts(m, check_all(m))
