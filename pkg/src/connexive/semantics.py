"""Matrix evaluation and the semantic checks built on it.

Schema-level checks quantify over assignments of matrix values to the
variables (metavariables and atoms alike) of the schemata involved. Since
an atom can take any value, this covers exactly the closure of the schema
under substitution instances.

Assignments are enumerated lexicographically: variables in sorted name
order, values in declared order. Every reported counterexample or witness
is the first one in that order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .formula import (
    Atom,
    BottomConst,
    Conjunction,
    Disjunction,
    Formula,
    Implication,
    Metavariable,
    Negation,
    TopConst,
    atoms,
    metavariables,
    render,
)
from .matrix import LogicError, MatrixLogic

__all__ = [
    "UndefinedConnective",
    "MissingAssignment",
    "Counterexample",
    "Outcome",
    "RuleOutcome",
    "evaluate",
    "variables",
    "assignments",
    "value_vector",
    "schema_valid",
    "schema_satisfiable",
    "schemata_co_satisfiable",
    "rule_preserves_designation",
    "entails",
]


class UndefinedConnective(LogicError):
    def __init__(self, logic: str, connective: str):
        self.connective = connective
        super().__init__(f"logic {logic} does not define {connective}")


class MissingAssignment(LogicError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"no value assigned to {name}")


@dataclass(frozen=True)
class Counterexample:
    """An assignment plus the values it gives the formulas under test."""

    assignment: dict[str, int]
    values: tuple[tuple[str, int], ...]

    def labelled(self, m: MatrixLogic) -> dict:
        return {
            "assignment": {k: m.label(v) for k, v in self.assignment.items()},
            "values": {f: m.label(v) for f, v in self.values},
        }


@dataclass(frozen=True)
class Outcome:
    """Boolean verdict with the assignment that decided it, if any.

    For validity ``evidence`` is a counterexample on failure; for
    satisfiability it is a witness on success.
    """

    holds: bool
    evidence: Counterexample | None = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class RuleOutcome:
    preserving: bool
    admissible: bool
    counterexample: Counterexample | None = None

    def __bool__(self) -> bool:
        return self.preserving


def evaluate(m: MatrixLogic, f: Formula, a: Mapping[str, int]) -> int:
    """Value of ``f`` in ``m`` under ``a`` (keys are atom/metavariable names)."""
    if isinstance(f, (Atom, Metavariable)):
        try:
            return a[f.name]
        except KeyError:
            raise MissingAssignment(f.name) from None
    if isinstance(f, BottomConst):
        if m.bot is None:
            raise UndefinedConnective(m.name, "bot")
        return m.bot
    if isinstance(f, TopConst):
        if m.top is None:
            raise UndefinedConnective(m.name, "top")
        return m.top
    if isinstance(f, Negation):
        if m.neg is None:
            raise UndefinedConnective(m.name, "neg")
        return m.neg[evaluate(m, f.child, a)]
    conn = {Conjunction: "and", Disjunction: "or", Implication: "imp"}[type(f)]
    table = m.table(conn)
    if table is None:
        raise UndefinedConnective(m.name, conn)
    return table[evaluate(m, f.left, a)][evaluate(m, f.right, a)]


def variables(formulas: Iterable[Formula]) -> list[str]:
    names: set[str] = set()
    for f in formulas:
        names.update(metavariables(f))
        names.update(atoms(f))
    return sorted(names)


def assignments(m: MatrixLogic, names: Sequence[str]) -> list[tuple[int, ...]]:
    return list(itertools.product(m.values, repeat=len(names)))


def value_vector(m: MatrixLogic, f: Formula, env: Mapping[str, Sequence[int]], size: int) -> list[int]:
    """Values of ``f`` across a batch of assignments given column-wise in ``env``."""
    if isinstance(f, (Atom, Metavariable)):
        try:
            return list(env[f.name])
        except KeyError:
            raise MissingAssignment(f.name) from None
    if isinstance(f, BottomConst):
        if m.bot is None:
            raise UndefinedConnective(m.name, "bot")
        return [m.bot] * size
    if isinstance(f, TopConst):
        if m.top is None:
            raise UndefinedConnective(m.name, "top")
        return [m.top] * size
    if isinstance(f, Negation):
        if m.neg is None:
            raise UndefinedConnective(m.name, "neg")
        neg = m.neg
        return [neg[x] for x in value_vector(m, f.child, env, size)]
    conn = {Conjunction: "and", Disjunction: "or", Implication: "imp"}[type(f)]
    table = m.table(conn)
    if table is None:
        raise UndefinedConnective(m.name, conn)
    left = value_vector(m, f.left, env, size)
    right = value_vector(m, f.right, env, size)
    return [table[x][y] for x, y in zip(left, right)]


@dataclass
class _Batch:
    names: list[str]
    rows: list[tuple[int, ...]]
    vectors: list[list[int]] = field(default_factory=list)

    def evidence(self, index: int, formulas: Sequence[Formula]) -> Counterexample:
        return Counterexample(
            assignment=dict(zip(self.names, self.rows[index])),
            values=tuple((render(f), vec[index]) for f, vec in zip(formulas, self.vectors)),
        )


def _batch(m: MatrixLogic, formulas: Sequence[Formula]) -> _Batch:
    names = variables(formulas)
    rows = assignments(m, names)
    env = {name: [row[i] for row in rows] for i, name in enumerate(names)}
    batch = _Batch(names, rows)
    batch.vectors = [value_vector(m, f, env, len(rows)) for f in formulas]
    return batch


def schema_valid(m: MatrixLogic, s: Formula) -> Outcome:
    batch = _batch(m, [s])
    des = m.designated
    for i, v in enumerate(batch.vectors[0]):
        if v not in des:
            return Outcome(False, batch.evidence(i, [s]))
    return Outcome(True)


def schema_satisfiable(m: MatrixLogic, s: Formula) -> Outcome:
    return schemata_co_satisfiable(m, [s])


def schemata_co_satisfiable(m: MatrixLogic, ss: Sequence[Formula]) -> Outcome:
    """Is there one assignment designating every schema in ``ss``?

    Variables with the same name are shared across the list.
    """
    ss = list(ss)
    batch = _batch(m, ss)
    des = m.designated
    for i in range(len(batch.rows)):
        if all(vec[i] in des for vec in batch.vectors):
            return Outcome(True, batch.evidence(i, ss))
    return Outcome(False)


def _first_violation(m: MatrixLogic, premises: Sequence[Formula], conclusion: Formula):
    formulas = [*premises, conclusion]
    batch = _batch(m, formulas)
    des = m.designated
    *prem_vecs, concl_vec = batch.vectors
    for i in range(len(batch.rows)):
        if concl_vec[i] not in des and all(vec[i] in des for vec in prem_vecs):
            return batch.evidence(i, formulas)
    return None


def rule_preserves_designation(
    m: MatrixLogic, premises: Sequence[Formula], conclusion: Formula
) -> RuleOutcome:
    """Local soundness of a rule, plus the weaker schema-level admissibility.

    ``admissible`` only says: if every premise schema is valid, the
    conclusion schema is valid too.
    """
    cex = _first_violation(m, premises, conclusion)
    admissible = not all(schema_valid(m, p) for p in premises) or bool(schema_valid(m, conclusion))
    return RuleOutcome(preserving=cex is None, admissible=admissible, counterexample=cex)


def entails(m: MatrixLogic, premises: Sequence[Formula], conclusion: Formula) -> bool:
    """Every assignment designating all premises designates the conclusion."""
    return _first_violation(m, premises, conclusion) is None
