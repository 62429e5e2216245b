"""Finite matrix logics: the data type, bundled logics, JSON I/O, isomorphism."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

__all__ = [
    "LogicError",
    "MatrixLogic",
    "BotDefinability",
    "CONNECTIVES",
    "CONSTANTS",
    "BUILTIN_NAMES",
    "builtin",
    "from_labels",
    "load_logic",
    "save_logic",
    "dumps_logic",
    "check_bot_definability",
    "permute",
    "is_isomorphic",
]

CONNECTIVES = ("neg", "and", "or", "imp")
CONSTANTS = ("bot", "top")
BINARY = ("and", "or", "imp")

Table1 = tuple[int, ...]
Table2 = tuple[tuple[int, ...], ...]


class LogicError(ValueError):
    """Invalid logic definition or document."""


@dataclass(frozen=True)
class MatrixLogic:
    """A finite matrix over values ``0..n-1``.

    ``labels`` are for display only. ``allow_designated_bot`` exists so the
    search module can explore matrices where the bottom constant is
    designated; every other producer leaves it off.
    """

    name: str
    labels: tuple[str, ...]
    designated: frozenset[int]
    neg: Table1 | None = None
    and_: Table2 | None = None
    or_: Table2 | None = None
    imp: Table2 | None = None
    bot: int | None = None
    top: int | None = None
    allow_designated_bot: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        n = len(self.labels)
        if n < 1:
            raise LogicError("logic needs at least one value")
        if len(set(self.labels)) != n:
            raise LogicError("duplicate value labels")
        if not self.designated:
            raise LogicError("designated set is empty")
        if len(self.designated) == n:
            raise LogicError("designated set contains every value")
        if any(not 0 <= d < n for d in self.designated):
            raise LogicError("designated value out of range")
        if self.neg is not None:
            if len(self.neg) != n:
                raise LogicError("partial table: neg")
            if any(not 0 <= v < n for v in self.neg):
                raise LogicError("out-of-range value in neg table")
        for conn in BINARY:
            table = self.table(conn)
            if table is None:
                continue
            if len(table) != n:
                raise LogicError(f"partial table: {conn} row {min(len(table), n)}")
            for i, row in enumerate(table):
                if len(row) != n:
                    raise LogicError(f"partial table: {conn} row {i}")
                if any(not 0 <= v < n for v in row):
                    raise LogicError(f"out-of-range value in {conn} row {i}")
        for const in CONSTANTS:
            v = getattr(self, const)
            if v is not None and not 0 <= v < n:
                raise LogicError(f"out-of-range {const} value")
        if self.bot is not None and self.bot in self.designated and not self.allow_designated_bot:
            raise LogicError("bot value is designated")

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def values(self) -> range:
        return range(len(self.labels))

    def table(self, conn: str):
        attr = {"neg": "neg", "and": "and_", "or": "or_", "imp": "imp"}[conn]
        return getattr(self, attr)

    @property
    def signature(self) -> frozenset[str]:
        sig = {c for c in CONNECTIVES if self.table(c) is not None}
        sig |= {c for c in CONSTANTS if getattr(self, c) is not None}
        return frozenset(sig)

    def is_designated(self, v: int) -> bool:
        return v in self.designated

    def label(self, v: int) -> str:
        return self.labels[v]

    def value(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LogicError(f"unknown value label {label!r} for logic {self.name}") from None

    def lookup(self, conn: str, *args: str) -> str:
        """Table lookup by display labels, e.g. ``lookup("imp", "3", "1")``."""
        table = self.table(conn)
        if table is None:
            raise LogicError(f"logic {self.name} has no {conn} table")
        if conn == "neg":
            (a,) = args
            return self.label(table[self.value(a)])
        a, b = args
        return self.label(table[self.value(a)][self.value(b)])

    def encoding(self) -> tuple:
        """Label-free encoding used for ordering and canonical forms."""
        n = self.n
        none = (-1,)
        return (
            n,
            tuple(1 if v in self.designated else 0 for v in range(n)),
            -1 if self.bot is None else self.bot,
            -1 if self.top is None else self.top,
            self.neg if self.neg is not None else none,
            tuple(itertools.chain.from_iterable(self.and_)) if self.and_ is not None else none,
            tuple(itertools.chain.from_iterable(self.or_)) if self.or_ is not None else none,
            tuple(itertools.chain.from_iterable(self.imp)) if self.imp is not None else none,
        )


def from_labels(
    name: str,
    labels: Sequence[str],
    designated: Iterable[str],
    neg: Sequence[str] | None = None,
    and_: Sequence[Sequence[str]] | None = None,
    or_: Sequence[Sequence[str]] | None = None,
    imp: Sequence[Sequence[str]] | None = None,
    bot: str | None = None,
    top: str | None = None,
) -> MatrixLogic:
    """Build a logic from tables written with display labels."""
    labels = tuple(labels)
    index = {lab: i for i, lab in enumerate(labels)}

    def val(lab: str, where: str) -> int:
        if lab not in index:
            raise LogicError(f"out-of-range value {lab!r} in {where}")
        return index[lab]

    def t1(tab, which):
        return None if tab is None else tuple(val(x, which) for x in tab)

    def t2(tab, which):
        if tab is None:
            return None
        return tuple(tuple(val(x, f"{which} row {i}") for x in row) for i, row in enumerate(tab))

    return MatrixLogic(
        name=name,
        labels=labels,
        designated=frozenset(val(d, "designated") for d in designated),
        neg=t1(neg, "neg"),
        and_=t2(and_, "and"),
        or_=t2(or_, "or"),
        imp=t2(imp, "imp"),
        bot=None if bot is None else val(bot, "constants.bot"),
        top=None if top is None else val(top, "constants.top"),
    )


# ---------------------------------------------------------------- builtins

def _cc1_bot() -> MatrixLogic:
    return from_labels(
        "cc1_bot",
        ["1", "2", "3", "4"],
        designated=["1", "2"],
        neg=["4", "3", "2", "1"],
        and_=[
            ["1", "2", "3", "4"],
            ["2", "1", "4", "3"],
            ["3", "4", "3", "4"],
            ["4", "3", "4", "3"],
        ],
        imp=[
            ["1", "4", "3", "4"],
            ["4", "1", "4", "3"],
            ["1", "4", "1", "4"],
            ["4", "1", "4", "1"],
        ],
        bot="4",
    )


def _sa2_three() -> MatrixLogic:
    return from_labels(
        "sa2_three",
        ["1", "i", "0"],
        designated=["1"],
        neg=["i", "1", "1"],
        imp=[
            ["1", "0", "0"],
            ["0", "1", "0"],
            ["1", "1", "1"],
        ],
    )


def _ecf_three() -> MatrixLogic:
    return from_labels(
        "ecf_three",
        ["1", "i", "0"],
        designated=["1"],
        neg=["0", "0", "1"],
        and_=[
            ["1", "i", "0"],
            ["i", "i", "0"],
            ["0", "0", "i"],
        ],
        imp=[
            ["1", "i", "0"],
            ["1", "1", "0"],
            ["0", "0", "1"],
        ],
        bot="0",
    )


_CLASSICAL = dict(
    labels=["0", "1"],
    designated=["1"],
    neg=["1", "0"],
    and_=[["0", "0"], ["0", "1"]],
    or_=[["0", "1"], ["1", "1"]],
    bot="0",
    top="1",
)


def _classical() -> MatrixLogic:
    return from_labels("classical", imp=[["1", "1"], ["0", "1"]], **_CLASSICAL)


def _classical_bicond() -> MatrixLogic:
    return from_labels("classical_bicond", imp=[["1", "0"], ["0", "1"]], **_CLASSICAL)


_BUILTINS = {
    "cc1_bot": _cc1_bot,
    "sa2_three": _sa2_three,
    "ecf_three": _ecf_three,
    "classical": _classical,
    "classical_bicond": _classical_bicond,
}
BUILTIN_NAMES = tuple(_BUILTINS)


def builtin(name: str) -> MatrixLogic:
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise LogicError(f"unknown builtin logic {name!r}; known: {', '.join(BUILTIN_NAMES)}") from None


# ---------------------------------------------------------------- JSON I/O

_TOP_KEYS = {"name", "values", "designated", "tables", "constants"}
_TABLE_KEYS = {"neg", "and", "or", "imp"}


def _check_keys(obj: Any, allowed: set[str], where: str, required: Iterable[str] = ()) -> None:
    if not isinstance(obj, dict):
        raise LogicError(f"malformed document: {where} must be an object")
    unknown = set(obj) - allowed
    if unknown:
        raise LogicError(f"malformed document: unknown key(s) in {where}: {', '.join(sorted(unknown))}")
    for key in required:
        if key not in obj:
            raise LogicError(f"malformed document: missing {where}.{key}" if where != "document" else f"malformed document: missing {key}")


def _str_list(obj: Any, where: str) -> list[str]:
    if not isinstance(obj, list) or not all(isinstance(x, str) for x in obj):
        raise LogicError(f"malformed document: {where} must be a list of strings")
    return obj


def load_logic(doc: Mapping[str, Any] | str | Path) -> MatrixLogic:
    """Validate and load a logic document (a parsed JSON object or a file path)."""
    if isinstance(doc, (str, Path)):
        try:
            doc = json.loads(Path(doc).read_text())
        except json.JSONDecodeError as exc:
            raise LogicError(f"malformed document: {exc}") from exc
    _check_keys(doc, _TOP_KEYS, "document", required=("name", "values", "designated", "tables"))
    if not isinstance(doc["name"], str):
        raise LogicError("malformed document: name must be a string")
    labels = _str_list(doc["values"], "values")
    designated = _str_list(doc["designated"], "designated")
    tables = doc["tables"]
    _check_keys(tables, _TABLE_KEYS, "tables")
    if not tables:
        raise LogicError("malformed document: no tables")
    n = len(labels)
    neg = None
    if "neg" in tables:
        neg = _str_list(tables["neg"], "tables.neg")
        if len(neg) != n:
            raise LogicError(f"partial table: neg has {len(neg)} entries, expected {n}")
    binary: dict[str, list[list[str]] | None] = {}
    for conn in BINARY:
        if conn not in tables:
            binary[conn] = None
            continue
        rows = tables[conn]
        if not isinstance(rows, list):
            raise LogicError(f"malformed document: tables.{conn} must be a list of rows")
        for i in range(n):
            if i >= len(rows):
                raise LogicError(f"partial table: {conn} row {i}")
            row = _str_list(rows[i], f"tables.{conn}[{i}]")
            if len(row) != n:
                raise LogicError(f"partial table: {conn} row {i}")
        if len(rows) > n:
            raise LogicError(f"malformed document: tables.{conn} has {len(rows)} rows, expected {n}")
        binary[conn] = rows
    constants = doc.get("constants", {})
    _check_keys(constants, set(CONSTANTS), "constants")
    for key, value in constants.items():
        if not isinstance(value, str):
            raise LogicError(f"malformed document: constants.{key} must be a string")
    return from_labels(
        doc["name"],
        labels,
        designated,
        neg=neg,
        and_=binary["and"],
        or_=binary["or"],
        imp=binary["imp"],
        bot=constants.get("bot"),
        top=constants.get("top"),
    )


def save_logic(m: MatrixLogic) -> dict[str, Any]:
    lab = m.labels
    tables: dict[str, Any] = {}
    if m.neg is not None:
        tables["neg"] = [lab[v] for v in m.neg]
    for conn in BINARY:
        table = m.table(conn)
        if table is not None:
            tables[conn] = [[lab[v] for v in row] for row in table]
    doc: dict[str, Any] = {
        "name": m.name,
        "values": list(lab),
        "designated": [lab[v] for v in sorted(m.designated)],
        "tables": tables,
    }
    constants = {c: lab[getattr(m, c)] for c in CONSTANTS if getattr(m, c) is not None}
    if constants:
        doc["constants"] = constants
    return doc


def dumps_logic(m: MatrixLogic, indent: int | None = 2) -> str:
    return json.dumps(save_logic(m), indent=indent)


# ---------------------------------------------------------------- analysis

@dataclass(frozen=True)
class BotDefinability:
    """Outcome of evaluating ``~(p -> p)`` at every value of ``p``."""

    values: tuple[str, ...]
    constant: bool
    value: str | None
    equals_bot: bool


def check_bot_definability(m: MatrixLogic) -> BotDefinability:
    if m.neg is None or m.imp is None:
        raise LogicError(f"logic {m.name} lacks neg or imp")
    outs = tuple(m.neg[m.imp[v][v]] for v in m.values)
    constant = len(set(outs)) == 1
    value = m.label(outs[0]) if constant else None
    return BotDefinability(
        values=tuple(m.label(v) for v in outs),
        constant=constant,
        value=value,
        equals_bot=constant and m.bot is not None and outs[0] == m.bot,
    )


def permute(m: MatrixLogic, perm: Sequence[int], name: str | None = None) -> MatrixLogic:
    """Relabel ``m`` along ``perm`` (value ``v`` becomes ``perm[v]``)."""
    n = m.n
    inv = [0] * n
    for v, w in enumerate(perm):
        inv[w] = v

    def t1(tab):
        return None if tab is None else tuple(perm[tab[inv[w]]] for w in range(n))

    def t2(tab):
        if tab is None:
            return None
        return tuple(tuple(perm[tab[inv[a]][inv[b]]] for b in range(n)) for a in range(n))

    return MatrixLogic(
        name=m.name if name is None else name,
        labels=tuple(m.labels[inv[w]] for w in range(n)),
        designated=frozenset(perm[d] for d in m.designated),
        neg=t1(m.neg),
        and_=t2(m.and_),
        or_=t2(m.or_),
        imp=t2(m.imp),
        bot=None if m.bot is None else perm[m.bot],
        top=None if m.top is None else perm[m.top],
        allow_designated_bot=m.allow_designated_bot,
    )


def _commutes(m1: MatrixLogic, m2: MatrixLogic, perm: Sequence[int]) -> bool:
    if {perm[d] for d in m1.designated} != m2.designated:
        return False
    for const in CONSTANTS:
        a, b = getattr(m1, const), getattr(m2, const)
        if a is not None and perm[a] != b:
            return False
    if m1.neg is not None and any(perm[m1.neg[v]] != m2.neg[perm[v]] for v in m1.values):
        return False
    for conn in BINARY:
        t1, t2 = m1.table(conn), m2.table(conn)
        if t1 is None:
            continue
        for a in m1.values:
            row1, row2 = t1[a], t2[perm[a]]
            for b in m1.values:
                if perm[row1[b]] != row2[perm[b]]:
                    return False
    return True


def is_isomorphic(m1: MatrixLogic, m2: MatrixLogic) -> tuple[bool, tuple[int, ...] | None]:
    """Return ``(True, perm)`` for a witness bijection, else ``(False, None)``.

    Labels and names are ignored.
    """
    if m1.signature != m2.signature:
        raise LogicError(
            f"signature mismatch: {sorted(m1.signature)} vs {sorted(m2.signature)}"
        )
    if m1.n != m2.n or len(m1.designated) != len(m2.designated):
        return False, None
    for perm in itertools.permutations(range(m1.n)):
        if _commutes(m1, m2, perm):
            return True, perm
    return False, None


def with_name(m: MatrixLogic, name: str) -> MatrixLogic:
    return replace(m, name=name)
