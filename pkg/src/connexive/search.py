"""Enumeration of small matrices and search under principle constraints.

The space for one ``SearchSpec`` is laid out as tasks, one per choice of
designated set and constants, and inside a task as a flat list of table
cells filled in connective order (neg, and, or, imp), row-major, values
ascending. Tasks run independently, optionally in worker processes, and
are merged in task order, so results do not depend on ``jobs``.

Constraints are compiled into *nogood clauses*: a clause instance (one per
assignment of values to its variables) is violated when every literal is
true, a literal being "this schema is designated" or "this schema is not
designated". With pruning on, a clause instance is evaluated as soon as
the cells it reads are filled, and any violation cuts the whole subtree.
"""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Any, Iterable, Iterator, Mapping, Sequence

from . import principles
from .formula import (
    Atom,
    BottomConst,
    Conjunction,
    Disjunction,
    Formula,
    Implication,
    Metavariable,
    Negation,
    ParseError,
    TopConst,
    connectives,
    parse_schema,
    render,
)
from .matrix import CONNECTIVES, CONSTANTS, LogicError, MatrixLogic, is_isomorphic, permute, save_logic
from .semantics import variables

__all__ = [
    "SearchError",
    "SearchSpec",
    "SearchResult",
    "effective_signature",
    "raw_count",
    "enumerate_matrices",
    "search",
    "restrict",
    "canonicalize",
    "canonical_key",
    "spec_from_json",
    "result_to_json",
]

SIGNATURE_ITEMS = CONNECTIVES + CONSTANTS


class SearchError(ValueError):
    """Infeasible or inconsistent search specification."""


@dataclass(frozen=True)
class SearchSpec:
    """What to search for.

    ``require_valid``/``require_invalid`` hold principle ids (any kind) or
    schema strings, which are read as validity requirements.
    ``fixed_tables`` pins cells: a full table, or one with ``None`` at the
    free cells. ``dedupe_isomorphic=None`` means on for three or more values.
    """

    values: int
    signature: frozenset[str] | None = None
    designated_options: tuple[frozenset[int], ...] | None = None
    require_valid: tuple[str, ...] = ()
    require_invalid: tuple[str, ...] = ()
    require_unsat: tuple[str, ...] = ()
    require_sat: tuple[str, ...] = ()
    require_rules_preserving: tuple[str, ...] = ()
    bot_undesignated: bool = True
    dedupe_isomorphic: bool | None = None
    limit: int | None = None
    fixed_tables: Mapping[str, Any] = field(default_factory=dict)
    labels: tuple[str, ...] | None = None
    prune: bool = True

    @property
    def dedupe(self) -> bool:
        return self.values >= 3 if self.dedupe_isomorphic is None else self.dedupe_isomorphic

    @property
    def value_labels(self) -> tuple[str, ...]:
        return self.labels if self.labels is not None else tuple(str(i) for i in range(self.values))


@dataclass
class SearchResult:
    matrices: list[MatrixLogic]
    enumerated: int
    pruned: int
    elapsed: float
    truncated: bool = False

    def stats(self) -> dict[str, Any]:
        return {
            "found": len(self.matrices),
            "enumerated": self.enumerated,
            "pruned": self.pruned,
            "truncated": self.truncated,
            "elapsed_seconds": round(self.elapsed, 6),
        }


# ---------------------------------------------------------------- constraint resolution

def _resolve(entry: str) -> principles.Principle:
    try:
        return principles.get(entry)
    except KeyError:
        pass
    try:
        schema = parse_schema(entry)
    except ParseError as exc:
        raise SearchError(f"{entry!r} is neither a principle id nor a schema: {exc}") from exc
    return principles.Principle(entry, principles.VALIDITY, (schema,), entry, "ad hoc")


def _schema(entry: str | Formula) -> Formula:
    if not isinstance(entry, str):
        return entry
    try:
        return parse_schema(entry)
    except ParseError as exc:
        raise SearchError(f"bad schema {entry!r}: {exc}") from exc


def _nogoods(p: principles.Principle) -> list[list[tuple[Formula, bool]]]:
    """Clauses whose violation (all literals true) means ``p`` fails."""
    if p.kind == principles.VALIDITY:
        return [[(p.schema, False)]]
    if p.kind == principles.UNSAT:
        return [[(s, True)] for s in p.payload]
    if p.kind == principles.CO_UNSAT:
        return [[(s, True) for s in p.payload]]
    if p.structural:
        return []
    return [[*((s, True) for s in p.premises), (p.conclusion, False)]]


@dataclass(frozen=True)
class _Plan:
    n: int
    signature: frozenset[str]
    designated_options: tuple[frozenset[int], ...]
    forbid: tuple[list, ...]  # clauses that must never be violated
    demand: tuple[list, ...]  # clause groups: some clause in the group must be violated somewhere
    fixed: Mapping[str, Any]
    labels: tuple[str, ...]
    bot_undesignated: bool
    prune: bool


def _plan(spec: SearchSpec) -> _Plan:
    n = spec.values
    if n < 2:
        raise SearchError("need at least two values")
    valid = [_resolve(e) for e in spec.require_valid]
    invalid = [_resolve(e) for e in spec.require_invalid]
    unsat = [_schema(s) for s in spec.require_unsat]
    sat = [_schema(s) for s in spec.require_sat]
    rules = []
    for rid in spec.require_rules_preserving:
        try:
            rule = principles.get(rid)
        except KeyError:
            raise SearchError(f"unknown rule {rid!r}") from None
        if rule.kind != principles.RULE:
            raise SearchError(f"{rid} is not a rule")
        rules.append(rule)

    needs: set[str] = set()
    for p in [*valid, *invalid, *rules]:
        needs |= p.needs
    for s in [*unsat, *sat]:
        needs |= connectives(s)
    if spec.signature is None:
        needs |= set(spec.fixed_tables)
        signature = frozenset(needs) if needs else frozenset(SIGNATURE_ITEMS)
    else:
        signature = frozenset(spec.signature)
        unknown = signature - set(SIGNATURE_ITEMS)
        if unknown:
            raise SearchError(f"unknown signature item(s): {', '.join(sorted(unknown))}")
        if not needs <= signature:
            raise SearchError(
                f"constraints use {', '.join(sorted(needs - signature))}, missing from the signature"
            )
    if not signature & set(CONNECTIVES):
        raise SearchError("signature has no connective")

    if spec.designated_options is None:
        options = tuple(
            frozenset(c)
            for k in range(1, n)
            for c in itertools.combinations(range(n), k)
        )
    else:
        options = tuple(frozenset(d) for d in spec.designated_options)
        for d in options:
            if not d or len(d) == n or any(not 0 <= v < n for v in d):
                raise SearchError(f"designated option {sorted(d)} is not a nonempty proper subset")
    if not options:
        raise SearchError("no designated options")

    labels = spec.value_labels
    if len(labels) != n:
        raise SearchError("labels do not match the number of values")
    fixed = _normalize_fixed(spec.fixed_tables, n, labels, signature)

    forbid = [c for p in valid for c in _nogoods(p)]
    forbid += [c for r in rules for c in _nogoods(r)]
    forbid += [[(s, True)] for s in unsat]
    demand = [tuple(_nogoods(p)) for p in invalid]
    demand += [([(s, True)],) for s in sat]
    return _Plan(
        n, signature, options, tuple(forbid), tuple(demand), fixed, labels, spec.bot_undesignated, spec.prune
    )


def _normalize_fixed(fixed: Mapping[str, Any], n: int, labels, signature) -> dict[str, list]:
    """Turn pinned tables into flat cell lists (int or None)."""
    out: dict[str, list] = {}
    index = {lab: i for i, lab in enumerate(labels)}

    def cell(x):
        if x is None:
            return None
        if isinstance(x, bool):
            raise SearchError("bad pinned cell")
        if isinstance(x, int):
            if not 0 <= x < n:
                raise SearchError(f"pinned value {x} out of range")
            return x
        if isinstance(x, str) and x in index:
            return index[x]
        raise SearchError(f"pinned value {x!r} is not a value label")

    for conn, table in fixed.items():
        if conn not in CONNECTIVES:
            raise SearchError(f"cannot pin {conn!r}")
        if conn not in signature:
            raise SearchError(f"pinned table {conn} is not in the signature")
        if conn == "neg":
            flat = list(table)
            if len(flat) != n:
                raise SearchError("pinned neg table has wrong size")
        else:
            rows = list(table)
            if len(rows) != n or any(len(r) != n for r in rows):
                raise SearchError(f"pinned {conn} table has wrong shape")
            flat = [x for r in rows for x in r]
        out[conn] = [cell(x) for x in flat]
    return out


# ---------------------------------------------------------------- compiled evaluation

_OP = {Negation: "neg", Conjunction: "and", Disjunction: "or", Implication: "imp"}


class _Layout:
    """Cell numbering for one signature: tables in connective order, row-major."""

    def __init__(self, n: int, signature: frozenset[str]):
        self.n = n
        self.offset: dict[str, int] = {}
        size = 0
        for conn in CONNECTIVES:
            if conn in signature:
                self.offset[conn] = size
                size += n if conn == "neg" else n * n
        self.size = size


def _literal_source(f: Formula, row: Sequence[int], names: Sequence[str], layout: _Layout, consts) -> str:
    """Python source for one literal at one fixed row of variable values.

    The generated function returns the value, or ``-1 - i`` when it reads
    the unfilled cell ``i``. Variables and constants are inlined, so cell
    indices that do not depend on table entries become literals.
    """
    var = dict(zip(names, row))
    n = layout.n
    body: list[str] = []
    counter = itertools.count()

    def go(g: Formula) -> str:
        # returns an int literal or a local name
        if isinstance(g, (Atom, Metavariable)):
            return str(var[g.name])
        if isinstance(g, BottomConst):
            return str(consts["bot"])
        if isinstance(g, TopConst):
            return str(consts["top"])
        if isinstance(g, Negation):
            a = go(g.child)
            off = layout.offset["neg"]
            index = str(off + int(a)) if a.isdigit() else f"{off} + {a}"
        else:
            a, b = go(g.left), go(g.right)
            off = layout.offset[_OP[type(g)]]
            if a.isdigit() and b.isdigit():
                index = str(off + int(a) * n + int(b))
            else:
                index = f"{off} + {a} * {n} + {b}"
        k = next(counter)
        body.append(f"    i = {index}")
        body.append(f"    s{k} = c[i]")
        body.append(f"    if s{k} < 0: return -1 - i")
        return f"s{k}"

    result = go(f)
    return "def lit(c):\n" + "\n".join(body + [f"    return {result}"]) + "\n"


def _build(source: str, name: str = "lit", **env):
    scope = dict(env)
    exec(source, scope)  # noqa: S102 - source is generated above from a parsed formula
    return scope[name]


class _Clause:
    """One nogood clause, compiled per assignment row for a fixed task.

    ``status(k, cells)`` is 0 when row ``k`` can no longer be violated,
    1 when it is violated, and ``-1 - i`` while it waits on cell ``i``.
    """

    def __init__(self, literals, layout: _Layout, consts, designated):
        formulas = [f for f, _ in literals]
        names = variables(formulas)
        n = layout.n
        self.rows = list(itertools.product(range(n), repeat=len(names)))
        # refutes[j][v]: literal j is false at value v, so the row is safe
        refutes = [tuple((v in designated) != pol for v in range(n)) for _, pol in literals]
        self.fns = []
        for row in self.rows:
            lits = [_build(_literal_source(f, row, names, layout, consts)) for f in formulas]
            lines = ["def clause(c):", "    b = 0"]
            for j in range(len(lits)):
                lines += [
                    f"    v = L{j}(c)",
                    "    if v < 0:",
                    "        if not b: b = v",
                    f"    elif R{j}[v]: return 0",
                ]
            lines.append("    return b if b else 1")
            env = {f"L{j}": fn for j, fn in enumerate(lits)}
            env.update({f"R{j}": r for j, r in enumerate(refutes)})
            self.fns.append(_build("\n".join(lines) + "\n", "clause", **env))

    def status(self, k: int, cells) -> int:
        return self.fns[k](cells)


# ---------------------------------------------------------------- tasks

@dataclass(frozen=True)
class _Task:
    designated: frozenset[int]
    bot: int | None
    top: int | None
    prefix: tuple[int, ...] = ()  # values of the first free cells


def _tasks(plan: _Plan) -> list[_Task]:
    out = []
    for d in plan.designated_options:
        if "bot" in plan.signature:
            bots = [v for v in range(plan.n) if not (plan.bot_undesignated and v in d)]
        else:
            bots = [None]
        tops = list(range(plan.n)) if "top" in plan.signature else [None]
        for b in bots:
            for t in tops:
                out.append(_Task(d, b, t))
    return out


def _split(plan: _Plan, layout: _Layout, tasks: list[_Task]) -> list[_Task]:
    """Give each task a one-cell prefix, so workers own disjoint subtrees.

    The split never depends on the number of workers, which keeps the
    counts identical for every ``jobs`` value.
    """
    if not any(v < 0 for v in _initial_cells(plan, layout)):
        return tasks
    return [replace(t, prefix=(v,)) for t in tasks for v in range(plan.n)]


def _initial_cells(plan: _Plan, layout: _Layout) -> list[int]:
    cells = [-1] * layout.size
    for conn, flat in plan.fixed.items():
        off = layout.offset[conn]
        for i, v in enumerate(flat):
            if v is not None:
                cells[off + i] = v
    return cells


def _to_matrix(plan: _Plan, layout: _Layout, task: _Task, cells: Sequence[int], name: str) -> MatrixLogic:
    n = plan.n
    tables: dict[str, Any] = {}
    for conn, off in layout.offset.items():
        if conn == "neg":
            tables["neg"] = tuple(cells[off:off + n])
        else:
            tables[conn] = tuple(tuple(cells[off + a * n:off + a * n + n]) for a in range(n))
    return MatrixLogic(
        name=name,
        labels=plan.labels,
        designated=task.designated,
        neg=tables.get("neg"),
        and_=tables.get("and"),
        or_=tables.get("or"),
        imp=tables.get("imp"),
        bot=task.bot,
        top=task.top,
        allow_designated_bot=not plan.bot_undesignated,
    )


@dataclass
class _TaskResult:
    found: list[tuple[int, ...]]
    enumerated: int
    pruned: int


def _demands_met(demand_clauses, cells) -> bool:
    for group in demand_clauses:
        if not any(fn(cells) == 1 for c in group for fn in c.fns):
            return False
    return True


def _run_task(plan: _Plan, task: _Task) -> _TaskResult:
    layout = _Layout(plan.n, plan.signature)
    cells = _initial_cells(plan, layout)
    consts = {"bot": task.bot, "top": task.top}
    designated = task.designated
    forbid = [_Clause(c, layout, consts, designated) for c in plan.forbid]
    demand = [[_Clause(c, layout, consts, designated) for c in group] for group in plan.demand]
    free = [i for i, v in enumerate(cells) if v < 0]
    for i, v in zip(free, task.prefix):
        cells[i] = v
    free = free[len(task.prefix):]
    n = plan.n
    result = _TaskResult([], 0, 0)

    checks = [fn for c in forbid for fn in c.fns]

    def leaf_ok() -> bool:
        for fn in checks:
            if fn(cells) == 1:
                return False
        return _demands_met(demand, cells)

    if not plan.prune:
        for combo in itertools.product(range(n), repeat=len(free)):
            for i, v in zip(free, combo):
                cells[i] = v
            result.enumerated += 1
            if leaf_ok():
                result.found.append(tuple(cells))
        return result

    # watch lists: cell -> list of (clause, row) waiting on that cell
    watch: dict[int, list[tuple[int, int]]] = {}
    for ci, c in enumerate(forbid):
        for k in range(len(c.rows)):
            st = c.status(k, cells)
            if st == 1:
                result.pruned += 1
                return result
            if st < 0:
                watch.setdefault(-1 - st, []).append((ci, k))

    def dfs(depth: int) -> None:
        if depth == len(free):
            result.enumerated += 1
            if _demands_met(demand, cells):
                result.found.append(tuple(cells))
            return
        idx = free[depth]
        waiting = watch.pop(idx, [])
        for v in range(n):
            cells[idx] = v
            moved: list[int] = []
            violated = False
            for ci, k in waiting:
                st = forbid[ci].fns[k](cells)
                if st == 1:
                    violated = True
                    break
                if st < 0:
                    target = -1 - st
                    watch.setdefault(target, []).append((ci, k))
                    moved.append(target)
            if violated:
                result.pruned += 1
            else:
                dfs(depth + 1)
            for target in moved:
                watch[target].pop()
        cells[idx] = -1
        if waiting:
            watch[idx] = waiting

    dfs(0)
    return result


def _run_task_star(args):
    return _run_task(*args)


# ---------------------------------------------------------------- canonical forms

class _Canon:
    """Canonical keys computed on flat cell tuples, without building matrices.

    For each permutation, ``sources[i]`` is the cell of the original layout
    whose (relabeled) value lands at cell ``i``. Keys equal
    ``MatrixLogic.encoding()`` of the relabeled matrix.
    """

    def __init__(self, layout: _Layout):
        n = layout.n
        self.n = n
        self.parts = []  # (offset, size) per connective in encoding order, None if absent
        for conn in CONNECTIVES:
            if conn in layout.offset:
                self.parts.append((layout.offset[conn], n if conn == "neg" else n * n))
            else:
                self.parts.append(None)
        self.perms = []
        for perm in itertools.permutations(range(n)):
            inv = [0] * n
            for v, w in enumerate(perm):
                inv[w] = v
            sources = [0] * layout.size
            for conn, off in layout.offset.items():
                if conn == "neg":
                    for w in range(n):
                        sources[off + w] = off + inv[w]
                else:
                    for a in range(n):
                        for b in range(n):
                            sources[off + a * n + b] = off + inv[a] * n + inv[b]
            self.perms.append((perm, inv, sources))

    def key(self, cells: Sequence[int], task: "_Task") -> tuple[tuple, tuple[int, ...]]:
        """(least encoding, the permutation achieving it)."""
        best = None
        n = self.n
        for perm, inv, sources in self.perms:
            moved = [perm[cells[j]] for j in sources]
            enc = (
                n,
                tuple(1 if inv[w] in task.designated else 0 for w in range(n)),
                -1 if task.bot is None else perm[task.bot],
                -1 if task.top is None else perm[task.top],
                *(
                    (-1,) if part is None else tuple(moved[part[0]:part[0] + part[1]])
                    for part in self.parts
                ),
            )
            if best is None or enc < best[0]:
                best = (enc, perm)
        return best



def canonical_key(m: MatrixLogic) -> tuple:
    return min(permute(m, p).encoding() for p in itertools.permutations(range(m.n)))


def canonicalize(m: MatrixLogic) -> MatrixLogic:
    """The relabeling of ``m`` with the lexicographically least encoding.

    Labels travel with their values, so a canonical form still shows the
    original display labels.
    """
    best = None
    for p in itertools.permutations(range(m.n)):
        cand = permute(m, p)
        key = cand.encoding()
        if best is None or key < best[0]:
            best = (key, cand)
    return best[1]


def restrict(m: MatrixLogic, signature: Iterable[str]) -> MatrixLogic:
    """Drop the tables and constants outside ``signature``."""
    keep = set(signature)
    return replace(
        m,
        neg=m.neg if "neg" in keep else None,
        and_=m.and_ if "and" in keep else None,
        or_=m.or_ if "or" in keep else None,
        imp=m.imp if "imp" in keep else None,
        bot=m.bot if "bot" in keep else None,
        top=m.top if "top" in keep else None,
    )


# ---------------------------------------------------------------- public entry points

def effective_signature(spec: SearchSpec) -> frozenset[str]:
    """The signature searched: explicit, or the connectives the constraints and pins use."""
    return _plan(spec).signature


def raw_count(spec: SearchSpec) -> int:
    """Size of the raw space: matrices before constraints and deduplication."""
    plan = _plan(spec)
    layout = _Layout(plan.n, plan.signature)
    free = sum(1 for v in _initial_cells(plan, layout) if v < 0)
    return len(_tasks(plan)) * plan.n ** free


def enumerate_matrices(spec: SearchSpec) -> Iterator[MatrixLogic]:
    """Every matrix over the spec's size and signature, ignoring principle constraints.

    With deduplication on, only the first member of each isomorphism class
    is yielded, as its canonical form.
    """
    plan = _plan(spec)
    layout = _Layout(plan.n, plan.signature)
    base = _initial_cells(plan, layout)
    free = [i for i, v in enumerate(base) if v < 0]
    seen: set[tuple] = set()
    canon = _Canon(layout) if spec.dedupe else None
    count = 0
    for task in _tasks(plan):
        for combo in itertools.product(range(plan.n), repeat=len(free)):
            cells = list(base)
            for i, v in zip(free, combo):
                cells[i] = v
            name = f"m{count}"
            count += 1
            if canon is None:
                yield _to_matrix(plan, layout, task, cells, name)
                continue
            key, perm = canon.key(cells, task)
            if key in seen:
                continue
            seen.add(key)
            yield permute(_to_matrix(plan, layout, task, cells, name), perm)


def search(spec: SearchSpec, jobs: int = 1) -> SearchResult:
    start = time.perf_counter()
    plan = _plan(spec)
    layout = _Layout(plan.n, plan.signature)
    tasks = _split(plan, layout, _tasks(plan))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = pool.map(_run_task_star, [(plan, t) for t in tasks])
            return _merge(spec, plan, layout, tasks, outcomes, start)
    outcomes = (_run_task(plan, t) for t in tasks)
    return _merge(spec, plan, layout, tasks, outcomes, start)


def _merge(spec, plan, layout, tasks, outcomes, start) -> SearchResult:
    found: list[MatrixLogic] = []
    seen: set[tuple] = set()
    canon = _Canon(layout) if spec.dedupe else None
    enumerated = pruned = 0
    truncated = False
    for task, out in zip(tasks, outcomes):
        enumerated += out.enumerated
        pruned += out.pruned
        for cells in out.found:
            m = None
            if canon is not None:
                key, perm = canon.key(cells, task)
                if key in seen:
                    continue
                seen.add(key)
                m = permute(_to_matrix(plan, layout, task, cells, ""), perm)
            else:
                m = _to_matrix(plan, layout, task, cells, "")
            found.append(replace(m, name=f"found_{len(found)}"))
            if spec.limit is not None and len(found) >= spec.limit:
                truncated = True
                break
        if truncated:
            break
    return SearchResult(found, enumerated, pruned, time.perf_counter() - start, truncated)


# ---------------------------------------------------------------- JSON

_SPEC_KEYS = {
    "values",
    "signature",
    "designated_options",
    "require_valid",
    "require_invalid",
    "require_unsat",
    "require_sat",
    "require_rules_preserving",
    "bot_undesignated",
    "dedupe_isomorphic",
    "limit",
    "fixed_tables",
    "labels",
    "prune",
}


def spec_from_json(doc: Mapping[str, Any]) -> SearchSpec:
    if not isinstance(doc, dict):
        raise SearchError("search spec must be an object")
    unknown = set(doc) - _SPEC_KEYS
    if unknown:
        raise SearchError(f"unknown search spec key(s): {', '.join(sorted(unknown))}")
    if "values" not in doc or not isinstance(doc["values"], int):
        raise SearchError("search spec needs an integer 'values'")
    labels = tuple(doc["labels"]) if "labels" in doc else None
    lab = labels or tuple(str(i) for i in range(doc["values"]))
    options = None
    if "designated_options" in doc:
        try:
            options = tuple(frozenset(lab.index(x) for x in opt) for opt in doc["designated_options"])
        except ValueError as exc:
            raise SearchError(f"designated option uses an unknown label: {exc}") from exc
    return SearchSpec(
        values=doc["values"],
        signature=frozenset(doc["signature"]) if "signature" in doc else None,
        designated_options=options,
        require_valid=tuple(doc.get("require_valid", ())),
        require_invalid=tuple(doc.get("require_invalid", ())),
        require_unsat=tuple(doc.get("require_unsat", ())),
        require_sat=tuple(doc.get("require_sat", ())),
        require_rules_preserving=tuple(doc.get("require_rules_preserving", ())),
        bot_undesignated=bool(doc.get("bot_undesignated", True)),
        dedupe_isomorphic=doc.get("dedupe_isomorphic"),
        limit=doc.get("limit"),
        fixed_tables=dict(doc.get("fixed_tables", {})),
        labels=labels,
        prune=bool(doc.get("prune", True)),
    )


def result_to_json(result: SearchResult) -> dict[str, Any]:
    return {"matrices": [save_logic(m) for m in result.matrices], "stats": result.stats()}
