"""Shared hypothesis strategies and small brute-force oracles."""

from __future__ import annotations

import functools
import itertools

from hypothesis import strategies as st

from connexive.formula import (
    BOT,
    TOP,
    Atom,
    Conjunction,
    Disjunction,
    Implication,
    Metavariable,
    Negation,
)
from connexive.matrix import MatrixLogic

ATOM_NAMES = ("p", "q", "r")
META_NAMES = ("A", "B", "C")


@functools.lru_cache(maxsize=None)
def formulas(max_depth: int = 8, leaves=None, connectives=("neg", "and", "or", "imp", "bot", "top")):
    """Random formulas (or schemata, via ``leaves``) of depth at most ``max_depth``."""
    if leaves is None:
        leaves = st.sampled_from([Atom(n) for n in ATOM_NAMES])
    base = [leaves]
    if "bot" in connectives:
        base.append(st.just(BOT))
    if "top" in connectives:
        base.append(st.just(TOP))
    leaf = st.one_of(*base)

    def extend(children):
        options = []
        if "neg" in connectives:
            options.append(children.map(Negation))
        for name, cls in (("and", Conjunction), ("or", Disjunction), ("imp", Implication)):
            if name in connectives:
                options.append(st.builds(cls, children, children))
        return st.one_of(*options)

    # recursive() bounds leaves, not depth; filter keeps the depth bound exact
    return st.recursive(leaf, extend, max_leaves=min(24, 2 ** max_depth)).filter(lambda f: depth(f) <= max_depth)


@functools.lru_cache(maxsize=None)
def schemata(max_depth: int = 4, connectives=("neg", "and", "or", "imp", "bot", "top"), names=META_NAMES):
    return formulas(max_depth, st.sampled_from([Metavariable(n) for n in names]), connectives)


def depth(f) -> int:
    if isinstance(f, Negation):
        return 1 + depth(f.child)
    if isinstance(f, (Conjunction, Disjunction, Implication)):
        return 1 + max(depth(f.left), depth(f.right))
    return 0


@functools.lru_cache(maxsize=None)
def _parts(n: int):
    # built once per size; rebuilding strategies inside a draw is slow
    v = st.integers(0, n - 1)
    row = st.tuples(*[v] * n)
    designated = st.sets(st.integers(0, n - 1), min_size=1, max_size=n - 1).map(frozenset)
    return v, row, st.tuples(*[row] * n), designated


@st.composite
def _matrices(draw, max_values: int, signature):
    n = draw(st.integers(2, max_values))
    v, row, table, designated_st = _parts(n)
    designated = draw(designated_st)
    undesignated = [x for x in range(n) if x not in designated]
    return MatrixLogic(
        name="fuzz",
        labels=tuple(str(i) for i in range(n)),
        designated=designated,
        neg=draw(row) if "neg" in signature else None,
        and_=draw(table) if "and" in signature else None,
        or_=draw(table) if "or" in signature else None,
        imp=draw(table) if "imp" in signature else None,
        bot=draw(st.sampled_from(undesignated)) if "bot" in signature else None,
        top=draw(v) if "top" in signature else None,
    )


@functools.lru_cache(maxsize=None)
def matrices(max_values: int = 3, signature=("neg", "and", "or", "imp", "bot", "top")):
    return _matrices(max_values, tuple(signature))


def all_formulas(atoms, max_depth: int, signature):
    """Every formula over ``atoms`` up to ``max_depth`` (used as substitution instances)."""
    layer = [Atom(a) for a in atoms]
    if "bot" in signature:
        layer.append(BOT)
    if "top" in signature:
        layer.append(TOP)
    found = list(layer)
    for _ in range(max_depth):
        new = []
        if "neg" in signature:
            new += [Negation(f) for f in found]
        for name, cls in (("and", Conjunction), ("or", Disjunction), ("imp", Implication)):
            if name in signature:
                new += [cls(a, b) for a, b in itertools.product(found, repeat=2)]
        seen = set(found)
        found += [f for f in new if f not in seen and not seen.add(f)]
    return found
