"""Propositional syntax: AST, parser, renderer, substitution and matching.

Formulas and schemata share one AST family. A schema is simply a tree that
may contain :class:`Metavariable` leaves; :func:`parse` decides which leaves
are allowed through its ``mode`` argument.

Concrete syntax (ASCII, Unicode aliases accepted on input)::

    formula := imp
    imp     := or ("->" imp)?          right-associative
    or      := and ("|" and)*          left-associative
    and     := neg ("&" neg)*          left-associative
    neg     := "~" neg | atom
    atom    := ident | "bot" | "top" | "(" formula ")"
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Union

__all__ = [
    "Atom",
    "BottomConst",
    "TopConst",
    "Metavariable",
    "Negation",
    "Conjunction",
    "Disjunction",
    "Implication",
    "Formula",
    "ParseError",
    "UnboundMetavariable",
    "parse",
    "parse_schema",
    "render",
    "substitute",
    "compose",
    "match_schema",
    "translate_intuitionistic_negation",
    "metavariables",
    "atoms",
    "connectives",
    "is_schema",
    "subformulas",
]


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class BottomConst:
    pass


@dataclass(frozen=True)
class TopConst:
    pass


@dataclass(frozen=True)
class Metavariable:
    name: str


@dataclass(frozen=True)
class Negation:
    child: "Formula"


@dataclass(frozen=True)
class Conjunction:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Disjunction:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implication:
    left: "Formula"
    right: "Formula"


Formula = Union[
    Atom, BottomConst, TopConst, Metavariable, Negation, Conjunction, Disjunction, Implication
]

BOT = BottomConst()
TOP = TopConst()

_BINARY = (Conjunction, Disjunction, Implication)


class ParseError(ValueError):
    """Raised for malformed input; ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.message = message
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnboundMetavariable(KeyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(name)

    def __str__(self) -> str:
        return f"unbound metavariable {self.name}"


# ---------------------------------------------------------------- tokenizer

_SYMBOLS = [
    ("->", "->"),
    ("→", "->"),
    ("~", "~"),
    ("¬", "~"),
    ("&", "&"),
    ("∧", "&"),
    ("|", "|"),
    ("∨", "|"),
    ("(", "("),
    (")", ")"),
    ("⊥", "bot"),
    ("⊤", "top"),
]


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Return (kind, value, position) triples; kind is 'op', 'ident' or 'end'."""
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        for sym, canon in _SYMBOLS:
            if text.startswith(sym, i):
                kind = "ident" if canon in ("bot", "top") else "op"
                tokens.append((kind, canon, i))
                i += len(sym)
                break
        else:
            if ch.isascii() and (ch.isalpha() or ch == "_"):
                j = i + 1
                while j < n and text[j].isascii() and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                tokens.append(("ident", text[i:j], i))
                i = j
            else:
                raise ParseError(f"unknown symbol {ch!r}", i, text)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str, schema: bool):
        self.text = text
        self.schema = schema
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.pos]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: tuple[str, str, int]) -> ParseError:
        return ParseError(message, tok[2], self.text)

    def parse(self) -> Formula:
        if self.peek()[0] == "end":
            raise ParseError("empty input", 0, self.text)
        result = self.imp()
        tok = self.peek()
        if tok[0] != "end":
            raise self.error(f"unexpected {tok[1]!r}", tok)
        return result

    def imp(self) -> Formula:
        left = self.disj()
        if self.peek()[1] == "->" and self.peek()[0] == "op":
            self.take()
            return Implication(left, self.imp())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.peek()[:2] == ("op", "|"):
            self.take()
            left = Disjunction(left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.neg()
        while self.peek()[:2] == ("op", "&"):
            self.take()
            left = Conjunction(left, self.neg())
        return left

    def neg(self) -> Formula:
        if self.peek()[:2] == ("op", "~"):
            self.take()
            return Negation(self.neg())
        return self.atom()

    def atom(self) -> Formula:
        tok = self.take()
        kind, value, _ = tok
        if kind == "op" and value == "(":
            inner = self.imp()
            close = self.take()
            if close[:2] != ("op", ")"):
                raise self.error("expected ')'", close)
            return inner
        if kind == "ident":
            if value == "bot":
                return BOT
            if value == "top":
                return TOP
            if value[0].isupper():
                if len(value) != 1:
                    raise self.error(f"bad identifier {value!r}", tok)
                if not self.schema:
                    raise self.error(f"metavariable {value!r} not allowed in formula mode", tok)
                return Metavariable(value)
            if value[0].islower():
                return Atom(value)
            raise self.error(f"bad identifier {value!r}", tok)
        if kind == "end":
            raise self.error("unexpected end of input", tok)
        raise self.error(f"unexpected {value!r}", tok)


def parse(text: str, mode: str = "formula") -> Formula:
    """Parse ``text``. ``mode`` is ``"formula"`` or ``"schema"``.

    In schema mode single uppercase letters are metavariables; in formula
    mode they are rejected.
    """
    if mode not in ("formula", "schema"):
        raise ValueError(f"unknown parse mode {mode!r}")
    return _Parser(text, schema=(mode == "schema")).parse()


def parse_schema(text: str) -> Formula:
    return parse(text, mode="schema")


# ---------------------------------------------------------------- rendering

_PREC = {Implication: 1, Disjunction: 2, Conjunction: 3}
_OPS = {Implication: "->", Disjunction: "|", Conjunction: "&"}


def _prec(f: Formula) -> int:
    return _PREC.get(type(f), 4 if isinstance(f, Negation) else 5)


def render(f: Formula, arrow_parens: bool = False) -> str:
    """Render with the fewest parentheses that still re-parse to ``f``.

    With ``arrow_parens`` an implication nested to the right of another is
    bracketed too, as in ``(A -> B) -> ((A -> ~B) -> bot)``.
    """
    if isinstance(f, (Atom, Metavariable)):
        return f.name
    if isinstance(f, BottomConst):
        return "bot"
    if isinstance(f, TopConst):
        return "top"
    if isinstance(f, Negation):
        inner = render(f.child, arrow_parens)
        return "~" + (f"({inner})" if _prec(f.child) < 4 else inner)
    p = _PREC[type(f)]
    left, right = render(f.left, arrow_parens), render(f.right, arrow_parens)
    if isinstance(f, Implication):
        # right-associative
        left_paren = _prec(f.left) <= p
        right_paren = _prec(f.right) <= p if arrow_parens else _prec(f.right) < p
    else:
        left_paren = _prec(f.left) < p
        right_paren = _prec(f.right) <= p
    if left_paren:
        left = f"({left})"
    if right_paren:
        right = f"({right})"
    return f"{left} {_OPS[type(f)]} {right}"


# ---------------------------------------------------------------- traversal

def subformulas(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal."""
    yield f
    if isinstance(f, Negation):
        yield from subformulas(f.child)
    elif isinstance(f, _BINARY):
        yield from subformulas(f.left)
        yield from subformulas(f.right)


def metavariables(f: Formula) -> list[str]:
    """Metavariable names in order of first occurrence."""
    seen: dict[str, None] = {}
    for g in subformulas(f):
        if isinstance(g, Metavariable):
            seen.setdefault(g.name)
    return list(seen)


def atoms(f: Formula) -> list[str]:
    seen: dict[str, None] = {}
    for g in subformulas(f):
        if isinstance(g, Atom):
            seen.setdefault(g.name)
    return list(seen)


def is_schema(f: Formula) -> bool:
    return any(isinstance(g, Metavariable) for g in subformulas(f))


_CONNECTIVE_NAME = {
    Negation: "neg",
    Conjunction: "and",
    Disjunction: "or",
    Implication: "imp",
    BottomConst: "bot",
    TopConst: "top",
}


def connectives(f: Formula) -> set[str]:
    """Connective and constant names used by ``f`` (``neg``, ``and``, ``or``, ``imp``, ``bot``, ``top``)."""
    return {_CONNECTIVE_NAME[type(g)] for g in subformulas(f) if type(g) in _CONNECTIVE_NAME}


# ---------------------------------------------------------------- substitution

Substitution = Mapping[str, Formula]


def substitute(s: Formula, sub: Substitution, partial: bool = False) -> Formula:
    """Replace every metavariable of ``s`` by its image under ``sub``.

    Unbound metavariables raise :class:`UnboundMetavariable` unless
    ``partial`` is set, in which case they are left in place.
    """
    if isinstance(s, Metavariable):
        if s.name in sub:
            return sub[s.name]
        if partial:
            return s
        raise UnboundMetavariable(s.name)
    if isinstance(s, Negation):
        return Negation(substitute(s.child, sub, partial))
    if isinstance(s, _BINARY):
        return type(s)(substitute(s.left, sub, partial), substitute(s.right, sub, partial))
    return s


def compose(sigma: Substitution, tau: Substitution) -> dict[str, Formula]:
    """Return ``sigma;tau``: first apply ``sigma``, then ``tau``."""
    out = {name: substitute(image, tau, partial=True) for name, image in sigma.items()}
    for name, image in tau.items():
        out.setdefault(name, image)
    return out


def match_schema(s: Formula, f: Formula) -> dict[str, Formula] | None:
    """Find ``sigma`` with ``substitute(s, sigma) == f``, or None."""
    binding: dict[str, Formula] = {}
    stack = [(s, f)]
    while stack:
        pat, target = stack.pop()
        if isinstance(pat, Metavariable):
            bound = binding.get(pat.name)
            if bound is None:
                binding[pat.name] = target
            elif bound != target:
                return None
            continue
        if type(pat) is not type(target):
            return None
        if isinstance(pat, Negation):
            stack.append((pat.child, target.child))
        elif isinstance(pat, _BINARY):
            stack.append((pat.right, target.right))
            stack.append((pat.left, target.left))
        elif pat != target:
            return None
    return binding


# ---------------------------------------------------------------- translation

def translate_intuitionistic_negation(f: Formula, mode: str = "all") -> Formula:
    """Rewrite ``~X`` as ``X -> bot``.

    ``mode="all"`` rewrites every negation bottom-up; ``mode="outer"`` only
    the root, leaving the formula untouched when the root is not a negation.
    """
    if mode == "outer":
        if isinstance(f, Negation):
            return Implication(f.child, BOT)
        return f
    if mode != "all":
        raise ValueError(f"unknown translation mode {mode!r}")
    if isinstance(f, Negation):
        return Implication(translate_intuitionistic_negation(f.child), BOT)
    if isinstance(f, _BINARY):
        return type(f)(
            translate_intuitionistic_negation(f.left),
            translate_intuitionistic_negation(f.right),
        )
    return f
