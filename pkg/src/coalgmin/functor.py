"""Functor expressions: the grammar describing the type of a system.

Concrete syntax (whitespace-insensitive)::

    expr     := summand ('+' summand)*
    summand  := [tag ':'] product
    product  := power ('*' power)*
    power    := atom ['^' INT]              # A^r: r-fold product, spliced into '*'
    atom     := '(' expr ')' | '{' label (',' label)* '}' | INT | 'X'
              | 'P' '(' expr ')' | 'D' '(' expr ')' | 'N' '(' 'X' ')'
              | MONOID '^' '(' expr ')'     # monoid-valued functor M^(F)
              | MONOID                      # constant functor on monoid values

``INT`` as an atom is the constant functor on the labels ``0 .. INT-1``.
Monoids are ``B`` (bool-or), ``N`` (nat-add), ``Z`` (int-add), ``W``
(word64-or) and ``Q`` (rational-add). Summands without a tag are tagged by
their position.

Examples: ``{F,T} * X * X``, ``P({a,b} * X)``, ``Q^(X)``,
``W * W^(4 * X^5)``, ``N(X)``, ``P(D(X))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Union

from .monoids import Monoid, is_monoid_symbol, monoid_by_name


@dataclass(frozen=True)
class Const:
    labels: tuple[str, ...]


@dataclass(frozen=True)
class StateVar:
    pass


@dataclass(frozen=True)
class MonoidConst:
    """Constant functor whose values are elements of a monoid (the ``M`` in ``M x M^(..)``)."""

    monoid: Monoid


@dataclass(frozen=True)
class Product:
    components: tuple["FunctorExpr", ...]


@dataclass(frozen=True)
class Coproduct:
    variants: tuple[tuple[str, "FunctorExpr"], ...]


@dataclass(frozen=True)
class Powerset:
    inner: "FunctorExpr"


@dataclass(frozen=True)
class MonoidValued:
    monoid: Monoid
    inner: "FunctorExpr"


@dataclass(frozen=True)
class Distribution:
    inner: "FunctorExpr"


@dataclass(frozen=True)
class Neighbourhood:
    """Monotone neighbourhood functor over the state set."""


FunctorExpr = Union[
    Const, StateVar, MonoidConst, Product, Coproduct, Powerset, MonoidValued, Distribution, Neighbourhood
]

X = StateVar()


class FunctorSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


_TOKEN = re.compile(
    r"""\s*(?:
        (?P<int>\d+)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_\-]*)
      | (?P<str>"(?:[^"\\]|\\.)*")
      | (?P<punct>[(){},*+^:])
    )""",
    re.VERBOSE,
)

def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise FunctorSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if kind == "str":
            value = unquote(value)
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


def unquote(s: str) -> str:
    return re.sub(r"\\(.)", r"\1", s[1:-1])


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, k: int = 0):
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def next(self):
        tok = self.tokens[self.i]
        if tok[0] != "eof":
            self.i += 1
        return tok

    def expect(self, value: str):
        kind, v, pos = self.next()
        if kind == "eof":
            raise FunctorSyntaxError(f"unexpected end of input, expected {value!r}", pos)
        if v != value or kind not in ("punct", "ident"):
            raise FunctorSyntaxError(f"expected {value!r}, got {v!r}", pos)

    def fail(self, what: str):
        kind, v, pos = self.peek()
        if kind == "eof":
            raise FunctorSyntaxError(f"unexpected end of input, expected {what}", pos)
        raise FunctorSyntaxError(f"expected {what}, got {v!r}", pos)

    def parse(self) -> FunctorExpr:
        e = self.expr()
        if self.peek()[0] != "eof":
            self.fail("end of input")
        return e

    def expr(self) -> FunctorExpr:
        summands = [self.summand()]
        while self.peek()[1] == "+" and self.peek()[0] == "punct":
            self.next()
            summands.append(self.summand())
        if len(summands) == 1 and summands[0][0] is None:
            return summands[0][1]
        variants = []
        seen = set()
        for idx, (tag, f) in enumerate(summands):
            tag = str(idx) if tag is None else tag
            if tag in seen:
                raise FunctorSyntaxError(f"duplicate variant tag {tag!r}", self.peek()[2])
            seen.add(tag)
            variants.append((tag, f))
        return Coproduct(tuple(variants))

    def summand(self):
        k0, v0, _ = self.peek()
        k1, v1, _ = self.peek(1)
        tag = None
        if k0 in ("ident", "int") and k1 == "punct" and v1 == ":":
            tag = v0
            self.next()
            self.next()
        return tag, self.product()

    def product(self) -> FunctorExpr:
        factors: list[FunctorExpr] = []
        spliced = False
        while True:
            atom = self.atom()
            if self.peek()[1] == "^" and self.peek()[0] == "punct":
                self.next()
                kind, v, pos = self.next()
                if kind != "int":
                    raise FunctorSyntaxError("expected exponent", pos)
                r = int(v)
                if r < 1:
                    raise FunctorSyntaxError("exponent must be at least 1", pos)
                factors.extend([atom] * r)
                spliced = True
            else:
                factors.append(atom)
            if self.peek()[1] == "*" and self.peek()[0] == "punct":
                self.next()
                continue
            break
        if len(factors) == 1 and not spliced:
            return factors[0]
        return Product(tuple(factors))

    def atom(self) -> FunctorExpr:
        kind, v, pos = self.peek()
        if kind == "punct" and v == "(":
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        if kind == "punct" and v == "{":
            self.next()
            labels = []
            if not (self.peek()[0] == "punct" and self.peek()[1] == "}"):
                while True:
                    lk, lv, lpos = self.next()
                    if lk not in ("ident", "int", "str"):
                        raise FunctorSyntaxError("expected label", lpos)
                    if lv in labels:
                        raise FunctorSyntaxError(f"duplicate label {lv!r}", lpos)
                    labels.append(lv)
                    if self.peek()[1] == "," and self.peek()[0] == "punct":
                        self.next()
                        continue
                    break
            self.expect("}")
            return Const(tuple(labels))
        if kind == "int":
            self.next()
            return Const(tuple(str(i) for i in range(int(v))))
        if kind == "ident":
            nxt = self.peek(1)
            is_hat_paren = nxt[1] == "^" and self.peek(2)[1] == "("
            if is_hat_paren:
                self.next()
                self.next()
                try:
                    monoid = monoid_by_name(v)
                except ValueError as exc:
                    raise FunctorSyntaxError(str(exc), pos) from None
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return MonoidValued(monoid, inner)
            if v in ("P", "D", "N") and nxt[1] == "(":
                self.next()
                self.next()
                if v == "N":
                    ipos = self.peek()[2]
                    inner = self.expr()
                    if inner != X:
                        raise FunctorSyntaxError("N(...) only supports the state variable X", ipos)
                    self.expect(")")
                    return Neighbourhood()
                inner = self.expr()
                self.expect(")")
                return Powerset(inner) if v == "P" else Distribution(inner)
            if v == "X":
                self.next()
                return X
            if is_monoid_symbol(v):
                self.next()
                return MonoidConst(monoid_by_name(v))
            raise FunctorSyntaxError(f"unknown functor name {v!r}", pos)
        self.fail("functor")


def parse_functor_expr(text: str) -> FunctorExpr:
    """Parse the concrete functor syntax described in the module docstring."""
    return _Parser(text).parse()


_BARE = re.compile(r"[A-Za-z_][A-Za-z0-9_\-]*|\d+")


def quote_label(label: str) -> str:
    if _BARE.fullmatch(label):
        return label
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_functor(f: FunctorExpr) -> str:
    """Render ``f`` in the concrete syntax; ``parse_functor_expr`` inverts it."""
    if isinstance(f, StateVar):
        return "X"
    if isinstance(f, Const):
        if f.labels == tuple(str(i) for i in range(len(f.labels))) and f.labels:
            return str(len(f.labels))
        return "{" + ", ".join(quote_label(lb) for lb in f.labels) + "}"
    if isinstance(f, MonoidConst):
        return f.monoid.symbol
    if isinstance(f, Product):
        parts = []
        for c in f.components:
            s = format_functor(c)
            if isinstance(c, (Product, Coproduct)):
                s = f"({s})"
            parts.append(s)
        if len(parts) == 1:
            return f"{parts[0]}^1"
        return " * ".join(parts)
    if isinstance(f, Coproduct):
        parts = []
        for tag, c in f.variants:
            s = format_functor(c)
            if isinstance(c, Coproduct):
                s = f"({s})"
            parts.append(f"{tag}: {s}")
        if len(parts) == 1:
            return f"({parts[0]})"
        return " + ".join(parts)
    if isinstance(f, Powerset):
        return f"P({format_functor(f.inner)})"
    if isinstance(f, Distribution):
        return f"D({format_functor(f.inner)})"
    if isinstance(f, MonoidValued):
        return f"{f.monoid.symbol}^({format_functor(f.inner)})"
    if isinstance(f, Neighbourhood):
        return "N(X)"
    raise TypeError(f"not a functor expression: {f!r}")


def contains(f: FunctorExpr, kind: type) -> bool:
    if isinstance(f, kind):
        return True
    if isinstance(f, Product):
        return any(contains(c, kind) for c in f.components)
    if isinstance(f, Coproduct):
        return any(contains(c, kind) for _, c in f.variants)
    if isinstance(f, (Powerset, MonoidValued, Distribution)):
        return contains(f.inner, kind)
    return False
