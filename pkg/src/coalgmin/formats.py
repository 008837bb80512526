"""Readers and writers for ``.aut`` files, the textual coalgebra format and partition files.

Textual coalgebra format::

    # comments start with '#'
    {F,T} * X * X
    0: (F, 1, 2)
    1: (F, 3, 2)

Term syntax follows the functor: tuples ``(a, b)``, sets ``{1, 2}``,
weighted maps ``{1: 1/3, 2: 2/3}``, neighbourhoods ``{{1, 2}, {3}}`` and
variants ``tag(args)``. A variant whose payload is a product takes the
components directly as arguments; a variant whose payload is a one-label
constant may be written as the bare tag.
"""

from __future__ import annotations

import io
import re
from typing import IO, Iterable, Iterator, Optional, Sequence, Union

from .coalgebra import CoalgebraTable, build_table
from .functor import (
    Const, Coproduct, Distribution, FunctorExpr, FunctorSyntaxError, MonoidConst,
    MonoidValued, Neighbourhood, Powerset, Product, StateVar, X,
    format_functor, parse_functor_expr, quote_label, unquote,
)
from .monoids import RATIONAL_ADD
from .signature import TermError

Source = Union[str, IO[str], Iterable[str]]


class FormatError(ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _lines(src: Source) -> Iterator[str]:
    if isinstance(src, str):
        src = io.StringIO(src)
    for line in src:
        yield line.rstrip("\r\n").rstrip("\r")


# --- .aut ---------------------------------------------------------------------

_AUT_HEADER = re.compile(r"\s*des\s*\(\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*\)\s*")
_AUT_EDGE = re.compile(r'\s*\(\s*(\d+)\s*,\s*("(?:[^"\\]|\\.)*"|[^,()"]*?)\s*,\s*(\d+)\s*\)\s*')


def aut_functor(labels: Sequence[str]) -> FunctorExpr:
    return Powerset(Product((Const(tuple(labels)), X)))


def parse_aut(src: Source) -> CoalgebraTable:
    """Parse an Aldebaran ``.aut`` file into a ``P(labels * X)`` table.

    Labels are indexed in order of first occurrence.
    """
    lines = _lines(src)
    header = None
    lineno = 0
    for line in lines:
        lineno += 1
        if line.strip():
            header = _AUT_HEADER.fullmatch(line)
            if header is None:
                raise FormatError(f"malformed header {line.strip()!r}", lineno)
            break
    if header is None:
        raise FormatError("missing 'des (init, transitions, states)' header")
    initial, declared, n = (int(g) for g in header.groups())
    if n > 0 and initial >= n:
        raise FormatError(f"initial state {initial} out of range for {n} states", lineno)
    labels: dict[str, int] = {}
    terms: list[list] = [[] for _ in range(n)]
    count = 0
    for line in lines:
        lineno += 1
        if not line.strip():
            continue
        mt = _AUT_EDGE.fullmatch(line)
        if mt is None:
            raise FormatError(f"malformed transition {line.strip()!r}", lineno)
        src_s, label, dst_s = mt.groups()
        src_i, dst_i = int(src_s), int(dst_s)
        for s in (src_i, dst_i):
            if s >= n:
                raise FormatError(f"state {s} out of range for {n} states", lineno)
        if label.startswith('"'):
            label = unquote(label)
        idx = labels.setdefault(label, len(labels))
        terms[src_i].append((idx, dst_i))
        count += 1
    if count != declared:
        raise FormatError(f"header declares {declared} transitions, found {count}")
    table = build_table(aut_functor(list(labels)), terms, initial=initial if n else None, validate=False)
    table.meta["aut_transitions"] = count
    return table


def _aut_label(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def write_aut(table: CoalgebraTable, sink: IO[str]) -> None:
    f = table.functor
    if not (isinstance(f, Powerset) and isinstance(f.inner, Product)
            and len(f.inner.components) == 2 and isinstance(f.inner.components[0], Const)
            and isinstance(f.inner.components[1], StateVar)):
        raise ValueError(f"only P(labels * X) systems can be written as .aut, not {format_functor(f)}")
    labels = f.inner.components[0].labels
    total = sum(len(t) for t in table.terms)
    initial = table.initial if table.initial is not None else 0
    sink.write(f"des ({initial},{total},{table.n})\n")
    quoted = [_aut_label(lb) for lb in labels]
    for x, t in enumerate(table.terms):
        for lbl, y in t:
            sink.write(f"({x},{quoted[lbl]},{y})\n")


# --- textual coalgebra format -----------------------------------------------------

_TERM_TOKEN = re.compile(
    r"""\s*(?:
        (?P<num>-?(?:0[xX][0-9a-fA-F]+|\d+)(?:/\d+)?)
      | (?P<ident>[A-Za-z_][A-Za-z0-9_\-]*)
      | (?P<str>"(?:[^"\\]|\\.)*")
      | (?P<punct>[(){},:])
    )""",
    re.VERBOSE,
)


class _TermParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TERM_TOKEN.match(text, pos)
            if m is None:
                raise TermError(f"unexpected character {text[pos]!r} at offset {pos}")
            kind = m.lastgroup
            value = m.group(kind)
            self.tokens.append((kind, unquote(value) if kind == "str" else value, m.start(kind)))
            pos = m.end()
        self.tokens.append(("eof", "", len(text)))
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        if tok[0] != "eof":
            self.i += 1
        return tok

    def expect(self, value: str, path: str):
        kind, v, pos = self.next()
        if kind != "punct" or v != value:
            got = "end of line" if kind == "eof" else repr(v)
            raise TermError(f"expected {value!r}, got {got} at offset {pos}", path)

    def at(self, value: str) -> bool:
        kind, v, _ = self.peek()
        return kind == "punct" and v == value

    def items(self, close: str, path: str, item):
        out = []
        if self.at(close):
            self.next()
            return out
        while True:
            out.append(item(f"{path}{{{len(out)}}}"))
            if self.at(","):
                self.next()
                continue
            self.expect(close, path)
            return out

    def term(self, f: FunctorExpr, path: str = ""):
        if isinstance(f, StateVar):
            kind, v, pos = self.next()
            if kind != "num" or not v.isdigit():
                raise TermError(f"expected a state id, got {v!r} at offset {pos}", path)
            return int(v)
        if isinstance(f, Const):
            kind, v, pos = self.next()
            if kind not in ("ident", "num", "str") or v not in f.labels:
                raise TermError(f"expected one of the labels {', '.join(f.labels)}, got {v!r} at offset {pos}", path)
            return f.labels.index(v)
        if isinstance(f, MonoidConst):
            return self.weight(f.monoid, path)
        if isinstance(f, Product):
            self.expect("(", path)
            return self.components(f, path)
        if isinstance(f, Coproduct):
            kind, v, pos = self.next()
            tags = [tag for tag, _ in f.variants]
            if v not in tags:
                raise TermError(f"expected a variant tag ({', '.join(tags)}), got {v!r} at offset {pos}", path)
            idx = tags.index(v)
            sub = f.variants[idx][1]
            sub_path = f"{path}.{v}"
            if isinstance(sub, Const) and len(sub.labels) == 1 and not self.at("("):
                return (idx, 0)
            self.expect("(", sub_path)
            if isinstance(sub, Product):
                return (idx, self.components(sub, sub_path))
            payload = self.term(sub, sub_path)
            self.expect(")", sub_path)
            return (idx, payload)
        if isinstance(f, Powerset):
            self.expect("{", path)
            return tuple(self.items("}", path, lambda p: self.term(f.inner, p)))
        if isinstance(f, (MonoidValued, Distribution)):
            monoid = f.monoid if isinstance(f, MonoidValued) else RATIONAL_ADD
            self.expect("{", path)

            def entry(p):
                key = self.term(f.inner, p)
                self.expect(":", p)
                return (key, self.weight(monoid, p))

            return tuple(self.items("}", path, entry))
        if isinstance(f, Neighbourhood):
            self.expect("{", path)

            def atom(p):
                self.expect("{", p)
                return tuple(self.items("}", p, lambda q: self.term(X, q)))

            return tuple(self.items("}", path, atom))
        raise TypeError(f"not a functor expression: {f!r}")

    def components(self, f: Product, path: str):
        out = []
        for i, c in enumerate(f.components):
            if i:
                self.expect(",", path)
            out.append(self.term(c, f"{path}[{i}]"))
        self.expect(")", path)
        return tuple(out)

    def weight(self, monoid, path):
        kind, v, pos = self.next()
        if kind not in ("num", "ident"):
            raise TermError(f"expected a {monoid.name} value, got {v!r} at offset {pos}", path)
        try:
            return monoid.normalize(monoid.parse(v))
        except ValueError as exc:
            raise TermError(f"invalid {monoid.name} value {v!r}: {exc}", path) from None

    def done(self, path=""):
        kind, v, pos = self.peek()
        if kind != "eof":
            raise TermError(f"unexpected {v!r} at offset {pos}", path)


def parse_term(f: FunctorExpr, text: str):
    """Parse one successor term written in the textual syntax of ``f``."""
    p = _TermParser(text)
    t = p.term(f)
    p.done()
    return t


def _strip_comment(line: str) -> str:
    in_str = False
    escaped = False
    for i, ch in enumerate(line):
        if escaped:
            escaped = False
        elif ch == "\\":
            escaped = in_str
        elif ch == '"':
            in_str = not in_str
        elif ch == "#" and not in_str:
            return line[:i]
    return line


_STATE_LINE = re.compile(r"\s*(\d+)\s*:(.*)")


def parse_coalg_text(src: Source) -> CoalgebraTable:
    functor = None
    found: dict[int, tuple] = {}
    line_of: dict[int, int] = {}
    for lineno, raw in enumerate(_lines(src), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if functor is None:
            try:
                functor = parse_functor_expr(line)
            except FunctorSyntaxError as exc:
                raise FormatError(f"bad functor expression: {exc}", lineno) from None
            continue
        m = _STATE_LINE.fullmatch(line)
        if m is None:
            raise FormatError(f"expected '<state>: <term>', got {line!r}", lineno)
        x = int(m.group(1))
        if x in found:
            raise FormatError(f"state {x} defined twice (first on line {line_of[x]})", lineno)
        try:
            found[x] = parse_term(functor, m.group(2))
        except TermError as exc:
            raise FormatError(f"state {x}: {exc}", lineno) from None
        line_of[x] = lineno
    if functor is None:
        raise FormatError("missing functor line")
    n = max(found) + 1 if found else 0
    missing = [x for x in range(n) if x not in found]
    if missing:
        raise FormatError(f"missing definition for state {missing[0]}")
    terms = [found[x] for x in range(n)]
    try:
        return build_table(functor, terms)
    except TermError as exc:
        line = line_of.get(exc.state) if exc.state is not None else None
        raise FormatError(str(exc), line) from None


def format_term(f: FunctorExpr, t) -> str:
    if isinstance(f, StateVar):
        return str(t)
    if isinstance(f, Const):
        return quote_label(f.labels[t])
    if isinstance(f, MonoidConst):
        return f.monoid.format(t)
    if isinstance(f, Product):
        return "(" + ", ".join(format_term(c, x) for c, x in zip(f.components, t)) + ")"
    if isinstance(f, Coproduct):
        idx, payload = t
        tag, sub = f.variants[idx]
        if isinstance(sub, Const) and len(sub.labels) == 1:
            return tag
        if isinstance(sub, Product):
            return tag + format_term(sub, payload)
        return f"{tag}({format_term(sub, payload)})"
    if isinstance(f, Powerset):
        return "{" + ", ".join(format_term(f.inner, c) for c in t) + "}"
    if isinstance(f, (MonoidValued, Distribution)):
        monoid = f.monoid if isinstance(f, MonoidValued) else RATIONAL_ADD
        return "{" + ", ".join(f"{format_term(f.inner, c)}: {monoid.format(w)}" for c, w in t) + "}"
    if isinstance(f, Neighbourhood):
        return "{" + ", ".join("{" + ", ".join(map(str, s)) + "}" for s in t) + "}"
    raise TypeError(f"not a functor expression: {f!r}")


def write_coalg_text(table: CoalgebraTable, sink: IO[str]) -> None:
    f = table.functor
    sink.write(format_functor(f) + "\n")
    for x, t in enumerate(table.terms):
        sink.write(f"{x}: {format_term(f, t)}\n")


def coalg_text(table: CoalgebraTable) -> str:
    buf = io.StringIO()
    write_coalg_text(table, buf)
    return buf.getvalue()


# --- partitions ---------------------------------------------------------------

def write_partition(assignment: Sequence[int], sink: IO[str]) -> None:
    """``blocks <b>`` followed by one ``<state> <block>`` line per state."""
    b = max(assignment) + 1 if len(assignment) else 0
    sink.write(f"blocks {b}\n")
    sink.write("".join(f"{x} {blk}\n" for x, blk in enumerate(assignment)))


def read_partition(src: Source) -> list[int]:
    count = None
    found: dict[int, int] = {}
    for lineno, raw in enumerate(_lines(src), 1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        parts = line.split()
        if count is None:
            if len(parts) != 2 or parts[0] != "blocks" or not parts[1].isdigit():
                raise FormatError(f"expected 'blocks <b>', got {line!r}", lineno)
            count = int(parts[1])
            continue
        if len(parts) != 2 or not parts[0].isdigit() or not parts[1].isdigit():
            raise FormatError(f"expected '<state> <block>', got {line!r}", lineno)
        x, blk = int(parts[0]), int(parts[1])
        if x in found:
            raise FormatError(f"state {x} assigned twice", lineno)
        if blk >= count:
            raise FormatError(f"block {blk} out of range for {count} blocks", lineno)
        found[x] = blk
    if count is None:
        raise FormatError("missing 'blocks <b>' header")
    n = max(found) + 1 if found else 0
    for x in range(n):
        if x not in found:
            raise FormatError(f"missing block for state {x}")
    return [found[x] for x in range(n)]
