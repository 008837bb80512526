"""Commutative monoids usable as weights in ``M^(X)`` and as constant labels.

Every monoid fixes a zero, an addition, a canonical fixed-width byte encoding
and a textual literal syntax. Values that do not fit the declared width raise
:class:`ArithmeticOverflow` instead of wrapping around.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1
UINT64_MAX = 2**64 - 1


class ArithmeticOverflow(ArithmeticError):
    """A monoid value left the representable fixed-width range."""


_pack_q = struct.Struct("<q").pack
_pack_Q = struct.Struct("<Q").pack
_pack_qq = struct.Struct("<qq").pack


def _check_int64(v: int) -> int:
    if not INT64_MIN <= v <= INT64_MAX:
        raise ArithmeticOverflow(f"int64 overflow: {v}")
    return v


def _check_uint64(v: int) -> int:
    if not 0 <= v <= UINT64_MAX:
        raise ArithmeticOverflow(f"uint64 overflow: {v}")
    return v


def _check_rational(v: Fraction) -> Fraction:
    if not (INT64_MIN <= v.numerator <= INT64_MAX and v.denominator <= INT64_MAX):
        raise ArithmeticOverflow(f"rational overflow: {v}")
    return v


def _parse_int(text: str) -> int:
    t = text.strip().lower()
    neg = t.startswith("-")
    if neg:
        t = t[1:]
    v = int(t, 16) if t.startswith("0x") else int(t, 10)
    return -v if neg else v


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true"):
        return True
    if t in ("0", "false"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_rational(text: str) -> Fraction:
    t = text.strip()
    if "/" in t:
        num, den = t.split("/", 1)
        if int(den) == 0:
            raise ValueError(f"zero denominator: {text!r}")
        return Fraction(int(num), int(den))
    return Fraction(int(t))


def _or(a: int, b: int) -> int:
    return a | b


def _add(a: Any, b: Any) -> Any:
    return a + b


@dataclass(frozen=True, eq=False)
class Monoid:
    name: str
    symbol: str
    zero: Any
    add: Callable[[Any, Any], Any]
    check: Callable[[Any], Any]
    pack: Callable[[Any], bytes]
    width: int
    parse: Callable[[str], Any]

    def __repr__(self) -> str:
        return f"Monoid({self.name})"

    def encode(self, value: Any) -> bytes:
        """Canonical little-endian bytes of ``value`` (range-checked)."""
        return self.pack(self.check(value))

    def decode(self, data: bytes, offset: int = 0) -> Any:
        if self is RATIONAL_ADD:
            num, den = struct.unpack_from("<qq", data, offset)
            return Fraction(num, den)
        if self is BOOL_OR:
            return bool(data[offset])
        fmt = "<q" if self is INT_ADD else "<Q"
        return struct.unpack_from(fmt, data, offset)[0]

    def format(self, value: Any) -> str:
        if self is BOOL_OR:
            return "1" if value else "0"
        if self is RATIONAL_ADD:
            v = Fraction(value)
            return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        return str(int(value))

    def normalize(self, value: Any) -> Any:
        """Coerce a literal-ish value into this monoid's canonical Python type."""
        if self is BOOL_OR:
            return bool(value)
        if self is RATIONAL_ADD:
            return self.check(Fraction(value))
        return self.check(int(value))


BOOL_OR = Monoid(
    "bool-or", "B", False, lambda a, b: a or b, lambda v: bool(v),
    lambda v: b"\x01" if v else b"\x00", 1, _parse_bool,
)
NAT_ADD = Monoid("nat-add", "N", 0, _add, _check_uint64, _pack_Q, 8, _parse_int)
INT_ADD = Monoid("int-add", "Z", 0, _add, _check_int64, _pack_q, 8, _parse_int)
WORD64_OR = Monoid("word64-or", "W", 0, _or, _check_uint64, _pack_Q, 8, _parse_int)
RATIONAL_ADD = Monoid(
    "rational-add", "Q", Fraction(0), _add, _check_rational,
    lambda v: _pack_qq(v.numerator, v.denominator), 16, _parse_rational,
)

MONOIDS = (BOOL_OR, NAT_ADD, INT_ADD, WORD64_OR, RATIONAL_ADD)

_BY_NAME = {}
for _m in MONOIDS:
    _BY_NAME[_m.name] = _m
    _BY_NAME[_m.symbol] = _m
_BY_NAME.update({"bool": BOOL_OR, "nat": NAT_ADD, "int": INT_ADD, "word": WORD64_OR, "rat": RATIONAL_ADD})


def monoid_by_name(name: str) -> Monoid:
    try:
        return _BY_NAME[name]
    except KeyError:
        known = ", ".join(f"{m.symbol} ({m.name})" for m in MONOIDS)
        raise ValueError(f"unknown monoid {name!r}; known: {known}") from None


def is_monoid_symbol(name: str) -> bool:
    return name in _BY_NAME
