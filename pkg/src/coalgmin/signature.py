"""Canonical signatures of successor structures, and renumbering.

Successor terms are plain nested Python values whose shape follows the
functor expression:

=================  ==============================================
functor            term
=================  ==============================================
``Const``          label index (``int``)
``StateVar``       state id (``int``)
``MonoidConst``    monoid value (``bool``/``int``/``Fraction``)
``Product``        tuple with one entry per component
``Coproduct``      ``(variant_index, payload)``
``Powerset``       tuple of child terms
``MonoidValued``   tuple of ``(child, weight)`` pairs
``Distribution``   tuple of ``(child, Fraction)`` pairs
``Neighbourhood``  tuple of tuples of state ids (the minimal sets)
=================  ==============================================

``encode_sig(f, t, p)`` returns bytes that are equal for two terms exactly
when ``F[p]`` maps them to the same element. Layout (version 1): all counts,
labels, tags and block numbers are little-endian ``uint32``; weights use the
monoid's fixed-width encoding. The layout is internal and may change.
"""

from __future__ import annotations

import struct
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Optional, Sequence

from .functor import (
    Const, Coproduct, Distribution, FunctorExpr, MonoidConst, MonoidValued,
    Neighbourhood, Powerset, Product, StateVar,
)
from .monoids import BOOL_OR, INT_ADD, NAT_ADD, RATIONAL_ADD, WORD64_OR, ArithmeticOverflow

SIG_FORMAT_VERSION = 1

Encoder = Callable[[Any, Sequence[int]], bytes]

_U32 = struct.Struct("<I")
_pack_u32 = _U32.pack
_MONOID_CODE = {NAT_ADD: "Q", WORD64_OR: "Q", INT_ADD: "q"}


class TermError(ValueError):
    """A successor term does not match its functor expression."""

    def __init__(self, message: str, path: str = "", state: Optional[int] = None):
        self.reason = message
        self.path = path
        self.state = state
        where = []
        if state is not None:
            where.append(f"state {state}")
        if path:
            where.append(f"at {path}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class _Identity:
    __slots__ = ()

    def __getitem__(self, i: int) -> int:
        return i


IDENTITY = _Identity()


def _scalar_code(f: FunctorExpr) -> Optional[str]:
    if isinstance(f, (Const, StateVar)):
        return "I"
    if isinstance(f, MonoidConst):
        return _MONOID_CODE.get(f.monoid)
    return None


def _pack_overflow(pack, args):
    try:
        return pack(*args)
    except struct.error as exc:
        raise ArithmeticOverflow(str(exc)) from None


@lru_cache(maxsize=None)
def compile_encoder(f: FunctorExpr) -> Encoder:
    """Build a fast ``(term, p) -> bytes`` function for ``f``."""
    if isinstance(f, StateVar):
        return lambda t, p: _pack_u32(p[t])
    if isinstance(f, Const):
        return lambda t, p: _pack_u32(t)
    if isinstance(f, MonoidConst):
        encode = f.monoid.encode
        return lambda t, p: encode(t)
    if isinstance(f, Product):
        return _compile_product(f)
    if isinstance(f, Coproduct):
        encs = [compile_encoder(c) for _, c in f.variants]

        def enc_coproduct(t, p):
            tag, payload = t
            return _pack_u32(tag) + encs[tag](payload, p)

        return enc_coproduct
    if isinstance(f, Powerset):
        return _compile_powerset(f)
    if isinstance(f, MonoidValued):
        return _compile_weighted(f.inner, f.monoid, drop_zero=True)
    if isinstance(f, Distribution):
        return _compile_weighted(f.inner, RATIONAL_ADD, drop_zero=False)
    if isinstance(f, Neighbourhood):
        return _encode_neighbourhood
    raise TypeError(f"not a functor expression: {f!r}")


def _compile_product(f: Product) -> Encoder:
    comps = f.components
    codes = [_scalar_code(c) for c in comps]
    if all(codes):
        pack = struct.Struct("<" + "".join(codes)).pack
        var_pos = tuple(i for i, c in enumerate(comps) if isinstance(c, StateVar))
        if len(var_pos) == len(comps):
            return lambda t, p: pack(*[p[x] for x in t])
        if not var_pos:
            return lambda t, p: _pack_overflow(pack, t)

        def enc_flat(t, p):
            v = list(t)
            for i in var_pos:
                v[i] = p[v[i]]
            return pack(*v)

        return enc_flat
    encs = [compile_encoder(c) for c in comps]
    return lambda t, p: b"".join([e(x, p) for e, x in zip(encs, t)])


def _compile_powerset(f: Powerset) -> Encoder:
    if isinstance(f.inner, StateVar):
        def enc_set_of_states(t, p):
            vals = sorted({p[x] for x in t})
            return struct.pack(f"<{len(vals) + 1}I", len(vals), *vals)

        return enc_set_of_states
    cenc = compile_encoder(f.inner)

    def enc_set(t, p):
        children = sorted({cenc(c, p) for c in t})
        return _pack_u32(len(children)) + b"".join(children)

    return enc_set


def _compile_weighted(inner: FunctorExpr, monoid, drop_zero: bool) -> Encoder:
    add = monoid.add
    zero = monoid.zero
    check = monoid.check
    wpack = monoid.pack
    states_only = isinstance(inner, StateVar)
    kenc = None if states_only else compile_encoder(inner)

    def enc_weighted(t, p):
        acc: dict = {}
        if states_only:
            for child, w in t:
                k = p[child]
                acc[k] = add(acc[k], w) if k in acc else w
        else:
            for child, w in t:
                k = kenc(child, p)
                acc[k] = add(acc[k], w) if k in acc else w
        parts = [b""]
        count = 0
        for k, w in sorted(acc.items()):
            if drop_zero and w == zero:
                continue
            count += 1
            parts.append(_pack_u32(k) if states_only else k)
            parts.append(wpack(check(w)))
        parts[0] = _pack_u32(count)
        return b"".join(parts)

    return enc_weighted


def minimal_sets(sets) -> list[tuple[int, ...]]:
    """Deduplicate a family of sets and drop every set that strictly contains another.

    Returns the surviving sets as sorted tuples, in sorted order.
    """
    distinct = {tuple(sorted(set(s))) for s in sets}
    by_size = sorted(distinct, key=len)
    kept: list[tuple[int, ...]] = []
    kept_sets: list[frozenset] = []
    for s in by_size:
        fs = frozenset(s)
        # distinct sets of equal size are never subsets of each other
        if not any(k <= fs for k in kept_sets):
            kept.append(s)
            kept_sets.append(fs)
    kept.sort()
    return kept


def _encode_neighbourhood(t, p) -> bytes:
    atoms = minimal_sets([[p[x] for x in s] for s in t])
    parts = [_pack_u32(len(atoms))]
    for a in atoms:
        parts.append(struct.pack(f"<{len(a) + 1}I", len(a), *a))
    return b"".join(parts)


def encode_sig(f: FunctorExpr, t: Any, p: Sequence[int]) -> bytes:
    """Canonical bytes of ``F[p](t)``; ``p`` maps state ids to block numbers."""
    return compile_encoder(f)(t, p)


# --- decoding (debugging and tests) -----------------------------------------

def decode_sig(f: FunctorExpr, data: bytes):
    """Decode signature bytes into a hashable normal form.

    Sets become frozensets, weighted maps frozensets of ``(key, weight)``
    pairs, products tuples and variants ``(tag, payload)``.
    """
    value, end = _decode(f, data, 0)
    if end != len(data):
        raise ValueError(f"trailing bytes after offset {end}")
    return value


def _decode(f, data, off):
    if isinstance(f, (StateVar, Const)):
        return _U32.unpack_from(data, off)[0], off + 4
    if isinstance(f, MonoidConst):
        return f.monoid.decode(data, off), off + f.monoid.width
    if isinstance(f, Product):
        out = []
        for c in f.components:
            v, off = _decode(c, data, off)
            out.append(v)
        return tuple(out), off
    if isinstance(f, Coproduct):
        tag = _U32.unpack_from(data, off)[0]
        v, off = _decode(f.variants[tag][1], data, off + 4)
        return (tag, v), off
    count = _U32.unpack_from(data, off)[0]
    off += 4
    if isinstance(f, Powerset):
        out = []
        for _ in range(count):
            v, off = _decode(f.inner, data, off)
            out.append(v)
        return frozenset(out), off
    if isinstance(f, (MonoidValued, Distribution)):
        monoid = f.monoid if isinstance(f, MonoidValued) else RATIONAL_ADD
        out = []
        for _ in range(count):
            k, off = _decode(f.inner, data, off)
            out.append((k, monoid.decode(data, off)))
            off += monoid.width
        return frozenset(out), off
    if isinstance(f, Neighbourhood):
        out = []
        for _ in range(count):
            size = _U32.unpack_from(data, off)[0]
            out.append(frozenset(struct.unpack_from(f"<{size}I", data, off + 4)))
            off += 4 + 4 * size
        return frozenset(out), off
    raise TypeError(f"not a functor expression: {f!r}")


# --- successors ---------------------------------------------------------------

def _has_states(f: FunctorExpr) -> bool:
    if isinstance(f, (StateVar, Neighbourhood)):
        return True
    if isinstance(f, Product):
        return any(_has_states(c) for c in f.components)
    if isinstance(f, Coproduct):
        return any(_has_states(c) for _, c in f.variants)
    if isinstance(f, (Powerset, MonoidValued, Distribution)):
        return _has_states(f.inner)
    return False


@lru_cache(maxsize=None)
def compile_collector(f: FunctorExpr) -> Callable[[Any, list], None]:
    """Build a function appending every state id occurring in a term to a list."""
    if not _has_states(f):
        return lambda t, out: None
    if isinstance(f, StateVar):
        return lambda t, out: out.append(t)
    if isinstance(f, Product):
        subs = [(i, compile_collector(c)) for i, c in enumerate(f.components) if _has_states(c)]
        if all(isinstance(f.components[i], StateVar) for i, _ in subs):
            idx = [i for i, _ in subs]
            return lambda t, out: out.extend([t[i] for i in idx])

        def coll_product(t, out):
            for i, c in subs:
                c(t[i], out)

        return coll_product
    if isinstance(f, Coproduct):
        subs = [compile_collector(c) for _, c in f.variants]

        def coll_coproduct(t, out):
            subs[t[0]](t[1], out)

        return coll_coproduct
    if isinstance(f, Powerset):
        if isinstance(f.inner, StateVar):
            return lambda t, out: out.extend(t)
        sub = compile_collector(f.inner)

        def coll_set(t, out):
            for c in t:
                sub(c, out)

        return coll_set
    if isinstance(f, (MonoidValued, Distribution)):
        if isinstance(f.inner, StateVar):
            return lambda t, out: out.extend([c for c, _ in t])
        sub = compile_collector(f.inner)

        def coll_weighted(t, out):
            for c, _ in t:
                sub(c, out)

        return coll_weighted
    if isinstance(f, Neighbourhood):
        def coll_nbhd(t, out):
            for s in t:
                out.extend(s)

        return coll_nbhd
    raise TypeError(f"not a functor expression: {f!r}")


def successors(f: FunctorExpr, t: Any) -> set[int]:
    """The set of state ids occurring anywhere in ``t``."""
    out: list[int] = []
    compile_collector(f)(t, out)
    return set(out)


# --- substitution and normalization ---------------------------------------------

def map_term(f: FunctorExpr, t: Any, g) -> Any:
    """Replace every state ``s`` in ``t`` by ``g[s]``, without normalizing."""
    if isinstance(f, StateVar):
        return g[t]
    if isinstance(f, (Const, MonoidConst)):
        return t
    if isinstance(f, Product):
        return tuple(map_term(c, x, g) for c, x in zip(f.components, t))
    if isinstance(f, Coproduct):
        tag, payload = t
        return (tag, map_term(f.variants[tag][1], payload, g))
    if isinstance(f, Powerset):
        return tuple(map_term(f.inner, c, g) for c in t)
    if isinstance(f, (MonoidValued, Distribution)):
        return tuple((map_term(f.inner, c, g), w) for c, w in t)
    if isinstance(f, Neighbourhood):
        return tuple(tuple(g[x] for x in s) for s in t)
    raise TypeError(f"not a functor expression: {f!r}")


def normalize_term(f: FunctorExpr, t: Any) -> Any:
    """Canonical representative of ``t``: sets deduplicated and sorted, weights
    merged (zeros dropped for monoid weights), neighbourhoods reduced to their
    minimal sets."""
    if isinstance(f, (StateVar, Const, MonoidConst)):
        return t
    if isinstance(f, Product):
        return tuple(normalize_term(c, x) for c, x in zip(f.components, t))
    if isinstance(f, Coproduct):
        tag, payload = t
        return (tag, normalize_term(f.variants[tag][1], payload))
    enc = compile_encoder(f.inner) if isinstance(f, (Powerset, MonoidValued, Distribution)) else None
    if isinstance(f, Powerset):
        keyed = {}
        for c in t:
            c = normalize_term(f.inner, c)
            keyed[enc(c, IDENTITY)] = c
        return tuple(keyed[k] for k in sorted(keyed))
    if isinstance(f, (MonoidValued, Distribution)):
        monoid = f.monoid if isinstance(f, MonoidValued) else RATIONAL_ADD
        keyed: dict = {}
        for c, w in t:
            c = normalize_term(f.inner, c)
            k = enc(c, IDENTITY)
            if k in keyed:
                keyed[k] = (c, monoid.add(keyed[k][1], w))
            else:
                keyed[k] = (c, w)
        out = []
        for k in sorted(keyed):
            c, w = keyed[k]
            if w == monoid.zero:
                continue
            out.append((c, monoid.normalize(w)))
        return tuple(out)
    if isinstance(f, Neighbourhood):
        return tuple(minimal_sets(t))
    raise TypeError(f"not a functor expression: {f!r}")


# --- validation ---------------------------------------------------------------

def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def validate_term(f: FunctorExpr, t: Any, n: int, path: str = "") -> None:
    """Raise :class:`TermError` unless ``t`` is a well-formed term over states ``0..n-1``."""
    if isinstance(f, StateVar):
        if not _is_int(t):
            raise TermError(f"expected a state id, got {t!r}", path)
        if not 0 <= t < n:
            raise TermError(f"state reference {t} out of range 0..{n - 1}", path)
        return
    if isinstance(f, Const):
        if not _is_int(t) or not 0 <= t < len(f.labels):
            raise TermError(f"expected a label index below {len(f.labels)}, got {t!r}", path)
        return
    if isinstance(f, MonoidConst):
        _validate_weight(f.monoid, t, path, allow_zero=True)
        return
    if not isinstance(t, (tuple, list)):
        raise TermError(f"expected a sequence, got {t!r}", path)
    if isinstance(f, Product):
        if len(t) != len(f.components):
            raise TermError(f"expected {len(f.components)} components, got {len(t)}", path)
        for i, (c, x) in enumerate(zip(f.components, t)):
            validate_term(c, x, n, f"{path}[{i}]")
        return
    if isinstance(f, Coproduct):
        if len(t) != 2 or not _is_int(t[0]) or not 0 <= t[0] < len(f.variants):
            raise TermError(f"expected (variant, payload), got {t!r}", path)
        tag, sub = f.variants[t[0]]
        validate_term(sub, t[1], n, f"{path}.{tag}")
        return
    if isinstance(f, Powerset):
        for i, c in enumerate(t):
            validate_term(f.inner, c, n, f"{path}{{{i}}}")
        return
    if isinstance(f, (MonoidValued, Distribution)):
        monoid = f.monoid if isinstance(f, MonoidValued) else RATIONAL_ADD
        total = Fraction(0)
        for i, entry in enumerate(t):
            if not isinstance(entry, (tuple, list)) or len(entry) != 2:
                raise TermError(f"expected (key, weight), got {entry!r}", f"{path}{{{i}}}")
            c, w = entry
            validate_term(f.inner, c, n, f"{path}{{{i}}}")
            _validate_weight(monoid, w, f"{path}{{{i}}}", allow_zero=False)
            if isinstance(f, Distribution):
                if w <= 0:
                    raise TermError(f"distribution weight must be positive, got {w}", path)
                total += w
        if isinstance(f, Distribution) and total != 1:
            raise TermError(f"distribution does not sum to 1 (sum is {total})", path)
        return
    if isinstance(f, Neighbourhood):
        for i, s in enumerate(t):
            if not isinstance(s, (tuple, list)):
                raise TermError(f"expected a set of states, got {s!r}", f"{path}{{{i}}}")
            for x in s:
                if not _is_int(x) or not 0 <= x < n:
                    raise TermError(f"state reference {x!r} out of range 0..{n - 1}", f"{path}{{{i}}}")
        return
    raise TypeError(f"not a functor expression: {f!r}")


def _validate_weight(monoid, w, path, allow_zero):
    if monoid is BOOL_OR:
        ok = isinstance(w, bool) or w in (0, 1)
    elif monoid is RATIONAL_ADD:
        ok = isinstance(w, (int, Fraction)) and not isinstance(w, bool)
    else:
        ok = _is_int(w)
    if not ok:
        raise TermError(f"invalid {monoid.name} value {w!r}", path)
    if not allow_zero and w == monoid.zero:
        raise TermError(f"zero weight in {monoid.name} map", path)
    try:
        monoid.check(w)
    except ArithmeticOverflow as exc:
        raise TermError(str(exc), path) from None


# --- renumbering --------------------------------------------------------------

def renumber(sigs: Sequence[bytes]) -> list[int]:
    """Dense ids with equal ids exactly for equal signatures, numbered by first occurrence."""
    ids: dict = {}
    return [ids.setdefault(s, len(ids)) for s in sigs]


def renumber_prime(sigs_dirty: Sequence[bytes], sig_clean: Optional[bytes]) -> list[int]:
    """Sub-block numbers for a block's dirty states.

    Dirty states sharing the clean signature get 0, so they stay with the
    clean states; when no dirty signature matches, sub-block 0 holds the clean
    states alone and the dirty groups are numbered from 1.
    """
    if sig_clean is None:
        return renumber(sigs_dirty)
    ids = {sig_clean: 0}
    return [ids.setdefault(s, len(ids)) for s in sigs_dirty]
