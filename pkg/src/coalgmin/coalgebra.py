"""Finite coalgebras stored as a table of successor terms with predecessor lists."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from .functor import FunctorExpr, Neighbourhood, contains
from .signature import TermError, compile_collector, normalize_term, validate_term


@dataclass(eq=False)
class CoalgebraTable:
    functor: FunctorExpr
    terms: list
    pred: list[list[int]]
    m: int
    initial: Optional[int] = None
    # remembered label order of an .aut file, for writing it back
    meta: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.terms)

    def same_structure(self, other: "CoalgebraTable") -> bool:
        """Equal functor and equal normalized terms, state by state."""
        if self.functor != other.functor or self.n != other.n:
            return False
        return all(
            normalize_term(self.functor, a) == normalize_term(self.functor, b)
            for a, b in zip(self.terms, other.terms)
        )


def _freeze(t: Any) -> Any:
    if isinstance(t, list):
        return tuple(_freeze(x) for x in t)
    if isinstance(t, tuple):
        return tuple(_freeze(x) for x in t)
    return t


def build_table(
    functor: FunctorExpr,
    terms: Sequence[Any],
    *,
    validate: bool = True,
    initial: Optional[int] = None,
) -> CoalgebraTable:
    """Validate ``terms`` against ``functor`` and precompute predecessors.

    Neighbourhood families are reduced to their minimal sets so stored terms
    are antichains. Raises :class:`TermError` naming the offending state.
    """
    n = len(terms)
    terms = [_freeze(t) for t in terms]
    if validate:
        for x, t in enumerate(terms):
            try:
                validate_term(functor, t, n)
            except TermError as exc:
                text = repr(t)
                if len(text) > 80:
                    text = text[:77] + "..."
                raise TermError(f"{exc.reason} in term {text}", exc.path, state=x) from None
    if contains(functor, Neighbourhood):
        terms = [normalize_term(functor, t) for t in terms]
    if initial is not None and not 0 <= initial < max(n, 1):
        raise ValueError(f"initial state {initial} out of range")
    collect = compile_collector(functor)
    pred: list[list[int]] = [[] for _ in range(n)]
    buf: list[int] = []
    for x, t in enumerate(terms):
        buf.clear()
        collect(t, buf)
        for y in set(buf):
            pred[y].append(x)
    # states are visited in increasing order, so every list is already sorted
    m = sum(len(p) for p in pred)
    return CoalgebraTable(functor, terms, pred, m, initial)
