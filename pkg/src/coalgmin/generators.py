"""Deterministic generators for benchmark and test coalgebras.

All randomness comes from :class:`SplitMix64`, so a seed fixes the output
on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coalgebra import CoalgebraTable, build_table
from .functor import (
    Const, Coproduct, Distribution, MonoidConst, MonoidValued, Neighbourhood, Powerset, Product, StateVar, X,
)
from .monoids import BOOL_OR, INT_ADD, NAT_ADD, RATIONAL_ADD, WORD64_OR, Monoid, monoid_by_name
from .signature import map_term

MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 (golden-ratio increment, Stafford variant 13 finalizer)."""

    GAMMA = 0x9E3779B97F4A7C15
    MUL1 = 0xBF58476D1CE4E5B9
    MUL2 = 0x94D049BB133111EB

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + self.GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * self.MUL1) & MASK64
        z = ((z ^ (z >> 27)) * self.MUL2) & MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Integer in ``[0, bound)`` by multiply-shift (bias below 2^-32 for small bounds)."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return (self.next_u64() * bound) >> 64

    def between(self, lo: int, hi: int) -> int:
        """Integer in ``[lo, hi]``."""
        return lo + self.below(hi - lo + 1)

    def chance(self, num: int, den: int) -> bool:
        return self.below(den) < num

    def choice(self, seq):
        return seq[self.below(len(seq))]


def random_weight(rng: SplitMix64, monoid: Monoid, small: bool = False):
    """A random nonzero element of ``monoid``; ``small`` narrows the range to force collisions."""
    if monoid is BOOL_OR:
        return True
    if monoid is NAT_ADD:
        return rng.between(1, 3 if small else 100)
    if monoid is INT_ADD:
        v = rng.between(1, 2 if small else 50)
        return v if rng.chance(1, 2) else -v
    if monoid is WORD64_OR:
        if small:
            return 1 << rng.below(3)
        return rng.next_u64() or 1
    if monoid is RATIONAL_ADD:
        num = rng.between(1, 2 if small else 9)
        den = rng.between(1, 2 if small else 9)
        return Fraction(num if rng.chance(3, 4) else -num, den)
    raise ValueError(f"unsupported monoid {monoid!r}")


@dataclass
class WtaSpec:
    n: int
    r: int = 2
    monoid: str = "int-add"
    k: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.r < 1:
            raise ValueError("r must be at least 1")
        if self.k < 1:
            raise ValueError("k must be at least 1")


WTA_SYMBOLS = 4


def wta_functor(monoid: Monoid, r: int):
    return Product((MonoidConst(monoid), MonoidValued(monoid, Product((Const(tuple(map(str, range(WTA_SYMBOLS)))),) + (X,) * r))))


def gen_wta(spec: WtaSpec) -> CoalgebraTable:
    """Weighted tree automaton of type ``M * M^(4 * X^r)``.

    Every state gets a random output weight and ``k`` distinct random
    transitions (symbol, r-tuple of successors), each with a nonzero weight.
    """
    monoid = monoid_by_name(spec.monoid)
    rng = SplitMix64(spec.seed)
    n, r = spec.n, spec.r
    # cannot request more distinct keys than exist
    k = min(spec.k, WTA_SYMBOLS * n ** r)
    below = rng.below
    terms = []
    for _ in range(n):
        label = random_weight(rng, monoid)
        keys: dict = {}
        while len(keys) < k:
            key = (below(WTA_SYMBOLS),) + tuple(below(n) for _ in range(r))
            if key not in keys:
                keys[key] = random_weight(rng, monoid)
        terms.append((label, tuple(keys.items())))
    return build_table(wta_functor(monoid, r), terms, validate=False)


DFA_FUNCTOR = Product((Const(("F", "T")), X, X))
F_LABEL, T_LABEL = 0, 1


def gen_cycle_dfa(n: int) -> CoalgebraTable:
    """Deterministic automaton on a cycle: ``a`` loops, ``b`` steps forward, only state 0 accepts."""
    if n < 2:
        raise ValueError("cycle automaton needs n >= 2")
    terms = [(T_LABEL if i == 0 else F_LABEL, i, (i + 1) % n) for i in range(n)]
    return build_table(DFA_FUNCTOR, terms, validate=False)


def gen_chain_ts(n: int) -> CoalgebraTable:
    """Transition system ``0 -> 1 -> ... -> n-1`` with a deadlocked last state."""
    if n < 1:
        raise ValueError("chain needs n >= 1")
    terms = [(i + 1,) for i in range(n - 1)] + [()]
    return build_table(Powerset(X), terms, validate=False)


LADDER_FUNCTOR = Product((Const(("F", "T")), MonoidValued(RATIONAL_ADD, X)))


def gen_prob_ladder(n: int) -> CoalgebraTable:
    """Two chains of length ``n/2`` running in opposite directions, joined by rungs.

    The left column ``0 .. h-1`` steps down, the right column ``h .. n-1``
    steps up; rung ``i`` goes left to right for even ``i`` and right to left
    otherwise. Every drawn edge has weight 1/2; states 0 and n-1 accept.
    """
    if n < 4 or n % 2:
        raise ValueError("ladder needs an even n >= 4")
    h = n // 2
    half = Fraction(1, 2)
    edges: list[list] = [[] for _ in range(n)]
    for i in range(h - 1):
        edges[i].append(i + 1)
    for i in range(1, h):
        edges[h + i].append(h + i - 1)
    for i in range(h):
        if i % 2 == 0:
            edges[i].append(h + i)
        else:
            edges[h + i].append(i)
    terms = []
    for x in range(n):
        label = T_LABEL if x in (0, n - 1) else F_LABEL
        terms.append((label, tuple((y, half) for y in edges[x])))
    return build_table(LADDER_FUNCTOR, terms)


# --- random terms for property tests ---------------------------------------------

def random_term(rng: SplitMix64, f, n: int, width: int = 3, small: bool = True):
    """A random well-formed term of functor ``f`` over states ``0..n-1``."""
    if isinstance(f, StateVar):
        return rng.below(n)
    if isinstance(f, Const):
        return rng.below(len(f.labels))
    if isinstance(f, MonoidConst):
        return random_weight(rng, f.monoid, small)
    if isinstance(f, Product):
        return tuple(random_term(rng, c, n, width, small) for c in f.components)
    if isinstance(f, Coproduct):
        idx = rng.below(len(f.variants))
        return (idx, random_term(rng, f.variants[idx][1], n, width, small))
    if isinstance(f, Powerset):
        return tuple(random_term(rng, f.inner, n, width, small) for _ in range(rng.below(width + 1)))
    if isinstance(f, MonoidValued):
        out = []
        for _ in range(rng.below(width + 1)):
            out.append((random_term(rng, f.inner, n, width, small), random_weight(rng, f.monoid, small)))
        return tuple(out)
    if isinstance(f, Distribution):
        size = 1 + rng.below(width)
        parts = [rng.between(1, 2 if small else 6) for _ in range(size)]
        total = sum(parts)
        return tuple((random_term(rng, f.inner, n, width, small), Fraction(w, total)) for w in parts)
    if isinstance(f, Neighbourhood):
        return tuple(
            tuple(rng.below(n) for _ in range(rng.below(width + 1)))
            for _ in range(rng.below(width + 1))
        )
    raise TypeError(f"not a functor expression: {f!r}")


def random_table(rng: SplitMix64, f, n: int, width: int = 3, copies: bool = False) -> CoalgebraTable:
    """Random coalgebra; with ``copies`` it is built from a smaller core whose
    states are duplicated, so nontrivial equivalences are guaranteed."""
    if not copies or n < 2:
        return build_table(f, [random_term(rng, f, n, width) for _ in range(n)])
    core = max(1, n // (2 + rng.below(3)))
    core_terms = [random_term(rng, f, core, width) for _ in range(core)]
    owner = [x if x < core else rng.below(core) for x in range(n)]
    copies_of: list[list[int]] = [[] for _ in range(core)]
    for x, c in enumerate(owner):
        copies_of[c].append(x)

    class _Pick:
        def __getitem__(self, c):
            return rng.choice(copies_of[c])

    pick = _Pick()
    terms = [map_term(f, core_terms[owner[x]], pick) for x in range(n)]
    return build_table(f, terms)
