"""Minimization: the naive final-chain loop, the optimized worklist algorithm,
stability checks and quotient construction."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

from .coalgebra import CoalgebraTable, build_table
from .partition import RefinablePartition
from .signature import compile_encoder, map_term, normalize_term, renumber, renumber_prime


@dataclass
class InstrumentationStats:
    sig_calls: int = 0
    mark_dirty_calls: int = 0
    max_block_moves: int = 0
    iterations: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class PartitionResult:
    assignment: list[int]
    block_count: int
    stats: InstrumentationStats = field(default_factory=InstrumentationStats)
    algorithm: str = "optimized"

    def blocks(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.block_count)]
        for x, b in enumerate(self.assignment):
            out[b].append(x)
        return out

    def representatives(self) -> list[int]:
        """Least state of every block, indexed by block number."""
        reps = [-1] * self.block_count
        for x, b in enumerate(self.assignment):
            if reps[b] < 0:
                reps[b] = x
        return reps


def ceil_log2(n: int) -> int:
    return (n - 1).bit_length() if n > 1 else 0


def complexity_bounds(n: int, m: int) -> dict:
    lg = ceil_log2(n)
    return {
        "sig_calls": 2 * (m * lg + n),
        "mark_dirty_calls": m * lg + n,
        "max_block_moves": lg,
    }


def bound_violations(stats: InstrumentationStats, n: int, m: int) -> list[str]:
    """Human-readable list of counters exceeding their theoretical bound."""
    out = []
    for key, limit in complexity_bounds(n, m).items():
        value = getattr(stats, key)
        if value > limit:
            out.append(f"{key} = {value} exceeds bound {limit}")
    return out


def _empty_result(algorithm: str) -> PartitionResult:
    return PartitionResult([], 0, InstrumentationStats(), algorithm)


def naive_minimize(
    table: CoalgebraTable,
    on_iteration: Optional[Callable[[list[int]], None]] = None,
) -> PartitionResult:
    """Final-chain partitioning: recompute all signatures until the block count is stable.

    ``on_iteration`` receives the partition produced by every pass.
    """
    n = table.n
    if n == 0:
        return _empty_result("naive")
    enc = compile_encoder(table.functor)
    terms = table.terms
    stats = InstrumentationStats()
    p = [0] * n
    count = 1
    while True:
        stats.iterations += 1
        q = renumber([enc(t, p) for t in terms])
        stats.sig_calls += n
        if on_iteration is not None:
            on_iteration(q)
        new_count = max(q) + 1
        p = q
        if new_count == count:
            break
        count = new_count
    return PartitionResult(p, count, stats, "naive")


def minimize(table: CoalgebraTable, audit: bool = False) -> PartitionResult:
    """Optimized partition refinement; ``audit`` re-checks partition invariants after every step."""
    n = table.n
    if n == 0:
        return _empty_result("optimized")
    enc = compile_encoder(table.functor)
    terms = table.terms
    pred = table.pred
    part = RefinablePartition(n)
    p = part.block_of
    mids, ends, starts = part.mids, part.ends, part.starts
    mark_dirty = part.mark_dirty
    stats = InstrumentationStats(mark_dirty_calls=n)
    sig_calls = 0
    marks = 0
    iterations = 0
    while part.worklist:
        b = part.worklist.pop()
        iterations += 1
        if ends[b] - starts[b] == 1:
            # a singleton cannot split, its signature is irrelevant
            mids[b] = ends[b]
            continue
        dirty = part.dirty_states(b)
        sigs = [enc(terms[x], p) for x in dirty]
        sig_calls += len(dirty)
        c = part.one_clean(b)
        sig_clean = None
        if c is not None:
            sig_clean = enc(terms[c], p)
            sig_calls += 1
        new_blocks = part.split(b, renumber_prime(sigs, sig_clean))
        for nb in new_blocks:
            for s in part.members(nb):
                ps = pred[s]
                marks += len(ps)
                for y in ps:
                    mark_dirty(y)
        if audit:
            part.check_invariants()
    stats.sig_calls = sig_calls
    stats.mark_dirty_calls += marks
    stats.iterations = iterations
    stats.max_block_moves = max(part.moves)
    assignment = renumber(p)
    return PartitionResult(assignment, max(assignment) + 1, stats, "optimized")


def same_partition(a: Sequence[int], b: Sequence[int]) -> bool:
    """True when two assignments induce the same equivalence relation."""
    if len(a) != len(b):
        return False
    return renumber(list(a)) == renumber(list(b))


def stability_violation(table: CoalgebraTable, assignment: Sequence[int]) -> Optional[tuple[int, int]]:
    """First pair of same-block states with different signatures, or ``None``."""
    if len(assignment) != table.n:
        raise ValueError(f"assignment covers {len(assignment)} states, table has {table.n}")
    enc = compile_encoder(table.functor)
    seen: dict = {}
    for x, t in enumerate(table.terms):
        sig = enc(t, assignment)
        b = assignment[x]
        if b in seen:
            y, sig_y = seen[b]
            if sig_y != sig:
                return (y, x)
        else:
            seen[b] = (x, sig)
    return None


def check_stable(table: CoalgebraTable, assignment: Sequence[int]) -> bool:
    return stability_violation(table, assignment) is None


def quotient(table: CoalgebraTable, result: PartitionResult) -> CoalgebraTable:
    """Minimized system with one state per block, named by block number.

    The term of block ``i`` is the term of its least state with every state
    replaced by its block, then normalized. ``meta['representatives']`` lists
    the original representative of every block.
    """
    f = table.functor
    reps = result.representatives()
    g = result.assignment
    terms = [normalize_term(f, map_term(f, table.terms[r], g)) for r in reps]
    initial = g[table.initial] if table.initial is not None and table.n else None
    q = build_table(f, terms, initial=initial)
    q.meta = dict(table.meta)
    q.meta["representatives"] = reps
    return q
