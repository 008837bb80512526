"""Refinable partition with constant-time dirty marking and k-way splitting.

Each block occupies a contiguous range ``[start, end)`` of ``loc2state``.
Locations ``[start, mid)`` hold clean states and ``[mid, end)`` dirty ones.
"""

from __future__ import annotations

from typing import Optional, Sequence


class PartitionInvariantError(AssertionError):
    """The internal audit found an inconsistent partition."""


class RefinablePartition:
    __slots__ = ("n", "loc2state", "state2loc", "starts", "mids", "ends",
                 "block_of", "worklist", "moves")

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("a partition needs at least one state")
        self.n = n
        self.loc2state = list(range(n))
        self.state2loc = list(range(n))
        # block triples stored column-wise for speed
        self.starts = [0]
        self.mids = [0]
        self.ends = [n]
        self.block_of = [0] * n
        self.worklist = [0]
        # how often each state was placed into a newly allocated block
        self.moves = [0] * n

    @property
    def block_count(self) -> int:
        return len(self.starts)

    @property
    def blocks(self) -> list[tuple[int, int, int]]:
        return list(zip(self.starts, self.mids, self.ends))

    def members(self, b: int) -> list[int]:
        return self.loc2state[self.starts[b]:self.ends[b]]

    def dirty_states(self, b: int) -> list[int]:
        return self.loc2state[self.mids[b]:self.ends[b]]

    def one_clean(self, b: int) -> Optional[int]:
        start = self.starts[b]
        if start == self.mids[b]:
            return None
        return self.loc2state[start]

    def pop_worklist(self) -> Optional[int]:
        if not self.worklist:
            return None
        return self.worklist.pop()

    def mark_dirty(self, s: int) -> None:
        b = self.block_of[s]
        j = self.state2loc[s]
        mid = self.mids[b]
        if mid <= j:
            return
        if mid == self.ends[b]:
            self.worklist.append(b)
        mid -= 1
        other = self.loc2state[mid]
        self.loc2state[mid] = s
        self.loc2state[j] = other
        self.state2loc[s] = mid
        self.state2loc[other] = j
        self.mids[b] = mid

    def split(self, b: int, a: Sequence[int]) -> list[int]:
        """Split block ``b`` so that its i-th dirty state joins sub-block ``a[i]``.

        Clean states join sub-block 0. The largest sub-block keeps the id
        ``b`` (sub-block 0 on ties, then the lowest number); the ids of the
        other non-empty sub-blocks are returned. All states of ``b`` end up
        clean.
        """
        start, mid, end = self.starts[b], self.mids[b], self.ends[b]
        dirty_count = end - mid
        if len(a) != dirty_count:
            raise ValueError(f"split vector has length {len(a)}, block has {dirty_count} dirty states")
        if dirty_count == 0:
            return []
        k = max(a) + 1
        if min(a) < 0:
            raise ValueError("split vector entries must be non-negative")
        counts = [0] * k
        counts[0] = mid - start
        for v in a:
            counts[v] += 1
        largest = 0
        for i in range(1, k):
            if counts[i] > counts[largest]:
                largest = i
        # prefix sums: lows[i] is the first location of sub-block i
        lows = [0] * k
        acc = start
        for i in range(k):
            lows[i] = acc
            acc += counts[i]
        offsets = lows[1:] + [end]
        loc2state = self.loc2state
        state2loc = self.state2loc
        dirty = loc2state[mid:end]
        for i in range(dirty_count - 1, -1, -1):
            v = a[i]
            j = offsets[v] - 1
            offsets[v] = j
            s = dirty[i]
            loc2state[j] = s
            state2loc[s] = j
        new_ids = []
        block_of = self.block_of
        moves = self.moves
        for i in range(k):
            if counts[i] == 0:
                continue
            lo = lows[i]
            hi = lo + counts[i]
            if i == largest:
                self.starts[b] = lo
                self.mids[b] = hi
                self.ends[b] = hi
                continue
            nb = len(self.starts)
            self.starts.append(lo)
            self.mids.append(hi)
            self.ends.append(hi)
            new_ids.append(nb)
            for loc in range(lo, hi):
                s = loc2state[loc]
                block_of[s] = nb
                moves[s] += 1
        return new_ids

    def assignment(self) -> list[int]:
        return list(self.block_of)

    def check_invariants(self) -> None:
        """Audit every structural invariant; raise :class:`PartitionInvariantError` on failure."""
        n = self.n

        def fail(msg):
            raise PartitionInvariantError(msg)

        if sorted(self.loc2state) != list(range(n)):
            fail("loc2state is not a permutation")
        for loc, s in enumerate(self.loc2state):
            if self.state2loc[s] != loc:
                fail(f"state2loc[{s}] != {loc}")
        covered = [False] * n
        for b, (start, mid, end) in enumerate(self.blocks):
            if not start <= mid <= end:
                fail(f"block {b} has bad range {(start, mid, end)}")
            if start == end:
                fail(f"block {b} is empty")
            for loc in range(start, end):
                if covered[loc]:
                    fail(f"location {loc} covered twice")
                covered[loc] = True
                if self.block_of[self.loc2state[loc]] != b:
                    fail(f"block_of[{self.loc2state[loc]}] != {b}")
        if not all(covered):
            fail("blocks do not cover all locations")
        if len(set(self.worklist)) != len(self.worklist):
            fail("duplicate worklist entry")
        pending = {b for b in range(self.block_count) if self.mids[b] < self.ends[b]}
        if pending != set(self.worklist):
            fail(f"worklist {sorted(self.worklist)} != blocks with dirty states {sorted(pending)}")

    def dump(self) -> str:
        """One line per block: ``id start mid end | clean... | dirty...``."""
        lines = []
        for b, (start, mid, end) in enumerate(self.blocks):
            clean = " ".join(map(str, self.loc2state[start:mid]))
            dirty = " ".join(map(str, self.loc2state[mid:end]))
            lines.append(f"{b} {start} {mid} {end} | {clean} | {dirty}".rstrip())
        return "\n".join(lines) + "\n"


def new_partition(n: int) -> RefinablePartition:
    return RefinablePartition(n)
