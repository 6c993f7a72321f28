"""Exact combinatorics of Dyck paths and non-crossing partitions.

A Dyck path of semilength n is a lattice excursion of n upsteps and n
downsteps that never goes below zero.  A partition of {1..n} is non-crossing
when no two blocks interleave, i.e. there are no x1 < x2 < y1 < y2 with
x1, y1 in one block and x2, y2 in another.  Both families are counted by the
Catalan numbers, and the classical descent-to-block bijection identifies the
descents (maximal downstep runs) of a path with the blocks of a partition.

Everything here is exact integer / rational arithmetic; the enumeration
functions double as the ground-truth oracle for the samplers and for the
free moment-cumulant machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator

from .errors import EnumerationCapError, ValidationError

#: Largest semilength the exhaustive enumerators accept by default.
#: C_14 is about 2.7 million paths, which keeps oracle suites fast.
DEFAULT_ENUMERATION_CAP = 14

UP = "U"
DOWN = "D"


def catalan_number(n: int) -> int:
    """n-th Catalan number (2n)! / (n! (n+1)!), exactly; C_0 = 1."""
    if n < 0:
        raise ValueError(f"Catalan numbers need n >= 0, got {n}")
    return math.comb(2 * n, n) // (n + 1)


def narayana(n: int, k: int) -> int:
    """Number of Dyck paths of semilength n with exactly k descents.

    Equals C(n,k) * C(n,k-1) / n.  The k-sum over 1..n is catalan_number(n).
    """
    if n < 1:
        raise ValueError(f"narayana needs n >= 1, got n={n}")
    if not 1 <= k <= n:
        raise ValueError(f"narayana needs 1 <= k <= n, got k={k}, n={n}")
    return math.comb(n, k) * math.comb(n, k - 1) // n


def expected_block_count(n: int) -> Fraction:
    """Average number of blocks (equivalently descents) over NC(n): (n+1)/2."""
    if n < 1:
        raise ValueError(f"expected_block_count needs n >= 1, got {n}")
    return Fraction(n + 1, 2)


def expected_singleton_count(n: int) -> Fraction:
    """Average number of singleton blocks over NC(n), exactly.

    Deleting a singleton {i} is a bijection onto NC(n-1), so the total count
    of singletons over NC(n) is n*C_{n-1} and the average is
    n*C_{n-1}/C_n = (n^2+n)/(4n-2).
    """
    if n < 1:
        raise ValueError(f"expected_singleton_count needs n >= 1, got {n}")
    return Fraction(n * catalan_number(n - 1), catalan_number(n))


@dataclass(frozen=True)
class DyckPath:
    """A Dyck path, packed as a bit sequence (bit i set = step i is an upstep).

    Steps are indexed from 0 (LSB of ``bits``).  Validation enforces n upsteps,
    n downsteps and the non-negative prefix condition.
    """

    semilength: int
    bits: int

    def __post_init__(self):
        n = self.semilength
        if n < 0:
            raise ValidationError(f"semilength must be >= 0, got {n}")
        if self.bits < 0 or self.bits >> (2 * n):
            raise ValidationError("step bits out of range for the semilength")
        if self.bits.bit_count() != n:
            raise ValidationError("a Dyck path needs equally many up and down steps")
        height = 0
        bits = self.bits
        for _ in range(2 * n):
            height += 1 if bits & 1 else -1
            if height < 0:
                raise ValidationError("path drops below zero")
            bits >>= 1

    @classmethod
    def _trusted(cls, semilength: int, bits: int) -> "DyckPath":
        # Fast path for generators that construct valid paths by design.
        path = object.__new__(cls)
        object.__setattr__(path, "semilength", semilength)
        object.__setattr__(path, "bits", bits)
        return path

    @classmethod
    def from_string(cls, steps: str) -> "DyckPath":
        """Parse a path from a string over {U, D}, e.g. ``"UUDD"``."""
        steps = steps.strip().upper()
        if len(steps) % 2:
            raise ValidationError("a Dyck path has even length")
        bits = 0
        for i, ch in enumerate(steps):
            if ch == UP:
                bits |= 1 << i
            elif ch != DOWN:
                raise ValidationError(f"unexpected step character {ch!r}")
        return cls(len(steps) // 2, bits)

    @classmethod
    def from_run_lengths(cls, ascents: Iterable[int], descents: Iterable[int]) -> "DyckPath":
        """Build a path from alternating ascent/descent run lengths."""
        bits = 0
        pos = 0
        total_up = 0
        for x, y in zip(ascents, descents, strict=True):
            if x < 1 or y < 1:
                raise ValidationError("run lengths must be positive")
            bits |= ((1 << x) - 1) << pos
            pos += x + y
            total_up += x
        if pos != 2 * total_up:
            raise ValidationError("ascents and descents must balance")
        return cls(total_up, bits)

    def step(self, i: int) -> str:
        return UP if (self.bits >> i) & 1 else DOWN

    def to_string(self) -> str:
        return "".join(self.step(i) for i in range(2 * self.semilength))

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return self.to_string()

    def descent_lengths(self) -> tuple[int, ...]:
        """Lengths of the maximal downstep runs, in path order."""
        runs = []
        current = 0
        for i in range(2 * self.semilength):
            if (self.bits >> i) & 1:
                if current:
                    runs.append(current)
                    current = 0
            else:
                current += 1
        if current:
            runs.append(current)
        return tuple(runs)

    def ascent_lengths(self) -> tuple[int, ...]:
        """Lengths of the maximal upstep runs, in path order."""
        runs = []
        current = 0
        for i in range(2 * self.semilength):
            if (self.bits >> i) & 1:
                current += 1
            else:
                if current:
                    runs.append(current)
                    current = 0
        if current:
            runs.append(current)
        return tuple(runs)

    def labelled_descents(self) -> list[tuple[int, ...]]:
        """Descents as tuples of upstep labels, in path order.

        Upsteps are labelled 1..n left to right; each downstep inherits the
        label of its matching upstep (the nearest unmatched one to its left).
        """
        stack: list[int] = []
        next_label = 1
        descents: list[tuple[int, ...]] = []
        current: list[int] = []
        for i in range(2 * self.semilength):
            if (self.bits >> i) & 1:
                if current:
                    descents.append(tuple(current))
                    current = []
                stack.append(next_label)
                next_label += 1
            else:
                current.append(stack.pop())
        if current:
            descents.append(tuple(current))
        return descents

    def num_descents(self) -> int:
        return len(self.descent_lengths())


@dataclass(frozen=True)
class NonCrossingPartition:
    """A non-crossing partition of {1..n}, blocks sorted by least element."""

    n: int
    blocks: tuple[frozenset[int], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for block in self.blocks:
            if not block:
                raise ValidationError("blocks must be non-empty")
            if seen & block:
                raise ValidationError("blocks must be disjoint")
            seen |= block
        if seen != set(range(1, self.n + 1)):
            raise ValidationError(f"blocks must partition 1..{self.n}")
        if list(self.blocks) != sorted(self.blocks, key=min):
            raise ValidationError("blocks must be sorted by least element")
        if not _is_noncrossing_blocks(self.blocks):
            raise ValidationError("partition is crossing")

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> "NonCrossingPartition":
        """Canonicalise arbitrary block input (sorts blocks by least element)."""
        frozen = sorted((frozenset(b) for b in blocks), key=lambda b: min(b) if b else 0)
        n = sum(len(b) for b in frozen)
        return cls(n, tuple(frozen))

    def block_of(self, element: int) -> frozenset[int]:
        for block in self.blocks:
            if element in block:
                return block
        raise KeyError(element)

    def block_sizes(self) -> tuple[int, ...]:
        """Multiset of block sizes, sorted ascending."""
        return tuple(sorted(len(b) for b in self.blocks))

    def num_blocks(self) -> int:
        return len(self.blocks)

    def to_sorted_lists(self) -> list[list[int]]:
        """Canonical JSON form: blocks as ascending lists, sorted by minimum."""
        return [sorted(block) for block in self.blocks]

    def __str__(self) -> str:  # pragma: no cover - repr convenience
        return str(self.to_sorted_lists())


def enumerate_dyck_paths(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[DyckPath]:
    """Yield every Dyck path of semilength n once, lexicographically (U < D).

    The count is catalan_number(n); n above ``cap`` raises EnumerationCapError.
    """
    if n < 0:
        raise ValueError(f"semilength must be >= 0, got {n}")
    if n > cap:
        raise EnumerationCapError(
            f"semilength {n} exceeds the enumeration cap {cap} "
            f"(raise the cap explicitly if you really want C_{n} paths)"
        )

    def walk(bits: int, pos: int, ups_left: int, height: int) -> Iterator[DyckPath]:
        if pos == 2 * n:
            yield DyckPath._trusted(n, bits)
            return
        if ups_left:
            yield from walk(bits | (1 << pos), pos + 1, ups_left - 1, height + 1)
        if height:
            yield from walk(bits, pos + 1, ups_left, height - 1)

    return walk(0, 0, n, 0)


def path_to_partition(path: DyckPath) -> NonCrossingPartition:
    """Descent-to-block bijection: each labelled descent becomes a block."""
    blocks = sorted((frozenset(d) for d in path.labelled_descents()), key=min)
    part = object.__new__(NonCrossingPartition)
    object.__setattr__(part, "n", path.semilength)
    object.__setattr__(part, "blocks", tuple(blocks))
    return part


def partition_to_path(partition: NonCrossingPartition) -> DyckPath:
    """Inverse bijection: emit upstep i, then a full descent when i closes its block.

    Element i closes its block when it is the block maximum; the descent pops
    exactly that block off the matching stack, which is what makes the map
    inverse to :func:`path_to_partition`.
    """
    closing_size = {max(block): len(block) for block in partition.blocks}
    bits = 0
    pos = 0
    for i in range(1, partition.n + 1):
        bits |= 1 << pos
        pos += 1
        pos += closing_size.get(i, 0)
    return DyckPath(partition.n, bits)


def _is_noncrossing_blocks(blocks: tuple[frozenset[int], ...]) -> bool:
    # Stack check over the ground set in increasing order: a block is pushed at
    # its minimum, must sit on top whenever one of its elements appears, and is
    # popped at its maximum.  Works for any finite ground set of integers.
    owner: dict[int, int] = {}
    for idx, block in enumerate(blocks):
        for x in block:
            owner[x] = idx
    mins = {min(b): i for i, b in enumerate(blocks)}
    maxs = {max(b): i for i, b in enumerate(blocks)}
    stack: list[int] = []
    for x in sorted(owner):
        idx = owner[x]
        if mins.get(x) == idx:
            stack.append(idx)
        if not stack or stack[-1] != idx:
            return False
        if maxs.get(x) == idx:
            stack.pop()
    return True


def is_noncrossing(blocks: Iterable[Iterable[int]]) -> bool:
    """True iff no two blocks cross (no x1 < x2 < y1 < y2 across two blocks).

    Accepts any family of disjoint, non-empty sets of positive integers; the
    ground set is taken to be their union, so partial labellings are fine.
    """
    frozen = tuple(frozenset(b) for b in blocks)
    seen: set[int] = set()
    for block in frozen:
        if not block:
            raise ValidationError("blocks must be non-empty")
        if any(x < 1 for x in block):
            raise ValidationError("elements must be positive integers")
        if seen & block:
            raise ValidationError("blocks must be disjoint")
        seen |= block
    return _is_noncrossing_blocks(frozen)


def block_size_histogram(partition: NonCrossingPartition) -> dict[int, int]:
    """Map block size -> number of blocks of that size."""
    hist: dict[int, int] = {}
    for block in partition.blocks:
        hist[len(block)] = hist.get(len(block), 0) + 1
    return dict(sorted(hist.items()))


@lru_cache(maxsize=32)
def block_type_counts(n: int, cap: int = DEFAULT_ENUMERATION_CAP) -> dict[tuple[int, ...], int]:
    """Count NC(n) by block-size multiset (sorted ascending), via enumeration.

    Descent lengths of a path equal the block sizes of its partition, so the
    histogram can be read off the paths directly.  Cached: the n <= 12 tables
    back every brute-force moment computation.
    """
    counts: dict[tuple[int, ...], int] = {}
    for path in enumerate_dyck_paths(n, cap=cap):
        key = tuple(sorted(path.descent_lengths()))
        counts[key] = counts.get(key, 0) + 1
    return counts
