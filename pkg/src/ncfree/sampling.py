"""Uniform random Dyck paths / non-crossing partitions, plus empirical statistics.

Two samplers are provided:

* a rejection sampler that simulates a simple random walk through its
  geometric(1/2) ascent/descent runs and accepts when the first 2n steps form
  an excursion whose last descent closes exactly at 2n — acceptance
  probability (1/2) * C_n / 4^n, so roughly 2 * 4^n / C_n attempts per sample;
* a cycle-lemma sampler (shuffle n+1 upsteps and n downsteps; exactly one
  rotation is strictly positive until the end; drop its leading upstep) which
  is exactly uniform in O(n) time and serves as the independent oracle.

Empirical statistics are kept as exact rationals; floats only appear when a
result is exported to a PMF.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from .catalan import DyckPath, NonCrossingPartition
from .errors import SamplingBudgetError
from .ldp import PmfOnN

DEFAULT_ATTEMPT_BUDGET = 1_000_000


def stream_rng(seed: int, stream: int = 0) -> random.Random:
    """Deterministic generator for (seed, stream); streams are independent."""
    digest = hashlib.sha256(f"ncfree:{seed}:{stream}".encode()).digest()
    return random.Random(int.from_bytes(digest[:16], "big"))


def sample_geometric_half(rng: random.Random) -> int:
    """Geometric(1/2) on {1, 2, ...}: P(X = m) = 2**-m, mean 2.

    Exact bit-run sampling: the index of the first set bit in a fair bit
    stream is geometric, no floating point involved.
    """
    offset = 0
    while True:
        word = rng.getrandbits(64)
        if word:
            return offset + (word & -word).bit_length()
        offset += 64


@dataclass(frozen=True)
class ConditionedSampleTrace:
    """Run-length record of the accepted rejection-sampler attempt.

    ``ascents``/``descents`` are the geometric run lengths of the accepted
    walk (empty if nothing was accepted); ``attempts`` counts every attempt
    including those rejected on the initial coin flip.
    """

    ascents: tuple[int, ...]
    descents: tuple[int, ...]
    accepted: bool
    attempts: int

    @property
    def num_runs(self) -> int:
        return len(self.ascents)


def _attempt_excursion(n: int, rng: random.Random) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    # One attempt at the conditioned-walk event: fair coin for the initial
    # direction, then geometric ascent/descent pairs until 2n steps are used.
    if rng.getrandbits(1) == 0:
        return None
    target = 2 * n
    total = 0
    height = 0
    ascents: list[int] = []
    descents: list[int] = []
    while total < target:
        x = sample_geometric_half(rng)
        y = sample_geometric_half(rng)
        ascents.append(x)
        descents.append(y)
        total += x + y
        height += x - y
        if total > target:
            return None
        if height < 0:
            return None
    if height != 0:
        return None
    return tuple(ascents), tuple(descents)


def sample_dyck_rejection(
    n: int,
    rng: random.Random,
    max_attempts: int = DEFAULT_ATTEMPT_BUDGET,
) -> tuple[DyckPath, ConditionedSampleTrace]:
    """Uniform Dyck path of semilength n by conditioned geometric runs.

    Raises SamplingBudgetError once ``max_attempts`` attempts are exhausted;
    the expected number of attempts is 2 * 4**n / C_n (about n**1.5 growth).
    """
    if n < 1:
        raise ValueError(f"semilength must be >= 1, got {n}")
    for attempt in range(1, max_attempts + 1):
        runs = _attempt_excursion(n, rng)
        if runs is not None:
            ascents, descents = runs
            path = DyckPath.from_run_lengths(ascents, descents)
            return path, ConditionedSampleTrace(ascents, descents, True, attempt)
    raise SamplingBudgetError(
        f"no accepted excursion of semilength {n} in {max_attempts} attempts",
        attempts=max_attempts,
    )


def sample_dyck_cycle(n: int, rng: random.Random) -> DyckPath:
    """Exactly uniform Dyck path of semilength n via the cycle lemma.

    Shuffle n+1 upsteps and n downsteps; of the 2n+1 rotations exactly one
    keeps every proper prefix sum positive (start just after the last minimum
    of the prefix walk), and it begins with an upstep, which is dropped.
    """
    if n < 1:
        raise ValueError(f"semilength must be >= 1, got {n}")
    steps = [1] * (n + 1) + [-1] * n
    rng.shuffle(steps)
    height = 0
    min_height = 1
    start = 0
    for i, s in enumerate(steps):
        height += s
        if height <= min_height:
            min_height = height
            start = i + 1
    rotated = steps[start:] + steps[:start]
    bits = 0
    for i, s in enumerate(rotated[1:]):
        if s == 1:
            bits |= 1 << i
    return DyckPath._trusted(n, bits)


@dataclass(frozen=True)
class EmpiricalStats:
    """Block-size statistics of one path/partition, in exact arithmetic.

    ``block_size_counts`` maps block size -> multiplicity; the derived law is
    the empirical distribution (each block weighted 1/r).
    """

    semilength: int
    num_blocks: int
    block_size_counts: Mapping[int, int]

    @property
    def distribution(self) -> dict[int, Fraction]:
        """Empirical block-size law as exact rationals, mass 1."""
        r = self.num_blocks
        return {size: Fraction(c, r) for size, c in sorted(self.block_size_counts.items())}

    @property
    def mean_block_size(self) -> Fraction:
        """Mean of the empirical law; equals n / r exactly."""
        return Fraction(self.semilength, self.num_blocks)

    @property
    def block_density(self) -> Fraction:
        """Blocks per step, r / (2n); always 1 / (2 * mean_block_size)."""
        return Fraction(self.num_blocks, 2 * self.semilength)

    def to_pmf(self) -> PmfOnN:
        """Float export of the empirical law (reporting boundary)."""
        r = self.num_blocks
        return PmfOnN({size: c / r for size, c in self.block_size_counts.items()})


def empirical_block_stats(obj: Union[DyckPath, NonCrossingPartition]) -> EmpiricalStats:
    """Empirical block-size statistics of a Dyck path or non-crossing partition."""
    if isinstance(obj, DyckPath):
        sizes = obj.descent_lengths()
        n = obj.semilength
    elif isinstance(obj, NonCrossingPartition):
        sizes = tuple(len(b) for b in obj.blocks)
        n = obj.n
    else:
        raise TypeError(f"expected DyckPath or NonCrossingPartition, got {type(obj)!r}")
    if not sizes:
        raise ValueError("empty object has no block statistics")
    counts: dict[int, int] = {}
    for s in sizes:
        counts[s] = counts.get(s, 0) + 1
    return EmpiricalStats(n, len(sizes), dict(sorted(counts.items())))
