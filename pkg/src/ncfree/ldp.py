"""Rate functions for block-size statistics and the bounded-Lipschitz metric.

The empirical block-size law of a uniform non-crossing partition concentrates
on the geometric(1/2) distribution; the exponential cost of seeing anything
else is, for a probability law mu on {1,2,...} with mean m and density t:

    J(m, mu, t) = log 4 - H(mu)/m - log(m-1)/m + log(1 - 1/m)

on the constraint set m_1(mu) = m = 1/(2t), and +infinity off it.  The
supporting quantities are Shannon entropy, relative entropy against the
geometric(1/2) law, and Theta(m) = log(m-1) - m*log(1 - 1/m), the maximal
entropy among laws on {1,2,...} with mean m (attained by the geometric law
with success probability 1/m).

All logarithms are natural.  Infinite rate values are returned as IEEE
+infinity (math.inf), which composes cleanly with comparisons and min/sup.
"""

from __future__ import annotations

import math
from functools import cached_property
from typing import Iterable, Mapping, Union

import numpy as np
from scipy.optimize import linprog

from .errors import PrecisionError

#: |mass - 1| tolerance for treating a measure as a probability measure.
MASS_TOL = 1e-12
#: Absolute tolerance on mean-matching constraints in the rate functions.
MEAN_CONSTRAINT_TOL = 1e-9
#: Default support window for analytically truncated geometric laws.
GEOMETRIC_TRUNCATION = 512
#: Combined tail mass above which the bounded-Lipschitz LP refuses to answer.
BETA_TAIL_TOL = 1e-9

LOG2 = math.log(2.0)


class PmfOnN:
    """A finite measure on {1, 2, ...}: a support window plus declared tail mass.

    ``weights`` maps positive integers to non-negative weights; ``tail_mass``
    is the exact mass sitting beyond the window (0 for finitely supported
    measures).  Instances are immutable; mass, mean and entropy are cached.
    Mean and entropy are window sums, so they are only meaningful when the
    declared tail is negligible at the working tolerance.
    """

    def __init__(self, weights: Union[Mapping[int, float], Iterable[tuple[int, float]]], tail_mass: float = 0.0):
        items = weights.items() if isinstance(weights, Mapping) else weights
        cleaned = []
        for k, w in items:
            if not isinstance(k, int) or k < 1:
                raise ValueError(f"support must be positive integers, got {k!r}")
            w = float(w)
            if w < 0.0:
                raise ValueError(f"weights must be non-negative, got {w!r} at {k}")
            if w > 0.0:
                cleaned.append((k, w))
        if tail_mass < 0.0:
            raise ValueError(f"tail mass must be non-negative, got {tail_mass!r}")
        self._items = tuple(sorted(cleaned))
        self._tail_mass = float(tail_mass)

    # -- constructors -------------------------------------------------------

    @classmethod
    def delta(cls, k: int) -> "PmfOnN":
        """Point mass at k."""
        return cls({k: 1.0})

    @classmethod
    def geometric(cls, ratio: float = 0.5, truncation: int = GEOMETRIC_TRUNCATION) -> "PmfOnN":
        """Geometric law P(k) = (1-ratio) * ratio**(k-1) on {1,2,...}.

        Truncated at ``truncation`` with the exact remainder declared as tail
        mass (ratio**truncation).  ratio=0.5 gives the mean-2 law P(k)=2**-k.
        """
        if not 0.0 < ratio < 1.0:
            raise ValueError(f"ratio must be in (0,1), got {ratio}")
        p = 1.0 - ratio
        weights = {k: p * ratio ** (k - 1) for k in range(1, truncation + 1)}
        return cls(weights, tail_mass=ratio**truncation)

    @classmethod
    def geometric_with_mean(cls, mean: float, truncation: int = GEOMETRIC_TRUNCATION) -> "PmfOnN":
        """The maximal-entropy law on {1,2,...} with the given mean (> 1)."""
        if mean <= 1.0:
            raise ValueError(f"a geometric law on {{1,2,...}} has mean > 1, got {mean}")
        return cls.geometric(ratio=1.0 - 1.0 / mean, truncation=truncation)

    @classmethod
    def uniform(cls, support: Iterable[int]) -> "PmfOnN":
        ks = sorted(set(support))
        return cls({k: 1.0 / len(ks) for k in ks})

    # -- basic protocol -----------------------------------------------------

    def items(self) -> tuple[tuple[int, float], ...]:
        return self._items

    def as_dict(self) -> dict[int, float]:
        return dict(self._items)

    @property
    def tail_mass(self) -> float:
        return self._tail_mass

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self._items)

    def get(self, k: int) -> float:
        for kk, w in self._items:
            if kk == k:
                return w
        return 0.0

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PmfOnN)
            and self._items == other._items
            and self._tail_mass == other._tail_mass
        )

    def __hash__(self) -> int:
        return hash((self._items, self._tail_mass))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        head = ", ".join(f"{k}: {w:.6g}" for k, w in self._items[:6])
        more = ", ..." if len(self._items) > 6 else ""
        return f"PmfOnN({{{head}{more}}}, tail_mass={self._tail_mass:.3g})"

    # -- cached aggregates ---------------------------------------------------

    @cached_property
    def mass(self) -> float:
        return math.fsum(w for _, w in self._items) + self._tail_mass

    @cached_property
    def mean(self) -> float:
        """First moment over the window (tail contributes nothing)."""
        return math.fsum(k * w for k, w in self._items)

    @cached_property
    def entropy(self) -> float:
        """Shannon entropy in nats over the window, with 0 log 0 = 0."""
        return -math.fsum(w * math.log(w) for _, w in self._items if w > 0.0)

    def is_probability(self, tol: float = MASS_TOL) -> bool:
        return abs(self.mass - 1.0) <= tol

    def normalized(self) -> "PmfOnN":
        z = self.mass
        if z <= 0.0:
            raise ValueError("cannot normalise the zero measure")
        return PmfOnN({k: w / z for k, w in self._items}, tail_mass=self._tail_mass / z)

    def mixed_with(self, other: "PmfOnN", weight: float) -> "PmfOnN":
        """Convex mixture (1-weight)*self + weight*other."""
        if not 0.0 <= weight <= 1.0:
            raise ValueError("mixture weight must lie in [0,1]")
        merged = {k: (1.0 - weight) * w for k, w in self._items}
        for k, w in other._items:
            merged[k] = merged.get(k, 0.0) + weight * w
        tail = (1.0 - weight) * self._tail_mass + weight * other._tail_mass
        return PmfOnN(merged, tail_mass=tail)


def _require_probability(p: PmfOnN, what: str) -> None:
    if not p.is_probability():
        raise ValueError(f"{what} needs a probability measure, mass is {p.mass!r}")


def entropy(p: PmfOnN) -> float:
    """Shannon entropy of a probability measure, in nats."""
    _require_probability(p, "entropy")
    return p.entropy


def relative_entropy_vs_geometric(p: PmfOnN) -> float:
    """Relative entropy of p against the geometric(1/2) law.

    Computed as the direct sum of p_m * log(p_m * 2**m); for probability
    measures this equals mean * log 2 - entropy.  Infinite mean gives +inf.
    Non-negative, and zero exactly at the geometric(1/2) law.
    """
    _require_probability(p, "relative entropy")
    if not math.isfinite(p.mean):
        return math.inf
    return math.fsum(w * (math.log(w) + k * LOG2) for k, w in p.items() if w > 0.0)


def max_entropy_given_mean(m: float) -> float:
    """Theta(m) = log(m-1) - m*log(1-1/m): the largest entropy at mean m.

    The supremum of H(q) over laws q on {1,2,...} with mean m, attained by
    the geometric law with success probability 1/m.  Tends to 0 as m -> 1+.
    """
    if m <= 1.0:
        raise ValueError(f"mean must exceed 1, got {m}")
    return math.log(m - 1.0) - m * math.log1p(-1.0 / m)


def geometric_joint_rate(mean: float, p: PmfOnN) -> float:
    """Joint rate for (empirical mean, empirical law) of iid geometric(1/2) draws.

    Equals the relative entropy of p against geometric(1/2) when p is a
    probability law with m_1(p) = mean, +infinity otherwise.
    """
    if not p.is_probability():
        return math.inf
    if abs(p.mean - mean) > MEAN_CONSTRAINT_TOL:
        return math.inf
    return relative_entropy_vs_geometric(p)


def block_size_rate_joint(mean: float, p: PmfOnN, density: float) -> float:
    """Rate function for (mean block size, block-size law, block density).

    Finite only on the constraint set m_1(p) = mean = 1/(2*density), where it
    equals log 4 - H(p)/mean - log(mean-1)/mean + log(1-1/mean).  Zero exactly
    at (2, geometric(1/2), 1/4).
    """
    if not p.is_probability():
        return math.inf
    if abs(p.mean - mean) > MEAN_CONSTRAINT_TOL:
        return math.inf
    if density <= 0.0 or abs(mean - 1.0 / (2.0 * density)) > MEAN_CONSTRAINT_TOL:
        return math.inf
    if mean <= 1.0:
        # Only delta_1 has mean 1 and the rate blows up there in the limit.
        return math.inf
    return (
        2.0 * LOG2
        - p.entropy / mean
        - math.log(mean - 1.0) / mean
        + math.log1p(-1.0 / mean)
    )


def block_size_rate(p: PmfOnN) -> float:
    """Marginal rate for the block-size law alone; zero iff p is geometric(1/2)."""
    if not p.is_probability():
        return math.inf
    m = p.mean
    if m <= 1.0:
        return math.inf
    return block_size_rate_joint(m, p, 1.0 / (2.0 * m))


def bounded_lipschitz_distance(mu: PmfOnN, nu: PmfOnN) -> float:
    """Bounded-Lipschitz distance: sup of |mu(f) - nu(f)| over ||f||_L + ||f||_inf <= 1.

    Solved as a finite LP over f(1..N) with N the largest support point.  On
    the integers the Lipschitz seminorm is the largest adjacent difference,
    so only |f(i+1) - f(i)| <= s constraints are needed.  Declared tails must
    be below BETA_TAIL_TOL (the answer is only accurate to the combined tail).
    """
    tail = mu.tail_mass + nu.tail_mass
    if tail > BETA_TAIL_TOL:
        raise PrecisionError(
            f"combined declared tail mass {tail:.3g} exceeds {BETA_TAIL_TOL:.0e}; "
            "truncate the inputs further"
        )
    if not mu.support and not nu.support:
        return 0.0
    n_max = max(mu.support + nu.support)
    diff = np.zeros(n_max)
    for k, w in mu.items():
        diff[k - 1] += w
    for k, w in nu.items():
        diff[k - 1] -= w

    # Variables: f_1..f_N, then s (Lipschitz bound) and t (sup bound).
    nf = n_max
    c = np.zeros(nf + 2)
    c[:nf] = -diff  # maximise diff . f
    rows = []
    rhs = []
    for i in range(nf):  # |f_i| <= t
        row = np.zeros(nf + 2)
        row[i] = 1.0
        row[nf + 1] = -1.0
        rows.append(row)
        rhs.append(0.0)
        row = np.zeros(nf + 2)
        row[i] = -1.0
        row[nf + 1] = -1.0
        rows.append(row)
        rhs.append(0.0)
    for i in range(nf - 1):  # |f_{i+1} - f_i| <= s
        row = np.zeros(nf + 2)
        row[i + 1] = 1.0
        row[i] = -1.0
        row[nf] = -1.0
        rows.append(row)
        rhs.append(0.0)
        row = np.zeros(nf + 2)
        row[i + 1] = -1.0
        row[i] = 1.0
        row[nf] = -1.0
        rows.append(row)
        rhs.append(0.0)
    row = np.zeros(nf + 2)  # s + t <= 1
    row[nf] = 1.0
    row[nf + 1] = 1.0
    rows.append(row)
    rhs.append(1.0)

    bounds = [(None, None)] * nf + [(0.0, None), (0.0, None)]
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), bounds=bounds, method="highs")
    if not res.success:  # pragma: no cover - LP on this polytope always solves
        raise PrecisionError(f"bounded-Lipschitz LP failed: {res.message}")
    return float(-res.fun)
