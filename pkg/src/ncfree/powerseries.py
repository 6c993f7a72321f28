"""Coefficient recursions for the moment generating identity, plus small series utilities.

With M(z) = 1 + sum_{n>=1} m_n z^n and cumulants (k_s), the generating
identity is

    M(z) = 1 + sum_{s>=1} k_s z^s M(z)^s,

i.e. m_n = sum_s k_s [z^(n-s)] M(z)^s.  Both directions are solved by a
triangular recursion over powers of M: exact when the inputs are Fractions
or ints, float/numpy otherwise.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np


def _is_exact(values) -> bool:
    return any(isinstance(v, (Fraction, int)) and not isinstance(v, bool) for v in values) and not any(
        isinstance(v, float) for v in values
    )


def moments_from_cumulants_series(ks: Sequence, n_max: int) -> list:
    """Moments m_1..m_n_max from cumulants k_1..k_n_max via the power recursion.

    ``ks`` is indexed so that ks[s-1] = k_s; missing entries count as zero.
    Exact (Fraction/int) inputs stay exact; float inputs use numpy inner
    products.  Returns [m_0, m_1, ..., m_n_max] with m_0 = 1.
    """
    kvals = list(ks[:n_max]) + [0] * max(0, n_max - len(ks))
    if _is_exact(kvals):
        return _moments_exact(kvals, n_max)
    return _moments_float(np.asarray([float(k) for k in kvals]), n_max)


def _moments_exact(kvals: list, n_max: int) -> list:
    m = [Fraction(1)]
    # powers[s][j] = [z^j] M(z)^s, filled along anti-diagonals as m grows
    powers: list[list] = [[Fraction(1)] + [Fraction(0)] * n_max]
    for n in range(1, n_max + 1):
        while len(powers) <= n:
            powers.append([Fraction(0)] * (n_max + 1))
        for s in range(1, n + 1):
            j = n - s
            powers[s][j] = sum(m[i] * powers[s - 1][j - i] for i in range(j + 1))
        m.append(sum(kvals[s - 1] * powers[s][n - s] for s in range(1, n + 1) if kvals[s - 1]))
    return m


def _moments_float(kvals: np.ndarray, n_max: int) -> list:
    m = np.zeros(n_max + 1)
    m[0] = 1.0
    powers = np.zeros((n_max + 1, n_max + 1))
    powers[0, 0] = 1.0
    for n in range(1, n_max + 1):
        for s in range(1, n + 1):
            j = n - s
            powers[s, j] = float(np.dot(m[: j + 1], powers[s - 1, j::-1]))
        m[n] = float(sum(kvals[s - 1] * powers[s, n - s] for s in range(1, n + 1)))
    return [float(x) for x in m]


def cumulants_from_moments_series(moments: Sequence, n_max: int | None = None) -> list:
    """Cumulants k_1..k_n from moments [m_0=1, m_1, ...]; inverse recursion.

    Exactness follows the input types, as in moments_from_cumulants_series.
    """
    if not moments or moments[0] != 1:
        raise ValueError("moment sequence must start with m_0 = 1")
    if n_max is None:
        n_max = len(moments) - 1
    if len(moments) < n_max + 1:
        raise ValueError(f"need moments up to order {n_max}")
    m = list(moments[: n_max + 1])
    exact = _is_exact(m)
    if not exact:
        m = [float(x) for x in m]
    zero = Fraction(0) if exact else 0.0
    # full power table: powers[s] = coefficients of M^s up to degree n_max
    powers = [[1 if j == 0 else zero for j in range(n_max + 1)]]
    for s in range(1, n_max + 1):
        prev = powers[-1]
        row = [sum(m[i] * prev[j - i] for i in range(j + 1)) for j in range(n_max + 1)]
        powers.append(row)
    ks: list = []
    for n in range(1, n_max + 1):
        acc = m[n]
        for s in range(1, n):
            if ks[s - 1]:
                acc -= ks[s - 1] * powers[s][n - s]
        ks.append(acc)
    return ks


@lru_cache(maxsize=None)
def bernoulli_number(k: int) -> Fraction:
    """Bernoulli number B_k (B_1 = -1/2 convention), exact."""
    if k < 0:
        raise ValueError("Bernoulli numbers need k >= 0")
    if k == 0:
        return Fraction(1)
    if k == 1:
        return Fraction(-1, 2)
    if k % 2:
        return Fraction(0)
    acc = Fraction(0)
    for j in range(k):
        acc += math.comb(k + 1, j) * bernoulli_number(j)
    return -acc / (k + 1)


def symmetric_uniform_cumulant(n: int, half_width: Fraction = Fraction(1)) -> Fraction:
    """n-th free cumulant of the uniform law on [-a, a], exactly.

    These are the Taylor coefficients of a*coth(a*z) - 1/z:
    k_{2j} = B_{2j} * (2a)^{2j} / (2j)!, odd cumulants vanish.
    Used as an independent oracle for the moment-inversion route.
    """
    if n < 1:
        raise ValueError("cumulant index must be >= 1")
    if n % 2:
        return Fraction(0)
    return bernoulli_number(n) * (2 * half_width) ** n / math.factorial(n)


def riemann_zeta(s: float, terms: int = 24) -> float:
    """zeta(s) for s > 1 by Euler-Maclaurin, accurate to ~1e-13 for s >= 1.1.

    Direct partial sum up to ``terms``, then the integral tail, half-term and
    Bernoulli corrections through B_12.
    """
    if s <= 1.0:
        raise ValueError(f"zeta diverges for s <= 1, got s={s}")
    n = float(terms)
    acc = math.fsum(k ** (-s) for k in range(1, terms))
    acc += n ** (1.0 - s) / (s - 1.0)
    acc += 0.5 * n ** (-s)
    rising = s
    power = n ** (-s - 1.0)
    for j in (2, 4, 6, 8, 10, 12):
        acc += float(bernoulli_number(j)) / math.factorial(j) * rising * power
        rising *= (s + j - 1.0) * (s + j)
        power /= n * n
    return acc
