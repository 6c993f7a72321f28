"""Series recursions, Bernoulli numbers, and the zeta evaluation."""

import math
from fractions import Fraction

import mpmath
import pytest

from ncfree.catalan import catalan_number
from ncfree.powerseries import (
    bernoulli_number,
    cumulants_from_moments_series,
    moments_from_cumulants_series,
    riemann_zeta,
    symmetric_uniform_cumulant,
)


def test_moments_exact_free_poisson_is_catalan():
    ks = [1] * 12
    m = moments_from_cumulants_series(ks, 12)
    assert m == [catalan_number(n) for n in range(13)]
    assert isinstance(m[5], Fraction)


def test_moments_semicircle_standard():
    ks = [0, 1]
    m = moments_from_cumulants_series(ks, 12)
    assert [m[2 * j] for j in range(7)] == [catalan_number(j) for j in range(7)]
    assert all(m[2 * j + 1] == 0 for j in range(6))


def test_moments_point_mass():
    m = moments_from_cumulants_series([Fraction(3), 0, 0], 6)
    assert m == [Fraction(3) ** n for n in range(7)]


def test_moments_zero_cumulants():
    assert moments_from_cumulants_series([], 5) == [1, 0, 0, 0, 0, 0]


def test_moments_float_matches_exact():
    ks_exact = [Fraction(1), Fraction(1, 3), Fraction(-1, 45), Fraction(2)]
    ks_float = [float(k) for k in ks_exact]
    exact = moments_from_cumulants_series(ks_exact, 10)
    approx = moments_from_cumulants_series(ks_float, 10)
    for e, a in zip(exact, approx):
        assert abs(float(e) - a) <= 1e-12 * max(1.0, abs(float(e)))


def test_cumulants_from_moments_point_mass():
    c = 2.5
    ks = cumulants_from_moments_series([c**n for n in range(8)])
    assert abs(ks[0] - c) < 1e-12
    assert all(abs(k) < 1e-9 for k in ks[1:])


def test_cumulants_from_moments_catalan_gives_semicircle():
    moments = [catalan_number(n // 2) if n % 2 == 0 else 0 for n in range(13)]
    ks = cumulants_from_moments_series([Fraction(m) for m in moments])
    assert ks[1] == 1
    assert all(k == 0 for i, k in enumerate(ks) if i != 1)


def test_cumulants_from_uniform_moments():
    moments = [Fraction(1)] + [Fraction(1, n + 1) if n % 2 == 0 else Fraction(0) for n in range(1, 13)]
    ks = cumulants_from_moments_series(moments)
    assert ks[1] == Fraction(1, 3)
    assert ks[3] == Fraction(-1, 45)
    assert all(ks[2 * j] == 0 for j in range(6))
    # independent oracle: Taylor coefficients of coth(z) - 1/z
    for n in range(1, 13):
        assert ks[n - 1] == symmetric_uniform_cumulant(n)


def test_round_trip_random_floats():
    import random

    rnd = random.Random(7)
    ks = [rnd.uniform(-0.5, 1.5) for _ in range(12)]
    moments = moments_from_cumulants_series(ks, 12)
    back = cumulants_from_moments_series(moments)
    assert max(abs(a - b) for a, b in zip(ks, back)) < 1e-9
    again = moments_from_cumulants_series(back, 12)
    for a, b in zip(moments, again):
        assert abs(a - b) <= 1e-10 * max(1.0, abs(a))


def test_moment_sequence_validation():
    with pytest.raises(ValueError):
        cumulants_from_moments_series([2, 1, 1])
    with pytest.raises(ValueError):
        cumulants_from_moments_series([1, 2], n_max=5)


def test_bernoulli_numbers():
    assert bernoulli_number(0) == 1
    assert bernoulli_number(1) == Fraction(-1, 2)
    assert bernoulli_number(2) == Fraction(1, 6)
    assert bernoulli_number(4) == Fraction(-1, 30)
    assert bernoulli_number(12) == Fraction(-691, 2730)
    assert bernoulli_number(7) == 0


def test_zeta_against_known_value_and_direct_sum():
    assert abs(riemann_zeta(2.0) - math.pi**2 / 6) < 1e-12
    # direct summation witness: partial sum plus integral tail brackets zeta(3)
    partial = math.fsum(k**-3.0 for k in range(1, 200_001))
    lower = partial + 0.5 * (200_001.0) ** -2
    upper = partial + 0.5 * (200_000.0) ** -2
    assert lower - 1e-12 <= riemann_zeta(3.0) <= upper + 1e-12


@pytest.mark.parametrize("s", [1.2, 1.5, 2.0, 3.0, 4.0, 7.5, 12.0])
def test_zeta_against_mpmath(s):
    assert abs(riemann_zeta(s) - float(mpmath.zeta(s))) < 1e-12


def test_zeta_domain():
    with pytest.raises(ValueError):
        riemann_zeta(1.0)
    with pytest.raises(ValueError):
        riemann_zeta(0.5)
