"""Cumulant specs: catalog laws, convolution algebra, and moment conversions."""

import math
from fractions import Fraction

import pytest

from ncfree import (
    CumulantSpec,
    catalan_number,
    cumulants_from_moments,
    dilate,
    free_convolve,
    free_poisson,
    from_cumulants,
    levy_khintchine_cumulants,
    moments_from_cumulants,
    moments_from_cumulants_bruteforce,
    point_mass,
    semicircle,
    shift_first_cumulant,
    spec_from_json,
    uniform_symmetric,
    zeta_weighted_cumulants,
)
from ncfree.errors import EnumerationCapError
from ncfree.powerseries import riemann_zeta, symmetric_uniform_cumulant


def test_catalog_cumulants():
    assert point_mass(2.5).cumulants(4) == [2.5, 0, 0, 0]
    assert semicircle(2.0).cumulants(4) == [0, 1.0, 0, 0]
    assert semicircle(3.0).k(2) == 2.25
    assert free_poisson(1.5).cumulants(3) == [1.5, 1.5, 1.5]
    assert from_cumulants([1.0, 0.5]).cumulants(4) == [1.0, 0.5, 0, 0]


def test_uniform_symmetric_exact_values():
    u = uniform_symmetric()
    assert u.k(2) == Fraction(1, 3)
    assert u.k(4) == Fraction(-1, 45)
    assert u.k(6) == Fraction(2, 945)
    assert all(u.k(n) == 0 for n in range(1, 20, 2))
    for n in range(1, 30):
        assert u.k(n) == symmetric_uniform_cumulant(n)


def test_uniform_growth_estimate_near_reciprocal_pi():
    u = uniform_symmetric()
    assert 0.9 / math.pi < u.growth_radius < 1.1 / math.pi


def test_moment_cumulant_formula_bruteforce_examples():
    # all cumulants 1: every partition contributes 1, so m_n = |NC(n)| = C_n
    fp = free_poisson(1)
    assert moments_from_cumulants_bruteforce(fp, 8) == [catalan_number(n) for n in range(9)]
    # k_2 only: pair partitions counted by Catalan numbers
    sc = moments_from_cumulants_bruteforce(semicircle(2.0), 8)
    assert sc == [1, 0, 1, 0, 2, 0, 5, 0, 14]
    # k_1 = c only: just the all-singletons partition survives
    pm = moments_from_cumulants_bruteforce(point_mass(0.5), 6)
    assert pm == [0.5**n for n in range(7)]


def test_bruteforce_matches_literal_per_path_sum():
    # oracle for the oracle: expand the sum path by path at small order
    from ncfree.catalan import enumerate_dyck_paths

    spec = from_cumulants([0.7, 1.1, 0.3])
    for n in range(1, 8):
        literal = 0.0
        for path in enumerate_dyck_paths(n):
            prod = 1.0
            for run in path.descent_lengths():
                prod *= spec.k(run) if run <= 3 else 0.0
            literal += prod
        fast = moments_from_cumulants_bruteforce(spec, n)[n]
        assert abs(literal - fast) <= 1e-12 * max(1.0, abs(literal))


def test_bruteforce_cap():
    with pytest.raises(EnumerationCapError):
        moments_from_cumulants_bruteforce(free_poisson(1), 15)


def test_recursive_matches_bruteforce():
    specs = [
        semicircle(2.0),
        free_poisson(1),
        free_poisson(2),
        free_convolve(free_poisson(1), uniform_symmetric()),
        from_cumulants([0.3, 0.9, 0.1, 0.05]),
    ]
    for spec in specs:
        brute = moments_from_cumulants_bruteforce(spec, 10)
        fast = moments_from_cumulants(spec, 10)
        for b, f in zip(brute, fast):
            assert abs(float(b) - float(f)) <= 1e-10 * max(1.0, abs(float(b)))


def test_free_poisson_two_moments():
    m = moments_from_cumulants(free_poisson(2), 3)
    assert m[1] == 2 and m[2] == 6 and m[3] == 22


def test_cumulants_from_moments_round_trip():
    spec = free_convolve(free_poisson(1), uniform_symmetric())
    moments = moments_from_cumulants(spec, 12)
    back = cumulants_from_moments(moments)
    again = moments_from_cumulants(back, 12)
    for a, b in zip(moments, again):
        assert abs(float(a) - float(b)) <= 1e-10 * max(1.0, abs(float(a)))
    for n in range(1, 13):
        assert abs(float(back.k(n)) - float(spec.k(n))) < 1e-9


def test_free_convolve_examples():
    zero = point_mass(0.0)
    fp = free_poisson(1)
    assert free_convolve(fp, zero).cumulants(6) == fp.cumulants(6)
    two = free_convolve(free_poisson(1), free_poisson(1))
    assert two.cumulants(5) == free_poisson(2).cumulants(5)
    mix = free_convolve(fp, uniform_symmetric())
    assert mix.k(1) == 1
    assert mix.k(2) == Fraction(4, 3)
    assert mix.k(3) == 1
    assert mix.k(4) == Fraction(44, 45)
    assert all(mix.k(n) > 0 for n in range(1, 41))


def test_free_convolve_commutative_associative():
    a = from_cumulants([0.2, 0.5, 0.1])
    b = semicircle(1.5)
    c = free_poisson(0.5)
    ab = free_convolve(a, b)
    ba = free_convolve(b, a)
    assert ab.cumulants(12) == ba.cumulants(12)
    left = free_convolve(free_convolve(a, b), c)
    right = free_convolve(a, free_convolve(b, c))
    assert left.cumulants(12) == right.cumulants(12)


def test_dilate():
    fp = free_poisson(1)
    assert dilate(fp, 1.0).cumulants(6) == fp.cumulants(6)
    # semicircle radius r scaled by c has k_2 = (cr)^2/4
    assert abs(dilate(semicircle(2.0), 3.0).k(2) - semicircle(6.0).k(2)) < 1e-12
    round_trip = dilate(dilate(fp, 3.0), 1.0 / 3.0)
    for n in range(1, 20):
        assert abs(round_trip.k(n) - fp.k(n)) <= 1e-12
    with pytest.raises(ValueError):
        dilate(fp, 0.0)


def test_shift_first_cumulant():
    fp = free_poisson(1)
    assert shift_first_cumulant(fp, 0.0).cumulants(5) == fp.cumulants(5)
    shifted = shift_first_cumulant(point_mass(0.0), 1.5)
    assert shifted.cumulants(4) == [1.5, 0, 0, 0]
    up = shift_first_cumulant(fp, 2.0)
    assert up.k(1) == 3.0 and up.k(2) == 1.0


def test_levy_khintchine_examples():
    std_semi = levy_khintchine_cumulants(0.0, [(0.0, 1.0)])
    assert std_semi.cumulants(5) == [0.0, 1.0, 0.0, 0, 0]
    fp_like = levy_khintchine_cumulants(1.0, [(1.0, 1.0)])
    assert fp_like.cumulants(6) == [1.0] * 6
    drift = levy_khintchine_cumulants(2.0, [])
    assert drift.cumulants(4) == [2.0, 0, 0, 0]
    with pytest.raises(ValueError):
        levy_khintchine_cumulants(0.0, [(1.0, -1.0)])


def test_zeta_weighted_cumulants():
    sc = zeta_weighted_cumulants(semicircle(2.0), 1.0)
    assert abs(sc.k(2) - riemann_zeta(2.0)) < 1e-12
    assert sc.k(1) == 0 and sc.k(3) == 0
    fp = zeta_weighted_cumulants(free_poisson(2.0), 2.0)
    for n in (1, 2, 3, 5):
        assert abs(fp.k(n) - 2.0 * riemann_zeta(2.0 * n)) < 1e-12
    with pytest.raises(ValueError):
        zeta_weighted_cumulants(free_poisson(1.0), 0.5)


def test_growth_bound_checked_lazily():
    bad = CumulantSpec(generator=lambda n: 10.0**n, growth_scale=1.0, growth_radius=2.0)
    with pytest.raises(ValueError):
        bad.k(3)


def test_spec_json_round_trip():
    specs = [
        point_mass(1.5),
        semicircle(2.0),
        free_poisson(2.0),
        uniform_symmetric(),
        from_cumulants([0.1, 0.2, 0.3]),
        levy_khintchine_cumulants(1.0, [(0.5, 2.0)]),
        free_convolve(free_poisson(1.0), uniform_symmetric()),
        dilate(free_poisson(1.0), 3.0),
        shift_first_cumulant(free_poisson(1.0), -1.0),
        zeta_weighted_cumulants(free_poisson(1.0), 2.0),
    ]
    for spec in specs:
        clone = spec_from_json(spec.to_json())
        for n in range(1, 16):
            assert abs(float(clone.k(n)) - float(spec.k(n))) < 1e-12
    with pytest.raises(ValueError):
        spec_from_json({"kind": "nope"})
