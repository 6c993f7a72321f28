"""Rate functions, entropy identities, and the bounded-Lipschitz metric."""

import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ncfree import (
    PmfOnN,
    block_size_rate,
    block_size_rate_joint,
    bounded_lipschitz_distance,
    empirical_block_stats,
    entropy,
    geometric_joint_rate,
    max_entropy_given_mean,
    relative_entropy_vs_geometric,
    sample_dyck_cycle,
    stream_rng,
)
from ncfree.errors import PrecisionError

LOG2 = math.log(2.0)


def random_pmf(rnd, max_support=12):
    size = rnd.randint(1, 6)
    ks = rnd.sample(range(1, max_support + 1), size)
    ws = [rnd.expovariate(1.0) + 1e-3 for _ in ks]
    z = math.fsum(ws)
    return PmfOnN({k: w / z for k, w in zip(ks, ws)})


pmfs = st.randoms(use_true_random=False).map(random_pmf)


# -- PmfOnN ---------------------------------------------------------------------


def test_pmf_basics():
    p = PmfOnN({2: 0.25, 1: 0.75})
    assert p.support == (1, 2)
    assert p.mass == 1.0 and p.is_probability()
    assert p.mean == 1.25
    assert p.get(3) == 0.0
    with pytest.raises(ValueError):
        PmfOnN({0: 1.0})
    with pytest.raises(ValueError):
        PmfOnN({1: -0.5})


def test_pmf_geometric_is_probability():
    g = PmfOnN.geometric()
    assert g.is_probability()
    assert abs(g.mean - 2.0) < 1e-12
    assert g.tail_mass == 0.5**512
    gm = PmfOnN.geometric_with_mean(3.0, truncation=256)
    assert abs(gm.mean - 3.0) < 1e-9


def test_pmf_mixture():
    mix = PmfOnN.delta(1).mixed_with(PmfOnN.delta(3), 0.25)
    assert mix.as_dict() == {1: 0.75, 3: 0.25}
    assert mix.is_probability()


# -- entropy and relative entropy --------------------------------------------------


def test_entropy_examples():
    assert entropy(PmfOnN.delta(2)) == 0.0
    assert abs(entropy(PmfOnN.uniform([1, 2])) - LOG2) < 1e-15
    assert abs(entropy(PmfOnN.geometric()) - 2 * LOG2) < 1e-12
    with pytest.raises(ValueError):
        entropy(PmfOnN({1: 0.5}))


def test_relative_entropy_examples():
    assert abs(relative_entropy_vs_geometric(PmfOnN.geometric())) < 1e-12
    assert abs(relative_entropy_vs_geometric(PmfOnN.delta(1)) - LOG2) < 1e-15
    assert abs(relative_entropy_vs_geometric(PmfOnN.delta(3)) - 3 * LOG2) < 1e-15


@settings(max_examples=300, derandomize=True)
@given(pmfs)
def test_relative_entropy_identity_and_gibbs(p):
    direct = relative_entropy_vs_geometric(p)
    assert abs(direct - (p.mean * LOG2 - p.entropy)) <= 1e-10
    assert direct >= -1e-13


def test_gibbs_zero_only_at_geometric():
    near = PmfOnN({k: 2.0**-k for k in range(1, 40)}, tail_mass=2.0**-40)
    assert relative_entropy_vs_geometric(near) < 1e-11
    bent = PmfOnN({1: 0.55, 2: 0.25, 3: 0.2})
    assert relative_entropy_vs_geometric(bent) > 1e-3


# -- max entropy at fixed mean -------------------------------------------------------


def test_max_entropy_examples():
    assert abs(max_entropy_given_mean(2.0) - 2 * LOG2) < 1e-14
    assert max_entropy_given_mean(1.0 + 1e-9) < 3e-8
    with pytest.raises(ValueError):
        max_entropy_given_mean(1.0)
    with pytest.raises(ValueError):
        max_entropy_given_mean(0.5)


@pytest.mark.parametrize("m", [1.5, 2.0, 3.0, 5.0])
def test_max_entropy_matches_geometric_family_search(m):
    # The maximiser at mean m is the geometric law with that mean; locate it
    # inside the truncated geometric family by 1-D bisection on the mean.
    lo, hi = 1e-9, 1.0 - 1e-9
    for _ in range(80):
        mid = (lo + hi) / 2
        if PmfOnN.geometric(mid, truncation=400).mean < m:
            lo = mid
        else:
            hi = mid
    found = PmfOnN.geometric((lo + hi) / 2, truncation=400)
    assert abs(found.mean - m) < 1e-9
    assert abs(max_entropy_given_mean(m) - found.entropy) < 1e-8


def test_max_entropy_tight_on_geometric_family():
    # every geometric law attains the bound at its own mean
    for ratio in (0.1, 0.3, 0.5, 0.7, 0.85):
        q = PmfOnN.geometric(ratio, truncation=500)
        assert abs(max_entropy_given_mean(q.mean) - q.entropy) < 1e-10


@settings(max_examples=300, derandomize=True)
@given(pmfs)
def test_max_entropy_dominates(q):
    if q.mean > 1.0:
        assert max_entropy_given_mean(q.mean) >= q.entropy - 1e-12


# -- rate functions ---------------------------------------------------------------


def test_joint_rate_zero_point_and_constraints():
    g = PmfOnN.geometric()
    assert abs(block_size_rate_joint(2.0, g, 0.25)) <= 1e-12
    assert block_size_rate_joint(2.0, g, 1.0 / 3.0) == math.inf
    assert block_size_rate_joint(2.5, g, 0.25) == math.inf


def test_marginal_rate_examples():
    assert abs(block_size_rate(PmfOnN.geometric())) <= 1e-12
    assert block_size_rate(PmfOnN.delta(1)) == math.inf
    assert abs(block_size_rate(PmfOnN.delta(2)) - LOG2) < 1e-14


def test_joint_rate_against_high_precision():
    # geometric law with mean 3/2 evaluated at 50 digits
    m = 1.5
    p = PmfOnN.geometric_with_mean(m, truncation=420)
    ours = block_size_rate_joint(m, p, 1.0 / (2.0 * m))
    with mpmath.workdps(50):
        mm = mpmath.mpf(3) / 2
        h = -mpmath.fsum(
            mpmath.mpf(w) * mpmath.log(w) for _, w in p.items()
        )
        expected = (
            2 * mpmath.log(2)
            - h / mm
            - mpmath.log(mm - 1) / mm
            + mpmath.log(1 - 1 / mm)
        )
        assert abs(ours - float(expected)) < 1e-12


def test_mean_law_rate_examples():
    g = PmfOnN.geometric()
    assert abs(geometric_joint_rate(2.0, g)) < 1e-12
    assert geometric_joint_rate(3.0, g) == math.inf
    assert abs(geometric_joint_rate(1.0, PmfOnN.delta(1)) - LOG2) < 1e-15


@settings(max_examples=200, derandomize=True)
@given(pmfs)
def test_marginal_rate_nonnegative(p):
    assert block_size_rate(p) >= -1e-13


@settings(max_examples=60, derandomize=True)
@given(pmfs, pmfs, st.floats(min_value=0.05, max_value=0.95))
def test_marginal_rate_convex_on_mixtures(p, q, t):
    if p.mean <= 1.0 or q.mean <= 1.0:
        return
    mix = p.mixed_with(q, t)
    left = block_size_rate(mix)
    right = (1 - t) * block_size_rate(p) + t * block_size_rate(q)
    assert left <= right + 1e-10


# -- bounded-Lipschitz distance ------------------------------------------------------


def _beta_two_atoms_oracle(w1, w2, k1, k2):
    # dense grid search over piecewise-linear witnesses on two atoms,
    # refined around the coarse optimum
    gap = abs(k1 - k2)

    def feasible(f1, f2):
        return abs(f1 - f2) / gap + max(abs(f1), abs(f2)) <= 1.0 + 1e-15

    def sweep(lo1, hi1, lo2, hi2, steps):
        best = (-math.inf, 0.0, 0.0)
        for i in range(steps + 1):
            f1 = lo1 + (hi1 - lo1) * i / steps
            for j in range(steps + 1):
                f2 = lo2 + (hi2 - lo2) * j / steps
                if feasible(f1, f2):
                    val = w1 * f1 - w2 * f2
                    if val > best[0]:
                        best = (val, f1, f2)
        return best

    best = sweep(-1.0, 1.0, -1.0, 1.0, 400)
    for _ in range(4):
        _, f1, f2 = best
        r = 2.0 / 400
        best = sweep(f1 - r, f1 + r, f2 - r, f2 + r, 400)
        r /= 100
    return best[0]


def test_beta_identity():
    g = PmfOnN.geometric()
    assert bounded_lipschitz_distance(g, g) == 0.0


def test_beta_two_atoms_vs_grid_oracle():
    lp = bounded_lipschitz_distance(PmfOnN.delta(1), PmfOnN.delta(2))
    oracle = _beta_two_atoms_oracle(1.0, 1.0, 1, 2)
    assert abs(lp - oracle) < 1e-6
    assert abs(lp - 2.0 / 3.0) < 1e-9


def test_beta_far_atoms():
    # atoms 1 and 5: the Lipschitz part saturates, distance still <= 1
    lp = bounded_lipschitz_distance(PmfOnN.delta(1), PmfOnN.delta(5))
    oracle = _beta_two_atoms_oracle(1.0, 1.0, 1, 5)
    assert abs(lp - oracle) < 1e-6


def test_beta_metric_axioms():
    a = PmfOnN({1: 0.4, 3: 0.6})
    b = PmfOnN({2: 0.7, 5: 0.3})
    c = PmfOnN.geometric(truncation=64)
    ab = bounded_lipschitz_distance(a, b)
    ba = bounded_lipschitz_distance(b, a)
    assert abs(ab - ba) < 1e-9
    assert ab > 0
    for x, y, z in ((a, b, c), (a, c, b), (b, c, a)):
        assert bounded_lipschitz_distance(x, y) <= (
            bounded_lipschitz_distance(x, z) + bounded_lipschitz_distance(z, y) + 1e-9
        )


def test_beta_tail_precision_error():
    heavy = PmfOnN({1: 0.5}, tail_mass=0.5)
    with pytest.raises(PrecisionError):
        bounded_lipschitz_distance(heavy, PmfOnN.delta(1))


def test_beta_lln_trend_small():
    geom = PmfOnN.geometric(truncation=128)
    means = []
    for j, n in enumerate((100, 1000)):
        vals = []
        for r in range(10):
            stats = empirical_block_stats(sample_dyck_cycle(n, stream_rng(99, 17 * j + r)))
            vals.append(bounded_lipschitz_distance(stats.to_pmf(), geom))
        means.append(sum(vals) / len(vals))
    assert means[1] < means[0]
