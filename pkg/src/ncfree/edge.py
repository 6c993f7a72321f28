"""Variational solver for the maximum of the support from non-negative free cumulants.

For a compactly supported law whose free cumulants k_n are all non-negative,
the log of the right support edge rho equals

    sup over probability laws p on the support set L of
        (1/m) * sum_n p_n log(k_n / p_n) + Theta(m)/m,     m = mean of p,

with Theta the maximal entropy at fixed mean (ldp.max_entropy_given_mean) and
the 0 log 0 convention.  At fixed mean the inner maximiser is an exponential
tilt p_n proportional to k_n e^(theta n), which collapses the problem to one
dimension: with Z(theta) = sum_n k_n e^(theta n) and m(theta) = Z'/Z,

    F(theta) = log Z(theta)/m(theta) - theta + Theta(m(theta))/m(theta)

is maximised over theta < theta_max = -log(growth radius) (theta_max = +inf
for finitely supported cumulants).  F' has the sign of -(log Z + log(m - 1)),
which is strictly increasing in theta, so F is unimodal and the maximiser is
the root of g(theta) = log Z + log(m - 1); the solver brackets it with a
log-spaced scan, narrows by golden section, then polishes the root of g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from . import freeprob
from .errors import SolverError
from .freeprob import CumulantSpec
from .ldp import PmfOnN, max_entropy_given_mean

#: Relative tail target for truncating infinite cumulant sums.
TAIL_TARGET = 1e-12
#: Hard cap on summation windows during bracketing scans.
SCAN_WINDOW_CAP = 1 << 16
#: Hard cap on summation windows for final evaluations.
WINDOW_CAP = 1 << 20

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class EdgeResult:
    """Output of solve_edge.

    ``p_star`` is the maximising block-size law, ``m_star`` its mean, and
    ``theta_star`` the optimal tilt.  ``objective_residual`` is the recomputed
    |objective(p_star) - log_rho|; ``truncation_tail_bound`` bounds the
    relative mass of the dropped tilt tail; ``gradient_norm`` is |F'(theta*)|.
    """

    log_rho: float
    rho: float
    theta_star: float
    m_star: float
    p_star: PmfOnN
    objective_residual: float
    truncation_tail_bound: float
    gradient_norm: float
    iterations: int
    scan: tuple[tuple[float, float], ...] | None = None


class FreePoissonEdge(NamedTuple):
    """Closed-form optimum for the free Poisson law (rate >= 1)."""

    tau_star: float
    m_star: float
    log_rho: float


def edge_objective(p: PmfOnN, spec: CumulantSpec) -> float:
    """Evaluate (1/m) sum p_n log(k_n/p_n) + Theta(m)/m at the law ``p``.

    ``p`` must be a probability law charging only indices with k_n != 0;
    the degenerate mean-1 case (p = delta_1) returns log k_1.
    """
    if not p.is_probability():
        raise ValueError(f"edge objective needs a probability law, mass {p.mass!r}")
    for n, w in p.items():
        if w > 0.0 and not spec.in_support(n):
            raise ValueError(f"law charges index {n} where the cumulant vanishes")
    if p.support == (1,):
        return math.log(float(spec.k(1)))
    m = p.mean
    inner = math.fsum(w * (math.log(float(spec.k(n))) - math.log(w)) for n, w in p.items() if w > 0.0)
    return inner / m + max_entropy_given_mean(m) / m


def _safe_horizon(spec: CumulantSpec) -> int:
    """Largest index whose growth envelope still fits in float range."""
    if spec.growth_radius <= 1.0:
        return 1 << 30
    return max(64, int((690.0 - math.log(spec.growth_scale)) / math.log(spec.growth_radius)))


def _nonneg_window(spec: CumulantSpec, limit: int) -> None:
    ks = spec.float_array(min(limit, _safe_horizon(spec)))
    bad = np.nonzero(ks < 0.0)[0]
    if bad.size:
        n = int(bad[0]) + 1
        raise ValueError(f"cumulant k_{n} = {ks[n - 1]!r} is negative; the edge formula needs k_n >= 0")


def _window_length(spec: CumulantSpec, theta: float, cap: int) -> tuple[int, float]:
    # Length N such that the dropped tail of Z is below TAIL_TARGET relative
    # to the growth-bound envelope; returns (N, absolute tail bound).
    x = spec.growth_radius * math.exp(theta)
    if x >= 1.0:
        raise SolverError(f"tilt {theta} is outside the convergence region")
    gamma = spec.growth_scale
    # solve gamma * x^(N+1) / (1-x) <= TAIL_TARGET for N
    need = (math.log(TAIL_TARGET) + math.log1p(-x) - math.log(gamma)) / math.log(x)
    n = int(min(max(64.0, need + 2.0), float(cap), float(_safe_horizon(spec))))
    log_tail = math.log(gamma) + (n + 1) * math.log(x) - math.log1p(-x)
    tail = math.exp(log_tail) if log_tail < 700.0 else math.inf
    return n, tail


def _tilt_stats(spec: CumulantSpec, theta: float, cap: int) -> tuple[float, float, float, float]:
    """(log Z, mean, variance, tail bound) of the tilt k_n e^(theta n)."""
    if spec.is_finitely_supported:
        n_window, tail = spec.truncation, 0.0
    else:
        n_window, tail = _window_length(spec, theta, cap)
    ks = spec.float_array(n_window)
    ns = np.nonzero(ks > 0.0)[0] + 1
    if ns.size == 0:
        raise SolverError("no positive cumulants in the summation window")
    logw = np.log(ks[ns - 1]) + theta * ns
    wmax = float(np.max(logw))
    ew = np.exp(logw - wmax)
    z = float(np.sum(ew))
    log_z = wmax + math.log(z)
    probs = ew / z
    m = float(np.dot(ns, probs))
    var = float(np.dot(ns * ns, probs)) - m * m
    rel_tail = math.exp(math.log(tail) - log_z) if tail > 0.0 else 0.0
    return log_z, m, max(var, 0.0), rel_tail


def _objective_from_stats(log_z: float, m: float, theta: float) -> float:
    if m <= 1.0:
        # Only reachable in the theta -> -inf limit when 1 is in the support.
        return log_z - theta
    return log_z / m - theta + max_entropy_given_mean(m) / m


def _singleton_result(spec: CumulantSpec, n0: int, keep_trace: bool) -> EdgeResult:
    k0 = float(spec.k(n0))
    if n0 == 1:
        log_rho = math.log(k0)
    else:
        log_rho = (math.log(k0) + max_entropy_given_mean(float(n0))) / n0
    p_star = PmfOnN.delta(n0)
    residual = abs(edge_objective(p_star, spec) - log_rho)
    return EdgeResult(
        log_rho=log_rho,
        rho=math.exp(log_rho),
        theta_star=0.0,
        m_star=float(n0),
        p_star=p_star,
        objective_residual=residual,
        truncation_tail_bound=0.0,
        gradient_norm=0.0,
        iterations=0,
        scan=((0.0, log_rho),) if keep_trace else None,
    )


def solve_edge(
    spec: CumulantSpec,
    *,
    scan_points: int = 48,
    span: float = 10.0,
    boundary_margin: float = 1e-6,
    golden_tol: float = 1e-12,
    max_iterations: int = 500,
    keep_trace: bool = False,
) -> EdgeResult:
    """Maximise the tilted objective F and return the support-edge data.

    Scan a log-spaced theta grid up to the convergence boundary, bracket the
    best point, golden-section to ``golden_tol`` interval width, then polish
    the stationarity root.  Raises on negative cumulants; raises SolverError
    when no bracket can be formed within the iteration budget.
    """
    probe = spec.truncation if spec.is_finitely_supported else 4096
    _nonneg_window(spec, probe)

    if spec.is_finitely_supported:
        support = spec.support_upto(spec.truncation)
        if not support:
            raise ValueError("all cumulants vanish; the spec describes no law")
        if len(support) == 1:
            return _singleton_result(spec, support[0], keep_trace)
        theta_max = math.inf
        grid = np.concatenate(
            [-np.logspace(math.log10(span), -6.0, scan_points // 2), [0.0],
             np.logspace(-6.0, math.log10(span), scan_points // 2)]
        )
    else:
        theta_max = -math.log(spec.growth_radius)
        offsets = np.logspace(math.log10(span), -math.log10(1.0 / boundary_margin), scan_points)
        grid = theta_max - offsets

    evaluations = 0

    def f_value(theta: float, cap: int = SCAN_WINDOW_CAP) -> float:
        nonlocal evaluations
        evaluations += 1
        log_z, m, _, _ = _tilt_stats(spec, theta, cap)
        return _objective_from_stats(log_z, m, theta)

    values = [f_value(t) for t in grid]
    trace = tuple(zip((float(t) for t in grid), values)) if keep_trace else None
    best = int(np.argmax(values))

    # Extend outward if the maximum sits on the first grid point.
    lo_theta, lo_val = float(grid[0]), values[0]
    while best == 0 and evaluations < max_iterations:
        candidate = theta_max - 2.0 * (theta_max - lo_theta) if math.isfinite(theta_max) else lo_theta * 2.0 - span
        cand_val = f_value(candidate)
        if cand_val <= lo_val:
            break
        grid = np.concatenate([[candidate], grid])
        values.insert(0, cand_val)
        lo_theta, lo_val = candidate, cand_val
        best = int(np.argmax(values))
    if best == len(values) - 1 and math.isfinite(theta_max):
        # Supremum pushed against the convergence boundary; fall through with
        # the boundary bracket (the golden stage will stay inside it).
        best -= 1
    if best == len(values) - 1:
        while evaluations < max_iterations:
            candidate = float(grid[-1]) * 2.0 + span
            cand_val = f_value(candidate)
            grid = np.concatenate([grid, [candidate]])
            values.append(cand_val)
            if cand_val <= values[-2]:
                break
            best = len(values) - 1
        best = int(np.argmax(values))
        best = min(best, len(values) - 2)
    best = max(best, 1)

    a, b, c = float(grid[best - 1]), float(grid[best]), float(grid[best + 1])
    fb = values[best]

    # Golden-section on [a, c] keeping the interior point b.
    x1 = b
    f1 = fb
    while c - a > golden_tol and evaluations < max_iterations:
        if c - x1 > x1 - a:
            x2 = x1 + (1.0 - _GOLDEN) * (c - x1)
        else:
            x2 = x1 - (1.0 - _GOLDEN) * (x1 - a)
        f2 = f_value(x2)
        if f2 > f1:
            if x2 > x1:
                a = x1
            else:
                c = x1
            x1, f1 = x2, f2
        else:
            if x2 > x1:
                c = x2
            else:
                a = x2
    theta_star = x1

    # Stationarity polish: g(theta) = log Z + log(m-1) is strictly increasing
    # and vanishes at the maximiser; use it when a sign change brackets it.
    def g_value(theta: float) -> float:
        log_z, m, _, _ = _tilt_stats(spec, theta, WINDOW_CAP)
        if m <= 1.0:
            return -math.inf
        return log_z + math.log(m - 1.0)

    # Golden section localises the maximiser only to the numerical plateau of
    # F (about sqrt(eps)); widen the bracket until it straddles the g-root.
    for width in (max(c - a, 1e-9), 1e-6, 1e-3, 1e-1):
        lo_pt, hi_pt = theta_star - width, theta_star + width
        if math.isfinite(theta_max):
            hi_pt = min(hi_pt, theta_max - boundary_margin * 1e-3)
        g_lo, g_hi = g_value(lo_pt), g_value(hi_pt)
        if math.isfinite(g_lo) and math.isfinite(g_hi) and g_lo < 0.0 < g_hi:
            root = brentq(g_value, lo_pt, hi_pt, xtol=1e-15, rtol=8.9e-16)
            # The stationarity root is the maximiser; only reject it on a
            # clear objective drop (beyond evaluation noise).
            if f_value(root, WINDOW_CAP) >= f1 - 1e-9:
                theta_star = float(root)
            break

    log_z, m_star, var, rel_tail = _tilt_stats(spec, theta_star, WINDOW_CAP)
    log_rho = _objective_from_stats(log_z, m_star, theta_star)
    gradient = 0.0
    if m_star > 1.0:
        gradient = abs(-var * (log_z + math.log(m_star - 1.0)) / (m_star * m_star))

    # Materialise the maximising law on its support window.
    if spec.is_finitely_supported:
        n_window = spec.truncation
    else:
        n_window, _ = _window_length(spec, theta_star, WINDOW_CAP)
    ks = spec.float_array(n_window)
    ns = np.nonzero(ks > 0.0)[0] + 1
    logw = np.log(ks[ns - 1]) + theta_star * ns
    ew = np.exp(logw - np.max(logw))
    probs = ew / float(np.sum(ew))
    weights = {int(n): float(p) for n, p in zip(ns, probs) if p > 1e-17}
    p_star = PmfOnN(weights, tail_mass=max(0.0, 1.0 - math.fsum(weights.values())))
    residual = abs(edge_objective(p_star, spec) - log_rho)

    return EdgeResult(
        log_rho=log_rho,
        rho=math.exp(log_rho),
        theta_star=theta_star,
        m_star=m_star,
        p_star=p_star,
        objective_residual=residual,
        truncation_tail_bound=rel_tail,
        gradient_norm=gradient,
        iterations=evaluations,
        scan=trace,
    )


def free_poisson_reference(rate: float) -> FreePoissonEdge:
    """Closed-form optimum for the free Poisson law of the given rate (>= 1).

    tau* = sqrt(rate) / (2 (sqrt(rate)+1)), m* = 1/(2 tau*), and
    log rho = 2 log(1 + sqrt(rate)); used as the solver's reference oracle.
    """
    if rate < 1.0:
        raise ValueError(f"the closed form assumes rate >= 1, got {rate}")
    root = math.sqrt(rate)
    tau_star = root / (2.0 * (root + 1.0))
    return FreePoissonEdge(
        tau_star=tau_star,
        m_star=1.0 / (2.0 * tau_star),
        log_rho=2.0 * math.log1p(root),
    )


def moment_growth_estimate(spec: CumulantSpec, n_max: int = 100) -> list[tuple[int, float]]:
    """Diagnostic sequence (n, log(m_n)/n) converging up to log rho.

    Moments come from the fast recursion; on float overflow the cumulants are
    dilated down, the recursion re-run, and the log-scale shift added back.
    Orders with m_n = 0 (odd moments of symmetric laws) are skipped.
    """
    _nonneg_window(spec, spec.truncation if spec.is_finitely_supported else min(4 * n_max, 4096))
    moments = freeprob.moments_from_cumulants(spec, n_max)
    log_shift = 0.0
    if not all(math.isfinite(m) for m in moments):
        first_bad = next(i for i, m in enumerate(moments) if not math.isfinite(m))
        anchor = next(m for m in reversed(moments[:first_bad]) if m > 0.0)
        scale = anchor ** (1.0 / max(first_bad - 1, 1)) * 2.0
        shrunk = freeprob.dilate(spec, 1.0 / scale)
        moments = freeprob.moments_from_cumulants(shrunk, n_max)
        log_shift = math.log(scale)
        if not all(math.isfinite(m) for m in moments):
            raise SolverError("moment recursion overflows even after rescaling")
    return [
        (n, math.log(m) / n + log_shift)
        for n, m in enumerate(moments[1:], start=1)
        if m > 0.0
    ]


class TiltStationarity(NamedTuple):
    """Root of the stationarity system, solved through the cumulant series."""

    gamma: float
    mean: float
    log_rho: float
    residuals: tuple[float, float]


def _series_sums(spec: CumulantSpec, gamma: float) -> tuple[float, float]:
    """(R(gamma), R'(gamma)) for R(gamma) = sum_n k_n gamma^(n-1)."""
    if spec.is_finitely_supported:
        n_window = spec.truncation
    else:
        x = spec.growth_radius * gamma
        if x >= 1.0:
            raise SolverError(f"gamma = {gamma} is outside the series radius")
        need = (math.log(TAIL_TARGET) + math.log1p(-x) - math.log(spec.growth_scale)) / math.log(x)
        n_window = int(min(max(64.0, need + 2.0), float(WINDOW_CAP), float(_safe_horizon(spec))))
    ks = spec.float_array(n_window)
    ns = np.arange(1, n_window + 1)
    powers = gamma ** (ns - 1)
    r = float(np.dot(ks, powers))
    r_prime = float(np.dot(ks[1:] * (ns[1:] - 1), powers[:-1]))
    return r, r_prime


def solve_tilt_stationarity(spec: CumulantSpec, *, bracket_cap: float | None = None) -> TiltStationarity:
    """Solve the two stationarity equations of the tilt parametrisation directly.

    In the variables (gamma, m) = (e^theta, mean) the maximiser satisfies

        gamma * R(gamma) = 1 / (m - 1)          (tilt normalisation)
        (m - 1) * R(gamma) = gamma * R'(gamma)  (mean condition)

    and log rho = log(m / ((m-1) * gamma)).  Eliminating m turns the system
    into the strictly increasing scalar equation gamma^2 R'(gamma) = 1, which
    is bracketed and solved by brentq; this route never evaluates the entropy
    functional, so it cross-checks solve_edge through independent arithmetic.
    """
    _nonneg_window(spec, spec.truncation if spec.is_finitely_supported else 4096)

    def u(gamma: float) -> float:
        _, r_prime = _series_sums(spec, gamma)
        return gamma * gamma * r_prime - 1.0

    if bracket_cap is None:
        bracket_cap = math.inf if spec.is_finitely_supported else 1.0 / spec.growth_radius
    lo = 1e-12
    if u(lo) > 0.0:
        raise SolverError("stationarity bracket failed at the lower end")
    hi = min(0.5, bracket_cap * 0.5)
    for _ in range(200):
        if u(hi) > 0.0:
            break
        hi = hi * 2.0 if not math.isfinite(bracket_cap) else (hi + bracket_cap) / 2.0
        if math.isfinite(bracket_cap) and bracket_cap - hi < 1e-14:
            raise SolverError("no stationary point inside the series radius")
    else:
        raise SolverError("stationarity bracket failed at the upper end")
    gamma = float(brentq(u, lo, hi, xtol=1e-15, rtol=8.9e-16))

    r, r_prime = _series_sums(spec, gamma)
    mean = 1.0 + 1.0 / (gamma * r)
    res1 = gamma * r - 1.0 / (mean - 1.0)
    res2 = (mean - 1.0) * r - gamma * r_prime
    log_rho = math.log(mean) - math.log(mean - 1.0) - math.log(gamma)
    return TiltStationarity(gamma=gamma, mean=mean, log_rho=log_rho, residuals=(res1, res2))
