"""Optional high-precision (50+ digit) re-evaluation of reported quantities.

Used by the CLI ``--precision high`` mode and by exactness-flagged tests.
Cumulants are lifted to exact rationals (every float is one), moments re-run
through the exact recursion, and the edge solve re-polished with mpmath.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath

from . import edge as edge_mod
from . import powerseries
from .freeprob import CumulantSpec

DIGITS = 50


def _exact_cumulants(spec: CumulantSpec, n_max: int) -> list[Fraction]:
    ks = []
    for n in range(1, n_max + 1):
        v = spec.k(n)
        ks.append(v if isinstance(v, Fraction) else Fraction(v))
    return ks


def _to_str(x) -> str:
    return mpmath.nstr(x, DIGITS, strip_zeros=False)


def moments_high(spec: CumulantSpec, n_max: int) -> list[dict]:
    """Rows (n, m_n, log(m_n)/n) with 50-digit decimal strings, exact recursion."""
    moments = powerseries.moments_from_cumulants_series(_exact_cumulants(spec, n_max), n_max)
    rows = []
    with mpmath.workdps(DIGITS + 10):
        for n, m in enumerate(moments):
            mv = mpmath.mpf(m.numerator) / m.denominator if isinstance(m, Fraction) else mpmath.mpf(m)
            growth = _to_str(mpmath.log(mv) / n) if n > 0 and mv > 0 else None
            rows.append({"n": n, "moment": _to_str(mv), "log_moment_over_n": growth})
    return rows


def edge_high(spec: CumulantSpec, n_window: int = 512) -> dict:
    """Re-solve the tilted maximisation with mpmath around the float optimum."""
    base = edge_mod.solve_edge(spec)
    limit = min(n_window, spec.truncation) if spec.is_finitely_supported else n_window
    ks = _exact_cumulants(spec, limit)
    support = [(n, k) for n, k in enumerate(ks, start=1) if k]
    with mpmath.workdps(DIGITS + 15):
        if len(support) == 1:
            n0, k0 = support[0]
            if n0 == 1:
                log_rho = mpmath.log(k0)
                m_star = mpmath.mpf(1)
            else:
                m = mpmath.mpf(n0)
                theta_cap = mpmath.log(m - 1) - m * mpmath.log(1 - 1 / m)
                log_rho = (mpmath.log(k0) + theta_cap) / m
                m_star = m
            return {
                "log_rho": _to_str(log_rho),
                "rho": _to_str(mpmath.exp(log_rho)),
                "theta_star": _to_str(mpmath.mpf(0)),
                "m_star": _to_str(m_star),
                "float_gap": float(abs(float(log_rho) - base.log_rho)),
            }

        def stats(theta):
            weights = [mpmath.mpf(k.numerator) / k.denominator * mpmath.exp(theta * n) for n, k in support]
            z = mpmath.fsum(weights)
            m = mpmath.fsum(w * n for (n, _), w in zip(support, weights)) / z
            return mpmath.log(z), m

        def g(theta):
            log_z, m = stats(theta)
            return log_z + mpmath.log(m - 1)

        lo = mpmath.mpf(base.theta_star) - mpmath.mpf("1e-6")
        hi = mpmath.mpf(base.theta_star) + mpmath.mpf("1e-6")
        while g(lo) > 0:
            lo -= mpmath.mpf("1e-4")
        while g(hi) < 0:
            hi += mpmath.mpf("1e-4")
        # g is strictly increasing; plain bisection reaches full precision.
        for _ in range(240):
            mid = (lo + hi) / 2
            if g(mid) < 0:
                lo = mid
            else:
                hi = mid
        theta = (lo + hi) / 2
        log_z, m = stats(theta)
        theta_cap = mpmath.log(m - 1) - m * mpmath.log(1 - 1 / m)
        log_rho = log_z / m - theta + theta_cap / m
        return {
            "log_rho": _to_str(log_rho),
            "rho": _to_str(mpmath.exp(log_rho)),
            "theta_star": _to_str(theta),
            "m_star": _to_str(m),
            "float_gap": float(abs(float(log_rho) - base.log_rho)),
        }
