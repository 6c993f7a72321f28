"""Free-cumulant sequences: data model, catalog, and moment conversions.

A compactly supported probability law is described here only through its free
cumulants (k_n): the coefficients that add under free convolution.  Moments
are recovered through the non-crossing moment-cumulant sum

    m_n = sum over non-crossing partitions pi of prod_j k_j^(number of
          size-j blocks of pi),

implemented both literally (exhaustive enumeration, the oracle) and through
the fast generating-function recursion in :mod:`ncfree.powerseries`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import powerseries
from .catalan import DEFAULT_ENUMERATION_CAP, block_type_counts
from .errors import EnumerationCapError

#: Default generator length used when a finite window of an infinite cumulant
#: sequence is needed (edge solver tails, JSON export of derived specs).
DEFAULT_TRUNCATION = 256

_GROWTH_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class CumulantSpec:
    """A free-cumulant sequence k_1, k_2, ... with a geometric growth bound.

    ``generator`` returns k_n for n >= 1 (Fractions welcome: exact values
    propagate through the conversions).  The bound |k_n| <= growth_scale *
    growth_radius**n is checked lazily on access.  ``truncation`` marks a
    sequence that is exactly zero beyond that index; ``descriptor`` is the
    JSON-facing description of how the spec was built.
    """

    generator: Callable[[int], object]
    growth_scale: float
    growth_radius: float
    truncation: int | None = None
    descriptor: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.growth_scale <= 0 or self.growth_radius <= 0:
            raise ValueError("growth bound requires positive scale and radius")
        object.__setattr__(self, "_cache", {})

    def k(self, n: int):
        """n-th free cumulant (exact type preserved), growth-checked."""
        if n < 1:
            raise ValueError(f"cumulant index must be >= 1, got {n}")
        cache = self._cache
        if n in cache:
            return cache[n]
        if self.truncation is not None and n > self.truncation:
            cache[n] = 0
            return 0
        val = self.generator(n)
        fval = abs(float(val)) if val else 0.0
        if fval > 0.0:
            bound = math.log(self.growth_scale) + n * math.log(self.growth_radius)
            if math.log(fval) > bound + _GROWTH_SLACK:
                raise ValueError(
                    f"|k_{n}| = {float(val)!r} violates the declared growth bound "
                    f"{self.growth_scale} * {self.growth_radius}**n"
                )
        cache[n] = val
        return val

    def in_support(self, n: int) -> bool:
        return bool(self.k(n))

    def support_upto(self, limit: int) -> list[int]:
        return [n for n in range(1, limit + 1) if self.in_support(n)]

    def min_support(self, probe_limit: int = DEFAULT_TRUNCATION) -> int:
        """Smallest n with k_n != 0; probes up to the truncation or limit."""
        limit = self.truncation if self.truncation is not None else probe_limit
        for n in range(1, limit + 1):
            if self.in_support(n):
                return n
        raise ValueError(f"no non-zero cumulant found up to n = {limit}")

    @property
    def is_finitely_supported(self) -> bool:
        return self.truncation is not None

    def cumulants(self, n_max: int) -> list:
        """[k_1, ..., k_n_max] with exact types preserved."""
        return [self.k(n) for n in range(1, n_max + 1)]

    def float_array(self, n_max: int) -> np.ndarray:
        """k_1..k_n_max as a float vector (index i holds k_{i+1}); cached."""
        arr = self._cache.get("farray")
        if arr is None or len(arr) < n_max:
            arr = np.array([float(self.k(n)) for n in range(1, n_max + 1)])
            self._cache["farray"] = arr
        return arr[:n_max]

    def to_json(self) -> dict:
        if not self.descriptor:
            raise ValueError("this spec carries no serialisable descriptor")
        return self.descriptor


def estimate_growth_bound(ks: Sequence) -> tuple[float, float]:
    """Fit (scale, radius) with |k_n| <= scale * radius**n over the given window.

    Log-linear regression of |k_n| on n over the non-zero entries; the scale
    is then inflated so the bound actually holds on every probed entry.
    """
    pts = [(n + 1, math.log(abs(float(k)))) for n, k in enumerate(ks) if k]
    if not pts:
        return 1.0, 1.0
    if len(pts) == 1:
        n0, logk = pts[0]
        return max(math.exp(logk), 1.0) * (1.0 + 1e-9), 1.0
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(xs, ys, 1)
    log_gamma = float(np.max(ys - slope * xs))
    return math.exp(log_gamma) * (1.0 + 1e-9), math.exp(float(slope))


# -- catalog ---------------------------------------------------------------


def point_mass(location: float) -> CumulantSpec:
    """Law of the constant ``location``: k_1 = location, all others zero."""
    return CumulantSpec(
        generator=lambda n: location if n == 1 else 0,
        growth_scale=max(abs(location), 1.0) * (1.0 + 1e-12),
        growth_radius=1.0,
        truncation=1,
        descriptor={"kind": "point_mass", "location": location},
    )


def semicircle(radius: float = 2.0) -> CumulantSpec:
    """Centred semicircle law of the given radius: k_2 = radius**2 / 4."""
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    k2 = radius * radius / 4.0
    return CumulantSpec(
        generator=lambda n: k2 if n == 2 else 0,
        growth_scale=max(k2, 1.0) * (1.0 + 1e-12),
        growth_radius=1.0,
        truncation=2,
        descriptor={"kind": "semicircle", "radius": radius},
    )


def free_poisson(rate: float) -> CumulantSpec:
    """Free Poisson law of the given rate: every free cumulant equals ``rate``."""
    if rate < 0:
        raise ValueError(f"rate must be non-negative, got {rate}")
    return CumulantSpec(
        generator=lambda n: rate,
        growth_scale=max(rate, 1e-12) * (1.0 + 1e-12),
        growth_radius=1.0,
        truncation=None,
        descriptor={"kind": "free_poisson", "rate": rate},
    )


def from_cumulants(ks: Sequence) -> CumulantSpec:
    """Finite cumulant list [k_1, k_2, ...]; zero beyond the list."""
    ks = list(ks)
    if not ks:
        raise ValueError("need at least one cumulant")
    scale, radius = estimate_growth_bound(ks)
    return CumulantSpec(
        generator=lambda n: ks[n - 1] if n <= len(ks) else 0,
        growth_scale=scale,
        growth_radius=radius,
        truncation=len(ks),
        descriptor={"kind": "finite", "cumulants": [float(k) for k in ks]},
    )


def uniform_symmetric(half_width: float = 1.0, length: int = 64) -> CumulantSpec:
    """Uniform law on [-a, a] via exact moment inversion, truncated at ``length``.

    Even moments a**(2j) / (2j+1) are inverted through the series recursion in
    exact rational arithmetic; the resulting cumulants alternate in sign and
    decay geometrically.  The tail beyond ``length`` is dropped (entries there
    are below 1e-30 for a = 1).
    """
    if half_width <= 0:
        raise ValueError(f"half width must be positive, got {half_width}")
    a = Fraction(half_width)
    moments = [Fraction(1)]
    for n in range(1, length + 1):
        moments.append(a**n / (n + 1) if n % 2 == 0 else Fraction(0))
    ks = powerseries.cumulants_from_moments_series(moments)
    scale, radius = estimate_growth_bound(ks)
    spec = CumulantSpec(
        generator=lambda n: ks[n - 1] if n <= len(ks) else 0,
        growth_scale=scale,
        growth_radius=radius,
        truncation=length,
        descriptor={"kind": "uniform_symmetric", "half_width": half_width, "length": length},
    )
    return spec


def levy_khintchine_cumulants(alpha: float, atoms: Sequence[tuple[float, float]]) -> CumulantSpec:
    """Freely infinitely divisible law with drift ``alpha`` and atomic jump measure.

    ``atoms`` lists (location, weight) pairs of a finite non-negative measure
    nu; the cumulants are k_1 = alpha and k_n = moment_{n-2}(nu) for n >= 2.
    """
    atoms = [(float(x), float(w)) for x, w in atoms]
    if any(w < 0 for _, w in atoms):
        raise ValueError("atom weights must be non-negative")
    mass = sum(w for _, w in atoms)
    span = max((abs(x) for x, w in atoms if w), default=0.0)

    def gen(n: int):
        if n == 1:
            return alpha
        return math.fsum(w * x ** (n - 2) for x, w in atoms)

    if span == 0.0:
        truncation = 2 if mass else 1
        scale = max(abs(alpha), mass, 1e-12) * (1.0 + 1e-9)
        radius = 1.0
    else:
        truncation = None
        radius = max(span, 1e-12)
        scale = max(mass / radius**2, abs(alpha) / radius, 1e-12) * (1.0 + 1e-9)
    return CumulantSpec(
        generator=gen,
        growth_scale=scale,
        growth_radius=radius,
        truncation=truncation,
        descriptor={"kind": "levy_khintchine", "alpha": alpha, "atoms": [[x, w] for x, w in atoms]},
    )


def free_convolve(a: CumulantSpec, b: CumulantSpec) -> CumulantSpec:
    """Free additive convolution: cumulants add term by term."""
    if a.truncation is None or b.truncation is None:
        truncation = None
    else:
        truncation = max(a.truncation, b.truncation)
    return CumulantSpec(
        generator=lambda n: a.k(n) + b.k(n),
        growth_scale=a.growth_scale + b.growth_scale,
        growth_radius=max(a.growth_radius, b.growth_radius),
        truncation=truncation,
        descriptor={"kind": "convolution", "parts": [a.descriptor, b.descriptor]}
        if a.descriptor and b.descriptor
        else {},
    )


def dilate(a: CumulantSpec, scale: float) -> CumulantSpec:
    """Dilation by ``scale`` > 0: k_n -> scale**n * k_n; the support edge scales by the same factor."""
    if scale <= 0:
        raise ValueError(f"dilation scale must be positive, got {scale}")
    s = Fraction(scale) if isinstance(scale, (int, Fraction)) else scale
    return CumulantSpec(
        generator=lambda n: a.k(n) * s**n,
        growth_scale=a.growth_scale,
        growth_radius=a.growth_radius * float(scale),
        truncation=a.truncation,
        descriptor={"kind": "dilate", "scale": float(scale), "base": a.descriptor} if a.descriptor else {},
    )


def shift_first_cumulant(a: CumulantSpec, offset: float) -> CumulantSpec:
    """Add ``offset`` to k_1 only; translates the law (and its support edge)."""
    k1 = abs(float(a.k(1)) + offset)
    return CumulantSpec(
        generator=lambda n: a.k(n) + offset if n == 1 else a.k(n),
        growth_scale=max(a.growth_scale, k1 / a.growth_radius) * (1.0 + 1e-12),
        growth_radius=a.growth_radius,
        truncation=None if a.truncation is None else max(a.truncation, 1),
        descriptor={"kind": "shift", "offset": offset, "base": a.descriptor} if a.descriptor else {},
    )


def zeta_weighted_cumulants(base: CumulantSpec, decay_exponent: float) -> CumulantSpec:
    """Cumulants of sum_j j**(-decay_exponent) * x_j for free copies x_j of the base law.

    Rescales each cumulant: k_n -> zeta(decay_exponent * n) * k_n(base).
    Requires decay_exponent * n > 1 on the whole support of the base.
    """
    n0 = base.min_support()
    if decay_exponent * n0 <= 1.0:
        raise ValueError(
            f"zeta(s) diverges at s = {decay_exponent * n0} (first supported index {n0}); "
            "increase the decay exponent"
        )
    zmax = powerseries.riemann_zeta(decay_exponent * n0)
    return CumulantSpec(
        generator=lambda n: base.k(n) * powerseries.riemann_zeta(decay_exponent * n),
        growth_scale=base.growth_scale * zmax * (1.0 + 1e-12),
        growth_radius=base.growth_radius,
        truncation=base.truncation,
        descriptor={"kind": "zeta_series", "decay_exponent": decay_exponent, "base": base.descriptor}
        if base.descriptor
        else {},
    )


def spec_from_json(obj: dict) -> CumulantSpec:
    """Rebuild a CumulantSpec from its JSON descriptor."""
    kind = obj.get("kind")
    if kind == "point_mass":
        return point_mass(float(obj["location"]))
    if kind == "semicircle":
        return semicircle(float(obj["radius"]))
    if kind == "free_poisson":
        return free_poisson(float(obj["rate"]))
    if kind == "finite":
        return from_cumulants([float(k) for k in obj["cumulants"]])
    if kind == "uniform_symmetric":
        return uniform_symmetric(float(obj["half_width"]), int(obj.get("length", 64)))
    if kind == "levy_khintchine":
        return levy_khintchine_cumulants(float(obj["alpha"]), [tuple(a) for a in obj["atoms"]])
    if kind == "convolution":
        parts = [spec_from_json(p) for p in obj["parts"]]
        spec = parts[0]
        for p in parts[1:]:
            spec = free_convolve(spec, p)
        return spec
    if kind == "dilate":
        return dilate(spec_from_json(obj["base"]), float(obj["scale"]))
    if kind == "shift":
        return shift_first_cumulant(spec_from_json(obj["base"]), float(obj["offset"]))
    if kind == "zeta_series":
        return zeta_weighted_cumulants(spec_from_json(obj["base"]), float(obj["decay_exponent"]))
    raise ValueError(f"unknown cumulant spec kind {kind!r}")


# -- moment computations ----------------------------------------------------


def moments_from_cumulants_bruteforce(
    spec: CumulantSpec, n_max: int, cap: int = DEFAULT_ENUMERATION_CAP
) -> list:
    """Moments by the literal sum over all non-crossing partitions.

    Grouped by block-size multiset (the product only depends on the type), so
    one enumeration per order serves every spec.  Exact for exact cumulants.
    Orders above ``cap`` raise EnumerationCapError — use the recursion there.
    """
    if n_max > cap:
        raise EnumerationCapError(f"brute-force moments need n_max <= {cap}, got {n_max}")
    moments: list = [1]
    for n in range(1, n_max + 1):
        total = 0
        for sizes, count in block_type_counts(n, cap=cap).items():
            prod = count
            for j in sizes:
                kj = spec.k(j)
                if not kj:
                    prod = 0
                    break
                prod = prod * kj
            total = total + prod
        moments.append(total)
    return moments


def moments_from_cumulants(spec: CumulantSpec, n_max: int) -> list:
    """Moments [m_0..m_n_max] via the generating-function recursion (fast path)."""
    return powerseries.moments_from_cumulants_series(spec.cumulants(n_max), n_max)


def cumulants_from_moments(moments: Sequence, n_max: int | None = None) -> CumulantSpec:
    """Finite CumulantSpec recovering the given moment sequence [1, m_1, ...]."""
    ks = powerseries.cumulants_from_moments_series(moments, n_max)
    spec = from_cumulants(ks)
    return spec
