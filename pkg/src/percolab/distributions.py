"""Degree distributions: generating functions, moments, thinning, sampling.

A degree distribution is the limiting law (p_j) of the degree of a uniformly
random vertex.  All families enforce a finite positive mean.  Operations that
sum infinite series certify the truncation tail against an analytic bound.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import special, stats

SERIES_TOL = 1e-14
PROB_TOL = 1e-12

INF = math.inf


class UnboundedTailError(ValueError):
    """Requested series value cannot be certified (divergent or untractable tail)."""


class UnsupportedFamilyError(ValueError):
    """The family does not support the requested operation (e.g. sampling)."""


@dataclass
class FactorialMoments:
    """E D, E D(D-1), E D(D-2) and E D(D-1)(D-2); +inf marks certified divergence."""

    m1: float
    m2: float
    m3: float

    @property
    def dm2(self) -> float:
        # E D(D-2) = E D(D-1) - E D
        return self.m2 - self.m1 if self.m2 != INF else INF


class DegreeDistribution:
    """Base class; subclasses implement one family each."""

    family = "abstract"

    # --- primitives -----------------------------------------------------
    def pmf(self, j: int) -> float:
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def factorial_moment(self, r: int) -> float:
        """E D(D-1)...(D-r+1), possibly +inf."""
        raise NotImplementedError

    def pgf(self, x: float, order: int = 0) -> float:
        """order-th derivative of the PGF at x in [0, 1]."""
        raise NotImplementedError

    def tail_weight_bound(self, cutoff: int) -> float:
        """Certified upper bound on sum_{j>cutoff} j p_j."""
        raise NotImplementedError

    def tail_weight2_bound(self, cutoff: int) -> float:
        """Certified upper bound on sum_{j>cutoff} j^2 p_j (may be +inf)."""
        raise NotImplementedError

    def thin(self, p: float):
        """Binomial thinning D_p: keep each of D points with probability p."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"retention probability {p} outside [0, 1]")
        if p == 1.0:
            return self
        if p == 0.0:
            # total thinning is the one case where a degenerate law is allowed
            return TableDistribution({0: 1.0}, allow_degenerate=True)
        return self._thin(p)

    def _thin(self, p: float):
        return ThinnedDistribution(self, p)

    def size_biased_shift(self):
        """Law of (size-biased D) - 1: P = (j+1) p_{j+1} / mean."""
        return SizeBiasedShift(self)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise UnsupportedFamilyError(f"no sampler for family {self.family!r}")

    # --- conveniences ---------------------------------------------------
    def pmf_array(self, upto: int) -> np.ndarray:
        """Vector of p_j for j = 0..upto inclusive."""
        return np.array([self.pmf(j) for j in range(upto + 1)], dtype=float)

    def cutoff(self, tol: float = 1e-13, weight: int = 1) -> int:
        """Smallest power-of-two-ish K with the weighted tail below tol."""
        bound = self.tail_weight_bound if weight == 1 else self.tail_weight2_bound
        k = 8
        while k < 10**8:
            b = bound(k)
            if b < tol:
                return k
            if b == INF:
                raise UnboundedTailError(
                    f"tail of order-{weight} weighted series diverges for {self.family}"
                )
            k *= 2
        raise UnboundedTailError("tail bound does not fall below tolerance")

    def _validate_mean(self):
        lam = self.mean()
        if not (0.0 < lam < INF):
            raise ValueError(f"degree distribution must have finite positive mean, got {lam}")


def _check_x(x: float):
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"PGF argument {x} outside [0, 1]")


def _falling(l, r):
    out = np.ones_like(l, dtype=float)
    for i in range(r):
        out = out * (l - i)
    return out


class TableDistribution(DegreeDistribution):
    """Finite table p_j on an explicit support (covers point masses, two-point laws,
    truncated power laws, any empirical table)."""

    family = "table"

    def __init__(self, weights: dict[int, float], allow_degenerate: bool = False):
        items = sorted((int(j), float(p)) for j, p in weights.items() if p != 0.0)
        if not items:
            raise ValueError("empty weight table")
        self.support = np.array([j for j, _ in items], dtype=np.int64)
        self.probs = np.array([p for _, p in items], dtype=float)
        if (self.support < 0).any():
            raise ValueError("negative degrees in table")
        if (self.probs < 0).any():
            raise ValueError("negative probabilities in table")
        if abs(self.probs.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"table probabilities sum to {self.probs.sum()}, not 1")
        self._cum = np.cumsum(self.probs)
        if not allow_degenerate:
            self._validate_mean()

    def pmf(self, j):
        idx = np.searchsorted(self.support, j)
        if idx < len(self.support) and self.support[idx] == j:
            return float(self.probs[idx])
        return 0.0

    def mean(self):
        return float(np.dot(self.support, self.probs))

    def factorial_moment(self, r):
        return float(np.dot(_falling(self.support, r), self.probs))

    def pgf(self, x, order=0):
        _check_x(x)
        ff = _falling(self.support, order)
        expo = np.maximum(self.support - order, 0)
        # terms with support < order have ff == 0
        return float(np.dot(ff * self.probs, np.power(float(x), expo)))

    def tail_weight_bound(self, cutoff):
        mask = self.support > cutoff
        return float(np.dot(self.support[mask], self.probs[mask]))

    def tail_weight2_bound(self, cutoff):
        mask = self.support > cutoff
        return float(np.dot(self.support[mask] ** 2, self.probs[mask]))

    def _thin(self, p):
        top = int(self.support.max())
        js = np.arange(top + 1)
        new = np.zeros(top + 1)
        for d, w in zip(self.support, self.probs):
            new[: d + 1] += w * stats.binom.pmf(js[: d + 1], int(d), p)
        return TableDistribution({j: q for j, q in enumerate(new) if q > 0.0})

    def size_biased_shift(self):
        lam = self.mean()
        shifted = {
            int(j - 1): float(j * p / lam) for j, p in zip(self.support, self.probs) if j >= 1
        }
        return TableDistribution(shifted)

    def sample(self, n, rng):
        u = rng.random(n)
        return self.support[np.searchsorted(self._cum, u)]


class PoissonDistribution(DegreeDistribution):
    family = "poisson"

    def __init__(self, lam: float):
        if not lam > 0:
            raise ValueError("Poisson rate must be positive")
        self.lam = float(lam)

    def pmf(self, j):
        return float(stats.poisson.pmf(j, self.lam))

    def mean(self):
        return self.lam

    def factorial_moment(self, r):
        return self.lam**r

    def pgf(self, x, order=0):
        _check_x(x)
        return self.lam**order * math.exp(self.lam * (x - 1.0))

    def tail_weight_bound(self, cutoff):
        # sum_{j>K} j p_j = lam * P(Po(lam) >= K)
        return self.lam * float(stats.poisson.sf(cutoff - 1, self.lam))

    def tail_weight2_bound(self, cutoff):
        # sum j^2 p_j tail = lam^2 P(>=K-1) + lam P(>=K)
        return self.lam**2 * float(stats.poisson.sf(cutoff - 2, self.lam)) + self.tail_weight_bound(
            cutoff
        )

    def _thin(self, p):
        return PoissonDistribution(self.lam * p)

    def size_biased_shift(self):
        # Poisson is self-reproducing under size-bias-and-shift
        return PoissonDistribution(self.lam)

    def sample(self, n, rng):
        return rng.poisson(self.lam, size=n).astype(np.int64)


class PoissonMixture(DegreeDistribution):
    """Finite mixture sum_i q_i Po(lambda_i)."""

    family = "poisson-mixture"

    def __init__(self, weights, lams):
        self.qs = np.asarray(weights, dtype=float)
        self.lams = np.asarray(lams, dtype=float)
        if self.qs.shape != self.lams.shape:
            raise ValueError("weights and lambdas must have equal length")
        if (self.qs < 0).any() or (self.lams < 0).any():
            raise ValueError("negative mixture parameters")
        if abs(self.qs.sum() - 1.0) > PROB_TOL:
            raise ValueError("mixture weights must sum to 1")
        self._validate_mean()

    def pmf(self, j):
        return float(np.dot(self.qs, stats.poisson.pmf(j, self.lams)))

    def mean(self):
        return float(np.dot(self.qs, self.lams))

    def factorial_moment(self, r):
        return float(np.dot(self.qs, self.lams**r))

    def pgf(self, x, order=0):
        _check_x(x)
        return float(np.dot(self.qs, self.lams**order * np.exp(self.lams * (x - 1.0))))

    def tail_weight_bound(self, cutoff):
        return float(np.dot(self.qs * self.lams, stats.poisson.sf(cutoff - 1, self.lams)))

    def tail_weight2_bound(self, cutoff):
        t = np.dot(self.qs * self.lams**2, stats.poisson.sf(cutoff - 2, self.lams))
        return float(t) + self.tail_weight_bound(cutoff)

    def _thin(self, p):
        return PoissonMixture(self.qs, self.lams * p)

    def size_biased_shift(self):
        lam = self.mean()
        w = self.qs * self.lams / lam
        keep = w > 0
        return PoissonMixture(w[keep], self.lams[keep])

    def sample(self, n, rng):
        comp = rng.choice(len(self.qs), size=n, p=self.qs)
        return rng.poisson(self.lams[comp]).astype(np.int64)


class PowerLawDistribution(DegreeDistribution):
    """p_k = c k^{-gamma} for k >= k_min, c fixed by normalization.

    Requires gamma > 2 (finite mean).  A finite k_max yields an explicit table
    instead; use TableDistribution via from_spec for that.
    """

    family = "power-law"

    _SAMPLE_TAIL = 1e-12
    _TABLE_CAP = 10**7

    def __init__(self, gamma: float, k_min: int = 1):
        if gamma <= 2:
            raise ValueError("power law needs gamma > 2 for a finite mean")
        if k_min < 1:
            raise ValueError("k_min must be >= 1")
        self.gamma = float(gamma)
        self.k_min = int(k_min)
        self.c = 1.0 / float(special.zeta(self.gamma, self.k_min))
        self._sample_table = None

    def pmf(self, j):
        if j < self.k_min:
            return 0.0
        return self.c * float(j) ** (-self.gamma)

    def _zeta_from(self, s):
        # sum_{k >= k_min} k^{-s}; +inf when s <= 1
        if s <= 1:
            return INF
        return float(special.zeta(s, self.k_min))

    def mean(self):
        return self.c * self._zeta_from(self.gamma - 1)

    def factorial_moment(self, r):
        if r == 1:
            return self.mean()
        if r == 2:
            z2 = self._zeta_from(self.gamma - 2)
            if z2 == INF:
                return INF
            return self.c * (z2 - self._zeta_from(self.gamma - 1))
        if r == 3:
            z3 = self._zeta_from(self.gamma - 3)
            if z3 == INF:
                return INF
            return self.c * (
                z3 - 3 * self._zeta_from(self.gamma - 2) + 2 * self._zeta_from(self.gamma - 1)
            )
        raise ValueError("factorial moments supported for r in {1, 2, 3}")

    def pgf(self, x, order=0):
        _check_x(x)
        if x == 1.0:
            val = 1.0 if order == 0 else self.factorial_moment(order)
            if val == INF:
                raise UnboundedTailError(
                    f"order-{order} PGF derivative at 1 diverges for gamma={self.gamma}"
                )
            return val
        if 1.0 - x < 1e-3:
            return self._pgf_polylog(x, order)
        return self._pgf_series(x, order)

    # Li-based evaluation is exact up to mpmath precision; used where the raw
    # series would need ~1/(1-x) terms.
    _FALLING_IN_POWERS = {0: {0: 1.0}, 1: {1: 1.0}, 2: {2: 1.0, 1: -1.0}, 3: {3: 1.0, 2: -3.0, 1: 2.0}}

    def _pgf_polylog(self, x, order):
        coeffs = self._FALLING_IN_POWERS[order]
        with mpmath.workdps(30):
            mx = mpmath.mpf(x)
            total = mpmath.mpf(0)
            for m, a in coeffs.items():
                li = mpmath.polylog(self.gamma - m, mx)
                for l in range(1, self.k_min):
                    li -= mx**l / mpmath.mpf(l) ** (self.gamma - m)
                total += a * li
            total *= self.c / mx**order
            return float(total)

    def _pgf_series(self, x, order):
        total = 0.0
        l = max(self.k_min, order)
        while True:
            term = _falling(np.int64(l), order) * self.c * float(l) ** (-self.gamma) * x ** (l - order)
            total += float(term)
            # geometric tail bound: ratios approach x from above
            ratio = x * ((l + 1) / l) ** order
            if ratio < 1.0:
                tail = float(term) * ratio / (1.0 - ratio)
                if tail < SERIES_TOL:
                    return total
            l += 1
            if l > 10**7:
                raise UnboundedTailError("power-law PGF series failed to converge")

    def tail_weight_bound(self, cutoff):
        if cutoff < self.k_min:
            cutoff = self.k_min
        # integral bound on c * sum_{j>K} j^{1-gamma}
        return self.c * cutoff ** (2.0 - self.gamma) / (self.gamma - 2.0)

    def tail_weight2_bound(self, cutoff):
        if self.gamma <= 3:
            return INF
        if cutoff < self.k_min:
            cutoff = self.k_min
        return self.c * cutoff ** (3.0 - self.gamma) / (self.gamma - 3.0)

    def sample(self, n, rng):
        if self._sample_table is None:
            # cumulative table out to certified tail mass below _SAMPLE_TAIL
            kmax = int(
                (self.c / ((self.gamma - 1.0) * self._SAMPLE_TAIL)) ** (1.0 / (self.gamma - 1.0))
            ) + self.k_min
            if kmax > self._TABLE_CAP:
                raise UnsupportedFamilyError(
                    f"power-law sampling table would need {kmax} entries (gamma too close to 2)"
                )
            ks = np.arange(self.k_min, kmax + 1, dtype=np.int64)
            w = self.c * ks.astype(float) ** (-self.gamma)
            self._sample_table = (ks, np.cumsum(w) / w.sum())
        ks, cum = self._sample_table
        return ks[np.searchsorted(cum, rng.random(n))]


class ThinnedDistribution(DegreeDistribution):
    """Generic binomial thinning wrapper; closed families override via _thin."""

    family = "thinned"

    def __init__(self, base: DegreeDistribution, p: float):
        self.base = base
        self.p = float(p)

    def pmf(self, j):
        # sum_{l >= j} p_l * P(Bi(l, p) = j), truncated with certified tail
        top = self.base.cutoff(1e-15)
        ls = np.arange(j, top + 1)
        pl = np.array([self.base.pmf(int(l)) for l in ls])
        return float(np.dot(pl, stats.binom.pmf(j, ls, self.p)))

    def mean(self):
        return self.p * self.base.mean()

    def factorial_moment(self, r):
        b = self.base.factorial_moment(r)
        return INF if b == INF else self.p**r * b

    def pgf(self, x, order=0):
        _check_x(x)
        return self.p**order * self.base.pgf(1.0 - self.p + self.p * x, order)

    def tail_weight_bound(self, cutoff):
        # D_p > K implies D > K, and E D_p 1{D>K} = p E D 1{D>K}
        return self.p * self.base.tail_weight_bound(cutoff)

    def tail_weight2_bound(self, cutoff):
        b = self.base.tail_weight2_bound(cutoff)
        return INF if b == INF else self.p**2 * b + self.tail_weight_bound(cutoff)

    def _thin(self, p):
        return self.base.thin(self.p * p)

    def sample(self, n, rng):
        d = self.base.sample(n, rng)
        return rng.binomial(d, self.p).astype(np.int64)


class SizeBiasedShift(DegreeDistribution):
    """Generic size-biased-and-shifted law: P(j) = (j+1) p_{j+1} / mean.

    Its PGF is g'(x) / mean, so derivatives delegate to the base at order + 1.
    """

    family = "size-biased-shift"

    def __init__(self, base: DegreeDistribution):
        self.base = base
        self.lam = base.mean()
        self._sample_table = None

    def pmf(self, j):
        return (j + 1) * self.base.pmf(j + 1) / self.lam

    def mean(self):
        m2 = self.base.factorial_moment(2)
        return INF if m2 == INF else m2 / self.lam

    def factorial_moment(self, r):
        b = self.base.factorial_moment(r + 1)
        return INF if b == INF else b / self.lam

    def pgf(self, x, order=0):
        return self.base.pgf(x, order + 1) / self.lam

    def tail_weight_bound(self, cutoff):
        b = self.base.tail_weight2_bound(cutoff)
        return INF if b == INF else b / self.lam

    def tail_weight2_bound(self, cutoff):
        return INF  # third-moment tails not tracked generically

    def sample(self, n, rng):
        if self._sample_table is None:
            top = self.base.cutoff(1e-12)
            w = np.array([self.pmf(j) for j in range(top + 1)])
            self._sample_table = np.cumsum(w) / w.sum()
        return np.searchsorted(self._sample_table, rng.random(n)).astype(np.int64)


# --- convenience constructors ------------------------------------------


def point_mass(j: int) -> TableDistribution:
    return TableDistribution({j: 1.0})


def two_point(j1: int, j2: int, p1: float) -> TableDistribution:
    return TableDistribution({j1: p1, j2: 1.0 - p1})


def factorial_moments(dist: DegreeDistribution) -> FactorialMoments:
    return FactorialMoments(
        dist.factorial_moment(1), dist.factorial_moment(2), dist.factorial_moment(3)
    )


def pgf_eval(dist: DegreeDistribution, x: float, order: int = 0) -> float:
    return dist.pgf(x, order)


def thin(dist: DegreeDistribution, p: float) -> DegreeDistribution:
    return dist.thin(p)


def size_biased_shift(dist: DegreeDistribution) -> DegreeDistribution:
    return dist.size_biased_shift()


# --- degree sequences ---------------------------------------------------


@dataclass
class DegreeSequence:
    """Finite degree sequence with even sum (half-edges pair up)."""

    degrees: np.ndarray
    parity_fixed_vertex: int | None = field(default=None, compare=False)

    def __post_init__(self):
        self.degrees = np.asarray(self.degrees, dtype=np.int64)
        if self.degrees.ndim != 1 or len(self.degrees) < 1:
            raise ValueError("degree sequence must be a non-empty 1-D array")
        if (self.degrees < 0).any():
            raise ValueError("degrees must be non-negative")
        if int(self.degrees.sum()) % 2 != 0:
            raise ValueError("degree sum must be even")

    @property
    def n(self) -> int:
        return len(self.degrees)

    def counts(self) -> np.ndarray:
        """n_j = number of vertices of degree j, j = 0..max."""
        return np.bincount(self.degrees)

    @classmethod
    def from_file(cls, path) -> "DegreeSequence":
        degrees = np.loadtxt(path, dtype=np.int64, ndmin=1)
        return cls(degrees)

    def to_file(self, path):
        np.savetxt(path, self.degrees, fmt="%d")


def sample_degree_sequence(
    dist: DegreeDistribution, n: int, rng_seed
) -> DegreeSequence:
    """n i.i.d. draws; one uniformly chosen vertex bumped by +1 if the sum is odd."""
    if n < 1:
        raise ValueError("need n >= 1")
    rng = as_rng(rng_seed)
    degrees = dist.sample(n, rng)
    fixed = None
    if int(degrees.sum()) % 2 != 0:
        fixed = int(rng.integers(n))
        degrees = degrees.copy()
        degrees[fixed] += 1
    return DegreeSequence(degrees, parity_fixed_vertex=fixed)


def as_rng(rng_seed) -> np.random.Generator:
    if isinstance(rng_seed, np.random.Generator):
        return rng_seed
    return np.random.default_rng(rng_seed)


# --- JSON specification files ------------------------------------------

_SPEC_FIELDS = {
    "poisson": {"lambda"},
    "table": {"weights"},
    "two-point": {"j1", "j2", "p1"},
    "poisson-mixture": {"weights", "lambdas"},
    "power-law": {"gamma", "k_min", "k_max"},
}


def from_spec(spec: dict) -> DegreeDistribution:
    """Build a distribution from a specification mapping; unknown fields rejected."""
    if "family" not in spec:
        raise ValueError("distribution spec needs a 'family' field")
    family = spec["family"]
    if family not in _SPEC_FIELDS:
        raise ValueError(f"unknown family {family!r}")
    extra = set(spec) - _SPEC_FIELDS[family] - {"family"}
    if extra:
        raise ValueError(f"unknown fields for family {family!r}: {sorted(extra)}")
    if family == "poisson":
        return PoissonDistribution(spec["lambda"])
    if family == "table":
        return TableDistribution({int(j): float(p) for j, p in spec["weights"].items()})
    if family == "two-point":
        return two_point(spec["j1"], spec["j2"], spec["p1"])
    if family == "poisson-mixture":
        return PoissonMixture(spec["weights"], spec["lambdas"])
    # power law, optionally truncated to a finite table
    gamma = spec["gamma"]
    k_min = spec.get("k_min", 1)
    k_max = spec.get("k_max")
    if k_max is None:
        return PowerLawDistribution(gamma, k_min)
    ks = np.arange(k_min, k_max + 1, dtype=float)
    w = ks ** (-float(gamma))
    w /= w.sum()
    return TableDistribution({int(k): float(p) for k, p in zip(ks, w)})


def load_spec(path_or_inline: str) -> DegreeDistribution:
    """Accept either a JSON file path or an inline JSON string."""
    text = path_or_inline.strip()
    if not text.startswith("{"):
        with open(path_or_inline) as fh:
            text = fh.read()
    return from_spec(json.loads(text))
