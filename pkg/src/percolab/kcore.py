"""k-core asymptotics: h, h1, phi curves, thresholds, sizes, phase transitions.

Central objects: h(p) = E(D_p 1{D_p >= k}) and h1(p) = P(D_p >= k) for the
binomial thinning D_p, and phi(p) = h(p)/p^2.  The k-core of the percolated
graph is governed by the largest root p_max of phi(p) = lam/pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from scipy import optimize

from .distributions import INF, DegreeDistribution, PoissonMixture


class UnresolvedTransitionError(RuntimeError):
    """Grid refinement failed to stabilize the transition count."""


_SMALL_P = 1e-3
_SUM_CAP = 200000


def _small_p_support(dist):
    """Support array and pmf for the positive-series forms, or None if the
    needed cutoff is impractically large (heavy mixtures).  Cached on the
    distribution object since the grid sweeps hit this thousands of times."""
    if hasattr(dist, "_smallp_cache"):
        return dist._smallp_cache
    try:
        cutoff = dist.cutoff(1e-13)
    except Exception:
        dist._smallp_cache = None
        return None
    if cutoff > _SUM_CAP:
        dist._smallp_cache = None
        return None
    ls = np.arange(1, cutoff + 1)
    pl = np.array([dist.pmf(int(l)) for l in ls])
    keep = pl > 0
    dist._smallp_cache = (ls[keep], pl[keep])
    return dist._smallp_cache


def h_func(dist: DegreeDistribution, k: int, p: float) -> float:
    """h(p) = E(D_p 1{D_p >= k}) = lam*p - sum_{j=1}^{k-1} p^j/(j-1)! g^{(j)}(1-p).

    At small p the subtraction form cancels catastrophically, so a positive
    series h(p) = p sum_l l p_l P(Bi(l-1, p) >= k-1) takes over there.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if p == 0.0:
        return 0.0
    if p < _SMALL_P:
        sup = _small_p_support(dist)
        if sup is not None:
            from scipy import stats

            ls, pl = sup
            return p * float(np.dot(ls * pl, stats.binom.sf(k - 2, ls - 1, p)))
    lam = dist.mean()
    total = lam * p
    for j in range(1, k):
        total -= p**j / math.factorial(j - 1) * dist.pgf(1.0 - p, j)
    return total


def h1_func(dist: DegreeDistribution, k: int, p: float) -> float:
    """h1(p) = P(D_p >= k) = 1 - sum_{j=0}^{k-1} p^j/j! * g^{(j)}(1-p)."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if p == 0.0:
        return 0.0
    if p < _SMALL_P:
        sup = _small_p_support(dist)
        if sup is not None:
            from scipy import stats

            ls, pl = sup
            return float(np.dot(pl, stats.binom.sf(k - 1, ls, p)))
    total = 1.0
    for j in range(k):
        total -= p**j / math.factorial(j) * dist.pgf(1.0 - p, j)
    return total


def h_func_direct(dist: DegreeDistribution, k: int, p: float, cutoff: int = None) -> float:
    """h by the defining double sum over (degree, thinned value); slow oracle."""
    from scipy import stats

    if p == 0.0:
        return 0.0
    if cutoff is None:
        cutoff = dist.cutoff(1e-14)
    total = 0.0
    for l in range(k, cutoff + 1):
        pl = dist.pmf(l)
        if pl == 0.0:
            continue
        js = np.arange(k, l + 1)
        total += pl * float(np.dot(js, stats.binom.pmf(js, l, p)))
    return total


def phi_func(dist: DegreeDistribution, k: int, p: float) -> float:
    """phi(p) = h(p)/p^2 on (0, 1]; p = 0 is outside the domain."""
    if p <= 0.0:
        raise ValueError("phi is defined on (0, 1] only")
    return h_func(dist, k, p) / p**2


def _phi_grid(dist, k, n_uniform=10**4, p_floor=1e-8):
    """Mixed evaluation grid: log-spaced below 1e-4, uniform above."""
    logs = np.geomspace(p_floor, 1e-4, 200, endpoint=False)
    unis = np.linspace(1e-4, 1.0, n_uniform)
    return np.concatenate([logs, unis])


def _phi_values(dist, k, ps):
    return np.array([phi_func(dist, k, p) for p in ps])


def _refine_max(dist, k, lo, hi):
    res = optimize.minimize_scalar(
        lambda p: -phi_func(dist, k, p), bounds=(lo, hi), method="bounded",
        options={"xatol": 1e-13},
    )
    return float(res.x), float(-res.fun)


def kcore_threshold(dist: DegreeDistribution, k: int) -> float:
    """pi_c(k) = lam / sup_{(0,1]} phi(p); 0 when the sup diverges.

    For k = 2 the sup equals E D(D-1) and is approached as p -> 0, so the
    closed form E D / E D(D-1) is used directly.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    lam = dist.mean()
    if k == 2:
        m2 = dist.factorial_moment(2)
        if m2 == INF:
            return 0.0
        if m2 == 0.0:
            return INF
        return lam / m2
    sup, _, unbounded = _phi_sup(dist, k)
    if unbounded:
        return 0.0
    return lam / sup


def _phi_sup(dist, k):
    """(sup value, argmax or None when approached at p -> 0, unbounded flag)."""
    ps = _phi_grid(dist, k)
    vals = _phi_values(dist, k, ps)
    i = int(np.argmax(vals))
    best_p, best_v = ps[i], vals[i]
    if 0 < i < len(ps) - 1:
        best_p, best_v = _refine_max(dist, k, ps[i - 1], ps[i + 1])
    # probe smaller p when the grid maximum sits at the lower boundary
    if i == 0:
        p = ps[0]
        prev = best_v
        for _ in range(20):
            p /= 4.0
            v = phi_func(dist, k, p)
            if v <= prev:
                break
            prev = v
        else:
            return prev, None, True
        if prev > best_v:
            return prev, None, False
    return best_v, best_p, False


@dataclass
class KCoreReport:
    k: int
    pi: float
    p_max: float
    v_frac: float
    e_frac: float
    v_j: np.ndarray = field(default=None)
    empty: bool = True
    at_local_max: bool = False
    near_threshold: bool = False
    mode: str = "site"


def _largest_root(dist, k, target, ps=None, vals=None):
    """Largest p in (0, 1] with phi(p) = target, scanning down from p = 1."""
    if ps is None:
        ps = _phi_grid(dist, k)
        vals = _phi_values(dist, k, ps)
    diff = vals - target
    if abs(diff[-1]) < 1e-12:
        return 1.0
    # walk down until the sign flips from negative (at p=1) to positive
    for i in range(len(ps) - 1, 0, -1):
        if diff[i] == 0.0:
            return float(ps[i])
        if diff[i] < 0.0 <= diff[i - 1] or diff[i] > 0.0 >= diff[i - 1]:
            return float(
                optimize.brentq(
                    lambda p: phi_func(dist, k, p) - target, ps[i - 1], ps[i], xtol=1e-13
                )
            )
    return None


def _phi_deriv(dist, k, p, step=1e-6):
    a = max(p - step, 1e-12)
    b = min(p + step, 1.0)
    return (phi_func(dist, k, b) - phi_func(dist, k, a)) / (b - a)


def _kcore_profile(dist, p_max, k, scale):
    thinned = dist.thin(p_max)
    top = thinned.cutoff(1e-10)
    prof = np.array([scale * thinned.pmf(j) for j in range(top + 1)])
    prof[:k] = 0.0
    return prof


def kcore_site(dist: DegreeDistribution, k: int, pi: float, with_profile=True) -> KCoreReport:
    """Limiting k-core of site-percolated graphs (uniform retention pi)."""
    return _kcore(dist, k, pi, "site", with_profile)


def kcore_bond(dist: DegreeDistribution, k: int, pi: float, with_profile=True) -> KCoreReport:
    """Limiting k-core of bond-percolated graphs (uniform retention pi)."""
    return _kcore(dist, k, pi, "bond", with_profile)


def _kcore(dist, k, pi, mode, with_profile):
    if not 0.0 <= pi <= 1.0:
        raise ValueError("pi must lie in [0, 1]")
    lam = dist.mean()
    pic = kcore_threshold(dist, k)
    near = abs(pi - pic) < 1e-9
    if pi == 0.0 or pi < pic or (pi == pic and pi < 1.0):
        return KCoreReport(k, pi, 0.0, 0.0, 0.0, empty=True, near_threshold=near, mode=mode)
    p_max = _largest_root(dist, k, lam / pi)
    if p_max is None:
        return KCoreReport(k, pi, 0.0, 0.0, 0.0, empty=True, near_threshold=near, mode=mode)
    h1 = h1_func(dist, k, p_max)
    if mode == "site":
        v = pi * h1
        e = lam * p_max**2 / 2.0
        scale = pi
    else:
        v = h1
        e = lam * p_max**2 / (2.0 * pi)
        scale = 1.0
    at_max = False
    if p_max < 1.0:
        d1 = _phi_deriv(dist, k, p_max)
        if abs(d1) < 1e-7:
            d2 = (_phi_deriv(dist, k, min(p_max + 1e-5, 1.0))
                  - _phi_deriv(dist, k, max(p_max - 1e-5, 1e-9))) / 2e-5
            at_max = d2 < 0
    profile = _kcore_profile(dist, p_max, k, scale) if with_profile else None
    return KCoreReport(
        k, pi, p_max, v, e, profile, empty=v <= 0.0,
        at_local_max=at_max, near_threshold=near, mode=mode,
    )


@dataclass
class PhaseTransition:
    pi_tilde: float
    p_tilde: float
    order: str  # first-order | continuous | boundary-at-1 | threshold-sup-not-attained
    jump: float = 0.0


def _site_v(dist, k, pi):
    rep = kcore_site(dist, k, pi, with_profile=False)
    return rep.v_frac


def enumerate_transitions(dist: DegreeDistribution, k: int, max_refine: int = 5):
    """Phase transitions of the k-core size as a function of site retention pi.

    Interior stationary points p~ of phi that satisfy phi(p~) > lam and
    dominate phi on (p~, 1] each give a transition at pi~ = lam/phi(p~):
    first-order at a local maximum, continuous at a stationary inflection.
    A further transition sits at pi~ = 1 when phi(1) = lam with phi rising
    into p = 1, and at pi_c itself when sup phi is finite but approached
    only as p -> 0.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    lam = dist.mean()
    prev_count = None
    stable = 0
    n_uniform = 10**4
    for _ in range(max_refine):
        transitions = _enumerate_on_grid(dist, k, lam, n_uniform)
        count = len(transitions)
        if count == prev_count:
            stable += 1
            if stable >= 2:
                return transitions
        else:
            stable = 0
        prev_count = count
        n_uniform *= 2
    raise UnresolvedTransitionError(
        f"transition count did not stabilize (last count {prev_count})"
    )


def _enumerate_on_grid(dist, k, lam, n_uniform):
    ps = _phi_grid(dist, k, n_uniform=n_uniform)
    vals = _phi_values(dist, k, ps)
    out = []

    # interior local maxima of phi on the grid, refined
    cand = []
    for i in range(1, len(ps) - 1):
        if vals[i] >= vals[i - 1] and vals[i] > vals[i + 1]:
            p_star, v_star = _refine_max(dist, k, ps[i - 1], ps[i + 1])
            cand.append((p_star, v_star, "max"))
    # stationary inflections: phi' touches zero without a sign change
    cand.extend(_stationary_inflections(dist, k, ps, vals))

    for p_star, v_star, kind in cand:
        if not (0.0 < p_star < 1.0):
            continue
        if v_star <= lam + 1e-12:
            continue
        right = vals[ps > p_star + 1e-9]
        if len(right) and right.max() >= v_star - 1e-12:
            continue  # dominated on (p~, 1]
        pi_t = lam / v_star
        if kind == "max":
            delta = min(1e-7, (1.0 - pi_t) / 2) or 1e-9
            jump = _site_v(dist, k, pi_t + delta) - _site_v(dist, k, pi_t - delta)
            out.append(PhaseTransition(pi_t, p_star, "first-order", jump))
        else:
            out.append(PhaseTransition(pi_t, p_star, "continuous", 0.0))

    # boundary transition at pi = 1: phi(1) = lam with phi below lam just inside
    phi1 = phi_func(dist, k, 1.0)
    if abs(phi1 - lam) < 1e-9:
        d1 = (phi1 - phi_func(dist, k, 1.0 - 1e-6)) / 1e-6
        if d1 > 1e-9:
            jump = _site_v(dist, k, 1.0) - _site_v(dist, k, 1.0 - 1e-7)
            out.append(PhaseTransition(1.0, 1.0, "boundary-at-1", jump))

    # sup approached only at p -> 0 (finite, not attained)
    sup, argmax, unbounded = _phi_sup(dist, k)
    if not unbounded and argmax is None and sup > lam + 1e-12:
        attained = max((v for _, v, _ in cand), default=-INF)
        attained = max(attained, phi1)
        if sup > attained + 1e-12:
            out.append(PhaseTransition(lam / sup, 0.0, "threshold-sup-not-attained", 0.0))

    out.sort(key=lambda t: t.pi_tilde)
    return out


def _stationary_inflections(dist, k, ps, vals):
    """Interior points where phi' dips to ~0 without changing sign."""
    d = np.diff(vals) / np.diff(ps)
    out = []
    scale = max(abs(d).max(), 1e-30)
    for i in range(1, len(d) - 1):
        if abs(d[i]) < abs(d[i - 1]) and abs(d[i]) < abs(d[i + 1]):
            if d[i - 1] * d[i + 1] > 0 and abs(d[i]) < 1e-6 * scale:
                p_star = float(ps[i])
                out.append((p_star, phi_func(dist, k, p_star), "inflection"))
    return out


# --- Poisson-mixture helpers (heavy-tailed mixtures with oscillating phi) ---


def stable_f(x: float) -> float:
    """f(x) = (1 - (1+x) e^{-x}) / x = P(Po(x) >= 2)/x, stable near 0."""
    if x < 0:
        raise ValueError("f is defined for x >= 0")
    if x == 0.0:
        return 0.0
    if x >= 0.5:
        return (1.0 - (1.0 + x) * math.exp(-x)) / x
    # alternating series sum_{m>=2} (-1)^m (m-1)/m! x^{m-1}
    terms = []
    term = x / 2.0
    m = 2
    while abs(term) > 1e-20:
        terms.append(term)
        m += 1
        term = (-1.0) ** m * (m - 1) / math.factorial(m) * x ** (m - 1)
        if m > 60:
            break
    return math.fsum(terms)


def poisson_mixture_phi(mixture: PoissonMixture, p: float, k: int = 3) -> float:
    """phi(p) = sum_i q_i lam_i^2 f(lam_i p) for k = 3 mixtures."""
    if k != 3:
        return phi_func(mixture, k, p)
    if p <= 0.0:
        raise ValueError("phi is defined on (0, 1] only")
    terms = [q * l * l * stable_f(l * p) for q, l in zip(mixture.qs, mixture.lams) if q > 0 and l > 0]
    terms.sort(key=abs)
    return math.fsum(terms)


def dyadic_mixture(i_max: int = 40) -> PoissonMixture:
    """Mixture with q_i = 2^{-2i}, lam_i = 2^i for i >= 1, filler mass at 0."""
    lams = [0.0] + [2.0**i for i in range(1, i_max + 1)]
    qs = [0.0] + [4.0 ** (-i) for i in range(1, i_max + 1)]
    qs[0] = 1.0 - sum(qs[1:])
    return PoissonMixture(qs, lams)


def psi(x: float, i_range: int = 64) -> float:
    """psi(x) = sum_{i=-inf}^{inf} f(2^i x), multiplicatively periodic."""
    if x <= 0:
        raise ValueError("psi is defined for x > 0")
    terms = [stable_f(2.0**i * x) for i in range(-i_range, i_range + 1)]
    terms.sort(key=abs)
    return math.fsum(terms)


def psi_fourier(n: int) -> complex:
    """Fourier coefficient of psi on the log scale, closed Gamma form."""
    ln2 = math.log(2.0)
    z = 2j * math.pi * n / ln2
    with mpmath.workdps(30):
        g = mpmath.gamma(1 - z)
        val = g / (ln2 + 2j * math.pi * n)
        return complex(val)


def psi_fourier_quadrature(n: int, n_points: int = 256) -> complex:
    """Same coefficient by trapezoid quadrature of the defining integral.

    psi(2^t) is smooth and 1-periodic in t, so the uniform trapezoid rule
    converges spectrally.
    """
    ts = np.arange(n_points) / n_points
    vals = np.array([psi(2.0**t) for t in ts])
    phases = np.exp(-2j * math.pi * n * ts)
    return complex(np.sum(vals * phases) / n_points)


def psi_oscillation(n_points: int = 512) -> float:
    """max |psi(x) - 1/ln 2| over one multiplicative period."""
    center = 1.0 / math.log(2.0)
    ts = np.linspace(0.0, 1.0, n_points, endpoint=False)
    vals = np.array([psi(2.0**t) for t in ts])
    return float(np.abs(vals - center).max())
