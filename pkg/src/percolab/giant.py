"""Giant-component asymptotics under site and bond percolation.

Solves the extinction fixed point of the local branching approximation and
evaluates the limiting vertex/edge fractions of the largest component.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .distributions import INF, DegreeDistribution

XI_TOL = 1e-13


@dataclass
class GiantReport:
    xi: float
    rho: float
    v_frac: float
    e_frac: float
    supercritical: bool
    pi_c: float
    never_supercritical: bool = False
    degenerate_p0_p2: bool = False


def _is_degenerate_p0_p2(dist: DegreeDistribution) -> bool:
    # continuity at pi = 1 can fail only when all mass sits on degrees 0 and 2
    return abs(dist.pmf(0) + dist.pmf(2) - 1.0) < 1e-12 and dist.pmf(2) > 0


def _upper_bracket(f, positive: bool):
    """Largest 1 - 2^-t where f has the sign it carries just left of 1.

    Evaluating the fixed-point functions at 1 - 1e-13 drowns in rounding (the
    signal is proportional to 1 - x), so the bracket endpoint backs away from
    1 until the sign is clear.  None means the root is indistinguishable
    from 1 at double precision.
    """
    for t in range(1, 34):
        b = 1.0 - 2.0**-t
        v = f(b)
        if (v > 0) if positive else (v < 0):
            return b
    return None


def giant_threshold(dist: DegreeDistribution) -> float:
    """E D / E D(D-1); 0 when the second factorial moment diverges."""
    m2 = dist.factorial_moment(2)
    if m2 == INF:
        return 0.0
    if m2 == 0.0:
        return INF
    return dist.mean() / m2


def solve_xi_base(dist: DegreeDistribution) -> float:
    """Smallest root in (0, 1] of g_D'(xi) = lam * xi; 1 when E D(D-2) <= 0."""
    lam = dist.mean()
    m2 = dist.factorial_moment(2)
    if m2 != INF and m2 - lam <= 0:
        return 1.0

    def f(x):
        return dist.pgf(x, 1) - lam * x

    # f(0) = p_1 >= 0 and f(1 - eps) < 0 in the supercritical regime
    if f(0.0) <= 0.0:
        return 0.0
    return float(optimize.brentq(f, 0.0, 1.0 - 1e-12, xtol=XI_TOL))


def _report_from_base(dist: DegreeDistribution) -> GiantReport:
    xi = solve_xi_base(dist)
    lam = dist.mean()
    rho = 1.0 - xi
    v = 1.0 - dist.pgf(xi) if xi < 1.0 else 0.0
    e = lam * rho - lam * rho**2 / 2.0 if xi < 1.0 else 0.0
    pic = giant_threshold(dist)
    return GiantReport(
        xi, rho, v, e, xi < 1.0, pic,
        never_supercritical=pic >= 1.0,
        degenerate_p0_p2=_is_degenerate_p0_p2(dist),
    )


def _giant_site_uniform(dist: DegreeDistribution, pi: float) -> GiantReport:
    """Uniform site retention, evaluated through the PGF (heavy tails welcome)."""
    lam = dist.mean()
    pic = giant_threshold(dist)
    degenerate = _is_degenerate_p0_p2(dist)
    if pi == 1.0:
        return _report_from_base(dist)
    if pi <= pic:
        return GiantReport(1.0, 0.0, 0.0, 0.0, False, pic,
                           never_supercritical=pic >= 1.0, degenerate_p0_p2=degenerate)

    # sum_j j pi p_j (1 - xi^{j-1}) = lam (1 - xi), i.e.
    # pi (lam - g'(xi)) = lam (1 - xi)
    def F(xi):
        return pi * (lam - dist.pgf(xi, 1)) - lam * (1.0 - xi)

    b = _upper_bracket(F, positive=True)
    if b is None:
        return GiantReport(1.0, 0.0, 0.0, 0.0, False, pic,
                           never_supercritical=pic >= 1.0, degenerate_p0_p2=degenerate)
    if F(0.0) >= 0.0:
        xi = 0.0
    else:
        xi = float(optimize.brentq(F, 0.0, b, xtol=XI_TOL))
    rho = 1.0 - xi
    v = pi * (1.0 - dist.pgf(xi))
    e = rho * pi * lam - rho**2 * lam / 2.0
    return GiantReport(xi, rho, v, e, True, pic,
                       never_supercritical=pic >= 1.0, degenerate_p0_p2=degenerate)


def giant_site(dist: DegreeDistribution, pis) -> GiantReport:
    """Site percolation with per-degree retention vector pis (pis[j] for degree j,
    degrees beyond the table keep the last value).  A scalar means uniform pi."""
    if np.isscalar(pis):
        return _giant_site_uniform(dist, float(pis))
    lam = dist.mean()
    pic = giant_threshold(dist)
    degenerate = _is_degenerate_p0_p2(dist)
    cutoff = dist.cutoff(1e-14)
    js = np.arange(cutoff + 1)
    pj = dist.pmf_array(cutoff)
    piv = np.asarray(pis, dtype=float)
    piv = piv[np.minimum(js, len(piv) - 1)]
    if (piv == 1.0).all():
        return _report_from_base(dist)

    # supercritical iff sum j(j-1) pi_j p_j > lam
    crit = float(np.dot(js * (js - 1) * piv, pj))
    if crit <= lam:
        return GiantReport(1.0, 0.0, 0.0, 0.0, False, pic,
                           never_supercritical=pic >= 1.0, degenerate_p0_p2=degenerate)

    jpp = js * piv * pj
    jm1 = np.maximum(js - 1, 0)

    # sum_j j pi_j p_j (1 - xi^{j-1}) = lam (1 - xi); jpp[0] = 0 so the j=0
    # exponent clamp is harmless
    def G(xi):
        return float(np.dot(jpp, 1.0 - xi**jm1)) - lam * (1.0 - xi)

    b = _upper_bracket(G, positive=True)
    if b is None:
        return GiantReport(1.0, 0.0, 0.0, 0.0, False, pic,
                           never_supercritical=pic >= 1.0, degenerate_p0_p2=degenerate)
    if G(0.0) >= 0.0:
        xi = 0.0
    else:
        xi = float(optimize.brentq(G, 0.0, b, xtol=XI_TOL))
    v = float(np.dot(piv * pj, 1.0 - xi**js))
    rho = 1.0 - xi
    e = rho * float(np.dot(js * piv, pj)) - rho**2 * lam / 2.0
    return GiantReport(xi, rho, v, e, True, pic,
                       never_supercritical=pic >= 1.0, degenerate_p0_p2=degenerate)


def giant_bond(dist: DegreeDistribution, pi: float) -> GiantReport:
    """Bond percolation with uniform edge retention pi."""
    if not 0.0 <= pi <= 1.0:
        raise ValueError("pi must lie in [0, 1]")
    lam = dist.mean()
    pic = giant_threshold(dist)
    degenerate = _is_degenerate_p0_p2(dist)
    if pi == 1.0:
        return _report_from_base(dist)
    if pi == 0.0:
        return GiantReport(1.0, 0.0, 0.0, 0.0, False, pic,
                           never_supercritical=pic >= 1.0, degenerate_p0_p2=degenerate)
    root = math.sqrt(pi)
    if pi <= pic:
        return GiantReport(1.0, 0.0, 0.0, 0.0, False, pic,
                           never_supercritical=pic >= 1.0, degenerate_p0_p2=degenerate)

    def B(xi):
        return root * dist.pgf(1.0 - root + root * xi, 1) + (1.0 - root) * lam - lam * xi

    b = _upper_bracket(B, positive=False)
    if b is None:
        return GiantReport(1.0, 0.0, 0.0, 0.0, False, pic,
                           never_supercritical=pic >= 1.0, degenerate_p0_p2=degenerate)
    xi = float(optimize.brentq(B, 0.0, b, xtol=XI_TOL))
    rho = 1.0 - xi
    v = 1.0 - dist.pgf(1.0 - root + root * xi)
    e = root * rho * lam - lam * rho**2 / 2.0
    return GiantReport(xi, rho, v, e, True, pic,
                       never_supercritical=pic >= 1.0, degenerate_p0_p2=degenerate)


class UnsupportedRegimeError(ValueError):
    """Neither the finite-third-moment nor the power-law expansion applies."""


def critical_expansion(dist: DegreeDistribution, eps: float) -> dict:
    """Solver value rho_v(pi_c + eps) and its first-order prediction.

    Finite third moment: rho_v ~ [2 E D(D-1) / (pi_c E D(D-1)(D-2))] eps.
    Power law p_k = c k^{-gamma}, 3 < gamma < 4:
    rho_v ~ [E D(D-1) / (c pi_c Gamma(2-gamma))]^{1/(gamma-3)} eps^{1/(gamma-3)}.
    """
    if not 0.0 < eps <= 0.01:
        raise ValueError("eps must lie in (0, 0.01]")
    lam = dist.mean()
    m2 = dist.factorial_moment(2)
    if m2 == INF or m2 - lam <= 0:
        raise UnsupportedRegimeError("need 0 < E D(D-2) < infinity for a positive threshold")
    pic = lam / m2
    rho = giant_site(dist, pic + eps).rho
    m3 = dist.factorial_moment(3)
    if m3 != INF:
        predicted = 2.0 * m2 / (pic * m3) * eps
        branch = "finite-third-moment"
    else:
        gamma = getattr(dist, "gamma", None)
        c = getattr(dist, "c", None)
        if gamma is None or not 3.0 < gamma < 4.0:
            raise UnsupportedRegimeError(
                "divergent third moment outside the covered power-law range"
            )
        expo = 1.0 / (gamma - 3.0)
        predicted = (m2 / (c * pic * math.gamma(2.0 - gamma))) ** expo * eps**expo
        branch = "power-law"
    return {"rho_v": rho, "predicted_rho_v": predicted, "branch": branch, "pi_c": pic}
