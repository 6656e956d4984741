"""Bootstrap percolation on random regular multigraphs.

Vertices start infected independently with probability q (or as a given set);
an uninfected vertex with at least ell infected neighbors becomes infected,
repeatedly, until nothing changes.  The final uninfected set equals the
(d+1-ell)-core of the subgraph induced on the initially uninfected vertices.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .distributions import DegreeSequence, as_rng, point_mass
from .kcore import kcore_threshold
from .multigraph import Multigraph, induced_subgraph, k_core


class RegularityError(ValueError):
    """Graph is not d-regular as required."""


@dataclass
class BootstrapSpec:
    d: int
    ell: int
    q: float = None
    m: int = None  # deterministic-count mode: infect the first m vertices

    def __post_init__(self):
        if self.d < 2:
            raise ValueError("need degree d >= 2")
        if not 1 <= self.ell <= self.d - 1:
            raise ValueError("need 1 <= ell <= d-1")
        if (self.q is None) == (self.m is None):
            raise ValueError("exactly one of q and m must be given")
        if self.q is not None and not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")

    @property
    def k(self) -> int:
        return self.d + 1 - self.ell


@dataclass
class BootstrapReport:
    final_infected_count: int = None
    fully_infected: bool = None
    predicted_frac: float = None
    q_c: float = None
    p_max: float = None
    near_threshold: bool = False


def _check_regular(g: Multigraph, d: int):
    deg = g.degrees()
    if g.n and not (deg == d).all():
        raise RegularityError("graph is not d-regular")


def initial_infected(g: Multigraph, spec: BootstrapSpec, rng_seed) -> np.ndarray:
    if spec.m is not None:
        if spec.m > g.n:
            raise ValueError("cannot infect more vertices than exist")
        mask = np.zeros(g.n, dtype=bool)
        mask[: spec.m] = True
        return mask
    rng = as_rng(rng_seed)
    return rng.random(g.n) < spec.q


def spread(g: Multigraph, infected: np.ndarray, ell: int) -> np.ndarray:
    """Run infection to its fixed point.  Loops never infect their own vertex;
    parallel edges count with multiplicity."""
    infected = infected.copy()
    counts = np.zeros(g.n, dtype=np.int64)
    # adjacency as flat neighbor lists, loops dropped
    e = g.edges
    nonloop = e[:, 0] != e[:, 1]
    u, v = e[nonloop, 0], e[nonloop, 1]
    order = np.argsort(np.concatenate([u, v]), kind="stable")
    heads = np.concatenate([u, v])[order]
    tails = np.concatenate([v, u])[order]
    starts = np.searchsorted(heads, np.arange(g.n + 1))

    queue = deque(np.flatnonzero(infected))
    while queue:
        w = queue.popleft()
        for x in tails[starts[w]: starts[w + 1]]:
            if infected[x]:
                continue
            counts[x] += 1
            if counts[x] >= ell:
                infected[x] = True
                queue.append(x)
    return infected


def run_bootstrap(g: Multigraph, spec: BootstrapSpec, rng_seed) -> BootstrapReport:
    _check_regular(g, spec.d)
    init = initial_infected(g, spec, rng_seed)
    final = spread(g, init, spec.ell)
    count = int(final.sum())
    return BootstrapReport(final_infected_count=count, fully_infected=count == g.n)


def core_correspondence_check(g: Multigraph, spec: BootstrapSpec, rng_seed) -> bool:
    """V minus the final infected set must equal the (d+1-ell)-core of the
    subgraph induced on the initially uninfected vertices."""
    _check_regular(g, spec.d)
    init = initial_infected(g, spec, rng_seed)
    final = spread(g, init, spec.ell)
    uninfected = set(np.flatnonzero(~final).tolist())
    sub = induced_subgraph(g, ~init)
    if spec.k >= 2:
        core = k_core(sub, spec.k)
        core_ids = set(core.original_ids.tolist())
    else:
        core_ids = set(sub.original_ids.tolist())
    return uninfected == core_ids


def bootstrap_qc(d: int, ell: int) -> float:
    """q_c = 1 - inf_{0<p<=1} p / P(Bi(d-1, 1-p) <= ell-1).

    The infimum is the site k-core threshold of the degree-d point mass with
    k = d+1-ell, so that machinery is reused directly.
    """
    spec = BootstrapSpec(d, ell, q=0.0)
    return 1.0 - kcore_threshold(point_mass(d), spec.k)


def bootstrap_predict(d: int, ell: int, q: float) -> BootstrapReport:
    """Limiting infected fraction via Theorem-style analytics."""
    spec = BootstrapSpec(d, ell, q=q)
    qc = bootstrap_qc(d, ell)
    report = BootstrapReport(q_c=qc)
    if abs(q - qc) < 1e-9:
        report.near_threshold = True
        return report
    if q > qc:
        report.predicted_frac = 1.0
        report.fully_infected = spec.ell <= spec.d - 2
        return report
    # below threshold: largest p <= 1 with P(Bi(d-1, 1-p) <= ell-1)/p = 1/(1-q)
    target = 1.0 / (1.0 - q)

    def ratio(p):
        return stats.binom.cdf(ell - 1, d - 1, 1.0 - p) / p

    p_max = _largest_ratio_root(ratio, target)
    report.p_max = p_max
    report.predicted_frac = 1.0 - (1.0 - q) * float(
        stats.binom.cdf(ell - 1, d, 1.0 - p_max)
    )
    return report


def _largest_ratio_root(ratio, target, grid_size=20000):
    from scipy import optimize

    ps = np.linspace(1e-9, 1.0, grid_size)
    vals = ratio(ps) - target
    if abs(vals[-1]) < 1e-13:
        return 1.0
    for i in range(len(ps) - 1, 0, -1):
        if vals[i] * vals[i - 1] <= 0.0:
            return float(optimize.brentq(lambda p: ratio(p) - target, ps[i - 1], ps[i], xtol=1e-14))
    raise RuntimeError("no root of the threshold equation found below p = 1")


def regular_sequence(d: int, n: int) -> DegreeSequence:
    if (d * n) % 2 != 0:
        raise ValueError("d * n must be even")
    return DegreeSequence(np.full(n, d, dtype=np.int64))
