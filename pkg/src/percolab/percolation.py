"""Site and bond percolation on multigraphs, directly and via explosion.

The explosion route replaces each deleted vertex (site) or detached half-edge
(bond) by red degree-1 vertices, builds a fresh configuration model on the
modified degree sequence, and then deletes red-many uniformly chosen degree-1
vertices.  The result has the same law as direct percolation applied to a
configuration model on the original sequence.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import DegreeDistribution, DegreeSequence, as_rng
from .multigraph import Multigraph, configuration_model, induced_subgraph

MODES = ("site", "site-per-degree", "bond", "fixed")


@dataclass
class PercolationSpec:
    """mode: 'site' (uniform pi), 'site-per-degree' (pi indexed by degree),
    'bond' (uniform pi), or 'fixed' (remove exactly m uniform vertices)."""

    mode: str
    pi: float = None
    pis: np.ndarray = None
    m: int = None
    deterministic_first_m: bool = False

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown percolation mode {self.mode!r}")
        if self.mode in ("site", "bond"):
            if self.pi is None or not 0.0 <= self.pi <= 1.0:
                raise ValueError("uniform modes need pi in [0, 1]")
        elif self.mode == "site-per-degree":
            self.pis = np.asarray(self.pis, dtype=float)
            if self.pis.ndim != 1 or (self.pis < 0).any() or (self.pis > 1).any():
                raise ValueError("per-degree retention must be a vector of probabilities")
        else:
            if self.m is None or self.m < 0:
                raise ValueError("fixed mode needs removal count m >= 0")

    def retention_for_degrees(self, degrees: np.ndarray) -> np.ndarray:
        """Per-vertex retention probabilities for the site family."""
        if self.mode == "site":
            return np.full(len(degrees), self.pi)
        if self.mode == "site-per-degree":
            # degrees beyond the table keep the last supplied value
            idx = np.minimum(degrees, len(self.pis) - 1)
            return self.pis[idx]
        raise ValueError(f"no per-vertex retention in mode {self.mode!r}")


def percolate_direct(g: Multigraph, spec: PercolationSpec, rng_seed) -> Multigraph:
    """Delete vertices (site/fixed) or edges (bond) directly."""
    rng = as_rng(rng_seed)
    if spec.mode == "bond":
        keep_e = rng.random(g.m) < spec.pi
        return Multigraph(g.n, g.edges[keep_e], original_ids=g.original_ids)
    if spec.mode == "fixed":
        if spec.m > g.n:
            raise ValueError("cannot remove more vertices than exist")
        keep = np.ones(g.n, dtype=bool)
        if spec.deterministic_first_m:
            keep[: spec.m] = False
        else:
            keep[rng.choice(g.n, size=spec.m, replace=False)] = False
        return induced_subgraph(g, keep)
    retention = spec.retention_for_degrees(g.degrees())
    keep = rng.random(g.n) < retention
    return induced_subgraph(g, keep)


def explode_site(seq: DegreeSequence, spec: PercolationSpec, rng_seed):
    """Explode each vertex i with probability 1 - pi_{d_i} into d_i degree-1 stubs.

    Returns (exploded DegreeSequence, red_count).  Half-edge total is preserved.
    """
    rng = as_rng(rng_seed)
    degrees = seq.degrees
    n = len(degrees)
    if spec.mode == "fixed":
        if spec.m > n:
            raise ValueError("cannot remove more vertices than exist")
        exploded = np.zeros(n, dtype=bool)
        if spec.deterministic_first_m:
            exploded[: spec.m] = True
        else:
            exploded[rng.choice(n, size=spec.m, replace=False)] = True
    else:
        retention = spec.retention_for_degrees(degrees)
        exploded = rng.random(n) >= retention
    red_count = int(degrees[exploded].sum())
    out = np.concatenate([degrees[~exploded], np.ones(red_count, dtype=np.int64)])
    return DegreeSequence(out), red_count


def explode_bond(seq: DegreeSequence, pi: float, rng_seed):
    """Explode each half-edge with probability 1 - sqrt(pi).

    New vertex degrees are Binomial(d_i, sqrt(pi)); each detached half-edge
    becomes a red degree-1 vertex.
    """
    if not 0.0 <= pi <= 1.0:
        raise ValueError("pi must lie in [0, 1]")
    rng = as_rng(rng_seed)
    degrees = seq.degrees
    root = math.sqrt(pi)
    new_degrees = rng.binomial(degrees, root).astype(np.int64)
    red_count = int((degrees - new_degrees).sum())
    out = np.concatenate([new_degrees, np.ones(red_count, dtype=np.int64)])
    return DegreeSequence(out), red_count


def _delete_red(g: Multigraph, red_count: int, rng) -> Multigraph:
    """Delete red_count uniformly chosen degree-1 vertices with their edges.

    Degree-1 vertices are exchangeable in the configuration model, so the
    uniform choice has the same law as deleting the appended red vertices
    themselves; survivors among the appended ones stand in for genuine
    degree-1 vertices.
    """
    deg = g.degrees()
    ones = np.flatnonzero(deg == 1)
    if red_count > len(ones):
        raise RuntimeError("fewer degree-1 vertices than red count; pipeline bug")
    doomed = rng.choice(ones, size=red_count, replace=False) if red_count else ones[:0]
    keep = np.ones(g.n, dtype=bool)
    keep[doomed] = False
    return induced_subgraph(g, keep)


def percolate_via_explosion(seq: DegreeSequence, spec: PercolationSpec, rng_seed) -> Multigraph:
    """Explode, pair uniformly, then delete red degree-1 vertices.

    All surviving appended degree-1 vertices are red by construction, so the
    uniform choice among degree-1 vertices mixes them with genuine degree-1
    vertices of the sequence, exactly as the reduction requires.
    """
    rng = as_rng(rng_seed)
    if spec.mode == "bond":
        exploded, red = explode_bond(seq, spec.pi, rng)
    else:
        exploded, red = explode_site(seq, spec, rng)
    g = configuration_model(exploded, rng)
    return _delete_red(g, red, rng)


@dataclass
class ExplodedProfile:
    """Limiting degree profile of the exploded sequence: zeta = lim n~/n,
    p_tilde[j] up to a cutoff, lam_tilde = lam/zeta, red_fraction = lim n+/n."""

    zeta: float
    p_tilde: np.ndarray
    lam_tilde: float
    red_fraction: float


def predict_exploded_profile(
    dist: DegreeDistribution, spec: PercolationSpec, cutoff: int = None
) -> ExplodedProfile:
    """Limiting exploded profile for site (uniform or per-degree) or bond modes."""
    lam = dist.mean()
    if cutoff is None:
        cutoff = dist.cutoff(1e-13)
    js = np.arange(cutoff + 1)
    pj = dist.pmf_array(cutoff)
    if spec.mode in ("site", "site-per-degree"):
        pis = spec.retention_for_degrees(js)
        red = float(np.dot(js * (1.0 - pis), pj))
        zeta = float(np.dot(pis + js * (1.0 - pis), pj))
        pt = pis * pj / zeta
        pt[1] += red / zeta
    elif spec.mode == "bond":
        root = math.sqrt(spec.pi)
        red = (1.0 - root) * lam
        zeta = 1.0 + red
        thinned = dist.thin(root)
        pt = thinned.pmf_array(cutoff) / zeta
        pt[1] += red / zeta
    else:
        raise ValueError("profile prediction applies to site and bond modes only")
    return ExplodedProfile(zeta, pt, lam / zeta, red)
