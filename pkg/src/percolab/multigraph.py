"""Half-edge multigraphs: configuration model, components, k-core peeling.

Edges are stored as pairs of vertex ids; loops (u == u) and parallel edges are
allowed, and a loop contributes 2 to the degree of its endpoint.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .distributions import DegreeSequence, as_rng


class ParityError(ValueError):
    """Degree sum is odd, so no half-edge pairing exists."""


@dataclass
class Multigraph:
    """Multigraph given by vertex count and an (m, 2) edge array."""

    n: int
    edges: np.ndarray
    original_ids: np.ndarray = None

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if self.n < 0:
            raise ValueError("negative vertex count")
        if self.edges.size and (
            (self.edges < 0).any() or (self.edges >= self.n).any()
        ):
            raise ValueError("edge endpoint outside vertex range")
        if self.original_ids is None:
            self.original_ids = np.arange(self.n, dtype=np.int64)
        else:
            self.original_ids = np.asarray(self.original_ids, dtype=np.int64)

    @property
    def m(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        """Vertex degrees; each loop adds 2 to its endpoint."""
        return np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)

    def to_edge_list(self, path):
        with open(path, "w") as fh:
            for u, v in self.edges:
                fh.write(f"{u} {v}\n")


@dataclass
class ComponentReport:
    sizes: np.ndarray
    edge_counts: np.ndarray
    largest_profile: np.ndarray  # v_j(C1), j = 0..max degree in C1
    labels: np.ndarray = field(repr=False, default=None)

    @property
    def n_components(self) -> int:
        return len(self.sizes)


def configuration_model(seq: DegreeSequence, rng_seed) -> Multigraph:
    """Uniform half-edge pairing: shuffle all half-edges, pair consecutively."""
    degrees = seq.degrees
    total = int(degrees.sum())
    if total % 2 != 0:
        raise ParityError("degree sum must be even")
    rng = as_rng(rng_seed)
    owners = np.repeat(np.arange(len(degrees), dtype=np.int64), degrees)
    perm = rng.permutation(total)
    stubs = owners[perm]
    edges = stubs.reshape(-1, 2)
    return Multigraph(len(degrees), edges)


def is_simple(g: Multigraph) -> bool:
    if g.m == 0:
        return True
    if (g.edges[:, 0] == g.edges[:, 1]).any():
        return False
    canon = np.sort(g.edges, axis=1)
    uniq = np.unique(canon, axis=0)
    return len(uniq) == len(canon)


def configuration_model_simple(seq: DegreeSequence, rng_seed, max_attempts=10**4):
    """Rejection-sample the configuration model until the result is simple."""
    rng = as_rng(rng_seed)
    d2 = float((seq.degrees.astype(float) ** 2).sum())
    d1 = float(seq.degrees.sum())
    for _ in range(max_attempts):
        g = configuration_model(seq, rng)
        if is_simple(g):
            return g
    raise RuntimeError(
        f"no simple realization in {max_attempts} attempts "
        f"(sum d^2 / sum d = {d2 / max(d1, 1):.2f}; success odds vanish when this is large)"
    )


def _adjacency(g: Multigraph) -> sparse.coo_matrix:
    if g.m == 0:
        return sparse.coo_matrix((g.n, g.n))
    u, v = g.edges[:, 0], g.edges[:, 1]
    data = np.ones(2 * g.m)
    return sparse.coo_matrix(
        (data, (np.concatenate([u, v]), np.concatenate([v, u]))), shape=(g.n, g.n)
    )


def components(g: Multigraph) -> ComponentReport:
    """Connected components, sizes descending, ties by smallest vertex index."""
    if g.n == 0:
        return ComponentReport(
            np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        )
    ncomp, labels = csgraph.connected_components(_adjacency(g), directed=False)
    sizes = np.bincount(labels, minlength=ncomp)
    edge_counts = np.zeros(ncomp, dtype=np.int64)
    if g.m:
        edge_counts = np.bincount(labels[g.edges[:, 0]], minlength=ncomp)
    # order by size descending, then by first vertex index of the component
    first_idx = np.full(ncomp, g.n, dtype=np.int64)
    np.minimum.at(first_idx, labels, np.arange(g.n))
    order = np.lexsort((first_idx, -sizes))
    sizes = sizes[order]
    edge_counts = edge_counts[order]
    top = order[0]
    deg = g.degrees()
    in_top = labels == top
    profile = np.bincount(deg[in_top]) if in_top.any() else np.zeros(1, dtype=np.int64)
    return ComponentReport(sizes.astype(np.int64), edge_counts, profile.astype(np.int64), labels)


def k_core(g: Multigraph, k: int) -> Multigraph:
    """Largest induced subgraph with minimum degree k, by exhaustive peeling.

    Round-based: repeatedly drop all vertices whose current degree is below k.
    The result is independent of removal order.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    alive_v = np.ones(g.n, dtype=bool)
    alive_e = np.ones(g.m, dtype=bool)
    while True:
        deg = np.bincount(g.edges[alive_e].ravel(), minlength=g.n)
        bad = alive_v & (deg < k)
        if not bad.any():
            break
        alive_v &= ~bad
        if alive_e.any():
            e = g.edges
            alive_e &= alive_v[e[:, 0]] & alive_v[e[:, 1]]
    keep = np.flatnonzero(alive_v)
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    new_edges = remap[g.edges[alive_e]] if alive_e.any() else np.zeros((0, 2), dtype=np.int64)
    return Multigraph(len(keep), new_edges, original_ids=g.original_ids[keep])


def k_core_sequential(g: Multigraph, k: int, rng_seed=0) -> Multigraph:
    """Reference peeler removing one random low-degree vertex at a time.

    Slow; kept as an order-independence check against k_core.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    rng = as_rng(rng_seed)
    alive_v = np.ones(g.n, dtype=bool)
    alive_e = np.ones(g.m, dtype=bool)
    while True:
        deg = np.bincount(g.edges[alive_e].ravel(), minlength=g.n)
        bad = np.flatnonzero(alive_v & (deg < k))
        if len(bad) == 0:
            break
        v = bad[rng.integers(len(bad))]
        alive_v[v] = False
        alive_e &= (g.edges[:, 0] != v) & (g.edges[:, 1] != v)
    keep = np.flatnonzero(alive_v)
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    new_edges = remap[g.edges[alive_e]] if alive_e.any() else np.zeros((0, 2), dtype=np.int64)
    return Multigraph(len(keep), new_edges, original_ids=g.original_ids[keep])


def graph_stats(g: Multigraph) -> dict:
    """v, e, and the degree profile v_j (count of vertices of degree j)."""
    deg = g.degrees()
    profile = np.bincount(deg) if g.n else np.zeros(0, dtype=np.int64)
    return {"v": g.n, "e": g.m, "v_j": profile.astype(np.int64)}


def induced_subgraph(g: Multigraph, keep_mask: np.ndarray) -> Multigraph:
    """Induced subgraph on the vertices where keep_mask is true."""
    keep_mask = np.asarray(keep_mask, dtype=bool)
    keep = np.flatnonzero(keep_mask)
    remap = np.full(g.n, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    if g.m:
        ok = keep_mask[g.edges[:, 0]] & keep_mask[g.edges[:, 1]]
        new_edges = remap[g.edges[ok]]
    else:
        new_edges = np.zeros((0, 2), dtype=np.int64)
    return Multigraph(len(keep), new_edges, original_ids=g.original_ids[keep])
