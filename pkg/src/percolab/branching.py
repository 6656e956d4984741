"""Galton-Watson machinery: offspring laws, the p_max recursion, survival,
and Monte Carlo estimation of k-ary tree containment.

The tree X has root offspring D and later offspring D-hat (size-biased shift
of D).  q_n = P(X-hat contains a (k-1)-ary tree of depth n at the root-changed
process) obeys q_{n+1} = h(q_n)/(lam q_n) with q_0 = 1, decreasing to p_max.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import DegreeDistribution, as_rng
from .kcore import h_func
from .giant import solve_xi_base


class SlowConvergenceError(RuntimeError):
    def __init__(self, last):
        super().__init__(f"recursion did not converge; last iterate {last}")
        self.last = last


class BudgetError(RuntimeError):
    """Expected tree size exceeds the node budget."""


@dataclass
class BranchingModel:
    root_law: DegreeDistribution

    @property
    def offspring_law(self) -> DegreeDistribution:
        return self.root_law.size_biased_shift()


def pmax_iterates(dist: DegreeDistribution, k: int, n_steps: int) -> list:
    """q_0 = 1 and the first n_steps iterates of q -> h(q)/(lam q)."""
    lam = dist.mean()
    qs = [1.0]
    for _ in range(n_steps):
        q = qs[-1]
        if q <= 0.0:
            qs.append(0.0)
            continue
        nxt = h_func(dist, k, q) / (lam * q)
        if nxt > q + 1e-12:
            raise RuntimeError("recursion iterates must be nonincreasing")
        qs.append(min(nxt, q))
    return qs


def pmax_recursion(dist: DegreeDistribution, k: int, tol: float = 1e-12) -> float:
    """Iterate q_{n+1} = h(q_n)/(lam q_n) from q_0 = 1 until |delta| < tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    lam = dist.mean()
    q = 1.0
    for _ in range(10**6):
        if q <= 0.0:
            return 0.0
        nxt = h_func(dist, k, q) / (lam * q)
        nxt = min(nxt, q)  # guard against rounding-level upticks
        if q - nxt < tol:
            return nxt
        q = nxt
    raise SlowConvergenceError(q)


def survival_probability(dist: DegreeDistribution) -> float:
    """Survival probability of the offspring-law process, 1 - xi."""
    return 1.0 - solve_xi_base(dist)


def mc_tree_containment(
    model: BranchingModel,
    k: int,
    depth: int,
    reps: int,
    rng_seed,
    budget: int = 10**7,
    root_modified: bool = False,
) -> dict:
    """Monte Carlo estimate of the depth-limited k-ary containment probability.

    With root_modified=False the root offspring law is D-hat too, matching the
    recursion iterates q_depth; with root_modified=True the root draws from D
    and needs k good children, estimating the h1 limit instead.
    """
    if depth < 1 or reps < 1:
        raise ValueError("need depth >= 1 and reps >= 1")
    expected = float(reps) * float(k - 1) ** depth
    if expected > budget:
        raise BudgetError(
            f"about {expected:.2e} nodes needed for depth {depth} x {reps} reps, "
            f"budget {budget:.0e}"
        )
    rng = as_rng(rng_seed)
    offspring = model.offspring_law
    root_law = model.root_law if root_modified else offspring

    # draw samples in blocks to amortize sampler setup
    pool = {"off": [], "root": []}

    def draw(which, law):
        buf = pool[which]
        if not buf:
            buf.extend(law.sample(8192, rng).tolist())
        return buf.pop()

    def off_sampler():
        return draw("off", offspring)

    hits = 0
    for _ in range(reps):
        n_root = draw("root", root_law)
        if root_modified:
            ok = _contained_from_root(off_sampler, n_root, k, depth, budget)
        else:
            # the recursion tracks a single lineage node with offspring D-hat
            # that must be good at the requested depth
            ok = _node_good_entry(off_sampler, n_root, k, depth, budget)
        hits += ok
    est = hits / reps
    stderr = float(np.sqrt(max(est * (1.0 - est), 1.0 / reps) / reps))
    return {"estimate": est, "stderr": stderr, "reps": reps, "depth": depth}


def _node_good_entry(off_sampler, n_children, k, depth, budget):
    """Good-at-depth check for a node whose children count is already drawn."""
    used = [n_children]

    def good(depth_left):
        if depth_left == 0:
            return True
        kids = off_sampler()
        used[0] += kids
        if used[0] > budget:
            raise BudgetError("node budget exhausted during replicate")
        hit = 0
        for _ in range(kids):
            if good(depth_left - 1):
                hit += 1
                if hit >= k - 1:
                    return True
        return False

    # the node itself is good at `depth` when >= k-1 children are good at depth-1
    hit = 0
    for _ in range(n_children):
        if good(depth - 1):
            hit += 1
            if hit >= k - 1:
                return True
    return False


def _contained_from_root(off_sampler, n_children, k, depth, budget):
    """Root-modified event: root needs k good-at-(depth-1) children."""
    used = [n_children]

    def good(depth_left):
        if depth_left == 0:
            return True
        kids = off_sampler()
        used[0] += kids
        if used[0] > budget:
            raise BudgetError("node budget exhausted during replicate")
        hit = 0
        for _ in range(kids):
            if good(depth_left - 1):
                hit += 1
                if hit >= k - 1:
                    return True
        return False

    hit = 0
    for _ in range(n_children):
        if good(depth - 1):
            hit += 1
            if hit >= k:
                return True
    return False
