import math

import numpy as np
import pytest

from percolab.branching import (
    BranchingModel,
    BudgetError,
    SlowConvergenceError,
    mc_tree_containment,
    pmax_iterates,
    pmax_recursion,
    survival_probability,
)
from percolab.distributions import (
    PoissonDistribution,
    TableDistribution,
    point_mass,
    two_point,
)
from percolab.kcore import h1_func, kcore_site

TEST_DISTS = [
    point_mass(3),
    two_point(1, 3, 0.5),
    PoissonDistribution(2.0),
    PoissonDistribution(10.0),
    TableDistribution({0: 0.1, 1: 0.2, 2: 0.2, 4: 0.5}),
]


class TestIterates:
    def test_two_point_map(self):
        # degrees {1,3} half-half, k = 2: q -> 3/4 - (3/4)(1-q)^2, limit 2/3
        qs = pmax_iterates(two_point(1, 3, 0.5), 2, 8)
        assert qs[0] == 1.0
        assert qs[1] == pytest.approx(0.75, abs=1e-12)
        assert qs[2] == pytest.approx(0.703125, abs=1e-12)
        for a, b in zip(qs, qs[1:]):
            assert b == pytest.approx(0.75 - 0.75 * (1 - a) ** 2, abs=1e-12)

    def test_nonincreasing(self):
        for d in TEST_DISTS:
            qs = pmax_iterates(d, 3, 30)
            assert all(b <= a + 1e-15 for a, b in zip(qs, qs[1:]))

    def test_point_mass_three_stays_at_one(self):
        qs = pmax_iterates(point_mass(3), 3, 10)
        assert all(q == pytest.approx(1.0, abs=1e-12) for q in qs)


class TestRecursionLimit:
    def test_two_point_limit(self):
        assert pmax_recursion(two_point(1, 3, 0.5), 2) == pytest.approx(
            2 / 3, abs=1e-10
        )
        assert pmax_recursion(two_point(1, 3, 0.5), 3) == pytest.approx(
            0.0, abs=1e-10
        )

    def test_degenerate_cases(self):
        assert pmax_recursion((point_mass(1)), 2) == pytest.approx(
            0.0, abs=1e-10
        )
        assert pmax_recursion((point_mass(3)), 3) == pytest.approx(
            1.0, abs=1e-12
        )

    def test_matches_kcore_pmax(self):
        for d in TEST_DISTS:
            for k in (2, 3):
                rep = kcore_site(d, k, 1.0, with_profile=False)
                limit = pmax_recursion((d), k)
                target = 0.0 if rep.empty else rep.p_max
                assert limit == pytest.approx(target, abs=1e-9)


class TestSurvival:
    def test_poisson_two(self):
        # 1 - xi with xi = exp(2 (xi - 1))
        xi = 0.5
        for _ in range(300):
            xi = math.exp(2 * (xi - 1))
        assert survival_probability(PoissonDistribution(2.0)) == pytest.approx(
            1 - xi, abs=1e-9
        )

    def test_subcritical_zero(self):
        assert survival_probability(point_mass(2)) == 0.0
        assert survival_probability(point_mass(1)) == 0.0


class TestMonteCarlo:
    def test_matches_iterates_two_point(self):
        d = two_point(1, 3, 0.5)
        depth = 6
        qs = pmax_iterates(d, 2, depth)
        out = mc_tree_containment(BranchingModel(d), 2, depth, 40000, 5)
        assert abs(out["estimate"] - qs[depth]) < 3 * out["stderr"]

    def test_matches_iterates_poisson(self):
        d = PoissonDistribution(10.0)
        depth = 8
        qs = pmax_iterates(d, 3, depth)
        out = mc_tree_containment(BranchingModel(d), 3, depth, 20000, 7)
        assert abs(out["estimate"] - qs[depth]) < 3 * out["stderr"]

    def test_root_modified_tracks_h1(self):
        d = PoissonDistribution(10.0)
        rep = kcore_site(d, 3, 1.0, with_profile=False)
        target = h1_func(d, 3, rep.p_max)
        out = mc_tree_containment(BranchingModel(d), 3, 8, 20000, 9, root_modified=True)
        assert abs(out["estimate"] - target) < max(3 * out["stderr"], 0.01)

    def test_budget_error(self):
        model = BranchingModel(PoissonDistribution(10.0))
        with pytest.raises(BudgetError):
            mc_tree_containment(model, 3, 20, 10**4, 0)

    def test_reproducible(self):
        model = BranchingModel(two_point(1, 3, 0.5))
        a = mc_tree_containment(model, 3, 5, 5000, 11)
        b = mc_tree_containment(model, 3, 5, 5000, 11)
        assert a["estimate"] == b["estimate"]
