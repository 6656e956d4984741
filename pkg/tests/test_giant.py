import math

import numpy as np
import pytest

from percolab.distributions import (
    INF,
    PoissonDistribution,
    PowerLawDistribution,
    TableDistribution,
    point_mass,
    two_point,
)
from percolab.giant import (
    UnsupportedRegimeError,
    critical_expansion,
    giant_bond,
    giant_site,
    giant_threshold,
    solve_xi_base,
)
from percolab.branching import survival_probability

TEST_DISTS = [
    point_mass(3),
    two_point(1, 3, 0.5),
    PoissonDistribution(2.0),
    PoissonDistribution(5.0),
    TableDistribution({0: 0.1, 1: 0.2, 2: 0.2, 4: 0.5}),
]


class TestXiBase:
    def test_two_point_quadratic(self):
        # root of 3 xi^2 - 4 xi + 1
        assert solve_xi_base(two_point(1, 3, 0.5)) == pytest.approx(1 / 3, abs=1e-11)

    def test_subcritical_convention(self):
        assert solve_xi_base(point_mass(1)) == 1.0
        assert solve_xi_base(point_mass(2)) == 1.0  # E D(D-2) = 0

    def test_poisson_fixed_point(self):
        # xi = exp(2 (xi - 1)), solved independently by fixed-point iteration
        xi = 0.5
        for _ in range(200):
            xi = math.exp(2 * (xi - 1))
        assert solve_xi_base(PoissonDistribution(2.0)) == pytest.approx(xi, abs=1e-9)

    def test_residuals(self):
        for d in TEST_DISTS:
            xi = solve_xi_base(d)
            if xi < 1.0:
                assert abs(d.pgf(xi, 1) - d.mean() * xi) < 1e-10


class TestThreshold:
    def test_values(self):
        assert giant_threshold(point_mass(3)) == pytest.approx(0.5, abs=1e-14)
        assert giant_threshold(PoissonDistribution(4.0)) == pytest.approx(0.25, abs=1e-14)
        assert giant_threshold(PowerLawDistribution(2.5, 1)) == 0.0

    def test_never_supercritical_flagged(self):
        rep = giant_site(point_mass(1), 0.9)
        assert rep.never_supercritical
        assert rep.pi_c >= 1.0


class TestGiantSite:
    def test_point_mass_closed_form(self):
        rep = giant_site(point_mass(3), 0.6)
        assert rep.xi == pytest.approx(2 / 3, abs=1e-10)
        assert rep.v_frac == pytest.approx(19 / 45, abs=1e-10)
        assert rep.e_frac == pytest.approx(0.6 * 3 * (1 / 3) - 3 * (1 / 9) / 2, abs=1e-10)

    def test_subcritical_zero(self):
        for d in TEST_DISTS:
            pic = giant_threshold(d)
            if 0 < pic < 1:
                rep = giant_site(d, pic * 0.9)
                assert rep.v_frac == 0.0 and rep.e_frac == 0.0 and not rep.supercritical

    def test_full_retention_matches_base(self):
        d = two_point(1, 3, 0.5)
        rep = giant_site(d, [1.0])
        assert rep.xi == pytest.approx(1 / 3, abs=1e-10)
        assert rep.v_frac == pytest.approx(22 / 27, abs=1e-10)

    def test_per_degree_matches_uniform(self):
        d = TableDistribution({0: 0.1, 1: 0.2, 2: 0.2, 4: 0.5})
        uni = giant_site(d, 0.7)
        per = giant_site(d, [0.7, 0.7, 0.7, 0.7, 0.7])
        assert per.xi == pytest.approx(uni.xi, abs=1e-10)
        assert per.v_frac == pytest.approx(uni.v_frac, abs=1e-10)
        assert per.e_frac == pytest.approx(uni.e_frac, abs=1e-10)

    def test_degenerate_family_flag(self):
        d = TableDistribution({0: 0.3, 2: 0.7})
        assert giant_site(d, 0.9).degenerate_p0_p2


class TestGiantBond:
    def test_point_mass_via_coupling(self):
        site = giant_site(point_mass(3), 0.6)
        bond = giant_bond(point_mass(3), 0.6)
        assert bond.rho == pytest.approx(site.rho / math.sqrt(0.6), abs=1e-9)
        assert bond.v_frac == pytest.approx(19 / 27, abs=1e-9)

    def test_subcritical(self):
        rep = giant_bond(PoissonDistribution(5.0), 0.1)
        assert rep.v_frac == 0.0 and not rep.supercritical

    def test_poisson_consistency(self):
        # v = 1 - g(1 - sqrt(pi) * rho) with rho from the fixed point
        d = PoissonDistribution(5.0)
        rep = giant_bond(d, 0.5)
        r = math.sqrt(0.5)
        assert rep.v_frac == pytest.approx(1 - d.pgf(1 - r * rep.rho), abs=1e-10)

    def test_residual(self):
        d = PoissonDistribution(5.0)
        rep = giant_bond(d, 0.5)
        r = math.sqrt(0.5)
        res = r * d.pgf(1 - r + r * rep.xi, 1) + (1 - r) * 5 - 5 * rep.xi
        assert abs(res) < 1e-10


class TestCouplingIdentities:
    def test_site_bond_relations(self):
        for d in TEST_DISTS:
            for pi in np.linspace(0.02, 0.99, 50):
                s = giant_site(d, pi)
                b = giant_bond(d, pi)
                assert abs(s.rho - math.sqrt(pi) * b.rho) < 1e-9
                assert abs(s.v_frac - pi * b.v_frac) < 1e-9
                assert abs(s.e_frac - pi * b.e_frac) < 1e-9


class TestRegularity:
    def test_monotone_in_pi(self):
        for d in (point_mass(3), PoissonDistribution(5.0)):
            grid = np.linspace(0.01, 1.0, 100)
            vs = [giant_site(d, pi).v_frac for pi in grid]
            ve = [giant_bond(d, pi).v_frac for pi in grid]
            assert all(b >= a - 1e-12 for a, b in zip(vs, vs[1:]))
            assert all(b >= a - 1e-12 for a, b in zip(ve, ve[1:]))

    def test_continuity_at_threshold(self):
        d = PoissonDistribution(5.0)
        pic = giant_threshold(d)
        vals = [giant_site(d, pic + 10.0**-k).v_frac for k in range(2, 7)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 1e-4

    def test_xi_matches_branching_extinction(self):
        for d in TEST_DISTS:
            assert 1 - solve_xi_base(d) == pytest.approx(survival_probability(d), abs=1e-8)


class TestCriticalExpansion:
    def test_point_mass_ratio(self):
        out = critical_expansion(point_mass(3), 1e-4)
        assert out["rho_v"] / 1e-4 == pytest.approx(4.0, rel=0.02)

    def test_poisson_prediction(self):
        out = critical_expansion(PoissonDistribution(4.0), 1e-4)
        assert out["rho_v"] / out["predicted_rho_v"] == pytest.approx(1.0, rel=0.02)

    def test_power_law_exponent(self):
        d = PowerLawDistribution(3.5, 2)
        eps = np.geomspace(1e-4, 1e-3, 7)
        rhos = [critical_expansion(d, e)["rho_v"] for e in eps]
        slope = np.polyfit(np.log(eps), np.log(rhos), 1)[0]
        assert abs(slope - 2.0) < 0.05

    def test_power_law_constant(self):
        out = critical_expansion(PowerLawDistribution(3.5, 2), 1e-4)
        assert out["branch"] == "power-law"
        assert out["rho_v"] / out["predicted_rho_v"] == pytest.approx(1.0, rel=0.02)

    def test_unsupported_regime(self):
        with pytest.raises(UnsupportedRegimeError):
            critical_expansion(point_mass(2), 1e-4)
