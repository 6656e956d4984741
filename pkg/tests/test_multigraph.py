import numpy as np
import pytest
from scipy import stats

from percolab.distributions import DegreeSequence
from percolab.multigraph import (
    Multigraph,
    ParityError,
    components,
    configuration_model,
    configuration_model_simple,
    graph_stats,
    induced_subgraph,
    is_simple,
    k_core,
    k_core_sequential,
)


def graph(n, edges):
    return Multigraph(n, np.array(edges, dtype=np.int64).reshape(-1, 2))


class TestConfigurationModel:
    def test_unique_matchings(self):
        g = configuration_model(DegreeSequence([1, 1]), 0)
        assert g.m == 1 and sorted(g.edges[0]) == [0, 1]
        g = configuration_model(DegreeSequence([2]), 0)
        assert g.m == 1 and list(g.edges[0]) == [0, 0]

    def test_parity_error(self):
        # DegreeSequence itself rejects odd sums; the builder double-checks
        class Odd:
            degrees = np.array([1, 1, 1], dtype=np.int64)

        with pytest.raises(ParityError):
            configuration_model(Odd(), 0)

    def test_degrees_match_sequence(self):
        seq = DegreeSequence([3, 2, 2, 1, 0])
        g = configuration_model(seq, 42)
        assert np.array_equal(g.degrees(), seq.degrees)

    def test_two_two_matching_frequencies(self):
        # degrees (2,2): loop+loop w.p. 1/3, double edge w.p. 2/3
        seq = DegreeSequence([2, 2])
        rng = np.random.default_rng(1)
        n_loops = 0
        reps = 10**5
        for _ in range(reps):
            g = configuration_model(seq, rng)
            if (g.edges[:, 0] == g.edges[:, 1]).any():
                n_loops += 1
        expected = np.array([reps / 3, 2 * reps / 3])
        observed = np.array([n_loops, reps - n_loops])
        chi2 = ((observed - expected) ** 2 / expected).sum()
        assert chi2 < stats.chi2.ppf(0.99, df=1)

    def test_path_matching_frequencies(self):
        # degrees (1,1,1,1): three perfect matchings, uniform
        seq = DegreeSequence([1, 1, 1, 1])
        rng = np.random.default_rng(2)
        counts = {}
        reps = 10**5
        for _ in range(reps):
            g = configuration_model(seq, rng)
            key = tuple(sorted(tuple(sorted(e)) for e in g.edges.tolist()))
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 3
        observed = np.array(list(counts.values()))
        chi2 = ((observed - reps / 3) ** 2 / (reps / 3)).sum()
        assert chi2 < stats.chi2.ppf(0.99, df=2)

    def test_seed_reproducible(self):
        seq = DegreeSequence([3, 3, 2, 2])
        a = configuration_model(seq, 9)
        b = configuration_model(seq, 9)
        assert np.array_equal(a.edges, b.edges)


class TestIsSimple:
    def test_cases(self):
        assert is_simple(graph(2, [[0, 1]]))
        assert not is_simple(graph(1, [[0, 0]]))
        assert not is_simple(graph(2, [[0, 1], [0, 1]]))

    def test_rejection_sampler(self):
        g = configuration_model_simple(DegreeSequence([2, 2, 2, 2]), 3)
        assert is_simple(g)


class TestComponents:
    def test_two_triangles(self):
        g = graph(6, [[0, 1], [1, 2], [2, 0], [3, 4], [4, 5], [5, 3]])
        rep = components(g)
        assert list(rep.sizes) == [3, 3]
        assert list(rep.edge_counts) == [3, 3]

    def test_edge_plus_isolated(self):
        g = graph(3, [[0, 1]])
        rep = components(g)
        assert list(rep.sizes) == [2, 1]

    def test_loop_loop(self):
        g = graph(2, [[0, 0], [1, 1]])
        rep = components(g)
        assert list(rep.sizes) == [1, 1]
        assert list(rep.edge_counts) == [1, 1]

    def test_totals(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            degs = rng.integers(0, 5, size=30)
            if degs.sum() % 2:
                degs[0] += 1
            g = configuration_model(DegreeSequence(degs), rng)
            rep = components(g)
            assert rep.sizes.sum() == g.n
            assert rep.edge_counts.sum() == g.m

    def test_tie_break_smallest_vertex_first(self):
        g = graph(4, [[2, 3], [0, 1]])
        rep = components(g)
        # both components have size 2; the one containing vertex 0 leads
        assert rep.labels[0] == rep.labels[1]
        first_label = rep.labels[0]
        assert rep.sizes[0] == 2
        profile_degrees = np.flatnonzero(rep.largest_profile)
        assert list(profile_degrees) == [1]


class TestKCore:
    def test_k4_three_core(self):
        k4 = graph(4, [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]])
        core = k_core(k4, 3)
        assert core.n == 4 and core.m == 6

    def test_cycle_two_core(self):
        c5 = graph(5, [[0, 1], [1, 2], [2, 3], [3, 4], [4, 0]])
        core = k_core(c5, 2)
        assert core.n == 5 and core.m == 5

    def test_path_empty(self):
        p3 = graph(3, [[0, 1], [1, 2]])
        assert k_core(p3, 2).n == 0

    def test_loop_counts_double(self):
        g = graph(1, [[0, 0]])
        assert k_core(g, 2).n == 1

    def test_idempotent_and_monotone(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            degs = rng.integers(0, 6, size=50)
            if degs.sum() % 2:
                degs[0] += 1
            g = configuration_model(DegreeSequence(degs), rng)
            for k in (2, 3):
                core = k_core(g, k)
                again = k_core(core, k)
                assert sorted(core.original_ids) == sorted(again.original_ids)
            assert set(k_core(g, 3).original_ids) <= set(k_core(g, 2).original_ids)

    def test_peeling_confluence(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            degs = rng.integers(0, 6, size=100)
            if degs.sum() % 2:
                degs[0] += 1
            g = configuration_model(DegreeSequence(degs), rng)
            ref = set(k_core(g, 3).original_ids)
            for order_seed in range(10):
                alt = set(k_core_sequential(g, 3, order_seed).original_ids)
                assert alt == ref


class TestGraphStats:
    def test_cases(self):
        s = graph_stats(Multigraph(0, np.zeros((0, 2), dtype=np.int64)))
        assert s["v"] == 0 and s["e"] == 0
        s = graph_stats(graph(1, [[0, 0]]))
        assert s["v"] == 1 and s["e"] == 1 and s["v_j"][2] == 1
        s = graph_stats(graph(2, [[0, 1]]))
        assert s["v"] == 2 and s["e"] == 1 and s["v_j"][1] == 2


class TestInducedSubgraph:
    def test_keeps_internal_edges(self):
        g = graph(4, [[0, 1], [1, 2], [2, 3]])
        sub = induced_subgraph(g, np.array([True, True, False, True]))
        assert sub.n == 3 and sub.m == 1
        assert list(sub.original_ids) == [0, 1, 3]


def test_edge_list_export(tmp_path):
    g = graph(3, [[0, 1], [2, 2]])
    path = tmp_path / "edges.txt"
    g.to_edge_list(path)
    assert path.read_text() == "0 1\n2 2\n"
