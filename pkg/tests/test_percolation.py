import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perclocal import generators as gen
from perclocal.graph import ball, components, from_edge_list
from perclocal.percolation import (PercolationConfig, SweepAccumulator, binomial_weights,
                                   canonical_curve, coupled_masks, monte_carlo_curve, reach_count,
                                   reach_flags, sample_config, sprinkle_union, sweep, sweeps)

from corpus import corpus
from oracles import expected_largest_fraction


def _sweep_oracle(g, order):
    out = []
    for k in range(1, len(order) + 1):
        mask = np.zeros(g.m, dtype=bool)
        mask[order[:k]] = True
        out.append(components(g, mask).largest)
    return out


class TestSampling:
    def test_extremes(self):
        g = gen.complete(5)
        assert not sample_config(g, 0.0, 1).mask.any()
        assert sample_config(g, 1.0, 1).mask.all()

    def test_single_edge_frequency(self):
        g = gen.path(2)
        hits = sum(bool(sample_config(g, 0.3, s).mask[0]) for s in range(100_000))
        sd = np.sqrt(100_000 * 0.3 * 0.7)
        assert abs(hits - 30_000) <= 3 * sd

    def test_range(self):
        with pytest.raises(ValueError):
            sample_config(gen.path(2), 1.2, 0)

    def test_config_mask_length(self):
        with pytest.raises(ValueError):
            PercolationConfig(gen.path(3), np.ones(5, bool), 0.5)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000), st.lists(st.floats(0, 1), min_size=2, max_size=8))
    def test_monotone_coupling(self, seed, ps):
        g = corpus()["petersen"]
        ps = sorted(ps)
        masks = coupled_masks(g, ps, seed)
        largest = [components(g, m).largest for m in masks]
        for a, b in zip(masks, masks[1:]):
            assert not (a & ~b).any()
        assert largest == sorted(largest)


class TestSweep:
    def test_triangle_all_orders(self):
        g = gen.cycle(3)
        seen = set()
        for s in range(60):
            sw = sweep(g, s)
            assert sw.trajectory.tolist() == [2, 3, 3]
            seen.add(tuple(sw.order.tolist()))
        assert len(seen) == 6

    def test_path(self):
        for s in range(10):
            assert sweep(gen.path(3), s).trajectory.tolist() == [2, 3]

    def test_empty(self):
        sw = sweep(from_edge_list(4, []), 0)
        assert sw.trajectory.tolist() == []
        assert sw.sizes().tolist() == [1]

    @pytest.mark.parametrize("name", sorted(corpus()))
    def test_against_recomputation(self, name):
        g = corpus()[name]
        for s in range(3):
            sw = sweep(g, s)
            assert sorted(sw.order.tolist()) == list(range(g.m))
            traj = sw.trajectory.tolist()
            assert traj == _sweep_oracle(g, sw.order)
            assert traj == sorted(traj)
            if g.m:
                assert traj[-1] == components(g).largest
                assert 1 <= traj[0] <= g.n

    def test_sweeps_deterministic(self):
        g = gen.random_regular(50, 3, 0)
        a = [s.order.tolist() for s in sweeps(g, 3, 9)]
        b = [s.order.tolist() for s in sweeps(g, 3, 9)]
        assert a == b and a[0] != a[1]


class TestSmoothing:
    @pytest.mark.parametrize("m,p", [(10, 0.3), (1000, 0.5), (100_000, 0.01), (50, 0.999)])
    def test_binomial_weights(self, m, p):
        from scipy.stats import binom
        lo, w = binomial_weights(m, p)
        assert w.sum() == pytest.approx(1.0)
        k = np.arange(lo, lo + w.size)
        exact = binom.pmf(k, m, p)
        assert np.allclose(w, exact / exact.sum(), rtol=1e-9, atol=1e-300)
        assert binom.pmf(k, m, p).sum() > 1 - 1e-8

    def test_degenerate_weights(self):
        assert binomial_weights(10, 0.0) == (0, pytest.approx(np.ones(1)))
        lo, w = binomial_weights(10, 1.0)
        assert lo == 10 and w.tolist() == [1.0]

    def test_endpoints(self):
        g = corpus()["two_triangles"]
        sw = sweeps(g, 5, 0)
        c = canonical_curve(sw, [0.0, 1.0])
        assert c.mean_fraction[0] == pytest.approx(1 / g.n)
        assert c.mean_fraction[1] == pytest.approx(3 / 6)

    @pytest.mark.parametrize("p", [0.2, 0.5, 0.8])
    def test_k4_matches_enumeration(self, p):
        g = gen.complete(4)
        exact = expected_largest_fraction(g, p)
        c = canonical_curve(sweeps(g, 20_000, 3), [p])
        assert abs(c.mean_fraction[0] - exact) < 3e-3

    def test_agrees_with_monte_carlo(self):
        g = gen.random_regular(200, 3, 1)
        grid = np.array([0.3, 0.5, 0.7])
        sm = canonical_curve(sweeps(g, 200, 1), grid)
        mc = monte_carlo_curve(g, grid, 200, 2)
        assert np.all(np.abs(sm.mean_fraction - mc.mean_fraction) < 0.05)
        assert np.all(np.abs(sm.prob_exceeds - mc.prob_exceeds) < 0.1)

    def test_exceedance_in_unit_interval(self):
        g = gen.random_regular(100, 3, 1)
        c = canonical_curve(sweeps(g, 30, 1), np.linspace(0, 1, 41))
        assert (c.prob_exceeds >= 0).all() and (c.prob_exceeds <= 1).all()
        assert (c.stderr >= 0).all()

    def test_mixed_graphs_rejected(self):
        a = sweep(gen.cycle(5), 0)
        b = sweep(gen.path(6), 0)
        with pytest.raises(ValueError, match="different graphs"):
            canonical_curve([a, b], [0.5])
        acc = SweepAccumulator.for_graph(gen.cycle(5))
        with pytest.raises(ValueError):
            acc.curve([0.5])


class TestSprinkle:
    def test_eps_zero_is_first_layer(self):
        g = gen.complete(6)
        for s in range(20):
            cfg = sprinkle_union(g, 0.4, 0.0, s)
            assert (cfg.mask == cfg.layer1).all()
            assert not cfg.layer_eps.any()

    def test_union_of_layers(self):
        g = gen.complete(6)
        cfg = sprinkle_union(g, 0.3, 0.2, 5)
        assert (cfg.mask == (cfg.layer1 | cfg.layer_eps)).all()
        assert cfg.p == pytest.approx(0.44)

    @pytest.mark.parametrize("p1,eps,expect", [(0.0, 0.35, 0.35), (0.3, 0.2, 0.44)])
    def test_marginal(self, p1, eps, expect):
        g = gen.path(2)
        draws = 100_000
        hits = sum(bool(sprinkle_union(g, p1, eps, s).mask[0]) for s in range(0, draws, 10))
        n = draws // 10
        assert abs(hits / n - expect) <= 3 * np.sqrt(expect * (1 - expect) / n)

    def test_range(self):
        with pytest.raises(ValueError):
            sprinkle_union(gen.path(2), 0.5, -0.1, 0)


class TestReach:
    def test_full_cycle(self):
        g = gen.cycle(10)
        cfg = PercolationConfig(g, np.ones(g.m, bool), 1.0)
        assert reach_count(g, cfg, 2) == 10

    def test_empty(self):
        g = gen.cycle(10)
        cfg = PercolationConfig(g, np.zeros(g.m, bool), 0.0)
        assert reach_count(g, cfg, 2) == 0

    def test_path_single_edge(self):
        g = gen.path(4)
        cfg = PercolationConfig(g, np.array([False, True, False]), 0.5)
        assert reach_flags(g, cfg, 1).tolist() == [False, True, True, False]

    def test_radius_check(self):
        g = gen.path(4)
        with pytest.raises(ValueError):
            reach_count(g, sample_config(g, 0.5, 0), 0)

    @pytest.mark.parametrize("name", sorted(corpus()))
    def test_full_mask_counts_nonempty_boundary(self, name):
        g = corpus()[name]
        cfg = PercolationConfig(g, np.ones(g.m, bool), 1.0)
        for R in (1, 2, 3):
            expect = sum(ball(g, v, R).boundary.size > 0 for v in range(g.n))
            assert reach_count(g, cfg, R) == expect

    @pytest.mark.parametrize("name", ["petersen", "grid3x4", "lollipop", "er14", "multi_cycle"])
    def test_against_bruteforce(self, name):
        g = corpus()[name]
        for s in range(5):
            cfg = sample_config(g, 0.6, s)
            for R in (1, 2, 3):
                assert reach_flags(g, cfg, R).tolist() == _reach_oracle(g, cfg.mask, R)


def _reach_oracle(g, mask, R):
    """BFS over open edges restricted to B_R(v), checking for a boundary hit."""
    out = []
    for v in range(g.n):
        b = ball(g, v, R)
        inside = set(b.vertices.tolist())
        boundary = set(b.boundary.tolist()) if R > 0 else set()
        seen, stack = {v}, [v]
        while stack:
            u = stack.pop()
            for w, e in g.adjacency(u):
                if mask[e] and w in inside and w not in seen:
                    seen.add(w)
                    stack.append(w)
        out.append(bool(seen & boundary))
    return out



def test_exceedance_threshold_is_inclusive():
    # alpha*n = 2 exactly: one open edge already makes a cluster of size 2
    g = gen.path(40)
    acc = SweepAccumulator.for_graph(g, 0.05)
    s = sweep(g, 0)
    acc.add(s)
    assert acc.first_exceed == [1]
    mc = monte_carlo_curve(g, [0.0, 1.0], 3, 0, alpha=0.025)
    assert mc.prob_exceeds.tolist() == [1.0, 1.0]
