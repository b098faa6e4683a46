import itertools

import networkx as nx
import numpy as np
import pytest

from perclocal import generators as gen
from perclocal.expansion import cut_ratio, cut_size
from perclocal.generators import GadgetSpec, InfeasibleError, gadget_sequence, is_graphical
from perclocal.graph import GraphError, components
from perclocal.pruning import DegreeDistribution


def _simple(g):
    keys = {tuple(sorted(e)) for e in g.edges.tolist()}
    return len(keys) == g.m and all(u != v for u, v in g.edges.tolist())


class TestRandomRegular:
    @pytest.mark.parametrize("seed", range(5))
    def test_four_three_is_k4(self, seed):
        g = gen.random_regular(4, 3, seed)
        assert sorted(map(tuple, g.edges.tolist())) == list(itertools.combinations(range(4), 2))

    @pytest.mark.parametrize("seed", range(5))
    def test_two_regular_is_cycles(self, seed):
        g = gen.random_regular(30, 2, seed)
        assert (g.degrees == 2).all()
        # every component of a 2-regular graph is a cycle: edges == vertices
        c = components(g)
        for lab in range(c.count):
            verts = set(c.members(lab).tolist())
            inside = sum(1 for u, v in g.edges.tolist() if u in verts)
            assert inside == len(verts)

    def test_parity_error(self):
        with pytest.raises(InfeasibleError, match="odd"):
            gen.random_regular(5, 3, 0)

    def test_degree_too_large(self):
        with pytest.raises(InfeasibleError):
            gen.random_regular(4, 4, 0)

    @pytest.mark.parametrize("n,d", [(10, 3), (50, 4), (200, 5), (1000, 3)])
    def test_simple_regular(self, n, d):
        for seed in range(3):
            g = gen.random_regular(n, d, seed)
            assert (g.degrees == d).all()
            assert _simple(g)

    def test_seed_determinism(self):
        a = gen.random_regular(100, 3, 7)
        b = gen.random_regular(100, 3, 7)
        c = gen.random_regular(100, 3, 8)
        assert a.edges.tolist() == b.edges.tolist()
        assert a.edges.tolist() != c.edges.tolist()

    def test_uniform_over_labelled_graphs(self):
        # 2-regular graphs on 5 labelled vertices are the 12 labelled 5-cycles
        counts = {}
        for seed in range(2400):
            key = tuple(map(tuple, gen.random_regular(5, 2, seed).edges.tolist()))
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 12
        freq = np.array(list(counts.values()))
        chi2 = ((freq - 200) ** 2 / 200).sum()
        assert chi2 < 31.3  # 11 dof, p = 0.001


class TestGraphical:
    def test_matches_networkx(self):
        rng = np.random.default_rng(5)
        for _ in range(2000):
            d = rng.integers(0, 9, size=rng.integers(1, 9))
            assert is_graphical(d) == nx.is_graphical(d.tolist())

    def test_infeasible_sequence_fails_fast(self):
        with pytest.raises(InfeasibleError, match="realizable"):
            gen.configuration_model([3, 3, 1, 1], 0)


class TestGadget:
    @pytest.mark.parametrize("d,m,k", [(2, 6, 3), (2, 10, 8), (2, 7, 4), (2, 20, 40)])
    def test_regular_and_block_cut(self, d, m, k):
        spec = GadgetSpec(d, m, k, seed=3)
        g = gadget_sequence(spec)
        assert g.n == m * k
        assert (g.degrees == 2 * d).all()
        for blocks in range(1, k // 2 + 1):
            A = np.arange(blocks * m)
            assert cut_size(g, A) <= blocks * d
            assert cut_ratio(g, A) <= d / m + 1e-12

    def test_copies_identical_by_default(self):
        spec = GadgetSpec(2, 8, 4, seed=1)
        g = gadget_sequence(spec)
        inner = [sorted((u % 8, v % 8) for u, v in g.edges.tolist() if u // 8 == v // 8 == c)
                 for c in range(4)]
        assert all(x == inner[0] for x in inner)
        glue = [(u, v) for u, v in g.edges.tolist() if u // 8 != v // 8]
        assert all(u % 8 == 0 and v % 8 == 0 for u, v in glue)
        assert len(glue) == 4 * 2 // 2

    def test_independent_copies(self):
        g = gadget_sequence(GadgetSpec(2, 12, 6, seed=1, independent_copies=True))
        inner = [sorted((u % 12, v % 12) for u, v in g.edges.tolist() if u // 12 == v // 12 == c)
                 for c in range(6)]
        assert len({tuple(x) for x in inner}) > 1
        assert (g.degrees == 4).all()

    def test_small_instance_block_cut_bruteforce(self):
        g = gadget_sequence(GadgetSpec(2, 6, 8, seed=0))
        for blocks in range(1, 5):
            A = set(range(blocks * 6))
            crossing = sum((u in A) != (v in A) for u, v in g.edges.tolist())
            assert crossing / len(A) <= 2 / 6 + 1e-12

    @pytest.mark.parametrize("d,m,k,msg", [
        (2, 6, 1, "d\\+1"),
        (2, 6, 2, "d\\+1"),
        (1, 6, 4, "odd"),
        (2, 5, 4, "2d\\+2"),
        (3, 12, 5, "odd"),
    ])
    def test_infeasible(self, d, m, k, msg):
        with pytest.raises(InfeasibleError, match=msg):
            gadget_sequence(GadgetSpec(d, m, k))

    def test_seed_determinism(self):
        a = gadget_sequence(GadgetSpec(2, 10, 6, seed=4))
        b = gadget_sequence(GadgetSpec(2, 10, 6, seed=4))
        assert a.edges.tolist() == b.edges.tolist()


class TestOtherFamilies:
    def test_galton_watson_binary(self):
        g = gen.galton_watson(DegreeDistribution.constant(2), 3, 0)
        assert g.n == 15 and g.m == 14

    def test_galton_watson_zero(self):
        g = gen.galton_watson(DegreeDistribution.constant(0), 5, 0)
        assert g.n == 1 and g.m == 0

    def test_galton_watson_mean_growth(self):
        law = DegreeDistribution.from_pmf([0.25, 0.25, 0.5])  # mean 1.25
        depth, samples = 5, 10_000
        sizes = np.empty(samples)
        for s in range(samples):
            g = gen.galton_watson(law, depth, s)
            d = _depths(g)
            sizes[s] = np.count_nonzero(d == depth)
        mean = 1.25 ** depth
        # Var Z_t = sigma^2 m^{t-1} (m^t - 1) / (m - 1)
        var = 0.6875 * 1.25 ** (depth - 1) * (1.25 ** depth - 1) / 0.25
        assert abs(sizes.mean() - mean) <= 3 * np.sqrt(var / samples)

    def test_galton_watson_is_tree(self):
        g = gen.galton_watson(DegreeDistribution.poisson(1.5), 6, 2)
        assert g.m == g.n - 1
        assert components(g).count == 1

    def test_d_regular_tree(self):
        g = gen.d_regular_tree(3, 2)
        assert g.n == 10
        assert g.degrees[0] == 3
        internal = [v for v in range(g.n) if _depths(g)[v] < 2]
        assert all(g.degrees[v] == 3 for v in internal)

    def test_cycle_and_complete(self):
        assert sorted(tuple(sorted(e)) for e in gen.cycle(3).edges.tolist()) == [(0, 1), (0, 2), (1, 2)]
        assert gen.complete(6).m == 15
        assert (gen.complete(6).degrees == 5).all()

    def test_erdos_renyi_mean_degree(self):
        n, c = 2000, 3.0
        means = np.array([gen.erdos_renyi(n, c, s).degrees.mean() for s in range(20)])
        # total edges ~ Binomial(n(n-1)/2, c/(n-1))
        sd_one = np.sqrt(4 * (n * (n - 1) / 2) * (c / (n - 1)) * (1 - c / (n - 1))) / n
        assert abs(means.mean() - c) <= 3 * sd_one / np.sqrt(20)
        assert all(_simple(gen.erdos_renyi(200, 4.0, s)) for s in range(5))

    def test_range_checks(self):
        for bad in (lambda: gen.cycle(2), lambda: gen.path(0), lambda: gen.complete(0),
                    lambda: gen.d_regular_tree(0, 2), lambda: gen.erdos_renyi(-1, 1, 0)):
            with pytest.raises(GraphError):
                bad()


class TestRegistry:
    def test_parse_and_build(self):
        params = gen.parse_params("random_regular", ["n=20", "d=3", "seed=4"])
        assert params == {"n": 20, "d": 3, "seed": 4}
        g = gen.build("random_regular", params)
        assert g.edges.tolist() == gen.random_regular(20, 3, 4).edges.tolist()

    def test_unknown_family(self):
        with pytest.raises(GraphError, match="unknown family"):
            gen.parse_params("nope", [])

    def test_bad_items(self):
        with pytest.raises(GraphError):
            gen.parse_params("cycle", ["n"])
        with pytest.raises(GraphError):
            gen.parse_params("cycle", ["k=3"])
        with pytest.raises(GraphError, match="missing"):
            gen.build("random_regular", {"n": 4})


def _depths(g):
    from perclocal.graph import bfs_distances
    return bfs_distances(g, 0)
