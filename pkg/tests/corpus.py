"""Small named graphs shared by the oracle tests."""
from __future__ import annotations

from functools import lru_cache

from perclocal import generators as gen
from perclocal.generators import GadgetSpec, gadget_sequence
from perclocal.graph import Graph, disjoint_union, from_edge_list
from perclocal.pruning import DegreeDistribution


def _petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return from_edge_list(10, outer + spokes + inner)


def _cube() -> Graph:
    return from_edge_list(8, [(u, u ^ (1 << b)) for u in range(8) for b in range(3) if u < u ^ (1 << b)])


def _grid(r: int, c: int) -> Graph:
    pairs = []
    for i in range(r):
        for j in range(c):
            v = i * c + j
            if j + 1 < c:
                pairs.append((v, v + 1))
            if i + 1 < r:
                pairs.append((v, v + c))
    return from_edge_list(r * c, pairs)


def _k33() -> Graph:
    return from_edge_list(6, [(i, 3 + j) for i in range(3) for j in range(3)])


@lru_cache(maxsize=None)
def corpus() -> dict[str, Graph]:
    graphs = {
        "single": gen.path(1),
        "edge": gen.path(2),
        "path3": gen.path(3),
        "path5": gen.path(5),
        "triangle": gen.cycle(3),
        "C4": gen.cycle(4),
        "C5": gen.cycle(5),
        "C6": gen.cycle(6),
        "C8": gen.cycle(8),
        "K4": gen.complete(4),
        "K5": gen.complete(5),
        "K6": gen.complete(6),
        "star5": gen.star(5),
        "two_triangles": disjoint_union([gen.cycle(3), gen.cycle(3)]),
        "lollipop": from_edge_list(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5)]),
        "barbell": from_edge_list(8, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5),
                                      (5, 6), (6, 7), (7, 5)]),
        "paw": from_edge_list(4, [(0, 1), (1, 2), (2, 0), (0, 3)]),
        "double_edge": from_edge_list(3, [(0, 1), (0, 1), (1, 2)]),
        "multi_cycle": from_edge_list(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 1), (2, 3)]),
        "theta": from_edge_list(5, [(0, 1), (1, 4), (0, 2), (2, 4), (0, 3), (3, 4)]),
        "petersen": _petersen(),
        "cube": _cube(),
        "grid3x3": _grid(3, 3),
        "grid3x4": _grid(3, 4),
        "K33": _k33(),
        "tree3_2": gen.d_regular_tree(3, 2),
        "gw_small": gen.galton_watson(DegreeDistribution.from_pmf([0.2, 0.3, 0.5]), 3, 4),
        "rr10_3_a": gen.random_regular(10, 3, 0),
        "rr10_3_b": gen.random_regular(10, 3, 1),
        "rr12_4": gen.random_regular(12, 4, 2),
        "rr14_3": gen.random_regular(14, 3, 3),
        "er12_a": gen.erdos_renyi(12, 2.5, 0),
        "er12_b": gen.erdos_renyi(12, 3.5, 1),
        "er14": gen.erdos_renyi(14, 3.0, 2),
        "gadget_tiny": gadget_sequence(GadgetSpec(2, 6, 3, seed=0)),
    }
    return graphs


def small(max_n: int) -> list[tuple[str, Graph]]:
    return [(name, g) for name, g in corpus().items() if g.n <= max_n]
