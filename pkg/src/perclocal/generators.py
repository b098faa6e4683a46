"""Seeded graph families, including the non-expanding gadget sequence."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphError, disjoint_union, from_edge_list
from .pruning import DegreeDistribution
from .rng import stream

MAX_PAIRING_TRIES = 100_000


class InfeasibleError(GraphError):
    pass


def is_graphical(degrees) -> bool:
    """Erdos-Gallai test: does some simple graph have this degree sequence?"""
    d = np.sort(np.asarray(degrees, dtype=np.int64))[::-1]
    if d.size == 0:
        return True
    if d[-1] < 0 or d.sum() % 2:
        return False
    lhs = np.cumsum(d)
    # inequalities past the Durfee index hold automatically
    durfee = int(np.count_nonzero(d >= np.arange(1, d.size + 1)))
    for k in range(1, durfee + 1):
        if lhs[k - 1] > k * (k - 1) + np.minimum(d[k:], k).sum():
            return False
    return True


def configuration_model(degrees, seed, max_tries: int = MAX_PAIRING_TRIES) -> Graph:
    """Uniform simple graph with the given degree sequence.

    Whole pairings are resampled until one has no self-loop and no parallel
    edge, which gives exact uniformity over simple realizations.
    """
    degrees = np.asarray(degrees, dtype=np.int64)
    n = degrees.shape[0]
    if (degrees < 0).any():
        raise InfeasibleError("degrees must be non-negative")
    if degrees.sum() % 2:
        raise InfeasibleError(f"degree sum {degrees.sum()} is odd")
    if n and degrees.max() >= n:
        raise InfeasibleError(f"degree {degrees.max()} needs at least {degrees.max() + 1} vertices")
    if not is_graphical(degrees):
        raise InfeasibleError("degree sequence is not realizable by a simple graph")
    rng = stream(seed, "configuration_model")
    stubs = np.repeat(np.arange(n), degrees)
    if stubs.size == 0:
        return Graph(n, np.zeros((0, 2), dtype=np.int64))
    for _ in range(max_tries):
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        lo = pairs.min(axis=1)
        hi = pairs.max(axis=1)
        if (lo == hi).any():
            continue
        key = lo * n + hi
        key.sort()
        if (key[1:] == key[:-1]).any():
            continue
        return Graph(n, np.stack([key // n, key % n], axis=1))
    raise InfeasibleError(f"no simple pairing found in {max_tries} tries; rejection needs about "
                          f"exp((mean_sq_degree - 1) / 4) tries and is impractical for dense sequences")


def random_regular(n: int, d: int, seed) -> Graph:
    if n * d % 2:
        raise InfeasibleError(f"n*d = {n * d} is odd")
    if not 0 <= d < n:
        raise InfeasibleError(f"need 0 <= d < n, got d={d}, n={n}")
    return configuration_model(np.full(n, d), stream(seed, "random_regular", n, d))


@dataclass(frozen=True)
class GadgetSpec:
    """Copies of an m-vertex graph H with one degree-d vertex, glued by a d-regular J.

    ``independent_copies`` draws a fresh H for every copy instead of
    replicating one realization.
    """

    d: int
    m: int
    n_copies: int
    seed: int = 0
    independent_copies: bool = False

    def validate(self) -> None:
        d, m, k = self.d, self.m, self.n_copies
        if d < 1:
            raise InfeasibleError(f"d must be >= 1, got {d}")
        if (2 * d * (m - 1) + d) % 2:
            raise InfeasibleError(f"H degree sum 2d(m-1)+d = {2 * d * (m - 1) + d} is odd")
        if m < 2 * d + 2:
            # a degree-2d vertex off the hub needs 2d neighbours besides the hub
            raise InfeasibleError(f"H needs m >= 2d+2 = {2 * d + 2} vertices, got {m}")
        if k * d % 2:
            raise InfeasibleError(f"n_copies*d = {k * d} is odd")
        if k < d + 1:
            raise InfeasibleError(f"J needs at least d+1 = {d + 1} copies, got {k}")

    @property
    def n(self) -> int:
        return self.m * self.n_copies

    def hub(self, copy: int) -> int:
        """Host id of the distinguished vertex of copy ``copy``."""
        return copy * self.m


def gadget_sequence(spec: GadgetSpec) -> Graph:
    """2d-regular graph whose expansion is at most d/m across blocks of copies.

    Copy i occupies vertices ``i*m .. i*m+m-1``; its distinguished vertex is
    the first one.
    """
    spec.validate()
    degs = np.full(spec.m, 2 * spec.d)
    degs[0] = spec.d
    if spec.independent_copies:
        copies = [configuration_model(degs, stream(spec.seed, "gadget_H", i))
                  for i in range(spec.n_copies)]
        body = disjoint_union(copies)
    else:
        h = configuration_model(degs, stream(spec.seed, "gadget_H", 0))
        offsets = (np.arange(spec.n_copies) * spec.m)[:, None, None]
        body_edges = (h.edges[None, :, :] + offsets).reshape(-1, 2)
        body = Graph(spec.n, body_edges)
    j = random_regular(spec.n_copies, spec.d, stream(spec.seed, "gadget_J"))
    glue = j.edges * spec.m
    return Graph(spec.n, np.concatenate([body.edges, glue]))


def galton_watson(offspring: DegreeDistribution, depth: int, seed) -> Graph:
    """Galton-Watson tree truncated at ``depth``, grown level by level from root 0."""
    if depth < 0:
        raise GraphError(f"depth must be non-negative, got {depth}")
    rng = stream(seed, "galton_watson")
    support = np.arange(offspring.pmf.shape[0])
    pmf = offspring.pmf
    edges = []
    level = np.array([0])
    n = 1
    for _ in range(depth):
        if level.size == 0:
            break
        kids = rng.choice(support, size=level.size, p=pmf)
        total = int(kids.sum())
        if total == 0:
            break
        parents = np.repeat(level, kids)
        children = np.arange(n, n + total)
        edges.append(np.stack([parents, children], axis=1))
        n += total
        level = children
    e = np.concatenate(edges) if edges else np.zeros((0, 2), dtype=np.int64)
    return Graph(n, e)


def erdos_renyi(n: int, c: float, seed) -> Graph:
    """G(n, c/(n-1)) sampled by edge count then distinct uniform pairs."""
    if n < 0 or c < 0:
        raise GraphError("n and c must be non-negative")
    if n < 2:
        return Graph(n, np.zeros((0, 2), dtype=np.int64))
    p = min(1.0, c / (n - 1))
    rng = stream(seed, "erdos_renyi", n)
    total = n * (n - 1) // 2
    m = int(rng.binomial(total, p))
    keys = np.zeros(0, dtype=np.int64)
    while keys.size < m:
        need = m - keys.size
        a = rng.integers(0, n, size=2 * need + 16)
        b = rng.integers(0, n, size=2 * need + 16)
        ok = a != b
        lo, hi = np.minimum(a[ok], b[ok]), np.maximum(a[ok], b[ok])
        fresh = lo * n + hi
        # keep first occurrences in draw order so the result is seed-stable
        merged = np.concatenate([keys, fresh])
        _, first = np.unique(merged, return_index=True)
        keys = merged[np.sort(first)][:m]
    keys = np.sort(keys)
    return Graph(n, np.stack([keys // n, keys % n], axis=1))


def d_regular_tree(d: int, depth: int) -> Graph:
    """Ball of radius ``depth`` in the d-regular tree, root 0."""
    if d < 1 or depth < 0:
        raise GraphError("need d >= 1 and depth >= 0")
    edges = []
    level = [0]
    n = 1
    for t in range(depth):
        k = d if t == 0 else d - 1
        nxt = []
        for u in level:
            for _ in range(k):
                edges.append((u, n))
                nxt.append(n)
                n += 1
        level = nxt
    return from_edge_list(n, edges)


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError(f"cycle needs n >= 3, got {n}")
    return from_edge_list(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    if n < 1:
        raise GraphError(f"path needs n >= 1, got {n}")
    return from_edge_list(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    if n < 1:
        raise GraphError(f"complete graph needs n >= 1, got {n}")
    return from_edge_list(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star(n: int) -> Graph:
    """Hub 0 joined to n-1 leaves."""
    if n < 1:
        raise GraphError(f"star needs n >= 1, got {n}")
    return from_edge_list(n, [(0, i) for i in range(1, n)])


# name -> (builder, int params, float params)
FAMILIES = {
    "random_regular": (lambda p: random_regular(p["n"], p["d"], p["seed"]), ("n", "d", "seed"), ()),
    "gadget": (lambda p: gadget_sequence(GadgetSpec(p["d"], p["m"], p["n_copies"], p["seed"],
                                                    bool(p.get("independent", 0)))),
               ("d", "m", "n_copies", "seed", "independent"), ()),
    "erdos_renyi": (lambda p: erdos_renyi(p["n"], p["c"], p["seed"]), ("n", "seed"), ("c",)),
    "d_regular_tree": (lambda p: d_regular_tree(p["d"], p["depth"]), ("d", "depth"), ()),
    "galton_watson": (lambda p: galton_watson(DegreeDistribution.constant(p["k"]) if "k" in p
                                              else DegreeDistribution.poisson(p["mean"]),
                                              p["depth"], p["seed"]),
                      ("k", "depth", "seed"), ("mean",)),
    "cycle": (lambda p: cycle(p["n"]), ("n",), ()),
    "path": (lambda p: path(p["n"]), ("n",), ()),
    "complete": (lambda p: complete(p["n"]), ("n",), ()),
    "star": (lambda p: star(p["n"]), ("n",), ()),
}


def parse_params(family: str, items) -> dict:
    if family not in FAMILIES:
        raise GraphError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
    _, ints, floats = FAMILIES[family]
    params = {}
    for item in items:
        if "=" not in item:
            raise GraphError(f"parameter {item!r} is not key=value")
        key, val = item.split("=", 1)
        if key not in ints and key not in floats:
            raise GraphError(f"{family} does not take parameter {key!r}")
        try:
            params[key] = int(val) if key in ints else float(val)
        except ValueError:
            kind = "an integer" if key in ints else "a number"
            raise GraphError(f"parameter {key} must be {kind}, got {val!r}") from None
    return params


def build(family: str, params: dict) -> Graph:
    builder = FAMILIES[family][0]
    try:
        return builder(params)
    except KeyError as exc:
        raise GraphError(f"{family} is missing parameter {exc.args[0]!r}") from None
