"""Rooted-ball signatures, the G* metric, rerooting distance and ball laws."""
from __future__ import annotations

import math
import struct
from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import kernels
from .graph import Graph, RootedBall, _BallScratch, ball, from_edge_list
from .rng import stream

MAX_BALL_VERTICES = 10_000


class BallTooLarge(RuntimeError):
    pass


# ------------------------------------------------------------- canonical form

def _local_adjacency(b: RootedBall) -> list[dict[int, int]]:
    adj: list[dict[int, int]] = [dict() for _ in range(b.size)]
    for i, j in b.local_edges.tolist():
        adj[i][j] = adj[i].get(j, 0) + 1
        adj[j][i] = adj[j].get(i, 0) + 1
    return adj


def _tree_code(adj, dist) -> bytes:
    # in a tree ball every edge joins consecutive layers
    k = len(dist)
    order = sorted(range(k), key=lambda v: -dist[v])
    code: list[bytes] = [b""] * k
    for v in order:
        kids = sorted(code[w] for w in adj[v] if dist[w] == dist[v] + 1)
        code[v] = b"(" + b"".join(kids) + b")"
    return code[0]


def _rank(keys) -> list[int]:
    table = {key: i for i, key in enumerate(sorted(set(keys)))}
    return [table[key] for key in keys]


def _refine(colors: list[int], adj) -> list[int]:
    ncol = len(set(colors))
    while True:
        keys = [(colors[v], tuple(sorted((colors[u], c) for u, c in adj[v].items())))
                for v in range(len(colors))]
        new = _rank(keys)
        k = len(set(new))
        if k == ncol:
            return new
        colors, ncol = new, k


def _twins(x: int, y: int, adj) -> bool:
    ax = dict(adj[x])
    ax.pop(y, None)
    ay = dict(adj[y])
    ay.pop(x, None)
    return ax == ay


def _certificate(colors, adj) -> tuple:
    edges = []
    for v, nb in enumerate(adj):
        for u, c in nb.items():
            a, b = colors[v], colors[u]
            if a < b:
                edges.append((a, b, c))
    edges.sort()
    return tuple(edges)


def _search(colors, adj):
    colors = _refine(colors, adj)
    k = len(colors)
    counts = Counter(colors)
    if len(counts) == k:
        return _certificate(colors, adj)
    target = min(c for c, cnt in counts.items() if cnt > 1)
    cell = [v for v in range(k) if colors[v] == target]
    reps: list[int] = []
    for x in cell:
        # swapping twins is an automorphism fixing the coloring: same leaves
        if not any(_twins(r, x, adj) for r in reps):
            reps.append(x)
    best = None
    for x in reps:
        cert = _search(_rank([(c, 0 if v == x else 1) for v, c in enumerate(colors)]), adj)
        if best is None or cert < best:
            best = cert
    return best


def signature(b: RootedBall) -> bytes:
    """Canonical byte string of a rooted ball up to root-preserving isomorphism.

    Tree balls are encoded as nested parentheses; other balls by the
    lexicographically smallest labelled edge list reachable by individualizing
    and refining distance-layer colours.
    """
    if b.size > MAX_BALL_VERTICES:
        raise BallTooLarge(f"ball at root {b.root} has {b.size} vertices "
                           f"(cap {MAX_BALL_VERTICES})")
    adj = _local_adjacency(b)
    dist = b.dist.tolist()
    if b.local_edges.shape[0] == b.size - 1:
        return b"T" + _tree_code(adj, dist)
    degs = [sum(nb.values()) for nb in adj]
    colors = _rank(list(zip(dist, degs)))
    cert = _search(colors, adj)
    flat = [b.size, len(cert)] + [x for triple in cert for x in triple]
    return b"G" + struct.pack(f"<{len(flat)}I", *flat)


def decode_signature(sig: bytes) -> tuple[int, list[tuple[int, int]]]:
    """Vertex count and edge list (multi-edges repeated) of a signature; root is 0."""
    if sig[:1] == b"T":
        edges = []
        stack: list[int] = []
        k = 0
        for ch in sig[1:]:
            if ch == ord("("):
                if stack:
                    edges.append((stack[-1], k))
                stack.append(k)
                k += 1
            elif ch == ord(")"):
                stack.pop()
            else:
                raise ValueError("malformed tree signature")
        if stack:
            raise ValueError("malformed tree signature")
        return k, edges
    if sig[:1] == b"G":
        body = sig[1:]
        flat = struct.unpack(f"<{len(body) // 4}I", body)
        k, ne = flat[0], flat[1]
        edges = []
        for i in range(ne):
            a, b, c = flat[2 + 3 * i: 5 + 3 * i]
            edges.extend([(a, b)] * c)
        return k, edges
    raise ValueError("unknown signature tag")


def decode_ball(sig: bytes) -> RootedBall:
    """Rebuild a ball (as its own host graph) from a signature."""
    k, edges = decode_signature(sig)
    g = from_edge_list(k, edges)
    R = _root_eccentricity(g)
    return ball(g, 0, R)


def _root_eccentricity(g: Graph) -> int:
    s = _BallScratch(g.n)
    size = kernels.bfs_ball(g.indptr, g.nbr, 0, g.n, s.mark, 1, s.order, s.dist)
    return int(s.dist[:size].max()) if size else 0


# ------------------------------------------------------------------ G* metric

@dataclass(frozen=True)
class GstarDistance:
    """Exact value, or (when truncated) the interval [0, upper]."""

    upper: float
    truncated: bool
    common_radius: int

    @property
    def lower(self) -> float:
        return 0.0 if self.truncated else self.upper

    @property
    def value(self) -> float | None:
        return None if self.truncated else self.upper

    def __str__(self) -> str:
        return f"[0, {self.upper!r}]" if self.truncated else repr(self.upper)


class _SignatureCache:
    def __init__(self, g: Graph):
        self.g = g
        self.scratch = _BallScratch(g.n)
        self.cache: dict[tuple[int, int], tuple] = {}

    def key(self, v: int, R: int):
        hit = self.cache.get((v, R))
        if hit is None:
            b = ball(self.g, v, R, self.scratch)
            hit = (b.size, b.local_edges.shape[0], signature(b))
            self.cache[(v, R)] = hit
        return hit


def _common_radius(c1: _SignatureCache, v1: int, c2: _SignatureCache, v2: int, R_max: int) -> int:
    R = 0
    # isomorphic R-balls force isomorphic smaller balls, so stop at the first miss
    while R < R_max:
        if c1.key(v1, R + 1) != c2.key(v2, R + 1):
            return R
        R += 1
    return R


def _distance(R: int, R_max: int) -> GstarDistance:
    return GstarDistance(1.0 / (1 + R), R >= R_max, R)


def gstar_distance(g1: Graph, v1: int, g2: Graph, v2: int, R_max: int) -> GstarDistance:
    if R_max < 0:
        raise ValueError("R_max must be >= 0")
    R = _common_radius(_SignatureCache(g1), v1, _SignatureCache(g2), v2, R_max)
    return _distance(R, R_max)


def d_K(g1: Graph, v1: int, g2: Graph, v2: int, K: int, R_max: int) -> GstarDistance:
    """Smallest G* distance over reroots within distance K of each root."""
    if K < 0:
        raise ValueError("K must be >= 0")
    c1, c2 = _SignatureCache(g1), _SignatureCache(g2)
    roots1 = ball(g1, v1, K).vertices.tolist()
    roots2 = ball(g2, v2, K).vertices.tolist()
    best = -1
    for u1 in roots1:
        for u2 in roots2:
            best = max(best, _common_radius(c1, u1, c2, u2, R_max))
            if best >= R_max:
                return _distance(best, R_max)
    return _distance(best, R_max)


# --------------------------------------------------------------- ball laws

@dataclass
class BallDistribution:
    radius: int
    freqs: dict[bytes, float]
    roots: int
    sampled: bool = False

    def top(self, k: int = 10) -> list[tuple[bytes, float]]:
        return sorted(self.freqs.items(), key=lambda kv: (-kv[1], kv[0]))[:k]


def ball_distribution(g: Graph, R: int, sample: int | None = None, seed=0) -> BallDistribution:
    """Law of the R-ball around a uniform root.

    Exact over all roots by default; ``sample`` draws that many roots without
    replacement instead (meant for very large graphs).
    """
    if sample is not None and sample < g.n:
        roots = np.sort(stream(seed, "ball_roots").choice(g.n, size=sample, replace=False))
        sampled = True
    else:
        roots = np.arange(g.n)
        sampled = False
    scratch = _BallScratch(g.n)
    counts: Counter = Counter()
    for v in roots.tolist():
        counts[signature(ball(g, v, R, scratch))] += 1
    total = len(roots)
    freqs = {s: counts[s] / total for s in sorted(counts)}
    return BallDistribution(R, freqs, total, sampled)


def point_mass(b: RootedBall) -> BallDistribution:
    return BallDistribution(b.radius, {signature(b): 1.0}, 1)


def tv_distance(d1: BallDistribution, d2: BallDistribution) -> float:
    if d1.radius != d2.radius:
        raise ValueError(f"radius mismatch: {d1.radius} vs {d2.radius}")
    keys = set(d1.freqs) | set(d2.freqs)
    total = math.fsum(abs(d1.freqs.get(s, 0.0) - d2.freqs.get(s, 0.0)) for s in sorted(keys))
    return min(1.0, 0.5 * total)


def discrepancies(d1: BallDistribution, d2: BallDistribution, k: int = 10):
    keys = sorted(set(d1.freqs) | set(d2.freqs))
    rows = [(s, d1.freqs.get(s, 0.0), d2.freqs.get(s, 0.0)) for s in keys]
    rows.sort(key=lambda r: (-abs(r[1] - r[2]), r[0]))
    return rows[:k]


def pair_density(g: Graph, R: int) -> float:
    """Fraction of ordered vertex pairs at distance <= R."""
    if R < 0:
        raise ValueError("R must be >= 0")
    if g.n == 0:
        return 0.0
    sizes = kernels.ball_sizes(g.indptr, g.nbr, g.n, R)
    return int(sizes.sum()) / (g.n * g.n)
