"""Immutable multigraph in compressed adjacency form, balls and components."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import kernels


class GraphError(ValueError):
    pass


class Graph:
    """Undirected multigraph on vertices ``0..n-1``.

    Parallel edges are kept, self-loops are rejected. ``adjacency(v)`` lists
    ``(neighbor, edge_id)`` pairs in increasing edge-id order.
    """

    def __init__(self, n: int, edges: np.ndarray):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        self.n = int(n)
        self.edges = edges
        self.edges.setflags(write=False)
        m = edges.shape[0]
        tails = np.concatenate([edges[:, 0], edges[:, 1]])
        heads = np.concatenate([edges[:, 1], edges[:, 0]])
        ids = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((ids, tails))
        self.nbr = heads[order]
        self.eid = ids[order]
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(tails, minlength=self.n), out=self.indptr[1:])
        for arr in (self.nbr, self.eid, self.indptr):
            arr.setflags(write=False)

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    @property
    def eu(self) -> np.ndarray:
        return self.edges[:, 0]

    @property
    def ev(self) -> np.ndarray:
        return self.edges[:, 1]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def adjacency(self, v: int) -> list[tuple[int, int]]:
        lo, hi = self.indptr[v], self.indptr[v + 1]
        return list(zip(self.nbr[lo:hi].tolist(), self.eid[lo:hi].tolist()))

    def neighbors(self, v: int) -> np.ndarray:
        return self.nbr[self.indptr[v]:self.indptr[v + 1]]

    @cached_property
    def fingerprint(self) -> str:
        h = hashlib.blake2b(digest_size=16)
        h.update(np.int64(self.n).tobytes())
        h.update(np.ascontiguousarray(self.edges).tobytes())
        return h.hexdigest()

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Copy with vertex v renamed to perm[v]; edge ids keep their order."""
        perm = np.asarray(perm, dtype=np.int64)
        return Graph(self.n, perm[self.edges])

    def edge_subgraph(self, keep: np.ndarray) -> "Graph":
        """Same vertex set, only the edges where ``keep`` is true (ids renumbered)."""
        keep = np.asarray(keep, dtype=bool)
        return Graph(self.n, self.edges[keep])

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


def from_edge_list(n: int, pairs: Iterable[Sequence[int]]) -> Graph:
    """Build a graph, assigning edge ids in input order."""
    n = int(n)
    if n < 0:
        raise GraphError(f"vertex count must be non-negative, got {n}")
    arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs,
                     dtype=np.int64).reshape(-1, 2)
    if arr.size:
        bad = np.flatnonzero((arr < 0).any(axis=1) | (arr >= n).any(axis=1))
        if bad.size:
            u, v = arr[bad[0]]
            raise GraphError(f"edge {bad[0]} ({u}, {v}) has an endpoint outside [0, {n})")
        loops = np.flatnonzero(arr[:, 0] == arr[:, 1])
        if loops.size:
            u, v = arr[loops[0]]
            raise GraphError(f"edge {loops[0]} ({u}, {v}) is a self-loop")
    return Graph(n, arr)


def disjoint_union(graphs: Sequence[Graph]) -> Graph:
    offsets = np.cumsum([0] + [g.n for g in graphs])
    edges = [g.edges + off for g, off in zip(graphs, offsets)]
    return Graph(int(offsets[-1]), np.concatenate(edges) if edges else np.zeros((0, 2)))


# ---------------------------------------------------------------- edge-list IO

def write_edge_list(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_edge_list(g))


def format_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines.extend(f"{u} {v}" for u, v in g.edges.tolist())
    return "\n".join(lines) + "\n"


def _is_int(token: str) -> bool:
    return token.lstrip("-").isdigit()


def parse_edge_list(text: str) -> Graph:
    rows = [ln.strip() for ln in text.splitlines()]
    rows = [ln for ln in rows if ln and not ln.startswith("#")]
    if not rows:
        raise GraphError("edge list is empty: missing 'n m' header")
    head = rows[0].split()
    if len(head) != 2 or not all(_is_int(x) for x in head):
        raise GraphError(f"bad header {rows[0]!r}: expected 'n m'")
    n, m = int(head[0]), int(head[1])
    body = rows[1:]
    if len(body) != m:
        raise GraphError(f"header declares {m} edges but {len(body)} edge lines follow")
    pairs = np.zeros((m, 2), dtype=np.int64)
    for i, ln in enumerate(body):
        parts = ln.split()
        if len(parts) != 2 or not all(_is_int(x) for x in parts):
            raise GraphError(f"bad edge line {ln!r}: expected 'u v'")
        pairs[i] = int(parts[0]), int(parts[1])
    return from_edge_list(n, pairs)


def read_edge_list(path) -> Graph:
    return parse_edge_list(Path(path).read_text())


# ----------------------------------------------------------------------- balls

@dataclass(frozen=True)
class RootedBall:
    """Induced subgraph of radius ``radius`` around ``root``.

    ``vertices`` are host ids in BFS order (root first) and ``dist`` their
    distances from the root. ``edges`` holds the host edge ids of the induced
    subgraph, and ``local_edges`` the same edges in positions of ``vertices``.
    """

    root: int
    radius: int
    vertices: np.ndarray
    dist: np.ndarray
    edges: np.ndarray
    local_edges: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def boundary(self) -> np.ndarray:
        """Vertices at distance exactly ``radius``."""
        return self.vertices[self.dist == self.radius]


class _BallScratch:
    def __init__(self, n: int):
        self.mark = np.full(n, -1, dtype=np.int64)
        self.local = np.zeros(n, dtype=np.int64)
        self.order = np.empty(n, dtype=np.int64)
        self.dist = np.empty(n, dtype=np.int64)
        self.stamp = 0


def ball(g: Graph, v: int, R: int, scratch: _BallScratch | None = None) -> RootedBall:
    if not 0 <= v < g.n:
        raise GraphError(f"vertex {v} out of range [0, {g.n})")
    if R < 0:
        raise GraphError(f"radius must be non-negative, got {R}")
    s = scratch if scratch is not None else _BallScratch(g.n)
    s.stamp += 1
    size = kernels.bfs_ball(g.indptr, g.nbr, v, R, s.mark, s.stamp, s.order, s.dist)
    verts = s.order[:size].copy()
    dist = s.dist[:size].copy()
    s.local[verts] = np.arange(size)
    # incident half-edges of ball vertices, then keep those landing inside
    starts = g.indptr[verts]
    counts = g.indptr[verts + 1] - starts
    if counts.sum():
        src = np.repeat(np.arange(size), counts)
        pos = np.repeat(starts - np.cumsum(counts) + counts, counts) + np.arange(counts.sum())
        w = g.nbr[pos]
        inside = s.mark[w] == s.stamp
        lw = s.local[w]
        keep = inside & (src < lw)
        eids = g.eid[pos][keep]
        loc = np.stack([src[keep], lw[keep]], axis=1)
        order = np.argsort(eids, kind="stable")
        eids, loc = eids[order], loc[order]
    else:
        eids = np.zeros(0, dtype=np.int64)
        loc = np.zeros((0, 2), dtype=np.int64)
    return RootedBall(int(v), int(R), verts, dist, eids, loc)


# ----------------------------------------------------------------- components

@dataclass(frozen=True)
class Components:
    labels: np.ndarray
    sizes: np.ndarray

    @property
    def largest(self) -> int:
        return int(self.sizes.max()) if self.sizes.size else 0

    @property
    def count(self) -> int:
        return int(self.sizes.shape[0])

    def members(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.labels == label)


def components(g: Graph, mask: np.ndarray | None = None) -> Components:
    """Connected components of the subgraph of edges selected by ``mask``."""
    if mask is None:
        mask = np.ones(g.m, dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (g.m,):
        raise GraphError(f"mask has length {mask.shape}, graph has {g.m} edges")
    labels = kernels.component_labels(g.n, g.eu, g.ev, mask)
    sizes = np.bincount(labels, minlength=0) if g.n else np.zeros(0, dtype=np.int64)
    return Components(labels, sizes)


def bfs_distances(g: Graph, v: int) -> np.ndarray:
    """Hop distances from v; -1 for unreachable vertices."""
    dist = np.full(g.n, -1, dtype=np.int64)
    dist[v] = 0
    frontier = [v]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for u in frontier:
            for w in g.neighbors(u).tolist():
                if dist[w] < 0:
                    dist[w] = d
                    nxt.append(w)
        frontier = nxt
    return dist
