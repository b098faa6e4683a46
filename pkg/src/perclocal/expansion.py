"""Edge expansion h_delta (exact, bounds) and unit-capacity max-flow cuts."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .graph import Graph
from .rng import stream

EXACT_CAP = 20
DENSE_SPECTRAL_CAP = 2000


class ExpansionError(ValueError):
    pass


def _size_range(n: int, delta: float) -> tuple[int, int]:
    if not 0.0 < delta <= 0.5:
        raise ExpansionError(f"delta must lie in (0, 1/2], got {delta}")
    # may be empty (lo > hi); the minimum over no sets is +inf
    return max(1, math.ceil(delta * n - 1e-12)), n // 2


def cut_size(g: Graph, A) -> int:
    inside = np.zeros(g.n, dtype=bool)
    inside[np.asarray(list(A), dtype=np.int64)] = True
    return int((inside[g.eu] != inside[g.ev]).sum())


def cut_ratio(g: Graph, A) -> float:
    A = np.unique(np.asarray(list(A), dtype=np.int64))
    return cut_size(g, A) / A.size


@dataclass
class Cut:
    value: float
    witness: tuple[int, ...]
    crossing: int


def h_delta_exact(g: Graph, delta: float) -> Cut:
    """Minimum of |E(A, V\\A)|/|A| over delta <= |A|/n <= 1/2, by enumeration."""
    n = g.n
    if n > EXACT_CAP:
        raise ExpansionError(f"exact expansion is capped at n <= {EXACT_CAP} (got {n}); "
                             "use h_delta_bounds")
    lo, hi = _size_range(n, delta)
    if lo > hi:
        return Cut(math.inf, (), 0)
    masks = np.arange(1 << n, dtype=np.int64)
    pop = np.zeros(masks.size, dtype=np.int64)
    for v in range(n):
        pop += (masks >> v) & 1
    feasible = (pop >= lo) & (pop <= hi)
    cand = masks[feasible]
    sizes = pop[feasible]
    crossing = np.zeros(cand.size, dtype=np.int64)
    for u, v in g.edges.tolist():
        crossing += ((cand >> u) ^ (cand >> v)) & 1
    # ratios of small integers: distinct values differ by >= 1/n^2, far above rounding
    best = int(np.argmin(crossing / sizes))
    witness = tuple(v for v in range(n) if (cand[best] >> v) & 1)
    return Cut(int(crossing[best]) / int(sizes[best]), witness, int(crossing[best]))


@dataclass
class ExpansionReport:
    delta: float
    lower: float
    upper: float
    witness: tuple[int, ...]
    exact: float | None = None
    exact_witness: tuple[int, ...] | None = None
    lambda2: float | None = None

    def as_dict(self) -> dict:
        return {
            "delta": self.delta,
            "lower": self.lower,
            "upper": self.upper,
            "witness": list(self.witness),
            "witness_size": len(self.witness),
            "exact": self.exact,
            "exact_witness": None if self.exact_witness is None else list(self.exact_witness),
            "lambda2": self.lambda2,
        }


def laplacian(g: Graph) -> sp.csr_matrix:
    adj = sp.coo_matrix((np.ones(2 * g.m), (np.concatenate([g.eu, g.ev]),
                                            np.concatenate([g.ev, g.eu]))),
                        shape=(g.n, g.n)).tocsr()
    return (sp.diags(np.asarray(adj.sum(axis=1)).ravel()) - adj).tocsr()


def fiedler(g: Graph, seed=0) -> tuple[float, np.ndarray]:
    """Second-smallest Laplacian eigenvalue and an eigenvector for it."""
    L = laplacian(g)
    if g.n <= DENSE_SPECTRAL_CAP:
        vals, vecs = np.linalg.eigh(L.toarray())
        return float(vals[1]), vecs[:, 1]
    # smallest eigenpairs of L are the largest of c*I - L
    c = 2.0 * float(g.degrees.max()) + 1.0
    shifted = sp.identity(g.n) * c - L
    v0 = stream(seed, "fiedler").random(g.n)
    vals, vecs = eigsh(shifted, k=2, which="LA", v0=v0, tol=1e-8)
    order = np.argsort(-vals)
    return float(c - vals[order[1]]), vecs[:, order[1]]


def _best_prefix_cut(g: Graph, order: np.ndarray, lo: int, hi: int) -> tuple[float, int]:
    """Best ratio among prefixes of ``order`` with size in [lo, hi]."""
    pos = np.empty(g.n, dtype=np.int64)
    pos[order] = np.arange(g.n)
    pu, pv = pos[g.eu], pos[g.ev]
    a, b = np.minimum(pu, pv), np.maximum(pu, pv)
    # edge crosses prefix of size k iff a < k <= b
    delta = np.zeros(g.n + 1, dtype=np.int64)
    np.add.at(delta, a + 1, 1)
    np.add.at(delta, b + 1, -1)
    crossing = np.cumsum(delta)
    ks = np.arange(lo, hi + 1)
    ratios = crossing[ks] / ks
    i = int(np.argmin(ratios))
    return float(ratios[i]), int(ks[i])


def h_delta_bounds(g: Graph, delta: float, samples: int = 32, seed=0,
                   candidates=None, spectral: bool = True,
                   exact_cap: int = EXACT_CAP) -> ExpansionReport:
    """Spectral lower bound and best-found upper bound for h_delta.

    Upper bound candidates: Fiedler sweep prefixes from both ends, ``samples``
    seeded random sets, and any caller-supplied ``candidates``. The exact value
    is added when ``n <= exact_cap``.
    """
    if samples < 1:
        raise ExpansionError("samples must be >= 1")
    lo, hi = _size_range(g.n, delta)
    if lo > hi:
        exact = math.inf if g.n <= exact_cap else None
        return ExpansionReport(delta, math.inf, math.inf, (), exact,
                               () if exact is not None else None)
    best = math.inf
    witness: tuple[int, ...] = ()

    def consider(A):
        nonlocal best, witness
        A = np.unique(np.asarray(list(A), dtype=np.int64))
        if not lo <= A.size <= hi:
            return
        r = cut_ratio(g, A)
        if r < best:
            best, witness = r, tuple(A.tolist())

    lam2 = None
    lower = 0.0
    if spectral and g.n >= 2:
        lam2, vec = fiedler(g, seed)
        # round down so numerical error never lifts the bound above h
        lower = max(0.0, lam2 / 2.0 * (1.0 - 1e-9) - 1e-12)
        for order in (np.argsort(vec, kind="stable"), np.argsort(-vec, kind="stable")):
            _, k = _best_prefix_cut(g, order, lo, hi)
            consider(order[:k])
    rng = stream(seed, "random_cuts")
    for _ in range(samples):
        k = int(rng.integers(lo, hi + 1))
        consider(rng.choice(g.n, size=k, replace=False))
    for A in candidates or ():
        consider(A)
    report = ExpansionReport(delta, lower, best, witness, lambda2=lam2)
    if g.n <= exact_cap:
        ex = h_delta_exact(g, delta)
        report.exact, report.exact_witness = ex.value, ex.witness
    return report


# ------------------------------------------------------------------ max-flow

@dataclass
class FlowResult:
    cut: int
    paths: int
    path_lengths: list[int]
    short_fraction: float | None = None
    maxlen: int | None = None
    cut_edges: list[int] | None = None

    def as_dict(self) -> dict:
        return {
            "cut": self.cut,
            "paths": self.paths,
            "path_lengths": self.path_lengths,
            "maxlen": self.maxlen,
            "short_fraction": self.short_fraction,
            "cut_edges": self.cut_edges,
        }


def min_edge_cut(g: Graph, A, B, maxlen: int | None = None) -> FlowResult:
    """Unit-capacity max-flow between vertex sets A and B.

    Augments along shortest residual paths; the flow is then decomposed into
    edge-disjoint A-B paths whose lengths are reported.
    """
    A = sorted(set(int(a) for a in A))
    B = sorted(set(int(b) for b in B))
    if not A or not B:
        raise ExpansionError("A and B must be nonempty")
    if set(A) & set(B):
        raise ExpansionError(f"A and B overlap at {sorted(set(A) & set(B))}")
    for v in A + B:
        if not 0 <= v < g.n:
            raise ExpansionError(f"vertex {v} out of range")
    in_a = np.zeros(g.n, dtype=bool)
    in_a[A] = True
    in_b = np.zeros(g.n, dtype=bool)
    in_b[B] = True
    # flow[e] = +1 means one unit from eu[e] to ev[e], -1 the reverse
    flow = np.zeros(g.m, dtype=np.int64)
    eu, ev = g.eu.tolist(), g.ev.tolist()
    adj = [g.adjacency(v) for v in range(g.n)]

    def residual(u, e):
        # capacity left on edge e leaving u
        f = flow[e] if eu[e] == u else -flow[e]
        return 1 - f

    total = 0
    while True:
        prev_edge = [-1] * g.n
        seen = [False] * g.n
        q = deque()
        for a in A:
            seen[a] = True
            q.append(a)
        target = -1
        while q and target < 0:
            u = q.popleft()
            for w, e in adj[u]:
                if not seen[w] and residual(u, e) > 0:
                    seen[w] = True
                    prev_edge[w] = e
                    if in_b[w]:
                        target = w
                        break
                    q.append(w)
        if target < 0:
            break
        v = target
        while not in_a[v]:
            e = prev_edge[v]
            u = eu[e] if ev[e] == v else ev[e]
            flow[e] += 1 if eu[e] == u else -1
            v = u
        total += 1
    cut_edges = [e for e in range(g.m) if seen[eu[e]] != seen[ev[e]]]
    lengths = _decompose(g, flow, A, in_b, adj)
    short = None
    if maxlen is not None:
        short = sum(1 for L in lengths if L <= maxlen) / len(lengths) if lengths else 0.0
    return FlowResult(total, len(lengths), lengths, short, maxlen, cut_edges)


def _decompose(g: Graph, flow: np.ndarray, A, in_b, adj) -> list[int]:
    eu, ev = g.eu.tolist(), g.ev.tolist()
    out = [[] for _ in range(g.n)]
    for e in range(g.m):
        if flow[e] > 0:
            out[eu[e]].append(ev[e])
        elif flow[e] < 0:
            out[ev[e]].append(eu[e])
    lengths = []
    for a in A:
        while out[a]:
            # follow flow from a until B, erasing cycles on the way
            walk = [a]
            where = {a: 0}
            v = a
            while not in_b[v]:
                w = out[v].pop()
                if w in where:
                    for x in walk[where[w] + 1:]:
                        del where[x]
                    walk = walk[: where[w] + 1]
                else:
                    where[w] = len(walk)
                    walk.append(w)
                v = w
            lengths.append(len(walk) - 1)
    return sorted(lengths)
