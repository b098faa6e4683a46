"""Degree tails, the degree-cutoff rule and high-degree pruning."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .graph import Graph


class DegreeDistribution:
    """Integer law given by its tail ``P(D >= l)`` for ``l = 1..len(tail)``.

    Beyond the stored support the tail is zero.
    """

    def __init__(self, tail):
        tail = np.asarray(tail, dtype=float).ravel()
        if tail.size and (tail < 0).any():
            raise ValueError("tail probabilities must be non-negative")
        if tail.size and tail[0] > 1 + 1e-12:
            raise ValueError(f"tail(1) = {tail[0]} exceeds 1")
        if tail.size > 1 and (np.diff(tail) > 1e-15).any():
            raise ValueError("tail must be nonincreasing")
        # trim trailing zeros so the support is tight
        nz = np.flatnonzero(tail > 0)
        self.tail = tail[: nz[-1] + 1] if nz.size else tail[:0]
        self.tail.setflags(write=False)

    def __call__(self, ell: int) -> float:
        if ell <= 0:
            return 1.0
        return float(self.tail[ell - 1]) if ell <= self.tail.size else 0.0

    @property
    def max_value(self) -> int:
        return int(self.tail.size)

    @property
    def mean(self) -> float:
        return float(self.tail.sum())

    @property
    def pmf(self) -> np.ndarray:
        """P(D = k) for k = 0..max_value."""
        t = np.concatenate([[1.0], self.tail, [0.0]])
        p = t[:-1] - t[1:]
        return np.clip(p, 0.0, None)

    def pgf(self, s):
        """Generating function E[s^D]."""
        return np.polynomial.polynomial.polyval(s, self.pmf)

    @classmethod
    def from_pmf(cls, pmf) -> "DegreeDistribution":
        pmf = np.asarray(pmf, dtype=float)
        if pmf.size == 0 or not math.isclose(pmf.sum(), 1.0, abs_tol=1e-9):
            raise ValueError("pmf must sum to 1")
        tail = np.cumsum(pmf[::-1])[::-1][1:]
        return cls(np.minimum(tail, 1.0))

    @classmethod
    def constant(cls, k: int) -> "DegreeDistribution":
        return cls(np.ones(int(k)))

    @classmethod
    def poisson(cls, mean: float, cutoff: float = 1e-12) -> "DegreeDistribution":
        """Poisson law truncated where the remaining mass drops below ``cutoff``."""
        if mean <= 0:
            return cls([])
        kmax = int(mean + 10 * math.sqrt(mean + 1) + 10)
        k = np.arange(kmax + 1)
        pmf = np.exp(k * math.log(mean) - mean - np.array([math.lgamma(i + 1) for i in k]))
        keep = np.flatnonzero(np.cumsum(pmf[::-1])[::-1] > cutoff)
        pmf = pmf[: keep[-1] + 1]
        return cls.from_pmf(pmf / pmf.sum())

    @classmethod
    def from_samples(cls, values) -> "DegreeDistribution":
        values = np.asarray(values, dtype=np.int64)
        if values.size == 0:
            return cls([])
        counts = np.bincount(values)
        tail = np.cumsum(counts[::-1])[::-1][1:] / values.size
        return cls(tail)

    def __eq__(self, other):
        return isinstance(other, DegreeDistribution) and np.array_equal(self.tail, other.tail)

    def __repr__(self) -> str:
        return f"DegreeDistribution(max={self.max_value}, mean={self.mean:.6g})"


def read_tail_file(path) -> DegreeDistribution:
    """Lines ``l p`` giving P(D >= l); l must run 1, 2, 3, ... without gaps."""
    tail = []
    for ln in Path(path).read_text().splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        ell, p = ln.split()
        if int(ell) != len(tail) + 1:
            raise ValueError(f"tail file: expected l = {len(tail) + 1}, got {ell}")
        tail.append(float(p))
    return DegreeDistribution(tail)


def format_tail(dist: DegreeDistribution) -> str:
    return "".join(f"{i + 1} {p!r}\n" for i, p in enumerate(dist.tail.tolist()))


def empirical_degree_distribution(g: Graph) -> DegreeDistribution:
    return DegreeDistribution.from_samples(g.degrees)


def choose_cutoff(emp: DegreeDistribution, limit: DegreeDistribution, eps: float, n: int) -> int:
    """Smallest l with emp.tail(l) > limit.tail(l) + eps/2^l, or n if there is none."""
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    for ell in range(1, emp.max_value + 1):
        if emp(ell) > limit(ell) + eps / 2.0 ** ell:
            return ell
    return int(n)


def truncated_mean(dist: DegreeDistribution, k: int) -> float:
    """E(D; D < k)."""
    pmf = dist.pmf[: max(0, k)]
    return float(np.dot(np.arange(pmf.size), pmf))


def prune(g: Graph, k: int) -> Graph:
    """Drop every edge touching a vertex of degree >= k."""
    if k < 1:
        raise ValueError(f"cutoff must be >= 1, got {k}")
    low = g.degrees < k
    keep = low[g.eu] & low[g.ev]
    return g.edge_subgraph(keep)


@dataclass
class PruneReport:
    cutoff: int
    graph: Graph = field(repr=False)
    avg_degree_before: float
    avg_degree_after: float
    low_degree_mass: float  # (1/n) * sum of deg(v) over deg(v) < k
    limit_mean: float
    eps: float
    removed_edges: int
    touched_fraction: float
    tv_distance: float | None
    radius: int
    heuristic_limit: bool

    def as_dict(self) -> dict:
        return {
            "cutoff": self.cutoff,
            "avg_degree_before": self.avg_degree_before,
            "avg_degree_after": self.avg_degree_after,
            "low_degree_mass": self.low_degree_mass,
            "limit_mean": self.limit_mean,
            "eps": self.eps,
            "bound": self.limit_mean + self.eps,
            "removed_edges": self.removed_edges,
            "touched_fraction": self.touched_fraction,
            "tv_distance": self.tv_distance,
            "radius": self.radius,
            "heuristic_limit": self.heuristic_limit,
            "n": self.graph.n,
            "m_after": self.graph.m,
        }


def prune_report(g: Graph, limit: DegreeDistribution | None, eps: float,
                 radius: int | None = 2) -> PruneReport:
    """Choose the cutoff, prune, and measure what pruning changed.

    With no ``limit`` the graph's own degree tail is used as reference and
    the report is flagged as heuristic. ``radius=None`` skips the ball-law
    total-variation distance.
    """
    from .lwc import ball_distribution, tv_distance

    emp = empirical_degree_distribution(g)
    heuristic = limit is None
    ref = emp if heuristic else limit
    k = choose_cutoff(emp, ref, eps, g.n)
    pruned = prune(g, k)
    n = max(g.n, 1)
    deg = g.degrees
    touched = np.zeros(g.n, dtype=bool)
    removed = ~((deg[g.eu] < k) & (deg[g.ev] < k))
    touched[g.eu[removed]] = True
    touched[g.ev[removed]] = True
    tv = None
    if radius is not None and g.n:
        if removed.any():
            tv = tv_distance(ball_distribution(g, radius), ball_distribution(pruned, radius))
        else:
            tv = 0.0
    return PruneReport(
        cutoff=k,
        graph=pruned,
        avg_degree_before=2 * g.m / n,
        avg_degree_after=2 * pruned.m / n,
        low_degree_mass=float(deg[deg < k].sum()) / n,
        limit_mean=ref.mean,
        eps=eps,
        removed_edges=int(removed.sum()),
        touched_fraction=float(touched.sum()) / n,
        tv_distance=tv,
        radius=radius if radius is not None else 0,
        heuristic_limit=heuristic,
    )
