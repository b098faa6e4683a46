"""Bernoulli bond percolation: per-p samples, Newman-Ziff sweeps, sprinkling."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from . import kernels
from .graph import Graph, components
from .rng import stream

BINOMIAL_WINDOW_SIGMAS = 6.0


def _check_prob(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {p}")
    return p


@dataclass
class PercolationConfig:
    """Open-edge mask for one percolation draw.

    Sprinkled configurations also carry their two layers.
    """

    graph: Graph = field(repr=False)
    mask: np.ndarray
    p: float
    seed: object = None
    layer1: np.ndarray | None = field(default=None, repr=False)
    layer_eps: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.mask.shape != (self.graph.m,):
            raise ValueError(f"mask length {self.mask.shape[0]} != edge count {self.graph.m}")

    @property
    def open_edges(self) -> int:
        return int(self.mask.sum())

    def largest(self) -> int:
        return components(self.graph, self.mask).largest


def edge_uniforms(g: Graph, seed) -> np.ndarray:
    return stream(seed, "edge_uniforms").random(g.m)


def sample_config(g: Graph, p: float, seed) -> PercolationConfig:
    p = _check_prob("p", p)
    return PercolationConfig(g, edge_uniforms(g, seed) < p, p, seed)


def coupled_masks(g: Graph, ps, seed) -> np.ndarray:
    """Masks for every p in ``ps`` from one uniform per edge, so they are nested."""
    u = edge_uniforms(g, seed)
    ps = np.asarray([_check_prob("p", p) for p in ps])
    return u[None, :] < ps[:, None]


def sprinkle_union(g: Graph, p1: float, eps: float, seed) -> PercolationConfig:
    """Union of independent p1- and eps-percolations; effective p = 1-(1-p1)(1-eps)."""
    p1 = _check_prob("p1", p1)
    eps = _check_prob("eps", eps)
    first = stream(seed, "sprinkle_first").random(g.m) < p1
    extra = stream(seed, "sprinkle_eps").random(g.m) < eps
    p = 1.0 - (1.0 - p1) * (1.0 - eps)
    return PercolationConfig(g, first | extra, p, seed, layer1=first, layer_eps=extra)


# ------------------------------------------------------------------- sweeps

@dataclass
class PercolationSweep:
    """Edge insertion order and the largest cluster size after each insertion."""

    order: np.ndarray = field(repr=False)
    trajectory: np.ndarray = field(repr=False)
    n: int
    fingerprint: str

    def sizes(self) -> np.ndarray:
        """Largest cluster size with k edges present, k = 0..m."""
        return np.concatenate([[min(self.n, 1)], self.trajectory])


def sweep(g: Graph, seed) -> PercolationSweep:
    order = stream(seed, "sweep").permutation(g.m)
    traj = kernels.sweep_trajectory(g.n, g.eu, g.ev, order)
    return PercolationSweep(order, traj, g.n, g.fingerprint)


def sweeps(g: Graph, trials: int, seed) -> list[PercolationSweep]:
    return [sweep(g, stream(seed, "sweep_trial", t)) for t in range(trials)]


def binomial_weights(m: int, p: float, window: float = BINOMIAL_WINDOW_SIGMAS):
    """Binomial(m, p) weights on a +-(window*sigma + window) range around m*p.

    Returns ``(lo, w)`` with ``w[i]`` the normalized weight of ``k = lo + i``.
    Weights are computed in log space.
    """
    if p <= 0.0 or m == 0:
        return 0, np.ones(1)
    if p >= 1.0:
        return m, np.ones(1)
    mu = m * p
    sigma = np.sqrt(m * p * (1 - p))
    # the extra `window` counts keep skewed tails covered when sigma is tiny
    half = window * sigma + window
    lo = max(0, int(np.floor(mu - half)))
    hi = min(m, int(np.ceil(mu + half)))
    k = np.arange(lo, hi + 1)
    logw = (gammaln(m + 1) - gammaln(k + 1) - gammaln(m - k + 1)
            + k * np.log(p) + (m - k) * np.log1p(-p))
    w = np.exp(logw - logw.max())
    return lo, w / w.sum()


@dataclass
class SmoothedCurve:
    p: np.ndarray
    mean_fraction: np.ndarray
    prob_exceeds: np.ndarray
    stderr: np.ndarray
    trials: int
    alpha: float


class SweepAccumulator:
    """Streams sweeps of one graph into per-p averages without keeping them all."""

    def __init__(self, n: int, m: int, fingerprint: str, alpha: float = 0.05):
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
        self.n = n
        self.m = m
        self.fingerprint = fingerprint
        self.alpha = alpha
        self.total = np.zeros(self.m + 1)
        self.first_exceed: list[int] = []

    @classmethod
    def for_graph(cls, g: Graph, alpha: float = 0.05) -> "SweepAccumulator":
        return cls(g.n, g.m, g.fingerprint, alpha)

    def add(self, s: PercolationSweep) -> None:
        if s.fingerprint != self.fingerprint:
            raise ValueError("sweeps come from different graphs")
        sizes = s.sizes()
        self.total += sizes
        # sizes is nondecreasing, so "largest >= alpha*n" holds for k >= k*
        hit = np.flatnonzero(sizes >= self.alpha * self.n)
        self.first_exceed.append(int(hit[0]) if hit.size else self.m + 1)

    @property
    def trials(self) -> int:
        return len(self.first_exceed)

    def curve(self, p_grid) -> SmoothedCurve:
        if self.trials == 0:
            raise ValueError("no sweeps accumulated")
        p_grid = np.asarray([_check_prob("p", p) for p in p_grid])
        mean_sizes = self.total / self.trials
        kstar = np.asarray(self.first_exceed)
        mean_frac = np.empty(p_grid.size)
        prob = np.empty(p_grid.size)
        err = np.empty(p_grid.size)
        for i, p in enumerate(p_grid):
            lo, w = binomial_weights(self.m, p)
            mean_frac[i] = np.dot(w, mean_sizes[lo:lo + w.size]) / self.n
            # per-sweep P(Binom >= k*) inside the window
            cum = np.minimum(np.concatenate([np.cumsum(w[::-1])[::-1], [0.0]]), 1.0)
            idx = np.clip(kstar - lo, 0, w.size)
            per = cum[idx]
            prob[i] = per.mean()
            err[i] = per.std(ddof=1) / np.sqrt(per.size) if per.size > 1 else 0.0
        return SmoothedCurve(p_grid, mean_frac, prob, err, self.trials, self.alpha)


def canonical_curve(sweep_list, p_grid, alpha: float = 0.05) -> SmoothedCurve:
    """Binomially smoothed largest-cluster fraction (and exceedance) per p."""
    sweep_list = list(sweep_list)
    if not sweep_list:
        raise ValueError("no sweeps given")
    first = sweep_list[0]
    acc = SweepAccumulator(first.n, first.order.shape[0], first.fingerprint, alpha)
    for s in sweep_list:
        acc.add(s)
    return acc.curve(p_grid)


def monte_carlo_curve(g: Graph, p_grid, trials: int, seed, alpha: float = 0.05) -> SmoothedCurve:
    """Direct per-p estimate; each trial draws one coupled set of masks."""
    p_grid = np.asarray(p_grid, dtype=float)
    largest = np.zeros((trials, p_grid.size))
    for t in range(trials):
        masks = coupled_masks(g, p_grid, stream(seed, "mc_trial", t))
        for i in range(p_grid.size):
            largest[t, i] = components(g, masks[i]).largest
    frac = largest / g.n
    exceed = largest >= alpha * g.n
    err = exceed.std(axis=0, ddof=1) / np.sqrt(trials) if trials > 1 else np.zeros(p_grid.size)
    return SmoothedCurve(p_grid, frac.mean(axis=0), exceed.mean(axis=0), err, trials, alpha)


# ------------------------------------------------------------- reach counts

def reach_flags(g: Graph, config: PercolationConfig, R: int) -> np.ndarray:
    """Vertices whose open cluster inside B_R(v) touches the sphere at distance R."""
    if R < 1:
        raise ValueError(f"radius must be >= 1, got {R}")
    return kernels.reach_flags(g.indptr, g.nbr, g.eid, g.n, g.eu, g.ev, config.mask, R)


def reach_count(g: Graph, config: PercolationConfig, R: int) -> int:
    return int(reach_flags(g, config, R).sum())
