"""Top eigenvalue of the nonbacktracking (Hashimoto) operator."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .graph import Graph
from .rng import stream


class NBOperator:
    """Matrix-free nonbacktracking operator on the 2m directed edges.

    Directed edge ``2e`` is ``eu[e] -> ev[e]`` and ``2e+1`` its reversal. Only
    the exact reversal is excluded, so parallel edges feed each other.
    """

    def __init__(self, g: Graph):
        self.g = g
        self.tail = np.empty(2 * g.m, dtype=np.int64)
        self.head = np.empty(2 * g.m, dtype=np.int64)
        self.tail[0::2], self.head[0::2] = g.eu, g.ev
        self.tail[1::2], self.head[1::2] = g.ev, g.eu

    @property
    def dim(self) -> int:
        return self.tail.shape[0]

    def out_degree(self) -> np.ndarray:
        return self.g.degrees[self.head] - 1

    def __matmul__(self, x: np.ndarray) -> np.ndarray:
        return kernels.nb_apply(np.ascontiguousarray(x, dtype=float), self.tail, self.head, self.g.n)

    def dense(self) -> np.ndarray:
        B = np.zeros((self.dim, self.dim))
        for a in range(self.dim):
            for b in range(self.dim):
                if self.tail[b] == self.head[a] and b != (a ^ 1):
                    B[a, b] = 1.0
        return B


def two_core(g: Graph) -> np.ndarray:
    """Boolean mask of the 2-core (multi-edges count toward degree)."""
    deg = g.degrees.copy()
    alive = np.ones(g.n, dtype=bool)
    stack = list(np.flatnonzero(deg < 2))
    alive[stack] = False
    while stack:
        v = stack.pop()
        for w in g.neighbors(v).tolist():
            if alive[w]:
                deg[w] -= 1
                if deg[w] < 2:
                    alive[w] = False
                    stack.append(w)
    return alive


@dataclass(frozen=True)
class NBEigen:
    value: float
    residual: float
    iterations: int
    converged: bool
    nilpotent: bool = False

    def as_dict(self) -> dict:
        return {"lambda": self.value, "residual": self.residual, "iterations": self.iterations,
                "converged": self.converged, "nilpotent": self.nilpotent}


def nb_top_eigenvalue(g: Graph, tol: float = 1e-10, max_iters: int = 100_000, seed=0) -> NBEigen:
    """Perron root of the nonbacktracking operator by power iteration.

    Iterates B + B^2 rather than B: the Perron root then strictly dominates
    every other eigenvalue in modulus even for periodic (e.g. bipartite or
    cycle) spectra. Returns the Rayleigh estimate of B itself with relative
    residual ``|Bx - lambda x| / |x|``.
    """
    if not two_core(g).any():
        return NBEigen(0.0, 0.0, 0, True, nilpotent=True)
    B = NBOperator(g)
    x = stream(seed, "nb_start").random(B.dim) + 0.5
    x /= np.linalg.norm(x)
    best = None
    for it in range(1, max_iters + 1):
        bx = B @ x
        lam = float(np.dot(x, bx))
        res = float(np.linalg.norm(bx - lam * x))
        if best is None or res < best.residual:
            best = NBEigen(lam, res, it, False)
        if res <= tol:
            return NBEigen(lam, res, it, True)
        y = bx + B @ bx
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return NBEigen(0.0, 0.0, it, True, nilpotent=True)
        x = y / norm
    return best


@dataclass(frozen=True)
class NBThreshold:
    estimate: float
    lower: float
    upper: float
    eigen: NBEigen

    def as_dict(self) -> dict:
        d = self.eigen.as_dict()
        d.update(threshold_estimate=self.estimate, threshold_lower=self.lower,
                 threshold_upper=self.upper)
        return d


def nb_threshold(g: Graph, tol: float = 1e-10, seed=0) -> NBThreshold:
    """Reciprocal of the nonbacktracking top eigenvalue, with the residual as an interval."""
    eig = nb_top_eigenvalue(g, tol=tol, seed=seed)
    if eig.value <= 0.0:
        raise ValueError("nonbacktracking operator is nilpotent (graph has no cycle)")
    lam, r = eig.value, eig.residual
    upper = 1.0 / (lam - r) if lam > r else np.inf
    return NBThreshold(1.0 / lam, 1.0 / (lam + r), upper, eig)
