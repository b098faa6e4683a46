"""Critical probabilities and survival functions of tree limit models."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pruning import DegreeDistribution
from .rng import stream

MAX_ITERATIONS = 10_000_000
# generation sizes are clipped here to stay inside int64; a clipped
# supercritical population dies out with probability below q**1e15
POPULATION_CAP = 10**15


@dataclass(frozen=True)
class LimitModel:
    """``regular_tree`` (every vertex has degree d) or ``galton_watson``.

    In the Galton-Watson model the root has the same offspring law as
    everybody else.
    """

    kind: str
    d: int | None = None
    offspring: DegreeDistribution | None = None

    @classmethod
    def regular_tree(cls, d: int) -> "LimitModel":
        if d < 1:
            raise ValueError(f"d must be >= 1, got {d}")
        return cls("regular_tree", d=d)

    @classmethod
    def galton_watson(cls, offspring: DegreeDistribution) -> "LimitModel":
        return cls("galton_watson", offspring=offspring)

    def branching_number(self) -> float:
        if self.kind == "regular_tree":
            return float(self.d - 1)
        return self.offspring.mean

    def child_offspring(self) -> DegreeDistribution:
        """Offspring law of every non-root vertex."""
        if self.kind == "regular_tree":
            return DegreeDistribution.constant(self.d - 1)
        return self.offspring

    def root_offspring(self) -> DegreeDistribution:
        if self.kind == "regular_tree":
            return DegreeDistribution.constant(self.d)
        return self.offspring

    @classmethod
    def parse(cls, text: str, offspring: DegreeDistribution | None = None) -> "LimitModel":
        """``regular:D`` or ``gw`` (needs ``offspring``)."""
        if text.startswith("regular:"):
            return cls.regular_tree(int(text.split(":", 1)[1]))
        if text == "gw":
            if offspring is None:
                raise ValueError("model 'gw' needs an offspring distribution")
            return cls.galton_watson(offspring)
        raise ValueError(f"unknown model {text!r}; use regular:D or gw")


@dataclass(frozen=True)
class CriticalValue:
    pc: float
    branching_number: float
    subcritical: bool


def pc(model: LimitModel) -> CriticalValue:
    """1/branching number; models with branching number <= 1 report 1 and a flag."""
    br = model.branching_number()
    if br <= 1.0:
        return CriticalValue(1.0, br, True)
    return CriticalValue(1.0 / br, br, False)


@dataclass(frozen=True)
class Survival:
    survival: float
    extinction: float
    iterations: int
    converged: bool
    gap: float
    method: str


def _certain_extinction(offspring: DegreeDistribution, p: float) -> bool:
    # thinned offspring mean <= 1 kills the process unless it is identically 1
    if p * offspring.mean > 1.0:
        return False
    return not (p == 1.0 and offspring(1) == 1.0 and offspring(2) == 0.0)


def survival(offspring: DegreeDistribution, p: float, tol: float = 1e-12,
             max_iter: int = MAX_ITERATIONS) -> Survival:
    """Probability that the p-thinned branching process survives forever.

    The extinction probability is the least fixed point of q = f(1 - p + p q),
    reached by iterating from q = 0. With thinned mean at most 1 extinction
    is certain and returned without iteration.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if _certain_extinction(offspring, p):
        return Survival(0.0, 1.0, 0, True, 0.0, "mean<=1")
    pmf = offspring.pmf
    q = 0.0
    gap = np.inf
    for it in range(1, max_iter + 1):
        nxt = float(np.polynomial.polynomial.polyval(1.0 - p + p * q, pmf))
        if nxt < q - 1e-15 or nxt > 1.0 + 1e-15:
            raise ArithmeticError(f"fixed-point iteration left [q, 1] at step {it}")
        gap = abs(nxt - q)
        q = nxt
        if gap < tol:
            return Survival(1.0 - q, q, it, True, gap, "iteration")
    return Survival(1.0 - q, q, max_iter, False, gap, "iteration")


def model_survival(model: LimitModel, p: float, tol: float = 1e-12) -> float:
    """Root survival in the limit tree (root degree may differ from children)."""
    child = survival(model.child_offspring(), p, tol)
    return 1.0 - float(model.root_offspring().pgf(1.0 - p + p * child.extinction))


@dataclass(frozen=True)
class DepthReach:
    radius: np.ndarray     # 1..R
    probability: np.ndarray
    stderr: np.ndarray
    trials: int


def f_R_profile(model: LimitModel, p: float, R: int, trials: int, seed) -> DepthReach:
    """Monte Carlo P(root reaches depth r) for r = 1..R from one set of samples.

    Every trial tracks the open generation sizes down to depth R, so the
    estimates are exactly nonincreasing in r.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = stream(seed, "f_R")
    alive = np.ones(trials, dtype=np.int64)
    hits = np.zeros(R)
    for depth in range(R):
        law = model.root_offspring() if depth == 0 else model.child_offspring()
        pmf = law.pmf
        if law.max_value == 0:
            kids = np.zeros(trials, dtype=np.int64)
        elif law.pmf[-1] == 1.0:
            kids = alive * law.max_value
        else:
            # total offspring of `alive` iid parents
            counts = rng.multinomial(alive, pmf)
            kids = counts @ np.arange(pmf.size)
        alive = np.minimum(rng.binomial(kids, p), POPULATION_CAP)
        hits[depth] = np.count_nonzero(alive)
    prob = hits / trials
    err = np.sqrt(prob * (1 - prob) / trials)
    return DepthReach(np.arange(1, R + 1), prob, err, trials)


def f_R(model: LimitModel, p: float, R: int, trials: int, seed) -> float:
    return float(f_R_profile(model, p, R, trials, seed).probability[-1])
