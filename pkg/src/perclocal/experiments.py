"""Threshold-curve experiments and the two reproduction recipes."""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import generators
from .expansion import cut_ratio
from .generators import GadgetSpec, d_regular_tree, gadget_sequence, random_regular
from .graph import Graph, ball, components
from .limits import LimitModel, pc
from .lwc import ball_distribution, point_mass, tv_distance
from .percolation import (PercolationConfig, SweepAccumulator, reach_count, sprinkle_union,
                          sweep)
from .pruning import DegreeDistribution, empirical_degree_distribution, choose_cutoff, prune
from .rng import stream
from .spectral import nb_top_eigenvalue

CROSSING_LEVEL = 0.5


class ConfigError(ValueError):
    pass


def p_grid(start: float, stop: float, step: float) -> np.ndarray:
    if step <= 0:
        raise ConfigError(f"grid step must be positive, got {step}")
    if not 0.0 <= start <= stop <= 1.0:
        raise ConfigError(f"grid [{start}, {stop}] must lie inside [0, 1]")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 12)


def parse_grid(text: str) -> np.ndarray:
    """``A:B:STEP`` -> grid points."""
    try:
        a, b, s = (float(x) for x in text.split(":"))
    except ValueError:
        raise ConfigError(f"bad grid {text!r}; expected START:STOP:STEP") from None
    return p_grid(a, b, s)


def isotonic(y, w=None) -> np.ndarray:
    """Nondecreasing least-squares fit (pool adjacent violators)."""
    y = np.asarray(y, dtype=float)
    w = np.ones_like(y) if w is None else np.asarray(w, dtype=float)
    vals: list[float] = []
    wts: list[float] = []
    lens: list[int] = []
    for yi, wi in zip(y, w):
        vals.append(yi)
        wts.append(wi)
        lens.append(1)
        while len(vals) > 1 and vals[-2] > vals[-1]:
            tw = wts[-2] + wts[-1]
            vals[-2] = (vals[-2] * wts[-2] + vals[-1] * wts[-1]) / tw
            wts[-2] = tw
            lens[-2] += lens[-1]
            vals.pop(), wts.pop(), lens.pop()
    return np.repeat(vals, lens)


def crossing(p: np.ndarray, y: np.ndarray, level: float = CROSSING_LEVEL):
    """First point where a nondecreasing curve reaches ``level``, linearly interpolated.

    Returns ``(value, flag)`` with flag ``ok``, ``no_crossing`` (never reaches
    the level) or ``starts_above`` (already at the level at the grid start).
    """
    hit = np.flatnonzero(y >= level)
    if hit.size == 0:
        return None, "no_crossing"
    i = int(hit[0])
    if i == 0:
        return None, "starts_above"
    p0, p1, y0, y1 = p[i - 1], p[i], y[i - 1], y[i]
    return float(p0 + (level - y0) / (y1 - y0) * (p1 - p0)), "ok"


@dataclass
class ExperimentConfig:
    family: str
    params: dict
    size_param: str
    sizes: list
    grid: tuple = (0.0, 1.0, 0.005)
    alpha: float = 0.05
    trials: int = 100
    seed: int = 0
    prune_eps: float | None = None
    limit: str | None = None

    def validate(self) -> None:
        if self.family not in generators.FAMILIES:
            raise ConfigError(f"unknown family {self.family!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.sizes or any(b <= a for a, b in zip(self.sizes, self.sizes[1:])):
            raise ConfigError(f"sizes must be nonempty and strictly increasing: {self.sizes}")
        if len(self.grid) != 3:
            raise ConfigError("grid must be (start, stop, step)")
        p_grid(*self.grid)
        if self.prune_eps is not None and self.prune_eps <= 0:
            raise ConfigError("prune_eps must be positive")
        if self.family == "galton_watson":
            # truncation depth has to cover the largest radius queried later
            if self.params.get("depth", 0) < 1:
                raise ConfigError("galton_watson needs depth >= 1")

    @property
    def points(self) -> np.ndarray:
        return p_grid(*self.grid)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        if "grid" in data:
            data["grid"] = tuple(data["grid"])
        try:
            cfg = cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        return cls.from_dict(json.loads(text))


@dataclass
class ThresholdCurve:
    n: int
    size: int
    p: np.ndarray
    mean_fraction: np.ndarray
    prob_raw: np.ndarray
    prob_isotonic: np.ndarray
    stderr: np.ndarray
    trials: int
    alpha: float
    pc_hat: float | None
    flag: str
    extra: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {"n": self.n, "size": self.size, "pc_hat": self.pc_hat, "flag": self.flag,
                "trials": self.trials, "alpha": self.alpha, **self.extra}


def threshold_curve(g: Graph, grid, alpha: float, trials: int, seed, size: int | None = None,
                    label: str = "sweep") -> ThresholdCurve:
    acc = SweepAccumulator.for_graph(g, alpha)
    for t in range(trials):
        acc.add(sweep(g, stream(seed, label, t)))
    sm = acc.curve(grid)
    iso = isotonic(sm.prob_exceeds)
    value, flag = crossing(sm.p, iso)
    return ThresholdCurve(g.n, g.n if size is None else size, sm.p, sm.mean_fraction,
                          sm.prob_exceeds, iso, sm.stderr, trials, alpha, value, flag)


def _graph_seed(master: int, idx: int) -> int:
    return int(stream(master, "graph", idx).integers(0, 2**62))


def _limit_law(spec: str | None) -> DegreeDistribution | None:
    if spec is None:
        return None
    return LimitModel.parse(spec).root_offspring()


def run_threshold(config: ExperimentConfig) -> list[ThresholdCurve]:
    config.validate()
    curves = []
    for idx, size in enumerate(config.sizes):
        params = dict(config.params)
        params[config.size_param] = size
        if "seed" in generators.FAMILIES[config.family][1]:
            params["seed"] = _graph_seed(config.seed, idx)
        g = generators.build(config.family, params)
        extra = {}
        if config.prune_eps is not None:
            emp = empirical_degree_distribution(g)
            ref = _limit_law(config.limit)
            k = choose_cutoff(emp, ref if ref is not None else emp, config.prune_eps, g.n)
            g = prune(g, k)
            extra = {"cutoff": k, "heuristic_limit": ref is None}
        curve = threshold_curve(g, config.points, config.alpha, config.trials,
                                stream(config.seed, "sweeps", idx), size=size)
        curve.extra.update(extra)
        curves.append(curve)
    return curves


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def curves_to_csv(curves: list[ThresholdCurve]) -> str:
    out = io.StringIO()
    for c in curves:
        out.write(f"# n={c.n} size={c.size} pc_hat={_fmt(c.pc_hat)} flag={c.flag}\n")
    out.write("n,p,mean_fraction,prob_exceeds_alpha,prob_isotonic,stderr,trials\n")
    for c in curves:
        for i in range(c.p.size):
            out.write(",".join([str(c.n), _fmt(c.p[i]), _fmt(c.mean_fraction[i]),
                                _fmt(c.prob_raw[i]), _fmt(c.prob_isotonic[i]),
                                _fmt(c.stderr[i]), str(c.trials)]) + "\n")
    return out.getvalue()


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return obj if math.isfinite(obj) else str(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2) + "\n"


# ------------------------------------------------------------- reproductions

def reproduce_regular(d: int, sizes, seed: int, trials: int = 200,
                      grid=(0.0, 1.0, 0.005), alpha: float = 0.05,
                      nb: bool = True) -> tuple[dict, list[ThresholdCurve]]:
    """Threshold curves of random d-regular graphs against the tree value 1/(d-1)."""
    if d < 3:
        raise ConfigError(f"d must be >= 3, got {d}")
    limit = pc(LimitModel.regular_tree(d)).pc
    rows = []
    curves = []
    for idx, n in enumerate(sizes):
        g = random_regular(n, d, _graph_seed(seed, idx))
        c = threshold_curve(g, p_grid(*grid), alpha, trials, stream(seed, "sweeps", idx))
        curves.append(c)
        row = c.summary()
        row["drift"] = None if c.pc_hat is None else abs(c.pc_hat - limit)
        if nb:
            eig = nb_top_eigenvalue(g, tol=1e-10, seed=stream(seed, "nb", idx))
            row["nb_lambda"] = eig.value
            row["nb_threshold"] = 1.0 / eig.value if eig.value > 0 else None
        rows.append(row)
    last = rows[-1]
    return {
        "experiment": "reproduce_regular",
        "d": d,
        "limit_pc": limit,
        "alpha": alpha,
        "trials": trials,
        "grid": list(grid),
        "seed": seed,
        "curves": rows,
        "gap_at_largest": last["drift"],
    }, curves


def reproduce_counterexample(d: int, m_schedule, n_copies_schedule, seed: int,
                             trials: int = 20, grid=(0.0, 1.0, 0.005), alpha: float = 0.05,
                             delta: float = 0.25, radius: int = 2, ball_samples: int | None = 10_000,
                             margin: float = 0.05,
                             nb_iters: int = 100) -> tuple[dict, list[ThresholdCurve]]:
    """Gadget sequence: thresholds stay far above the tree value 1/(2d-1)."""
    m_schedule = list(m_schedule)
    if isinstance(n_copies_schedule, int):
        n_copies_schedule = [n_copies_schedule] * len(m_schedule)
    n_copies_schedule = list(n_copies_schedule)
    if len(n_copies_schedule) != len(m_schedule):
        raise ConfigError("m and n_copies schedules differ in length")
    tree_pc = pc(LimitModel.regular_tree(2 * d)).pc
    tree_ball = ball(d_regular_tree(2 * d, radius), 0, radius)
    target = point_mass(tree_ball)
    rows = []
    curves = []
    for idx, (m, k) in enumerate(zip(m_schedule, n_copies_schedule)):
        spec = GadgetSpec(d, m, k, _graph_seed(seed, idx))
        g = gadget_sequence(spec)
        c = threshold_curve(g, p_grid(*grid), alpha, trials, stream(seed, "sweeps", idx), size=m)
        curves.append(c)
        blocks = max(1, min(k // 2, math.ceil(delta * k)))
        A = np.arange(blocks * m)
        h_upper = cut_ratio(g, A)
        bd = ball_distribution(g, radius, sample=ball_samples, seed=stream(seed, "balls", idx))
        tv = tv_distance(bd, target)
        eig = nb_top_eigenvalue(g, tol=1e-10, max_iters=nb_iters, seed=stream(seed, "nb", idx))
        row = c.summary()
        row.update({
            "m": m,
            "n_copies": k,
            "gap": None if c.pc_hat is None else c.pc_hat - tree_pc,
            "meets_margin": (c.pc_hat is None and c.flag == "no_crossing")
                            or (c.pc_hat is not None and c.pc_hat >= tree_pc + margin),
            "h_upper_block_cut": h_upper,
            "h_bound_d_over_m": d / m,
            "block_copies": blocks,
            "tv_to_tree": tv,
            "ball_roots": bd.roots,
            "ball_sampled": bd.sampled,
            "nb_lambda": eig.value,
            "nb_residual": eig.residual,
            "nb_threshold": 1.0 / eig.value if eig.value > 0 else None,
        })
        rows.append(row)
    tvs = [r["tv_to_tree"] for r in rows]
    return {
        "experiment": "reproduce_counterexample",
        "d": d,
        "tree_pc": tree_pc,
        "margin": margin,
        "alpha": alpha,
        "delta": delta,
        "radius": radius,
        "trials": trials,
        "grid": list(grid),
        "seed": seed,
        "curves": rows,
        "all_meet_margin": all(r["meets_margin"] for r in rows),
        "tv_decreasing": all(b < a for a, b in zip(tvs, tvs[1:])),
    }, curves


def sprinkling_experiment(g: Graph, p1: float, eps: float, R: int, delta: float,
                          trials: int, seed) -> dict:
    """Finite-n version of the sprinkling step.

    Estimates P(X(R) > delta n) under the p1-layer and
    P(largest >= delta n / 3 | X(R) > delta n) under the union of both layers.
    """
    if not 0.0 < delta < 1.0:
        raise ConfigError("delta must lie in (0, 1)")
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    events = 0
    joined = 0
    xs = []
    for t in range(trials):
        cfg = sprinkle_union(g, p1, eps, stream(seed, "sprinkle", t))
        first = PercolationConfig(g, cfg.layer1, p1)
        x = reach_count(g, first, R)
        xs.append(x)
        if x > delta * g.n:
            events += 1
            if components(g, cfg.mask).largest >= delta * g.n / 3:
                joined += 1
    return {
        "experiment": "sprinkling",
        "n": g.n,
        "p1": p1,
        "eps": eps,
        "p_effective": 1.0 - (1.0 - p1) * (1.0 - eps),
        "radius": R,
        "delta": delta,
        "trials": trials,
        "prob_reach_event": events / trials,
        "conditioning_events": events,
        "prob_giant_given_reach": joined / events if events else None,
        "zero_conditioning": events == 0,
        "mean_reach_fraction": float(np.mean(xs)) / g.n if g.n else 0.0,
    }
