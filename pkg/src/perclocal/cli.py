"""Command-line entry point: ``perclocal <subcommand> ...``."""
from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import experiments as ex
from . import generators
from .expansion import h_delta_bounds, h_delta_exact, min_edge_cut
from .graph import components, format_edge_list, read_edge_list
from .limits import LimitModel, f_R_profile, model_survival, pc, survival
from .lwc import ball_distribution, discrepancies, pair_density, tv_distance
from .percolation import SweepAccumulator, coupled_masks, sweep
from .pruning import prune_report, read_tail_file
from .rng import stream
from .spectral import nb_threshold, nb_top_eigenvalue


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _curve_csv(p, mean_frac, prob, err, trials) -> str:
    buf = io.StringIO()
    buf.write("p,mean_fraction,prob_exceeds_alpha,stderr,trials\n")
    for i in range(len(p)):
        buf.write(f"{float(p[i])!r},{float(mean_frac[i])!r},{float(prob[i])!r},"
                  f"{float(err[i])!r},{trials}\n")
    return buf.getvalue()


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def cmd_generate(args):
    params = generators.parse_params(args.family, args.params)
    g = generators.build(args.family, params)
    _emit(format_edge_list(g), args.out)
    if args.out:
        meta = {"family": args.family, "parameters": params, "seed": params.get("seed"),
                "n": g.n, "m": g.m}
        Path(args.out + ".meta.json").write_text(ex.dumps(meta))


def cmd_percolate(args):
    g = read_edge_list(args.graph)
    frac = np.empty(args.trials)
    for t in range(args.trials):
        mask = coupled_masks(g, [args.p], stream(args.seed, "percolate", t))[0]
        frac[t] = components(g, mask).largest / g.n
    exceed = frac > args.alpha
    err = exceed.std(ddof=1) / np.sqrt(args.trials) if args.trials > 1 else 0.0
    _emit(_curve_csv([args.p], [frac.mean()], [exceed.mean()], [err], args.trials), args.out)


def cmd_sweep(args):
    g = read_edge_list(args.graph)
    acc = SweepAccumulator.for_graph(g, args.alpha)
    for t in range(args.trials):
        acc.add(sweep(g, stream(args.seed, "sweep", t)))
    c = acc.curve(ex.parse_grid(args.p_grid))
    _emit(_curve_csv(c.p, c.mean_fraction, c.prob_exceeds, c.stderr, c.trials), args.out)


def cmd_expansion(args):
    g = read_edge_list(args.graph)
    if args.exact:
        cut = h_delta_exact(g, args.delta)
        report = {"delta": args.delta, "exact": cut.value, "witness": list(cut.witness),
                  "crossing": cut.crossing}
    else:
        report = h_delta_bounds(g, args.delta, samples=args.samples, seed=args.seed).as_dict()
    _emit(ex.dumps(report), args.out)


def cmd_mincut(args):
    g = read_edge_list(args.graph)
    res = min_edge_cut(g, _int_list(args.A), _int_list(args.B), maxlen=args.maxlen)
    _emit(ex.dumps(res.as_dict()), args.out)


def cmd_prune(args):
    g = read_edge_list(args.graph)
    limit = read_tail_file(args.limit_tail) if args.limit_tail else None
    rep = prune_report(g, limit, args.eps, radius=args.radius)
    _emit(format_edge_list(rep.graph), args.out)
    report = ex.dumps(rep.as_dict())
    if args.report:
        Path(args.report).write_text(report)
    elif args.out:
        sys.stdout.write(report)
    else:
        sys.stderr.write(report)


def cmd_lwc_compare(args):
    ga, gb = read_edge_list(args.graph_a), read_edge_list(args.graph_b)
    da = ball_distribution(ga, args.radius, sample=args.sample, seed=args.seed)
    db = ball_distribution(gb, args.radius, sample=args.sample, seed=args.seed)
    buf = io.StringIO()
    buf.write(f"# tv_distance={tv_distance(da, db)!r} radius={args.radius}\n")
    buf.write("signature,freq_a,freq_b,abs_diff\n")
    for sig, fa, fb in discrepancies(da, db, args.top):
        buf.write(f"{sig.hex()},{fa!r},{fb!r},{abs(fa - fb)!r}\n")
    _emit(buf.getvalue(), args.out)


def cmd_pair_density(args):
    g = read_edge_list(args.graph)
    _emit(ex.dumps({"radius": args.radius, "n": g.n,
                    "pair_density": pair_density(g, args.radius)}), args.out)


def _model(args) -> LimitModel:
    offspring = read_tail_file(args.offspring_file) if args.offspring_file else None
    return LimitModel.parse(args.model, offspring)


def cmd_limit_pc(args):
    model = _model(args)
    cv = pc(model)
    _emit(ex.dumps({"model": args.model, "pc": cv.pc, "branching_number": cv.branching_number,
                    "subcritical": cv.subcritical}), args.out)


def cmd_survival(args):
    model = _model(args)
    child = survival(model.child_offspring(), args.p, args.tol)
    report = {"model": args.model, "p": args.p, "tol": args.tol,
              "survival": model_survival(model, args.p, args.tol),
              "child_survival": child.survival, "iterations": child.iterations,
              "converged": child.converged, "gap": child.gap, "method": child.method}
    if args.radius:
        prof = f_R_profile(model, args.p, args.radius, args.trials, args.seed)
        report["f_R"] = prof.probability
        report["f_R_stderr"] = prof.stderr
    _emit(ex.dumps(report), args.out)


def cmd_nb_eigen(args):
    g = read_edge_list(args.graph)
    eig = nb_top_eigenvalue(g, tol=args.tol, seed=args.seed)
    report = eig.as_dict()
    if eig.value > 0:
        report.update(nb_threshold(g, tol=args.tol, seed=args.seed).as_dict())
    else:
        report["threshold_estimate"] = None
    _emit(ex.dumps(report), args.out)


def cmd_threshold(args):
    cfg = ex.ExperimentConfig.from_json(Path(args.config).read_text())
    curves = ex.run_threshold(cfg)
    _emit(ex.curves_to_csv(curves), args.out)


def cmd_reproduce_regular(args):
    report, curves = ex.reproduce_regular(args.d, _int_list(args.sizes), args.seed,
                                          trials=args.trials, grid=_grid(args.p_grid),
                                          alpha=args.alpha)
    if args.curves:
        Path(args.curves).write_text(ex.curves_to_csv(curves))
    _emit(ex.dumps(report), args.out)


def cmd_reproduce_counterexample(args):
    m = _int_list(args.m)
    copies = _int_list(args.n_copies)
    report, curves = ex.reproduce_counterexample(
        args.d, m, copies[0] if len(copies) == 1 else copies, args.seed,
        trials=args.trials, grid=_grid(args.p_grid), alpha=args.alpha, delta=args.delta,
        radius=args.radius, ball_samples=args.ball_samples)
    if args.curves:
        Path(args.curves).write_text(ex.curves_to_csv(curves))
    _emit(ex.dumps(report), args.out)


def cmd_sprinkle(args):
    g = read_edge_list(args.graph)
    report = ex.sprinkling_experiment(g, args.p1, args.eps, args.radius, args.delta,
                                      args.trials, args.seed)
    _emit(ex.dumps(report), args.out)


def _grid(text: str) -> tuple[float, float, float]:
    ex.parse_grid(text)  # validates
    a, b, step = (float(x) for x in text.split(":"))
    return a, b, step


def _error_record(command, kind: str, message: str) -> str:
    return json.dumps({"command": command, "error": kind, "message": message}, sort_keys=True)


class _Parser(argparse.ArgumentParser):
    """Usage errors also go out as a JSON record."""

    def error(self, message):
        command = self.prog.split(" ", 1)[1] if " " in self.prog else None
        self.print_usage(sys.stderr)
        sys.stderr.write(_error_record(command, "UsageError", message) + "\n")
        sys.exit(2)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="perclocal", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--out", help="write output here instead of stdout")
        return p

    p = add("generate", cmd_generate, "build a graph family and write its edge list")
    p.add_argument("family", choices=sorted(generators.FAMILIES))
    p.add_argument("params", nargs="*", help="key=value parameters")

    p = add("percolate", cmd_percolate, "per-p Monte Carlo of the largest cluster")
    p.add_argument("--graph", required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alpha", type=float, default=0.05)

    p = add("sweep", cmd_sweep, "Newman-Ziff sweeps smoothed onto a p-grid")
    p.add_argument("--graph", required=True)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p-grid", default="0:1:0.01")
    p.add_argument("--alpha", type=float, default=0.05)

    p = add("expansion", cmd_expansion, "expansion constant h_delta")
    p.add_argument("--graph", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--samples", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)

    p = add("mincut", cmd_mincut, "minimum edge cut / edge-disjoint paths between vertex sets")
    p.add_argument("--graph", required=True)
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--maxlen", type=int)

    p = add("prune", cmd_prune, "remove edges at high-degree vertices")
    p.add_argument("--graph", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--limit-tail")
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--report", help="diagnostics JSON path (default: stdout if --out, else stderr)")

    p = add("lwc-compare", cmd_lwc_compare, "total variation between ball laws")
    p.add_argument("--graph-a", required=True)
    p.add_argument("--graph-b", required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--sample", type=int, help="sample this many roots instead of all")
    p.add_argument("--seed", type=int, default=0)

    p = add("pair-density", cmd_pair_density, "fraction of vertex pairs within distance R")
    p.add_argument("--graph", required=True)
    p.add_argument("--radius", type=int, required=True)

    for name, func, help_ in (("limit-pc", cmd_limit_pc, "critical probability of a limit tree"),
                              ("survival", cmd_survival, "survival probability of a limit tree")):
        p = add(name, func, help_)
        p.add_argument("--model", required=True, help="regular:D or gw")
        p.add_argument("--offspring-file", help="tail file 'l P(D>=l)' for gw")
        if name == "survival":
            p.add_argument("--p", type=float, required=True)
            p.add_argument("--tol", type=float, default=1e-12)
            p.add_argument("--radius", type=int, default=0, help="also estimate f_R up to R")
            p.add_argument("--trials", type=int, default=10_000)
            p.add_argument("--seed", type=int, default=0)

    p = add("nb-eigen", cmd_nb_eigen, "top nonbacktracking eigenvalue")
    p.add_argument("--graph", required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)

    p = add("threshold", cmd_threshold, "threshold curves from a JSON experiment config")
    p.add_argument("--config", required=True)

    p = add("reproduce-regular", cmd_reproduce_regular, "random regular graphs vs tree p_c")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--sizes", default="1000,10000,100000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--p-grid", default="0:1:0.005")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--curves", help="also write the curve CSV here")

    p = add("reproduce-counterexample", cmd_reproduce_counterexample,
            "non-expanding gadget sequence vs tree p_c")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--m", default="50,200,800")
    p.add_argument("--n-copies", default="2000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--p-grid", default="0:1:0.005")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--delta", type=float, default=0.25)
    p.add_argument("--radius", type=int, default=2)
    p.add_argument("--ball-samples", type=int, default=10_000)
    p.add_argument("--curves", help="also write the curve CSV here")

    p = add("sprinkle", cmd_sprinkle, "sprinkling experiment")
    p.add_argument("--graph", required=True)
    p.add_argument("--p1", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (ValueError, RuntimeError, OSError, KeyError, ArithmeticError) as exc:
        sys.stderr.write(_error_record(args.command, type(exc).__name__, str(exc)) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
