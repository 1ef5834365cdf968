"""Command-line surface: solves, tracing, optimization, stats, file exports.

Subcommands: scenario, solve-a, solve-g, trace, optimize-station,
optimize-weights, stats, export-figure-data.  Configuration comes from flat
key=value files (# comments) with flags taking precedence; HJB_WORKERS sets
the default worker count.  Exit codes: 0 success, 1 usage error, 2 solver or
input error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .eikonal import solve_eikonal
from .grid import Problem, ScalarField, sample_bilinear
from .gridio import export_field, load_field, load_raster
from .multiobjective import (
    compute_R,
    lambda_grid,
    profit_map_a_streaming,
    profit_sharp,
    sample_curves_streaming,
    scalarized_cost,
)
from .paths import Trajectory, trace_descent, with_functionals
from .planning import high_value_region, optimize_station, optimize_weights, region_stats
from .scenarios import SCENARIOS, build_problem, scenario_spec
from .termination import profit_bracket_g_streaming, solve_terminated

USAGE_ERROR = 1
SOLVER_ERROR = 2


@dataclass
class RunConfig:
    """One run's worth of settings; every field has a flag override."""

    scenario: str = "example1"
    elevation: str | None = None
    n: int | None = None
    n_lambda: int | None = None
    n_b: int | None = None
    budget: float | None = None
    gamma: float | None = None
    epsilon: float | None = None
    p_tilde: float | None = None
    model: str = "a"
    outdir: str = "out"
    format: str = "text"
    workers: int = 0  # 0: HJB_WORKERS or 1
    points: list[tuple[float, float]] = field(default_factory=list)

    def resolved_workers(self) -> int:
        if self.workers > 0:
            return self.workers
        env = os.environ.get("HJB_WORKERS", "")
        return int(env) if env.isdigit() and int(env) > 0 else 1


def _parse_point(text: str) -> tuple[float, float]:
    try:
        x, y = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'x,y', got {text!r}") from None
    return (x, y)


def load_config_file(path) -> dict:
    """Flat key=value lines; '#' starts a comment; keys match RunConfig fields."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            if "=" not in body:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {body!r}")
            key, value = (s.strip() for s in body.split("=", 1))
            if key == "points":
                out[key] = [_parse_point(tok) for tok in value.split()]
            elif key in ("n", "n_lambda", "n_b", "workers"):
                out[key] = int(value)
            elif key in ("budget", "gamma", "epsilon", "p_tilde"):
                out[key] = float(value)
            elif key in ("scenario", "elevation", "model", "outdir", "format"):
                out[key] = value
            else:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
    return out


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--scenario", choices=sorted(SCENARIOS), help="built-in scenario name")
    p.add_argument("--elevation", help="elevation raster path (terrain scenarios)")
    p.add_argument("--n", type=int, help="gridpoints per axis (default: scenario's)")
    p.add_argument("--nlambda", dest="n_lambda", type=int, help="lambda-grid count N")
    p.add_argument("--nb", dest="n_b", type=int, help="loot-value-grid count N")
    p.add_argument("--budget", type=float, help="patrol budget E override")
    p.add_argument("--gamma", type=float, help="budget exponent override")
    p.add_argument("--epsilon", type=float, help="high-value-region fraction")
    p.add_argument("--ptilde", dest="p_tilde", type=float, help="pristine profit threshold")
    p.add_argument("--out", dest="outdir", help="output directory")
    p.add_argument("--format", choices=("text", "packed"), help="field file format")
    p.add_argument("--workers", type=int, help="sweep worker threads (HJB_WORKERS)")
    p.add_argument(
        "--point",
        dest="points",
        action="append",
        type=_parse_point,
        metavar="X,Y",
        help="trace/query point (repeatable)",
    )


def _merge_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = replace(cfg, **load_config_file(args.config))
    overrides = {}
    for f_ in ("scenario", "elevation", "n", "n_lambda", "n_b", "budget", "gamma",
               "epsilon", "p_tilde", "outdir", "format", "workers", "points"):
        v = getattr(args, f_, None)
        if v is not None:
            overrides[f_] = v
    return replace(cfg, **overrides)


def _build(cfg: RunConfig):
    spec = scenario_spec(cfg.scenario)
    params = {}
    if cfg.budget is not None:
        params["E"] = cfg.budget
    if cfg.gamma is not None:
        params["gamma"] = cfg.gamma
    if cfg.p_tilde is not None:
        params["p_tilde"] = cfg.p_tilde
    if cfg.epsilon is not None:
        params["epsilon"] = cfg.epsilon
    if cfg.n_lambda is not None:
        params["n_lambda"] = cfg.n_lambda
    if cfg.n_b is not None:
        params["n_b"] = cfg.n_b
    if params:
        spec = spec.with_params(**params)
    raster = load_raster(cfg.elevation) if cfg.elevation else None
    problem = build_problem(spec, cfg.n, elevation=raster)
    return problem, spec


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.outdir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _export(cfg, out: Path, name: str, fld: ScalarField) -> Path:
    ext = "txt" if cfg.format == "text" else "hjbf"
    path = out / f"{name}.{ext}"
    export_field(fld, path, cfg.format)
    return path


def _mask_field(problem: Problem) -> ScalarField:
    return ScalarField(problem.grid, problem.mask.inside.astype(np.float64))


def _print_stats(prefix: str, stats) -> None:
    print(f"{prefix}A_p={100 * stats.A_p:.2f}")
    print(f"{prefix}V_p={100 * stats.V_p:.2f}")
    print(f"{prefix}P_max={stats.P_max:.4f}")


def _write_stats(path: Path, pairs: dict) -> None:
    with open(path, "w") as fh:
        for k, v in pairs.items():
            fh.write(f"{k}={v}\n")


def cmd_scenario(cfg: RunConfig) -> int:
    problem, spec = _build(cfg)
    out = _outdir(cfg)
    for name, fld in (("B", problem.B), ("psi", problem.psi), ("f", problem.f),
                      ("K", problem.K), ("mask", _mask_field(problem))):
        _export(cfg, out, name, fld)
    print(f"scenario={spec.name}")
    print(f"n={problem.grid.nx + 1}x{problem.grid.ny + 1}")
    print(f"inside_points={problem.mask.n_inside}")
    print(f"outdir={out}")
    return 0


def cmd_solve_a(cfg: RunConfig) -> int:
    problem, spec = _build(cfg)
    out = _outdir(cfg)
    workers = cfg.resolved_workers()
    n_lambda = cfg.n_lambda or spec.n_lambda
    R = compute_R(problem)
    pm = profit_map_a_streaming(problem, R, n_lambda, workers=workers)
    stats = region_stats(pm.P_a, problem.B, problem.mask, problem.p_tilde)
    _export(cfg, out, "P_a", pm.P_a)
    _export(cfg, out, "R", R)
    _export(cfg, out, "argmax_lambda", ScalarField(problem.grid, pm.lambdas[pm.argmax_k]))
    _export(cfg, out, "B", problem.B)
    _export(cfg, out, "psi", problem.psi)
    _export(cfg, out, "mask", _mask_field(problem))
    eps = cfg.epsilon if cfg.epsilon is not None else spec.epsilon
    omega_e = high_value_region(pm.P_a, R, problem.mask, eps)
    _export(cfg, out, "high_value", ScalarField(problem.grid, omega_e.astype(np.float64)))
    _print_stats("", stats)
    print(f"omega_e={100 * omega_e.sum() / problem.mask.n_inside:.2f}")
    _write_stats(out / "stats.txt", {
        "A_p": f"{100 * stats.A_p:.2f}",
        "V_p": f"{100 * stats.V_p:.2f}",
        "P_max": f"{stats.P_max:.4f}",
        "omega_e": f"{100 * omega_e.sum() / problem.mask.n_inside:.2f}",
        "n_lambda": n_lambda,
    })
    return 0


def cmd_solve_g(cfg: RunConfig) -> int:
    problem, spec = _build(cfg)
    out = _outdir(cfg)
    workers = cfg.resolved_workers()
    n_b = cfg.n_b or spec.n_b
    R = compute_R(problem)
    bracket = profit_bracket_g_streaming(problem, R, n_b, workers=workers)
    mid = bracket.midpoint()
    stats = region_stats(mid, problem.B, problem.mask, problem.p_tilde)
    _export(cfg, out, "P_g_minus", bracket.P_g_minus)
    _export(cfg, out, "P_g_plus", bracket.P_g_plus)
    _export(cfg, out, "P_g_mid", mid)
    _export(cfg, out, "R", R)
    _export(cfg, out, "B", problem.B)
    _export(cfg, out, "mask", _mask_field(problem))
    _print_stats("", stats)
    _write_stats(out / "stats.txt", {
        "A_p": f"{100 * stats.A_p:.2f}",
        "V_p": f"{100 * stats.V_p:.2f}",
        "P_max": f"{stats.P_max:.4f}",
        "n_b": n_b,
    })
    return 0


def _write_polylines(path: Path, trajs: list[Trajectory]) -> None:
    # one polyline per line: x y t J1 J2 per vertex, flattened
    with open(path, "w") as fh:
        for t in trajs:
            toks = []
            j1 = t.j1 if t.j1 is not None else np.zeros(len(t))
            j2 = t.j2 if t.j2 is not None else np.zeros(len(t))
            for s in range(len(t)):
                toks.extend(
                    f"{v:.10g}"
                    for v in (t.points[s, 0], t.points[s, 1], t.times[s], j1[s], j2[s])
                )
            fh.write(" ".join(toks) + "\n")


def _model_a_traces(problem, spec, n_lambda, x0, workers):
    """Paths for lambda = 0, 1, the linearization weight, and the payoff argmax."""
    samples = sample_curves_streaming(problem, n_lambda, [x0], workers=workers)[0]
    B0 = sample_bilinear(problem.B, *x0)
    payoff = B0 * np.exp(-samples[:, 0]) - samples[:, 1]
    lambdas = lambda_grid(n_lambda)
    lam_star = float(lambdas[int(payoff.argmax())])
    lam_sharp = B0 / (B0 + 1.0)
    trajs = []
    for lam in (0.0, 1.0, lam_sharp, lam_star):
        klam = scalarized_cost(problem.psi, problem.K, lam)
        u = solve_eikonal(problem.grid, problem.mask, problem.f, klam).u
        t = trace_descent(u, problem.f, problem.mask, x0)
        trajs.append(with_functionals(t, problem.psi, problem.K))
    return trajs, lam_star, lam_sharp


def _model_g_traces(problem, x0, workers):
    """Pre-detection path at the exact loot value plus three escape paths."""
    R = compute_R(problem)
    b0 = sample_bilinear(problem.B, *x0)
    term = solve_terminated(problem, R, b0)
    u_k = solve_eikonal(problem.grid, problem.mask, problem.f, problem.K).u
    pre = trace_descent(term.u_bar, problem.f, problem.mask, x0)
    pre = with_functionals(pre, problem.psi, problem.K)
    posts = []
    if len(pre) > 3:
        for frac in (0.25, 0.5, 0.75):
            p = pre.points[int(frac * (len(pre) - 1))]
            t = trace_descent(u_k, problem.f, problem.mask, (p[0], p[1]))
            posts.append(with_functionals(t, problem.psi, problem.K))
    return [pre] + posts


def cmd_trace(cfg: RunConfig) -> int:
    problem, spec = _build(cfg)
    if not cfg.points:
        print("trace: no --point given", file=sys.stderr)
        return USAGE_ERROR
    out = _outdir(cfg)
    workers = cfg.resolved_workers()
    n_lambda = cfg.n_lambda or spec.n_lambda
    for idx, x0 in enumerate(cfg.points):
        if cfg.model == "g":
            trajs = _model_g_traces(problem, x0, workers)
            legend = "pre-detection + post-detection escapes"
        else:
            trajs, lam_star, lam_sharp = _model_a_traces(problem, spec, n_lambda, x0, workers)
            legend = f"lambda=0, lambda=1, lambda_sharp={lam_sharp:.4f}, argmax={lam_star:.4f}"
        path = out / f"trace_{idx:03d}.txt"
        _write_polylines(path, trajs)
        print(f"point={x0[0]},{x0[1]} file={path} paths={len(trajs)} ({legend})")
    return 0


def cmd_optimize_station(cfg: RunConfig) -> int:
    spec = scenario_spec(cfg.scenario)
    if cfg.budget is not None:
        spec = spec.with_params(E=cfg.budget)
    candidates = [(round(i / 10, 1), round(j / 10, 1)) for i in range(11) for j in range(11)]
    winners, a_p = optimize_station(
        spec,
        candidates,
        n=cfg.n or spec.default_n,
        n_lambda=cfg.n_lambda or spec.n_lambda,
        workers=cfg.resolved_workers(),
    )
    for c, v in zip(candidates, a_p):
        print(f"candidate={c[0]},{c[1]} A_p={100 * v:.2f}")
    for w in winners:
        print(f"best={w[0]},{w[1]}")
    print(f"best_A_p={100 * a_p.max():.2f}")
    return 0


def cmd_optimize_weights(cfg: RunConfig) -> int:
    spec = scenario_spec(cfg.scenario)
    if cfg.budget is not None:
        spec = spec.with_params(E=cfg.budget)
    n_w = 100
    winners, a_p = optimize_weights(
        spec,
        n_w,
        n=cfg.n or spec.default_n,
        n_lambda=cfg.n_lambda or spec.n_lambda,
        workers=cfg.resolved_workers(),
    )
    for i, v in enumerate(a_p):
        print(f"w1={i / n_w:.2f} A_p={100 * v:.2f}")
    for w in winners:
        print(f"best={w[0]:.2f},{w[1]:.2f}")
    print(f"best_A_p={100 * a_p.max():.2f}")
    return 0


def cmd_stats(cfg: RunConfig, profit: str, benefit: str, mask_path: str) -> int:
    P = load_field(profit)
    B = load_field(benefit)
    mfld = load_field(mask_path)
    from .grid import DomainMask

    mask = DomainMask(P.grid, mfld.values > 0.5)
    stats = region_stats(P, B, mask, cfg.p_tilde if cfg.p_tilde is not None else 0.0)
    _print_stats("", stats)
    return 0


def cmd_export_figure_data(cfg: RunConfig) -> int:
    problem, spec = _build(cfg)
    out = _outdir(cfg)
    workers = cfg.resolved_workers()
    n_lambda = cfg.n_lambda or spec.n_lambda
    R = compute_R(problem)
    pm = profit_map_a_streaming(problem, R, n_lambda, workers=workers)
    stats = region_stats(pm.P_a, problem.B, problem.mask, problem.p_tilde)
    ps = profit_sharp(problem, R, cfg.n_b or spec.n_b)
    for name, fld in (("B", problem.B), ("psi", problem.psi), ("f", problem.f),
                      ("P_a", pm.P_a), ("R", R), ("P_sharp", ps),
                      ("mask", _mask_field(problem))):
        _export(cfg, out, name, fld)
    _write_stats(out / "stats.txt", {
        "A_p": f"{100 * stats.A_p:.2f}",
        "V_p": f"{100 * stats.V_p:.2f}",
        "P_max": f"{stats.P_max:.4f}",
        "p_tilde": f"{problem.p_tilde:.17g}",
    })
    lambdas = lambda_grid(n_lambda)
    for idx, x0 in enumerate(cfg.points):
        samples = sample_curves_streaming(problem, n_lambda, [x0], workers=workers)[0]
        B0 = sample_bilinear(problem.B, *x0)
        payoff = B0 * np.exp(-samples[:, 0]) - samples[:, 1]
        with open(out / f"front_{idx:03d}.txt", "w") as fh:
            for k, lam in enumerate(lambdas):
                fh.write(
                    f"{lam:.10g} {samples[k, 0]:.10g} {samples[k, 1]:.10g} {payoff[k]:.10g}\n"
                )
        trajs, _, _ = _model_a_traces(problem, spec, n_lambda, x0, workers)
        _write_polylines(out / f"trace_{idx:03d}.txt", trajs)
    print(f"outdir={out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hjbplan",
        description="Expected-profit maps and patrol planning over gridded protected areas",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name, fn in (
        ("scenario", cmd_scenario),
        ("solve-a", cmd_solve_a),
        ("solve-g", cmd_solve_g),
        ("trace", cmd_trace),
        ("optimize-station", cmd_optimize_station),
        ("optimize-weights", cmd_optimize_weights),
        ("export-figure-data", cmd_export_figure_data),
    ):
        p = sub.add_parser(name)
        _add_common(p)
        if name == "trace":
            p.add_argument("--model", choices=("a", "g"), default="a")
        p.set_defaults(fn=fn)
    p = sub.add_parser("stats")
    p.add_argument("--profit", required=True, help="exported profit map")
    p.add_argument("--benefit", required=True, help="exported benefit map")
    p.add_argument("--mask", required=True, help="exported mask field (1 inside)")
    p.add_argument("--ptilde", dest="p_tilde", type=float)
    p.set_defaults(fn=None)
    return ap


def run_cli(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; 0 for --help
        return 0 if exc.code in (0, None) else USAGE_ERROR
    try:
        if args.command == "stats":
            cfg = RunConfig(p_tilde=args.p_tilde)
            return cmd_stats(cfg, args.profit, args.benefit, args.mask)
        cfg = _merge_config(args)
        if getattr(args, "model", None):
            cfg.model = args.model
        return args.fn(cfg)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"hjbplan: error: {exc}", file=sys.stderr)
        return SOLVER_ERROR


def main() -> None:
    sys.exit(run_cli())
