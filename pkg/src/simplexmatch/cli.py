"""Command-line entry point: ``simplexmatch generate|solve|benchmark|population|diagnose``."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import io as smio
from .diagnostics import error_cdf, property_report
from .experiments import (
    AlgoSpec,
    ConfigError,
    load_config,
    run_benchmark,
    run_property_tracking,
    trial_seed,
    write_outputs,
    write_properties,
)
from .graph_models import ModelSpec, load_edge_list, sample_model
from .population import check_multistep_rates, pop_run
from .qap import EnergyContext, efficiency_ratio
from .rounding import gmwm, overlap
from .solvers import NumericalError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _threads(args) -> int:
    env = os.environ.get("SIMPLEXMATCH_THREADS")
    if env:
        try:
            k = int(env)
        except ValueError:
            raise ConfigError(f"SIMPLEXMATCH_THREADS must be an integer, got {env!r}") from None
    else:
        k = args.threads
    if k < 1:
        raise ConfigError("thread count must be >= 1")
    return k


def _emit(obj):
    json.dump(obj, sys.stdout, indent=2, sort_keys=False)
    sys.stdout.write("\n")


def cmd_generate(args):
    if args.config:
        cfg = load_config(args.config)
        spec = cfg.model.spec(cfg.sigma_grid[0])
        seed = trial_seed(cfg.base_seed, 0, 0)
        parent_path = cfg.model.parent
        out = args.out or cfg.outputs
    else:
        if args.n is None:
            raise ConfigError("generate needs --n or --config")
        try:
            spec = ModelSpec(args.model, args.n, args.sigma, args.p, args.s)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        seed = args.seed
        parent_path = args.parent
        out = args.out or "."
    parent = load_edge_list(parent_path, spec.n) if spec.kind == "SUBSAMPLE" and parent_path else None
    if spec.kind == "SUBSAMPLE" and parent is None:
        raise ConfigError("SUBSAMPLE needs a parent edge list (--parent)")
    A, B, perm = sample_model(spec, seed=seed, parent=parent)
    os.makedirs(out, exist_ok=True)
    smio.write_matrix_csv(os.path.join(out, "A.csv"), A)
    smio.write_matrix_csv(os.path.join(out, "B.csv"), B)
    smio.write_permutation(os.path.join(out, "perm.txt"), perm)
    _emit({"model": spec.kind, "n": spec.n, "sigma": spec.sigma, "seed": seed, "out": out})


def cmd_solve(args):
    A = smio.read_matrix(args.A)
    B = smio.read_matrix(args.B, A.shape[0])
    if A.shape != B.shape:
        raise ConfigError(f"A is {A.shape[0]} x {A.shape[0]} but B is {B.shape[0]} x {B.shape[0]}")
    algo = AlgoSpec(args.algo, iters=args.iters, step=args.step, eta=args.eta)
    from .experiments import _similarity

    X, e_best, iters = _similarity(algo, A, B)
    if not np.all(np.isfinite(X)):
        raise NumericalError("non-finite similarity matrix")
    perm = gmwm(X)
    out = args.out or "."
    os.makedirs(out, exist_ok=True)
    smio.write_matrix_csv(os.path.join(out, "similarity.csv"), X)
    smio.write_permutation(os.path.join(out, "perm.txt"), perm)
    result = {"algo": args.algo, "iterations": iters, "energy_best": None if math.isnan(e_best) else e_best}
    if args.truth:
        result["overlap"] = overlap(perm, smio.read_permutation(args.truth))
    _emit(result)


def cmd_benchmark(args):
    cfg = load_config(args.config)
    out = args.out or cfg.outputs
    threads = _threads(args)
    records = run_benchmark(cfg, threads)
    paths = write_outputs(records, out)
    if cfg.track_properties:
        paths.append(write_properties(run_property_tracking(cfg, threads), out))
    failed = sum(r.status != "ok" for r in records)
    _emit({"records": len(records), "failed": failed, "files": paths})
    return EXIT_NUMERIC if failed else EXIT_OK


def _parse_rates(text, n):
    text = text.strip()
    try:
        if text.startswith("const:"):
            _, g, N = text.split(":")
            return [float(g)] * int(N)
        if text.startswith("multistep:"):
            N = int(text.split(":")[1])
            return [(n - 1) * math.log(2.0) / (4.0 * 2 * N)] * N
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"cannot parse rates {text!r}") from None


def cmd_population(args):
    if args.n < 2:
        raise ConfigError("n must be >= 2")
    rates = _parse_rates(args.rates, args.n)
    if any(g < 0 or not math.isfinite(g) for g in rates):
        raise ConfigError("rates must be finite and nonnegative")
    states = pop_run(args.n, args.sigma, rates)
    fh = open(args.out, "w", encoding="ascii") if args.out else sys.stdout
    try:
        fh.write("k,x_diag,x_off,ratio,rounds_to_identity\n")
        for s in states:
            fh.write(f"{s.k},{s.x_diag!r},{s.x_off!r},{s.ratio!r},{int(s.x_diag > s.x_off)}\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    sys.stderr.write(f"rate condition satisfied: {check_multistep_rates(args.n, rates)}\n")


def cmd_diagnose(args):
    result = {}
    if args.X:
        X = smio.read_matrix_csv(args.X)
        if not args.truth:
            raise ConfigError("--X needs --truth")
        truth = smio.read_permutation(args.truth)
        result["properties"] = property_report(X, truth).as_dict()
    if args.A or args.B:
        if not (args.A and args.B):
            raise ConfigError("efficiency ratio needs both --A and --B")
        A = smio.read_matrix(args.A)
        B = smio.read_matrix(args.B, A.shape[0])
        result["efficiency_ratio"] = efficiency_ratio(EnergyContext(A, B), args.samples, args.seed)
    if args.errors:
        with open(args.errors, encoding="utf-8") as fh:
            errs = [float(ln.split(",")[0]) for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
        grid = [float(x) for x in args.grid.split(",")] if args.grid else sorted(set(errs))
        result["error_cdf"] = {"grid": grid, "cdf": error_cdf(errs, grid).tolist()}
    if not result:
        raise ConfigError("diagnose needs --X/--truth, --A/--B or --errors")
    _emit(result)


def build_parser():
    p = argparse.ArgumentParser(prog="simplexmatch", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON experiment configuration")
        sp.add_argument("--out", help="output directory (file for population)")
        sp.add_argument("--threads", type=int, default=1, help="worker threads (SIMPLEXMATCH_THREADS overrides)")

    g = sub.add_parser("generate", help="sample a graph pair and its ground truth")
    common(g)
    g.add_argument("--model", default="CGW", choices=["CGW", "CER", "SUBSAMPLE"])
    g.add_argument("--n", type=int)
    g.add_argument("--sigma", type=float, default=0.0)
    g.add_argument("--p", type=float, default=0.5)
    g.add_argument("--s", type=float, default=1.0)
    g.add_argument("--parent", help="edge list of the parent graph (SUBSAMPLE)")
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", help="match two graphs")
    common(s)
    s.add_argument("--A", required=True, help="matrix CSV or edge list")
    s.add_argument("--B", required=True, help="matrix CSV or edge list")
    s.add_argument("--algo", default="emd", choices=["emd", "pgd", "grampa", "umeyama"])
    s.add_argument("--iters", type=int, default=125)
    s.add_argument("--step", default="dynamic", help="fixed | dynamic | heuristic:THETA | polyak:THETA | const:GAMMA")
    s.add_argument("--eta", type=float, default=0.2)
    s.add_argument("--seed", type=int, default=0, help="accepted for interface symmetry; solvers are deterministic")
    s.add_argument("--truth", help="ground-truth permutation file; reports the overlap")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("benchmark", help="run a Monte-Carlo sweep from a configuration")
    common(b)
    b.set_defaults(func=cmd_benchmark)

    q = sub.add_parser("population", help="iterate the population dynamics")
    common(q)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--sigma", type=float, default=0.0)
    q.add_argument("--rates", required=True, help="comma list, const:GAMMA:N or multistep:N")
    q.set_defaults(func=cmd_population)

    d = sub.add_parser("diagnose", help="property report, efficiency ratio or error CDF")
    common(d)
    d.add_argument("--X", help="similarity matrix CSV")
    d.add_argument("--truth", help="ground-truth permutation file")
    d.add_argument("--A")
    d.add_argument("--B")
    d.add_argument("--samples", type=int, default=10000)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--errors", help="one-column CSV of nonnegative errors")
    d.add_argument("--grid", help="comma-separated thresholds")
    d.set_defaults(func=cmd_diagnose)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code = args.func(args)
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return EXIT_NUMERIC
    except (ConfigError, ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
