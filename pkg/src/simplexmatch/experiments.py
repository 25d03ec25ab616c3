"""
Monte-Carlo experiment harness.

A configuration names a model, a noise grid and a list of algorithms.
Each ``(sigma index, trial)`` pair draws one instance from a seed derived
from the base seed, and every algorithm runs on that same instance, so
adding algorithms never changes the instances. Trials may run on several
threads; records are sorted back into ``(sigma, algorithm, trial)`` order
before anything is written.
"""

from __future__ import annotations

import csv
import json
import math
import os
import time
import xml.etree.ElementTree as ET
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields

import numpy as np

from .diagnostics import PropertyReport, count_nondominant_rows, count_suffcond_failures, property_report
from .graph_models import ModelSpec, derive_seed, sample_model
from .qap import EnergyContext
from .rounding import gmwm, overlap
from .solvers import (
    NumericalError,
    grampa_similarity,
    parse_step,
    run_emdgm,
    run_pgdgm,
    umeyama_similarity,
)

__all__ = [
    "ConfigError",
    "AlgoSpec",
    "ModelConfig",
    "ExperimentConfig",
    "RunRecord",
    "load_config",
    "config_from_dict",
    "trial_seed",
    "run_benchmark",
    "run_property_tracking",
    "write_outputs",
    "write_properties",
]

ALGOS = ("emd", "pgd", "grampa", "umeyama")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class AlgoSpec:
    """One algorithm column of an experiment.

    ``step`` uses the syntax of :func:`simplexmatch.solvers.parse_step`;
    ``theta``, when given, overrides the multiplier of a heuristic or
    Polyak rule.
    """

    algo: str
    iters: int = 125
    step: str = "dynamic"
    eta: float = 0.2
    theta: float | None = None
    label: str | None = None

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise ConfigError(f"unknown algo {self.algo!r}; expected one of {ALGOS}")
        if self.algo in ("emd", "pgd"):
            if not isinstance(self.iters, int) or self.iters < 1:
                raise ConfigError("iters must be a positive integer")
            try:
                self.rule()
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if self.algo == "grampa" and not (isinstance(self.eta, (int, float)) and math.isfinite(self.eta)):
            raise ConfigError("eta must be a finite number")
        if self.theta is not None and not self.theta > 0:
            raise ConfigError("theta must be positive")

    @property
    def name(self) -> str:
        return self.label or self.algo

    def rule(self):
        rule = parse_step(self.step, self.algo, self.iters)
        if self.theta is not None and rule.kind in ("HEURISTIC_PGD", "POLYAK_PGD"):
            rule.theta = float(self.theta)
        return rule


@dataclass(frozen=True)
class ModelConfig:
    """Model fields shared by every grid point; ``parent`` is an edge-list path."""

    kind: str = "CGW"
    n: int = 100
    p: float = 0.5
    s: float = 1.0
    parent: str | None = None

    def spec(self, sigma: float) -> ModelSpec:
        return ModelSpec(self.kind, self.n, sigma, self.p, self.s)


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelConfig
    sigma_grid: tuple
    algorithms: tuple
    trials: int = 1
    base_seed: int = 0
    outputs: str = "out"
    track_properties: bool = False
    record_runtime: bool = False

    def __post_init__(self):
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials must be a positive integer")
        if not self.sigma_grid:
            raise ConfigError("sigma_grid must be nonempty")
        if not self.algorithms:
            raise ConfigError("algorithms must be nonempty")
        if not isinstance(self.base_seed, int) or self.base_seed < 0:
            raise ConfigError("base_seed must be a nonnegative integer")
        names = [a.name for a in self.algorithms]
        if len(set(names)) != len(names):
            raise ConfigError("algorithm labels must be unique")
        for sigma in self.sigma_grid:
            try:
                self.model.spec(sigma)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        if self.model.kind == "SUBSAMPLE" and not self.model.parent:
            raise ConfigError("SUBSAMPLE model needs model.parent (an edge-list file)")
        if self.track_properties and [a.algo for a in self.algorithms] not in (["emd"], ["pgd"]):
            raise ConfigError("track_properties needs exactly one emd or pgd algorithm")


def _build(cls, data, where):
    if not isinstance(data, dict):
        raise ConfigError(f"{where} must be a JSON object")
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def config_from_dict(data) -> ExperimentConfig:
    """Validate a parsed JSON document; unknown keys are errors."""
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a JSON object")
    data = dict(data)
    for key in ("model", "sigma_grid", "algorithms"):
        if key not in data:
            raise ConfigError(f"missing key {key!r}")
    data["model"] = _build(ModelConfig, data["model"], "model")
    grid = data["sigma_grid"]
    if not isinstance(grid, list) or not all(isinstance(x, (int, float)) for x in grid):
        raise ConfigError("sigma_grid must be a list of numbers")
    data["sigma_grid"] = tuple(float(x) for x in grid)
    algos = data["algorithms"]
    if not isinstance(algos, list):
        raise ConfigError("algorithms must be a list")
    data["algorithms"] = tuple(_build(AlgoSpec, a, f"algorithms[{i}]") for i, a in enumerate(algos))
    return _build(ExperimentConfig, data, "configuration")


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return config_from_dict(data)


@dataclass
class RunRecord:
    model: str
    sigma: float
    algo: str
    trial: int
    seed: int
    overlap: float
    energy_best: float
    runtime_seconds: float
    metric1: int
    metric2: int
    iterations: int
    status: str = "ok"


def trial_seed(base_seed: int, sigma_index: int, trial: int) -> int:
    """Integer seed of one instance; feeding it to the samplers reproduces the draw."""
    return int(derive_seed(base_seed, sigma_index, trial).generate_state(1, np.uint64)[0])


def _similarity(algo: AlgoSpec, A, B, callback=None):
    if algo.algo in ("emd", "pgd"):
        run = run_emdgm if algo.algo == "emd" else run_pgdgm
        rep = run(EnergyContext(A, B), algo.iters, algo.rule(), callback)
        return rep.X_best, rep.energy_best, rep.iterations_run
    if algo.algo == "grampa":
        return grampa_similarity(A, B, algo.eta), float("nan"), 0
    return umeyama_similarity(A, B), float("nan"), 0


def _load_parent(cfg):
    if cfg.model.kind != "SUBSAMPLE":
        return None
    from .graph_models import load_edge_list

    H = load_edge_list(cfg.model.parent, cfg.model.n)
    if H.shape[0] != cfg.model.n:
        raise ConfigError(f"parent graph has {H.shape[0]} vertices, model.n is {cfg.model.n}")
    return H


def _run_instance(cfg, parent, si, trial):
    sigma = cfg.sigma_grid[si]
    seed = trial_seed(cfg.base_seed, si, trial)
    A, B, perm = sample_model(cfg.model.spec(sigma), seed=seed, parent=parent)
    out = []
    for ai, algo in enumerate(cfg.algorithms):
        t0 = time.perf_counter()
        try:
            X, e_best, iters = _similarity(algo, A, B)
            if not np.all(np.isfinite(X)):
                raise NumericalError("non-finite similarity matrix")
            C = X[:, perm]
            rec = RunRecord(
                cfg.model.kind, sigma, algo.name, trial, seed,
                overlap(gmwm(X), perm), e_best, 0.0,
                count_nondominant_rows(C), count_suffcond_failures(C, "MAX"), iters,
            )
        except (NumericalError, ValueError, FloatingPointError) as exc:
            rec = RunRecord(
                cfg.model.kind, sigma, algo.name, trial, seed,
                float("nan"), float("nan"), 0.0, -1, -1, 0, f"error: {exc}",
            )
        if cfg.record_runtime:
            rec.runtime_seconds = time.perf_counter() - t0
        out.append((si, ai, trial, rec))
    return out


def _map_instances(cfg, fn, threads):
    tasks = [(si, t) for si in range(len(cfg.sigma_grid)) for t in range(cfg.trials)]
    threads = max(1, int(threads))
    if threads == 1:
        chunks = [fn(si, t) for si, t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda st: fn(*st), tasks))
    return [item for chunk in chunks for item in chunk]


def run_benchmark(cfg: ExperimentConfig, threads: int = 1) -> list:
    """Run every algorithm on every ``(sigma, trial)`` instance.

    Solver failures are recorded in the ``status`` column and the sweep
    continues.
    """
    parent = _load_parent(cfg)
    items = _map_instances(cfg, lambda si, t: _run_instance(cfg, parent, si, t), threads)
    items.sort(key=lambda it: it[:3])
    return [it[3] for it in items]


def _track_instance(cfg, parent, si, trial):
    sigma = cfg.sigma_grid[si]
    seed = trial_seed(cfg.base_seed, si, trial)
    A, B, perm = sample_model(cfg.model.spec(sigma), seed=seed, parent=parent)
    algo = cfg.algorithms[0]
    rows = []

    def record(k, X, E, gamma):
        rows.append((si, 0, trial, (sigma, trial, k, property_report(X, perm))))

    _similarity(algo, A, B, callback=record)
    return rows


def run_property_tracking(cfg: ExperimentConfig, threads: int = 1) -> list:
    """Property report of every iterate ``k >= 1`` for every trial.

    Returns dicts with keys ``sigma``, ``trial``, ``k`` and the
    :class:`PropertyReport` fields; per-``(sigma, k)`` means follow with
    ``trial`` set to ``"mean"``.
    """
    if not cfg.track_properties:
        raise ConfigError("track_properties is false in this configuration")
    parent = _load_parent(cfg)
    items = _map_instances(cfg, lambda si, t: _track_instance(cfg, parent, si, t), threads)
    items.sort(key=lambda it: (it[0], it[2], it[3][2]))
    rows = []
    for _, _, _, (sigma, trial, k, rep) in items:
        rows.append({"sigma": sigma, "trial": trial, "k": k, **rep.as_dict()})
    keys = [f.name for f in fields(PropertyReport)]
    groups = {}
    for r in rows:
        groups.setdefault((r["sigma"], r["k"]), []).append(r)
    for (sigma, k), grp in sorted(groups.items()):
        rows.append({"sigma": sigma, "trial": "mean", "k": k, **{c: math.fsum(g[c] for g in grp) / len(grp) for c in keys}})
    return rows


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_properties(rows, directory) -> str:
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, "properties.csv")
    cols = ["sigma", "trial", "k"] + [f.name for f in fields(PropertyReport)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(r[c]) for c in cols])
    return path


def _summary(records):
    groups = {}
    for r in records:
        groups.setdefault((r.sigma, r.algo), []).append(r)
    out = []
    for (sigma, algo), grp in groups.items():
        ok = [r for r in grp if r.status == "ok"]
        ov = np.array([r.overlap for r in ok])

        def mean(vals):
            return math.fsum(vals) / len(vals) if vals else float("nan")

        out.append(
            {
                "model": grp[0].model,
                "sigma": sigma,
                "algo": algo,
                "trials": len(grp),
                "failed": len(grp) - len(ok),
                "overlap_mean": mean(list(ov)),
                "overlap_std": float(np.std(ov, ddof=1)) if ov.size > 1 else 0.0,
                "energy_best_mean": mean([r.energy_best for r in ok]),
                "runtime_mean": mean([r.runtime_seconds for r in ok]),
                "metric1_mean": mean([float(r.metric1) for r in ok]),
                "metric2_mean": mean([float(r.metric2) for r in ok]),
            }
        )
    return out


def _svg(summary, path):
    algos = list(dict.fromkeys(s["algo"] for s in summary))
    sigmas = sorted({s["sigma"] for s in summary})
    W, H, m = 640, 420, 60
    lo, hi = sigmas[0], sigmas[-1]
    span = hi - lo if hi > lo else 1.0

    def px(sig):
        return m + (sig - lo) / span * (W - 2 * m)

    def py(val):
        return H - m - val * (H - 2 * m)

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(W), height=str(H))
    ET.SubElement(svg, "line", x1=str(m), y1=str(H - m), x2=str(W - m), y2=str(H - m), stroke="black")
    ET.SubElement(svg, "line", x1=str(m), y1=str(m), x2=str(m), y2=str(H - m), stroke="black")
    for val in (0.0, 0.5, 1.0):
        t = ET.SubElement(svg, "text", x=str(m - 30), y=f"{py(val) + 4:.1f}", **{"font-size": "11"})
        t.text = f"{val:.1f}"
    for sig in sigmas:
        t = ET.SubElement(svg, "text", x=f"{px(sig) - 10:.1f}", y=str(H - m + 18), **{"font-size": "11"})
        t.text = f"{sig:g}"
    xl = ET.SubElement(svg, "text", x=str(W // 2 - 20), y=str(H - 15), **{"font-size": "13"})
    xl.text = "sigma"
    yl = ET.SubElement(svg, "text", x="10", y=str(m - 20), **{"font-size": "13"})
    yl.text = "mean overlap"
    for i, algo in enumerate(algos):
        pts = sorted((s["sigma"], s["overlap_mean"]) for s in summary if s["algo"] == algo)
        pts = [(x, y) for x, y in pts if math.isfinite(y)]
        color = colors[i % len(colors)]
        d = " ".join(f"{'M' if j == 0 else 'L'}{px(x):.2f},{py(y):.2f}" for j, (x, y) in enumerate(pts))
        ET.SubElement(svg, "path", d=d or "M0,0", fill="none", stroke=color, **{"stroke-width": "2"})
        t = ET.SubElement(svg, "text", x=str(W - m - 100), y=str(m + 16 * i), fill=color, **{"font-size": "12"})
        t.text = algo
    ET.ElementTree(svg).write(path, encoding="utf-8", xml_declaration=True)


def write_outputs(records, directory) -> list:
    """Write ``runs.csv``, ``summary.csv`` and ``recovery.svg``; return their paths."""
    if not records:
        raise ValueError("no records to write")
    os.makedirs(directory, exist_ok=True)
    cols = [f.name for f in fields(RunRecord)]
    runs = os.path.join(directory, "runs.csv")
    with open(runs, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in records:
            d = asdict(r)
            w.writerow([_fmt(d[c]) for c in cols])
    summary = _summary(records)
    spath = os.path.join(directory, "summary.csv")
    with open(spath, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(summary[0]))
        for s in summary:
            w.writerow([_fmt(v) for v in s.values()])
    svg = os.path.join(directory, "recovery.svg")
    _svg(summary, svg)
    return [runs, spath, svg]
