import csv
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from simplexmatch.experiments import (
    AlgoSpec,
    ConfigError,
    RunRecord,
    config_from_dict,
    load_config,
    run_benchmark,
    run_property_tracking,
    trial_seed,
    write_outputs,
    write_properties,
)
from simplexmatch.graph_models import ModelSpec, sample_model


def _cfg(**over):
    base = {
        "model": {"kind": "CGW", "n": 30},
        "sigma_grid": [0.0, 0.3],
        "trials": 2,
        "base_seed": 5,
        "algorithms": [
            {"algo": "emd", "iters": 10},
            {"algo": "pgd", "iters": 10, "step": "polyak"},
            {"algo": "grampa", "eta": 0.2},
            {"algo": "umeyama"},
        ],
    }
    base.update(over)
    return config_from_dict(base)


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------- config


@pytest.mark.parametrize(
    "patch",
    [
        {"extra": 1},
        {"model": {"kind": "CGW", "n": 10, "bogus": 2}},
        {"algorithms": [{"algo": "emd", "colour": "red"}]},
        {"algorithms": [{"algo": "simulated-annealing"}]},
        {"algorithms": [{"algo": "emd", "step": "sometimes"}]},
        {"algorithms": [{"algo": "emd", "iters": 0}]},
        {"algorithms": []},
        {"sigma_grid": []},
        {"sigma_grid": ["a"]},
        {"trials": 0},
        {"base_seed": -3},
        {"model": {"kind": "CER", "n": 10, "p": 1.5}},
        {"model": {"kind": "SUBSAMPLE", "n": 10}},
        {"track_properties": True},
        {"algorithms": [{"algo": "emd"}, {"algo": "emd"}]},
    ],
)
def test_config_rejects(patch):
    with pytest.raises(ConfigError):
        _cfg(**patch)


def test_config_missing_keys():
    with pytest.raises(ConfigError):
        config_from_dict({"model": {"kind": "CGW", "n": 3}})
    with pytest.raises(ConfigError):
        config_from_dict([1, 2])


def test_load_config(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"model": {"kind": "CGW", "n": 4}, "sigma_grid": [0.1], "algorithms": [{"algo": "emd"}]}))
    cfg = load_config(p)
    assert cfg.trials == 1 and cfg.algorithms[0].iters == 125
    p.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(p)
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")


def test_algo_theta_override():
    a = AlgoSpec("pgd", step="heuristic", theta=0.3)
    assert a.rule().theta == 0.3


# ---------------------------------------------------------------- benchmark


def test_noiseless_one_step_benchmark():
    cfg = _cfg(sigma_grid=[0.0], trials=1, algorithms=[{"algo": "emd", "iters": 1}])
    (rec,) = run_benchmark(cfg)
    assert rec.overlap == 1.0 and rec.status == "ok" and rec.iterations == 1


def test_records_order_and_instance_sharing():
    cfg = _cfg()
    recs = run_benchmark(cfg)
    keys = [(r.sigma, r.algo, r.trial) for r in recs]
    expected = [(s, a.name, t) for s in cfg.sigma_grid for a in cfg.algorithms for t in range(cfg.trials)]
    assert keys == expected
    by_inst = {}
    for r in recs:
        by_inst.setdefault((r.sigma, r.trial), set()).add(r.seed)
    assert all(len(v) == 1 for v in by_inst.values())


def test_adding_algorithms_keeps_instances():
    small = run_benchmark(_cfg(algorithms=[{"algo": "emd", "iters": 10}]))
    big = run_benchmark(_cfg())
    big_emd = [r for r in big if r.algo == "emd"]
    assert [(r.seed, r.overlap, r.energy_best) for r in small] == [(r.seed, r.overlap, r.energy_best) for r in big_emd]


def test_trial_seed_reproduces_instance():
    cfg = _cfg(trials=1, algorithms=[{"algo": "grampa"}])
    (rec, _) = run_benchmark(cfg)
    assert rec.seed == trial_seed(5, 0, 0)
    A, B, perm = sample_model(ModelSpec("CGW", 30, 0.0), seed=rec.seed)
    from simplexmatch import gmwm, grampa_similarity, overlap

    assert overlap(gmwm(grampa_similarity(A, B, 0.2)), perm) == rec.overlap


def test_threads_do_not_change_outputs(tmp_path):
    cfg = _cfg()
    write_outputs(run_benchmark(cfg, threads=1), tmp_path / "a")
    write_outputs(run_benchmark(cfg, threads=3), tmp_path / "b")
    for name in ("runs.csv", "summary.csv", "recovery.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_solver_error_is_recorded():
    # an absurd constant step overflows the exponent; the sweep goes on
    cfg = _cfg(sigma_grid=[0.2], trials=1, algorithms=[{"algo": "emd", "iters": 3, "step": "const:1e308"}, {"algo": "umeyama"}])
    recs = run_benchmark(cfg)
    assert recs[0].status.startswith("error") and math.isnan(recs[0].overlap)
    assert recs[1].status == "ok"


def test_runtime_recorded_on_request():
    recs = run_benchmark(_cfg(record_runtime=True, trials=1, sigma_grid=[0.1]))
    assert all(r.runtime_seconds > 0 for r in recs)
    recs = run_benchmark(_cfg(trials=1, sigma_grid=[0.1]))
    assert all(r.runtime_seconds == 0 for r in recs)


def test_cer_and_subsample_models(tmp_path):
    recs = run_benchmark(_cfg(model={"kind": "CER", "n": 30, "p": 0.3}, sigma_grid=[0.0], trials=1))
    assert all(r.overlap == 1.0 for r in recs if r.algo in ("emd", "grampa"))
    edges = tmp_path / "parent.txt"
    rng = np.random.default_rng(0)
    edges.write_text("".join(f"{i} {j}\n" for i in range(30) for j in range(i + 1, 30) if rng.random() < 0.3))
    cfg = _cfg(model={"kind": "SUBSAMPLE", "n": 30, "s": 1.0, "parent": str(edges)}, sigma_grid=[0.0], trials=1)
    recs = run_benchmark(cfg)
    assert all(r.status == "ok" for r in recs)


# ---------------------------------------------------------------- outputs


def test_single_record_output(tmp_path):
    rec = RunRecord("CGW", 0.1, "emd", 0, 1, 1.0, 0.5, 0.0, 0, 0, 3)
    write_outputs([rec], tmp_path)
    lines = (tmp_path / "runs.csv").read_text().splitlines()
    assert len(lines) == 2
    assert lines[0].split(",")[:11] == [
        "model", "sigma", "algo", "trial", "seed", "overlap", "energy_best",
        "runtime_seconds", "metric1", "metric2", "iterations",
    ]
    with pytest.raises(ValueError):
        write_outputs([], tmp_path)


def test_summary_recomputable_and_svg(tmp_path):
    cfg = _cfg()
    write_outputs(run_benchmark(cfg), tmp_path)
    runs = _read(tmp_path / "runs.csv")
    for row in _read(tmp_path / "summary.csv"):
        vals = [float(r["overlap"]) for r in runs if r["algo"] == row["algo"] and r["sigma"] == row["sigma"]]
        assert abs(np.mean(vals) - float(row["overlap_mean"])) <= 1e-12
        assert int(row["trials"]) == len(vals)
    root = ET.parse(tmp_path / "recovery.svg").getroot()
    paths = [e for e in root.iter() if e.tag.endswith("path")]
    assert len(paths) == len(cfg.algorithms)


def test_property_tracking_rows(tmp_path):
    cfg = _cfg(sigma_grid=[0.0], trials=2, track_properties=True, algorithms=[{"algo": "emd", "iters": 3}])
    rows = run_property_tracking(cfg)
    per_trial = [r for r in rows if r["trial"] != "mean"]
    means = [r for r in rows if r["trial"] == "mean"]
    assert len(per_trial) == 6 and len(means) == 3
    assert all(r["frac_suffcond_sum"] == 1.0 for r in per_trial if r["k"] == 1)
    path = write_properties(rows, tmp_path)
    assert len(_read(path)) == 9
    with pytest.raises(ConfigError):
        run_property_tracking(_cfg())
