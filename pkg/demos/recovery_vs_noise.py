"""Mean overlap of the three similarity methods as the noise grows."""

import numpy as np

from simplexmatch.experiments import config_from_dict, run_benchmark

cfg = config_from_dict(
    {
        "model": {"kind": "CGW", "n": 150},
        "sigma_grid": [0.1, 0.2, 0.3, 0.4],
        "trials": 3,
        "base_seed": 11,
        "algorithms": [
            {"algo": "emd", "iters": 125, "step": "dynamic"},
            {"algo": "pgd", "iters": 125, "step": "polyak:1.0"},
            {"algo": "grampa", "eta": 0.2},
            {"algo": "umeyama"},
        ],
    }
)
records = run_benchmark(cfg)
algos = [a.name for a in cfg.algorithms]
print("sigma  " + "  ".join(f"{a:>8}" for a in algos))
for s in cfg.sigma_grid:
    row = [np.mean([r.overlap for r in records if r.sigma == s and r.algo == a]) for a in algos]
    print(f"{s:5}  " + "  ".join(f"{v:8.3f}" for v in row))
