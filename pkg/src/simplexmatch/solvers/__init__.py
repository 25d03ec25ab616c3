"""Simplex solvers, step-size rules and spectral baselines."""

from .descent import (
    NumericalError,
    SolveReport,
    barycenter,
    check_simplex,
    emd_step,
    pgd_step,
    run_descent,
    run_emdgm,
    run_pgdgm,
)
from .projection import project_simplex, simplex_threshold
from .spectral import grampa_kernel, grampa_similarity, sym_eigh, umeyama_similarity
from .stepsize import STEP_KINDS, StepSizeRule, next_gamma, parse_step

__all__ = [
    "NumericalError",
    "SolveReport",
    "barycenter",
    "check_simplex",
    "emd_step",
    "pgd_step",
    "run_descent",
    "run_emdgm",
    "run_pgdgm",
    "project_simplex",
    "simplex_threshold",
    "grampa_kernel",
    "grampa_similarity",
    "sym_eigh",
    "umeyama_similarity",
    "STEP_KINDS",
    "StepSizeRule",
    "next_gamma",
    "parse_step",
]
