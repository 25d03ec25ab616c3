"""
simplexmatch
============

Graph matching through the convex relaxation of the quadratic assignment
problem over the unit simplex. Similarity matrices come from entropic
mirror descent, projected gradient descent or spectral baselines and are
rounded to permutations by greedy maximum-weight matching.
"""

from . import diagnostics, graph_models, population, qap, rounding, solvers
from .diagnostics import (
    PropertyReport,
    count_nondominant_rows,
    count_suffcond_failures,
    error_cdf,
    grampa_pd_certificate,
    property_report,
)
from .graph_models import (
    ModelSpec,
    align,
    conjugate,
    derive_seed,
    load_edge_list,
    sample_cer,
    sample_cgw,
    sample_goe,
    sample_model,
    sample_permutation,
    standardize_cer,
    subsample_pair,
)
from .population import (
    PopulationState,
    check_multistep_rates,
    pop_init,
    pop_run,
    pop_step,
    rates_for_gaps,
    ratio_recursion,
)
from .qap import EnergyContext, efficiency_ratio, energy, gradient, population_gradient
from .rounding import gmwm, overlap
from .solvers import (
    NumericalError,
    SolveReport,
    StepSizeRule,
    emd_step,
    grampa_similarity,
    next_gamma,
    pgd_step,
    project_simplex,
    run_emdgm,
    run_pgdgm,
    umeyama_similarity,
)

__version__ = "0.1.0"
