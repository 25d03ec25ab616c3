"""
Entropic mirror descent and projected gradient descent on the simplex.

Both solvers start from the barycenter ``J / n**2``, take ``N`` steps and
return the visited iterate with the lowest energy (the starting point
included).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..qap import EnergyContext, energy_and_gradient
from .projection import project_simplex
from .stepsize import StepSizeRule, next_gamma

__all__ = [
    "NumericalError",
    "SolveReport",
    "barycenter",
    "check_simplex",
    "emd_step",
    "pgd_step",
    "run_emdgm",
    "run_pgdgm",
    "run_descent",
]

SIMPLEX_TOL = 1e-10


class NumericalError(ArithmeticError):
    """Raised when an iteration produces non-finite or degenerate values."""


@dataclass
class SolveReport:
    """Outcome of a simplex solve.

    Attributes
    ----------
    X_best : ndarray
        Lowest-energy iterate seen.
    energy_best : float
        Its energy.
    energies : list of float
        Energy of every visited iterate, ``X^(0)`` first.
    gammas : list of float
        Step size used at every update.
    iterations_run : int
        Number of updates performed.
    """

    X_best: np.ndarray
    energy_best: float
    energies: list = field(default_factory=list)
    gammas: list = field(default_factory=list)
    iterations_run: int = 0

    @property
    def best_index(self) -> int:
        return int(np.argmin(self.energies))


def barycenter(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.full((n, n), 1.0 / (n * n))


def check_simplex(X, tol: float = SIMPLEX_TOL) -> None:
    """Raise :class:`NumericalError` unless ``X`` is a finite point of the simplex."""
    X = np.asarray(X)
    if not np.all(np.isfinite(X)):
        raise NumericalError("iterate has non-finite entries")
    if X.min() < 0:
        raise NumericalError(f"iterate has a negative entry {X.min():.3e}")
    s = X.sum()
    if abs(s - 1.0) > tol:
        raise NumericalError(f"iterate sums to {s!r}, not 1")


def emd_step(X, G, gamma: float) -> np.ndarray:
    """Multiplicative update ``X * exp(-gamma G)`` renormalized to sum 1.

    The exponent is shifted by its maximum before exponentiating, so large
    steps cannot overflow. Entries that are zero stay zero; positive
    entries stay positive unless they underflow.

    Parameters
    ----------
    X : ndarray
        Current point of the simplex.
    G : ndarray
        Gradient at ``X``.
    gamma : float
        Nonnegative step size.
    """
    X = np.asarray(X, dtype=float)
    G = np.asarray(G, dtype=float)
    if G.shape != X.shape:
        raise ValueError(f"G has shape {G.shape}, expected {X.shape}")
    if not gamma >= 0 or not np.isfinite(gamma):
        raise ValueError("gamma must be finite and nonnegative")
    if gamma == 0:
        return X.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        W = -gamma * G
        W = W - W.max()
    if not np.all(np.isfinite(W)):
        raise NumericalError("non-finite exponent in the mirror step")
    Y = X * np.exp(W)
    s = Y.sum()
    if not s > 0:
        raise NumericalError("mirror step underflowed to the zero matrix")
    return Y / s


def pgd_step(X, G, gamma: float) -> np.ndarray:
    """Euclidean projection of ``X - gamma G`` onto the simplex."""
    X = np.asarray(X, dtype=float)
    G = np.asarray(G, dtype=float)
    if G.shape != X.shape:
        raise ValueError(f"G has shape {G.shape}, expected {X.shape}")
    if not gamma >= 0 or not np.isfinite(gamma):
        raise ValueError("gamma must be finite and nonnegative")
    if gamma == 0:
        return project_simplex(X)
    return project_simplex(X - gamma * G)


def run_descent(ctx: EnergyContext, N: int, rule: StepSizeRule, step, callback=None) -> SolveReport:
    """Shared driver of :func:`run_emdgm` and :func:`run_pgdgm`.

    ``callback(k, X, energy, gamma)`` is called after every update, with
    ``k`` counting from 1.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    rule = rule.fresh(N)
    X = barycenter(ctx.n)
    with np.errstate(over="ignore", invalid="ignore"):
        E, G = energy_and_gradient(ctx, X)
    report = SolveReport(X_best=X, energy_best=E, energies=[E])
    for k in range(N):
        if not (np.isfinite(E) and np.all(np.isfinite(G))):
            raise NumericalError(f"non-finite energy or gradient at iteration {k}")
        gamma = next_gamma(rule, k, G, E)
        if not (gamma >= 0 and np.isfinite(gamma)):
            raise NumericalError(f"step rule {rule.kind} produced gamma={gamma!r} at iteration {k}")
        X = step(X, G, gamma)
        check_simplex(X)
        with np.errstate(over="ignore", invalid="ignore"):
            E, G = energy_and_gradient(ctx, X)
        report.energies.append(E)
        report.gammas.append(gamma)
        report.iterations_run = k + 1
        if E < report.energy_best:
            report.X_best, report.energy_best = X, E
        if callback is not None:
            callback(k + 1, X, E, gamma)
    if not np.isfinite(report.energy_best):
        raise NumericalError("non-finite energy")
    return report


def run_emdgm(ctx: EnergyContext, N: int, rule: StepSizeRule, callback=None) -> SolveReport:
    """Entropic mirror descent from the barycenter with best-iterate tracking."""
    return run_descent(ctx, N, rule, emd_step, callback)


def run_pgdgm(ctx: EnergyContext, N: int, rule: StepSizeRule, callback=None) -> SolveReport:
    """Projected gradient descent from the barycenter with best-iterate tracking."""
    return run_descent(ctx, N, rule, pgd_step, callback)
