"""
Population dynamics of entropic mirror descent.

Replacing the gradient by its expectation under the correlated Wigner
model with identity ground truth keeps every iterate in a two-value form:
one common diagonal entry and one common off-diagonal entry. The
expected gradient of such a matrix is again two-valued, with diagonal
``(a - 2) x_diag`` and off-diagonal ``a x_off`` where
``a = 2 + (n + 1) sigma**2 / n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "PopulationState",
    "a_sigma",
    "pop_init",
    "pop_step",
    "pop_run",
    "pop_matrix",
    "ratio_recursion",
    "check_multistep_rates",
    "multistep_bound",
    "initial_rate",
    "rates_for_gaps",
    "gap_scale",
]


def a_sigma(n: int, sigma: float) -> float:
    return 2.0 + (n + 1) * sigma**2 / n


@dataclass(frozen=True)
class PopulationState:
    """Two-value iterate: ``x_diag`` on the diagonal, ``x_off`` elsewhere."""

    n: int
    x_diag: float
    x_off: float
    k: int = 0

    @property
    def ratio(self) -> float:
        return self.x_off / self.x_diag

    @property
    def total(self) -> float:
        return self.n * self.x_diag + self.n * (self.n - 1) * self.x_off

    def a(self, sigma: float) -> float:
        return a_sigma(self.n, sigma)


def pop_init(n: int) -> PopulationState:
    if n < 2:
        raise ValueError("n must be >= 2")
    v = 1.0 / (n * n)
    return PopulationState(n, v, v, 0)


def pop_step(s: PopulationState, sigma: float, gamma: float) -> PopulationState:
    """One mirror step driven by the expected gradient."""
    if not gamma >= 0:
        raise ValueError("gamma must be nonnegative")
    if gamma == 0:
        return replace(s, k=s.k + 1)
    n = s.n
    a = a_sigma(n, sigma)
    ed = -gamma * (a - 2.0) * s.x_diag
    eo = -gamma * a * s.x_off
    m = max(ed, eo)
    d = s.x_diag * math.exp(ed - m)
    o = s.x_off * math.exp(eo - m)
    z = n * d + n * (n - 1) * o
    return PopulationState(n, d / z, o / z, s.k + 1)


def pop_run(n: int, sigma: float, rates) -> list:
    """States ``X^(0)`` through ``X^(len(rates))``."""
    states = [pop_init(n)]
    for g in rates:
        states.append(pop_step(states[-1], sigma, float(g)))
    return states


def pop_matrix(s: PopulationState) -> np.ndarray:
    X = np.full((s.n, s.n), s.x_off)
    np.fill_diagonal(X, s.x_diag)
    return X


def _delta(n, a, r):
    return (a * r - (a - 2.0)) / (n * (n - 1) * r + n)


def ratio_recursion(n: int, sigma: float, rates) -> list:
    """Closed-form ratios ``x_off / x_diag`` after each of the given steps."""
    rates = [float(g) for g in rates]
    if not rates:
        raise ValueError("rates must be nonempty")
    if any(g < 0 for g in rates):
        raise ValueError("rates must be nonnegative")
    a = a_sigma(n, sigma)
    r = math.exp(-2.0 * rates[0] / n**2)
    out = [r]
    for g in rates[1:]:
        r = r * math.exp(-g * _delta(n, a, r))
        out.append(r)
    return out


def multistep_bound(n: int) -> float:
    return (n - 1) / 4.0 * math.log(2.0)


def check_multistep_rates(n: int, rates) -> bool:
    """True when the rates sum strictly below ``(n - 1)/4 * log 2``."""
    return math.fsum(float(g) for g in rates) < multistep_bound(n)


def gap_scale(n: int, sigma: float) -> float:
    """Stationary ratio ``(a - 2)/a``; targets are this value times a gap."""
    return sigma**2 * (n + 1) / (sigma**2 * (n + 1) + 2 * n)


def initial_rate(n: int, sigma: float, g1: float) -> float:
    """First rate, making the ratio after one step equal ``gap_scale * g1``."""
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if not g1 > 0:
        raise ValueError("g1 must be positive")
    s2 = sigma**2 * (n + 1)
    return n**2 / 2.0 * math.log((s2 + 2 * n) / (s2 * g1))


def rates_for_gaps(n: int, sigma: float, gaps) -> list:
    """Rates whose population trajectory has ratio ``gap_scale * g_k`` after step ``k``.

    Parameters
    ----------
    n : int
        Dimension, at least 2.
    sigma : float
        Positive noise level.
    gaps : sequence of float
        Nonincreasing targets, each above 1 with ``gap_scale * g < 1``.

    Returns
    -------
    list of float
        One rate per gap. Later rates solve ``gamma_k Delta_k = log(g_k/g_{k+1})``
        with ``Delta_k`` evaluated at the ratio actually reached, so the
        targets are met up to floating-point error.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if not sigma > 0:
        raise ValueError("sigma must be positive; the schedule degenerates at sigma = 0")
    gaps = [float(g) for g in gaps]
    if not gaps:
        raise ValueError("gaps must be nonempty")
    c = gap_scale(n, sigma)
    for g in gaps:
        if not (g > 1 and c * g < 1):
            raise ValueError(f"gap {g!r} outside the admissible range (1, {1 / c!r})")
    for g, h in zip(gaps, gaps[1:]):
        if h > g:
            raise ValueError("gaps must be nonincreasing; a growing gap needs a negative rate")
    a = a_sigma(n, sigma)
    rates = [initial_rate(n, sigma, gaps[0])]
    r = math.exp(-2.0 * rates[0] / n**2)
    for h in gaps[1:]:
        target = c * h
        gamma = math.log(r / target) / _delta(n, a, r)
        gamma = max(gamma, 0.0)
        rates.append(gamma)
        r = r * math.exp(-gamma * _delta(n, a, r))
    return rates
