"""
Step-size policies for the simplex solvers.

``FIXED_MD`` and ``FIXED_PGD`` replace the unknown gradient bound by the
largest gradient norm observed so far, so they are not constant in
practice. Both put that bound in the numerator; ``invert_fixed=True``
divides by it instead, as classical mirror-descent step sizes do.

``HEURISTIC_PGD`` computes ``theta ||G||_F**2 / E**2``. At the barycenter
this is enormous and PGD stalls on a vertex, so ``POLYAK_PGD`` offers the
Polyak step ``theta E / (2 ||G||_F**2)`` for target energy 0 (the factor 2
accounts for ``G`` being half the Euclidean gradient).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = ["StepSizeRule", "next_gamma", "parse_step", "STEP_KINDS"]

STEP_KINDS = (
    "FIXED_MD",
    "FIXED_PGD",
    "DYNAMIC_MD",
    "DYNAMIC_PGD",
    "HEURISTIC_PGD",
    "POLYAK_PGD",
    "CONSTANT",
)


@dataclass
class StepSizeRule:
    """A step-size policy plus its running state.

    Attributes
    ----------
    kind : str
        One of :data:`STEP_KINDS`.
    N : int or None
        Iteration budget used by the fixed rules. Solvers fill it in when
        left as None.
    theta : float
        Multiplier of the heuristic and Polyak PGD rules.
    gamma : float
        Step of the ``CONSTANT`` rule.
    invert_fixed : bool
        Divide by, rather than multiply with, the running gradient bound in
        the fixed rules.
    running_L : float
        Largest gradient norm seen so far (fixed rules only).
    """

    kind: str
    N: int | None = None
    theta: float = 1.0
    gamma: float = 0.0
    invert_fixed: bool = False
    running_L: float = 0.0

    def __post_init__(self):
        if self.kind not in STEP_KINDS:
            raise ValueError(f"unknown step rule {self.kind!r}; expected one of {STEP_KINDS}")
        if self.N is not None and self.N < 0:
            raise ValueError("N must be nonnegative")
        if self.kind in ("HEURISTIC_PGD", "POLYAK_PGD") and not self.theta > 0:
            raise ValueError("theta must be positive")
        if self.kind == "CONSTANT" and not (self.gamma >= 0 and math.isfinite(self.gamma)):
            raise ValueError("constant step must be finite and nonnegative")

    @classmethod
    def fixed_md(cls, N=None, invert=False):
        return cls("FIXED_MD", N=N, invert_fixed=invert)

    @classmethod
    def fixed_pgd(cls, N=None, invert=False):
        return cls("FIXED_PGD", N=N, invert_fixed=invert)

    @classmethod
    def dynamic_md(cls):
        return cls("DYNAMIC_MD")

    @classmethod
    def dynamic_pgd(cls):
        return cls("DYNAMIC_PGD")

    @classmethod
    def heuristic_pgd(cls, theta=1.0):
        return cls("HEURISTIC_PGD", theta=theta)

    @classmethod
    def polyak_pgd(cls, theta=1.0):
        return cls("POLYAK_PGD", theta=theta)

    @classmethod
    def constant(cls, gamma):
        return cls("CONSTANT", gamma=float(gamma))

    def fresh(self, N=None):
        """Copy with the running state cleared and ``N`` filled in if unset."""
        return replace(self, N=self.N if self.N is not None else N, running_L=0.0)


def _fixed(rule: StepSizeRule, norm: float, scale: float) -> float:
    if rule.N is None:
        raise ValueError(f"{rule.kind} needs the iteration budget N")
    rule.running_L = max(rule.running_L, norm)
    L = rule.running_L
    if rule.invert_fixed:
        return 0.0 if L == 0.0 else scale / (L * math.sqrt(rule.N + 1))
    return scale * L / math.sqrt(rule.N + 1)


def next_gamma(rule: StepSizeRule, k: int, G, energy: float) -> float:
    """Step size for iteration ``k`` given the current gradient and energy.

    Fixed rules update ``rule.running_L`` in place before computing the
    step. Dynamic and Polyak rules return 0 for a vanishing gradient and
    the heuristic rule returns 0 once the energy is exactly zero.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    G = np.asarray(G)
    kind = rule.kind
    if kind == "CONSTANT":
        return rule.gamma
    if kind == "FIXED_MD":
        n = G.shape[0]
        return _fixed(rule, float(np.abs(G).max()), math.sqrt(2.0 * math.log(n)))
    if kind == "FIXED_PGD":
        return _fixed(rule, float(np.linalg.norm(G)), math.sqrt(2.0))
    if kind == "DYNAMIC_MD":
        g = float(np.abs(G).max())
        return 0.0 if g == 0.0 else math.sqrt(2.0) / (g * math.sqrt(k + 1))
    if kind == "DYNAMIC_PGD":
        g = float(np.linalg.norm(G))
        return 0.0 if g == 0.0 else math.sqrt(2.0) / (g * math.sqrt(k + 1))
    if kind == "POLYAK_PGD":
        g2 = float(np.vdot(G, G))
        return 0.0 if g2 == 0.0 else rule.theta * energy / (2.0 * g2)
    # HEURISTIC_PGD
    if energy == 0.0:
        return 0.0
    g2 = float(np.vdot(G, G))
    return rule.theta * g2 / energy**2


def parse_step(text: str, algo: str = "emd", N: int | None = None) -> StepSizeRule:
    """Build a rule from ``fixed``, ``dynamic``, ``heuristic[:theta]``, ``polyak[:theta]`` or ``const:gamma``.

    ``fixed`` and ``dynamic`` pick the mirror-descent or PGD variant from
    ``algo``; ``fixed-inv`` selects the inverted fixed rule.
    """
    name, _, arg = text.strip().partition(":")
    name = name.lower()
    md = algo.lower() in ("emd", "md", "emdgm")
    if name in ("fixed", "fixed-inv"):
        inv = name == "fixed-inv"
        return StepSizeRule.fixed_md(N, inv) if md else StepSizeRule.fixed_pgd(N, inv)
    if name == "dynamic":
        return StepSizeRule.dynamic_md() if md else StepSizeRule.dynamic_pgd()
    if name == "heuristic":
        return StepSizeRule.heuristic_pgd(float(arg) if arg else 1.0)
    if name == "polyak":
        return StepSizeRule.polyak_pgd(float(arg) if arg else 1.0)
    if name in ("const", "constant"):
        if not arg:
            raise ValueError("const step needs a value, e.g. const:0.5")
        return StepSizeRule.constant(float(arg))
    raise ValueError(f"cannot parse step rule {text!r}")
