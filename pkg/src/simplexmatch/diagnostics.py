"""
Sufficiency-condition checks for greedy rounding, property tracking and
error CDFs.

Pair conditions are tested on ordered pairs ``(i, j)``, ``i != j``, one
entry ``C[i, j]`` at a time:

* ``MAX``: ``max(C[i, i], C[j, j]) > C[i, j]``
* ``SUM``: ``C[i, i] + C[j, j] > 2 C[i, j]``
* ``SUMMAX``: ``C[i, i] + C[j, j] > C[i, j]``

A pair passes the symmetric form of a condition exactly when both of its
orientations pass, so a zero failure count is equivalent to the condition
holding for every pair. Equality is a failure.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .graph_models import _check_perm
from .rounding import gmwm, overlap

__all__ = [
    "VARIANTS",
    "PropertyReport",
    "PDCertificate",
    "count_suffcond_failures",
    "count_nondominant_rows",
    "property_report",
    "error_cdf",
    "grampa_pd_certificate",
]

VARIANTS = ("MAX", "SUM", "SUMMAX")


def _square(C):
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError("C must be a square matrix")
    return C


def _pair_failures(C, variant):
    d = np.diag(C)
    if variant == "MAX":
        ok = np.maximum.outer(d, d) > C
    elif variant == "SUM":
        ok = np.add.outer(d, d) > 2.0 * C
    elif variant == "SUMMAX":
        ok = np.add.outer(d, d) > C
    else:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    np.fill_diagonal(ok, True)
    return ~ok


def count_suffcond_failures(C, variant: str = "MAX") -> int:
    """Number of ordered pairs ``i != j`` violating the chosen pair condition.

    Parameters
    ----------
    C : array_like
        Square similarity matrix.
    variant : {"MAX", "SUM", "SUMMAX"}
        Which condition to test. ``SUM`` only guarantees greedy recovery for
        symmetric ``C``; a warning is issued otherwise.
    """
    C = _square(C)
    variant = variant.upper()
    if variant == "SUM" and not np.allclose(C, C.T, rtol=1e-9, atol=1e-12 * np.abs(C).max()):
        warnings.warn("SUM condition evaluated on a non-symmetric matrix", stacklevel=2)
    return int(_pair_failures(C, variant).sum())


def count_nondominant_rows(C) -> int:
    """Rows whose diagonal entry does not strictly exceed every other entry."""
    C = _square(C)
    n = C.shape[0]
    if n == 1:
        return 0
    off = C.copy()
    np.fill_diagonal(off, -np.inf)
    return int(np.count_nonzero(np.diag(C) <= off.max(axis=1)))


@dataclass(frozen=True)
class PropertyReport:
    """Fractions of pairs/rows satisfying each property, plus rounded overlap."""

    frac_suffcond_max: float
    frac_suffcond_sum: float
    frac_suffcond_summax: float
    frac_diag_dominant_rows: float
    overlap_after_rounding: float

    def as_dict(self):
        return asdict(self)


def property_report(X, P_star) -> PropertyReport:
    """Evaluate all properties of ``X`` relative to the ground truth ``P_star``.

    Columns are reordered by ``P_star`` first, so that the true matches sit
    on the diagonal.
    """
    X = _square(X)
    P_star = _check_perm(P_star, X.shape[0])
    n = X.shape[0]
    C = X[:, P_star]
    pairs = n * (n - 1)

    def frac(variant):
        return 1.0 if pairs == 0 else 1.0 - int(_pair_failures(C, variant).sum()) / pairs

    return PropertyReport(
        frac_suffcond_max=frac("MAX"),
        frac_suffcond_sum=frac("SUM"),
        frac_suffcond_summax=frac("SUMMAX"),
        frac_diag_dominant_rows=1.0 - count_nondominant_rows(C) / n,
        overlap_after_rounding=overlap(gmwm(X), P_star),
    )


def error_cdf(errors, grid) -> np.ndarray:
    """Fraction of errors at or below each threshold of ``grid``."""
    e = np.asarray(errors, dtype=float).ravel()
    t = np.asarray(grid, dtype=float).ravel()
    if e.size == 0:
        raise ValueError("errors must be nonempty")
    if np.any(np.isnan(e)) or np.any(e < 0):
        raise ValueError("errors must be nonnegative numbers")
    if np.any(np.diff(t) < 0):
        raise ValueError("grid must be ascending")
    return np.searchsorted(np.sort(e), t, side="right") / e.size


@dataclass(frozen=True)
class PDCertificate:
    """Result of :func:`grampa_pd_certificate`.

    ``method`` is ``"float64"`` or ``"mpfr"``; ``precision`` is the number
    of mantissa bits used; ``log10_min_pivot`` is the base-10 logarithm of
    the smallest eigenvalue (float64 path) or Cholesky pivot (mpfr path) of
    the kernel.
    """

    positive_definite: bool
    method: str
    precision: int
    log10_min_pivot: float


def _mp_cholesky_min_pivot(lam, eta, prec):
    import gmpy2
    from gmpy2 import mpfr

    with gmpy2.context(precision=prec):
        x = np.array([mpfr(float(v)) for v in lam], dtype=object)
        e2 = mpfr(float(eta)) ** 2
        M = 1 / (e2 + (x[:, None] - x[None, :]) ** 2)
        best = None
        for k in range(len(x)):
            p = M[k, k]
            if p <= 0:
                return None
            best = p if best is None or p < best else best
            if k + 1 < len(x):
                col = M[k + 1 :, k] / p
                M[k + 1 :, k + 1 :] -= np.outer(col, M[k, k + 1 :])
        return best


def grampa_pd_certificate(A, eta: float, start_precision: int = 128, max_precision: int = 2048) -> PDCertificate:
    """Certify that the noiseless GRAMPA matrix of ``A`` is positive definite.

    With ``A = V diag(lam) V^T`` the matrix equals ``V D K D V^T`` where
    ``D = diag(V^T 1)`` and ``K`` is the Lorentzian kernel of ``lam``
    against itself. By Sylvester's law of inertia it is positive definite
    exactly when ``K`` is and no entry of ``V^T 1`` vanishes.

    ``K`` is a Cauchy-like matrix whose smallest eigenvalues fall far below
    double-precision roundoff once ``eta`` is not small, so a float64
    eigenvalue test is tried first and, failing that, a Cholesky
    factorization in multiprecision arithmetic with doubling precision. A
    precision is accepted when every pivot is positive and the smallest one
    exceeds ``n**2 * 2**(-prec/2) * max|K|``, far above the roundoff level.
    ``start_precision`` lets a batch of similar matrices skip precisions
    already known to be too low.
    """
    from .solvers.spectral import grampa_kernel, sym_eigh

    A = _square(A)
    n = A.shape[0]
    lam, V = sym_eigh(A)
    u = V.sum(axis=0)
    if np.any(u == 0) or np.linalg.norm(V.T @ V - np.eye(n), 2) > 0.5:
        return PDCertificate(False, "float64", 53, float("nan"))
    K = grampa_kernel(lam, lam, eta)
    kmax = float(np.abs(K).max())
    ev_min = float(np.linalg.eigvalsh(K).min())
    if ev_min > 10 * n * np.finfo(float).eps * np.linalg.norm(K, 2):
        return PDCertificate(True, "float64", 53, float(np.log10(ev_min)))
    import gmpy2

    prec = int(start_precision)
    while prec <= max_precision:
        piv = _mp_cholesky_min_pivot(lam, eta, prec)
        # compare in log2 so the threshold cannot underflow at high precision
        if piv is not None and float(gmpy2.log2(piv)) > np.log2(n * n * kmax) - prec / 2:
            return PDCertificate(True, "mpfr", prec, float(gmpy2.log10(piv)))
        prec *= 2
    return PDCertificate(False, "mpfr", prec // 2, float("nan"))
