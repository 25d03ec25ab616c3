"""Greedy maximum-weight matching and overlap scoring."""

from __future__ import annotations

import numpy as np

from .graph_models import _check_perm, permutation_matrix

__all__ = ["gmwm", "gmwm_matrix", "overlap"]


def gmwm(C) -> np.ndarray:
    """Round a similarity matrix to a permutation by greedy maximum-weight matching.

    Repeatedly takes the largest remaining entry, assigns its row to its
    column and discards both. Ties go to the smaller row, then the smaller
    column.

    Parameters
    ----------
    C : array_like
        Finite square matrix.

    Returns
    -------
    perm : ndarray of int
        ``perm[i]`` is the column matched to row ``i``.
    """
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError("C must be square")
    if not np.all(np.isfinite(C)):
        raise ValueError("C must be finite")
    n = C.shape[0]
    # stable sort of -C keeps row-major order among equal values
    order = np.argsort(-C.ravel(), kind="stable")
    rows, cols = np.divmod(order, n)
    perm = np.full(n, -1, dtype=np.int64)
    col_used = np.zeros(n, dtype=bool)
    left = n
    for r, c in zip(rows.tolist(), cols.tolist()):
        if perm[r] < 0 and not col_used[c]:
            perm[r] = c
            col_used[c] = True
            left -= 1
            if left == 0:
                break
    return perm


def gmwm_matrix(C) -> np.ndarray:
    """Permutation matrix of :func:`gmwm` (``P[i, perm[i]] = 1``)."""
    return permutation_matrix(gmwm(C))


def overlap(P, P_star) -> float:
    """Fraction of vertices ``i`` with ``P[i] == P_star[i]``."""
    P = _check_perm(P)
    P_star = _check_perm(P_star)
    if P.shape != P_star.shape:
        raise ValueError(f"size mismatch: {P.size} vs {P_star.size}")
    return float(np.mean(P == P_star))
