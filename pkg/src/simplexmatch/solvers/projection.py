"""Euclidean projection onto the unit simplex of ``n x n`` matrices."""

import numpy as np

__all__ = ["project_simplex", "simplex_threshold"]


def _relative_threshold(y):
    # work relative to the largest entry to limit cancellation in the cumsum
    top = y.max()
    u = np.sort(y - top)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, u.size + 1)
    # u is decreasing, so the active prefix ends at the last index where this holds
    rho = np.nonzero(u * ks > css)[0][-1]
    nu = css[rho] / (rho + 1)
    # one correction on the fixed support absorbs the rounding of the cumsum
    active = u[: rho + 1] - nu
    nu += (active[active > 0].sum() - 1.0) / (rho + 1)
    return top, nu


def _check(Y):
    y = np.asarray(Y, dtype=float)
    if y.size == 0:
        raise ValueError("cannot project an empty array")
    if not np.all(np.isfinite(y)):
        raise ValueError("Y must be finite")
    return y


def simplex_threshold(Y) -> float:
    """Threshold ``nu`` such that ``max(Y - nu, 0)`` sums to one.

    Sort-and-threshold over all entries; ``O(m log m)`` for ``m`` entries.
    """
    top, nu = _relative_threshold(_check(Y).ravel())
    return float(top + nu)


def project_simplex(Y) -> np.ndarray:
    """Closest point (Frobenius norm) to ``Y`` with nonnegative entries summing to 1.

    Parameters
    ----------
    Y : array_like
        Any finite array; the projection treats all entries as one vector.

    Returns
    -------
    X : ndarray
        Same shape as ``Y``, equal to ``max(Y - nu, 0)`` for the unique
        ``nu`` that makes the entries sum to one.
    """
    Y = _check(Y)
    top, nu = _relative_threshold(Y.ravel())
    return np.maximum((Y - top) - nu, 0.0)
