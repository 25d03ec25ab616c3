"""Spectral similarity baselines: GRAMPA and Umeyama."""

from __future__ import annotations

import numpy as np

__all__ = ["sym_eigh", "grampa_kernel", "grampa_similarity", "umeyama_similarity"]


def _check_sym(M, name):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} must be finite")
    if not np.allclose(M, M.T, rtol=0, atol=1e-12 * max(1.0, np.abs(M).max())):
        raise ValueError(f"{name} must be symmetric")
    return M


def sym_eigh(M):
    """Eigen-decomposition with ascending eigenvalues and a fixed sign convention.

    Each eigenvector is flipped so that its largest-magnitude coordinate
    (first one on ties) is positive.
    """
    w, V = np.linalg.eigh(M)
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return w, V * signs


def grampa_kernel(lam, mu, eta: float) -> np.ndarray:
    """Lorentzian kernel ``1 / (eta**2 + (lam_i - mu_j)**2)``."""
    lam = np.asarray(lam, dtype=float)
    mu = np.asarray(mu, dtype=float)
    with np.errstate(divide="ignore"):
        K = 1.0 / (eta * eta + (lam[:, None] - mu[None, :]) ** 2)
    if not np.all(np.isfinite(K)):
        raise ValueError("eta == 0 with a coincident eigenvalue pair gives an infinite kernel entry")
    return K


def grampa_similarity(A, B, eta: float) -> np.ndarray:
    """GRAMPA similarity ``V (K * (V^T 1)(W^T 1)^T) W^T``.

    Parameters
    ----------
    A, B : ndarray
        Symmetric ``n x n`` matrices with eigenpairs ``(lam, V)`` and ``(mu, W)``.
    eta : float
        Regularization width of the kernel.

    Returns
    -------
    X : ndarray
        Similarity matrix; entry ``(i, j)`` scores vertex ``i`` of ``A``
        against vertex ``j`` of ``B``.
    """
    A = _check_sym(A, "A")
    B = _check_sym(B, "B")
    if A.shape != B.shape:
        raise ValueError("A and B must have the same shape")
    if not np.isfinite(eta):
        raise ValueError("eta must be finite")
    lam, V = sym_eigh(A)
    mu, W = sym_eigh(B)
    K = grampa_kernel(lam, mu, eta)
    u = V.sum(axis=0)
    v = W.sum(axis=0)
    return V @ (K * np.outer(u, v)) @ W.T


def umeyama_similarity(A, B) -> np.ndarray:
    """Umeyama similarity ``|V| |W|^T`` from eigenvectors in ascending order."""
    A = _check_sym(A, "A")
    B = _check_sym(B, "B")
    if A.shape != B.shape:
        raise ValueError("A and B must have the same shape")
    _, V = sym_eigh(A)
    _, W = sym_eigh(B)
    return np.abs(V) @ np.abs(W).T
