"""
Seeded generators for correlated random graph pairs.

Every sampler is a pure function of its parameters and an integer seed.
Seeds are expanded through :class:`numpy.random.SeedSequence`, so a trial
seed derived with :func:`derive_seed` never collides with its siblings and
results do not depend on execution order.

Permutation convention used throughout the package: a permutation is an
integer array ``perm`` with ``perm[i]`` the vertex of the second graph that
vertex ``i`` of the first graph is mapped to.  Its matrix ``P`` has
``P[i, perm[i]] = 1`` and a noiseless pair satisfies ``B = P.T @ A @ P``,
i.e. ``B[perm[i], perm[j]] == A[i, j]``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModelSpec",
    "derive_seed",
    "make_rng",
    "sample_goe",
    "sample_permutation",
    "sample_cgw",
    "sample_cer",
    "standardize_cer",
    "subsample_pair",
    "load_edge_list",
    "sample_model",
    "permutation_matrix",
    "invert_permutation",
    "compose_permutations",
    "is_permutation",
    "conjugate",
    "align",
]

_MASK64 = (1 << 64) - 1


def derive_seed(base: int, *keys: int) -> np.random.SeedSequence:
    """Child seed for ``(base, *keys)``, independent of any other key tuple."""
    return np.random.SeedSequence(entropy=int(base) & _MASK64, spawn_key=tuple(int(k) for k in keys))


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.SeedSequence):
        return np.random.Generator(np.random.PCG64(seed))
    if isinstance(seed, (int, np.integer)):
        if seed < 0:
            raise ValueError(f"seed must be nonnegative, got {seed}")
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed) & _MASK64)))
    raise TypeError(f"seed must be an int or SeedSequence, not {type(seed).__name__}")


# --------------------------------------------------------------------------
# permutations


def is_permutation(perm) -> bool:
    perm = np.asarray(perm)
    if perm.ndim != 1 or not np.issubdtype(perm.dtype, np.integer):
        return False
    n = perm.size
    if n and (perm.min() < 0 or perm.max() >= n):
        return False
    return np.unique(perm).size == n


def _check_perm(perm, n=None) -> np.ndarray:
    perm = np.asarray(perm)
    if not is_permutation(perm):
        raise ValueError("perm is not a permutation of 0..n-1")
    if n is not None and perm.size != n:
        raise ValueError(f"permutation has size {perm.size}, expected {n}")
    return perm.astype(np.intp, copy=False)


def permutation_matrix(perm) -> np.ndarray:
    """0/1 matrix ``P`` with ``P[i, perm[i]] = 1``."""
    perm = _check_perm(perm)
    n = perm.size
    P = np.zeros((n, n))
    P[np.arange(n), perm] = 1.0
    return P


def invert_permutation(perm) -> np.ndarray:
    perm = _check_perm(perm)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size)
    return inv


def compose_permutations(first, second) -> np.ndarray:
    """Map ``i -> second[first[i]]``."""
    first = _check_perm(first)
    second = _check_perm(second, first.size)
    return second[first]


def conjugate(A, perm) -> np.ndarray:
    """Relabel ``A`` by ``perm``: returns ``P.T @ A @ P`` without multiplying."""
    A = np.asarray(A)
    perm = _check_perm(perm, A.shape[0])
    inv = invert_permutation(perm)
    return A[np.ix_(inv, inv)]


def align(B, perm) -> np.ndarray:
    """Undo :func:`conjugate`: ``align(conjugate(A, perm), perm) == A``."""
    B = np.asarray(B)
    perm = _check_perm(perm, B.shape[0])
    return B[np.ix_(perm, perm)]


# --------------------------------------------------------------------------
# samplers


def _goe(rng: np.random.Generator, n: int) -> np.ndarray:
    G = rng.standard_normal((n, n))
    # off-diagonal variance 2/(2n) = 1/n, diagonal variance 4/(2n) = 2/n
    return (G + G.T) / np.sqrt(2.0 * n)


def sample_goe(n: int, seed) -> np.ndarray:
    """Draw a GOE(n) matrix.

    Off-diagonal entries are N(0, 1/n), diagonal entries N(0, 2/n), and the
    result equals its transpose bit for bit.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return _goe(make_rng(seed), n)


def sample_permutation(n: int, seed) -> np.ndarray:
    """Uniformly random permutation of ``0..n-1`` (Fisher-Yates)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return make_rng(seed).permutation(n)


def sample_cgw(n: int, sigma: float, perm, seed):
    """Correlated Gaussian Wigner pair.

    Parameters
    ----------
    n : int
        Number of vertices.
    sigma : float
        Noise level, ``sigma >= 0``. Values above 1 are allowed.
    perm : array of int, shape (n,)
        Ground-truth permutation.
    seed : int or SeedSequence

    Returns
    -------
    A, B : ndarray, shape (n, n)
        ``A`` and ``Z`` are independent GOE(n) draws and
        ``B = P.T @ A @ P + sigma * Z``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not sigma >= 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    perm = _check_perm(perm, n)
    rng = make_rng(seed)
    A = _goe(rng, n)
    Z = _goe(rng, n)
    B = conjugate(A, perm) + sigma * Z
    return A, B


def _simple_graph(n: int, upper: np.ndarray) -> np.ndarray:
    M = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    M[iu] = upper
    return M + M.T


def sample_cer(n: int, sigma: float, p: float, perm, seed):
    """Correlated Erdos-Renyi pair of simple graphs.

    ``A ~ G(n, p)``. Conditionally on ``A`` each aligned pair ``i < j`` of
    ``B`` is an edge with probability ``1 - sigma**2 * (1 - p)`` when
    ``A[i, j] = 1`` and ``sigma**2 * p`` otherwise. Both graphs are
    loop-free 0/1 matrices.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if not 0.0 <= sigma <= 1.0:
        raise ValueError(f"sigma must lie in [0, 1], got {sigma}")
    keep = 1.0 - sigma**2 * (1.0 - p)
    spawn = sigma**2 * p
    perm = _check_perm(perm, n)
    rng = make_rng(seed)
    m = n * (n - 1) // 2
    a = rng.random(m) < p
    u = rng.random(m)
    b = np.where(a, u < keep, u < spawn)
    A = _simple_graph(n, a.astype(float))
    B = conjugate(_simple_graph(n, b.astype(float)), perm)
    return A, B


def standardize_cer(A, p: float) -> np.ndarray:
    """Center a G(n, p) adjacency matrix and divide by ``p (1 - p) n``.

    The mean is ``p`` off the diagonal and ``0`` on it (no self-loops).
    """
    A = np.asarray(A, dtype=float)
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p}")
    n = A.shape[0]
    mean = p * (np.ones((n, n)) - np.eye(n))
    return (A - mean) / (p * (1.0 - p) * n)


def subsample_pair(H, s: float, seed):
    """Two independent edge subsamples of a parent graph.

    Every edge of ``H`` survives in ``A`` with probability ``s`` and, with
    fresh coins, in ``B`` with probability ``s``. No relabeling is applied;
    shuffle ``B`` with :func:`conjugate` if needed.
    """
    H = np.asarray(H, dtype=float)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError("H must be a square matrix")
    if not np.all((H == 0) | (H == 1)):
        raise ValueError("H must be a 0/1 adjacency matrix")
    if not np.array_equal(H, H.T):
        raise ValueError("H must be symmetric")
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    n = H.shape[0]
    rng = make_rng(seed)
    iu = np.triu_indices(n)
    parent = H[iu]
    out = []
    for _ in range(2):
        kept = parent * (rng.random(parent.size) < s)
        M = np.zeros((n, n))
        M[iu] = kept
        out.append(M + np.triu(M, 1).T)
    return out[0], out[1]


def load_edge_list(path: str | os.PathLike, n_hint: int | None = None) -> np.ndarray:
    """Read an undirected edge list into a dense 0/1 matrix.

    One ``u v`` pair of 0-indexed vertex ids per line; ``#`` starts a
    comment. Direction and duplicates are ignored and self-loops dropped.
    The matrix has size ``max(n_hint, 1 + largest id)``.
    """
    edges = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected two vertex ids, got {raw.strip()!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: vertex ids must be integers") from None
            if u < 0 or v < 0:
                raise ValueError(f"{path}:{lineno}: negative vertex id")
            edges.append((u, v))
    size = max([0] + [max(e) + 1 for e in edges])
    if n_hint is not None:
        size = max(size, int(n_hint))
    M = np.zeros((size, size))
    for u, v in edges:
        if u != v:
            M[u, v] = M[v, u] = 1.0
    return M


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelSpec:
    """Which generative model to sample and with what parameters.

    ``kind`` is ``"CGW"``, ``"CER"`` or ``"SUBSAMPLE"``. Fields that the
    kind does not use are ignored.
    """

    kind: str
    n: int
    sigma: float = 0.0
    p: float = 0.5
    s: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("CGW", "CER", "SUBSAMPLE"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if not 0.0 <= self.s <= 1.0:
            raise ValueError("s must lie in [0, 1]")


def sample_model(spec: ModelSpec, seed=None, parent=None, standardize: bool = True):
    """Sample ``(A, B, perm)`` for ``spec``.

    A uniformly random ground truth is drawn from the same seed stream as
    the graphs. CER pairs are standardized unless ``standardize`` is False.
    SUBSAMPLE needs the parent adjacency matrix ``parent``; its second
    subsample is relabeled by the ground truth.
    """
    seed = spec.seed if seed is None else seed
    root = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(int(seed))
    perm_seed, graph_seed = root.spawn(2)
    perm = sample_permutation(spec.n, perm_seed)
    if spec.kind == "CGW":
        A, B = sample_cgw(spec.n, spec.sigma, perm, graph_seed)
    elif spec.kind == "CER":
        A, B = sample_cer(spec.n, spec.sigma, spec.p, perm, graph_seed)
        if standardize:
            # B is a relabeled G(n, p) graph, so the same centering applies
            A, B = standardize_cer(A, spec.p), standardize_cer(B, spec.p)
    else:
        if parent is None:
            raise ValueError("SUBSAMPLE model needs a parent graph")
        parent = np.asarray(parent, dtype=float)
        if parent.shape != (spec.n, spec.n):
            raise ValueError(f"parent graph has shape {parent.shape}, expected n={spec.n}")
        A, B = subsample_pair(parent, spec.s, graph_seed)
        B = conjugate(B, perm)
    return A, B, perm
