"""Plain-text formats for matrices and permutations."""

from __future__ import annotations

import os

import numpy as np

from .graph_models import _check_perm, load_edge_list

__all__ = ["read_matrix_csv", "write_matrix_csv", "read_matrix", "read_permutation", "write_permutation"]


def write_matrix_csv(path, M) -> None:
    """Write ``M`` as a line holding ``n`` followed by ``n`` comma-separated rows."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("only square matrices are supported")
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{M.shape[0]}\n")
        for row in M:
            fh.write(",".join(repr(float(v)) for v in row))
            fh.write("\n")


def read_matrix_csv(path) -> np.ndarray:
    with open(path, encoding="ascii") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise ValueError(f"{path}: empty matrix file")
    try:
        n = int(lines[0])
    except ValueError:
        raise ValueError(f"{path}: first line must hold the dimension") from None
    if n < 1 or len(lines) != n + 1:
        raise ValueError(f"{path}: expected {n} rows after the header, found {len(lines) - 1}")
    try:
        M = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None
    if M.shape != (n, n):
        raise ValueError(f"{path}: matrix is not {n} x {n}")
    return M


def read_matrix(path, n_hint=None) -> np.ndarray:
    """Matrix CSV when the name ends in ``.csv``, edge list otherwise."""
    if os.fspath(path).lower().endswith(".csv"):
        return read_matrix_csv(path)
    return load_edge_list(path, n_hint)


def write_permutation(path, perm) -> None:
    perm = _check_perm(perm)
    with open(path, "w", encoding="ascii") as fh:
        fh.writelines(f"{int(v)}\n" for v in perm)


def read_permutation(path) -> np.ndarray:
    with open(path, encoding="ascii") as fh:
        try:
            perm = np.array([int(ln) for ln in fh if ln.strip()], dtype=np.int64)
        except ValueError as exc:
            raise ValueError(f"{path}: {exc}") from None
    return _check_perm(perm)
