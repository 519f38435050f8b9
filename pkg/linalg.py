"""Exact rank computations for the Margolis engine.

Two independent routes: dense elimination over F_p with numpy, and
fraction-free (Bareiss) elimination over F_p[tau, rho], which yields the rank
over the fraction field without ever dividing inexactly.
"""
from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from coeff import Coeff


def fp_row_echelon(matrix: np.ndarray, prime: int) -> tuple[np.ndarray, list[int]]:
    """Row-reduce an integer matrix over F_p.

    Returns:
        tuple[np.ndarray, list[int]]: the echelon form (int64, entries in
        [0, p)) and the pivot columns; the number of pivots is the rank.
    """
    R = np.asarray(matrix, dtype=np.int64) % prime
    R = R.copy()
    if R.ndim != 2:
        raise ValueError(f"Expected a matrix, got an array of shape {R.shape}")
    m, n = R.shape
    pivot_cols: list[int] = []
    pivot_row = 0
    for col in range(n):
        if pivot_row == m:
            break
        nonzero = np.nonzero(R[pivot_row:, col])[0]
        if nonzero.size == 0:
            continue
        found = pivot_row + int(nonzero[0])
        if found != pivot_row:
            R[[pivot_row, found]] = R[[found, pivot_row]]
        inv = pow(int(R[pivot_row, col]), -1, prime)
        R[pivot_row] = R[pivot_row] * inv % prime
        below = R[pivot_row + 1 :, col].copy()
        if below.any():
            R[pivot_row + 1 :] = (
                R[pivot_row + 1 :] - np.outer(below, R[pivot_row])
            ) % prime
        pivot_cols.append(col)
        pivot_row += 1
    return R, pivot_cols


def fp_rank(matrix: np.ndarray, prime: int) -> int:
    if matrix.size == 0:
        return 0
    _, pivots = fp_row_echelon(matrix, prime)
    return len(pivots)


def bareiss_rank(rows: Sequence[Sequence[Coeff]]) -> int:
    """Rank over Frac(F_p[tau, rho]) by fraction-free elimination.

    Every division performed is exact (Sylvester's identity), which
    Coeff.exquo asserts.
    """
    if not rows or not rows[0]:
        return 0
    M = [list(r) for r in rows]
    m, n = len(M), len(M[0])
    if any(len(r) != n for r in M):
        raise ValueError("Ragged matrix")
    prev = Coeff.one(M[0][0].prime, M[0][0].mode)
    rank = 0
    for col in range(n):
        if rank == m:
            break
        pivot = next((i for i in range(rank, m) if not M[i][col].is_zero()), None)
        if pivot is None:
            continue
        M[rank], M[pivot] = M[pivot], M[rank]
        piv = M[rank][col]
        zero = piv.zero(piv.prime, piv.mode)
        for i in range(rank + 1, m):
            lead = M[i][col]
            for j in range(col + 1, n):
                entry = piv * M[i][j] - lead * M[rank][j]
                M[i][j] = entry.exquo(prev) if entry else zero
            M[i][col] = zero
        prev = piv
        rank += 1
    logging.debug(f"Bareiss elimination of a {m}x{n} matrix has rank {rank}")
    return rank
