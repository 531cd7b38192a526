"""Steady-state covariance matrix from the Lyapunov equation A V + V A^T = -D.

The primary solver vectorizes the symmetric unknown (n(n+1)/2 entries) into
one dense linear solve, which is exact and cheap at n = 8.  A
Schur-decomposition backend (scipy's Bartels-Stewart implementation) is
kept as an optional alternative and is validated against the primary in the
test suite.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg

from .linear_model import MODE_ORDER, is_stable


class UnstableSystemError(RuntimeError):
    """No stationary covariance exists: the drift matrix is not Hurwitz."""


@dataclass(frozen=True)
class CovMatrix:
    """Symmetric 2n x 2n covariance matrix with mode labels."""

    V: np.ndarray
    mode_order: tuple

    @property
    def n_modes(self) -> int:
        return len(self.mode_order)

    def block(self, modes) -> "CovMatrix":
        return extract_block(self, modes)


@lru_cache(maxsize=8)
def _sym_solve_structure(n: int):
    """Index machinery mapping vec(V) onto the n(n+1)/2 symmetric unknowns."""
    iu = np.triu_indices(n)
    nsym = iu[0].size
    # duplication: vec_rowmajor(V) = P @ vech(V) for symmetric V
    pair_index = np.zeros((n, n), dtype=int)
    pair_index[iu] = np.arange(nsym)
    pair_index = np.maximum(pair_index, pair_index.T)
    P = np.zeros((n * n, nsym))
    P[np.arange(n * n), pair_index.ravel()] = 1.0
    rows = (iu[0] * n + iu[1])  # equations kept: upper triangle of A V + V A^T
    return iu, P, rows


def solve_lyapunov(A: np.ndarray, D: np.ndarray, mode_order: tuple = MODE_ORDER,
                   method: str = "sym-vec") -> CovMatrix:
    """Solve A V + V A^T = -D for the stationary covariance matrix V.

    Refuses unstable drift matrices (there is no steady state to report).
    The output is symmetrized and checked against the residual bound
    ||A V + V A^T + D|| <= 1e-10 (||A|| ||V|| + ||D||).
    """
    A = np.asarray(A, dtype=float)
    D = np.asarray(D, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or D.shape != (n, n):
        raise ValueError("A and D must be square and of equal size")
    stable, abscissa = is_stable(A)
    if not stable:
        raise UnstableSystemError(
            f"drift matrix is not stable (spectral abscissa {abscissa:.6g}); "
            "the system has no steady state")

    if method == "sym-vec":
        iu, P, rows = _sym_solve_structure(n)
        L = np.kron(A, np.eye(n)) + np.kron(np.eye(n), A)  # row-major vec
        M = L[rows] @ P
        cond = np.linalg.cond(M)
        if cond > 1e12:
            warnings.warn(f"Lyapunov system is ill-conditioned "
                          f"(condition estimate {cond:.3g}); the covariance "
                          "matrix may lose accuracy", RuntimeWarning,
                          stacklevel=2)
        x = np.linalg.solve(M, -D[iu])
        V = np.zeros((n, n))
        V[iu] = x
        V = V + V.T - np.diag(np.diag(V))
    elif method == "schur":
        V = scipy.linalg.solve_continuous_lyapunov(A, -D)
    else:
        raise ValueError(f"unknown method {method!r}")

    asym = np.linalg.norm(V - V.T) / max(np.linalg.norm(V), 1e-300)
    if asym > 1e-8:
        raise RuntimeError(f"Lyapunov solution asymmetric beyond tolerance: {asym:.3g}")
    V = 0.5 * (V + V.T)

    residual = np.linalg.norm(A @ V + V @ A.T + D)
    bound = 1e-10 * (np.linalg.norm(A) * np.linalg.norm(V) + np.linalg.norm(D))
    if residual > bound:
        raise RuntimeError(
            f"Lyapunov residual {residual:.3g} exceeds bound {bound:.3g} "
            "(ill-conditioned solve)")
    return CovMatrix(V=V, mode_order=tuple(mode_order))


def extract_block(cm: CovMatrix, modes) -> CovMatrix:
    """Principal submatrix for the requested modes, in the requested order."""
    modes = tuple(modes)
    pos = {label: i for i, label in enumerate(cm.mode_order)}
    for label in modes:
        if label not in pos:
            raise KeyError(f"unknown mode label {label!r}")
    idx = np.array([k for label in modes
                    for k in (2 * pos[label], 2 * pos[label] + 1)])
    return CovMatrix(V=cm.V[np.ix_(idx, idx)], mode_order=modes)
