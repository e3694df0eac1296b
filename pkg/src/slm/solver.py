"""Coordinate-descent solver for the l1-penalized quadratic direction loss.

Minimizes  b' Omega b - 2 a' b + lambda * |b|_1  by cyclic coordinate
descent with soft-thresholding.  The coordinate update is
b_j <- S(a_j - sum_{k!=j} Omega_jk b_k, lambda/2) / Omega_jj.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

DIAG_FLOOR = 1e-8
DEFAULT_TOL = 1e-7
DEFAULT_MAX_ITER = 10_000


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadProblem:
    omega: np.ndarray
    a: np.ndarray
    lam: float

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        a = np.asarray(self.a, dtype=float)
        if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
            raise ValueError("omega must be square")
        if a.shape != (omega.shape[0],):
            raise ValueError("a must match omega's dimension")
        if not (np.isfinite(omega).all() and np.isfinite(a).all()):
            raise ValueError("non-finite entries")
        if np.abs(omega - omega.T).max(initial=0.0) > 1e-10:
            raise ValueError("omega must be symmetric within 1e-10")
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "a", a)


@dataclass(frozen=True)
class SparseSolution:
    b: np.ndarray
    active_set: tuple[int, ...]
    iterations: int
    kkt_residual: float
    converged: bool = True


@njit(cache=True)
def _cd_sweeps(omega, a, lam, b, tol, max_iter, diag_floor):
    p = a.shape[0]
    half = lam / 2.0
    for sweep in range(max_iter):
        max_change = 0.0
        for j in range(p):
            ojj = omega[j, j]
            if ojj < diag_floor:
                ojj = diag_floor
            # partial residual: a_j - sum_{k != j} Omega_jk b_k
            r = a[j] - np.dot(omega[j], b) + omega[j, j] * b[j]
            if r > half:
                new = (r - half) / ojj
            elif r < -half:
                new = (r + half) / ojj
            else:
                new = 0.0
            change = abs(new - b[j])
            if change > max_change:
                max_change = change
            b[j] = new
        if max_change < tol:
            return sweep + 1
    return max_iter


def kkt_residual(problem: QuadProblem, b: np.ndarray) -> float:
    """Max violation of the stationarity conditions at b."""
    b = np.asarray(b, dtype=float)
    if b.shape != problem.a.shape:
        raise ValueError("shape mismatch")
    g = 2.0 * (problem.omega @ b - problem.a)
    active = b != 0
    res = 0.0
    if active.any():
        res = np.abs(g[active] + problem.lam * np.sign(b[active])).max()
    if (~active).any():
        res = max(res, max(0.0, np.abs(g[~active]).max() - problem.lam))
    return float(res)


def objective(problem: QuadProblem, b: np.ndarray) -> float:
    b = np.asarray(b, dtype=float)
    return float(b @ problem.omega @ b - 2.0 * problem.a @ b
                 + problem.lam * np.abs(b).sum())


def solve(problem: QuadProblem, tol: float = DEFAULT_TOL,
          max_iter: int = DEFAULT_MAX_ITER,
          warm_start: np.ndarray | None = None) -> SparseSolution:
    if tol <= 0:
        raise ValueError("tol must be positive")
    b = (np.zeros_like(problem.a) if warm_start is None
         else np.array(warm_start, dtype=float))
    if b.shape != problem.a.shape:
        raise ValueError("warm start has wrong shape")
    iters = _cd_sweeps(problem.omega, problem.a, float(problem.lam), b,
                       float(tol), int(max_iter), DIAG_FLOOR)
    res = kkt_residual(problem, b)
    converged = iters < max_iter or res <= tol
    return SparseSolution(
        b=b,
        active_set=tuple(int(i) for i in np.flatnonzero(b)),
        iterations=int(iters),
        kkt_residual=res,
        converged=bool(converged),
    )
