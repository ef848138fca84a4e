"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Solves ``min c.x  s.t.  A x = b, x >= 0``.  Intended for the small transport
and split-absolute-value programs in :mod:`qcb.ensembles`; nothing here is
tuned for size.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverFailure


@dataclass
class LPResult:
    x: np.ndarray
    objective: float
    pivots: int


def _pivot(t: np.ndarray, row: int, col: int) -> None:
    t[row] /= t[row, col]
    factors = t[:, col].copy()
    factors[row] = 0.0
    t -= np.outer(factors, t[row])


def _run(t: np.ndarray, basis: list[int], cost: np.ndarray, ncols: int, cap: int, tol: float) -> int:
    m = len(basis)
    pivots = 0
    while True:
        reduced = cost[:ncols] - cost[basis] @ t[:m, :ncols]
        entering = np.flatnonzero(reduced < -tol)
        if entering.size == 0:
            return pivots
        col = int(entering[0])
        column = t[:m, col]
        rows = np.flatnonzero(column > tol)
        if rows.size == 0:
            raise SolverFailure("linear program is unbounded")
        ratios = t[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(t, row, col)
        basis[row] = col
        pivots += 1
        if pivots > cap:
            raise SolverFailure(f"simplex exceeded {cap} pivots")


def simplex(c, a_eq, b_eq, tol: float = 1e-10, max_pivots: int = 200_000) -> LPResult:
    c = np.asarray(c, dtype=float)
    a = np.array(a_eq, dtype=float)
    b = np.array(b_eq, dtype=float)
    m, n = a.shape
    flip = b < 0
    a[flip] *= -1
    b[flip] *= -1

    t = np.zeros((m, n + m + 1))
    t[:, :n] = a
    t[:, n : n + m] = np.eye(m)
    t[:, -1] = b
    basis = list(range(n, n + m))
    phase1 = np.zeros(n + m)
    phase1[n:] = 1.0
    pivots = _run(t, basis, phase1, n + m, max_pivots, tol)
    infeas = float(phase1[basis] @ t[:, -1])
    if infeas > 1e-8 * max(1.0, float(np.abs(b).max(initial=0.0))):
        raise SolverFailure(f"linear program is infeasible (phase-1 residual {infeas:.3e})")

    keep_rows = []
    for r in range(m):
        if basis[r] < n:
            keep_rows.append(r)
            continue
        cand = np.flatnonzero(np.abs(t[r, :n]) > 1e-9)
        if cand.size:
            _pivot(t, r, int(cand[0]))
            basis[r] = int(cand[0])
            pivots += 1
            keep_rows.append(r)
    t = np.hstack([t[keep_rows, :n], t[keep_rows, -1:]])
    basis = [basis[r] for r in keep_rows]

    pivots += _run(t, basis, c, n, max_pivots, tol)
    x = np.zeros(n)
    x[basis] = t[:, -1]
    x[np.abs(x) < 1e-14] = 0.0
    return LPResult(x=x, objective=float(c @ x), pivots=pivots)
