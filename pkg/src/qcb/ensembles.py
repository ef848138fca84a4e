"""Discrete ensembles of states and three distances between them.

``d0``      ordered distance, half the summed trace norms of ``p_i rho_i - q_i sigma_i``
``d_k``     Kantorovich (optimal transport) distance, trace-distance ground cost
``d_star``  the factorized distance: infimum of ``d0`` over splittings and
            permutations, computed from its two-coupling form

``d_star`` minimizes a sum of convex, positively homogeneous functions
``f_ij(a, b) = ||a rho_i - b sigma_j||_1`` over two couplings.  The solver is
Kelley's cutting-plane method: every eigendecomposition of ``a rho_i - b sigma_j``
yields the supporting hyperplane ``f_ij >= a Tr(S rho_i) - b Tr(S sigma_j)``
with ``S = sign(a rho_i - b sigma_j)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from .errors import DimMismatch, InvalidState, IterationCap, SolverFailure, ZeroDistance
from .lp import simplex
from .qinfo import shannon
from .qmat import DensityMatrix, trace_norm

PROB_TOL = 1e-10
DEFAULT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Ensemble:
    probs: np.ndarray
    states: tuple[DensityMatrix, ...]

    def __init__(self, probs: Sequence[float], states: Sequence[DensityMatrix]):
        p = np.array(probs, dtype=float)
        states = tuple(states)
        if p.ndim != 1 or len(p) != len(states) or len(p) == 0:
            raise InvalidState("an ensemble needs one probability per state and at least one state")
        if np.any(p < -PROB_TOL) or np.any(p > 1 + PROB_TOL):
            raise InvalidState("probabilities must lie in [0, 1]")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise InvalidState(f"probabilities sum to {p.sum()!r}")
        dims = {s.dims for s in states}
        if len(dims) != 1:
            raise DimMismatch(f"ensemble mixes state dimensions {sorted(dims)}")
        p = np.clip(p, 0.0, 1.0)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "states", states)

    @classmethod
    def uniform(cls, states: Sequence[DensityMatrix]) -> "Ensemble":
        return cls(np.full(len(states), 1.0 / len(states)), states)

    @property
    def dim(self) -> int:
        return self.states[0].dim

    def __len__(self) -> int:
        return len(self.states)

    def items(self):
        return zip(self.probs, self.states)


@dataclass
class MetricResult:
    value: float
    gap: float = 0.0
    certificate: dict = field(default_factory=dict)
    kind: str = ""
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "gap": self.gap,
            "iterations": self.iterations,
            "certificate": {k: np.asarray(v).tolist() for k, v in self.certificate.items()},
        }


def average_state(mu: Ensemble) -> DensityMatrix:
    avg = sum(p * s.matrix for p, s in mu.items())
    return DensityMatrix.trusted(avg, mu.states[0].dims)


def _check_same_space(mu: Ensemble, nu: Ensemble) -> None:
    if mu.states[0].dims != nu.states[0].dims:
        raise DimMismatch(f"state spaces differ: {mu.states[0].dims} vs {nu.states[0].dims}")


def pad(mu: Ensemble, nu: Ensemble) -> tuple[Ensemble, Ensemble]:
    """Extend the shorter ensemble with zero-weight copies of the longer one's first state."""
    _check_same_space(mu, nu)
    if len(mu) == len(nu):
        return mu, nu
    short, long_ = (mu, nu) if len(mu) < len(nu) else (nu, mu)
    extra = len(long_) - len(short)
    padded = Ensemble(
        np.concatenate([short.probs, np.zeros(extra)]),
        short.states + (long_.states[0],) * extra,
    )
    return (padded, nu) if short is mu else (mu, padded)


def _pair_norms(mu: Ensemble, nu: Ensemble) -> np.ndarray:
    a, b = pad(mu, nu)
    return np.array([trace_norm(p * r.matrix - q * s.matrix) for (p, r), (q, s) in zip(a.items(), b.items())])


def d0(mu: Ensemble, nu: Ensemble) -> float:
    return 0.5 * float(np.sum(_pair_norms(mu, nu)))


def cost_matrix(mu: Ensemble, nu: Ensemble) -> np.ndarray:
    _check_same_space(mu, nu)
    return np.array([[0.5 * trace_norm(r.matrix - s.matrix) for s in nu.states] for r in mu.states])


def _transport_constraints(m: int, n: int) -> np.ndarray:
    a = np.zeros((m + n, m * n))
    for i in range(m):
        a[i, i * n : (i + 1) * n] = 1.0
    for j in range(n):
        a[m + j, j::n] = 1.0
    return a


def d_k(mu: Ensemble, nu: Ensemble) -> MetricResult:
    """Kantorovich distance by exact transport simplex."""
    cost = cost_matrix(mu, nu)
    m, n = cost.shape
    res = simplex(cost.reshape(-1), _transport_constraints(m, n), np.concatenate([mu.probs, nu.probs]))
    coupling = res.x.reshape(m, n)
    return MetricResult(
        value=float(np.sum(cost * coupling)),
        certificate={"P": coupling},
        kind="dk",
        iterations=res.pivots,
    )


def _cut(a: float, b: float, rho: np.ndarray, sigma: np.ndarray) -> tuple[float, float, float]:
    """Supporting plane of ``||a rho - b sigma||_1`` at ``(a, b)``; returns (alpha, beta, value)."""
    vals, vecs = np.linalg.eigh(a * rho - b * sigma)
    sign = np.sign(vals)
    s = (vecs * sign) @ vecs.conj().T
    alpha = float(np.real(np.trace(s @ rho)))
    beta = float(np.real(np.trace(s @ sigma)))
    return alpha, beta, float(np.sum(np.abs(vals)))


def d_star(
    mu: Ensemble,
    nu: Ensemble,
    tol: float = DEFAULT_TOL,
    max_cuts: int = 10_000,
    seed_angles: int = 8,
) -> MetricResult:
    """EHS distance by cutting planes on the two-coupling program.

    ``value`` is the objective at the best feasible couplings found, hence an
    upper bound; ``value - gap`` is the master-LP lower bound.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    _check_same_space(mu, nu)
    m, n = len(mu), len(nu)
    k = m * n
    rho = [s.matrix for s in mu.states]
    sig = [s.matrix for s in nu.states]

    rows: list[np.ndarray] = []

    def add_cut(i: int, j: int, alpha: float, beta: float) -> None:
        row = np.zeros(3 * k)
        idx = i * n + j
        row[idx] = alpha
        row[k + idx] = -beta
        row[2 * k + idx] = -1.0
        rows.append(row)

    angles = np.linspace(0.0, 0.5 * np.pi, seed_angles + 1)
    for i in range(m):
        for j in range(n):
            add_cut(i, j, 1.0, 1.0)
            add_cut(i, j, -1.0, -1.0)
            for th in angles:
                alpha, beta, _ = _cut(np.cos(th), np.sin(th), rho[i], sig[j])
                add_cut(i, j, alpha, beta)

    a_eq = np.zeros((m + n, 3 * k))
    a_eq[:m, :k] = _transport_constraints(m, n)[:m]
    a_eq[m:, k : 2 * k] = _transport_constraints(m, n)[m:]
    b_eq = np.concatenate([mu.probs, nu.probs])
    c = np.concatenate([np.zeros(2 * k), 0.5 * np.ones(k)])
    bounds = [(0.0, 1.0)] * (2 * k) + [(0.0, 2.0)] * k

    best_upper = np.inf
    best = None
    lower = -np.inf
    iterations = 0
    while True:
        iterations += 1
        res = linprog(
            c,
            A_ub=np.array(rows),
            b_ub=np.zeros(len(rows)),
            A_eq=a_eq,
            b_eq=b_eq,
            bounds=bounds,
            method="highs",
        )
        if res.status != 0:
            raise SolverFailure(f"master LP failed: {res.message}")
        lower = max(lower, float(res.fun))
        x = res.x
        pmat = np.clip(x[:k], 0.0, None).reshape(m, n)
        qmat = np.clip(x[k : 2 * k], 0.0, None).reshape(m, n)
        z = x[2 * k :].reshape(m, n)
        fvals = np.zeros((m, n))
        pending = []
        for i in range(m):
            for j in range(n):
                alpha, beta, f = _cut(pmat[i, j], qmat[i, j], rho[i], sig[j])
                fvals[i, j] = f
                if f - z[i, j] > 1e-12:
                    pending.append((i, j, alpha, beta))
        upper = 0.5 * float(fvals.sum())
        if upper < best_upper:
            best_upper, best = upper, (pmat.copy(), qmat.copy())
        if best_upper - lower <= tol or not pending:
            break
        if len(rows) + len(pending) > max_cuts:
            raise IterationCap(f"d_star exceeded {max_cuts} cuts with gap {best_upper - lower:.3e}")
        for cut in pending:
            add_cut(*cut)

    return MetricResult(
        value=best_upper,
        gap=max(best_upper - lower, 0.0),
        certificate={"P": best[0], "Q": best[1]},
        kind="dstar",
        iterations=iterations,
    )


def _diagonal_of(s: DensityMatrix, tol: float = 1e-12) -> np.ndarray:
    off = s.matrix - np.diag(np.diag(s.matrix))
    if np.max(np.abs(off), initial=0.0) > tol:
        raise InvalidState("commuting oracle requires diagonal states")
    return np.real(np.diag(s.matrix))


def d_star_commuting(mu: Ensemble, nu: Ensemble) -> MetricResult:
    """Exact ``d_star`` for diagonal ensembles as one linear program.

    With every state diagonal, ``||a rho - b sigma||_1 = sum_k |a r_k - b s_k|``;
    each absolute value is split into two nonnegative variables.
    """
    _check_same_space(mu, nu)
    r = [_diagonal_of(s) for s in mu.states]
    s = [_diagonal_of(t) for t in nu.states]
    m, n, d = len(r), len(s), mu.dim
    k = m * n
    nvar = 2 * k + 2 * k * d
    rows = []
    rhs = []
    for i in range(m):
        for j in range(n):
            idx = i * n + j
            for l in range(d):
                row = np.zeros(nvar)
                row[idx] = r[i][l]
                row[k + idx] = -s[j][l]
                u = 2 * k + idx * d + l
                row[u] = -1.0
                row[u + k * d] = 1.0
                rows.append(row)
                rhs.append(0.0)
    marg = _transport_constraints(m, n)
    for i in range(m):
        row = np.zeros(nvar)
        row[:k] = marg[i]
        rows.append(row)
        rhs.append(mu.probs[i])
    for j in range(n):
        row = np.zeros(nvar)
        row[k : 2 * k] = marg[m + j]
        rows.append(row)
        rhs.append(nu.probs[j])
    cost = np.concatenate([np.zeros(2 * k), 0.5 * np.ones(2 * k * d)])
    res = simplex(cost, np.array(rows), np.array(rhs))
    return MetricResult(
        value=res.objective,
        certificate={"P": res.x[:k].reshape(m, n), "Q": res.x[k : 2 * k].reshape(m, n)},
        kind="dstar-commuting",
        iterations=res.pivots,
    )


def gamma_refinement(mu: Ensemble, nu: Ensemble) -> tuple[np.ndarray, np.ndarray]:
    """Distributions ``gamma^+`` and ``gamma^-`` entering the refined Holevo bound."""
    a, b = pad(mu, nu)
    norms = _pair_norms(a, b)
    eps0 = 0.5 * float(norms.sum())
    if eps0 <= 1e-15:
        raise ZeroDistance("ensembles coincide; gamma distributions are undefined")
    diff = a.probs - b.probs
    plus = np.clip((norms + diff) / (2 * eps0), 0.0, None)
    minus = np.clip((norms - diff) / (2 * eps0), 0.0, None)
    return plus, minus


__all__ = [
    "Ensemble",
    "MetricResult",
    "average_state",
    "cost_matrix",
    "d0",
    "d_k",
    "d_star",
    "d_star_commuting",
    "gamma_refinement",
    "pad",
    "shannon",
]
