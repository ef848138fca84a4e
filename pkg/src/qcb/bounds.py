"""Continuity bounds for entropy, conditional entropy, (conditional) mutual
information, the Holevo quantity, channel capacities and n-copy outputs.

Every evaluator is a plain formula of its parameters; :class:`BoundReport`
joins a formula with a measured difference when states are at hand.  All
values are in the requested ``base`` (bits by default).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DimMismatch, DomainError
from .qinfo import g, h2, log_factor, qcmi
from .qmat import DensityMatrix, positive_negative_parts, trace_norm

VALIDITY_SLACK = 1e-8
GRID_POINTS = 64
GRID_DECADES = 9


@dataclass
class BoundReport:
    name: str
    inputs: dict
    bound_value: float
    achieved: float | None = None
    t_opt: float | None = None
    metric: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float | None:
        if self.achieved is None:
            return None
        if self.bound_value <= 0:
            return 0.0 if abs(self.achieved) <= VALIDITY_SLACK else math.inf
        return self.achieved / self.bound_value

    @property
    def valid(self) -> bool:
        return self.achieved is None or self.achieved <= self.bound_value + VALIDITY_SLACK

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "inputs": dict(self.inputs),
            "metric": self.metric,
            "bound": self.bound_value,
            "achieved": self.achieved,
            "ratio": self.ratio,
            "t_opt": self.t_opt,
            **({"extra": dict(self.extra)} if self.extra else {}),
        }


def _check_eps(eps: float, hi: float = 1.0) -> None:
    if not (-1e-15 <= eps <= hi + 1e-15):
        raise DomainError(f"eps must lie in [0, {hi}], got {eps}")


def _log(x: float, base) -> float:
    return math.log(x) * log_factor(base)


def audenaert_entropy_bound(eps: float, d: int, base=2) -> float:
    """``eps log(d-1) + h2(eps)`` for ``0 <= eps <= 1 - 1/d``."""
    if d < 2:
        raise DomainError("dimension must be at least 2")
    _check_eps(eps, 1.0 - 1.0 / d)
    eps = max(eps, 0.0)
    return eps * _log(d - 1, base) + h2(min(eps, 1.0), base)


def winter_ce_bound(eps: float, d: int, qc: bool = False, base=2) -> float:
    """Conditional entropy: ``2 eps log d + g(eps)``; one ``eps log d`` for qc-states."""
    _check_eps(eps)
    eps = max(eps, 0.0)
    return (1 if qc else 2) * eps * _log(d, base) + g(eps, base)


def cmi_fannes_bound(eps: float, d: int, equal_marginal: bool = False, base=2) -> float:
    """``2 eps log d + 2 g(eps)``, ``d = min(dim A, dim B)``; ``g`` once when a marginal agrees."""
    _check_eps(eps)
    eps = max(eps, 0.0)
    return 2 * eps * _log(d, base) + (1 if equal_marginal else 2) * g(eps, base)


def cmi_qqc_bound(
    eps: float,
    d: int,
    m: int,
    gamma_entropies: Sequence[float] | None = None,
    one_sided: bool = False,
    base=2,
) -> float:
    """qqc-states: ``eps log min(d, m) + 2 g(eps)``.

    ``gamma_entropies`` (Shannon entropies of the two gamma distributions, in
    ``base``) replaces ``log min(d, m)`` by their maximum; ``one_sided`` uses
    a single ``g``.
    """
    _check_eps(eps)
    eps = max(eps, 0.0)
    first = max(gamma_entropies) if gamma_entropies is not None else _log(min(d, m), base)
    return eps * first + (1 if one_sided else 2) * g(eps, base)


def _marginals_equal(rho: DensityMatrix, sigma: DensityMatrix, keep: Sequence[int]) -> bool:
    from .qmat import partial_trace

    if len(keep) == len(rho.dims):
        return np.allclose(rho.matrix, sigma.matrix, atol=1e-12)
    return np.allclose(partial_trace(rho, keep).matrix, partial_trace(sigma, keep).matrix, atol=1e-12)


def cmi_prop1_bound(
    rho: DensityMatrix,
    sigma: DensityMatrix,
    a: Sequence[int] = (0,),
    b: Sequence[int] = (1,),
    c: Sequence[int] | None = None,
    base=2,
) -> BoundReport:
    """``D eps + 2 g(eps)`` with ``D = max I(A:B|C)`` over the normalized parts of ``rho - sigma``.

    Also records the two-sided estimate
    ``|dI - eps (I(tau+) - I(tau-))| <= 2 g(eps)`` and the single-``g``
    variant when the ``AC`` or ``BC`` marginals coincide.
    """
    if rho.dims != sigma.dims:
        raise DimMismatch(f"dims differ: {rho.dims} vs {sigma.dims}")
    if c is None:
        c = (2,) if len(rho.dims) == 3 else ()
    achieved = abs(qcmi(rho, a, b, c, base) - qcmi(sigma, a, b, c, base))
    diff = rho.matrix - sigma.matrix
    eps = 0.5 * trace_norm(diff)
    inputs = {"eps": eps, "dims": list(rho.dims)}
    if eps <= 1e-15:  # zero distance: the bound collapses to 0
        return BoundReport("CMI-FCB+", inputs, 0.0, achieved, extra={"D": 0.0, "two_sided_ok": achieved <= VALIDITY_SLACK})
    pos, neg = positive_negative_parts(diff)
    tau_p = DensityMatrix.trusted(pos / np.trace(pos).real, rho.dims)
    tau_m = DensityMatrix.trusted(neg / np.trace(neg).real, rho.dims)
    i_p = qcmi(tau_p, a, b, c, base)
    i_m = qcmi(tau_m, a, b, c, base)
    signed = qcmi(rho, a, b, c, base) - qcmi(sigma, a, b, c, base)
    residual = abs(signed - eps * (i_p - i_m))
    one_g = _marginals_equal(rho, sigma, sorted(list(a) + list(c))) or _marginals_equal(
        rho, sigma, sorted(list(b) + list(c))
    )
    big_d = max(i_p, i_m)
    ge = g(eps, base)
    return BoundReport(
        "CMI-FCB+",
        inputs,
        big_d * eps + 2 * ge,
        achieved,
        extra={
            "D": big_d,
            "I_tau_plus": i_p,
            "I_tau_minus": i_m,
            "two_sided_residual": residual,
            "two_sided_ok": residual <= 2 * ge + VALIDITY_SLACK,
            "marginal_equal": bool(one_g),
            "reduced_bound": big_d * eps + (1 if one_g else 2) * ge,
        },
    )


def r_eps(eps: float, t: float) -> float:
    return (1 + t / 2) / (1 - eps * t)


@dataclass(frozen=True)
class WinterParams:
    """Inputs of the energy-constrained bounds.

    ``f_hat`` maps an energy to an entropy bound in ``base``.  With ``ell``
    set, the oscillator form ``f_hat(E) - ell log(eps t)`` replaces
    ``f_hat(E/(eps t))``.
    """

    eps: float
    t: float
    energy: float
    f_hat: Callable[[float], float]
    ell: int | None = None
    base: object = 2

    def __post_init__(self):
        if not 0 < self.eps <= 1:
            raise DomainError(f"eps must lie in (0, 1], got {self.eps}")
        if not 0 < self.t <= 1 / (2 * self.eps) * (1 + 1e-12):
            raise DomainError(f"t must lie in (0, 1/(2 eps)], got {self.t}")

    @property
    def r(self) -> float:
        return r_eps(self.eps, self.t)

    def f_term(self) -> float:
        x = self.eps * self.t
        if self.ell is not None:
            return self.f_hat(self.energy) - self.ell * _log(x, self.base)
        return self.f_hat(self.energy / x)


def winter_cmi_bound(p: WinterParams) -> float:
    """``2 eps (2t + r) Fhat(E/(eps t)) + 2 g(eps r) + 4 h2(eps t)``."""
    return (
        2 * p.eps * (2 * p.t + p.r) * p.f_term()
        + 2 * g(p.eps * p.r, p.base)
        + 4 * h2(min(p.eps * p.t, 1.0), p.base)
    )


def winter_holevo_bound(p: WinterParams) -> float:
    """``eps (2t + r) Fhat(E/(eps t)) + 2 g(eps r) + 2 h2(eps t)``."""
    return (
        p.eps * (2 * p.t + p.r) * p.f_term()
        + 2 * g(p.eps * p.r, p.base)
        + 2 * h2(min(p.eps * p.t, 1.0), p.base)
    )


def winter_cmi_bound_primed(eps: float, eps_prime: float, energy: float, f_hat: Callable[[float], float], base=2) -> float:
    """The same bound in terms of ``eps' in (eps, 1]`` with ``delta = (eps' - eps)/(eps' + 1/2)``."""
    delta = (eps_prime - eps) / (eps_prime + 0.5)
    if not (eps < eps_prime <= 1 and 0 < delta <= 0.5):
        raise DomainError("need eps < eps' <= 1 with delta <= 1/2")
    return 2 * (2 * delta + eps_prime) * f_hat(energy / delta) + 2 * g(eps_prime, base) + 4 * h2(delta, base)


def _golden(fn: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10) -> tuple[float, float]:
    inv = (math.sqrt(5) - 1) / 2
    x1 = hi - inv * (hi - lo)
    x2 = lo + inv * (hi - lo)
    f1, f2 = fn(x1), fn(x2)
    while hi - lo > tol * max(1.0, abs(lo) + abs(hi)):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv * (hi - lo)
            f1 = fn(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv * (hi - lo)
            f2 = fn(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def optimize_t(bound: Callable[[float], float], eps: float, points: int = GRID_POINTS, t_max: float | None = None) -> tuple[float, float]:
    """Minimize ``bound(t)`` over ``t in (0, t_max]``, ``t_max = 1/(2 eps)`` by default.

    A log-spaced grid spanning nine decades below ``t_max`` locates the best
    bracket; golden-section search in ``log t`` refines it.
    """
    if t_max is None:
        if not 0 < eps < 1 + 1e-15:
            raise DomainError(f"eps must lie in (0, 1], got {eps}")
        t_max = 1 / (2 * eps)
    grid = np.geomspace(t_max * 10.0**-GRID_DECADES, t_max, points)
    vals = np.array([bound(float(t)) for t in grid])
    k = int(np.argmin(vals))
    best_t, best_v = float(grid[k]), float(vals[k])
    lo = math.log(grid[max(k - 1, 0)])
    hi = math.log(grid[min(k + 1, points - 1)])
    if hi > lo:
        x, v = _golden(lambda s: bound(min(math.exp(s), t_max)), lo, hi)
        if v < best_v:
            best_t, best_v = min(math.exp(x), t_max), v
    return best_t, best_v


def lemma1_f(t: float) -> float:
    return 2 * t + (1 + t / 2) / (1 - t)


def lemma1_objective(t: float, x: float, b: float = 1.0, c: float = 0.0) -> float:
    """``f(t) (x - b ln t + c)`` on ``t in (0, 1/2)``."""
    return lemma1_f(t) * (x - b * math.log(t) + c)


def lemma1_min(x: float, b: float = 1.0, c: float = 0.0) -> tuple[float, float]:
    return optimize_t(lambda t: lemma1_objective(t, x, b, c), 1.0, t_max=0.5)


def _g_count(equal: bool) -> int:
    return 1 if equal else 2


def holevo_fannes_bound(
    variant: str,
    *,
    eps_star: float | None = None,
    eps0: float | None = None,
    d: int | None = None,
    m: int | None = None,
    n: int | None = None,
    equal_average: bool = False,
    equal_probs: bool = False,
    gamma_entropy: float | None = None,
    base=2,
) -> float:
    """Holevo-quantity bounds for ensembles.

    ``variant="d"``: ``eps log d + 2 g(eps)`` with ``eps_star`` (or ``eps0``
    if only that is given).  ``variant="mn"``: the smaller of
    ``eps_star log(mn) + 2 g(eps_star)`` and ``eps0 log m + 2 g(eps0)``
    (terms whose eps is absent are skipped).  ``gamma_entropy`` replaces
    ``log m``.  Equal averages reduce both ``2 g`` terms to ``g``; equal
    probabilities reduce the ``eps0`` term.
    """
    for e in (eps_star, eps0):
        if e is not None:
            _check_eps(e)
    g_star = _g_count(equal_average)
    g_zero = _g_count(equal_average or equal_probs)
    if variant == "d":
        if d is None:
            raise DomainError("variant 'd' needs d")
        if eps_star is not None:
            return eps_star * _log(d, base) + g_star * g(eps_star, base)
        if eps0 is not None:
            return eps0 * _log(d, base) + g_zero * g(eps0, base)
        raise DomainError("need eps_star or eps0")
    if variant == "mn":
        terms = []
        if eps_star is not None:
            if m is None or n is None:
                raise DomainError("variant 'mn' with eps_star needs m and n")
            terms.append(eps_star * _log(m * n, base) + g_star * g(eps_star, base))
        if eps0 is not None:
            if m is None and gamma_entropy is None:
                raise DomainError("variant 'mn' with eps0 needs m")
            first = gamma_entropy if gamma_entropy is not None else _log(m, base)
            terms.append(eps0 * first + g_zero * g(eps0, base))
        if not terms:
            raise DomainError("need eps_star or eps0")
        return min(terms)
    raise DomainError(f"unknown variant {variant!r}")


def n_copy_finite(eps: float, d_b: int, n: int, base=2) -> float:
    """``2 n eps log d_B + n g(eps)``."""
    _check_eps(eps)
    return 2 * n * eps * _log(d_b, base) + n * g(eps, base)


def n_copy_energy(eps: float, t: float, energies: Sequence[float], f_hat: Callable[[float], float], base=2) -> tuple[float, float]:
    """Per-copy energy form and its consolidation at the mean energy.

    Returns ``(sum form, mean form)``; concavity of ``f_hat`` makes the first
    at most the second.
    """
    n = len(energies)
    p = WinterParams(eps, t, 0.0, f_hat, base=base)
    x = eps * t
    tail = 2 * n * g(eps * p.r, base) + 4 * n * h2(min(x, 1.0), base)
    coef = 2 * eps * (2 * t + p.r)
    per = coef * sum(f_hat(e / x) for e in energies) + tail
    mean = coef * n * f_hat(float(np.mean(energies)) / x) + tail
    return per, mean


def n_copy_oscillator(eps: float, t: float, f_hat_e: float, ell: int, n: int, base=2) -> float:
    """``2 n eps (2t + r)[Fhat(E) - ell log(eps t)] + 2 n g(eps r) + 4 n h2(eps t)``."""
    p = WinterParams(eps, t, 0.0, lambda _: f_hat_e, ell=ell, base=base)
    return n * winter_cmi_bound(p)


CAPACITIES = ("Cchi", "Cea", "C", "Q")


def capacity_bound(eps: float, d: int, which: str, base=2) -> float:
    """``Cchi``: ``eps log d_B + g``; ``Cea``: ``2 eps log d_A + g``; ``C``, ``Q``: ``2 eps log d_B + g``."""
    _check_eps(eps)
    eps = max(eps, 0.0)
    if which == "Cchi":
        return eps * _log(d, base) + g(eps, base)
    if which in ("Cea", "C", "Q"):
        return 2 * eps * _log(d, base) + g(eps, base)
    raise DomainError(f"unknown capacity {which!r}; expected one of {CAPACITIES}")
