"""Entropic quantities: von Neumann entropy, relative entropy, mutual
information, conditional mutual information, Holevo quantity.

Every function takes a ``base`` argument (2 or ``"e"``); the default is bits.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import BadDims, DomainError
from .qmat import (
    SUPPORT_TOL,
    DensityMatrix,
    clamp_spectrum,
    partial_trace,
    purify,
)

INF = math.inf
RELATIVE_SUPPORT_TOL = 1e-10


def log_factor(base) -> float:
    """Multiplier converting nats to the requested base."""
    if base in (2, 2.0, "2", "bits"):
        return 1.0 / math.log(2.0)
    if base in ("e", math.e, "nats"):
        return 1.0
    raise DomainError(f"unsupported log base {base!r}; use 2 or 'e'")


def xlogx(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log(x[pos])
    return out


def shannon(p, base=2) -> float:
    """Shannon entropy of a probability vector (zeros allowed)."""
    p = np.asarray(p, dtype=float)
    return float(-np.sum(xlogx(p)) * log_factor(base))


def spectral_entropy(eigenvalues, base=2) -> float:
    return shannon(clamp_spectrum(eigenvalues), base)


def entropy(rho, base=2) -> float:
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    return spectral_entropy(np.linalg.eigvalsh(m), base)


def h2(p: float, base=2) -> float:
    if not (-1e-15 <= p <= 1 + 1e-15):
        raise DomainError(f"h2 needs p in [0, 1], got {p}")
    p = min(max(p, 0.0), 1.0)
    return shannon([p, 1.0 - p], base)


def g(eps: float, base=2) -> float:
    """``(1+eps) log(1+eps) - eps log eps``."""
    if eps < 0:
        raise DomainError(f"g needs eps >= 0, got {eps}")
    val = (1.0 + eps) * math.log1p(eps) - (eps * math.log(eps) if eps > 0 else 0.0)
    return val * log_factor(base)


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix, base=2) -> float:
    """``H(rho || sigma)``; returns ``math.inf`` when supp rho is not inside supp sigma."""
    if rho.dim != sigma.dim:
        raise BadDims(f"dimension mismatch {rho.dim} vs {sigma.dim}")
    lam, u = np.linalg.eigh(rho.matrix)
    mu, v = np.linalg.eigh(sigma.matrix)
    lam = clamp_spectrum(lam)
    mu = clamp_spectrum(mu)
    overlap = np.abs(u.conj().T @ v) ** 2  # |<u_i|v_j>|^2
    outside = mu <= RELATIVE_SUPPORT_TOL
    leak = float(lam @ overlap[:, outside].sum(axis=1)) if outside.any() else 0.0
    if leak > RELATIVE_SUPPORT_TOL:
        return INF
    inside = ~outside
    cross = float(lam @ (overlap[:, inside] @ np.log(mu[inside])))
    val = float(np.sum(xlogx(lam))) - cross
    return max(val, 0.0) * log_factor(base)


def _marginal_entropy(rho: DensityMatrix, keep: Sequence[int], base) -> float:
    if not keep:
        return 0.0
    if len(keep) == len(rho.dims):
        return entropy(rho, base)
    return entropy(partial_trace(rho, keep), base)


def _check_parts(rho: DensityMatrix, *parts: Sequence[int]) -> None:
    seen: list[int] = []
    for part in parts:
        seen.extend(part)
    if len(set(seen)) != len(seen) or any(k < 0 or k >= len(rho.dims) for k in seen):
        raise BadDims(f"subsystem groups {parts} invalid for dims {rho.dims}")


def mutual_information(rho: DensityMatrix, a: Sequence[int] = (0,), b: Sequence[int] = (1,), base=2) -> float:
    """``I(A:B) = H(A) + H(B) - H(AB)`` for the subsystem groups ``a`` and ``b``."""
    if len(rho.dims) < 2:
        raise BadDims(f"mutual information needs a bipartite state, got dims {rho.dims}")
    a, b = list(a), list(b)
    _check_parts(rho, a, b)
    ab = sorted(a + b)
    return (
        _marginal_entropy(rho, sorted(a), base)
        + _marginal_entropy(rho, sorted(b), base)
        - _marginal_entropy(rho, ab, base)
    )


def qcmi(
    rho: DensityMatrix,
    a: Sequence[int] = (0,),
    b: Sequence[int] = (1,),
    c: Sequence[int] | None = None,
    base=2,
) -> float:
    """``I(A:B|C) = H(AC) + H(BC) - H(ABC) - H(C)``.

    With default groups the state must be tripartite ``A (x) B (x) C`` or
    bipartite, in which case ``C`` is trivial and the result is ``I(A:B)``.
    """
    n = len(rho.dims)
    if c is None:
        if n == 3:
            c = (2,)
        elif n == 2:
            c = ()
        else:
            raise BadDims(f"qcmi needs 2 or 3 factors by default, got dims {rho.dims}")
    a, b, c = list(a), list(b), list(c)
    _check_parts(rho, a, b, c)
    return (
        _marginal_entropy(rho, sorted(a + c), base)
        + _marginal_entropy(rho, sorted(b + c), base)
        - _marginal_entropy(rho, sorted(a + b + c), base)
        - _marginal_entropy(rho, sorted(c), base)
    )


def conditional_entropy(rho: DensityMatrix, a: Sequence[int] = (0,), b: Sequence[int] = (1,), base=2) -> float:
    if len(rho.dims) < 2:
        raise BadDims(f"conditional entropy needs a bipartite state, got dims {rho.dims}")
    a, b = list(a), list(b)
    _check_parts(rho, a, b)
    return _marginal_entropy(rho, sorted(a + b), base) - _marginal_entropy(rho, sorted(b), base)


def qc_embed(ensemble) -> DensityMatrix:
    """The qc-state ``sum_i p_i rho_i (x) |i><i|`` on ``A (x) B``."""
    m = len(ensemble.probs)
    d = ensemble.dim
    out = np.zeros((d * m, d * m), dtype=complex)
    for i, (p, s) in enumerate(zip(ensemble.probs, ensemble.states)):
        out[i::m, i::m] = p * s.matrix
    return DensityMatrix.trusted(out, (d, m))


def holevo(ensemble, base=2) -> float:
    """``chi = H(avg) - sum_i p_i H(rho_i)``."""
    avg = sum(p * s.matrix for p, s in zip(ensemble.probs, ensemble.states))
    inner = sum(p * entropy(s, base) for p, s in zip(ensemble.probs, ensemble.states) if p > 0)
    return entropy(avg, base) - inner


def coherent_information(channel, rho: DensityMatrix, base=2) -> float:
    """``I_c = H(Phi(rho)) - H(Phi_hat(rho))`` via the Stinespring complement."""
    from .channels import apply, complementary

    if rho.dim != channel.d_in:
        raise BadDims(f"state dim {rho.dim} does not match channel input {channel.d_in}")
    return entropy(apply(channel, rho), base) - entropy(apply(complementary(channel), rho), base)


def coherent_information_purified(channel, rho: DensityMatrix, base=2) -> float:
    """Same quantity through ``I(B:R) - H(rho)`` on a purification."""
    from .channels import apply

    if rho.dim != channel.d_in:
        raise BadDims(f"state dim {rho.dim} does not match channel input {channel.d_in}")
    pur = purify(DensityMatrix.trusted(rho.matrix))
    out = apply(channel, pur, on=0)
    return mutual_information(out, base=base) - entropy(rho, base)


def pure_mixture_entropy(vectors: Sequence[np.ndarray], weights: Sequence[float], base=2) -> float:
    """Entropy of ``sum_k w_k |v_k><v_k|`` from the Gram matrix of the weighted vectors.

    The nonzero spectrum of ``W W^dag`` equals that of ``W^dag W``, so a mixture
    of a few pure states in a huge space costs only a small eigenproblem.
    """
    cols = np.stack([np.sqrt(w) * np.asarray(v, dtype=complex) for v, w in zip(vectors, weights)], axis=1)
    gram = cols.conj().T @ cols
    return spectral_entropy(np.linalg.eigvalsh(0.5 * (gram + gram.conj().T)), base)


__all__ = [
    "INF",
    "SUPPORT_TOL",
    "coherent_information",
    "coherent_information_purified",
    "conditional_entropy",
    "entropy",
    "g",
    "h2",
    "holevo",
    "log_factor",
    "mutual_information",
    "pure_mixture_entropy",
    "qc_embed",
    "qcmi",
    "relative_entropy",
    "shannon",
    "spectral_entropy",
]
