"""Quantum channels in Kraus form, the example families, distances between
channels, and capacity quantities.

Channel distances are reported in half-norm units, ``1/2 ||Phi - Psi||``, which
is the ``eps`` consumed by the continuity bounds.  Optimizers only ever
certify lower bounds; nothing here claims global optimality.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import BadDims, InvalidState, UnsupportedFamily
from .qinfo import entropy, log_factor, mutual_information, spectral_entropy, xlogx
from .qmat import DensityMatrix, partial_trace, purify, trace_norm

KRAUS_TOL = 1e-9
FAMILIES = ("identity", "depolarizing", "erasure", "completely-depolarizing")


@dataclass(frozen=True)
class ChannelFamily:
    kind: str
    d: int
    p: float = 0.0
    target: tuple | None = None  # diagonal of the output state for completely-depolarizing

    def __post_init__(self):
        if self.kind not in FAMILIES:
            raise UnsupportedFamily(f"unknown channel family {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"family parameter must lie in [0, 1], got {self.p}")


@dataclass(frozen=True, eq=False)
class Channel:
    kraus: np.ndarray  # shape (r, d_out, d_in)
    d_in: int
    d_out: int
    family: ChannelFamily | None = field(default=None)

    def __init__(self, kraus: Sequence, family: ChannelFamily | None = None, check: bool = True):
        ks = np.array([np.asarray(k, dtype=complex) for k in kraus])
        if ks.ndim != 3:
            raise InvalidState("Kraus operators must share one shape")
        _, d_out, d_in = ks.shape
        if check:
            resid = np.max(np.abs(np.einsum("kab,kac->bc", ks.conj(), ks) - np.eye(d_in)))
            if resid > KRAUS_TOL:
                raise InvalidState(f"Kraus operators are not trace preserving (residual {resid:.2e})")
        ks.setflags(write=False)
        object.__setattr__(self, "kraus", ks)
        object.__setattr__(self, "d_in", d_in)
        object.__setattr__(self, "d_out", d_out)
        object.__setattr__(self, "family", family)

    def completeness_residual(self) -> float:
        gram = np.einsum("kab,kac->bc", self.kraus.conj(), self.kraus)
        return float(np.max(np.abs(gram - np.eye(self.d_in))))

    def __call__(self, rho: DensityMatrix) -> DensityMatrix:
        return apply(self, rho)

    def __repr__(self) -> str:
        tag = f", family={self.family.kind}" if self.family else ""
        return f"Channel(d_in={self.d_in}, d_out={self.d_out}, kraus={len(self.kraus)}{tag})"


def _weyl_operators(d: int) -> list[np.ndarray]:
    omega = np.exp(2j * np.pi / d)
    shift = np.roll(np.eye(d), 1, axis=0)
    clock = np.diag(omega ** np.arange(d))
    return [np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b) for a in range(d) for b in range(d)]


def identity_channel(d: int) -> Channel:
    return Channel([np.eye(d)], family=ChannelFamily("identity", d))


def depolarizing(d: int, p: float) -> Channel:
    """``rho -> (1-p) rho + p Tr(rho) I/d`` via the d^2 Weyl operators."""
    ops = _weyl_operators(d)
    kraus = [math.sqrt(1 - p + p / d**2) * ops[0]] + [math.sqrt(p) / d * w for w in ops[1:]]
    return Channel(kraus, family=ChannelFamily("depolarizing", d, p))


def erasure(d: int, p: float) -> Channel:
    """``rho -> (1-p) rho (+) p Tr(rho) |e><e|`` into a ``d+1`` dimensional output."""
    embed = np.zeros((d + 1, d))
    embed[:d, :d] = np.eye(d)
    kraus = [math.sqrt(1 - p) * embed]
    for i in range(d):
        k = np.zeros((d + 1, d))
        k[d, i] = math.sqrt(p)
        kraus.append(k)
    return Channel(kraus, family=ChannelFamily("erasure", d, p))


def completely_depolarizing(d_in: int, target: DensityMatrix) -> Channel:
    """Constant channel ``rho -> Tr(rho) target``."""
    vals, vecs = np.linalg.eigh(target.matrix)
    kraus = []
    for lam, v in zip(vals, vecs.T):
        if lam <= 1e-15:
            continue
        for j in range(d_in):
            k = np.zeros((target.dim, d_in), dtype=complex)
            k[:, j] = math.sqrt(lam) * v
            kraus.append(k)
    diag = tuple(float(x) for x in np.real(np.diag(target.matrix)))
    is_diag = np.allclose(target.matrix, np.diag(np.diag(target.matrix)))
    fam = ChannelFamily("completely-depolarizing", d_in, 1.0, diag) if is_diag else None
    return Channel(kraus, family=fam)


def from_family(kind: str, d: int, p: float = 0.0, target: Sequence[float] | None = None) -> Channel:
    if kind == "identity":
        return identity_channel(d)
    if kind == "depolarizing":
        return depolarizing(d, p)
    if kind == "erasure":
        return erasure(d, p)
    if kind == "completely-depolarizing":
        diag = np.asarray(target if target is not None else np.eye(d)[0], dtype=float)
        return completely_depolarizing(d, DensityMatrix.diagonal(diag))
    raise UnsupportedFamily(f"unknown channel family {kind!r}")


def _apply_matrix(kraus: np.ndarray, m: np.ndarray, dims: tuple[int, ...], on: int) -> np.ndarray:
    n = len(dims)
    d_in = dims[on]
    t = np.moveaxis(m.reshape(dims + dims), [on, n + on], [0, 1])
    rest = t.shape[2:]
    t = t.reshape(d_in, d_in, -1)
    out = np.einsum("kab,bcx,kdc->adx", kraus, t, kraus.conj())
    d_out = kraus.shape[1]
    out = np.moveaxis(out.reshape((d_out, d_out) + rest), [0, 1], [on, n + on])
    side = m.shape[0] // d_in * d_out
    return out.reshape(side, side)


def apply(channel: Channel, rho: DensityMatrix, on: int | None = None) -> DensityMatrix:
    """``Phi (x) id`` acting on tensor factor ``on`` (default: the first factor)."""
    on = 0 if on is None else on
    if not 0 <= on < len(rho.dims):
        raise BadDims(f"factor {on} out of range for dims {rho.dims}")
    if rho.dims[on] != channel.d_in:
        raise BadDims(f"factor {on} has dim {rho.dims[on]}, channel expects {channel.d_in}")
    out = _apply_matrix(channel.kraus, rho.matrix, rho.dims, on)
    dims = rho.dims[:on] + (channel.d_out,) + rho.dims[on + 1 :]
    return DensityMatrix.trusted(out, dims)


def apply_difference(phi: Channel, psi: Channel, rho: DensityMatrix, on: int = 0) -> np.ndarray:
    return apply(phi, rho, on).matrix - apply(psi, rho, on).matrix


def complementary(channel: Channel) -> Channel:
    """Complement from the Stinespring isometry ``V psi = sum_i K_i psi (x) |i>``.

    Tracing out the original output leaves Kraus operators
    ``Khat_j = sum_i |i><j| K_i``.
    """
    return Channel(np.transpose(channel.kraus, (1, 0, 2)), check=False)


def _same_dims(phi: Channel, psi: Channel) -> None:
    if (phi.d_in, phi.d_out) != (psi.d_in, psi.d_out):
        raise BadDims("channels act between different spaces")


@dataclass
class DistanceEstimate:
    lower: float
    upper: float
    witness: np.ndarray
    analytic: bool = False

    def to_dict(self) -> dict:
        w = np.asarray(self.witness).reshape(-1)
        return {
            "lower": self.lower,
            "upper": self.upper,
            "analytic_upper": self.analytic,
            "witness": [[float(z.real), float(z.imag)] for z in w],
        }


def _vec(params: np.ndarray) -> np.ndarray:
    half = params.size // 2
    v = params[:half] + 1j * params[half:]
    return v / max(np.linalg.norm(v), 1e-300)


def _unvec(v: np.ndarray) -> np.ndarray:
    return np.concatenate([v.real, v.imag])


def _maximize_over_pure(objective, dim: int, starts: list[np.ndarray], rng: np.random.Generator, trials: int, refine: int = 4):
    cands = list(starts) + [rng.standard_normal(dim) + 1j * rng.standard_normal(dim) for _ in range(trials)]
    scored = sorted(
        ((objective(v / np.linalg.norm(v)), idx, v / np.linalg.norm(v)) for idx, v in enumerate(cands)),
        key=lambda t: (-t[0], t[1]),
    )
    best_val, _, best_vec = scored[0]
    for val, idx, v in scored[:refine]:
        res = minimize(lambda x: -objective(_vec(x)), _unvec(v), method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000 * dim})
        cand = _vec(res.x)
        cval = objective(cand)
        if cval > best_val:
            best_val, best_vec = cval, cand
    return best_val, best_vec


def _analytic_upper(phi: Channel, psi: Channel) -> float | None:
    """Half diamond-norm upper bounds for pairs within one paper family."""
    f1, f2 = phi.family, psi.family
    if f1 is None or f2 is None or f1.d != f2.d:
        return None
    kinds = {f1.kind, f2.kind}
    if kinds <= {"identity", "depolarizing"}:
        p1 = 0.0 if f1.kind == "identity" else f1.p
        p2 = 0.0 if f2.kind == "identity" else f2.p
        return abs(p1 - p2)
    if kinds == {"erasure"}:
        return abs(f1.p - f2.p)
    return None


def channel_op_distance(phi: Channel, psi: Channel, trials: int = 64, seed: int = 0) -> DistanceEstimate:
    """Lower bound on ``1/2 ||Phi - Psi||`` from pure inputs (basis, Fourier, random, refined)."""
    _same_dims(phi, psi)
    d = phi.d_in
    rng = np.random.default_rng(seed)

    def objective(v: np.ndarray) -> float:
        rho = DensityMatrix.pure(v)
        return 0.5 * trace_norm(apply_difference(phi, psi, rho))

    starts = list(np.eye(d, dtype=complex)) + list(np.fft.fft(np.eye(d)) / math.sqrt(d))
    val, vec = _maximize_over_pure(objective, d, starts, rng, trials)
    upper = _analytic_upper(phi, psi)
    return DistanceEstimate(val, 1.0 if upper is None else upper, vec, upper is not None)


def channel_diamond_distance(phi: Channel, psi: Channel, trials: int = 64, seed: int = 0) -> DistanceEstimate:
    """Lower bound on ``1/2 ||Phi - Psi||_diamond`` over pure inputs on ``A (x) R``, ``R = A``.

    For identity/depolarizing and erasure pairs the analytic upper bound is
    attached; otherwise the trivial upper bound 1.
    """
    _same_dims(phi, psi)
    d = phi.d_in

    def objective(v: np.ndarray) -> float:
        rho = DensityMatrix.pure(v, (d, d))
        return 0.5 * trace_norm(apply_difference(phi, psi, rho, on=0))

    rng = np.random.default_rng(seed)
    starts = [np.eye(d, dtype=complex).reshape(-1)] + [np.kron(e, np.eye(d)[0]) for e in np.eye(d, dtype=complex)]
    val, vec = _maximize_over_pure(objective, d * d, starts, rng, trials)
    upper = _analytic_upper(phi, psi)
    return DistanceEstimate(val, 1.0 if upper is None else upper, vec, upper is not None)


def d_prop3(phi: Channel, psi: Channel, rho: DensityMatrix, n: int) -> tuple[float, int]:
    """``1/2 sup ||(Phi - Psi) (x) id_R (omega)||_1`` over extensions of the marginals
    ``rho_{A_1} ... rho_{A_n}`` (the first ``n`` factors of ``rho``).

    Every extension of a marginal is obtained from its purification by a
    channel on the reference, which cannot increase the trace norm, so the
    supremum for each marginal is attained at the purification.  Returns the
    value and the maximizing index.
    """
    _same_dims(phi, psi)
    if n < 1 or len(rho.dims) < n or any(dk != phi.d_in for dk in rho.dims[:n]):
        raise BadDims(f"first {n} factors of dims {rho.dims} must all have dim {phi.d_in}")
    best, arg = -1.0, 0
    for k in range(n):
        marginal = partial_trace(rho, [k])
        pur = purify(marginal)
        val = 0.5 * trace_norm(apply_difference(phi, psi, pur, on=0))
        if val > best + 1e-15:
            best, arg = val, k
    return best, arg


def analytic_capacities(fam: ChannelFamily, base=2) -> dict:
    """Closed-form capacities for the supported families.

    Keys: ``Cchi``, ``Cea``, ``C``, ``Q`` (``None`` when no closed form is
    used) and ``non_paper``, listing values taken from standard results
    rather than from the continuity analysis (erasure ``Cchi``, ``Cea``, ``C``).
    """
    k = log_factor(base)
    d, p = fam.d, fam.p
    ln_d = math.log(d)
    if fam.kind == "identity":
        return {"Cchi": ln_d * k, "Cea": 2 * ln_d * k, "C": ln_d * k, "Q": ln_d * k, "non_paper": []}
    if fam.kind == "depolarizing":
        c = 1 - 1 / d
        ct = 1 - 1 / d**2
        cchi = ln_d + float(xlogx(1 - p * c)) + (p * c * math.log(p / d) if p > 0 else 0.0)
        cea = 2 * ln_d + float(xlogx(1 - p * ct)) + (p * ct * math.log(p / d**2) if p > 0 else 0.0)
        return {"Cchi": cchi * k, "Cea": cea * k, "C": cchi * k, "Q": None, "non_paper": []}
    if fam.kind == "erasure":
        q = max(0.0, 1 - 2 * p) * ln_d
        return {
            "Cchi": (1 - p) * ln_d * k,
            "Cea": 2 * (1 - p) * ln_d * k,
            "C": (1 - p) * ln_d * k,
            "Q": q * k,
            "non_paper": ["Cchi", "Cea", "C"],
        }
    if fam.kind == "completely-depolarizing":
        return {"Cchi": 0.0, "Cea": 0.0, "C": 0.0, "Q": 0.0, "non_paper": []}
    raise UnsupportedFamily(f"no closed form for {fam.kind!r}")


def _output_entropy_pure(channel: Channel, v: np.ndarray, base) -> float:
    w = channel.kraus @ v  # (r, d_out): columns K_k v
    gram = w.conj() @ w.T
    return spectral_entropy(np.linalg.eigvalsh(0.5 * (gram + gram.conj().T)), base)


def _softmax(x: np.ndarray) -> np.ndarray:
    e = np.exp(x - x.max())
    return e / e.sum()


@dataclass
class OptimizationResult:
    value: float
    witness: object
    restarts: int

    def to_dict(self) -> dict:
        return {"value": self.value, "restarts": self.restarts}


def one_shot_holevo(channel: Channel, restarts: int = 32, seed: int = 0, base=2) -> OptimizationResult:
    """Lower bound on the Holevo capacity over ensembles of ``d_in^2`` pure inputs.

    Restart 0 is the uniform computational-basis ensemble; the rest are seeded
    random.  Each start is refined by L-BFGS-B.
    """
    d = channel.d_in
    kk = d * d
    rng = np.random.default_rng(seed)

    def unpack(x):
        probs = _softmax(x[:kk])
        vecs = x[kk:].reshape(2, kk, d)
        vecs = vecs[0] + 1j * vecs[1]
        vecs /= np.linalg.norm(vecs, axis=1, keepdims=True).clip(1e-300)
        return probs, vecs

    def chi(x) -> float:
        probs, vecs = unpack(x)
        avg = np.zeros((channel.d_out, channel.d_out), dtype=complex)
        inner = 0.0
        for p, v in zip(probs, vecs):
            w = channel.kraus @ v
            avg += p * (w.T @ w.conj())
            inner += p * _output_entropy_pure(channel, v, base)
        return entropy(0.5 * (avg + avg.conj().T), base) - inner

    def start(i: int) -> np.ndarray:
        if i == 0:
            logits = np.full(kk, -30.0)
            logits[:d] = 0.0
            vecs = np.zeros((kk, d), dtype=complex)
            vecs[:d] = np.eye(d)
            vecs[d:] = np.eye(d)[0]
            return np.concatenate([logits, vecs.real.reshape(-1), vecs.imag.reshape(-1)])
        return rng.standard_normal(kk + 2 * kk * d)

    best, witness = -np.inf, None
    for i in range(restarts):
        x0 = start(i)
        res = minimize(lambda x: -chi(x), x0, method="L-BFGS-B", options={"maxiter": 500})
        for x in (x0, res.x):
            val = chi(x)
            if val > best:
                best, witness = val, unpack(x)
    return OptimizationResult(max(best, 0.0), witness, restarts)


def _state_from_params(x: np.ndarray, d: int) -> np.ndarray:
    a = x[: d * d].reshape(d, d) + 1j * x[d * d :].reshape(d, d)
    m = a @ a.conj().T
    return m / np.trace(m).real


def _maximize_over_states(objective, d: int, restarts: int, seed: int) -> OptimizationResult:
    rng = np.random.default_rng(seed)
    starts = [np.concatenate([np.eye(d).reshape(-1), np.zeros(d * d)])]
    for i in range(d):
        a = np.zeros((d, d))
        a[i, i] = 1.0
        starts.append(np.concatenate([a.reshape(-1), np.zeros(d * d)]))
    while len(starts) < restarts:
        starts.append(rng.standard_normal(2 * d * d))
    best, witness = -np.inf, None
    for x0 in starts[:max(restarts, 1 + d)]:
        res = minimize(lambda x: -objective(_state_from_params(x, d)), x0, method="L-BFGS-B", options={"maxiter": 500})
        for x in (x0, res.x):
            m = _state_from_params(x, d)
            val = objective(m)
            if val > best:
                best, witness = val, m
    return OptimizationResult(best, DensityMatrix.trusted(witness), restarts)


def one_shot_coherent_max(channel: Channel, restarts: int = 16, seed: int = 0, base=2) -> OptimizationResult:
    """Lower bound on the maximal single-letter coherent information."""
    comp = complementary(channel)
    d = channel.d_in

    def objective(m: np.ndarray) -> float:
        rho = DensityMatrix.trusted(m)
        return entropy(apply(channel, rho), base) - entropy(apply(comp, rho), base)

    return _maximize_over_states(objective, d, restarts, seed)


def mutual_information_of_channel(channel: Channel, rho: DensityMatrix, base=2) -> float:
    """``I(B:R)`` of ``Phi (x) id_R`` applied to a purification of ``rho``."""
    if rho.dim != channel.d_in:
        raise BadDims(f"state dim {rho.dim} does not match channel input {channel.d_in}")
    pur = purify(DensityMatrix.trusted(rho.matrix))
    return mutual_information(apply(channel, pur, on=0), base=base)


def one_shot_mutual_max(channel: Channel, restarts: int = 16, seed: int = 0, base=2) -> OptimizationResult:
    """Lower bound on the entanglement-assisted capacity ``sup_rho I(Phi, rho)``."""

    def objective(m: np.ndarray) -> float:
        return mutual_information_of_channel(channel, DensityMatrix.trusted(m), base)

    return _maximize_over_states(objective, channel.d_in, restarts, seed)
