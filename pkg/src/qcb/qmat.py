"""Dense Hermitian linear algebra and density-matrix primitives.

Tensor products follow one convention throughout the package: row-major,
leftmost factor slowest, so the basis vector ``|i1 ... ik>`` sits at index
``sum_j i_j * prod_{l>j} dims[l]``.  This is exactly what ``numpy.kron``
and ``reshape`` produce.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BadSubsystem, InvalidState, NoConvergence, NonHermitian

HERMITIAN_TOL = 1e-8
STATE_TOL = 1e-10
CLAMP_TOL = 1e-10
SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _as_square(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def hermitian_deviation(m) -> float:
    a = np.asarray(m)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def check_hermitian(m, tol: float = HERMITIAN_TOL) -> np.ndarray:
    a = _as_square(m)
    scale = max(1.0, float(np.max(np.abs(a)))) if a.size else 1.0
    dev = hermitian_deviation(a)
    if dev > tol * scale:
        raise NonHermitian(f"matrix deviates from Hermitian by {dev:.3e}")
    return a


def jacobi_eigh(m, tol: float = 1e-12) -> EigenDecomposition:
    """Cyclic Jacobi eigensolver for a complex Hermitian matrix.

    Each rotation first removes the phase of the pivot ``a_pq`` with a
    diagonal unitary and then applies the real symmetric Schur rotation.
    Sweeps stop once the off-diagonal Frobenius mass drops below
    ``tol * ||m||_F``.  The total number of rotations is capped at
    ``100 n^2``.
    """
    a = check_hermitian(m).copy()
    a = 0.5 * (a + a.conj().T)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    norm = np.linalg.norm(a)
    if n <= 1 or norm == 0.0:
        return EigenDecomposition(np.real(np.diag(a)).copy(), v)
    target = tol * norm
    cap = 100 * n * n
    rotations = 0
    while True:
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off < target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag < 1e-300 or mag < 1e-18 * norm:
                    continue
                if rotations >= cap:
                    raise NoConvergence(f"Jacobi exceeded {cap} rotations")
                rotations += 1
                phase = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                u = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ u
                a[idx, :] = u.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ u
    vals = np.real(np.diag(a))
    order = np.argsort(vals, kind="stable")
    return EigenDecomposition(vals[order], v[:, order])


def eig_hermitian(m, method: str = "lapack") -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    ``method="lapack"`` (default) calls ``numpy.linalg.eigh``;
    ``method="jacobi"`` runs :func:`jacobi_eigh`.
    """
    if method == "jacobi":
        return jacobi_eigh(m)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    a = check_hermitian(m)
    vals, vecs = np.linalg.eigh(0.5 * (a + a.conj().T))
    return EigenDecomposition(vals, vecs)


def eigvalsh(m) -> np.ndarray:
    a = check_hermitian(m)
    return np.linalg.eigvalsh(0.5 * (a + a.conj().T))


def clamp_spectrum(vals: np.ndarray) -> np.ndarray:
    """Zero out round-off negatives before they reach ``x log x``."""
    out = np.array(vals, dtype=float)
    out[(out < 0) & (out >= -CLAMP_TOL)] = 0.0
    return np.clip(out, 0.0, None)


def trace_norm(m) -> float:
    return float(np.sum(np.abs(eigvalsh(m))))


def positive_negative_parts(m) -> tuple[np.ndarray, np.ndarray]:
    """Jordan decomposition ``m = P - N`` with ``P, N >= 0`` and ``PN = 0``."""
    dec = eig_hermitian(m)
    v = dec.eigenvectors
    pos = np.clip(dec.eigenvalues, 0.0, None)
    neg = np.clip(-dec.eigenvalues, 0.0, None)
    return (v * pos) @ v.conj().T, (v * neg) @ v.conj().T


def kron(*ms) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in ms:
        out = np.kron(out, np.asarray(m))
    return out


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated density matrix over an ordered tensor factorization."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __init__(self, matrix, dims: Sequence[int] | None = None, validate: bool = True):
        a = np.array(matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidState(f"density matrix must be square, got {a.shape}")
        dims = (a.shape[0],) if dims is None else tuple(int(d) for d in dims)
        if any(d < 1 for d in dims) or int(np.prod(dims)) != a.shape[0]:
            raise InvalidState(f"dims {dims} do not match matrix side {a.shape[0]}")
        if validate:
            dev = hermitian_deviation(a)
            if dev > STATE_TOL:
                raise InvalidState(f"not Hermitian (deviation {dev:.3e})")
            tr = np.trace(a).real
            if abs(tr - 1.0) > STATE_TOL:
                raise InvalidState(f"trace {tr!r} differs from 1")
            lo = np.linalg.eigvalsh(0.5 * (a + a.conj().T))[0]
            if lo < -STATE_TOL:
                raise InvalidState(f"negative eigenvalue {lo:.3e}")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def trusted(cls, matrix, dims=None) -> "DensityMatrix":
        """Wrap a matrix known to be a state, hermitizing it, without checks."""
        a = np.asarray(matrix, dtype=complex)
        return cls(0.5 * (a + a.conj().T), dims, validate=False)

    @classmethod
    def pure(cls, vector, dims=None) -> "DensityMatrix":
        psi = np.asarray(vector, dtype=complex).reshape(-1)
        psi = psi / np.linalg.norm(psi)
        return cls.trusted(np.outer(psi, psi.conj()), dims)

    @classmethod
    def maximally_mixed(cls, d: int) -> "DensityMatrix":
        return cls.trusted(np.eye(d) / d, (d,))

    @classmethod
    def diagonal(cls, probs, dims=None) -> "DensityMatrix":
        p = np.asarray(probs, dtype=float)
        return cls(np.diag(p), dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return clamp_spectrum(np.linalg.eigvalsh(self.matrix))

    def tensor(self, other: "DensityMatrix") -> "DensityMatrix":
        return DensityMatrix.trusted(np.kron(self.matrix, other.matrix), self.dims + other.dims)

    def __repr__(self) -> str:
        return f"DensityMatrix(dims={self.dims})"


def _normalize_keep(keep: Iterable[int], n: int) -> list[int]:
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise BadSubsystem("keep must be nonempty")
    for k in keep:
        if k < 0 or k >= n:
            raise BadSubsystem(f"subsystem index {k} out of range for {n} factors")
    return keep


def partial_trace_array(m: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    dims = tuple(dims)
    n = len(dims)
    keep = _normalize_keep(keep, n)
    drop = [k for k in range(n) if k not in keep]
    t = np.asarray(m).reshape(dims + dims)
    perm = keep + drop
    t = t.transpose(perm + [n + k for k in perm])
    dk = int(np.prod([dims[k] for k in keep]))
    dd = int(np.prod([dims[k] for k in drop])) if drop else 1
    t = t.reshape(dk, dd, dk, dd)
    return np.einsum("ajbj->ab", t)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """Reduce ``rho`` to the subsystems listed in ``keep`` (order preserved)."""
    keep = _normalize_keep(keep, len(rho.dims))
    out = partial_trace_array(rho.matrix, rho.dims, keep)
    return DensityMatrix.trusted(out, tuple(rho.dims[k] for k in keep))


def permute_subsystems(rho: DensityMatrix, order: Sequence[int]) -> DensityMatrix:
    """Reorder tensor factors; ``order[j]`` is the old index of new factor ``j``."""
    n = len(rho.dims)
    order = list(order)
    if sorted(order) != list(range(n)):
        raise BadSubsystem(f"{order} is not a permutation of {n} factors")
    t = rho.matrix.reshape(rho.dims + rho.dims)
    t = t.transpose(order + [n + k for k in order])
    d = rho.dim
    return DensityMatrix.trusted(t.reshape(d, d), tuple(rho.dims[k] for k in order))


def purify(rho: DensityMatrix) -> DensityMatrix:
    """Spectral purification on ``system (x) reference``.

    The reference dimension equals the number of eigenvalues above 1e-12.
    """
    dec = eig_hermitian(rho.matrix)
    vals = clamp_spectrum(dec.eigenvalues)
    support = np.flatnonzero(vals > SUPPORT_TOL)
    r = len(support)
    psi = np.zeros((rho.dim, r), dtype=complex)
    for col, k in enumerate(support):
        psi[:, col] = np.sqrt(vals[k]) * dec.eigenvectors[:, k]
    psi = psi.reshape(-1)
    psi /= np.linalg.norm(psi)
    return DensityMatrix.trusted(np.outer(psi, psi.conj()), rho.dims + (r,))


def trace_distance(rho, sigma) -> float:
    a = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    b = sigma.matrix if isinstance(sigma, DensityMatrix) else np.asarray(sigma)
    return 0.5 * trace_norm(a - b)


def basis_vector(i: int, d: int) -> np.ndarray:
    e = np.zeros(d, dtype=complex)
    e[i] = 1.0
    return e


def basis_projector(i: int, d: int) -> np.ndarray:
    p = np.zeros((d, d), dtype=complex)
    p[i, i] = 1.0
    return p


def maximally_entangled(d: int) -> DensityMatrix:
    psi = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return DensityMatrix.pure(psi, (d, d))


def random_state(d: int, rng: np.random.Generator, dims=None, rank: int | None = None) -> DensityMatrix:
    """``G G^dag / Tr`` for a ``d x rank`` matrix of standard complex Gaussians."""
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    m = g @ g.conj().T
    return DensityMatrix.trusted(m / np.trace(m).real, dims or (d,))


def random_pure(d: int, rng: np.random.Generator, dims=None) -> DensityMatrix:
    psi = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return DensityMatrix.pure(psi, dims or (d,))


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph
