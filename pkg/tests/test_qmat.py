import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qcb.errors import BadSubsystem, InvalidState, NonHermitian
from qcb.qmat import (
    DensityMatrix,
    eig_hermitian,
    jacobi_eigh,
    kron,
    maximally_entangled,
    partial_trace,
    permute_subsystems,
    positive_negative_parts,
    purify,
    random_state,
    random_unitary,
    trace_distance,
    trace_norm,
)

from oracles import loop_partial_trace

PAULI_X = np.array([[0, 1], [1, 0]])


def _random_hermitian(rng, n):
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return a + a.conj().T


@pytest.mark.parametrize("method", ["lapack", "jacobi"])
@pytest.mark.parametrize("m, expected", [(np.eye(3), [1, 1, 1]), (np.diag([2.0, -1.0]), [-1, 2]), (PAULI_X, [-1, 1])])
def test_eig_examples(method, m, expected):
    assert np.allclose(eig_hermitian(m, method).eigenvalues, expected, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 5, 16])
def test_jacobi_matches_lapack(rng, n):
    m = _random_hermitian(rng, n)
    dec = jacobi_eigh(m)
    assert np.allclose(dec.eigenvalues, np.linalg.eigvalsh(m), atol=1e-9)
    assert np.max(np.abs(dec.reconstruct() - m)) <= 1e-9
    v = dec.eigenvectors
    assert np.max(np.abs(v.conj().T @ v - np.eye(n))) <= 1e-9


def test_eig_rejects_non_hermitian():
    with pytest.raises(NonHermitian):
        eig_hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(NonHermitian):
        jacobi_eigh(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        eig_hermitian(np.eye(2), method="qr")


def test_trace_norm_examples(rng):
    assert trace_norm(np.zeros((3, 3))) == 0.0
    assert trace_norm(random_state(4, rng).matrix) == pytest.approx(1.0, abs=1e-12)
    assert trace_norm(np.diag([0.5, -0.5])) == pytest.approx(1.0)


def test_partial_trace_examples(rng):
    a, b = random_state(2, rng), random_state(3, rng)
    assert np.allclose(partial_trace(a.tensor(b), [0]).matrix, a.matrix)
    assert np.allclose(partial_trace(a.tensor(b), [1]).matrix, b.matrix)
    assert np.allclose(partial_trace(maximally_entangled(2), [0]).matrix, np.eye(2) / 2)
    probs = np.array([0.2, 0.5, 0.3])
    qc = sum(p * np.kron(random_state(2, rng).matrix, np.diag(np.eye(3)[i])) for i, p in enumerate(probs))
    assert np.allclose(partial_trace(DensityMatrix(qc, (2, 3)), [1]).matrix, np.diag(probs))


@pytest.mark.parametrize("dims, keep", [((2, 3), [0]), ((2, 3), [1]), ((2, 3, 2), [0, 2]), ((3, 2, 2), [1]), ((2, 2, 2), [2, 0])])
def test_partial_trace_matches_loop_oracle(rng, dims, keep):
    rho = random_state(int(np.prod(dims)), rng, dims=dims)
    out = partial_trace(rho, keep)
    assert out.dims == tuple(dims[k] for k in sorted(keep))
    assert np.allclose(out.matrix, loop_partial_trace(rho.matrix, dims, keep), atol=1e-12)
    assert abs(np.trace(out.matrix) - 1) <= 1e-10


def test_partial_trace_bad_index(rng):
    rho = random_state(4, rng, dims=(2, 2))
    with pytest.raises(BadSubsystem):
        partial_trace(rho, [2])
    with pytest.raises(BadSubsystem):
        partial_trace(rho, [])


def test_permute_subsystems_swaps_factors(rng):
    a, b, c = random_state(2, rng), random_state(3, rng), random_state(2, rng)
    abc = a.tensor(b).tensor(c)
    out = permute_subsystems(abc, [2, 0, 1])
    assert out.dims == (2, 2, 3)
    assert np.allclose(out.matrix, kron(c.matrix, a.matrix, b.matrix))
    with pytest.raises(BadSubsystem):
        permute_subsystems(abc, [0, 0, 1])


def test_positive_negative_parts_examples(rng):
    m = random_state(3, rng).matrix
    pos, neg = positive_negative_parts(m)
    assert np.allclose(pos, m) and np.allclose(neg, 0)
    pos, neg = positive_negative_parts(np.diag([1.0, -2.0]))
    assert np.allclose(pos, np.diag([1, 0])) and np.allclose(neg, np.diag([0, 2]))
    diff = random_state(3, rng).matrix - random_state(3, rng).matrix
    pos, neg = positive_negative_parts(diff)
    assert abs(np.trace(pos) - np.trace(neg)) <= 1e-12
    assert np.max(np.abs(pos @ neg)) <= 1e-9
    assert np.linalg.eigvalsh(pos)[0] >= -1e-10 and np.linalg.eigvalsh(neg)[0] >= -1e-10
    assert trace_norm(diff) == pytest.approx(np.trace(pos).real + np.trace(neg).real, abs=1e-8)


def test_purify_examples(rng):
    pure = DensityMatrix.pure([1, 1j])
    out = purify(pure)
    assert out.dims == (2, 1)
    assert np.allclose(out.matrix, pure.matrix)
    out = purify(DensityMatrix.maximally_mixed(2))
    assert out.dims == (2, 2)
    assert abs(np.vdot(maximally_entangled(2).matrix.ravel(), out.matrix.ravel())) == pytest.approx(1.0)
    out = purify(DensityMatrix.diagonal([0.9, 0.1]))
    schmidt = np.linalg.svd(np.linalg.eigh(out.matrix)[1][:, -1].reshape(2, 2), compute_uv=False)
    assert np.allclose(schmidt, [np.sqrt(0.9), np.sqrt(0.1)])


@pytest.mark.parametrize("d, rank", [(2, 2), (3, 2), (4, 1), (5, 5)])
def test_purify_round_trip(rng, d, rank):
    rho = random_state(d, rng, rank=rank)
    out = purify(rho)
    assert out.dims == (d, rank)
    assert np.sort(np.linalg.eigvalsh(out.matrix))[-2] <= 1e-9
    assert np.max(np.abs(partial_trace(out, [0]).matrix - rho.matrix)) <= 1e-9


def test_kron_examples(rng):
    assert np.allclose(kron(np.eye(2), np.eye(3)), np.eye(6))
    assert np.allclose(kron(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]))
    a, b, c, d = (rng.standard_normal((2, 2)) for _ in range(4))
    assert np.allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d))


def test_density_matrix_validation():
    with pytest.raises(InvalidState):
        DensityMatrix(np.diag([0.6, 0.6]))
    with pytest.raises(InvalidState):
        DensityMatrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidState):
        DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))
    with pytest.raises(InvalidState):
        DensityMatrix(np.eye(4) / 4, dims=(2, 3))
    with pytest.raises(InvalidState):
        DensityMatrix(np.ones(3))
    rho = DensityMatrix(np.eye(4) / 4, dims=(2, 2))
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1.0


def test_random_state_is_valid(rng):
    rho = random_state(4, rng, rank=2)
    DensityMatrix(rho.matrix)
    assert np.sum(np.linalg.eigvalsh(rho.matrix) > 1e-12) == 2
    u = random_unitary(4, rng)
    assert np.allclose(u.conj().T @ u, np.eye(4))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_trace_distance_in_unit_interval(seed, d):
    rng = np.random.default_rng(seed)
    t = trace_distance(random_state(d, rng), random_state(d, rng))
    assert -1e-12 <= t <= 1 + 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 6))
def test_trace_norm_equals_part_traces(seed, n):
    m = _random_hermitian(np.random.default_rng(seed), n)
    pos, neg = positive_negative_parts(m)
    assert trace_norm(m) == pytest.approx(np.trace(pos).real + np.trace(neg).real, abs=1e-8)
