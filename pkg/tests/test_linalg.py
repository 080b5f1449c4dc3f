"""Tests for the dense complex core, checked against brute-force oracles."""

import numpy as np
import pytest
import scipy.sparse as sp

from qcdesign.linalg import (
    PartySplit,
    basis_vector,
    dft_matrix,
    gram_deviation,
    gram_is_identity,
    inner,
    is_unitary,
    partial_cross_trace,
    reduction_deviation,
    tensor,
    tensor_all,
)


def brute_force_cross_trace(u, v, split):
    """Oracle: materialize |u><v| and trace axes pairwise."""
    rho = np.outer(u, np.conj(v))
    d, n = split.local_dim, split.parties
    t = rho.reshape((d,) * (2 * n))
    # trace highest party index first so remaining axis numbers stay valid
    for p in sorted(split.traced, reverse=True):
        t = np.trace(t, axis1=p, axis2=p + (t.ndim // 2))
    return t.reshape(split.kept_dim, split.kept_dim)


def random_state(rng, dim):
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def test_tensor_basis_cases():
    e0, e1 = basis_vector(0, 2), basis_vector(1, 2)
    out = tensor(e0, e1)
    assert out.shape == (4,)
    assert out[1] == 1.0 and np.count_nonzero(out) == 1

    out = tensor(basis_vector(0, 3), basis_vector(1, 2))
    assert out.shape == (6,)
    assert out[1] == 1.0 and np.count_nonzero(out) == 1


def test_tensor_preserves_norm():
    rng = np.random.default_rng(1)
    u = random_state(rng, 3)
    v = random_state(rng, 4)
    # oracle: direct norm computation on the product
    assert abs(np.sqrt(sum(abs(x) ** 2 for x in tensor(u, v))) - 1.0) < 1e-12


def test_tensor_associative_up_to_flattening():
    rng = np.random.default_rng(2)
    u, v, w = (random_state(rng, d) for d in (2, 3, 4))
    left = tensor(tensor(u, v), w)
    right = tensor(u, tensor(v, w))
    assert np.max(np.abs(left - right)) < 1e-15
    assert np.max(np.abs(tensor_all([u, v, w]) - left)) < 1e-15


def test_inner_soqls14_superposition_cells():
    # the two equal-weight superpositions over |10>..|13> with sign patterns
    # ++++ and +-+- are orthogonal
    phi1 = np.zeros(14, dtype=complex)
    phi2 = np.zeros(14, dtype=complex)
    phi1[10:14] = 0.5
    phi2[10:14] = [0.5, -0.5, 0.5, -0.5]
    assert inner(phi1, phi2) == 0
    assert abs(inner(phi1, phi1) - 1.0) < 1e-15


def test_inner_conjugate_linear_first_argument():
    rng = np.random.default_rng(3)
    u = random_state(rng, 5)
    v = random_state(rng, 5)
    alpha = 0.3 - 1.7j
    # oracle: explicit sum
    direct = sum(np.conj(a) * b for a, b in zip(u, alpha * v))
    assert abs(inner(u, alpha * v) - alpha * inner(u, v)) < 1e-12
    assert abs(inner(u, alpha * v) - direct) < 1e-12


def test_inner_dimension_mismatch():
    with pytest.raises(ValueError):
        inner(np.ones(2), np.ones(3))


def test_is_unitary_identity():
    assert is_unitary(np.eye(5))


def test_is_unitary_printed_truncated_matrix_fails():
    # a 3x3 block matrix whose bottom-right entry is 1/sqrt(2) instead of 1:
    # the last column has norm ~0.707, so the matrix is not unitary
    s = 1 / np.sqrt(2)
    m = np.array([[s, s, 0], [s, -s, 0], [0, 0, s]])
    col_norm = np.sqrt(sum(abs(x) ** 2 for x in m[:, 2]))
    assert abs(col_norm - s) < 1e-12
    assert not is_unitary(m)
    m_fixed = m.copy()
    m_fixed[2, 2] = 1.0
    assert is_unitary(m_fixed)


def test_is_unitary_rejects_non_square():
    with pytest.raises(ValueError):
        is_unitary(np.ones((2, 3)))


def test_gram_is_identity_fourier_columns():
    f = dft_matrix(3)
    assert gram_is_identity([f[:, j] for j in range(3)])


def test_gram_is_identity_repeated_vector():
    e0 = basis_vector(0, 2)
    assert not gram_is_identity([e0, e0])


def test_gram_requires_full_basis_count():
    with pytest.raises(ValueError):
        gram_is_identity([basis_vector(0, 3), basis_vector(1, 3)])


def test_gram_phase_invariance():
    rng = np.random.default_rng(4)
    f = dft_matrix(4)
    vs = [f[:, j] for j in range(4)]
    assert gram_is_identity(vs)
    phased = [np.exp(2j * np.pi * rng.random()) * v for v in vs]
    assert gram_is_identity(phased)


def test_gram_sparse_and_dense_paths_agree():
    rng = np.random.default_rng(5)
    vs = np.eye(6, dtype=complex)
    vs[0, 0] = 0.999
    dense = gram_deviation(vs)
    sparse = gram_deviation(sp.csr_matrix(vs))
    assert abs(dense - sparse) < 1e-15
    assert abs(dense - (1 - 0.999**2)) < 1e-12


def test_partial_cross_trace_bell_reduction():
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1 / np.sqrt(2)
    rho = partial_cross_trace(bell, bell, PartySplit(2, 2, (0,)))
    assert np.max(np.abs(rho - np.eye(2) / 2)) < 1e-12


def test_partial_cross_trace_product_state():
    v = tensor(basis_vector(0, 2), basis_vector(1, 2))
    rho = partial_cross_trace(v, v, PartySplit(2, 2, (1,)))
    expected = np.outer(basis_vector(1, 2), basis_vector(1, 2))
    assert np.max(np.abs(rho - expected)) < 1e-12


def test_partial_cross_trace_trace_equals_inner():
    rng = np.random.default_rng(6)
    split = PartySplit(3, 2, (0, 2))
    u = random_state(rng, 8)
    v = random_state(rng, 8)
    got = np.trace(partial_cross_trace(u, v, split))
    assert abs(got - inner(v, u)) < 1e-12


@pytest.mark.parametrize("keep", [(), (0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)])
def test_partial_cross_trace_matches_brute_force(keep):
    rng = np.random.default_rng(7)
    split = PartySplit(3, 3, keep)
    u = random_state(rng, 27)
    v = random_state(rng, 27)
    got = partial_cross_trace(u, v, split)
    want = brute_force_cross_trace(u, v, split)
    assert np.max(np.abs(got - want)) < 1e-12


def test_partial_cross_trace_sparse_matches_dense():
    rng = np.random.default_rng(8)
    split = PartySplit(4, 2, (1, 3))
    u = np.zeros(16, dtype=complex)
    u[[0, 5, 9]] = random_state(rng, 3)
    v = np.zeros(16, dtype=complex)
    v[[2, 5, 14]] = random_state(rng, 3)
    dense = partial_cross_trace(u, v, split)
    sparse = partial_cross_trace(sp.csr_matrix(u), sp.csr_matrix(v), split)
    assert np.max(np.abs(dense - sparse)) < 1e-14
    dev_sparse = reduction_deviation(sp.csr_matrix(u), sp.csr_matrix(u), split, 0.25)
    dev_dense = reduction_deviation(u, u, split, 0.25)
    assert abs(dev_sparse - dev_dense) < 1e-14


def test_partial_trace_of_unit_states_is_density_matrix():
    rng = np.random.default_rng(9)
    for _ in range(100):
        n = rng.integers(2, 5)
        d = int(rng.integers(2, 4))
        psi = random_state(rng, d**n)
        size = rng.integers(1, n + 1)
        keep = tuple(sorted(rng.choice(n, size=size, replace=False).tolist()))
        rho = partial_cross_trace(psi, psi, PartySplit(int(n), d, keep))
        assert np.max(np.abs(rho - rho.conj().T)) <= 1e-12
        assert abs(np.trace(rho) - 1.0) <= 1e-9
        assert np.linalg.eigvalsh(rho).min() >= -1e-9


def test_partial_cross_trace_keep_all_is_outer_product():
    rng = np.random.default_rng(10)
    u = random_state(rng, 8)
    v = random_state(rng, 8)
    rho = partial_cross_trace(u, v, PartySplit(3, 2, (0, 1, 2)))
    assert np.max(np.abs(rho - np.outer(u, np.conj(v)))) <= 1e-12


def test_reduction_deviation_matches_direct():
    rng = np.random.default_rng(11)
    split = PartySplit(3, 2, (0, 1))
    u = random_state(rng, 8)
    direct = np.max(np.abs(partial_cross_trace(u, u, split) - np.eye(4) / 4))
    assert abs(reduction_deviation(u, u, split, 0.25) - direct) < 1e-14


def test_dft_matrix_is_unitary():
    for dim in (1, 2, 3, 5, 12):
        assert is_unitary(dft_matrix(dim))
