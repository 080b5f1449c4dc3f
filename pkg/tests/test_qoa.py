"""Quantum orthogonal arrays, generalized grids, and uniform states."""

import itertools

import numpy as np
import pytest
import scipy.sparse as sp

from qcdesign.classical import mols_prime_power, oa_strength3_rs, oa_to_molc
from qcdesign.fixtures import fixture
from qcdesign.linalg import PartySplit, partial_cross_trace
from qcdesign.qdesign import embed_classical
from qcdesign.qoa import (
    GeneralizedGrid,
    PureState,
    QuantumOrthogonalArray,
    gmoqlc_to_qoa,
    gmoqls_to_qoa,
    grids_to_generalized,
    k_uniform_violation,
    moqlc_to_qoa,
    moqls_to_qoa,
    qoa_to_gmoqlc,
    qoa_to_gmoqls,
    state_from_qoa,
    verify_gmoqlc,
    verify_gmoqls,
    verify_k_uniform,
    verify_qoa,
)

TOL = 1e-9


def brute_force_qoa_check(q, tol=TOL):
    """Oracle: evaluate the pairwise double sum with dense partial traces."""
    rows = [q.row_dense(i) for i in range(q.size)]
    scale = q.size / q.local_dim**q.strength
    for keep in itertools.combinations(range(q.parties), q.strength):
        split = PartySplit(q.parties, q.local_dim, keep)
        acc = np.zeros((split.kept_dim, split.kept_dim), dtype=complex)
        for u in rows:
            for v in rows:
                acc += partial_cross_trace(u, v, split)
        if np.max(np.abs(acc - scale * np.eye(split.kept_dim))) > tol:
            return False
    return True


def rows_as_set(q):
    dense = np.asarray(q.rows.todense())
    return sorted(map(tuple, np.round(dense, 12)))


def test_bell_array_verifies_and_matches_brute_force():
    q = fixture("qoa_bell")
    assert verify_qoa(q)
    assert brute_force_qoa_check(q)


def test_single_product_row_is_not_uniform():
    row = np.zeros(4, dtype=complex)
    row[0] = 1.0
    q = QuantumOrthogonalArray(2, 2, 1, sp.csr_matrix(row))
    assert not verify_qoa(q)


def test_qoa343_strength3():
    assert verify_qoa(fixture("qoa343"))


def test_state_from_bell_array():
    st = state_from_qoa(fixture("qoa_bell"))
    # equal superposition of the four rows: amplitudes 1/(2*sqrt(2)) on the
    # eight populated basis states
    total = fixture("qoa_bell").rows.sum(axis=0)
    assert np.allclose(st.amplitudes, np.asarray(total).ravel() / 2.0)
    assert abs(abs(st.amplitudes[0]) - 1 / (2 * np.sqrt(2))) < 1e-12
    assert verify_k_uniform(st, 2)


def test_state_from_single_row_is_the_row():
    row = np.zeros(4, dtype=complex)
    row[1] = 1.0
    q = QuantumOrthogonalArray(2, 2, 1, sp.csr_matrix(row))
    st = state_from_qoa(q)
    assert np.allclose(st.amplitudes, row)


def test_state_from_qoa_rejects_non_orthogonal_rows():
    row = np.zeros(4, dtype=complex)
    row[1] = 1.0
    q = QuantumOrthogonalArray(2, 2, 1, sp.csr_matrix(np.array([row, row])))
    with pytest.raises(ValueError):
        state_from_qoa(q)


def test_ghz_is_1_uniform_but_product_is_not():
    ghz = np.zeros(8, dtype=complex)
    ghz[[0, 7]] = 1 / np.sqrt(2)
    assert verify_k_uniform(PureState(3, 2, ghz), 1)
    prod = np.zeros(8, dtype=complex)
    prod[0] = 1.0
    assert not verify_k_uniform(PureState(3, 2, prod), 1)


def test_k_uniform_range_check():
    ghz = np.zeros(8, dtype=complex)
    ghz[[0, 7]] = 1 / np.sqrt(2)
    with pytest.raises(ValueError):
        verify_k_uniform(PureState(3, 2, ghz), 2)


def test_uniformity_is_monotone_on_reference_states():
    st343 = state_from_qoa(fixture("qoa343"))
    assert verify_k_uniform(st343, 3)
    assert verify_k_uniform(st343, 2)
    assert verify_k_uniform(st343, 1)
    st_bell = state_from_qoa(fixture("qoa_bell"))
    assert verify_k_uniform(st_bell, 2)
    assert verify_k_uniform(st_bell, 1)


def test_threaded_subset_checks_agree():
    q = fixture("qoa_bell")
    assert verify_qoa(q, threads=4) == verify_qoa(q, threads=1)
    st = state_from_qoa(q)
    assert verify_k_uniform(st, 2, threads=4)


# ---------------------------------------------------------------------------
# square conversions


def test_bell_grid_cells():
    g = qoa_to_gmoqls(fixture("qoa_bell"))
    assert (g.order, g.parties) == (2, 3)
    root = 1 / np.sqrt(2)
    want = np.zeros(8, dtype=complex)
    want[[0, 3]] = root  # |0> (x) (|00>+|11>)/sqrt(2)
    assert np.allclose(g.cell_dense(0, 0), want)
    want = np.zeros(8, dtype=complex)
    want[[5, 6]] = root  # |1> (x) (|01>+|10>)/sqrt(2)
    assert np.allclose(g.cell_dense(0, 1), want)
    assert verify_gmoqls(g)


def test_bell_round_trip_is_identity():
    q = fixture("qoa_bell")
    back = gmoqls_to_qoa(qoa_to_gmoqls(q))
    assert rows_as_set(back) == rows_as_set(q)


def test_classical_oa_grid_is_product_cells():
    q = moqls_to_qoa([embed_classical(s) for s in mols_prime_power(3)])
    g = qoa_to_gmoqls(q)
    assert verify_gmoqls(g)
    for i, j in itertools.product(range(3), repeat=2):
        cell = g.cell_dense(i, j)
        assert np.count_nonzero(cell) == 1


def test_entangled_address_row_is_rejected():
    rows = np.zeros((4, 16), dtype=complex)
    rows[0, [0, 15]] = 1 / np.sqrt(2)  # addresses (0,0) and (1,1) entangled
    rows[1, 5] = 1.0
    rows[2, 10] = 1.0
    rows[3, 3] = 1.0
    q = QuantumOrthogonalArray(4, 2, 2, sp.csr_matrix(rows))
    with pytest.raises(ValueError):
        qoa_to_gmoqls(q)


def test_gmoqls_round_trip_on_moqls12():
    q = moqls_to_qoa(list(fixture("moqls12")))
    assert (q.size, q.parties, q.local_dim) == (144, 4, 12)
    g = qoa_to_gmoqls(q)
    assert verify_gmoqls(g)
    back = gmoqls_to_qoa(g)
    assert rows_as_set(back) == rows_as_set(q)


def test_product_cells_of_moqls_pass_generalized_check():
    gs = [embed_classical(s) for s in mols_prime_power(4)[:2]]
    gg = grids_to_generalized(gs)
    assert verify_gmoqls(gg)


def test_corrupted_cell_fails_both_verifiers():
    q = moqls_to_qoa([embed_classical(s) for s in mols_prime_power(3)])
    g = qoa_to_gmoqls(q)
    cells = g.cells.tolil()
    row0 = cells[0].toarray().ravel()
    cells[0] = np.roll(row0, 1)  # displace one cell onto another basis state
    bad_grid = GeneralizedGrid(2, 3, 2, cells.tocsr())
    assert not verify_gmoqls(bad_grid)
    bad_rows = q.rows.tolil()
    bad_rows[0] = np.roll(bad_rows[0].toarray().ravel(), 1)
    bad_qoa = QuantumOrthogonalArray(4, 3, 2, bad_rows.tocsr())
    assert not verify_qoa(bad_qoa)


# ---------------------------------------------------------------------------
# cube conversions


def test_qoa343_to_cube_grid_and_back():
    q = fixture("qoa343")
    g = qoa_to_gmoqlc(q)
    assert (g.order, g.parties) == (7, 4)
    assert verify_gmoqlc(g)
    back = gmoqlc_to_qoa(g)
    assert rows_as_set(back) == rows_as_set(q)


def test_qoa343_first_row_classical_head():
    q = fixture("qoa343")
    row = q.row_dense(0)
    idx = np.flatnonzero(row)
    # address digits of every nonzero amplitude start with 0,0,0,0
    digits = (idx[:, None] // 7 ** np.arange(6, -1, -1)[None, :]) % 7
    assert np.all(digits[:, :4] == 0)


def test_moqlc16_product_cells_pass_generalized_check():
    gg = grids_to_generalized(list(fixture("moqlc16")))
    assert verify_gmoqlc(gg)


def test_moqlc_to_qoa_classical_five():
    cubes = [embed_classical(c) for c in oa_to_molc(oa_strength3_rs(5))[:3]]
    q = moqlc_to_qoa(cubes)
    assert (q.size, q.parties, q.local_dim, q.strength) == (125, 6, 5, 3)
    assert verify_qoa(q)
    st = state_from_qoa(q)
    assert verify_k_uniform(st, 3)


def test_cube_corruption_fails_both_verifiers():
    cubes = [embed_classical(c) for c in oa_to_molc(oa_strength3_rs(4))[:3]]
    q = moqlc_to_qoa(cubes)
    g = qoa_to_gmoqlc(q)
    assert verify_gmoqlc(g)
    cells = g.cells.tolil()
    cells[0] = np.roll(cells[0].toarray().ravel(), 1)
    assert not verify_gmoqlc(GeneralizedGrid(3, 4, 3, cells.tocsr()))
    rows = q.rows.tolil()
    rows[0] = np.roll(rows[0].toarray().ravel(), 1)
    assert not verify_qoa(QuantumOrthogonalArray(6, 4, 3, rows.tocsr()))


@pytest.mark.slow
def test_moqlc16_generates_six_party_uniform_state():
    q = moqlc_to_qoa(list(fixture("moqlc16")))
    assert (q.size, q.parties, q.local_dim) == (4096, 6, 16)
    st = state_from_qoa(q)
    assert verify_k_uniform(st, 3)
