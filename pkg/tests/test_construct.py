"""Constructions: every builder yields verifier-passing output on at least
two parameter sets beyond the stored reference designs."""

import numpy as np
import pytest

from qcdesign.classical import (
    hmols_unit_holes,
    hsols_unit_holes,
    mols_prime_power,
    oa_strength3_rs,
    oa_to_molc,
    sols_prime_power,
    square,
)
from qcdesign.construct import (
    BlockUnitary,
    default_block_unitary,
    fill_holes,
    hsoqls_product,
    moqlc_direct_product,
    moqlc_from_molc,
    moqls_direct_product,
    moqls_from_mols,
    soqls_fill,
    weighting,
)
from qcdesign.fixtures import (
    fixture,
    hsols_4x4,
    moqls12_blocks,
    quartet16_blocks,
    sols_4,
)
from qcdesign.linalg import is_unitary
from qcdesign.qdesign import (
    TauPattern,
    classicality_witness,
    conjugate,
    embed_classical,
    grid_from_cells,
    verify_hsoqls,
    verify_imoqls,
    verify_moqlc,
    verify_moqls,
    verify_qls,
    verify_soqls,
)


def classical_pair(q):
    return [embed_classical(s) for s in mols_prime_power(q)[:2]]


def classical_triple(q):
    return [embed_classical(c) for c in oa_to_molc(oa_strength3_rs(q))[:3]]


def one_block_pattern(shape, address):
    grid = np.zeros(shape, dtype=bool)
    grid[address] = True
    return TauPattern(grid)


def nonclassical_pair9():
    # order-9 pair with a lone lifted block, so the witness must fire
    mols3 = mols_prime_power(3)
    patterns = [one_block_pattern((3, 3), (0, 0)), one_block_pattern((3, 3), (1, 1))]
    return moqls_from_mols(mols3, mols3, patterns=patterns)


# ---------------------------------------------------------------------------
# block unitaries


def test_block_unitary_assembly_is_unitary():
    for blocks in (moqls12_blocks(), quartet16_blocks()):
        bu = BlockUnitary(blocks)
        assert is_unitary(bu.assemble())


def test_block_unitary_rejects_non_unitary_block():
    with pytest.raises(ValueError):
        BlockUnitary((np.eye(2), np.ones((2, 2))))


def test_non_identity_requirement():
    bu = BlockUnitary((np.eye(3), np.eye(3)))
    with pytest.raises(ValueError):
        bu.require_non_identity()
    default_block_unitary(2, 3).require_non_identity()


# ---------------------------------------------------------------------------
# direct products


def test_direct_product_of_classical_pairs():
    prod = moqls_direct_product(classical_pair(3), classical_pair(4))
    assert prod[0].order == 12
    assert verify_moqls(prod)


def test_direct_product_with_trivial_factor_preserves_cells():
    pair = classical_pair(3)
    one = grid_from_cells([[np.array([1.0])]])
    prod = moqls_direct_product(pair, [one, one])
    assert prod[0].order == 3
    assert np.allclose(prod[0].cells, pair[0].cells)


def test_direct_product_with_reference_pair():
    prod = moqls_direct_product(list(fixture("moqls12")), classical_pair(3))
    assert prod[0].order == 36
    assert verify_moqls(prod)


def test_cube_direct_product():
    prod = moqlc_direct_product(classical_triple(4), classical_triple(5))
    assert prod[0].order == 20
    assert verify_moqlc(prod)


def test_cube_direct_product_trivial_factor():
    one = grid_from_cells([[[np.array([1.0])]]])
    triple = classical_triple(4)
    prod = moqlc_direct_product(triple, [one, one, one])
    assert np.allclose(prod[1].cells, triple[1].cells)


def test_cube_direct_product_second_parameters():
    prod = moqlc_direct_product(classical_triple(4), classical_triple(4))
    assert prod[0].order == 16
    assert verify_moqlc(prod)


# ---------------------------------------------------------------------------
# block-unitary lifts


def test_lift_4x3_with_defaults():
    pair = moqls_from_mols(mols_prime_power(4)[:2], mols_prime_power(3)[:2])
    assert verify_moqls(pair)


def test_lift_3x3_fires_witness():
    pair = nonclassical_pair9()
    assert verify_moqls(pair)
    assert classicality_witness(pair[0]) is not None


def test_lift_4x5():
    pair = moqls_from_mols(mols_prime_power(4)[:2], mols_prime_power(5)[:2])
    assert pair[0].order == 20
    assert verify_moqls(pair)


def test_lift_all_identity_pattern_equals_classical_product():
    mols4, mols3 = mols_prime_power(4)[:2], mols_prime_power(3)[:2]
    flat = TauPattern(np.zeros((4, 4), dtype=bool))
    lifted = moqls_from_mols(mols4, mols3, patterns=[flat, flat])
    embedded = moqls_direct_product(
        [embed_classical(s) for s in mols4], [embed_classical(s) for s in mols3]
    )
    for a, b in zip(lifted, embedded):
        assert np.allclose(a.cells, b.cells)


def test_lift_all_u_pattern_still_orthogonal():
    mols4, mols3 = mols_prime_power(4)[:2], mols_prime_power(3)[:2]
    full = TauPattern(np.ones((4, 4), dtype=bool))
    lifted = moqls_from_mols(mols4, mols3, patterns=[full, full])
    assert verify_moqls(lifted)
    with pytest.raises(ValueError):
        full.require_mixed()


def test_cube_lift_5x4_with_single_block():
    molc5 = oa_to_molc(oa_strength3_rs(5))[:3]
    molc4 = oa_to_molc(oa_strength3_rs(4))[:3]
    patterns = [one_block_pattern((5, 5, 5), (0, 0, s)) for s in range(3)]
    triple = moqlc_from_molc(molc5, molc4, patterns=patterns)
    assert triple[0].order == 20
    assert verify_moqlc(triple)
    assert classicality_witness(triple[0]) is not None


def test_cube_lift_4x4_default_pattern():
    molc4 = oa_to_molc(oa_strength3_rs(4))[:3]
    triple = moqlc_from_molc(molc4, molc4)
    assert verify_moqlc(triple)


def test_cube_lift_pattern_shape_mismatch():
    molc4 = oa_to_molc(oa_strength3_rs(4))[:3]
    with pytest.raises(ValueError):
        moqlc_from_molc(molc4, molc4, patterns=[one_block_pattern((3, 3, 3), (0, 0, 0))] * 3)


# ---------------------------------------------------------------------------
# hole filling


def test_fill_holes_reproduces_reference_squares():
    fx = fixture("qls4_7")
    assert verify_qls(fx.filled4)
    # stored filled square carries the +/- superposition blocks
    plus = np.zeros(4)
    plus[[0, 3]] = 1 / np.sqrt(2)
    assert np.allclose(fx.filled4.cells[0, 0], plus)


def test_fill_unit_holes_with_points():
    g = embed_classical(hsols_unit_holes(5))
    point = grid_from_cells([[np.array([1.0])]])
    filled = fill_holes(g, [point] * 5)
    assert verify_qls(filled)


def test_fill_large_holes_with_fourier_squares():
    g = embed_classical(hsols_4x4())
    f = default_block_unitary(1, 4).blocks[0]
    cyclic = embed_classical(mols_prime_power(4)[0])
    fourier = type(cyclic)(
        2, 4, 4, np.einsum("xc,abc->abx", f, cyclic.cells)
    )
    filled = fill_holes(g, [fourier, cyclic, fourier, cyclic])
    assert verify_qls(filled)


def test_fill_holes_rejects_wrong_dimension():
    fx = fixture("qls4_7")
    point = grid_from_cells([[np.array([1.0])]])
    with pytest.raises(ValueError):
        fill_holes(fx.incomplete4, [point])


# ---------------------------------------------------------------------------
# self-orthogonal filling


def test_soqls_fill_reference_parameters():
    assert verify_soqls(fixture("soqls16"))


def test_soqls_fill_other_fillers_and_blocks():
    holed = embed_classical(hsols_4x4())
    for lam, blocks in ((2, default_block_unitary(4, 4)), (3, BlockUnitary(quartet16_blocks()))):
        sols = embed_classical(sols_prime_power(4, lam))
        out = soqls_fill(holed, sols, blocks)
        assert verify_soqls(out)


def test_soqls_fill_rejects_identity_blocks():
    holed = embed_classical(hsols_4x4())
    sols = embed_classical(sols_4())
    with pytest.raises(ValueError):
        soqls_fill(holed, sols, BlockUnitary((np.eye(4),) * 4))


def test_soqls_fill_rejects_scattered_holes():
    fx = fixture("qls4_7")
    with pytest.raises(ValueError):
        soqls_fill(fx.incomplete4, embed_classical(sols_4()), BlockUnitary(quartet16_blocks()))


# ---------------------------------------------------------------------------
# weighting and the piecewise product


def test_weighting_classical_parameters():
    holed = [embed_classical(h) for h in hmols_unit_holes(5)]
    out = weighting(holed, classical_pair(3))
    assert out[0].order == 15
    assert len(out[0].holes) == 5 and len(out[0].holes[0]) == 3
    assert verify_imoqls(out)


def test_weighting_transfers_non_classicality():
    holed = [embed_classical(h) for h in hmols_unit_holes(4)]
    out = weighting(holed, nonclassical_pair9())
    assert out[0].order == 36
    assert verify_imoqls(out)
    assert classicality_witness(out[0]) is not None


def test_weighting_degenerate_weight_keeps_holes():
    holed = [embed_classical(h) for h in hmols_unit_holes(4)]
    one = grid_from_cells([[np.array([1.0])]])
    out = weighting(holed, [one, one])
    assert out[0].holes == holed[0].holes
    assert np.allclose(out[0].cells, holed[0].cells)


def test_hsoqls_product_parameters():
    for q, m in ((5, 3), (4, 4)):
        holed = embed_classical(hsols_unit_holes(q))
        out = hsoqls_product(holed, classical_pair(m))
        assert out.order == q * m
        assert verify_hsoqls(out)


def test_hsoqls_product_cell_rule():
    # below the diagonal the inner factor is the conjugated transpose of
    # the second square; spot-check random addresses
    rng = np.random.default_rng(7)
    holed = embed_classical(hsols_unit_holes(5))
    pair = classical_pair(3)
    out = hsoqls_product(holed, pair)
    m = 3
    for _ in range(20):
        i, j = rng.integers(0, 5, size=2)
        l, k = rng.integers(0, m, size=2)
        if i == j:
            continue
        got = out.cells[i * m + l, j * m + k]
        if i <= j:
            want = np.kron(holed.cells[i, j], pair[0].cells[l, k])
        else:
            want = np.kron(holed.cells[i, j], np.conj(pair[1].cells[k, l]))
        assert np.allclose(got, want)


def test_hsoqls_product_trivial_weight():
    holed = embed_classical(hsols_unit_holes(4))
    one = grid_from_cells([[np.array([1.0])]])
    out = hsoqls_product(holed, [one, one])
    assert np.allclose(out.cells, holed.cells)


def test_weighting_rejects_bad_inputs():
    holed = [embed_classical(h) for h in hmols_unit_holes(4)]
    bad = [holed[0], holed[0]]
    with pytest.raises(ValueError):
        weighting(bad, classical_pair(3))


def test_constructed_outputs_conjugate_invariance():
    out = hsoqls_product(
        embed_classical(hsols_unit_holes(4)), nonclassical_pair9()[:2]
    )
    assert verify_hsoqls(out)
    assert verify_hsoqls(conjugate(out))
