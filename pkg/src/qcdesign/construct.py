"""Constructions of orthogonal quantum designs.

Two families: direct products, which tensor the cells of smaller designs,
and block-unitary lifts, which embed classical grids and twist selected
blocks with a block-diagonal unitary sum_i |i><i| (x) U_i.  Hole-filling
constructions embed smaller squares into declared hole subspaces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .classical import LatinDesign, verify_classical
from .linalg import DEFAULT_TOL, dft_matrix, is_unitary, max_abs
from .qdesign import (
    QuantumGrid,
    default_tau_pattern,
    verify_hsoqls,
    verify_imoqls,
    verify_iqls,
    verify_moqlc,
    verify_moqls,
    verify_qls,
    verify_soqls,
)


@dataclass(frozen=True)
class BlockUnitary:
    """The order-(outer*inner) unitary sum_i |i><i| (x) U_i."""

    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        blocks = tuple(
            np.ascontiguousarray(b, dtype=np.complex128) for b in self.blocks
        )
        object.__setattr__(self, "blocks", blocks)
        dim = blocks[0].shape[0]
        for i, b in enumerate(blocks):
            if b.shape != (dim, dim):
                raise ValueError("blocks must share one square shape")
            if not is_unitary(b):
                raise ValueError(f"block {i} is not unitary")

    @property
    def outer_dim(self) -> int:
        return len(self.blocks)

    @property
    def inner_dim(self) -> int:
        return self.blocks[0].shape[0]

    def assemble(self) -> np.ndarray:
        """Dense block-diagonal matrix of order outer_dim * inner_dim."""
        n, d = self.outer_dim, self.inner_dim
        out = np.zeros((n * d, n * d), dtype=np.complex128)
        for i, b in enumerate(self.blocks):
            out[i * d : (i + 1) * d, i * d : (i + 1) * d] = b
        return out

    def require_non_identity(self, tol: float = DEFAULT_TOL):
        d = self.inner_dim
        for i, b in enumerate(self.blocks):
            if max_abs(b - np.eye(d)) <= tol:
                raise ValueError(f"block {i} equals the identity")


def default_block_unitary(outer_dim: int, inner_dim: int) -> BlockUnitary:
    """Fourier blocks: unitary for every inner_dim and never the identity
    for inner_dim >= 2."""
    return BlockUnitary(tuple(dft_matrix(inner_dim) for _ in range(outer_dim)))


def _check_same_family(gs, arity):
    d = gs[0].order
    if any(g.arity != arity or g.order != d for g in gs):
        raise ValueError("family members must share arity and order")
    return d


# ---------------------------------------------------------------------------
# direct products


def _product_grid(a: QuantumGrid, b: QuantumGrid) -> QuantumGrid:
    """cell((i,m),(j,n), ...) = a(i,j,...) (x) b(m,n,...)."""
    da, db = a.order, b.order
    ca, cb = a.cell_dim, b.cell_dim
    if a.arity == 2:
        prod = np.einsum("ijc,mnd->imjncd", a.cells, b.cells)
        cells = prod.reshape(da * db, da * db, ca * cb)
    else:
        prod = np.einsum("ijkc,mnpd->imjnkpcd", a.cells, b.cells)
        cells = prod.reshape(da * db, da * db, da * db, ca * cb)
    return QuantumGrid(a.arity, da * db, ca * cb, cells)


def moqls_direct_product(gs_a, gs_b, tol: float = DEFAULT_TOL) -> list[QuantumGrid]:
    """Tensor two orthogonal families square-by-square."""
    if len(gs_a) != len(gs_b):
        raise ValueError("need the same number of squares on both sides")
    _check_same_family(gs_a, 2)
    _check_same_family(gs_b, 2)
    for gs in (gs_a, gs_b):
        if not verify_moqls(gs, tol):
            raise ValueError("input family is not mutually orthogonal")
    return [_product_grid(a, b) for a, b in zip(gs_a, gs_b)]


def moqlc_direct_product(gs_a, gs_b, tol: float = DEFAULT_TOL) -> list[QuantumGrid]:
    """Tensor two orthogonal cube triples cube-by-cube."""
    if len(gs_a) != len(gs_b):
        raise ValueError("need the same number of cubes on both sides")
    _check_same_family(gs_a, 3)
    _check_same_family(gs_b, 3)
    for gs in (gs_a, gs_b):
        if not verify_moqlc(gs, tol):
            raise ValueError("input family is not mutually orthogonal")
    return [_product_grid(a, b) for a, b in zip(gs_a, gs_b)]


# ---------------------------------------------------------------------------
# block-unitary lifts of classical designs


def _lifted_block(symbol: int, inner_grid: LatinDesign, matrix, outer_dim: int):
    """Cells of one block: |symbol> (x) M |inner cell>, flattened."""
    d2 = inner_grid.order
    shape = inner_grid.cells.shape
    out = np.zeros(shape + (outer_dim * d2,), dtype=np.complex128)
    base = symbol * d2
    if matrix is None:
        for addr in np.ndindex(*shape):
            out[addr + (base + int(inner_grid.cells[addr]),)] = 1.0
    else:
        for addr in np.ndindex(*shape):
            out[addr][base : base + d2] = matrix[:, int(inner_grid.cells[addr])]
    return out


def moqls_from_mols(
    mols_a,
    mols_b,
    block_unitary: BlockUnitary | None = None,
    patterns=None,
) -> list[QuantumGrid]:
    """Lift two classical square pairs to an orthogonal quantum pair.

    Square s has block (i,j) equal to |l> (x) tau K_s with l = L_s(i,j),
    where tau applies block U_l exactly on the patterned positions.
    """
    if len(mols_a) != len(mols_b):
        raise ValueError("need matching counts of outer and inner squares")
    if not verify_classical(mols_a, "mols-pairwise"):
        raise ValueError("outer squares are not mutually orthogonal")
    if not verify_classical(mols_b, "mols-pairwise"):
        raise ValueError("inner squares are not mutually orthogonal")
    d1, d2 = mols_a[0].order, mols_b[0].order
    if block_unitary is None:
        block_unitary = default_block_unitary(d1, d2)
    if block_unitary.outer_dim != d1 or block_unitary.inner_dim != d2:
        raise ValueError("block unitary shape does not match the squares")
    if patterns is None:
        patterns = [default_tau_pattern(l.cells) for l in mols_a]
    if len(patterns) != len(mols_a):
        raise ValueError("need one pattern per square")
    out = []
    for outer, inner, pattern in zip(mols_a, mols_b, patterns):
        if pattern.grid.shape != (d1, d1):
            raise ValueError("pattern shape mismatch")
        cells = np.zeros((d1 * d2, d1 * d2, d1 * d2), dtype=np.complex128)
        view = cells.reshape(d1, d2, d1, d2, d1 * d2)
        for i in range(d1):
            for j in range(d1):
                sym = int(outer.cells[i, j])
                mat = block_unitary.blocks[sym] if pattern.grid[i, j] else None
                view[i, :, j, :, :] = _lifted_block(sym, inner, mat, d1)
        out.append(QuantumGrid(2, d1 * d2, d1 * d2, cells))
    return out


def moqlc_from_molc(
    molc_a,
    molc_b,
    block_unitary: BlockUnitary | None = None,
    patterns=None,
) -> list[QuantumGrid]:
    """Cube analog of the block-unitary lift, pattern per outer address."""
    if len(molc_a) != len(molc_b):
        raise ValueError("need matching counts of outer and inner cubes")
    for cubes in (molc_a, molc_b):
        if not verify_classical(cubes, "molc-with-B"):
            raise ValueError("input cubes fail orthogonality with planes")
    d1, d2 = molc_a[0].order, molc_b[0].order
    if block_unitary is None:
        block_unitary = default_block_unitary(d1, d2)
    if block_unitary.outer_dim != d1 or block_unitary.inner_dim != d2:
        raise ValueError("block unitary shape does not match the cubes")
    if patterns is None:
        patterns = [default_tau_pattern(c.cells) for c in molc_a]
    if len(patterns) != len(molc_a):
        raise ValueError("need one pattern per cube")
    out = []
    for outer, inner, pattern in zip(molc_a, molc_b, patterns):
        if pattern.grid.shape != (d1, d1, d1):
            raise ValueError("pattern shape mismatch")
        d = d1 * d2
        cells = np.zeros((d, d, d, d), dtype=np.complex128)
        view = cells.reshape(d1, d2, d1, d2, d1, d2, d)
        for i in range(d1):
            for j in range(d1):
                for k in range(d1):
                    sym = int(outer.cells[i, j, k])
                    mat = block_unitary.blocks[sym] if pattern.grid[i, j, k] else None
                    view[i, :, j, :, k, :, :] = _lifted_block(sym, inner, mat, d1)
        out.append(QuantumGrid(3, d, d, cells))
    return out


# ---------------------------------------------------------------------------
# hole filling


def _embed_filler(target: np.ndarray, hole: tuple[int, ...], filler: QuantumGrid):
    """Write a small square into span{e_l : l in hole} at hole x hole."""
    lift = np.zeros((len(hole), target.shape[-1]), dtype=np.complex128)
    for c, l in enumerate(hole):
        lift[c, l] = 1.0
    for a, ra in enumerate(hole):
        for b, cb in enumerate(hole):
            target[ra, cb] = filler.cells[a, b] @ lift


def fill_holes(g: QuantumGrid, fillers, tol: float = DEFAULT_TOL) -> QuantumGrid:
    """Fill every hole V_i of an incomplete square with a matching QLS."""
    if not verify_iqls(g, tol):
        raise ValueError("input is not a valid incomplete square")
    if len(fillers) != len(g.holes):
        raise ValueError(f"need {len(g.holes)} fillers, got {len(fillers)}")
    cells = g.cells.copy()
    for hole, filler in zip(g.holes, fillers):
        if filler.order != len(hole) or filler.cell_dim != len(hole) or filler.holes:
            raise ValueError(f"filler does not match hole of size {len(hole)}")
        if not verify_qls(filler, tol):
            raise ValueError("filler is not a quantum Latin square")
        _embed_filler(cells, hole, filler)
    return QuantumGrid(2, g.order, g.cell_dim, cells)


def soqls_fill(
    holed: QuantumGrid,
    sols: QuantumGrid,
    block_unitary: BlockUnitary,
    tol: float = DEFAULT_TOL,
) -> QuantumGrid:
    """Fill the diagonal holes of a partitioned self-orthogonal square with
    unitary-twisted copies of one self-orthogonal square.

    Hole i must span indices {i*d1, ..., (i+1)*d1 - 1}; it receives the
    cells |i> (x) U_i |phi_ab| with U_i never the identity.
    """
    d1 = sols.order
    n = len(holed.holes)
    expected = tuple(tuple(range(i * d1, (i + 1) * d1)) for i in range(n))
    if holed.holes != expected:
        raise ValueError("holes must be contiguous blocks along the diagonal")
    if not verify_hsoqls(holed, tol):
        raise ValueError("input square is not self-orthogonal off its holes")
    if sols.holes or not verify_soqls(sols, tol):
        raise ValueError("filler square is not self-orthogonal")
    if block_unitary.outer_dim != n or block_unitary.inner_dim != d1:
        raise ValueError("block unitary shape does not match the holes")
    block_unitary.require_non_identity(tol)
    cells = holed.cells.copy()
    for i, hole in enumerate(holed.holes):
        u = block_unitary.blocks[i]
        twisted = QuantumGrid(2, d1, d1, np.einsum("xc,abc->abx", u, sols.cells))
        _embed_filler(cells, hole, twisted)
    return QuantumGrid(2, holed.order, holed.cell_dim, cells)


# ---------------------------------------------------------------------------
# weighting and the self-orthogonal product


def _scaled_holes(holes, m: int) -> tuple[tuple[int, ...], ...]:
    return tuple(
        tuple(a * m + l for a in s for l in range(m)) for s in holes
    )


def weighting(holed_pair, moqls_pair, tol: float = DEFAULT_TOL) -> list[QuantumGrid]:
    """Blow up each index of a holed orthogonal pair by an orthogonal pair.

    Output cell ((i,l),(j,k)) of member s is holed_s(i,j) (x) full_s(l,k);
    holes become V_i (x) C^m.
    """
    if len(holed_pair) != 2 or len(moqls_pair) != 2:
        raise ValueError("both inputs must be pairs")
    if not verify_imoqls(holed_pair, tol):
        raise ValueError("holed pair is not orthogonal off its holes")
    if not verify_moqls(moqls_pair, tol):
        raise ValueError("weight pair is not orthogonal")
    m = moqls_pair[0].order
    out = []
    for holed, full in zip(holed_pair, moqls_pair):
        prod = _product_grid(holed, full)
        out.append(
            QuantumGrid(
                2,
                prod.order,
                prod.cell_dim,
                prod.cells,
                _scaled_holes(holed.holes, m),
            )
        )
    return out


def hsoqls_product(
    holed: QuantumGrid, moqls_pair, tol: float = DEFAULT_TOL
) -> QuantumGrid:
    """Blow up a partitioned self-orthogonal square by an orthogonal pair.

    Cells above the diagonal tensor with the first square, cells below with
    the transposed conjugate of the second; that split is what keeps the
    output orthogonal to its own conjugate transpose.
    """
    if len(moqls_pair) != 2:
        raise ValueError("need a pair of orthogonal squares")
    if not verify_hsoqls(holed, tol):
        raise ValueError("input square is not self-orthogonal off its holes")
    if not verify_moqls(moqls_pair, tol):
        raise ValueError("weight pair is not orthogonal")
    first, second = moqls_pair
    m = first.order
    d = holed.order * m
    cell_dim = holed.cell_dim * first.cell_dim
    cells = np.zeros((d, d, cell_dim), dtype=np.complex128)
    view = cells.reshape(holed.order, m, holed.order, m, cell_dim)
    mask = holed.hole_mask
    second_ct = np.conj(second.cells).transpose(1, 0, 2)
    for i in range(holed.order):
        for j in range(holed.order):
            if mask[i, j]:
                continue
            inner = first.cells if i <= j else second_ct
            view[i, :, j, :, :] = np.einsum(
                "c,lkd->lkcd", holed.cells[i, j], inner
            ).reshape(m, m, cell_dim)
    return QuantumGrid(2, d, cell_dim, cells, _scaled_holes(holed.holes, m))
