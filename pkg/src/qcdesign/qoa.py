"""Quantum orthogonal arrays, generalized grids, and k-uniform states.

QOA rows are kept in one sparse (r, d^N) matrix, so arrays whose rows touch
few amplitudes (all the address-block families here) stay small even when
d^N runs to millions.  Every partial-trace condition reduces to "some
stacked reshape of the cells times its conjugate transpose is the
identity", which one sparse Gram kernel evaluates.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .linalg import (
    DEFAULT_TOL,
    PartySplit,
    identity_deviation,
    reduction_deviation,
)
from .qdesign import Violation, superimpose, verify_moqlc, verify_moqls


def _as_sparse_rows(rows, dim: int) -> sp.csr_matrix:
    if sp.issparse(rows):
        mat = rows.tocsr()
    else:
        mat = sp.csr_matrix(np.atleast_2d(np.asarray(rows, dtype=np.complex128)))
    if mat.shape[1] != dim:
        raise ValueError(f"rows have dimension {mat.shape[1]}, expected {dim}")
    return mat


@dataclass(frozen=True)
class QuantumOrthogonalArray:
    """r multipartite pure states subject to summed partial-trace conditions."""

    parties: int
    local_dim: int
    strength: int
    rows: sp.csr_matrix

    def __post_init__(self):
        object.__setattr__(
            self, "rows", _as_sparse_rows(self.rows, self.local_dim**self.parties)
        )
        if self.rows.shape[0] < 1:
            raise ValueError("need at least one row")

    @property
    def size(self) -> int:
        return self.rows.shape[0]

    def row_dense(self, i: int) -> np.ndarray:
        return np.asarray(self.rows[i].todense()).ravel()

    def row_norms(self) -> np.ndarray:
        return np.sqrt(np.asarray(self.rows.multiply(self.rows.conj()).sum(axis=1)).real).ravel()

    def validate(self, tol: float = DEFAULT_TOL) -> None:
        if np.max(np.abs(self.row_norms() - 1.0)) > tol:
            raise ValueError("a row is not unit norm")

    def row_sum(self):
        """Unnormalized sum of the rows, sparse when the rows are sparse."""
        total = sp.csr_matrix(self.rows.sum(axis=0))
        if total.nnz * 4 > total.shape[1]:
            return np.asarray(total.todense()).ravel()
        return total


@dataclass(frozen=True)
class PureState:
    """Unit amplitude vector over N parties of equal local dimension."""

    parties: int
    local_dim: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        object.__setattr__(self, "amplitudes", amps)
        if amps.shape != (self.local_dim**self.parties,):
            raise ValueError("amplitude count does not match the party structure")

    def validate(self, tol: float = DEFAULT_TOL) -> None:
        if abs(np.linalg.norm(self.amplitudes) - 1.0) > tol:
            raise ValueError("state is not unit norm")


@dataclass(frozen=True)
class GeneralizedGrid:
    """A square or cube of possibly entangled multi-party cells.

    Cells live in C^(d^parties) and are stored row-major (address (i,j)
    or (i,j,k)) in one sparse matrix.
    """

    arity: int
    order: int
    parties: int
    cells: sp.csr_matrix

    def __post_init__(self):
        dim = self.local_cell_dim
        object.__setattr__(self, "cells", _as_sparse_rows(self.cells, dim))
        if self.cells.shape[0] != self.order**self.arity:
            raise ValueError("cell count does not match order and arity")
        if self.arity not in (2, 3):
            raise ValueError("arity must be 2 or 3")

    @property
    def local_cell_dim(self) -> int:
        return self.order**self.parties

    def cell_dense(self, *address) -> np.ndarray:
        flat = 0
        for a in address:
            flat = flat * self.order + a
        return np.asarray(self.cells[flat].todense()).ravel()


def grids_to_generalized(gs) -> GeneralizedGrid:
    """View a t-member orthogonal family as a grid of t-party product cells."""
    g0 = gs[0]
    if any(g.cell_dim != g0.order for g in gs):
        raise ValueError("expected plain quantum grids with cell_dim == order")
    stacked = superimpose(gs, mask=np.zeros((g0.order,) * g0.arity, dtype=bool))
    return GeneralizedGrid(g0.arity, g0.order, len(gs), sp.csr_matrix(stacked))


# ---------------------------------------------------------------------------
# the stacked Gram kernel


def _stacked_gram_deviation(cells: sp.csr_matrix, d: int, t: int, kept, row_of, col_of) -> float:
    """Deviation from I of sum-of-partial-trace block matrices.

    Each cell c (a row of ``cells``) contributes its reshaped amplitudes
    A_c (kept parties x traced parties) as block (row_of[c], col_of[c]) of a
    matrix D; then D D† stacks exactly the sums
    sum_c Tr_traced |cell_c><cell_c'| demanded by the grid conditions, and
    the condition holds iff D D† = I.
    """
    split = PartySplit(t, d, tuple(kept))
    coo = cells.tocoo()
    kept_idx, traced_idx = split.split_indices(coo.col.astype(np.int64))
    row_of = np.asarray(row_of, dtype=np.int64)
    col_of = np.asarray(col_of, dtype=np.int64)
    rows = row_of[coo.row] * split.kept_dim + kept_idx
    cols = col_of[coo.row] * split.traced_dim + traced_idx
    n_rows = (int(row_of.max()) + 1) * split.kept_dim
    n_cols = (int(col_of.max()) + 1) * split.traced_dim
    d_mat = sp.csr_matrix((coo.data, (rows, cols)), shape=(n_rows, n_cols))
    return identity_deviation((d_mat @ d_mat.conj().T).tocsr())


def gmoqls_violation(g: GeneralizedGrid, tol: float = DEFAULT_TOL) -> Violation | None:
    """Check the three generalized-square conditions for a square grid."""
    if g.arity != 2:
        raise ValueError("expected a square grid")
    if g.parties < 2:
        raise ValueError("cells must span at least two parties")
    d, t = g.order, g.parties
    idx = np.arange(d * d)
    i_of, j_of = idx // d, idx % d
    zeros = np.zeros(d * d, dtype=np.int64)

    dev = _stacked_gram_deviation(g.cells, d, t, (), idx, zeros)
    if dev > tol:
        return Violation("cells are not pairwise orthonormal", (), dev)
    for p in range(t):
        dev = _stacked_gram_deviation(g.cells, d, t, (p,), j_of, i_of)
        if dev > tol:
            return Violation("column partial-trace sums", (p,), dev)
        dev = _stacked_gram_deviation(g.cells, d, t, (p,), i_of, j_of)
        if dev > tol:
            return Violation("row partial-trace sums", (p,), dev)
    for pair in itertools.combinations(range(t), 2):
        dev = _stacked_gram_deviation(g.cells, d, t, pair, zeros, idx)
        if dev > tol:
            return Violation("two-party reduction sums", pair, dev)
    return None


def verify_gmoqls(g: GeneralizedGrid, tol: float = DEFAULT_TOL) -> bool:
    return gmoqls_violation(g, tol) is None


def gmoqlc_violation(g: GeneralizedGrid, tol: float = DEFAULT_TOL) -> Violation | None:
    """Check the eight generalized-cube conditions for a cube grid."""
    if g.arity != 3:
        raise ValueError("expected a cube grid")
    if g.parties < 3:
        raise ValueError("cells must span at least three parties")
    d, t = g.order, g.parties
    idx = np.arange(d**3)
    i_of = idx // (d * d)
    j_of = (idx // d) % d
    k_of = idx % d
    zeros = np.zeros(d**3, dtype=np.int64)

    dev = _stacked_gram_deviation(g.cells, d, t, (), idx, zeros)
    if dev > tol:
        return Violation("cells are not pairwise orthonormal", (), dev)
    single_sums = (
        ("file-axis single sums", j_of * d + k_of, i_of),
        ("column-axis single sums", i_of * d + k_of, j_of),
        ("row-axis single sums", i_of * d + j_of, k_of),
    )
    for name, row_of, col_of in single_sums:
        for p in range(t):
            dev = _stacked_gram_deviation(g.cells, d, t, (p,), row_of, col_of)
            if dev > tol:
                return Violation(name, (p,), dev)
    double_sums = (
        ("file-pair reduction sums", k_of, i_of * d + j_of),
        ("column-pair reduction sums", i_of, j_of * d + k_of),
        ("row-pair reduction sums", j_of, i_of * d + k_of),
    )
    for name, row_of, col_of in double_sums:
        for pair in itertools.combinations(range(t), 2):
            dev = _stacked_gram_deviation(g.cells, d, t, pair, row_of, col_of)
            if dev > tol:
                return Violation(name, pair, dev)
    for trio in itertools.combinations(range(t), 3):
        dev = _stacked_gram_deviation(g.cells, d, t, trio, zeros, idx)
        if dev > tol:
            return Violation("three-party reduction sums", trio, dev)
    return None


def verify_gmoqlc(g: GeneralizedGrid, tol: float = DEFAULT_TOL) -> bool:
    return gmoqlc_violation(g, tol) is None


# ---------------------------------------------------------------------------
# quantum orthogonal arrays


def _subset_deviations(vec, parties, local_dim, k, scale, threads=1):
    subsets = list(itertools.combinations(range(parties), k))

    def dev(keep):
        split = PartySplit(parties, local_dim, keep)
        return keep, reduction_deviation(vec, vec, split, scale)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(dev, subsets))
    else:
        results = [dev(s) for s in subsets]
    return results


def qoa_violation(
    q: QuantumOrthogonalArray, tol: float = DEFAULT_TOL, threads: int = 1
) -> Violation | None:
    """For every k-subset, the double sum of cross partial traces must be
    (r/d^k) I; by bilinearity that is one reduction of the summed rows."""
    q.validate(tol)
    scale = q.size / q.local_dim**q.strength
    total = q.row_sum()
    for keep, dev in _subset_deviations(
        total, q.parties, q.local_dim, q.strength, scale, threads
    ):
        if dev > tol:
            return Violation("summed reduction not maximally mixed", keep, dev)
    return None


def verify_qoa(
    q: QuantumOrthogonalArray, tol: float = DEFAULT_TOL, threads: int = 1
) -> bool:
    return qoa_violation(q, tol, threads) is None


def state_from_qoa(q: QuantumOrthogonalArray, tol: float = DEFAULT_TOL) -> PureState:
    """Normalized sum of the rows; demands ||sum|| = sqrt(r) so that the
    normalization is the one mutually orthogonal rows would give."""
    total = q.row_sum()
    if sp.issparse(total):
        total = np.asarray(total.todense()).ravel()
    norm = np.linalg.norm(total)
    if abs(norm - np.sqrt(q.size)) > tol * max(1.0, np.sqrt(q.size)):
        raise ValueError(
            f"row sum has norm {norm:.6f}, expected sqrt({q.size}); "
            "rows are not mutually orthogonal"
        )
    return PureState(q.parties, q.local_dim, total / norm)


def k_uniform_violation(
    state: PureState, k: int, tol: float = DEFAULT_TOL, threads: int = 1
) -> Violation | None:
    if not 1 <= k <= state.parties // 2:
        raise ValueError(f"k must lie in 1..{state.parties // 2}")
    scale = 1.0 / state.local_dim**k
    for keep, dev in _subset_deviations(
        state.amplitudes, state.parties, state.local_dim, k, scale, threads
    ):
        if dev > tol:
            return Violation("reduction not maximally mixed", keep, dev)
    return None


def verify_k_uniform(
    state: PureState, k: int, tol: float = DEFAULT_TOL, threads: int = 1
) -> bool:
    """Every k-party reduction of the state equals I / d^k."""
    return k_uniform_violation(state, k, tol, threads) is None


# ---------------------------------------------------------------------------
# conversions


def _rows_from_generalized(g: GeneralizedGrid) -> sp.csr_matrix:
    """Rows |address> (x) cell, one per cell, in address order."""
    coo = g.cells.tocoo()
    block = g.local_cell_dim
    cols = coo.row.astype(np.int64) * block + coo.col
    rows = coo.row
    dim = g.order**g.arity * block
    return sp.csr_matrix((coo.data, (rows, cols)), shape=(g.cells.shape[0], dim))


def gmoqls_to_qoa(g: GeneralizedGrid, tol: float = DEFAULT_TOL) -> QuantumOrthogonalArray:
    """Prefix each cell with its own address registers."""
    bad = gmoqls_violation(g, tol)
    if bad is not None:
        raise ValueError(f"input grid fails verification: {bad}")
    return QuantumOrthogonalArray(g.parties + 2, g.order, 2, _rows_from_generalized(g))


def gmoqlc_to_qoa(g: GeneralizedGrid, tol: float = DEFAULT_TOL) -> QuantumOrthogonalArray:
    bad = gmoqlc_violation(g, tol)
    if bad is not None:
        raise ValueError(f"input grid fails verification: {bad}")
    return QuantumOrthogonalArray(g.parties + 3, g.order, 3, _rows_from_generalized(g))


def _qoa_to_grid(q: QuantumOrthogonalArray, arity: int, tol: float) -> GeneralizedGrid:
    d = q.local_dim
    if q.size != d**arity:
        raise ValueError(f"need exactly d^{arity} rows, got {q.size}")
    t = q.parties - arity
    if t < arity:
        raise ValueError("not enough non-address parties")
    block = d**t
    cells = sp.lil_matrix((d**arity, block), dtype=np.complex128)
    seen = np.zeros(d**arity, dtype=bool)
    rows = q.rows.tocsr()
    for r in range(q.size):
        start, stop = rows.indptr[r], rows.indptr[r + 1]
        idx = rows.indices[start:stop]
        data = rows.data[start:stop]
        if idx.size == 0:
            raise ValueError(f"row {r} is empty")
        blocks = idx // block
        mass = np.abs(data) ** 2
        best = blocks[np.argmax(mass)]
        leak = np.sqrt(mass[blocks != best].sum())
        if leak > tol:
            raise ValueError(
                f"row {r} has amplitude mass {leak:.3e} outside one address block"
            )
        if seen[best]:
            raise ValueError(f"rows {r} and earlier share address block {best}")
        seen[best] = True
        inside = blocks == best
        cells[best, idx[inside] - best * block] = data[inside]
    if not seen.all():
        raise ValueError("addresses do not cover the whole grid")
    return GeneralizedGrid(arity, d, t, cells.tocsr())


def qoa_to_gmoqls(q: QuantumOrthogonalArray, tol: float = DEFAULT_TOL) -> GeneralizedGrid:
    """Split rows |i j> (x) |cell> of a d^2-row array into a square grid.

    Each row must be supported on a single (i, j) address block, detected
    numerically from the amplitude mass.
    """
    return _qoa_to_grid(q, 2, tol)


def qoa_to_gmoqlc(q: QuantumOrthogonalArray, tol: float = DEFAULT_TOL) -> GeneralizedGrid:
    """Cube analog of the address-block split, three address registers."""
    return _qoa_to_grid(q, 3, tol)


def moqls_to_qoa(gs, tol: float = DEFAULT_TOL) -> QuantumOrthogonalArray:
    """Rows |i j> (x) cell_1(i,j) (x) ... (x) cell_t(i,j)."""
    if not verify_moqls(gs, tol):
        raise ValueError("input squares are not mutually orthogonal")
    return QuantumOrthogonalArray(
        len(gs) + 2, gs[0].order, 2, _rows_from_generalized(grids_to_generalized(gs))
    )


def moqlc_to_qoa(gs, tol: float = DEFAULT_TOL) -> QuantumOrthogonalArray:
    """Rows |i j k> (x) cell_1(i,j,k) (x) ... (x) cell_t(i,j,k)."""
    if not verify_moqlc(gs, tol):
        raise ValueError("input cubes are not mutually orthogonal")
    return QuantumOrthogonalArray(
        len(gs) + 3, gs[0].order, 3, _rows_from_generalized(grids_to_generalized(gs))
    )
