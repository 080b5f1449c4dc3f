"""Quantum Latin squares and cubes with their orthogonality verifiers.

A :class:`QuantumGrid` is a d x d (or d x d x d) arrangement of unit vectors
in C^cell_dim with optional coordinate-aligned holes.  Every verifier builds
full Gram matrices and compares in entrywise max-norm; each has a
``*_violation`` variant that reports the first failed condition.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .classical import HOLE, LatinDesign
from .linalg import DEFAULT_TOL, gram_deviation, max_abs

# Dense superimposed families above this entry count are built as csr.
_SPARSE_SUPERIMPOSE_CUTOFF = 1 << 22


@dataclass(frozen=True)
class Violation:
    """First failed condition of a verification run."""

    condition: str
    where: tuple
    deviation: float

    def __str__(self):
        return f"{self.condition} at {self.where}: deviation {self.deviation:.3e}"


@dataclass(frozen=True)
class QuantumGrid:
    """Grid of unit vectors with optional holes on index-subset blocks.

    ``cells`` has shape (order,)*arity + (cell_dim,); hole cells are zero
    vectors flagged by ``hole_mask``.  Hole subsets are disjoint subsets of
    {0..order-1}; the empty cells are exactly the S_i x S_i blocks.
    """

    arity: int
    order: int
    cell_dim: int
    cells: np.ndarray
    holes: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        cells = np.ascontiguousarray(self.cells, dtype=np.complex128)
        object.__setattr__(self, "cells", cells)
        holes = tuple(tuple(sorted(int(i) for i in s)) for s in self.holes)
        object.__setattr__(self, "holes", holes)
        if self.arity not in (2, 3):
            raise ValueError("arity must be 2 or 3")
        shape = (self.order,) * self.arity + (self.cell_dim,)
        if cells.shape != shape:
            raise ValueError(f"cells shape {cells.shape}, expected {shape}")
        seen: set[int] = set()
        for s in holes:
            if seen & set(s):
                raise ValueError("hole subsets must be disjoint")
            seen |= set(s)

    @property
    def hole_mask(self) -> np.ndarray:
        mask = np.zeros((self.order,) * self.arity, dtype=bool)
        for s in self.holes:
            mask[np.ix_(*([list(s)] * self.arity))] = True
        return mask

    @property
    def hole_of_index(self) -> dict[int, int]:
        return {i: h for h, s in enumerate(self.holes) for i in s}

    def cell(self, *address) -> np.ndarray | None:
        if self.hole_mask[address]:
            return None
        return self.cells[address]

    def flat_cells(self) -> np.ndarray:
        """All cells as an (order**arity, cell_dim) matrix, holes included."""
        return self.cells.reshape(-1, self.cell_dim)

    def validate(self, tol: float = DEFAULT_TOL) -> None:
        """Check unit norms and that empty cells sit exactly on the holes."""
        mask = self.hole_mask
        norms = np.linalg.norm(self.cells, axis=-1)
        if np.any(np.abs(norms[~mask] - 1.0) > tol):
            raise ValueError("non-hole cell is not unit norm")
        if np.any(norms[mask] > tol):
            raise ValueError("hole cell carries amplitude")


def grid_from_cells(cells, holes=()) -> QuantumGrid:
    """Build a grid from nested lists whose leaves are 1-D arrays or None."""
    def depth(node):
        if node is None or isinstance(node, np.ndarray):
            return 0
        return 1 + depth(node[0])

    def find_dim(node):
        if isinstance(node, np.ndarray):
            return node.shape[0]
        if node is None:
            return None
        for item in node:
            dim = find_dim(item)
            if dim is not None:
                return dim
        return None

    arity = depth(cells)
    order = len(cells)
    dim = find_dim(cells)
    if dim is None:
        raise ValueError("grid contains no cells")
    out = np.zeros((order,) * arity + (dim,), dtype=np.complex128)
    for addr in np.ndindex(*(order,) * arity):
        node = cells
        for a in addr:
            node = node[a]
        if node is not None:
            out[addr] = np.asarray(node, dtype=np.complex128)
    return QuantumGrid(arity, order, dim, out, tuple(holes))


def embed_classical(design: LatinDesign) -> QuantumGrid:
    """Map symbol l to the computational basis vector e_l; holes preserved."""
    d = design.order
    cells = np.zeros((d,) * design.arity + (d,), dtype=np.complex128)
    idx = np.nonzero(design.cells != HOLE)
    cells[idx + (design.cells[idx],)] = 1.0
    return QuantumGrid(design.arity, d, d, cells, design.holes)


def conjugate(g: QuantumGrid) -> QuantumGrid:
    return QuantumGrid(g.arity, g.order, g.cell_dim, np.conj(g.cells), g.holes)


def transpose(g: QuantumGrid) -> QuantumGrid:
    if g.arity != 2:
        raise ValueError("transpose is defined for squares")
    return QuantumGrid(2, g.order, g.cell_dim, g.cells.transpose(1, 0, 2).copy(), g.holes)


def conj_transpose(g: QuantumGrid) -> QuantumGrid:
    return conjugate(transpose(g))


def plane(g: QuantumGrid, axis: int, index: int) -> QuantumGrid:
    """Fixed-axis plane of a cube as a square grid."""
    if g.arity != 3:
        raise ValueError("planes are defined for cubes")
    cells = np.take(g.cells, index, axis=axis)
    return QuantumGrid(2, g.order, g.cell_dim, cells)


# ---------------------------------------------------------------------------
# superimposition


def _cell_nnz(vec: np.ndarray):
    idx = np.flatnonzero(vec)
    return idx, vec[idx]


def superimpose(grids, mask=None):
    """Per-address tensor products of the grids' cells.

    Returns an (n_cells, prod_dim) matrix over the non-hole addresses in
    row-major order; csr when the dense family would be large and sparse.
    """
    g0 = grids[0]
    for g in grids[1:]:
        if g.order != g0.order or g.arity != g0.arity:
            raise ValueError("superimposed grids must share order and arity")
    if mask is None:
        mask = np.zeros((g0.order,) * g0.arity, dtype=bool)
        for g in grids:
            mask |= g.hole_mask
    addresses = [addr for addr in np.ndindex(*mask.shape) if not mask[addr]]
    prod_dim = 1
    for g in grids:
        prod_dim *= g.cell_dim
    n = len(addresses)

    if n * prod_dim > _SPARSE_SUPERIMPOSE_CUTOFF:
        rows, cols, vals = [], [], []
        for r, addr in enumerate(addresses):
            idx = np.zeros(1, dtype=np.int64)
            val = np.ones(1, dtype=np.complex128)
            for g in grids:
                ci, cv = _cell_nnz(g.cells[addr])
                idx = (idx[:, None] * g.cell_dim + ci[None, :]).ravel()
                val = (val[:, None] * cv[None, :]).ravel()
            rows.append(np.full(idx.shape, r, dtype=np.int64))
            cols.append(idx)
            vals.append(val)
        return sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, prod_dim),
        )
    out = np.zeros((n, prod_dim), dtype=np.complex128)
    for r, addr in enumerate(addresses):
        acc = grids[0].cells[addr]
        for g in grids[1:]:
            acc = np.kron(acc, g.cells[addr])
        out[r] = acc
    return out


# ---------------------------------------------------------------------------
# verifiers


def _line_views(g: QuantumGrid):
    """Yield (axis_name, fixed_indices, (d, cell_dim) line matrix)."""
    d = g.order
    if g.arity == 2:
        for i in range(d):
            yield "row", (i,), g.cells[i]
            yield "column", (i,), g.cells[:, i]
    else:
        for a in range(d):
            for b in range(d):
                yield "file-line", (a, b), g.cells[a, b]
                yield "column-line", (a, b), g.cells[a, :, b]
                yield "row-line", (a, b), g.cells[:, a, b]


def qls_violation(g: QuantumGrid, tol: float = DEFAULT_TOL) -> Violation | None:
    if g.arity != 2:
        raise ValueError("expected a square grid")
    if g.holes:
        raise ValueError("grid has holes; use the incomplete-square verifier")
    for name, fixed, line in _line_views(g):
        dev = gram_deviation(line)
        if dev > tol:
            return Violation(f"{name} basis", fixed, dev)
    return None


def verify_qls(g: QuantumGrid, tol: float = DEFAULT_TOL) -> bool:
    """Every row and column forms an orthonormal basis of C^d."""
    return qls_violation(g, tol) is None


def qlc_violation(g: QuantumGrid, tol: float = DEFAULT_TOL) -> Violation | None:
    if g.arity != 3:
        raise ValueError("expected a cube grid")
    if g.holes:
        raise ValueError("cube grids with holes are not supported")
    for name, fixed, line in _line_views(g):
        dev = gram_deviation(line)
        if dev > tol:
            return Violation(f"{name} basis", fixed, dev)
    return None


def verify_qlc(g: QuantumGrid, tol: float = DEFAULT_TOL) -> bool:
    """Every axis line of the cube forms an orthonormal basis of C^d."""
    return qlc_violation(g, tol) is None


def moqls_violation(gs, tol: float = DEFAULT_TOL) -> Violation | None:
    if len(gs) < 2:
        raise ValueError("need at least two squares")
    d = gs[0].order
    if any(g.order != d or g.arity != 2 for g in gs):
        raise ValueError("dimension mismatch between squares")
    for n, g in enumerate(gs):
        v = qls_violation(g, tol)
        if v is not None:
            return Violation(f"member {n} {v.condition}", v.where, v.deviation)
    for a, b in itertools.combinations(range(len(gs)), 2):
        dev = gram_deviation(superimpose([gs[a], gs[b]]))
        if dev > tol:
            return Violation("superimposed pair basis", (a, b), dev)
    return None


def verify_moqls(gs, tol: float = DEFAULT_TOL) -> bool:
    """Pairwise orthogonality: superimposed cells span C^d (x) C^d."""
    return moqls_violation(gs, tol) is None


def verify_soqls(g: QuantumGrid, tol: float = DEFAULT_TOL) -> bool:
    """Self-orthogonality, checked against the transpose.

    Orthogonality to the transpose and to the conjugate transpose are
    equivalent, and the transpose form needs no conjugation pass.
    """
    return soqls_violation(g, tol) is None


def soqls_violation(g: QuantumGrid, tol: float = DEFAULT_TOL) -> Violation | None:
    return moqls_violation([g, transpose(g)], tol)


def diagonal_basis_check(g: QuantumGrid, tol: float = DEFAULT_TOL) -> bool:
    """The diagonal cells of a square form an orthonormal basis."""
    if g.arity != 2 or g.holes:
        raise ValueError("expected a square grid without holes")
    diag = np.array([g.cells[i, i] for i in range(g.order)])
    return gram_deviation(diag) <= tol


def moqlc_violation(gs, tol: float = DEFAULT_TOL) -> Violation | None:
    if len(gs) < 3:
        raise ValueError("need at least three cubes")
    d = gs[0].order
    if any(g.order != d or g.arity != 3 for g in gs):
        raise ValueError("dimension mismatch between cubes")
    for n, g in enumerate(gs):
        v = qlc_violation(g, tol)
        if v is not None:
            return Violation(f"member {n} {v.condition}", v.where, v.deviation)
    for trio in itertools.combinations(range(len(gs)), 3):
        dev = gram_deviation(superimpose([gs[t] for t in trio]))
        if dev > tol:
            return Violation("superimposed triple basis", trio, dev)
    for a, b in itertools.combinations(range(len(gs)), 2):
        for axis in range(3):
            for v in range(d):
                bad = moqls_violation([plane(gs[a], axis, v), plane(gs[b], axis, v)], tol)
                if bad is not None:
                    return Violation(
                        f"plane pair {bad.condition}", (a, b, axis, v), bad.deviation
                    )
    return None


def verify_moqlc(gs, tol: float = DEFAULT_TOL) -> bool:
    """Triple superimposition bases plus pairwise orthogonal plane pairs."""
    return moqlc_violation(gs, tol) is None


# ---------------------------------------------------------------------------
# incomplete squares


def _coordinate_support_violation(vec, hole_indices):
    """Max amplitude a vector carries inside a coordinate subspace."""
    return float(np.max(np.abs(vec[list(hole_indices)])))


def iqls_violation(g: QuantumGrid, tol: float = DEFAULT_TOL) -> Violation | None:
    if g.arity != 2:
        raise ValueError("expected a square grid")
    d = g.order
    mask = g.hole_mask
    hole_of = g.hole_of_index
    for axis, take in (("row", lambda i: (g.cells[i], mask[i])),
                       ("column", lambda i: (g.cells[:, i], mask[:, i]))):
        for i in range(d):
            line, line_mask = take(i)
            filled = line[~line_mask]
            if i in hole_of:
                hole = g.holes[hole_of[i]]
                if filled.shape[0] != d - len(hole):
                    return Violation(f"{axis} cell count", (i,), float("inf"))
                leak = max(_coordinate_support_violation(v, hole) for v in filled)
                if leak > tol:
                    return Violation(f"{axis} leaks into its hole subspace", (i,), leak)
            elif filled.shape[0] != d:
                return Violation(f"{axis} cell count", (i,), float("inf"))
            dev = gram_deviation(filled)
            if dev > tol:
                return Violation(f"{axis} basis", (i,), dev)
    return None


def verify_iqls(g: QuantumGrid, tol: float = DEFAULT_TOL) -> bool:
    """Incomplete-square line conditions: full lines are bases of C^d and
    lines through hole V_i are orthonormal bases of its complement."""
    return iqls_violation(g, tol) is None


def imoqls_violation(gs, tol: float = DEFAULT_TOL) -> Violation | None:
    if len(gs) < 2:
        raise ValueError("need at least two squares")
    first = gs[0]
    for g in gs[1:]:
        if g.holes != first.holes or g.order != first.order:
            raise ValueError("hole pattern mismatch between squares")
    for n, g in enumerate(gs):
        v = iqls_violation(g, tol)
        if v is not None:
            return Violation(f"member {n} {v.condition}", v.where, v.deviation)
    d = first.order
    for a, b in itertools.combinations(range(len(gs)), 2):
        pair = [gs[a], gs[b]]
        stacked = superimpose(pair)
        # superimposed cells must avoid every V_i (x) V_i block
        for hole in first.holes:
            block = [x * d + y for x in hole for y in hole]
            sub = stacked[:, block]
            leak = max_abs(sub)
            if leak > tol:
                return Violation("superimposition touches a hole block", (a, b, hole), leak)
        dev = gram_deviation(stacked)
        if dev > tol:
            return Violation("superimposed complement basis", (a, b), dev)
    return None


def verify_imoqls(gs, tol: float = DEFAULT_TOL) -> bool:
    """Superimposed non-hole cells form an orthonormal basis of the
    complement of the direct sum of the V_i (x) V_i blocks."""
    return imoqls_violation(gs, tol) is None


def hsoqls_violation(g: QuantumGrid, tol: float = DEFAULT_TOL) -> Violation | None:
    covered = sorted(i for s in g.holes for i in s)
    if covered != list(range(g.order)):
        return Violation("holes do not partition the index set", (), float("inf"))
    return imoqls_violation([g, conj_transpose(g)], tol)


def verify_hsoqls(g: QuantumGrid, tol: float = DEFAULT_TOL) -> bool:
    """Partitioned-hole square orthogonal to its conjugate transpose."""
    return hsoqls_violation(g, tol) is None


# ---------------------------------------------------------------------------
# classicality


def classicality_witness(g: QuantumGrid, tol: float = DEFAULT_TOL):
    """First cell pair whose overlap modulus is neither 0 nor 1.

    Returns (address_a, address_b, modulus) or None when every overlap is
    consistent with a relabelled classical grid.
    """
    mask = g.hole_mask.reshape(-1)
    flat = g.flat_cells()
    addresses = list(np.ndindex(*(g.order,) * g.arity))
    live = np.flatnonzero(~mask)
    v = flat[live]
    n = len(live)
    block = max(1, min(n, (1 << 22) // max(1, n)))
    for start in range(0, n, block):
        stop = min(start + block, n)
        overlaps = np.abs(v[start:stop] @ v.conj().T)
        for r in range(stop - start):
            row_bad = (overlaps[r] > tol) & (np.abs(overlaps[r] - 1.0) > tol)
            row_bad[: start + r + 1] = False  # scan ordered pairs a < b only
            cols = np.flatnonzero(row_bad)
            if cols.size:
                c = int(cols[0])
                return (
                    addresses[live[start + r]],
                    addresses[live[c]],
                    float(overlaps[r, c]),
                )
    return None


@dataclass(frozen=True)
class TauPattern:
    """Per-block choice between identity and the lifted unitary."""

    grid: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "grid", np.asarray(self.grid, dtype=bool))

    @property
    def mixed(self) -> bool:
        return bool(self.grid.any() and not self.grid.all())

    def require_mixed(self):
        if not self.mixed:
            raise ValueError("pattern must mix identity and non-identity blocks")


def default_tau_pattern(symbols: np.ndarray) -> TauPattern:
    """Lift blocks whose classical symbol lies in the upper symbol range."""
    symbols = np.asarray(symbols)
    d = int(symbols.max()) + 1
    return TauPattern(symbols >= (d + 1) // 2)
