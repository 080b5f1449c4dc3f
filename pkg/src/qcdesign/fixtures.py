"""Catalog of explicit reference designs, each verified before it is served.

Entries marked with normalization notes store repaired matrices: the raw
tabulated entries were not unitary (a missing 1/sqrt(3) column scale and a
truncated corner entry), and the constructions require exact unitarity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, NamedTuple

import numpy as np
import scipy.sparse as sp

from .classical import HOLE, LatinDesign, cube, gf_make, square
from .construct import BlockUnitary, hsoqls_product, moqlc_from_molc, moqls_from_mols, soqls_fill
from .linalg import DEFAULT_TOL
from .qdesign import (
    QuantumGrid,
    TauPattern,
    embed_classical,
    grid_from_cells,
    verify_hsoqls,
    verify_iqls,
    verify_moqlc,
    verify_moqls,
    verify_qls,
    verify_soqls,
)
from .qoa import QuantumOrthogonalArray, verify_qoa

_I3 = 1j
_W3 = np.exp(2j * np.pi / 3)


def _basis(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return v


def _superposition(dim: int, terms) -> np.ndarray:
    v = np.zeros(dim, dtype=np.complex128)
    for index, amp in terms:
        v[index] = amp
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# order-14 self-orthogonal square

_SOQLS14_SYMBOLS = [
    [0, 6, 13, 7, 12, 3, 8, 10, 9, 11, 5, 4, 2, 1],
    [10, 1, 7, 12, 5, 11, 2, 4, 13, 3, 9, 6, 8, 0],
    [8, 11, 2, 9, 7, 13, 10, 6, 12, 1, 4, 5, 0, 3],
    [13, 7, 10, 3, 6, 4, 9, 1, 11, 12, 8, 0, 5, 2],
    [9, 12, 0, 11, 4, 6, 3, 2, 10, 13, 7, 8, 1, 5],
    [6, 8, 1, 10, 13, 5, 12, 11, 7, 2, 0, 3, 9, 4],
    [12, 9, 8, 13, 11, 0, 6, 5, 3, 10, 2, 1, 4, 7],
    [5, 13, 12, 8, 10, 2, 11, 7, 4, 0, 1, 9, 3, 6],
    [11, 5, 3, 0, 1, 10, 13, 12, 8, 4, 6, 2, 7, 9],
    [4, 10, 11, 1, 2, 12, 0, 13, 5, 9, 3, 7, 6, 8],
    [7, 0, 6, 2, 9, 8, 4, 3, 1, 5, -1, -2, -3, -4],
    [1, 2, 9, 4, 3, 7, 5, 8, 0, 6, -4, -3, -2, -1],
    [3, 4, 5, 6, 0, 1, 7, 9, 2, 8, -2, -1, -4, -3],
    [2, 3, 4, 5, 8, 9, 1, 0, 6, 7, -3, -4, -1, -2],
]

# sign patterns of the four equal-weight vectors over |10>..|13>
_SOQLS14_SIGNS = {
    -1: (1, 1, 1, 1),
    -2: (1, -1, 1, -1),
    -3: (1, 1, -1, -1),
    -4: (1, -1, -1, 1),
}


def _build_soqls14() -> QuantumGrid:
    cells = np.zeros((14, 14, 14), dtype=np.complex128)
    for i, row in enumerate(_SOQLS14_SYMBOLS):
        for j, sym in enumerate(row):
            if sym >= 0:
                cells[i, j, sym] = 1.0
            else:
                cells[i, j, 10:14] = np.array(_SOQLS14_SIGNS[sym]) / 2.0
    return QuantumGrid(2, 14, 14, cells)


# ---------------------------------------------------------------------------
# order-12 orthogonal pair from lifted order-4/order-3 squares

_L1 = [[0, 1, 2, 3], [3, 2, 1, 0], [1, 0, 3, 2], [2, 3, 0, 1]]
_L2 = [[0, 1, 2, 3], [2, 3, 0, 1], [3, 2, 1, 0], [1, 0, 3, 2]]
_K1 = [[(i + j) % 3 for j in range(3)] for i in range(3)]
_K2 = [[(2 * i + j) % 3 for j in range(3)] for i in range(3)]


def moqls12_blocks() -> tuple[np.ndarray, ...]:
    """The four order-3 unitaries of the lifted order-12 pair.

    Block 0 is stored with a 1/sqrt(3) prefactor and block 2 with
    bottom-right entry 1; both are the minimal column normalizations that
    make the tabulated entries unitary.
    """
    s2, s3 = np.sqrt(2), np.sqrt(3)
    u0 = np.array([[1, 1, 1], [1, _W3, np.conj(_W3)], [1, np.conj(_W3), _W3]]) / s3
    u1 = (
        np.array(
            [
                [1 + _I3, (1 - _I3) / s2, 0],
                [-_I3 / s2, 1, 1 / s2 + _I3],
                [1 / s2, _I3, 1 - _I3 / s2],
            ]
        )
        / s3
    )
    u2 = np.array([[1 / s2, 1 / s2, 0], [1 / s2, -1 / s2, 0], [0, 0, 1]])
    u3 = np.array([[2, 2, 1], [1, -2, 2], [-2, 1, 2]]) / 3
    return u0, u1, u2, u3


def moqls12_patterns() -> tuple[TauPattern, TauPattern]:
    """Which order-4 blocks carry the lifting unitary in each square."""
    first = np.zeros((4, 4), dtype=bool)
    second = np.zeros((4, 4), dtype=bool)
    for addr in [(2, 1), (3, 0), (3, 3)]:
        first[addr] = True
    for addr in [(0, 1), (2, 1), (2, 3)]:
        second[addr] = True
    return TauPattern(first), TauPattern(second)


def _build_moqls12() -> tuple[QuantumGrid, QuantumGrid]:
    phi, psi = moqls_from_mols(
        [square(_L1), square(_L2)],
        [square(_K1), square(_K2)],
        BlockUnitary(moqls12_blocks()),
        moqls12_patterns(),
    )
    return phi, psi


# ---------------------------------------------------------------------------
# order-4 and order-7 squares built by filling holes

_IQLS4_SYMBOLS = [
    [-1, 1, 2, -1],
    [1, 0, 3, 2],
    [2, 3, 0, 1],
    [-1, 2, 1, -1],
]

_PIQLS7_SYMBOLS = [
    [-1, 3, 4, 5, 6, 1, 2],
    [2, -1, 5, 6, 0, 4, 3],
    [1, 6, -1, 0, 5, 3, 4],
    [6, 5, 1, -1, -1, 2, 0],
    [5, 2, 6, -1, -1, 0, 1],
    [3, 4, 0, 1, 2, -1, -1],
    [4, 0, 3, 2, 1, -1, -1],
]


class FilledSquareExample(NamedTuple):
    """Two incomplete squares and the squares obtained by filling them."""

    incomplete4: QuantumGrid
    filled4: QuantumGrid
    incomplete7: QuantumGrid
    filled7: QuantumGrid


def _pair_filler() -> QuantumGrid:
    plus = _superposition(2, [(0, 1), (1, 1)])
    minus = _superposition(2, [(0, 1), (1, -1)])
    return grid_from_cells([[plus, minus], [minus, plus]])


def _build_qls4_7() -> FilledSquareExample:
    from .construct import fill_holes

    iqls4 = embed_classical(
        LatinDesign(2, 4, np.array(_IQLS4_SYMBOLS), ((0, 3),))
    )
    filled4 = fill_holes(iqls4, [_pair_filler()])
    point = grid_from_cells([[np.array([1.0])]])
    piqls7 = embed_classical(
        LatinDesign(
            2, 7, np.array(_PIQLS7_SYMBOLS), ((0,), (1,), (2,), (3, 4), (5, 6))
        )
    )
    filled7 = fill_holes(
        piqls7, [point, point, point, _pair_filler(), _pair_filler()]
    )
    return FilledSquareExample(iqls4, filled4, piqls7, filled7)


# ---------------------------------------------------------------------------
# order-16 self-orthogonal square from filling an order-4^4 holed square

# outer block offsets: the same unit-hole self-orthogonal pattern as below
_HSOLS_BLOCK_OFFSETS = [[-1, 3, 1, 2], [2, -1, 3, 0], [3, 0, -1, 1], [1, 2, 0, -1]]

_SOLS_4_SYMBOLS = [[0, 1, 2, 3], [3, 2, 1, 0], [1, 0, 3, 2], [2, 3, 0, 1]]


def hsols_4x4() -> LatinDesign:
    """Order-16 self-orthogonal square with four order-4 diagonal holes.

    Every off-hole block carries the order-4 self-orthogonal square shifted
    into the block's symbol range.  The raw tabulated grid patterned the
    blocks above the diagonal by a different square, which breaks
    self-orthogonality; the uniform product pattern stored here is the
    consistent reading.
    """
    cells = np.full((16, 16), HOLE, dtype=np.int64)
    for bi in range(4):
        for bj in range(4):
            offset = _HSOLS_BLOCK_OFFSETS[bi][bj]
            if offset == HOLE:
                continue
            for a in range(4):
                for b in range(4):
                    cells[4 * bi + a, 4 * bj + b] = 4 * offset + _SOLS_4_SYMBOLS[a][b]
    holes = tuple(tuple(range(4 * i, 4 * i + 4)) for i in range(4))
    return LatinDesign(2, 16, cells, holes)


def sols_4() -> LatinDesign:
    return square(_SOLS_4_SYMBOLS)


def quartet16_blocks() -> tuple[np.ndarray, ...]:
    """The four order-4 unitaries shared by the order-16 constructions."""
    s2, s3, s6 = np.sqrt(2), np.sqrt(3), np.sqrt(6)
    u0 = np.array(
        [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]]
    ) / 2
    u1 = np.array(
        [
            [1, -_I3 * s3, -_I3 * s3, -3],
            [s3, _I3, -3 * _I3, s3],
            [s3, -3 * _I3, _I3, s3],
            [3, _I3 * s3, _I3 * s3, -1],
        ]
    ) / 4
    u2 = np.array(
        [
            [1, _I3, _I3, -1],
            [_I3, 1, -1, _I3],
            [_I3, -1, 1, _I3],
            [-1, _I3, _I3, 1],
        ]
    ) / 2
    u3 = np.array(
        [
            [s2, _I3 * s2, -_I3 * s6, s6],
            [_I3 * s2, s2, s6, -_I3 * s6],
            [s6, _I3 * s6, _I3 * s2, -s2],
            [_I3 * s6, s6, -s2, _I3 * s2],
        ]
    ) / 4
    return u0, u1, u2, u3


def _build_soqls16() -> QuantumGrid:
    return soqls_fill(
        embed_classical(hsols_4x4()),
        embed_classical(sols_4()),
        BlockUnitary(quartet16_blocks()),
    )


# ---------------------------------------------------------------------------
# order-12 holed self-orthogonal square from the piecewise product

_HSOLS_1X4_SYMBOLS = [
    [-1, 3, 1, 2],
    [2, -1, 3, 0],
    [3, 0, -1, 1],
    [1, 2, 0, -1],
]


def hsols_1x4() -> LatinDesign:
    return LatinDesign(
        2, 4, np.array(_HSOLS_1X4_SYMBOLS), ((0,), (1,), (2,), (3,))
    )


def _build_hsoqls3_4() -> QuantumGrid:
    # the tabulated 12x12 grid contains one corrupted row; the product
    # construction output is stored as authoritative
    return hsoqls_product(
        embed_classical(hsols_1x4()),
        [embed_classical(square(_K1)), embed_classical(square(_K2))],
    )


# ---------------------------------------------------------------------------
# order-16 orthogonal cube triple from lifted order-4 cubes


def molc_4() -> list[LatinDesign]:
    """The cubes i + e*j + e^2*k over GF(4) for e = 1, x, x+1."""
    gf = gf_make(4)
    out = []
    for b, c in [(1, 1), (2, 3), (3, 2)]:
        cells = np.zeros((4, 4, 4), dtype=np.int64)
        for i, j, k in itertools.product(range(4), repeat=3):
            cells[i, j, k] = gf.add(i, gf.add(gf.mul(b, j), gf.mul(c, k)))
        out.append(cube(cells))
    return out


def moqlc16_patterns() -> tuple[TauPattern, TauPattern, TauPattern]:
    """Which outer addresses carry the lifting unitary in each cube."""
    placements = (
        [(0, 1, 2), (1, 2, 1), (2, 1, 2), (3, 0, 0)],
        [(0, 1, 1), (1, 2, 2), (2, 2, 2), (3, 0, 2)],
        [(0, 0, 1), (1, 2, 1), (2, 2, 2), (3, 3, 1)],
    )
    out = []
    for spots in placements:
        grid = np.zeros((4, 4, 4), dtype=bool)
        for addr in spots:
            grid[addr] = True
        out.append(TauPattern(grid))
    return tuple(out)


def _build_moqlc16() -> tuple[QuantumGrid, QuantumGrid, QuantumGrid]:
    cubes = molc_4()
    phi, psi, ups = moqlc_from_molc(
        cubes, cubes, BlockUnitary(quartet16_blocks()), moqlc16_patterns()
    )
    return phi, psi, ups


# ---------------------------------------------------------------------------
# quantum orthogonal arrays


def _build_qoa_bell() -> QuantumOrthogonalArray:
    root = 1 / np.sqrt(2)
    bell = {
        "phi+": [(0, root), (3, root)],
        "phi-": [(0, root), (3, -root)],
        "psi+": [(1, root), (2, root)],
        "psi-": [(1, root), (2, -root)],
    }
    layout = [
        ((0, 0, 0), "phi+"),
        ((0, 1, 1), "psi+"),
        ((1, 0, 1), "psi-"),
        ((1, 1, 0), "phi-"),
    ]
    rows = np.zeros((4, 32), dtype=np.complex128)
    for r, (addr, name) in enumerate(layout):
        offset = ((addr[0] * 2 + addr[1]) * 2 + addr[2]) * 4
        for idx, amp in bell[name]:
            rows[r, offset + idx] = amp
    return QuantumOrthogonalArray(5, 2, 2, sp.csr_matrix(rows))


def _build_qoa343() -> QuantumOrthogonalArray:
    """343 rows |i,k,i+j+k,i+2j+4k> (x) 7^-1/2 sum_l w^(il) |l+j,l+2j+5k,l>."""
    omega = np.exp(2j * np.pi / 7)
    l_range = np.arange(7)
    data, row_idx, col_idx = [], [], []
    for r, (i, j, k) in enumerate(itertools.product(range(7), repeat=3)):
        head = [i, k, (i + j + k) % 7, (i + 2 * j + 4 * k) % 7]
        tail = np.stack(
            [(l_range + j) % 7, (l_range + 2 * j + 5 * k) % 7, l_range]
        )
        flat = np.zeros(7, dtype=np.int64)
        for digit in head:
            flat = flat * 7 + digit
        flat = ((flat * 7 + tail[0]) * 7 + tail[1]) * 7 + tail[2]
        data.append(omega ** (i * l_range) / np.sqrt(7))
        row_idx.append(np.full(7, r))
        col_idx.append(flat)
    rows = sp.csr_matrix(
        (np.concatenate(data), (np.concatenate(row_idx), np.concatenate(col_idx))),
        shape=(343, 7**7),
    )
    return QuantumOrthogonalArray(7, 7, 3, rows)


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class CatalogEntry:
    build: Callable[[], object]
    kind: str
    check: Callable[[object, float], bool]
    notes: tuple[str, ...] = ()


_CATALOG: dict[str, CatalogEntry] = {
    "soqls14": CatalogEntry(_build_soqls14, "soqls", lambda g, tol: verify_soqls(g, tol)),
    "moqls12": CatalogEntry(
        _build_moqls12,
        "moqls",
        lambda gs, tol: verify_moqls(list(gs), tol),
        notes=(
            "block 0 stored with a 1/sqrt(3) prefactor",
            "block 2 stored with bottom-right entry 1",
        ),
    ),
    "qls4_7": CatalogEntry(
        _build_qls4_7,
        "qls-filling",
        lambda fx, tol: (
            verify_iqls(fx.incomplete4, tol)
            and verify_qls(fx.filled4, tol)
            and verify_iqls(fx.incomplete7, tol)
            and verify_qls(fx.filled7, tol)
        ),
    ),
    "soqls16": CatalogEntry(
        _build_soqls16,
        "soqls",
        lambda g, tol: verify_soqls(g, tol),
        notes=("holed base square re-patterned uniformly; see hsols_4x4",),
    ),
    "hsoqls3_4": CatalogEntry(
        _build_hsoqls3_4,
        "hsoqls",
        lambda g, tol: verify_hsoqls(g, tol),
        notes=("stored grid is the product-construction output",),
    ),
    "moqlc16": CatalogEntry(
        _build_moqlc16, "moqlc", lambda gs, tol: verify_moqlc(list(gs), tol)
    ),
    "qoa_bell": CatalogEntry(_build_qoa_bell, "qoa", lambda q, tol: verify_qoa(q, tol)),
    "qoa343": CatalogEntry(_build_qoa343, "qoa", lambda q, tol: verify_qoa(q, tol)),
}


def fixture_names() -> list[str]:
    return sorted(_CATALOG)


def fixture_kind(name: str) -> str:
    return _CATALOG[name].kind


def fixture_notes(name: str) -> tuple[str, ...]:
    return _CATALOG[name].notes


@lru_cache(maxsize=None)
def fixture(name: str):
    """Build, verify at the default tolerance, and cache a catalog design."""
    entry = _CATALOG.get(name)
    if entry is None:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(fixture_names())}")
    obj = entry.build()
    if not entry.check(obj, DEFAULT_TOL):
        raise AssertionError(f"fixture {name!r} failed its verification gate")
    return obj
