"""Finite fields, classical Latin squares and cubes, and orthogonal arrays.

Grids store symbols 0..d-1 as small integers; empty (hole) cells hold -1 and
the hole pattern is declared separately as disjoint index subsets.  All
verification is exhaustive counting, no randomness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

HOLE = -1

# Monic irreducible polynomials (coefficients of x^0..x^r) defining GF(p^r)
# for every non-prime prime power up to the q <= 64 construction ceiling.
_IRREDUCIBLE = {
    4: (1, 1, 1),
    8: (1, 1, 0, 1),
    9: (2, 2, 1),
    16: (1, 1, 0, 0, 1),
    25: (2, 4, 1),
    27: (1, 2, 0, 1),
    32: (1, 0, 1, 0, 0, 1),
    49: (3, 6, 1),
    64: (1, 1, 0, 1, 1, 0, 1),
}

_MAX_FIELD_ORDER = 64


def factorize(n: int) -> dict[int, int]:
    """Prime factorization as {prime: exponent}."""
    out: dict[int, int] = {}
    m = n
    p = 2
    while p * p <= m:
        while m % p == 0:
            out[p] = out.get(p, 0) + 1
            m //= p
        p += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


def prime_power(n: int) -> tuple[int, int] | None:
    """Return (p, r) if n == p**r for a prime p, else None."""
    if n < 2:
        return None
    fac = factorize(n)
    if len(fac) != 1:
        return None
    (p, r), = fac.items()
    return p, r


@dataclass(frozen=True)
class GaloisField:
    """GF(p^r) arithmetic with full addition/multiplication tables.

    Element i encodes the polynomial whose base-p digits are the
    coefficients, so 0 and 1 are the additive and multiplicative units.
    """

    p: int
    r: int
    add_table: np.ndarray
    mul_table: np.ndarray

    @property
    def q(self) -> int:
        return self.p**self.r

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def neg(self, a: int) -> int:
        row = self.add_table[a]
        return int(np.nonzero(row == 0)[0][0])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        row = self.mul_table[a]
        return int(np.nonzero(row == 1)[0][0])

    def dot(self, u, v) -> int:
        acc = 0
        for a, b in zip(u, v):
            acc = self.add(acc, self.mul(int(a), int(b)))
        return acc

    def det3(self, cols) -> int:
        """Determinant of a 3x3 matrix given as three column triples."""
        (a, d, g), (b, e, h), (c, f, i) = cols
        pos = self.add(
            self.add(self.mul(a, self.mul(e, i)), self.mul(b, self.mul(f, g))),
            self.mul(c, self.mul(d, h)),
        )
        neg = self.add(
            self.add(self.mul(c, self.mul(e, g)), self.mul(b, self.mul(d, i))),
            self.mul(a, self.mul(f, h)),
        )
        return self.sub(pos, neg)

    def _self_test(self) -> None:
        q = self.q
        for a in range(q):
            if self.add(a, 0) != a or self.mul(a, 1) != a:
                raise AssertionError("field identity axiom failed")
            if a and 1 not in self.mul_table[a]:
                raise AssertionError(f"element {a} has no inverse")
        if sorted(self.add_table[1]) != list(range(q)):
            raise AssertionError("addition row is not a permutation")


def _poly_digits(e: int, p: int, r: int) -> list[int]:
    return [(e // p**i) % p for i in range(r)]


def _digits_to_index(digits, p: int) -> int:
    return sum(d * p**i for i, d in enumerate(digits))


def gf_make(q: int) -> GaloisField:
    """Build GF(q) with q = p^r <= 64; tables are self-tested on creation."""
    pr = prime_power(q)
    if pr is None:
        raise ValueError(f"{q} is not a prime power")
    if q > _MAX_FIELD_ORDER:
        raise ValueError(f"field order {q} above the ceiling {_MAX_FIELD_ORDER}")
    p, r = pr
    add = np.zeros((q, q), dtype=np.int64)
    mul = np.zeros((q, q), dtype=np.int64)
    if r == 1:
        grid = np.arange(q)
        add[:] = (grid[:, None] + grid[None, :]) % q
        mul[:] = (grid[:, None] * grid[None, :]) % q
    else:
        modulus = _IRREDUCIBLE[q]
        digits = [_poly_digits(e, p, r) for e in range(q)]
        for a in range(q):
            for b in range(q):
                add[a, b] = _digits_to_index(
                    [(x + y) % p for x, y in zip(digits[a], digits[b])], p
                )
                # polynomial product, then reduce modulo the irreducible poly
                prod = [0] * (2 * r - 1)
                for i, x in enumerate(digits[a]):
                    for j, y in enumerate(digits[b]):
                        prod[i + j] = (prod[i + j] + x * y) % p
                for deg in range(2 * r - 2, r - 1, -1):
                    c = prod[deg]
                    if c:
                        prod[deg] = 0
                        for k in range(r):
                            prod[deg - r + k] = (prod[deg - r + k] - c * modulus[k]) % p
                mul[a, b] = _digits_to_index(prod[:r], p)
    gf = GaloisField(p=p, r=r, add_table=add, mul_table=mul)
    gf._self_test()
    return gf


@dataclass(frozen=True)
class LatinDesign:
    """A d x d (or d x d x d) symbol grid, possibly with coordinate holes.

    ``cells[i, j] == HOLE`` marks an empty cell; the declared ``holes`` are
    disjoint index subsets S_i, and empty cells must sit exactly on the
    union of the S_i x S_i (x S_i) blocks.
    """

    arity: int
    order: int
    cells: np.ndarray
    holes: tuple[tuple[int, ...], ...] = field(default=())

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=np.int64)
        object.__setattr__(self, "cells", cells)
        holes = tuple(tuple(sorted(int(i) for i in s)) for s in self.holes)
        object.__setattr__(self, "holes", holes)
        if self.arity not in (2, 3):
            raise ValueError("arity must be 2 or 3")
        if cells.shape != (self.order,) * self.arity:
            raise ValueError(f"cells shape {cells.shape} does not match order")
        seen: set[int] = set()
        for s in holes:
            if seen & set(s):
                raise ValueError("hole subsets must be disjoint")
            seen |= set(s)
        mask = self.hole_mask()
        if np.any((self.cells == HOLE) != mask):
            raise ValueError("empty cells do not match the declared holes")
        inside = self.cells[~mask]
        if inside.size and (inside.min() < 0 or inside.max() >= self.order):
            raise ValueError("symbols out of range")

    def hole_mask(self) -> np.ndarray:
        mask = np.zeros((self.order,) * self.arity, dtype=bool)
        for s in self.holes:
            idx = np.ix_(*([list(s)] * self.arity))
            mask[idx] = True
        return mask

    @property
    def hole_of_index(self) -> dict[int, int]:
        return {i: h for h, s in enumerate(self.holes) for i in s}

    def transpose(self) -> "LatinDesign":
        if self.arity != 2:
            raise ValueError("transpose is defined for squares")
        return LatinDesign(2, self.order, self.cells.T.copy(), self.holes)


def square(cells, holes=()) -> LatinDesign:
    cells = np.asarray(cells, dtype=np.int64)
    return LatinDesign(2, cells.shape[0], cells, tuple(holes))


def cube(cells) -> LatinDesign:
    cells = np.asarray(cells, dtype=np.int64)
    return LatinDesign(3, cells.shape[0], cells)


@dataclass(frozen=True)
class OrthogonalArray:
    """An r x N array over d symbols, nominally of strength k."""

    rows: int
    factors: int
    levels: int
    strength: int
    body: np.ndarray

    def __post_init__(self):
        body = np.asarray(self.body, dtype=np.int64)
        object.__setattr__(self, "body", body)
        if body.shape != (self.rows, self.factors):
            raise ValueError("body shape mismatch")
        if body.size and (body.min() < 0 or body.max() >= self.levels):
            raise ValueError("symbols out of range")


# ---------------------------------------------------------------------------
# constructions


def mols_prime_power(q: int) -> list[LatinDesign]:
    """The q-1 pairwise orthogonal squares L_e(i,j) = e*i + j over GF(q)."""
    gf = gf_make(q)
    squares = []
    for e in range(1, q):
        cells = np.array(
            [[gf.add(gf.mul(e, i), j) for j in range(q)] for i in range(q)]
        )
        squares.append(square(cells))
    return squares


def _sols_check_lam(gf: GaloisField, lam: int) -> int:
    q = gf.q
    if not 0 <= lam < q:
        raise ValueError(f"lam {lam} out of range for GF({q})")
    if lam in (0, 1):
        raise ValueError("lam must differ from 0 and 1")
    if gf.add(lam, lam) == 1:
        raise ValueError("2*lam = 1 makes the square equal to its transpose mate")
    return lam


def sols_admissible_lams(q: int) -> list[int]:
    gf = gf_make(q)
    out = []
    for lam in range(2, q):
        if gf.add(lam, lam) != 1:
            out.append(lam)
    return out


def sols_prime_power(q: int, lam: int) -> LatinDesign:
    """Idempotent self-orthogonal square L(i,j) = lam*i + (1-lam)*j over GF(q)."""
    if q < 4:
        raise ValueError("self-orthogonal squares need order >= 4")
    gf = gf_make(q)
    lam = _sols_check_lam(gf, lam)
    mu = gf.sub(1, lam)
    cells = np.array(
        [[gf.add(gf.mul(lam, i), gf.mul(mu, j)) for j in range(q)] for i in range(q)]
    )
    return square(cells)


def hsols_unit_holes(q: int, lam: int | None = None) -> LatinDesign:
    """Unit-hole self-orthogonal square: idempotent SOLS minus its diagonal."""
    if lam is None:
        lam = sols_admissible_lams(q)[0]
    base = sols_prime_power(q, lam)
    cells = base.cells.copy()
    np.fill_diagonal(cells, HOLE)
    return square(cells, holes=tuple((i,) for i in range(q)))


def hmols_unit_holes(q: int) -> tuple[LatinDesign, LatinDesign]:
    """A pair of unit-hole squares orthogonal off the diagonal."""
    lams = sols_admissible_lams(q)
    if len(lams) < 2:
        raise ValueError(f"no admissible coefficient pair for q={q}")
    return hsols_unit_holes(q, lams[0]), hsols_unit_holes(q, lams[1])


def direct_product_ls(a: LatinDesign, b: LatinDesign) -> LatinDesign:
    """Product square C((i,m),(j,n)) = A(i,j)*order(b) + B(m,n)."""
    if a.arity != 2 or b.arity != 2:
        raise ValueError("direct product is defined for squares")
    if a.holes or b.holes:
        raise ValueError("direct product inputs must have no holes")
    da, db = a.order, b.order
    cells = (
        a.cells[:, None, :, None] * db + b.cells[None, :, None, :]
    ).reshape(da * db, da * db)
    return square(cells)


# ---------------------------------------------------------------------------
# verification


def _is_permutation_line(line: np.ndarray, symbols: set[int]) -> bool:
    vals = [int(v) for v in line if v != HOLE]
    return len(vals) == len(symbols) and set(vals) == symbols


def _lines(design: LatinDesign):
    """Yield (axis, fixed_index_tuple, line) for every axis line."""
    cells = design.cells
    if design.arity == 2:
        for i in range(design.order):
            yield 0, (i,), cells[i, :]
            yield 1, (i,), cells[:, i]
    else:
        d = design.order
        for a in range(d):
            for b in range(d):
                yield 0, (a, b), cells[a, b, :]
                yield 1, (a, b), cells[a, :, b]
                yield 2, (a, b), cells[:, a, b]


def is_latin(design: LatinDesign) -> bool:
    """Latin / incomplete-Latin line conditions, holes respected."""
    d = design.order
    full = set(range(d))
    hole_of = design.hole_of_index
    for axis, fixed, line in _lines(design):
        if design.arity == 2:
            idx = fixed[0]
        else:
            # for cubes only the hole-free case occurs; lines see all symbols
            idx = None
        missing = design.holes[hole_of[idx]] if idx in hole_of else ()
        if not _is_permutation_line(line, full - set(missing)):
            return False
    return True


def _pair_coverage(a: LatinDesign, b: LatinDesign) -> bool:
    """Superimposition of two squares covers every admissible ordered pair."""
    if a.holes != b.holes:
        return False
    d = a.order
    mask = ~a.hole_mask() & ~b.hole_mask()
    pairs = set(zip(a.cells[mask].tolist(), b.cells[mask].tolist()))
    excluded = set()
    for s in a.holes:
        excluded |= set(itertools.product(s, s))
    wanted = set(itertools.product(range(d), range(d))) - excluded
    return pairs == wanted


def _triple_coverage(a: LatinDesign, b: LatinDesign, c: LatinDesign) -> bool:
    trips = set(
        zip(a.cells.ravel().tolist(), b.cells.ravel().tolist(), c.cells.ravel().tolist())
    )
    return len(trips) == a.order**3


def _cube_planes(c: LatinDesign, axis: int):
    for v in range(c.order):
        yield square(np.take(c.cells, v, axis=axis))


def _property_b(cubes) -> bool:
    for x, y in itertools.combinations(cubes, 2):
        for axis in range(3):
            for px, py in zip(_cube_planes(x, axis), _cube_planes(y, axis)):
                if not (is_latin(px) and is_latin(py) and _pair_coverage(px, py)):
                    return False
    return True


def verify_classical(designs, prop: str) -> bool:
    """Exhaustively check the named property of a design or design set.

    Properties: ``latin`` (one design), ``mols-pairwise`` (>= 2 squares),
    ``sols``/``hsols`` (one square vs its transpose), ``molc-with-B``
    (>= 3 cubes: triple coverage plus pairwise orthogonal planes).
    """
    if prop == "latin":
        return is_latin(designs)
    if prop == "mols-pairwise":
        if len(designs) < 2:
            raise ValueError("need at least two squares")
        if not all(is_latin(g) for g in designs):
            return False
        return all(
            _pair_coverage(a, b) for a, b in itertools.combinations(designs, 2)
        )
    if prop == "sols":
        if designs.holes:
            return False
        return is_latin(designs) and _pair_coverage(designs, designs.transpose())
    if prop == "hsols":
        covered = sorted(i for s in designs.holes for i in s)
        if covered != list(range(designs.order)):
            return False
        return is_latin(designs) and _pair_coverage(designs, designs.transpose())
    if prop == "molc-with-B":
        if len(designs) < 3:
            raise ValueError("need at least three cubes")
        if not all(g.arity == 3 and is_latin(g) for g in designs):
            return False
        if not all(
            _triple_coverage(a, b, c)
            for a, b, c in itertools.combinations(designs, 3)
        ):
            return False
        return _property_b(designs)
    raise ValueError(f"unknown property {prop!r}")


def verify_oa(oa: OrthogonalArray) -> bool:
    """Count every k-tuple in every k-column subarray; all must hit r/d^k."""
    r, n, d, k = oa.rows, oa.factors, oa.levels, oa.strength
    if r % d**k != 0:
        raise ValueError(f"rows {r} not divisible by {d}^{k}")
    lam = r // d**k
    for cols in itertools.combinations(range(n), k):
        sub = oa.body[:, cols]
        flat = np.ravel_multi_index(sub.T, (d,) * k)
        if not np.all(np.bincount(flat, minlength=d**k) == lam):
            return False
    return True


# ---------------------------------------------------------------------------
# conversions between squares/cubes and orthogonal arrays


def mols_to_oa(squares) -> OrthogonalArray:
    """Stack t squares into OA(d^2, t+2, d, 2) rows (i, j, L1(i,j), ...)."""
    if not verify_classical(squares, "mols-pairwise"):
        raise ValueError("input squares are not pairwise orthogonal")
    d = squares[0].order
    rows = []
    for i in range(d):
        for j in range(d):
            rows.append([i, j] + [int(s.cells[i, j]) for s in squares])
    return OrthogonalArray(d * d, len(squares) + 2, d, 2, np.array(rows))


def oa_to_mols(oa: OrthogonalArray) -> list[LatinDesign]:
    """Read an OA(d^2, t+2, d, 2) back into t squares addressed by columns 0,1."""
    if oa.strength != 2 or oa.rows != oa.levels**2 or not verify_oa(oa):
        raise ValueError("input is not an OA(d^2, t+2, d, 2)")
    d = oa.levels
    t = oa.factors - 2
    grids = np.zeros((t, d, d), dtype=np.int64)
    for row in oa.body:
        grids[:, row[0], row[1]] = row[2:]
    return [square(grids[s]) for s in range(t)]


def oa_strength3_rs(q: int) -> OrthogonalArray:
    """Strength-3 array from degree-2 polynomial evaluation over GF(q).

    Coefficient columns are the conic {(1, e, e^2)} plus (0, 0, 1), with the
    nucleus (0, 1, 0) appended for even q; any three columns are linearly
    independent, which is re-checked exhaustively here.
    """
    if q < 4:
        raise ValueError("need a prime power q >= 4")
    gf = gf_make(q)
    columns = [(1, e, gf.mul(e, e)) for e in range(q)]
    columns.append((0, 0, 1))
    if gf.p == 2:
        columns.append((0, 1, 0))
    for trio in itertools.combinations(columns, 3):
        if gf.det3(trio) == 0:
            raise AssertionError("coefficient columns are not 3-wise independent")
    n = len(columns)
    body = np.zeros((q**3, n), dtype=np.int64)
    for idx, msg in enumerate(itertools.product(range(q), repeat=3)):
        body[idx] = [gf.dot(msg, col) for col in columns]
    return OrthogonalArray(q**3, n, q, 3, body)


def molc_to_oa(cubes) -> OrthogonalArray:
    """Stack t cubes into OA(d^3, t+3, d, 3) rows (i, j, k, L1(i,j,k), ...)."""
    if not verify_classical(cubes, "molc-with-B"):
        raise ValueError("input cubes fail mutual orthogonality with planes")
    d = cubes[0].order
    rows = []
    for i, j, k in itertools.product(range(d), repeat=3):
        rows.append([i, j, k] + [int(c.cells[i, j, k]) for c in cubes])
    return OrthogonalArray(d**3, len(cubes) + 3, d, 3, np.array(rows))


def oa_to_molc(oa: OrthogonalArray, address_columns=(0, 1, 2)) -> list[LatinDesign]:
    """Read cubes off an OA(d^3, N, d, 3) using three address columns.

    The address columns must take every value triple exactly once; for a
    strength-3 array with r = d^3 that holds for any three columns.
    """
    if oa.strength != 3 or oa.rows != oa.levels**3:
        raise ValueError("input is not an OA(d^3, N, d, 3)")
    d = oa.levels
    addr = oa.body[:, list(address_columns)]
    flat = np.ravel_multi_index(addr.T, (d, d, d))
    if len(set(flat.tolist())) != d**3:
        raise ValueError("address columns do not enumerate all triples")
    rest = [c for c in range(oa.factors) if c not in set(address_columns)]
    grids = np.zeros((len(rest), d, d, d), dtype=np.int64)
    for row, (i, j, k) in zip(oa.body, addr):
        grids[:, i, j, k] = row[rest]
    return [cube(grids[s]) for s in range(len(rest))]


# ---------------------------------------------------------------------------
# capability catalog: the known lower bounds on design counts per order

_EXCEPTIONS_BASE_2 = {2, 3, 4, 6, 8, 18}
_EXCEPTIONS_BASE_3 = {9, 12, 24, 27, 50, 54}
_EXCEPTIONS_BASE_4 = {16, 32, 36, 48, 66, 110, 242}


def _in_exception_set(d: int, level: int) -> bool:
    """Membership in the catalog exception sets for 2, 3, or 4 squares."""
    base = {2: _EXCEPTIONS_BASE_2, 3: _EXCEPTIONS_BASE_3, 4: _EXCEPTIONS_BASE_4}[level]
    if d in base:
        return True
    mult = {2: (1, 2, 6), 3: (3,), 4: (4,)}[level]
    for m in mult:
        if d % m == 0:
            p = d // m
            if p >= 5 and prime_power(p) == (p, 1):
                return True
    return False


@dataclass(frozen=True)
class Bound:
    value: int
    rule: str
    exact: bool = False


@dataclass(frozen=True)
class CapabilityBounds:
    """Lower bounds on the largest design families of a given order."""

    order: int
    mols: Bound                 # m: mutually orthogonal Latin squares
    nonclassical_moqls: Bound   # M: non-classical orthogonal quantum squares
    molc_with_planes: Bound     # c: orthogonal Latin cubes with plane condition
    nonclassical_moqlc: Bound   # C: non-classical orthogonal quantum cubes


def _best(*candidates: Bound) -> Bound:
    return max(candidates, key=lambda b: (b.value, b.exact))


def capability(d: int) -> CapabilityBounds:
    """Catalog lower bounds for order d, never claiming more than is known."""
    if d < 2:
        raise ValueError("order must be >= 2")
    fac = factorize(d)
    min_pp = min(p**r for p, r in fac.items())

    mols = Bound(1, "trivial")
    if prime_power(d):
        mols = Bound(d - 1, "prime power field construction", exact=True)
    elif len(fac) >= 2:
        mols = _best(mols, Bound(min_pp - 1, "product of coprime factors"))
    if d not in (2, 6):
        mols = _best(mols, Bound(2, "exception table"))
    if d not in (2, 3, 6, 10):
        mols = _best(mols, Bound(3, "exception table"))
    if d not in (2, 3, 4, 6, 10, 22):
        mols = _best(mols, Bound(4, "exception table"))

    moqls = Bound(0, "none known")
    if len(fac) >= 2:
        moqls = _best(moqls, Bound(min_pp - 1, "product of coprime factors"))
    else:
        (p, r), = fac.items()
        if r >= 2:
            moqls = _best(moqls, Bound(p ** (r // 2) - 1, "prime power split"))
    if not _in_exception_set(d, 2):
        moqls = _best(moqls, Bound(2, "exception table"))
        if not _in_exception_set(d, 3):
            moqls = _best(moqls, Bound(3, "exception table"))
            if not _in_exception_set(d, 4):
                moqls = _best(moqls, Bound(4, "exception table"))

    molc = Bound(0, "none known")
    if prime_power(d):
        if d % 2 == 0 and d >= 4:
            molc = Bound(d - 1, "even prime power polynomial code")
        elif d >= 5:
            molc = Bound(d - 2, "odd prime power polynomial code")
    if d % 4 != 2 and (np.gcd(d, 18) != 3) and d >= 4:
        molc = _best(molc, Bound(3, "gcd conditions"))
    if d in (15, 21):
        molc = _best(molc, Bound(3, "sporadic"))

    moqlc = Bound(0, "none known")
    if len(fac) >= 2:
        moqlc = _best(moqlc, Bound(min_pp - 2, "product of coprime factors"))
    else:
        (p, r), = fac.items()
        if r >= 2:
            moqlc = _best(moqlc, Bound(p ** (r // 2) - 2, "prime power split"))
    for d1 in range(2, int(d**0.5) + 1):
        if d % d1 == 0:
            d2 = d // d1
            if all(x % 4 != 2 and np.gcd(x, 18) != 3 for x in (d1, d2)):
                moqlc = _best(moqlc, Bound(3, "factor pair gcd conditions"))
                break

    return CapabilityBounds(d, mols, moqls, molc, moqlc)
