"""Exact rational linear algebra kernels.

Everything in this module is exact: rationals are `fractions.Fraction`
(re-exported as ``Rational``), integer matrices are tuples of tuples of
Python ints.  Provided here:

* LDL^T factorization with positive-definiteness certification,
* column-style Hermite normal form, integer kernels and saturation,
* Smith normal form with unimodular transforms (for homology over Z),
* a two-phase simplex solver with Bland's rule over the rationals,
* small generic Gaussian-elimination helpers over Q and F_p.

All values are immutable and all functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Rational = Fraction

IntVector = tuple[int, ...]
IntMatrix = tuple[IntVector, ...]


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or "p" into a Fraction."""
    return Fraction(text.strip())


def format_rational(value: Fraction) -> str:
    """Serialize a Fraction as "p/q", or "p" when the denominator is 1."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class NotPositiveDefinite(ValueError):
    """Raised when a symmetric matrix has a nonpositive pivot.

    ``index`` is the 1-based position of the first nonpositive pivot.
    """

    def __init__(self, index: int):
        super().__init__(f"nonpositive pivot at index {index}")
        self.index = index


@dataclass(frozen=True)
class RatMatrix:
    entries: tuple[tuple[Fraction, ...], ...]

    @staticmethod
    def from_rows(rows: Iterable[Iterable]) -> "RatMatrix":
        ent = tuple(tuple(Fraction(x) for x in row) for row in rows)
        if ent and any(len(r) != len(ent[0]) for r in ent):
            raise ValueError("ragged rows")
        return RatMatrix(ent)

    @staticmethod
    def identity(n: int) -> "RatMatrix":
        one, zero = Fraction(1), Fraction(0)
        return RatMatrix(tuple(tuple(one if i == j else zero for j in range(n))
                               for i in range(n)))

    @staticmethod
    def zeros(m: int, n: int) -> "RatMatrix":
        zero = Fraction(0)
        return RatMatrix(tuple(tuple(zero for _ in range(n)) for _ in range(m)))

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.entries[i]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.entries)

    def transpose(self) -> "RatMatrix":
        return RatMatrix(tuple(zip(*self.entries))) if self.entries else self

    def __add__(self, other: "RatMatrix") -> "RatMatrix":
        return RatMatrix(tuple(tuple(a + b for a, b in zip(ra, rb))
                               for ra, rb in zip(self.entries, other.entries)))

    def __sub__(self, other: "RatMatrix") -> "RatMatrix":
        return RatMatrix(tuple(tuple(a - b for a, b in zip(ra, rb))
                               for ra, rb in zip(self.entries, other.entries)))

    def __neg__(self) -> "RatMatrix":
        return RatMatrix(tuple(tuple(-a for a in r) for r in self.entries))

    def scale(self, c) -> "RatMatrix":
        c = Fraction(c)
        return RatMatrix(tuple(tuple(c * a for a in r) for r in self.entries))

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        ot = other.transpose().entries
        return RatMatrix(tuple(tuple(sum(a * b for a, b in zip(row, col))
                                     for col in ot)
                               for row in self.entries))

    def matvec(self, v: Sequence) -> tuple[Fraction, ...]:
        return tuple(sum(a * Fraction(x) for a, x in zip(row, v)) for row in self.entries)

    def is_symmetric(self) -> bool:
        return self.entries == self.transpose().entries

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for r in self.entries for a in r)

    def to_int(self) -> IntMatrix:
        if not self.is_integral():
            raise ValueError("matrix is not integral")
        return tuple(tuple(a.numerator for a in r) for r in self.entries)

    def rank(self) -> int:
        return len(_rref([list(r) for r in self.entries])[1])

    def det(self) -> Fraction:
        if self.rows != self.cols:
            raise ValueError("det of non-square matrix")
        a = [list(r) for r in self.entries]
        n = self.rows
        det = Fraction(1)
        for j in range(n):
            piv = next((i for i in range(j, n) if a[i][j] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != j:
                a[j], a[piv] = a[piv], a[j]
                det = -det
            det *= a[j][j]
            inv = 1 / a[j][j]
            for i in range(j + 1, n):
                if a[i][j] != 0:
                    f = a[i][j] * inv
                    a[i] = [x - f * y for x, y in zip(a[i], a[j])]
        return det

    def inverse(self) -> "RatMatrix":
        n = self.rows
        if n != self.cols:
            raise ValueError("inverse of non-square matrix")
        a = [list(r) + [Fraction(int(i == j)) for j in range(n)]
             for i, r in enumerate(self.entries)]
        rr, pivots = _rref(a)
        if len(pivots) < n or pivots != list(range(n)):
            raise ValueError("matrix is singular")
        return RatMatrix(tuple(tuple(row[n:]) for row in rr))

    def solve(self, rhs: Sequence) -> Optional[tuple[Fraction, ...]]:
        """One solution x of self @ x = rhs, or None if inconsistent."""
        m, n = self.rows, self.cols
        a = [list(r) + [Fraction(b)] for r, b in zip(self.entries, rhs)]
        rr, pivots = _rref(a)
        if any(p == n for p in pivots):
            return None  # pivot in the augmented column: inconsistent
        for i in range(len(pivots), m):
            if rr[i][n] != 0:
                return None
        x = [Fraction(0)] * n
        for i, p in enumerate(pivots):
            x[p] = rr[i][n]
        return tuple(x)

    def kernel(self) -> tuple[tuple[Fraction, ...], ...]:
        """Basis of the rational null space, as a tuple of vectors."""
        rr, pivots = _rref([list(r) for r in self.entries])
        n = self.cols
        free = [j for j in range(n) if j not in pivots]
        basis = []
        for f in free:
            v = [Fraction(0)] * n
            v[f] = Fraction(1)
            for i, p in enumerate(pivots):
                v[p] = -rr[i][f]
            basis.append(tuple(v))
        return tuple(basis)


def _rref(a: list[list[Fraction]]):
    """In-place reduced row echelon form; returns (rows, pivot columns)."""
    m = len(a)
    n = len(a[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for j in range(n):
        piv = next((i for i in range(r, m) if a[i][j] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][j]
        a[r] = [x * inv for x in a[r]]
        for i in range(m):
            if i != r and a[i][j] != 0:
                f = a[i][j]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(j)
        r += 1
        if r == m:
            break
    return a, pivots


def ldlt(a: RatMatrix) -> tuple[RatMatrix, tuple[Fraction, ...]]:
    """L D L^T factorization of a symmetric positive-definite matrix.

    Returns (L, pivots) with L unit lower-triangular and all pivots > 0.
    Raises NotPositiveDefinite (with the 1-based pivot position) as soon
    as a nonpositive pivot appears.
    """
    if not a.is_symmetric():
        raise ValueError("matrix is not symmetric")
    n = a.rows
    lmat = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    d: list[Fraction] = []
    for j in range(n):
        dj = a[j, j] - sum(lmat[j][k] * lmat[j][k] * d[k] for k in range(j))
        if dj <= 0:
            raise NotPositiveDefinite(j + 1)
        d.append(dj)
        for i in range(j + 1, n):
            lmat[i][j] = (a[i, j] - sum(lmat[i][k] * lmat[j][k] * d[k]
                                        for k in range(j))) / dj
    return RatMatrix(tuple(tuple(r) for r in lmat)), tuple(d)


# ---------------------------------------------------------------------------
# Integer matrices: HNF, SNF, kernels, saturation
# ---------------------------------------------------------------------------

def int_matrix(rows: Iterable[Iterable[int]]) -> IntMatrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def int_transpose(m: IntMatrix) -> IntMatrix:
    return tuple(zip(*m)) if m else ()


def int_identity(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def int_matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    bt = int_transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt)
                 for row in a)


def int_matvec(a: IntMatrix, v: Sequence[int]) -> IntVector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def int_det(m: IntMatrix) -> int:
    return int(RatMatrix.from_rows(m).det())


def is_unimodular(m: IntMatrix) -> bool:
    return len(m) == len(m[0]) and abs(int_det(m)) == 1


def int_inverse(m: IntMatrix) -> IntMatrix:
    inv = RatMatrix.from_rows(m).inverse()
    return inv.to_int()


def _row_hnf(m: IntMatrix) -> IntMatrix:
    """Row-style Hermite normal form: echelon rows, positive pivots,
    entries above a pivot reduced into [0, pivot).  Zero rows dropped."""
    a = [list(r) for r in m]
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    r = 0
    for j in range(ncols):
        while True:
            live = [i for i in range(r, nrows) if a[i][j] != 0]
            if not live:
                break
            piv = min(live, key=lambda i: abs(a[i][j]))
            a[r], a[piv] = a[piv], a[r]
            done = True
            for i in range(r + 1, nrows):
                if a[i][j] != 0:
                    q = a[i][j] // a[r][j]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][j] != 0:
                        done = False
            if done:
                break
        if r < nrows and a[r][j] != 0:
            if a[r][j] < 0:
                a[r] = [-x for x in a[r]]
            for i in range(r):
                q = a[i][j] // a[r][j]
                if q != 0:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
            r += 1
            if r == nrows:
                break
    return tuple(tuple(row) for row in a[:r] if any(row))


def hnf(m: IntMatrix) -> IntMatrix:
    """Column-style Hermite normal form of an integer matrix.

    Columns span the same lattice as the input; zero columns are dropped,
    so the result is a canonical basis of the column lattice.
    """
    m = int_matrix(m)
    if not m:
        return m
    return int_transpose(_row_hnf(int_transpose(m)))


@dataclass(frozen=True)
class SNFResult:
    left: IntMatrix
    diag: IntVector
    right: IntMatrix

    def reconstruct(self, m: IntMatrix) -> IntMatrix:
        return int_matmul(int_matmul(self.left, m), self.right)


def snf(m: IntMatrix) -> SNFResult:
    """Smith normal form with transforms: left @ m @ right is diagonal
    with a nonnegative divisibility chain d_1 | d_2 | ...

    Backed by sympy's DomainMatrix decomposition over ZZ; naive gcd
    elimination suffers catastrophic entry growth on dense matrices.
    """
    m = int_matrix(m)
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    if nrows == 0 or ncols == 0:
        return SNFResult(int_identity(nrows), (), int_identity(ncols))
    from sympy import ZZ
    from sympy.polys.matrices import DomainMatrix
    from sympy.polys.matrices.normalforms import smith_normal_decomp

    dm = DomainMatrix.from_list([[ZZ(x) for x in row] for row in m], ZZ)
    d, s, t = smith_normal_decomp(dm)
    u = int_matrix(s.to_list())
    v = int_matrix(t.to_list())
    dd = d.to_list()
    r = min(nrows, ncols)
    diag = [int(dd[i][i]) for i in range(r)]
    for i in range(r):
        if diag[i] < 0:
            diag[i] = -diag[i]
            u = tuple(row if k != i else tuple(-x for x in row)
                      for k, row in enumerate(u))
    for i in range(r - 1):
        if (diag[i] == 0 and diag[i + 1] != 0) or \
                (diag[i] != 0 and diag[i + 1] % diag[i] != 0):
            raise AssertionError("divisibility chain violated")
    return SNFResult(u, tuple(diag), v)


def int_kernel(m: IntMatrix) -> tuple[IntVector, ...]:
    """Basis (as vectors) of the saturated integer kernel {x : m x = 0}."""
    m = int_matrix(m)
    if not m:
        return ()
    ncols = len(m[0])
    if all(all(x == 0 for x in row) for row in m):
        return tuple(tuple(int(i == j) for j in range(ncols)) for i in range(ncols))
    res = snf(m)
    rank = sum(1 for d in res.diag if d != 0)
    vt = int_transpose(res.right)
    return tuple(vt[j] for j in range(rank, ncols))


def saturation(m: IntMatrix) -> IntMatrix:
    """Canonical basis (column HNF) of span_Q(columns of m) intersected
    with Z^n: the saturated sublattice containing the column lattice."""
    m = int_matrix(m)
    n = len(m)
    perp = int_kernel(int_transpose(m))  # vectors orthogonal to the span
    if not perp:
        return hnf(int_identity(n))
    sat = int_kernel(tuple(perp))
    cols = tuple(sat)
    return hnf(int_transpose(cols))


# ---------------------------------------------------------------------------
# Rational simplex with Bland's rule
# ---------------------------------------------------------------------------

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    point: Optional[tuple[Fraction, ...]] = None
    objective: Optional[Fraction] = None


def _simplex(tab: list[list[Fraction]], basis: list[int], cost: list[Fraction]) -> str:
    """Maximize cost over the tableau (rhs in the last column), Bland's rule.

    Mutates tab/basis; returns OPTIMAL or UNBOUNDED.  The reduced-cost
    row is maintained incrementally through the pivots.
    """
    nrows = len(tab)
    ncols = len(tab[0]) - 1
    zero = Fraction(0)
    obj = list(cost) + [zero]
    for i in range(nrows):
        cb = cost[basis[i]]
        if cb != 0:
            obj = [x - cb * y for x, y in zip(obj, tab[i])]
    while True:
        entering = -1
        for j in range(ncols):
            if obj[j] > 0:
                entering = j
                break
        if entering < 0:
            return OPTIMAL
        leaving = -1
        best = None
        for i in range(nrows):
            if tab[i][entering] > 0:
                ratio = tab[i][-1] / tab[i][entering]
                if best is None or ratio < best or \
                        (ratio == best and basis[i] < basis[leaving]):
                    best = ratio
                    leaving = i
        if leaving < 0:
            return UNBOUNDED
        piv = tab[leaving][entering]
        if piv != 1:
            tab[leaving] = [x / piv for x in tab[leaving]]
        pivot_row = tab[leaving]
        for i in range(nrows):
            if i != leaving:
                f = tab[i][entering]
                if f != 0:
                    tab[i] = [x - f * y for x, y in zip(tab[i], pivot_row)]
        f = obj[entering]
        if f != 0:
            obj = [x - f * y for x, y in zip(obj, pivot_row)]
        basis[leaving] = entering


def lp(c: Sequence, eq_lhs: Sequence[Sequence] = (), eq_rhs: Sequence = (),
       ge_lhs: Sequence[Sequence] = (), ge_rhs: Sequence = ()) -> LPResult:
    """Maximize c.x subject to eq_lhs.x = eq_rhs and ge_lhs.x >= ge_rhs.

    Variables are free rationals.  Exact two-phase simplex; Bland's rule
    guarantees termination.  When the status is OPTIMAL the returned point
    satisfies every constraint exactly.
    """
    c = [Fraction(x) for x in c]
    nx = len(c)
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    nge = len(ge_lhs)
    for row, b in zip(eq_lhs, eq_rhs):
        rows.append([Fraction(x) for x in row] + [Fraction(0)] * nge)
        rhs.append(Fraction(b))
    for k, (row, b) in enumerate(zip(ge_lhs, ge_rhs)):
        slack = [Fraction(0)] * nge
        slack[k] = Fraction(-1)
        rows.append([Fraction(x) for x in row] + slack)
        rhs.append(Fraction(b))
    nrows = len(rows)

    # x = u - w with u, w >= 0; then slack columns
    def structural(row: list[Fraction]) -> list[Fraction]:
        xpart = row[:nx]
        return xpart + [-x for x in xpart] + row[nx:]

    ncols = 2 * nx + nge
    tab: list[list[Fraction]] = []
    for i in range(nrows):
        r = structural(rows[i])
        b = rhs[i]
        if b < 0:
            r = [-x for x in r]
            b = -b
        art = [Fraction(int(j == i)) for j in range(nrows)]
        tab.append(r + art + [b])
    basis = [ncols + i for i in range(nrows)]

    cost1 = [Fraction(0)] * ncols + [Fraction(-1)] * nrows
    _simplex(tab, basis, cost1)
    if any(tab[i][-1] != 0 and basis[i] >= ncols for i in range(nrows)):
        return LPResult(INFEASIBLE)
    # drive artificials out of the basis, dropping redundant rows
    keep = []
    for i in range(len(tab)):
        if basis[i] >= ncols:
            j = next((j for j in range(ncols) if tab[i][j] != 0), None)
            if j is None:
                continue  # redundant row
            piv = tab[i][j]
            tab[i] = [x / piv for x in tab[i]]
            for k in range(len(tab)):
                if k != i and tab[k][j] != 0:
                    f = tab[k][j]
                    tab[k] = [x - f * y for x, y in zip(tab[k], tab[i])]
            basis[i] = j
        keep.append(i)
    tab = [tab[i][:ncols] + [tab[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]

    cost2 = c + [-x for x in c] + [Fraction(0)] * nge
    status = _simplex(tab, basis, cost2)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED)
    vals = [Fraction(0)] * ncols
    for i, b in enumerate(basis):
        vals[b] = tab[i][-1]
    x = tuple(vals[j] - vals[nx + j] for j in range(nx))
    obj = sum(ci * xi for ci, xi in zip(c, x))
    return LPResult(OPTIMAL, x, obj)


# ---------------------------------------------------------------------------
# Field abstraction for homology over Q and F_p
# ---------------------------------------------------------------------------

class RationalField:
    """Field operations for Fraction matrices."""

    name = "Q"

    def of(self, n: int) -> Fraction:
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return a / b

    def is_zero(self, a) -> bool:
        return a == 0


class PrimeField:
    """Field operations for integers mod a prime p."""

    def __init__(self, p: int):
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.name = f"F{p}"

    def of(self, n: int) -> int:
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def div(self, a, b):
        return (a * pow(b, -1, self.p)) % self.p

    def is_zero(self, a) -> bool:
        return a % self.p == 0


QQ = RationalField()


def f_matrix(field, int_rows: Sequence[Sequence[int]]) -> list[list]:
    return [[field.of(x) for x in row] for row in int_rows]


def f_rref(field, a: list[list]):
    """Reduced row echelon form over a field; returns (rows, pivots)."""
    m = len(a)
    n = len(a[0]) if m else 0
    a = [list(r) for r in a]
    pivots: list[int] = []
    r = 0
    for j in range(n):
        piv = next((i for i in range(r, m) if not field.is_zero(a[i][j])), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = field.div(field.of(1), a[r][j])
        a[r] = [field.mul(x, inv) for x in a[r]]
        for i in range(m):
            if i != r and not field.is_zero(a[i][j]):
                f = a[i][j]
                a[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(a[i], a[r])]
        pivots.append(j)
        r += 1
        if r == m:
            break
    return a, pivots


def f_rank(field, a: Sequence[Sequence]) -> int:
    if not a or not a[0]:
        return 0
    return len(f_rref(field, [list(r) for r in a])[1])


def f_kernel(field, a: Sequence[Sequence], ncols: int) -> list[list]:
    """Basis of the null space {x : a x = 0} over the field."""
    if not a:
        return [[field.of(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    rr, pivots = f_rref(field, [list(r) for r in a])
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for fcol in free:
        v = [field.of(0)] * ncols
        v[fcol] = field.of(1)
        for i, p in enumerate(pivots):
            v[p] = field.sub(field.of(0), rr[i][fcol])
        basis.append(v)
    return basis
