import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wellround.exactla import (
    INFEASIBLE, OPTIMAL, UNBOUNDED,
    NotPositiveDefinite, RatMatrix, format_rational, hnf, int_identity,
    int_kernel, int_matmul, int_matrix, int_matvec, int_transpose, ldlt, lp,
    parse_rational, saturation, snf,
)


def test_rational_roundtrip():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("-7") == Fraction(-7)
    assert format_rational(Fraction(3, 4)) == "3/4"
    assert format_rational(Fraction(5, 1)) == "5"
    assert format_rational(Fraction(-2, 6)) == "-1/3"


def test_ldlt_identity():
    a = RatMatrix.identity(2)
    l, d = ldlt(a)
    assert l == RatMatrix.identity(2)
    assert d == (1, 1)


def test_ldlt_hand_elimination():
    # [[2,1],[1,2]]: pivot 2, then 2 - 1/2 = 3/2; reconstruct to cross-check
    a = RatMatrix.from_rows([[2, 1], [1, 2]])
    l, d = ldlt(a)
    assert d == (2, Fraction(3, 2))
    dm = RatMatrix.from_rows([[d[0], 0], [0, d[1]]])
    assert l @ dm @ l.transpose() == a


def test_ldlt_indefinite_reports_pivot():
    a = RatMatrix.from_rows([[1, 2], [2, 1]])
    with pytest.raises(NotPositiveDefinite) as exc:
        ldlt(a)
    assert exc.value.index == 2


def _random_spd(rng, n):
    b = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)]
    a = [[sum(b[k][i] * b[k][j] for k in range(n)) + (4 if i == j else 0)
          for j in range(n)] for i in range(n)]
    return RatMatrix.from_rows(a)


def test_ldlt_reconstruction_random():
    rng = random.Random(7)
    for _ in range(25):
        n = rng.randint(1, 5)
        a = _random_spd(rng, n)
        l, d = ldlt(a)
        dm = RatMatrix.from_rows([[d[i] if i == j else 0 for j in range(n)]
                                  for i in range(n)])
        assert l @ dm @ l.transpose() == a
        assert all(x > 0 for x in d)


def _check_snf(m):
    res = snf(m)
    prod = res.reconstruct(m)
    r = len(res.diag)
    for i, row in enumerate(prod):
        for j, x in enumerate(row):
            assert x == (res.diag[i] if i == j and i < r else 0)
    for i in range(r - 1):
        if res.diag[i] != 0:
            assert res.diag[i + 1] % res.diag[i] == 0
        else:
            assert res.diag[i + 1] == 0
    assert abs(RatMatrix.from_rows(res.left).det()) == 1
    assert abs(RatMatrix.from_rows(res.right).det()) == 1
    return res


def test_snf_examples():
    res = _check_snf(int_matrix([[0, 0], [0, 0]]))
    assert res.diag == (0, 0)
    res = _check_snf(int_matrix([[2, 0], [0, 4]]))
    assert res.diag == (2, 4)
    # brute-force oracle for diag(2,3): smallest invariant factors are 1, 6
    res = _check_snf(int_matrix([[2, 0], [0, 3]]))
    assert res.diag == (1, 6)


def test_snf_random():
    rng = random.Random(11)
    for _ in range(30):
        m = rng.randint(1, 5)
        k = rng.randint(1, 5)
        mat = int_matrix([[rng.randint(-9, 9) for _ in range(k)] for _ in range(m)])
        _check_snf(mat)


def test_snf_random_larger():
    rng = random.Random(13)
    for _ in range(3):
        mat = int_matrix([[rng.randint(-4, 4) for _ in range(12)] for _ in range(12)])
        _check_snf(mat)


def _in_col_lattice(m, v):
    """Integer membership oracle via Smith form: is v in the Z-span of
    the columns of m?  Independent of the HNF code path."""
    res = snf(m)
    uv = int_matvec(res.left, v)
    r = len(res.diag)
    for i, x in enumerate(uv):
        if i < r and res.diag[i] != 0:
            if x % res.diag[i] != 0:
                return False
        elif x != 0:
            return False
    return True


def _col_lattice_equal(a, b):
    """Mutual membership of columns: same column lattice over Z."""
    return (all(_in_col_lattice(a, v) for v in int_transpose(b))
            and all(_in_col_lattice(b, v) for v in int_transpose(a)))


def test_hnf_identity():
    assert hnf(int_identity(3)) == int_identity(3)


def test_hnf_canonical_and_lattice_preserving():
    m = int_matrix([[2, 1], [0, 1]])
    h = hnf(m)
    assert _col_lattice_equal(m, h)
    assert hnf(h) == h
    # canonical: any unimodular recombination of columns gives the same HNF
    u = int_matrix([[1, 1], [0, 1]])
    assert hnf(int_matmul(m, u)) == h


def test_hnf_single_column_keeps_content():
    m = int_matrix([[4], [6]])
    assert hnf(m) == int_matrix([[4], [6]])
    assert saturation(m) == int_matrix([[2], [3]])


def test_saturation_full_rank():
    m = int_matrix([[2, 0], [0, 3]])
    assert saturation(m) == int_identity(2)


def test_hnf_random_properties():
    rng = random.Random(3)
    for _ in range(25):
        n = rng.randint(1, 4)
        k = rng.randint(1, 4)
        m = int_matrix([[rng.randint(-6, 6) for _ in range(k)] for _ in range(n)])
        h = hnf(m)
        if h:
            assert hnf(h) == h
            assert _col_lattice_equal(m, h)
        else:
            assert all(all(x == 0 for x in row) for row in m)


def test_int_kernel():
    m = int_matrix([[4, 6]])
    ker = int_kernel(m)
    assert len(ker) == 1
    v = ker[0]
    assert int_matvec(m, v) == (0,)
    from math import gcd
    assert gcd(v[0], v[1]) == 1  # saturated


@given(st.lists(st.lists(st.integers(-8, 8), min_size=3, max_size=3),
                min_size=2, max_size=4))
@settings(max_examples=60, deadline=None)
def test_snf_property(rows):
    _check_snf(int_matrix(rows))


def test_lp_trivial_bounded():
    # max x subject to x <= 1 (as -x >= -1), x >= 0
    res = lp([1], ge_lhs=[[-1], [1]], ge_rhs=[-1, 0])
    assert res.status == OPTIMAL
    assert res.point == (1,)
    assert res.objective == 1


def test_lp_infeasible():
    res = lp([1], ge_lhs=[[1], [-1]], ge_rhs=[1, 0])  # x >= 1 and x <= 0
    assert res.status == INFEASIBLE


def test_lp_unbounded():
    res = lp([1], ge_lhs=[[1]], ge_rhs=[0])
    assert res.status == UNBOUNDED


def test_lp_equality_mix():
    # max x + y with x + y + z = 2, x <= 1, y <= 1/2, z >= 0
    res = lp([1, 1, 0],
             eq_lhs=[[1, 1, 1]], eq_rhs=[2],
             ge_lhs=[[-1, 0, 0], [0, -1, 0], [0, 0, 1]],
             ge_rhs=[-1, Fraction(-1, 2), 0])
    assert res.status == OPTIMAL
    assert res.objective == Fraction(3, 2)
    assert res.point[0] == 1 and res.point[1] == Fraction(1, 2)


def test_lp_random_exactness():
    rng = random.Random(5)
    for _ in range(40):
        nx = rng.randint(1, 3)
        nge = rng.randint(1, 4)
        c = [Fraction(rng.randint(-3, 3)) for _ in range(nx)]
        ge = [[Fraction(rng.randint(-3, 3)) for _ in range(nx)] for _ in range(nge)]
        gb = [Fraction(rng.randint(-3, 3)) for _ in range(nge)]
        # keep the region bounded: box constraints
        for i in range(nx):
            row_lo = [Fraction(0)] * nx
            row_lo[i] = Fraction(1)
            ge.append(row_lo)
            gb.append(Fraction(-5))
            row_hi = [Fraction(0)] * nx
            row_hi[i] = Fraction(-1)
            ge.append(row_hi)
            gb.append(Fraction(-5))
        res = lp(c, ge_lhs=ge, ge_rhs=gb)
        assert res.status in (OPTIMAL, INFEASIBLE)
        if res.status == OPTIMAL:
            for row, b in zip(ge, gb):
                assert sum(a * x for a, x in zip(row, res.point)) >= b
            assert sum(ci * xi for ci, xi in zip(c, res.point)) == res.objective
