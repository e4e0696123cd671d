import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lfrcache.errors import FieldMismatchError, ShapeError, SingularMatrixError
from lfrcache.field import (
    MAX_MODULUS,
    FieldMatrix,
    PrimeField,
    hstack,
    invert,
    mat_mul,
    matmul_mod,
    rank,
    rowspace_contains,
    rref_with_transform,
    vstack,
)

PRIMES = [2, 3, 5, 7, 11, 101, 65537]


def naive_matmul(a, b, p):
    n, m = len(a), len(b[0])
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) % p for j in range(m)] for i in range(n)]


def det_mod(m, p):
    # cofactor expansion, fine for the <= 3x3 minors used here
    n = len(m)
    if n == 1:
        return m[0][0] % p
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        total += (-1) ** j * m[0][j] * det_mod(minor, p)
    return total % p


def minor_rank(rows, p):
    """Largest size of a nonsingular square submatrix."""
    n, m = len(rows), len(rows[0]) if rows else 0
    for r in range(min(n, m), 0, -1):
        for ri in itertools.combinations(range(n), r):
            for ci in itertools.combinations(range(m), r):
                if det_mod([[rows[i][j] for j in ci] for i in ri], p):
                    return r
    return 0


def random_invertible(fld, n, rng):
    while True:
        m = fld.matrix(rng.integers(0, fld.p, size=(n, n)))
        if rank(m) == n:
            return m


@st.composite
def matrices(draw, p=None, rows=None, cols=None, max_dim=6):
    p = p if p is not None else draw(st.sampled_from([2, 3, 5, 7]))
    r = rows if rows is not None else draw(st.integers(1, max_dim))
    c = cols if cols is not None else draw(st.integers(1, max_dim))
    vals = draw(st.lists(st.integers(0, p - 1), min_size=r * c, max_size=r * c))
    return PrimeField(p).matrix(np.array(vals, dtype=np.int64).reshape(r, c))


# construction


def test_prime_field_rejects_composites_and_oversized():
    for bad in (0, 1, 4, 9, 15, 2**31):
        with pytest.raises(ValueError):
            PrimeField(bad)
    assert PrimeField(MAX_MODULUS).p == MAX_MODULUS


def test_inverse_of_each_nonzero_element():
    for p in (2, 3, 7, 101):
        fld = PrimeField(p)
        for a in range(1, p):
            assert a * fld.inv(a) % p == 1
    with pytest.raises(ZeroDivisionError):
        PrimeField(7).inv(0)


def test_entries_reduced_and_immutable():
    m = PrimeField(5).matrix([[7, -1], [10, 4]])
    assert m.tolist() == [[2, 4], [0, 4]]
    with pytest.raises(ValueError):
        m.data[0, 0] = 1


# mat_mul


def test_identity_times_b():
    fld = PrimeField(7)
    b = fld.matrix([[1, 2], [3, 4], [5, 6]])
    assert mat_mul(fld.identity(3), b) == b


def test_gf2_product_wraps():
    fld = PrimeField(2)
    assert (fld.matrix([[1, 1], [0, 1]]) @ fld.matrix([[1], [1]])).tolist() == [[0], [1]]


def test_random_product_matches_triple_loop():
    rng = np.random.default_rng(5)
    fld = PrimeField(7)
    for _ in range(20):
        a = rng.integers(0, 7, size=(4, 5)).tolist()
        b = rng.integers(0, 7, size=(5, 2)).tolist()
        assert mat_mul(fld.matrix(a), fld.matrix(b)).tolist() == naive_matmul(a, b, 7)


def test_large_modulus_chunked_product_is_exact():
    p = MAX_MODULUS
    rng = np.random.default_rng(1)
    a = rng.integers(0, p, size=(3, 40))
    b = rng.integers(0, p, size=(40, 2))
    expect = naive_matmul(a.tolist(), b.tolist(), p)
    assert matmul_mod(a, b, p).tolist() == expect


def test_shape_and_field_mismatch():
    a = PrimeField(3).zeros(2, 3)
    with pytest.raises(ShapeError):
        a @ PrimeField(3).zeros(2, 2)
    with pytest.raises(FieldMismatchError):
        a + PrimeField(5).zeros(2, 3)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_matmul_associative(data):
    p = data.draw(st.sampled_from([2, 3, 7, 101]))
    n, m, k, l = (data.draw(st.integers(1, 5)) for _ in range(4))
    a = data.draw(matrices(p, n, m))
    b = data.draw(matrices(p, m, k))
    c = data.draw(matrices(p, k, l))
    assert (a @ b) @ c == a @ (b @ c)


# rref_with_transform


def test_rref_of_zero():
    fld = PrimeField(3)
    r, t, rk = rref_with_transform(fld.zeros(2, 3))
    assert r == fld.zeros(2, 3) and t == fld.identity(2) and rk == 0


def test_rref_of_identity():
    fld = PrimeField(5)
    r, t, rk = rref_with_transform(fld.identity(3))
    assert r == fld.identity(3) and t == fld.identity(3) and rk == 3


def test_rref_pivots_leftmost_first_lowest_row():
    fld = PrimeField(7)
    r, t, rk = rref_with_transform(fld.matrix([[0, 2, 4], [3, 1, 0], [3, 1, 0]]))
    assert rk == 2
    assert r.tolist() == [[1, 0, 4], [0, 1, 2], [0, 0, 0]]
    assert t @ fld.matrix([[0, 2, 4], [3, 1, 0], [3, 1, 0]]) == r


def test_rref_random_tall_matches_minor_rank():
    rng = np.random.default_rng(11)
    fld = PrimeField(5)
    for _ in range(30):
        rows = rng.integers(0, 5, size=(6, 3))
        rows[rng.integers(0, 6)] = 0
        a = fld.matrix(rows)
        r, t, rk = rref_with_transform(a)
        assert t @ a == r
        assert rk == minor_rank(rows.tolist(), 5)


@settings(max_examples=80, deadline=None)
@given(matrices())
def test_transform_is_invertible_and_reduces(a):
    r, t, rk = rref_with_transform(a)
    assert t @ a == r
    assert invert(t) @ t == a.field.identity(a.rows)
    assert rk == rank(a) == minor_rank(a.tolist(), a.field.p) if min(a.shape) <= 3 else rk == rank(a)
    # rows past the rank are zero; the leading entries are ones
    assert r[rk:, :].is_zero()
    for i in range(rk):
        lead = next(j for j, v in enumerate(r.tolist()[i]) if v)
        assert r.tolist()[i][lead] == 1


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_rank_invariant_under_invertible_row_ops(data):
    a = data.draw(matrices(max_dim=5))
    seed = data.draw(st.integers(0, 2**32 - 1))
    t = random_invertible(a.field, a.rows, np.random.default_rng(seed))
    assert rank(t @ a) == rank(a)


# invert


def test_invert_examples():
    assert invert(PrimeField(7).identity(4)) == PrimeField(7).identity(4)
    assert invert(PrimeField(3).matrix([[2]])).tolist() == [[2]]


def test_invert_random_invertible():
    rng = np.random.default_rng(3)
    fld = PrimeField(7)
    for _ in range(10):
        a = random_invertible(fld, 5, rng)
        assert a @ invert(a) == fld.identity(5)
        assert invert(a) @ a == fld.identity(5)


def test_invert_singular_and_nonsquare():
    fld = PrimeField(2)
    with pytest.raises(SingularMatrixError):
        invert(fld.matrix([[1, 1], [1, 1]]))
    with pytest.raises(ShapeError):
        invert(fld.zeros(2, 3))


# rowspace_contains


def test_rowspace_examples():
    fld = PrimeField(2)
    assert rowspace_contains(fld.matrix([[1, 0, 1]]), fld.zeros(1, 3))
    assert rowspace_contains(fld.identity(4), fld.matrix([[1, 1, 0, 1], [0, 1, 1, 1]]))
    assert not rowspace_contains(fld.matrix([[1, 0, 0]]), fld.matrix([[0, 1, 0]]))


def solvable_by_rref(big, probe):
    # probe = X big  iff  appending probe rows to big keeps the rank
    return rank(vstack([big, probe])) == rank(big)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_rowspace_agrees_with_rank_criterion(data):
    p = data.draw(st.sampled_from([2, 3, 5]))
    cols = data.draw(st.integers(1, 5))
    big = data.draw(matrices(p, cols=cols, max_dim=4))
    mix = data.draw(matrices(p, cols=big.rows, max_dim=3))
    noise = data.draw(matrices(p, rows=mix.rows, cols=cols))
    flip = data.draw(st.booleans())
    probe = mix @ big + (noise if flip else big.field.zeros(mix.rows, cols))
    got = rowspace_contains(big, probe)
    assert got == solvable_by_rref(big, probe)
    if not flip:
        assert got


def test_stacking():
    fld = PrimeField(3)
    a, b = fld.matrix([[1, 2]]), fld.matrix([[0, 1]])
    assert vstack([a, b]).tolist() == [[1, 2], [0, 1]]
    assert hstack([a, b]).tolist() == [[1, 2, 0, 1]]
    assert vstack([fld.zeros(0, 2), a]).tolist() == [[1, 2]]
    with pytest.raises(ShapeError):
        vstack([])
