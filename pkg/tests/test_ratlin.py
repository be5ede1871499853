from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from diopkit.ratlin import (ChainComplex, Mat, SingularPairingError, Subspace, euler, homology_dims,
                            kernel, orth_complement, rank)

small = st.integers(min_value=-3, max_value=3)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    rows = draw(st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))
    return Mat.from_rows(rows)


def test_rank_examples():
    assert rank(Mat.zero(3, 3)) == 0
    assert rank(Mat.identity(3)) == 3
    assert rank(Mat.from_rows([[1, 2, 3], [2, 4, 6]])) == 1


def test_kernel_examples():
    assert kernel(Mat.identity(2)).dim == 0
    k = kernel(Mat.from_rows([[1, 1]]))
    assert k == Subspace.span(2, [{0: Fraction(1), 1: Fraction(-1)}])
    assert kernel(Mat.zero(2, 3)).dim == 3


def test_orth_complement_examples():
    I2 = Mat.identity(2)
    assert orth_complement(Subspace.zero(2), I2).dim == 2
    assert orth_complement(Subspace.full(2), I2).dim == 0
    s = Subspace.span(2, [{0: 1, 1: 1}])
    assert orth_complement(s, I2) == Subspace.span(2, [{0: 1, 1: -1}])


def test_singular_pairing():
    with pytest.raises(SingularPairingError):
        orth_complement(Subspace.zero(2), Mat.from_rows([[1, 1], [1, 1]]))


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    k = kernel(m)
    assert rank(m) + k.dim == m.cols
    for v in k.vectors():
        assert not m.apply(v)


@settings(max_examples=100, deadline=None)
@given(matrices(5, 5), st.randoms(use_true_random=False))
def test_rref_canonical(m, r):
    rows = m.row_dicts()
    shuffled = rows[:]
    r.shuffle(shuffled)
    combos = [{k: x * 2 for k, x in row.items()} for row in shuffled]
    a, b = Subspace.span(m.cols, rows), Subspace.span(m.cols, combos)
    assert a == b
    assert a.vectors() == b.vectors()


@settings(max_examples=100, deadline=None)
@given(matrices(5, 5))
def test_orth_complement_dims(m):
    n = m.cols
    s = Subspace.span(n, m.row_dicts())
    pairing = Mat(n, n, {(k, k): (-1) ** k for k in range(n)})
    c = orth_complement(s, pairing)
    assert s.dim + c.dim == n
    for v in s.vectors():
        for w in c.vectors():
            assert sum(x * pairing[(k, k)] * w.get(k, 0) for k, x in v.items()) == 0


def test_homology_examples():
    assert homology_dims(ChainComplex({0: 1, 1: 1}, {0: Mat.identity(1)})) == {0: 0, 1: 0}
    assert homology_dims(ChainComplex({0: 1, 1: 1}, {0: Mat.zero(1, 1)})) == {0: 1, 1: 1}


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 4), min_size=1, max_size=4))
def test_zero_differential_homology_is_dims(dims):
    table = {k: d for k, d in enumerate(dims)}
    cx = ChainComplex(table, {k: Mat.zero(dims[k + 1], dims[k]) for k in range(len(dims) - 1)})
    assert homology_dims(cx) == table


@settings(max_examples=60, deadline=None)
@given(matrices(4, 4))
def test_cone_of_identity_is_acyclic(m):
    # cone(id_C) for the two-term complex C: A --m--> B
    a, b = m.cols, m.rows
    d0 = Mat.from_rows([[1 if r == c else 0 for c in range(a)] for r in range(a)] +
                       [[-x for x in row] for row in m.to_dense()])
    # degrees: -1: A ; 0: A + B ; 1: B
    d1_rows = []
    dense = m.to_dense()
    for r in range(b):
        d1_rows.append(list(dense[r]) + [1 if r == c else 0 for c in range(b)])
    d1 = Mat.from_rows(d1_rows)
    cx = ChainComplex({-1: a, 0: a + b, 1: b}, {-1: d0, 0: d1})
    assert cx.check_square_zero()
    assert all(v == 0 for v in homology_dims(cx).values())
    assert cx.euler_characteristic() == euler(homology_dims(cx)) == 0
