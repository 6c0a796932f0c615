import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from zzgril.f2 import F2Matrix, bits, from_indices, kernel, rank_of


def dense_rank(a):
    a = a.copy() % 2
    r = 0
    rows, cols = a.shape
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i, c]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
    return r


matrices = st.integers(1, 7).flatmap(
    lambda r: st.integers(1, 7).flatmap(
        lambda c: st.lists(st.lists(st.integers(0, 1), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


def test_bits_roundtrip():
    assert list(bits(from_indices([0, 3, 5]))) == [0, 3, 5]
    assert from_indices([2, 2]) == 0


@given(matrices)
def test_rank_matches_dense_elimination(rows):
    a = np.array(rows, dtype=np.uint8)
    m = F2Matrix.from_dense(a)
    assert m.rank() == dense_rank(a)
    assert m.rank() <= min(a.shape)
    assert np.array_equal(m.to_dense(), a)


@given(matrices)
def test_kernel_vectors_are_annihilated(rows):
    a = np.array(rows, dtype=np.uint8)
    cols = F2Matrix.from_dense(a).columns
    ker = kernel(cols)
    assert len(ker) == a.shape[1] - rank_of(cols)
    for v in ker:
        acc = 0
        for j in bits(v):
            acc ^= cols[j]
        assert acc == 0


@given(matrices, matrices)
def test_product_matches_dense(x, y):
    a = np.array(x, dtype=np.uint8)
    b = np.array(y, dtype=np.uint8)
    if a.shape[1] != b.shape[0]:
        b = np.resize(b, (a.shape[1], b.shape[1]))
    prod = F2Matrix.from_dense(a) @ F2Matrix.from_dense(b)
    assert np.array_equal(prod.to_dense(), (a.astype(int) @ b.astype(int)) % 2)


def test_identity():
    assert F2Matrix.identity(4).rank() == 4
    assert F2Matrix(3, 0).is_zero()
