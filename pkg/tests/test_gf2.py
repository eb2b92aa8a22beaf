import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarlab.gf2 import (BitMatrix, BitVector, DimensionError, LinearCode, MatrixFormatError,
                          SingularMatrixError, UndefinedDistanceError, code_min_distance,
                          coset_min_weight, distance_to_code, format_row, hall_diagonal_permutation,
                          hamming_distance, parse_row, popcount, quotient_coset_weights, rank,
                          row_reduce, syndrome_weights)


def bv(s):
    return BitVector.from_string(s)


def code(*rows):
    return LinearCode.from_vectors([bv(r) for r in rows])


def brute_distance(v, gens, n):
    best = n + 1
    for coeffs in itertools.product((0, 1), repeat=len(gens)):
        c = 0
        for a, g in zip(coeffs, gens):
            if a:
                c ^= g
        best = min(best, popcount(v ^ c))
    return best


def test_bitvector_roundtrip_and_weight():
    v = bv("10110")
    assert str(v) == "10110"
    assert v.weight == 3
    assert v[0] == 1 and v[1] == 0
    assert format_row(parse_row("0011"), 4) == "0011"


def test_bitvector_rejects_stray_bits():
    with pytest.raises(DimensionError):
        BitVector(3, 0b1000)
    with pytest.raises(MatrixFormatError):
        bv("10a")


@pytest.mark.parametrize("a,b,d", [("10110", "10110", 0), ("111", "000", 3), ("10", "11", 1)])
def test_hamming_distance(a, b, d):
    assert hamming_distance(bv(a), bv(b)) == d


def test_hamming_distance_length_mismatch():
    with pytest.raises(DimensionError):
        hamming_distance(bv("10"), bv("101"))


@given(st.integers(1, 20).flatmap(lambda n: st.tuples(*[st.integers(0, (1 << n) - 1)] * 3, st.just(n))))
def test_hamming_triangle_inequality(t):
    a, b, c, n = t
    A, B, C = (BitVector(n, x) for x in (a, b, c))
    assert hamming_distance(A, C) <= hamming_distance(A, B) + hamming_distance(B, C)


def test_rank_examples():
    assert rank(BitMatrix.identity(3)) == 3
    assert rank(BitMatrix(2, 2, (0, 0))) == 0
    assert rank(BitMatrix.from_rows([[1, 0], [1, 1], [0, 1]])) == 2


def test_matrix_text_format():
    text = "# comment\n10\n\n11  # trailing\n"
    m = BitMatrix.from_text(text)
    assert m.to_text() == "10\n11\n"
    with pytest.raises(MatrixFormatError):
        BitMatrix.from_text("10\n1")
    with pytest.raises(MatrixFormatError):
        BitMatrix.from_text("# nothing\n")


def test_row_reduce_is_rref():
    basis, pivots = row_reduce([0b011, 0b110, 0b101], 3)
    assert len(basis) == 2
    for b, p in zip(basis, pivots):
        assert (b >> p) & 1
        assert all(not (o >> p) & 1 for o in basis if o != b)


def test_distance_to_code_examples():
    assert distance_to_code(bv("10"), code("11")) == 1
    assert distance_to_code(bv("000"), code("101", "011")) == 0
    # second row of Example 1's F against the last row
    assert distance_to_code(bv("101"), code("111")) == 1


def test_distance_to_empty_code_is_weight():
    assert distance_to_code(bv("1101"), LinearCode(4, ())) == 3


def test_code_min_distance_examples():
    assert code_min_distance(code("111")) == 3
    assert code_min_distance(code("10", "11")) == 1
    with pytest.raises(UndefinedDistanceError):
        code_min_distance(LinearCode(3, (0,)))


def test_mitm_matches_enumeration():
    rng = random.Random(1)
    for _ in range(300):
        n = rng.randint(2, 20)
        k = rng.randint(1, min(12, n))
        gens = [rng.getrandbits(n) for _ in range(k)]
        v = rng.getrandbits(n)
        a = coset_min_weight(v, gens, n, method="enumerate")
        b = coset_min_weight(v, gens, n, method="mitm")
        assert a == b
        if n <= 12:
            assert a == brute_distance(v, gens, n)


def test_min_distance_equals_min_partial_distance():
    # a chain of coset searches over any generating sequence
    rng = random.Random(2)
    for _ in range(100):
        n = rng.randint(2, 10)
        rows = [rng.getrandbits(n) for _ in range(rng.randint(1, n))]
        basis, _ = row_reduce(rows, n)
        if not basis:
            continue
        dmin = code_min_distance(LinearCode(n, tuple(basis)))
        partial = [coset_min_weight(basis[i], basis[i + 1:], n) for i in range(len(basis))]
        assert dmin == min(partial)


@pytest.mark.parametrize("rows,expected", [
    ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [0, 1, 2]),
    ([[0, 1], [1, 1]], [1, 0]),
    ([[0, 0, 1], [0, 1, 0], [1, 0, 0]], [2, 1, 0]),
])
def test_hall_diagonal_permutation_examples(rows, expected):
    m = BitMatrix.from_rows(rows)
    perm = hall_diagonal_permutation(m)
    assert perm == expected
    assert all(m.entry(i, perm[i]) for i in range(m.nrows))


def test_hall_rejects_singular_even_with_perfect_matching():
    with pytest.raises(SingularMatrixError):
        hall_diagonal_permutation(BitMatrix.from_rows([[1, 1], [1, 1]]))


@settings(max_examples=200)
@given(st.integers(1, 7).flatmap(lambda n: st.lists(st.integers(0, (1 << n) - 1),
                                                     min_size=n, max_size=n).map(lambda r: (n, r))))
def test_rank_full_iff_matching(data):
    n, rows = data
    m = BitMatrix(n, n, tuple(rows))
    try:
        hall_diagonal_permutation(m)
        ok = True
    except SingularMatrixError:
        ok = False
    assert ok == (rank(m) == n)


def test_quotient_and_syndrome_weights_match_enumeration():
    rng = random.Random(3)
    for _ in range(60):
        n = rng.randint(3, 14)
        k = rng.randint(1, n - 1)
        gens = [rng.getrandbits(n) for _ in range(k)]
        offsets = [rng.getrandbits(n) for _ in range(rng.randint(1, 4))]
        ws = quotient_coset_weights(gens, offsets, n)
        for mask, w in enumerate(ws):
            u = 0
            for t, o in enumerate(offsets):
                if (mask >> t) & 1:
                    u ^= o
            assert w == coset_min_weight(u, gens, n, method="enumerate")
        basis, pivots, free, table = syndrome_weights(gens, n)
        for s in range(1 << len(free)):
            u = sum(1 << c for t, c in enumerate(free) if (s >> t) & 1)
            assert table[s] == coset_min_weight(u, basis, n, method="enumerate")
