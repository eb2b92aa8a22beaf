import math

import pytest

from polarlab.bch import (DEFAULT_PRIMITIVE, FieldError, FieldSpec, bch_exponent_bound, bch_kernel,
                          chords, minimal_polynomial, poly_mul, primitive_polynomials)
from polarlab.gf2 import LinearCode, code_min_distance
from polarlab.kernel import partial_distances


def test_chords_m5():
    cs = chords(5)
    assert len(cs.chords) == 7
    assert cs.mu == (0, 1, 3, 5, 7, 11, 15)
    assert cs.lengths == (1, 5, 5, 5, 5, 5, 5)
    assert cs.chords[1] == (1, 2, 4, 8, 16)


@pytest.mark.parametrize("m", range(2, 9))
def test_chords_partition(m):
    cs = chords(m)
    flat = sorted(x for c in cs.chords for x in c)
    assert flat == list(range(2 ** m - 1))
    for c in cs.chords:
        assert sorted((2 * x) % (2 ** m - 1) for x in c) == list(c)


def test_default_polynomials_are_primitive():
    for m, p in DEFAULT_PRIMITIVE.items():
        FieldSpec(m, p)
    with pytest.raises(FieldError):
        FieldSpec(4, 0b11111)  # x^4+x^3+x^2+x+1 has order 5


def test_minimal_polynomials_m3():
    spec = FieldSpec.default(3)
    assert minimal_polynomial(spec, 0) == 0b11
    assert minimal_polynomial(spec, 1) == 0b1011
    assert minimal_polynomial(spec, 3) == 0b1101
    assert poly_mul(poly_mul(0b11, 0b1011), 0b1101) == (1 << 7) | 1


def test_bch_m3_kernel():
    b = bch_kernel(3)
    prof = partial_distances(b.kernel)
    assert prof == b.design_profile
    assert prof.exponent >= (9 / 7) * math.log(2, 7) - 1e-12


@pytest.mark.parametrize("m", [3, 4])
def test_exponent_invariant_under_primitive_polynomial(m):
    values = {round(partial_distances(bch_kernel(m, p).kernel).exponent, 12)
              for p in primitive_polynomials(m)}
    assert len(values) == 1


@pytest.mark.parametrize("m", [2, 3, 4])
def test_design_bound_met(m):
    b = bch_kernel(m)
    prof = partial_distances(b.kernel)
    assert all(d >= t for d, t in zip(prof, b.design_profile))


def test_bch_m5_chord_bound_and_bottom_code():
    assert bch_exponent_bound(5) == pytest.approx(0.526433, abs=1e-6)
    k = bch_kernel(5).kernel
    assert code_min_distance(LinearCode(31, k.rows[-5:])) == 16


def test_row_degrees_are_distinct():
    k = bch_kernel(4).kernel
    assert sorted(r.bit_length() - 1 for r in k.rows) == list(range(15))
