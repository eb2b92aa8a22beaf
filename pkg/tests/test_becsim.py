import math

import numpy as np
import pytest

from conftest import corpus, fixture_kernel
from polarlab.becsim import (CapacityError, ambiguity_polynomials, bec_evolve, bec_step,
                             binary_entropy, block_error_bounds, bsc_pair_gain, exact_path_log2,
                             mc_bounds_process, pe_lower, polarization_fraction,
                             unpolarized_fraction)
from polarlab.kernel import Kernel, partial_distances

G2 = fixture_kernel("g2")
EPS = np.linspace(0.0, 1.0, 21)
SMALL = [(name, k) for name, k in corpus() if k.ell <= 16]


def test_g2_polynomials():
    poly = ambiguity_polynomials(G2)
    assert poly.counts == ((0, 2, 1), (0, 0, 1))
    for e in EPS:
        assert poly.transfer(1, e) == pytest.approx(2 * e - e * e)
        assert poly.transfer(2, e) == pytest.approx(e * e)


def test_identity_kernel_is_transparent():
    poly = ambiguity_polynomials(Kernel.identity(4))
    for i in range(1, 5):
        assert np.allclose(poly.transfer(i, EPS), EPS)


def test_upper_triangular_gives_eps_everywhere():
    # every D_i = 1 and each row's coset has a unit vector covered by all others
    k = Kernel.from_rows([[1, 1, 1], [0, 1, 1], [0, 0, 1]])
    assert partial_distances(k).distances == (1, 1, 1)
    st = bec_evolve(k, 0.3, 4)
    assert np.allclose(st.z, 0.3)


@pytest.mark.parametrize("name,k", SMALL, ids=[n for n, _ in SMALL])
def test_min_ambiguous_weight_is_partial_distance(name, k):
    poly = ambiguity_polynomials(k)
    assert tuple(poly.min_weight(i) for i in range(1, k.ell + 1)) == partial_distances(k).distances


@pytest.mark.parametrize("name,k", SMALL, ids=[n for n, _ in SMALL])
def test_sandwich_and_conservation(name, k):
    poly = ambiguity_polynomials(k)
    d = partial_distances(k).distances
    total = np.zeros_like(EPS)
    for i in range(1, k.ell + 1):
        f = poly.transfer(i, EPS)
        total += f
        lo = EPS ** d[i - 1]
        hi = np.minimum(2.0 ** (k.ell - i) * lo, 1.0)
        assert np.all(f >= lo - 1e-12) and np.all(f <= hi + 1e-12)
        assert np.all(np.diff(f) >= -1e-12)  # monotone in eps
    assert np.allclose(total, k.ell * EPS)


def test_conservation_at_depth():
    st = bec_evolve(G2, 0.5, 14)
    assert st.z.size == 2 ** 14
    assert st.conservation_residual() < 1e-9
    st = bec_evolve(fixture_kernel("example1_f"), 0.37, 8)
    assert st.conservation_residual() < 1e-9


def test_log_domain_matches_linear():
    st = bec_evolve(G2, 0.5, 12)
    ok = st.z > 1e-300
    assert np.allclose(np.log2(st.z[ok]), st.log2z[ok], atol=1e-9)
    # deep levels: values below the double range stay ordered and finite
    st = bec_evolve(G2, 0.5, 20)
    assert np.all(np.isfinite(st.log2z))
    assert st.log2z.min() < -1100


def test_history_and_bec_step():
    states = bec_evolve(G2, 0.4, 3, history=True)
    assert [s.level for s in states] == [0, 1, 2, 3]
    z, _ = bec_step(ambiguity_polynomials(G2), states[2].z)
    assert np.allclose(z, states[3].z)


def test_martingale_and_index_order():
    # children of node j sit at j*l .. j*l + l-1, average equal to parent
    k = fixture_kernel("example1_f")
    states = bec_evolve(k, 0.3, 4, history=True)
    for a, b in zip(states, states[1:]):
        assert np.allclose(b.z.reshape(-1, k.ell).mean(axis=1), a.z)


def test_fractions_sane():
    st = bec_evolve(G2, 0.5, 12)
    for beta in (0.2, 0.4):
        assert 0.0 <= polarization_fraction(st, beta) <= 0.5 + 1e-9
    assert polarization_fraction(st, 0.2) >= polarization_fraction(st, 0.4)
    assert 0.0 <= unpolarized_fraction(st, 1e-3) <= 1.0


def test_capacity_errors():
    with pytest.raises(CapacityError):
        bec_evolve(G2, 0.5, 30)
    with pytest.raises(ValueError):
        bec_evolve(G2, 1.5, 2)
    with pytest.raises(CapacityError):
        ambiguity_polynomials(Kernel.identity(25))


@pytest.mark.parametrize("name", ["g2", "example1_f", "kernel16"])
def test_mc_sandwich_contains_exact(name):
    k = fixture_kernel(name)
    poly = ambiguity_polynomials(k)
    prof = partial_distances(k)
    ens = mc_bounds_process(prof, 0.4, 6, 40, seed=3)
    for p in range(len(ens)):
        tr = ens.trajectory(p)
        ex = exact_path_log2(poly, 0.4, tr.branches)
        for lo, x, hi in zip(tr.lo, ex, tr.hi):
            assert lo <= x + 1e-9 and x <= hi + 1e-9


def test_mc_lower_is_multiplicative():
    prof = partial_distances(G2)
    ens = mc_bounds_process(prof, 0.5, 5, 50, seed=1)
    for p in range(len(ens)):
        tr = ens.trajectory(p)
        for n, b in enumerate(tr.branches):
            assert tr.lo[n + 1] == pytest.approx(prof[b - 1] * tr.lo[n])


def test_mc_seed_reproducible():
    prof = partial_distances(fixture_kernel("example1_f"))
    a = mc_bounds_process(prof, 0.5, 8, 100, seed=11)
    b = mc_bounds_process(prof, 0.5, 8, 100, seed=11)
    c = mc_bounds_process(prof, 0.5, 8, 100, seed=12)
    assert np.array_equal(a.branches, b.branches) and np.array_equal(a.hi, b.hi)
    assert not np.array_equal(a.branches, c.branches)
    # path p does not depend on the ensemble size
    d = mc_bounds_process(prof, 0.5, 8, 10, seed=11)
    assert np.array_equal(a.branches[:10], d.branches)
    assert 0.0 <= a.fraction_below(0.3) <= a.fraction_below(0.3, "lo") <= 1.0


def test_block_error_bounds():
    st = bec_evolve(G2, 0.5, 10)
    lo, hi, info = block_error_bounds(st, 0.25)
    assert len(info) == 256 and list(info) == sorted(info)
    assert lo <= hi < 1e-2
    # the info set holds the smallest z values
    rest = np.setdiff1d(np.arange(st.z.size), info)
    assert st.z[info].max() <= st.z[rest].min()
    with pytest.raises(ValueError):
        block_error_bounds(st, 0.0)


def test_scalar_formulas():
    assert pe_lower(0.0) == 0.0
    assert pe_lower(1.0) == pytest.approx(0.5)
    z = 0.3
    assert pe_lower(z) == pytest.approx((1 - math.sqrt(1 - z * z)) / 2)
    assert pe_lower(1e-10) == pytest.approx(5e-21)
    assert binary_entropy(0.5) == 1.0 and binary_entropy(0.0) == 0.0
    assert bsc_pair_gain(0.0) == 0.0 and bsc_pair_gain(0.5) == pytest.approx(0.0)
    assert all(bsc_pair_gain(e) > 0 for e in (0.01, 0.1, 0.3, 0.45))
    with pytest.raises(ValueError):
        bsc_pair_gain(0.6)
