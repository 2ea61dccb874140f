import struct

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from regulus.etaq import EtaQuotient
from regulus.fpseries import (FpSeries, QExpansion, bk_exact, dilate, eta_power_series,
                              eta_quotient_expansion, frobenius_congruence_check, invert,
                              load_series, mul, power, regular_partition_series, save_series,
                              u_operator)
from oracles import (partition_numbers, poly_series, regular_counts_brute, regular_exact,
                     schoolbook, tau_parity)

SMALL_MODULI = [2, 3, 5, 7, 11]


def series_st(moduli=SMALL_MODULI, max_n=64, unit=False):
    @st.composite
    def build(draw):
        m = draw(st.sampled_from(moduli))
        n = draw(st.integers(1, max_n))
        c = draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n))
        if unit and c[0] == 0:
            c[0] = 1
        return FpSeries(c, m)
    return build()


# ----------------------------------------------------------- construction

def test_reduction_and_dtype():
    s = FpSeries([-1, 7, 12], 5)
    assert s.to_list() == [4, 2, 2]
    assert s.coeffs.dtype == np.uint8
    assert FpSeries([0], 300).coeffs.dtype == np.uint16
    assert FpSeries([0], 70000).coeffs.dtype == np.uint32
    assert FpSeries([2**40 + 3], 2**31 - 1)[0] == (2**40 + 3) % (2**31 - 1)


def test_immutable():
    s = FpSeries([1, 2], 5)
    with pytest.raises(ValueError):
        s.coeffs[0] = 3
    with pytest.raises(AttributeError):
        s.modulus = 7


@pytest.mark.parametrize("bad", [0, 1, 2**31])
def test_bad_modulus(bad):
    with pytest.raises(ValueError):
        FpSeries([1], bad)


def test_zero_one_any_truncation():
    for n in (1, 5, 1000):
        assert FpSeries.zero(7, n).is_zero()
        assert FpSeries.one(7, n).to_list() == [1] + [0] * (n - 1)
    with pytest.raises(ValueError):
        FpSeries.zero(7, 0)
    with pytest.raises(ValueError):
        FpSeries([], 7)


def test_arith_truncates_to_min():
    a = FpSeries([1, 1, 1, 1], 5)
    b = FpSeries([1, 4], 5)
    assert (a + b).to_list() == [2, 0]
    assert (a - b).to_list() == [0, 2]
    assert (a * b).truncation == 2
    assert (-a).to_list() == [4, 4, 4, 4]
    assert (3 * a).to_list() == [3] * 4


def test_modulus_mismatch():
    with pytest.raises(ValueError):
        mul(FpSeries([1], 5), FpSeries([1], 7))
    with pytest.raises(ValueError):
        FpSeries([1], 5) + FpSeries([1], 7)


def test_shift_truncate_first_nonzero():
    s = FpSeries([1, 2, 3], 7)
    assert s.shift(1).to_list() == [0, 1, 2]
    assert s.shift(5).is_zero()
    assert s.truncate(2).to_list() == [1, 2]
    assert s.shift(2).first_nonzero() == 2
    assert FpSeries.zero(3, 4).first_nonzero() is None


# ------------------------------------------------------------------ mul

def test_mul_difference_of_squares():
    assert mul(FpSeries([1, 1, 0], 5), FpSeries([1, 4, 0], 5)).to_list() == [1, 0, 4]


@pytest.mark.parametrize("m", [2, 5, 251, 65521, 2**31 - 1])
def test_mul_paths_agree_512(m):
    rng = np.random.default_rng(m)
    a = FpSeries(rng.integers(0, m, 512), m)
    b = FpSeries(rng.integers(0, m, 512), m)
    s = mul(a, b, method="schoolbook")
    assert mul(a, b, method="ntt") == s
    assert s.to_list() == schoolbook(a.to_list(), b.to_list(), m, 512)


def test_mul_threshold_override():
    rng = np.random.default_rng(0)
    a = FpSeries(rng.integers(0, 7, 3000), 7)
    b = FpSeries(rng.integers(0, 7, 3000), 7)
    assert mul(a, b, threshold=10) == mul(a, b, threshold=10**6)
    with pytest.raises(ValueError):
        mul(a, b, method="karatsuba")


@settings(max_examples=60, deadline=None)
@given(series_st())
def test_mul_identity(f):
    assert mul(f, FpSeries.one(f.modulus, f.truncation)) == f


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_ring_axioms(data):
    m = data.draw(st.sampled_from(SMALL_MODULI))
    n = data.draw(st.integers(1, 256))
    draw = lambda: FpSeries(data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n)), m)
    a, b, c = draw(), draw(), draw()
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    assert mul(a, b + c) == mul(a, b) + mul(a, c)
    assert mul(a, b) == mul(b, a)


# --------------------------------------------------------------- invert

def test_invert_geometric():
    assert invert(FpSeries([1, 6, 0, 0], 7)).to_list() == [1, 1, 1, 1]


def test_invert_euler_gives_partitions():
    p = partition_numbers(49)
    got = invert(eta_power_series(1, 1, 11, 50))
    assert got.to_list() == [v % 11 for v in p]


def test_invert_non_unit():
    with pytest.raises(ValueError):
        invert(FpSeries([0, 1], 5))
    with pytest.raises(ValueError):
        invert(FpSeries([2, 1], 4))


@settings(max_examples=60, deadline=None)
@given(series_st(max_n=300, unit=True))
def test_invert_two_sided(f):
    g = invert(f)
    one = FpSeries.one(f.modulus, f.truncation)
    assert mul(f, g) == one and mul(g, f) == one
    assert invert(g) == f


def test_invert_large_uses_ntt():
    rng = np.random.default_rng(5)
    c = rng.integers(0, 65521, 5000)
    c[0] = 3
    f = FpSeries(c, 65521)
    assert mul(f, invert(f)) == FpSeries.one(65521, 5000)


def test_power():
    f = FpSeries([1, 1, 0, 0, 0], 97)
    assert power(f, 4).to_list() == [1, 4, 6, 4, 1]
    assert mul(power(f, -3), power(f, 3)) == FpSeries.one(97, 5)
    assert power(f, 0) == FpSeries.one(97, 5)


# ------------------------------------------------------------------ eta

def test_pentagonal():
    assert eta_power_series(1, 1, 1000, 13).to_list() == [1, 999, 999, 0, 0, 1, 0, 1, 0, 0, 0, 0, 999]


def test_eta_zero_exponent():
    assert eta_power_series(2, 0, 5, 6) == FpSeries.one(5, 6)


def test_eta_24_mod2_is_tau_parity():
    s = eta_power_series(1, 24, 2, 30)
    # coefficient n of prod (1-q^k)^24 is tau(n+1)
    assert s.to_list() == tau_parity(30)


@pytest.mark.parametrize("delta,r,m", [(1, 3, 7), (2, 5, 11), (3, 2, 13), (1, 7, 2)])
def test_eta_power_matches_product(delta, r, m):
    assert eta_power_series(delta, r, m, 60).to_list() == poly_series([(delta, r)], 60, m)


def test_eta_negative_exponent():
    e = eta_power_series(2, 4, 101, 80)
    assert mul(e, eta_power_series(2, -4, 101, 80)) == FpSeries.one(101, 80)


def test_eta_quotient_expansion_basics():
    q = eta_quotient_expansion(EtaQuotient(1, {1: 1}), 13, 20)
    assert q.prefactor24 == 1
    assert q.series == eta_power_series(1, 1, 13, 20)
    with pytest.raises(ValueError):
        eta_quotient_expansion({1: 1}, 13, 0)


def test_eta_32_over_8_mod2():
    # eta(32z)/eta(8z) = q * sum b4(n) q^{8n}; eta^24(z) = q * prod(1-q^n)^24
    N = 4000
    lhs = eta_quotient_expansion({32: 1, 8: -1}, 2, N)
    rhs = eta_quotient_expansion({1: 24}, 2, N)
    assert lhs.prefactor24 == rhs.prefactor24 == 24
    assert lhs.series == rhs.series


def test_b6_quotient():
    q = eta_quotient_expansion(EtaQuotient(6, {1: -1, 6: 1}), 7, 41)
    assert q.series.to_list() == [v % 7 for v in regular_counts_brute(40)[6]]


def test_qexpansion_product():
    a = QExpansion(1, FpSeries([1, 1], 5))
    b = QExpansion(2, FpSeries([1, 4], 5))
    c = a * b
    assert c.prefactor24 == 3 and c.series.to_list() == [1, 0]


# ------------------------------------------------------------ partitions

def test_b4_b6_prefix():
    assert regular_partition_series(4, 100, 8).to_list() == [1, 1, 2, 3, 4, 6, 9, 12]
    assert regular_partition_series(6, 100, 7).to_list() == [1, 1, 2, 3, 5, 7, 10]


@pytest.mark.parametrize("k", range(2, 9))
def test_partition_series_brute(k):
    brute = regular_counts_brute(40)[k]
    for m in SMALL_MODULI:
        want = [v % m for v in brute]
        assert regular_partition_series(k, m, 41).to_list() == want
        assert regular_partition_series(k, m, 41, method="recurrence").to_list() == want
        assert all(bk_exact(k, n) % m == want[n] for n in range(41))


def test_b4_parity_triangular():
    N = 100_001
    s = regular_partition_series(4, 2, N)
    tri = np.zeros(N, dtype=np.uint8)
    t = 0
    while t * (t + 1) // 2 < N:
        tri[t * (t + 1) // 2] = 1
        t += 1
    assert np.array_equal(s.coeffs, tri)


@pytest.mark.parametrize("m", [2, 3, 5, 7])
def test_fast_equals_recurrence(m):
    N = 100_000
    assert regular_partition_series(4, m, N) == regular_partition_series(4, m, N, method="recurrence")


def test_partition_series_large_modulus():
    exact = regular_exact(5, 300)
    p = 2**31 - 1
    assert regular_partition_series(5, p, 301).to_list() == [v % p for v in exact]


def test_partition_series_errors():
    with pytest.raises(ValueError):
        regular_partition_series(1, 5, 10)
    with pytest.raises(ValueError):
        regular_partition_series(4, 5, 10, method="magic")


def test_bk_exact():
    assert bk_exact(4, 0) == 1
    assert bk_exact(4, 7) == 12
    assert bk_exact(6, 5) == 7
    assert bk_exact(3, -1) == 0
    assert [bk_exact(5, n) for n in range(31)] == regular_exact(5, 30)
    with pytest.raises(ValueError):
        bk_exact(4, 61)


# --------------------------------------------------------- index maps

def test_u_operator():
    s = FpSeries([1, 2, 3, 4, 5], 7)
    assert u_operator(s, 1) == s
    assert u_operator(s, 2).to_list() == [1, 3, 5]
    assert u_operator(FpSeries(list(range(10)), 11), 3).truncation == 4


def test_dilate():
    assert dilate(FpSeries([1, 1], 5), 3, 6).to_list() == [1, 0, 0, 1, 0, 0]
    f = FpSeries([1, 2, 3], 5)
    assert dilate(f, 1) == f
    assert dilate(f, 2).truncation == 6
    with pytest.raises(ValueError):
        dilate(f, 2, 7)


@settings(max_examples=50, deadline=None)
@given(series_st(max_n=100), st.integers(1, 9))
def test_u_dilate_section(f, j):
    assert u_operator(dilate(f, j), j) == f


def test_dilate_b4_matches_eta_quotient():
    N = 500
    b4 = regular_partition_series(4, 13, (N - 1) // 8 + 1)
    lhs = dilate(b4, 8, N)
    q = eta_quotient_expansion({32: 1, 8: -1}, 13, N)
    # prefactor q^{24/24} = q matches the +1 in sum b4(n) q^{8n+1}
    assert q.prefactor24 == 24
    assert q.series == lhs


# ----------------------------------------------------------- frobenius

@pytest.mark.parametrize("m", [2, 3, 5, 7, 11, 13])
def test_frobenius_primes(m):
    assert frobenius_congruence_check(m, 2000).passed


def test_frobenius_small_oracle():
    # (1-q)^2 = 1 - 2q + q^2 = 1 + q^2 (mod 2), applied factorwise
    assert poly_series([(1, 2)], 50, 2) == poly_series([(2, 1)], 50, 2)


def test_frobenius_composite_fails():
    r = frobenius_congruence_check(4, 2000)
    assert not r.passed
    lhs = poly_series([(1, 4)], 10, 4)
    rhs = poly_series([(4, 1)], 10, 4)
    first = next(i for i in range(10) if lhs[i] != rhs[i])
    assert r.first_failure == first


# ---------------------------------------------------------------- cache

def test_cache_roundtrip(tmp_path):
    s = regular_partition_series(4, 5, 1_000_000)
    p = tmp_path / "b4.qser"
    save_series(s, p)
    raw = p.read_bytes()
    assert raw[:4] == b"QSER" and raw[4] == 1
    assert struct.unpack("<QQ", raw[5:21]) == (5, 1_000_000)
    assert len(raw) == 21 + 1_000_000
    assert load_series(p) == s
    assert load_series(p, 5) == s


def test_cache_errors(tmp_path):
    s = FpSeries([1, 2, 3, 4], 5)
    p = tmp_path / "s.qser"
    save_series(s, p)
    raw = p.read_bytes()
    (tmp_path / "short").write_bytes(raw[:-1])
    with pytest.raises(ValueError, match="expected 4"):
        load_series(tmp_path / "short")
    (tmp_path / "magic").write_bytes(b"XSER" + raw[4:])
    with pytest.raises(ValueError, match="magic"):
        load_series(tmp_path / "magic")
    (tmp_path / "ver").write_bytes(raw[:4] + b"\x02" + raw[5:])
    with pytest.raises(ValueError, match="version"):
        load_series(tmp_path / "ver")
    with pytest.raises(ValueError, match="modulus"):
        load_series(p, 7)
    (tmp_path / "bad").write_bytes(raw[:-1] + b"\x09")
    with pytest.raises(ValueError, match="corrupt"):
        load_series(tmp_path / "bad")
    with pytest.raises(ValueError):
        save_series(FpSeries([1], 65521), tmp_path / "big")


def test_digest_stable():
    a = FpSeries([1, 2, 3], 7)
    b = FpSeries([1, 2, 3], 7)
    assert a.digest() == b.digest()
    assert a.digest() != FpSeries([1, 2, 3], 11).digest()
