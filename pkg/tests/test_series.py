import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from selfsim.automatic import from_group_ring
from selfsim.fp import FpMatrix
from selfsim.mealy import load_group
from selfsim.recursion import MarkedBasis, level_matrix
from selfsim.sequences import decimate, thue_morse
from selfsim.series import (
    ClosedForm, FpSeries, TSPoly, decimate_series, diagonal_decimation_map, diagonal_series,
    fit_closed_form, frobenius_recompose, grigorchuk_closed_forms, grigorchuk_diagonal_system,
    grigorchuk_relation, rational, recompose, series_of_sequence, tilde_first_diagonals, ts_mul,
    verify_algebraic,
)

BIN2 = MarkedBasis.binomial(2)


@pytest.fixture(scope="module")
def G():
    return load_group("grigorchuk")


@pytest.fixture(scope="module")
def mats64(G):
    return {k: level_matrix(G.generators[k], 6, BIN2) for k in "abcd"}


def S(coeffs, N=16, p=2):
    return FpSeries(p, coeffs, N)


def test_arith_basics():
    x = FpSeries.monomial(1, 2, 16)
    one = FpSeries.one(2, 16)
    assert (one / (one + x)).tolist() == [1] * 16
    assert ((one + x) ** 2) == one + x * x
    f = S([1, 2, 0, 1], 8, p=3)
    assert (f * f.inverse()) == FpSeries.one(3, 8)
    assert f ** -2 * f ** 2 == FpSeries.one(3, 8)
    with pytest.raises(ZeroDivisionError):
        x.inverse()


def test_mixed_orders_rejected():
    with pytest.raises(ValueError):
        S([1], 8) + S([1], 9)
    with pytest.raises(ValueError):
        S([1], 8, p=2) * S([1], 8, p=3)


def test_rational_examples():
    assert rational([1], [1, 1], 16).tolist() == [1] * 16
    got = rational([0, 1], [1, 0, 0, 0, 1], 16)
    assert [k for k, c in enumerate(got.tolist()) if c] == [1, 5, 9, 13]
    with pytest.raises(ZeroDivisionError):
        rational([1], [0, 1], 8)


def test_series_of_thue_morse():
    tm = series_of_sequence(thue_morse().prefix(16), 2)
    assert "".join(map(str, tm.tolist())) == "0110100110010110"
    assert tm.to_sparse().splitlines()[:2] == ["1 * s^1", "1 * s^2"]
    assert len(tm.to_csv().splitlines()) == 16


def test_recompose_thue_morse():
    w = thue_morse().prefix(64)
    parts = [series_of_sequence(q, 2) for q in decimate(w, 2)]
    assert recompose(parts) == series_of_sequence(w, 2)
    # decimations are t and its complement
    assert [(a + b) % 2 for a, b in zip(parts[0].tolist(), parts[1].tolist())] == [1] * 32
    assert frobenius_recompose(parts) == recompose(parts)
    zero = FpSeries.zero(2, 8)
    assert recompose([zero, zero]).is_zero()


def test_recompose_decimate_roundtrip_all_sequences(G):
    seqs = [thue_morse().prefix(64)]
    seqs += [list(diagonal_series(G.generators[k], i, 64, BIN2).tolist()) for k in "abcd" for i in (0, 1, 2)]
    for w in seqs:
        f = series_of_sequence(w, 2)
        assert recompose(decimate_series(f, 2)) == f


def test_frobenius_polynomial():
    f = S([1, 1], 8)
    assert f.frobenius() == f ** 2
    assert f.frobenius().tolist()[:3] == [1, 0, 1]


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([2, 3]), st.lists(st.integers(0, 2), min_size=12, max_size=12))
def test_frobenius_identity(p, coeffs):
    f = FpSeries(p, coeffs)
    assert f ** p == f.frobenius()


def test_thue_morse_relation_by_brute_expansion():
    # candidate relation first expanded coefficient by coefficient with integers
    N = 64
    t = thue_morse().prefix(N)
    sq = [sum(t[i] * t[k - i] for i in range(k + 1)) % 2 for k in range(N)]
    def mul_poly(a, poly):
        return [sum(poly[j] * a[k - j] for j in range(len(poly)) if k - j >= 0) % 2 for k in range(N)]
    lhs = [(u + v + (k == 1)) % 2 for k, (u, v) in enumerate(zip(mul_poly(sq, [1, 1, 1, 1]), mul_poly(t, [1, 0, 1])))]
    assert not any(lhs)
    G_ = series_of_sequence(t, 2)
    x = FpSeries.monomial(1, 2, N)
    one = FpSeries.one(2, N)
    assert verify_algebraic(G_, [x, (one + x) ** 2, (one + x) ** 3], 56)
    assert not verify_algebraic(G_, [x, (one + x) ** 2, (one + x) ** 2], 56)


def test_verify_algebraic_guards():
    G_ = FpSeries.zero(2, 4)
    with pytest.raises(ValueError):
        verify_algebraic(G_, [0])
    with pytest.raises(ValueError):
        verify_algebraic(FpSeries.zero(2, 16), [0], order=32)


def test_diagonal_examples():
    add = load_group("adding").generators["a"]
    assert diagonal_series(add, 0, 64, BIN2).tolist() == [1] * 64
    assert diagonal_series(add, 2, 64, BIN2).is_zero()
    a = load_group("grigorchuk").generators["a"]
    assert diagonal_series(a, 1, 64, BIN2) == rational([1], [1, 0, 1], 64)


def test_diagonal_series_from_matrix_matches(mats64, G):
    for k in "bcd":
        assert diagonal_series(mats64[k], 1, 63) == diagonal_series(G.generators[k], 1, 63, BIN2)
    with pytest.raises(ValueError):
        diagonal_series(mats64["a"], 3, 64)


@pytest.mark.parametrize("name", "BCD")
def test_relations_on_matrix_diagonals(mats64, name):
    X = diagonal_series(mats64[name.lower()], 1, 63)
    assert verify_algebraic(X, grigorchuk_relation(name, 63), 56)
    # the same relation fails for a different generator's diagonal
    other = {"B": "c", "C": "d", "D": "b"}[name]
    Y = diagonal_series(mats64[other], 1, 63)
    assert not verify_algebraic(Y, grigorchuk_relation(name, 63), 56)


def test_decimation_map_examples():
    assert diagonal_decimation_map(1, 0, 2) == (0, 1, 0)
    assert diagonal_decimation_map(1, 1, 2) == (1, 0, 1)
    _, r, q = diagonal_decimation_map(3, 1, 2)
    assert (r, q) == (0, 2)
    with pytest.raises(ValueError):
        diagonal_decimation_map(1, 2, 2)


def test_decimation_map_on_truncations(G):
    for d, (k_, M) in [(2, ("b", level_matrix(G.generators["b"], 7, BIN2))),
                       (3, ("a", level_matrix(load_group("gupta_sidki").generators["a"], 4, MarkedBasis.binomial(3))))]:
        A = M.a
        half = A.shape[0] // d
        L = half - 4
        for n in range(1, 6):
            for k in range(d):
                k_, r, q = diagonal_decimation_map(n, k, d)
                diag = [A[m, m + n] for m in range(len(A) - n)]
                dec = diag[k::d][:L]
                block = A[k::d, r::d]
                assert dec == [block[m, m + q] for m in range(L)]


def test_system_matches_matrices(G):
    N = 128
    sysm = grigorchuk_diagonal_system(12, N)
    for n in range(13):
        for name in "BCD":
            assert sysm[(name, n)] == diagonal_series(G.generators[name.lower()], n, N, BIN2), (name, n)
        assert sysm[("A", n)] == diagonal_series(G.generators["a"], n, N, BIN2)
    assert all(sysm[("A", n)].is_zero() for n in range(2, 13))
    s = FpSeries.monomial(1, 2, N)
    assert sysm[("D", 0)] == sysm[("B", 0)] ** 2 + s * sysm[("I", 0)] ** 2
    assert verify_algebraic(sysm[("B", 1)], grigorchuk_relation("B", N))


def test_tilde_specialization(mats64):
    B1, C1, D1 = (diagonal_series(mats64[k], 1, 63) for k in "bcd")
    assert tilde_first_diagonals(B1, C1, D1)
    assert not tilde_first_diagonals(C1, B1, D1)


def test_closed_form_algebra():
    B1 = ClosedForm(0, 0, 1, 0)
    assert str(B1.square().times_s()) == "(s)*B1^2"
    assert str(B1) == "B1" and str(ClosedForm(0, 0, 0, 0)) == "0"
    a = ClosedForm.rational(1, 1)
    assert a + a == ClosedForm(0, 0, 0, 0)
    with pytest.raises(ValueError):
        B1 + B1.square()


def test_closed_forms_derived_and_fitted():
    N = 256
    sysm = grigorchuk_diagonal_system(6, N)
    big = grigorchuk_diagonal_system(6, 1024)
    derived = grigorchuk_closed_forms(6)
    B1 = sysm[("B", 1)]
    assert str(derived[("C", 1)]) == "(s)/(1 + s^4) + (s^3)*B1^4"
    for key, cf in derived.items():
        assert cf.series(big[("B", 1)]) == big[key]
        fitted = fit_closed_form(sysm[key], B1)
        assert fitted is not None and fitted.series(big[("B", 1)]) == big[key]
        assert fitted == cf


def test_fit_rejects_non_member():
    tm = series_of_sequence(thue_morse().prefix(128), 2)
    B1 = grigorchuk_diagonal_system(1, 128)[("B", 1)]
    assert fit_closed_form(tm, B1, max_k=3, max_l=3) is None


def _J(n):
    return FpMatrix(np.eye(n, dtype=np.int64) + np.eye(n, k=1, dtype=np.int64), 2)


def test_ts_examples():
    N = 32
    ones = rational([1], [1, 1], N)
    assert ones.shift(1) == ones.truncate(N - 1)
    J = TSPoly.from_matrix(_J(N + 3), N, 3)
    JJ = ts_mul(J, J)
    assert JJ[0].tolist() == [1] * (N - 2)
    assert JJ[1].is_zero()
    assert JJ[2].tolist() == [1] * (N - 2)


def test_ts_b_squared(mats64):
    b = TSPoly.from_matrix(mats64["b"], 56, 4)
    bb = ts_mul(b, b)
    assert bb[0].tolist() == [1] * bb.N
    assert all(bb[i].is_zero() for i in (1, 2, 3))


def test_ts_from_automatic_matrix(G):
    M = from_group_ring(G.generators["c"], BIN2)
    assert TSPoly.from_matrix(M, 32, 3) == TSPoly.from_matrix(level_matrix(G.generators["c"], 6, BIN2), 32, 3)


def _upper(rng, n, D):
    A = np.zeros((n, n), dtype=np.int64)
    for i in range(D):
        A += np.diag(rng.integers(0, 2, n - i), k=i)
    return FpMatrix(A, 2)


def test_ts_mul_matches_matrix_product_random(mats64):
    rng = np.random.default_rng(5)
    pool = dict(mats64)
    pool["J"] = _J(64)
    pool["I"] = FpMatrix.identity(64, 2)
    names = sorted(pool)
    N, D = 48, 5
    for _ in range(12):
        u, v, w = (pool[names[i]] for i in rng.integers(0, len(names), 3))
        tu, tv, tw = (TSPoly.from_matrix(X, N, D) for X in (u, v, w))
        prod = TSPoly.from_matrix(u @ v, N, D)
        got = ts_mul(tu, tv)
        assert all(got[i] == prod[i].truncate(got.N) for i in range(D))
        cut = lambda t: TSPoly(tuple(x.truncate(N - D + 1) for x in t.diagonals))
        left = ts_mul(ts_mul(tu, tv), cut(tw))
        right = ts_mul(cut(tu), ts_mul(tv, tw))
        assert all(left[i] == right[i].truncate(left.N) for i in range(D))
    # random upper-triangular matrices beyond the group generators
    for _ in range(5):
        u, v = _upper(rng, 64, 6), _upper(rng, 64, 6)
        got = ts_mul(TSPoly.from_matrix(u, N, 6), TSPoly.from_matrix(v, N, 6))
        ref = TSPoly.from_matrix(u @ v, N, 6)
        assert all(got[i] == ref[i].truncate(got.N) for i in range(6))
