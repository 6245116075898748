import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from selfsim.fp import (
    Fp, FpMatrix, ReducedPoly, all_points, binomial_transition, is_prime, kron,
    poly_eval, reduced_interpolate, sylvester,
)


def test_fp_scalar_arithmetic():
    a = Fp(5, 7)
    assert a + 4 == 2
    assert a * a == Fp(4, 7)
    assert a.inverse() * a == 1
    assert -a == 2
    with pytest.raises(ValueError):
        Fp(1, 9)
    with pytest.raises(ValueError):
        Fp(1, 101)


def test_kron_identity_and_hand_expansion():
    I2 = FpMatrix.identity(2, 2)
    assert kron(I2, I2) == FpMatrix.identity(4, 2)
    T = FpMatrix([[1, 1], [1, 0]], 2)
    expected = [[1, 1, 1, 1], [1, 0, 1, 0], [1, 1, 0, 0], [1, 0, 0, 0]]
    assert kron(T, T).tolist() == expected
    assert kron(T, kron(T, T)) == kron(kron(T, T), T)


def test_kron_modulus_mismatch():
    with pytest.raises(ValueError):
        kron(FpMatrix.identity(2, 2), FpMatrix.identity(2, 3))


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
@settings(max_examples=40, deadline=None)
def test_kron_mixed_product(seed, p):
    rng = np.random.default_rng(seed)
    A, B, C, D = (FpMatrix(rng.integers(0, p, (n, n)), p) for n in (2, 3, 2, 3))
    assert kron(A, B) @ kron(C, D) == kron(A @ C, B @ D)


def test_binomial_transition_values():
    T, Tinv = binomial_transition(2)
    assert T.tolist() == [[1, 1], [1, 0]]
    assert Tinv.tolist() == [[0, 1], [1, 1]]
    T3, _ = binomial_transition(3)
    assert T3.tolist() == [[1, 2, 1], [1, 1, 0], [1, 0, 0]]
    with pytest.raises(ValueError):
        binomial_transition(4)


@pytest.mark.parametrize("p", [q for q in range(2, 24) if is_prime(q)])
def test_binomial_transition_inverse(p):
    T, Tinv = binomial_transition(p)
    assert (T @ Tinv).is_identity()
    assert (Tinv @ T).is_identity()
    assert T.inverse() == Tinv


def test_sylvester():
    assert sylvester(0).tolist() == [[1]]
    assert sylvester(1).tolist() == [[1, 1], [1, -1]]
    H = sylvester(3)
    assert (H.dot(H.T) == 8 * np.eye(8, dtype=object)).all()
    big = sylvester(6)
    assert set(big.flatten().tolist()) == {1, -1}


def test_matrix_inverse_and_rank():
    rng = np.random.default_rng(1)
    for p in (2, 3, 5):
        for _ in range(20):
            M = FpMatrix(rng.integers(0, p, (5, 5)), p)
            if M.rank() == 5:
                assert (M @ M.inverse()).is_identity()
            else:
                with pytest.raises(ZeroDivisionError):
                    M.inverse()


def test_float_and_integer_matmul_agree():
    rng = np.random.default_rng(2)
    a = rng.integers(0, 97, (40, 40))
    b = rng.integers(0, 97, (40, 40))
    M = FpMatrix(a, 97) @ FpMatrix(b, 97)
    assert np.array_equal(M.a, (a.astype(object).dot(b.astype(object)) % 97).astype(np.int64))


def test_reduced_interpolate_examples():
    assert reduced_interpolate([1, 1]) == ReducedPoly.constant(1, 2, 1)
    x = ReducedPoly.variable(1, 2)
    assert reduced_interpolate([1, 0]) == x + 1
    d1 = reduced_interpolate([0, 1, 0])
    assert [d1(t) for t in range(3)] == [0, 1, 0]
    x3 = ReducedPoly.variable(1, 3)
    assert d1 == 2 * x3 * x3 + 2 * x3
    with pytest.raises(ValueError):
        reduced_interpolate([0, 1, 0, 1])


@pytest.mark.parametrize("p", [2, 3])
def test_interpolate_evaluate_roundtrip(p):
    for values in itertools.product(range(p), repeat=p):
        f = reduced_interpolate(values)
        assert [f(t) for t in range(p)] == list(values)
        assert all(e[0] < p for e in f.terms)
    for coeffs in itertools.product(range(p), repeat=p):
        f = ReducedPoly(p, 1, {(k,): c for k, c in enumerate(coeffs)})
        assert reduced_interpolate([f(t) for t in range(p)]) == f


def test_reduction_rules():
    x = ReducedPoly.variable(1, 2)
    assert x * x == x
    y = ReducedPoly.variable(1, 3)
    sq = y * y
    assert sq * sq == sq
    f = ReducedPoly(3, 2, {(1, 2): 2, (0, 0): 1})
    assert f * 1 == f


def _random_poly(rng, p, n):
    terms = {}
    for _ in range(rng.randint(0, 6)):
        terms[tuple(rng.randrange(p) for _ in range(n))] = rng.randrange(p)
    return ReducedPoly(p, n, terms)


@pytest.mark.parametrize("p,n,exhaustive", [(2, 3, True), (3, 2, True), (3, 3, True), (5, 3, False)])
def test_product_is_pointwise(p, n, exhaustive):
    rng = random.Random(p * 10 + n)
    pts = list(all_points(p, n))
    if not exhaustive:
        pts = rng.sample(pts, 30)
    for _ in range(15):
        f, g = _random_poly(rng, p, n), _random_poly(rng, p, n)
        h = f * g
        s = f + g
        for pt in pts:
            assert poly_eval(h, pt) == f(*pt) * g(*pt) % p
            assert poly_eval(s, pt) == (f(*pt) + g(*pt)) % p


@pytest.mark.parametrize("p,n", [(2, 3), (3, 2), (5, 2)])
def test_table_roundtrip(p, n):
    rng = random.Random(7)
    for _ in range(10):
        f = _random_poly(rng, p, n)
        t = f.table()
        for pt in all_points(p, n):
            assert t[pt] == f(*pt)
        assert ReducedPoly.from_table(t, p) == f


def test_smaller_nvars_embeds_and_text():
    x1 = ReducedPoly.variable(1, 2)
    x2 = ReducedPoly.variable(2, 2)
    f = x1 * x2 + x1
    assert f.nvars == 2
    assert str(f) == "x1*x2 + x1"
    assert f.coefficient_vector().tolist() == [0, 1, 0, 1]
    with pytest.raises(ValueError):
        x1 + ReducedPoly.variable(1, 3)


def test_solve_consistent_and_inconsistent():
    rng = np.random.default_rng(11)
    for p in (2, 3, 5):
        A = FpMatrix(rng.integers(0, p, (7, 5)), p)
        x = rng.integers(0, p, 5)
        b = (A.a @ x) % p
        sol = A.solve(b)
        assert sol is not None and np.array_equal((A.a @ sol) % p, b)
    A = FpMatrix([[1, 1], [1, 1]], 2)
    assert A.solve([1, 0]) is None
