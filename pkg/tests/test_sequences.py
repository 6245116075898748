import itertools

import pytest
from hypothesis import given, strategies as st

from selfsim.mealy import load_group, parse_group
from selfsim.sequences import (
    KernelCapError, SequenceSystem, constant, decimate, interleave, kernel, mealy_run,
    mealy_to_moore, term, thue_morse, toeplitz_from_alpha,
)


def digit_sum_parity(n):
    return bin(n).count("1") % 2


def valuation(n, p):
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def test_thue_morse_terms():
    tm = thue_morse()
    assert tm.prefix(8) == [0, 1, 1, 0, 1, 0, 0, 1]
    assert "".join(map(str, tm.prefix(16))) == "0110100110010110"
    assert term(tm, 2**10) == 1
    assert all(term(tm, n) == digit_sum_parity(n) for n in range(2000))
    assert len(tm) == 2


def test_constant():
    z = constant(0)
    assert all(z.term(n) == 0 for n in (0, 1, 7, 12345))
    assert z.alphabet == {0}


def test_term_rejects_negative():
    with pytest.raises(ValueError):
        term(thue_morse(), -1)


def test_invalid_system():
    with pytest.raises(ValueError):
        SequenceSystem(2, ((0, 2),), (0,))
    with pytest.raises(ValueError):
        SequenceSystem(2, ((0,),), (0,))


def test_decimate_examples():
    assert decimate((0, 1, 2, 3, 4, 5), 2) == [(0, 2, 4), (1, 3, 5)]
    tm = thue_morse().prefix(64)
    even, odd = decimate(tm, 2)
    assert list(even) == tm[:32]
    assert list(odd) == [1 - x for x in tm[:32]]
    assert decimate((7,) * 9, 3) == [(7, 7, 7)] * 3
    with pytest.raises(ValueError):
        decimate((1,), 2)


@given(st.integers(2, 5), st.lists(st.integers(0, 9), min_size=0, max_size=40))
def test_decimate_interleave_roundtrip(d, seq):
    L = (len(seq) // d) * d
    if L == 0:
        return
    cut = tuple(seq[:L])
    assert interleave(decimate(cut, d)) == cut


def test_kernel_thue_morse_repredicts():
    K = kernel(digit_sum_parity, 2, 32)
    assert len(K) == 2
    assert all(term(K, n) == digit_sum_parity(n) for n in range(2**10, 2**10 + 101))
    assert len(kernel(lambda n: 0, 2, 8)) == 1


def test_kernel_cap():
    with pytest.raises(KernelCapError):
        kernel(lambda n: int(n**0.5) % 2, 2, 16, cap=10)


def _consistent(sys, limit=512):
    for s in sys.symbols:
        root = sys.rooted(s)
        for i in range(sys.d):
            child = root.rooted(sys.step[s][i])
            for n in range(limit // sys.d):
                try:
                    lhs = term(root, n * sys.d + i)
                except ValueError:
                    lhs = None
                try:
                    rhs = term(child, n)
                except ValueError:
                    rhs = None
                assert lhs == rhs


def test_term_step_consistency():
    b = toeplitz_from_alpha(([0], [1, 1, 0]), 2)
    g = toeplitz_from_alpha(([1, 2], [0, 2]), 3)
    for sys in (thue_morse(), constant(3, 3), kernel(digit_sum_parity, 2, 32), b, g):
        _consistent(sys)


def test_toeplitz_examples():
    a = toeplitz_from_alpha(([1], [0]), 2)
    assert a.prefix(8, start=1) == [1, 0, 1, 0, 1, 0, 1, 0]
    b = toeplitz_from_alpha(([0], [1, 1, 0]), 2)
    for k in range(4):
        for m in range(6):
            assert term(b, 2 ** (3 * k) * (2 * m + 1)) == 0
            assert term(b, 2 ** (3 * k + 1) * (2 * m + 1)) == 1
            assert term(b, 2 ** (3 * k + 2) * (2 * m + 1)) == 1
    z = toeplitz_from_alpha(([], [0]), 5)
    assert all(term(z, n) == 0 for n in range(1, 300))
    with pytest.raises(ValueError):
        term(a, 0)
    with pytest.raises(ValueError):
        toeplitz_from_alpha(([1], []), 2)


@given(st.integers(1, 10**6), st.lists(st.integers(0, 2), max_size=4),
       st.lists(st.integers(0, 2), min_size=1, max_size=4))
def test_toeplitz_matches_valuation(n, pre, per):
    sys = toeplitz_from_alpha((pre, per), 3)
    k = valuation(n, 3)
    seq = pre + per
    idx = k if k < len(seq) else len(pre) + (k - len(pre)) % len(per)
    assert term(sys, n) == seq[idx]


def _all_words(d, n):
    for k in range(n + 1):
        yield from itertools.product(range(d), repeat=k)


@pytest.mark.parametrize("name,root,size", [("adding", "a", 5), ("grigorchuk", "b", 11)])
def test_mealy_to_moore_word_function(name, root, size):
    grp = load_group(name)
    m = grp.machine
    M = mealy_to_moore(m, root)
    assert len(M) == size
    g = grp.generators[root]
    for w in _all_words(grp.d, 8):
        assert M.run(w) == mealy_run(m, root, w) == g(w)


def test_mealy_to_moore_identity_and_errors():
    m, _ = parse_group("p=3; e = (e, e, e)")
    M = mealy_to_moore(m, "1")
    for w in _all_words(3, 5):
        assert M.run(w) == w
    with pytest.raises(ValueError):
        mealy_to_moore(m, "zz")
