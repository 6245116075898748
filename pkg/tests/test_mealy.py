import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from selfsim.mealy import (
    ClosureCapError, Element, GroupFileError, Universe, act, compose, equal, inverse,
    is_in_Kp, level_permutation, load_group, parse_element, parse_group, portrait,
    section, states_closure, wreath_decompose,
)


# Independent oracles: the recursions written out as plain functions.
def grig(name, w):
    if not w or name == "1":
        return list(w)
    x, rest = w[0], list(w[1:])
    if name == "a":
        return [1 - x] + rest
    table = {"b": ("a", "c"), "c": ("a", "d"), "d": ("1", "b")}
    return [x] + grig(table[name][x], rest)


def add_one(w):
    n = sum(x << i for i, x in enumerate(w)) + 1
    return [(n >> i) & 1 for i in range(len(w))]


def words(d, n):
    for k in range(n + 1):
        yield from itertools.product(range(d), repeat=k)


@pytest.fixture(scope="module")
def G():
    return load_group("grigorchuk")


@pytest.fixture(scope="module")
def A():
    return load_group("adding")


def test_parse_examples():
    m, gens = parse_group("p=2; a = s (1, a)")
    assert len(m) == 2 and set(m.states) == {"1", "a"}
    m, gens = parse_group("p=2; a = s; b=(a,c); c=(a,d); d=(1,b)")
    assert len(m) == 5
    m, gens = parse_group("p=3; a = s; b=(a, a', b)")
    assert set(gens) == {"a", "b"}
    assert "a'" in m.states


def test_parse_errors():
    with pytest.raises(GroupFileError):
        parse_group("p=2; a = [0 0]")
    with pytest.raises(GroupFileError):
        parse_group("p=2; a = s (1, z)")
    with pytest.raises(GroupFileError):
        parse_group("p=4; field; a = s")
    with pytest.raises(GroupFileError):
        parse_group("a = s")
    with pytest.raises(GroupFileError):
        parse_group("p=2; a = s (1)")


def test_parse_permutation_forms_and_comments():
    text = """
    p = 3   # ternary
    a = s^2
    b = [1 0 2] (1, a, b)
    c = (a a', 1, (ab)^2)
    """
    m, g = parse_group(text)
    assert act(g["a"], (0, 1, 2)) == (2, 1, 2)
    assert act(g["b"], (2, 0)) == (2, 1)
    assert act(g["b"], (1, 0)) == (0, 2)
    assert section(g["c"], (0,)) == Element.identity(3)


def test_adding_machine_action(A):
    a = A.generators["a"]
    assert act(a, (1, 1, 0)) == (0, 0, 1)
    for w in words(2, 8):
        assert list(act(a, w)) == add_one(w)
    e = Element.identity(2)
    assert act(e, (1, 0, 1)) == (1, 0, 1)


def test_grigorchuk_action_matches_recursion(G):
    for name in "abcd":
        g = G.generators[name]
        for w in words(2, 7):
            assert list(act(g, w)) == grig(name, w)
    b = G.generators["b"]
    a = G.generators["a"]
    for w in itertools.product(range(2), repeat=5):
        if w[0] == 0:
            assert act(b, w) == (0,) + act(a, w[1:])


def test_sections(A):
    a = A.generators["a"]
    assert section(a, (0,)) == Element.identity(2)
    assert section(a, (1,)) == a
    assert section(a, ()) == a
    assert section(a * a, (0,)) == a


def test_section_law_on_words(G):
    rng = random.Random(3)
    gens = list(G.generators.values())
    for _ in range(30):
        g = Element(gens[0].universe, ())
        for _ in range(rng.randint(1, 6)):
            g = g * rng.choice(gens)
        v = tuple(rng.randrange(2) for _ in range(rng.randint(0, 4)))
        lazy = Element(g.universe, sum((h.word for h in [g]), ()))
        for w in words(2, 4):
            assert act(g, v + w) == act(g, v) + act(section(g, v), w)
        assert section(g, v) == section(lazy, v)


def test_compose_inverse_identities(G, A):
    a = A.generators["a"]
    e = Element.identity(2)
    assert compose(a, inverse(a)) == e
    a2 = a * a
    perm, secs = wreath_decompose(a2)
    assert perm == (0, 1) and secs[0] == a and secs[1] == a
    assert not equal(a2, e)
    assert act(a2, (0, 0)) == (0, 1)
    a_, b, c, d = (G.generators[k] for k in "abcd")
    for x in (a_, b, c, d, b * c * d):
        assert x * x == e
    assert equal(compose(b, compose(c, d)), e)
    for w in words(2, 10):
        assert act(b * c * d, w) == w


def test_wreath_decompose(A):
    a = A.generators["a"]
    perm, secs = wreath_decompose(a)
    assert perm == (1, 0) and secs[0] == Element.identity(2) and secs[1] == a
    perm, secs = wreath_decompose(Element.identity(2))
    assert perm == (0, 1) and all(s == Element.identity(2) for s in secs)


def test_states_closure(G, A):
    assert len(states_closure(A.generators["a"])) == 2
    assert states_closure(G.generators["b"]) == {G.element(x) for x in "abcd"} | {Element.identity(2)}
    assert states_closure(Element.identity(3)) == {Element.identity(3)}


def test_portrait_and_Kp(A, G):
    a = A.generators["a"]
    P = portrait(a, 2)
    assert P[()] == (1, 0) and P[(0,)] == (0, 1) and P[(1,)] == (1, 0)
    assert is_in_Kp(a) and is_in_Kp(G.generators["a"])
    m, g = parse_group("p=3; t = [1 0 2]")
    assert not is_in_Kp(g["t"])


def _random_element(rng, gens, length):
    uni = gens[0].universe
    g = Element(uni, ())
    for _ in range(length):
        h = rng.choice(gens)
        g = g * (h if rng.random() < 0.5 else inverse(h))
    return g


@given(st.integers(0, 10**9), st.sampled_from(["grigorchuk", "adding", "gupta_sidki", "adding3"]))
@settings(max_examples=40, deadline=None)
def test_action_is_monoid_action(seed, name):
    grp = load_group(name)
    rng = random.Random(seed)
    gens = list(grp.generators.values())
    g = _random_element(rng, gens, rng.randint(0, 6))
    h = _random_element(rng, gens, rng.randint(0, 6))
    d = grp.d
    for w in words(d, 5 if d == 2 else 3):
        assert act(g * h, w) == act(g, act(h, w))
        assert act(inverse(g), act(g, w)) == w
        assert act(g, w[:2]) == act(g, w)[:2]
    v1 = tuple(rng.randrange(d) for _ in range(2))
    v2 = tuple(rng.randrange(d) for _ in range(2))
    assert section(g, v1 + v2) == section(section(g, v1), v2)


@pytest.mark.parametrize("name", ["grigorchuk", "adding", "gupta_sidki"])
def test_equal_agrees_with_exhaustive_action(name):
    grp = load_group(name)
    rng = random.Random(11)
    gens = list(grp.generators.values())
    n = 10 if grp.d == 2 else 6
    all_w = list(itertools.product(range(grp.d), repeat=n))
    elems = [_random_element(rng, gens, rng.randint(0, 5)) for _ in range(12)]
    for g, h in itertools.combinations(elems, 2):
        same = all(act(g, w) == act(h, w) for w in all_w)
        assert equal(g, h) == same


def test_cap_error_is_distinct():
    uni = Universe(2)
    # two odometer-like machines on a private table, so nothing is memoized yet
    gens = [((1, 0), [(), ((0, 1),)]), ((0, 1), [((0, 1),), ((1, 1),)])]
    a, b = uni.add_words(gens, [((0, 1),), ((1, 1),)])
    g = Element(uni, (a, b, a, b))
    assert g.key()[0] == "c"
    h = Element(uni, (b, a, b, b, a))
    with pytest.raises(ClosureCapError):
        h.canonical(cap=1)
    assert h._cid is None
    assert h.canonical() is not None


def test_level_permutation_matches_act(G):
    g = G.element("abcab")
    n = 5
    perm = level_permutation(g, n)
    for m in range(2**n):
        w = tuple((m >> i) & 1 for i in range(n))
        img = act(g, w)
        assert perm[m] == sum(x << i for i, x in enumerate(img))


def test_element_expressions(G):
    a, d = G.generators["a"], G.generators["d"]
    assert G.element("(ad)^4") == Element.identity(2)
    assert G.element("(ad)²") != Element.identity(2)
    assert G.element("a d a'") == a * d * a
    assert parse_element("b'", G.generators) == G.generators["b"]
