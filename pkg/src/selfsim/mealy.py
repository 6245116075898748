"""Finite invertible Mealy automata acting on the rooted tree X*.

All states over an alphabet of size d live in one append-only table, a
:class:`Universe`, which is kept minimal: two stored states are never
bisimilar.  Products and inverses are built on demand as pair/inverse
automata, memoized, and merged into the table, so equality of finite-state
elements is equality of state ids.

An :class:`Element` is a word of stored states, read as a product acting on
the left: ``(g*h)(w) = g(h(w))``.
"""
from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

DEFAULT_CAP = 10_000
_SIG_DEPTH = 8


class ClosureCapError(RuntimeError):
    """A closure grew past the configured cap; finiteness is not established."""


class GroupFileError(ValueError):
    """Malformed group file or element expression."""


class Universe:
    """Minimal table of automaton states over the alphabet ``{0..d-1}``.

    State 0 is the identity.  ``perm[q][x]`` is the output letter and
    ``sec[q][x]`` the next state.
    """

    def __init__(self, d: int):
        if d < 2:
            raise ValueError("alphabet size must be at least 2")
        self.d = d
        self.perm: list[tuple[int, ...]] = []
        self.sec: list[tuple[int, ...]] = []
        self._sig: list[list[int]] = []
        self._by_sig: dict[int, list[int]] = {}
        self._pair: dict[tuple[int, int], int] = {}
        self._inv: dict[int, int] = {0: 0}
        self._lock = threading.RLock()
        self._arrays: tuple[np.ndarray, np.ndarray] | None = None
        self.names: dict[int, str] = {0: "1"}
        self._commit([tuple(range(d))], [(-1,) * d])

    def __len__(self) -> int:
        return len(self.perm)

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """``(perm, sec)`` as integer arrays of shape (states, d)."""
        with self._lock:
            if self._arrays is None or len(self._arrays[0]) != len(self.perm):
                self._arrays = (np.array(self.perm, dtype=np.int64), np.array(self.sec, dtype=np.int64))
            return self._arrays

    # -- insertion -----------------------------------------------------

    def _commit(self, perms: list[tuple[int, ...]], secs: list[tuple[int, ...]]) -> list[int]:
        """Merge a batch of states into the table and return their ids.

        Sections refer to stored states by id >= 0 and to batch member k
        by ``-(k + 1)``.
        """
        n = len(perms)
        K = _SIG_DEPTH
        sig = [[hash(pm)] for pm in perms]
        for lvl in range(1, K + 1):
            for k in range(n):
                ch = tuple(sig[-c - 1][lvl - 1] if c < 0 else self._sig[c][lvl - 1] for c in secs[k])
                sig[k].append(hash((perms[k], ch)))

        resolved: list[int | None] = [None] * n
        for k in range(n):
            if resolved[k] is not None:
                continue
            for cand in self._by_sig.get(sig[k][K], ()):
                match = self._bisimilar(-(k + 1), cand, perms, secs, resolved)
                if match is not None:
                    for loc, old in match.items():
                        resolved[-loc - 1] = old
                    break

        rest = [k for k in range(n) if resolved[k] is None]
        if rest:
            # none of these equals a stored state, so stored ids act as distinct atoms
            perm_class: dict[tuple[int, ...], int] = {}
            cls = {k: perm_class.setdefault(perms[k], len(perm_class)) for k in rest}
            count = len(perm_class)
            while True:
                table: dict[tuple, int] = {}
                new_cls = {}
                for k in rest:
                    key = (cls[k],) + tuple(self._atom(c, resolved, cls) for c in secs[k])
                    new_cls[k] = table.setdefault(key, len(table))
                cls = new_cls
                if len(table) == count:
                    break
                count = len(table)
            base = len(self.perm)
            class_id: dict[int, int] = {}
            reps = []
            for k in rest:
                if cls[k] not in class_id:
                    class_id[cls[k]] = base + len(reps)
                    reps.append(k)
            for k in rest:
                resolved[k] = class_id[cls[k]]
            for k in reps:
                sid = len(self.perm)
                self.perm.append(perms[k])
                self.sec.append(tuple(resolved[-c - 1] if c < 0 else c for c in secs[k]))
                self._sig.append(sig[k])
                self._by_sig.setdefault(sig[k][K], []).append(sid)
        return resolved  # type: ignore[return-value]

    @staticmethod
    def _atom(c: int, resolved, cls) -> tuple[int, int]:
        if c >= 0:
            return (0, c)
        r = resolved[-c - 1]
        if r is not None:
            return (0, r)
        return (1, cls[-c - 1])

    def _bisimilar(self, loc: int, old: int, perms, secs, resolved) -> dict[int, int] | None:
        mapping: dict[int, int] = {}
        stack = [(loc, old)]
        while stack:
            u, v = stack.pop()
            if u >= 0:
                if u != v:
                    return None
                continue
            r = resolved[-u - 1]
            if r is not None:
                if r != v:
                    return None
                continue
            if u in mapping:
                if mapping[u] != v:
                    return None
                continue
            if perms[-u - 1] != self.perm[v]:
                return None
            mapping[u] = v
            stack.extend(zip(secs[-u - 1], self.sec[v]))
        return mapping

    # -- group operations ----------------------------------------------

    def compose(self, i: int, j: int, cap: int = DEFAULT_CAP) -> int:
        """State id of the product ``i * j`` (j acts first)."""
        if i == 0:
            return j
        if j == 0:
            return i
        with self._lock:
            hit = self._pair.get((i, j))
            if hit is not None:
                return hit
            local: dict[tuple[int, int], int] = {}
            order: list[tuple[int, int]] = []

            def ref(u: int, v: int) -> int:
                if u == 0:
                    return v
                if v == 0:
                    return u
                r = self._pair.get((u, v))
                if r is not None:
                    return r
                k = local.get((u, v))
                if k is None:
                    if len(order) >= cap:
                        raise ClosureCapError(f"product closure exceeded {cap} states")
                    k = len(order)
                    local[(u, v)] = k
                    order.append((u, v))
                return -(k + 1)

            ref(i, j)
            perms, secs = [], []
            d = self.d
            idx = 0
            while idx < len(order):
                u, v = order[idx]
                pu, pv, su, sv = self.perm[u], self.perm[v], self.sec[u], self.sec[v]
                perms.append(tuple(pu[pv[x]] for x in range(d)))
                secs.append(tuple(ref(su[pv[x]], sv[x]) for x in range(d)))
                idx += 1
            ids = self._commit(perms, secs)
            for pair, k in local.items():
                self._pair[pair] = ids[k]
            return self._pair[(i, j)]

    def inverse(self, i: int, cap: int = DEFAULT_CAP) -> int:
        with self._lock:
            hit = self._inv.get(i)
            if hit is not None:
                return hit
            local: dict[int, int] = {}
            order: list[int] = []

            def ref(u: int) -> int:
                r = self._inv.get(u)
                if r is not None:
                    return r
                k = local.get(u)
                if k is None:
                    if len(order) >= cap:
                        raise ClosureCapError(f"inverse closure exceeded {cap} states")
                    k = len(order)
                    local[u] = k
                    order.append(u)
                return -(k + 1)

            ref(i)
            perms, secs = [], []
            idx = 0
            while idx < len(order):
                u = order[idx]
                pinv = invert_perm(self.perm[u])
                perms.append(pinv)
                secs.append(tuple(ref(self.sec[u][pinv[x]]) for x in range(self.d)))
                idx += 1
            ids = self._commit(perms, secs)
            for u, k in local.items():
                self._inv[u] = ids[k]
                self._inv[ids[k]] = u
            return self._inv[i]

    def closure(self, i: int, cap: int = DEFAULT_CAP) -> list[int]:
        """States reachable from i, in breadth-first order."""
        seen = {i: None}
        order = [i]
        idx = 0
        while idx < len(order):
            for c in self.sec[order[idx]]:
                if c not in seen:
                    if len(order) >= cap:
                        raise ClosureCapError(f"state closure exceeded {cap} states")
                    seen[c] = None
                    order.append(c)
            idx += 1
        return order

    def add_words(self, gens: Sequence[tuple[tuple[int, ...], Sequence[tuple]]],
                  words: Sequence[tuple], cap: int = DEFAULT_CAP) -> list[int]:
        """Insert states given by a wreath recursion whose sections are words.

        ``gens[k] = (perm, sections)`` where each section is a word of
        letters ``(generator index, +1 or -1)``.  Returns the ids of ``words``.
        """
        d = self.d
        ginv = [invert_perm(pm) for pm, _ in gens]

        def letter_step(letter, x):
            g, e = letter
            if e > 0:
                return gens[g][0][x], tuple(gens[g][1][x])
            y = ginv[g][x]
            return y, inverse_word(gens[g][1][y])

        with self._lock:
            local: dict[tuple, int] = {}
            order: list[tuple] = []

            def ref(w: tuple) -> int:
                w = free_reduce(w)
                if not w:
                    return 0
                k = local.get(w)
                if k is None:
                    if len(order) >= cap:
                        raise ClosureCapError(f"word closure exceeded {cap} states")
                    k = len(order)
                    local[w] = k
                    order.append(w)
                return -(k + 1)

            roots = [ref(tuple(w)) for w in words]
            perms, secs = [], []
            idx = 0
            while idx < len(order):
                w = order[idx]
                out, children = [], []
                for x in range(d):
                    parts = []
                    y = x
                    for letter in reversed(w):
                        y, s = letter_step(letter, y)
                        parts.append(s)
                    out.append(y)
                    children.append(ref(tuple(l for s in reversed(parts) for l in s)))
                if sorted(out) != list(range(d)):
                    raise GroupFileError(f"root action {out} is not a permutation")
                perms.append(tuple(out))
                secs.append(tuple(children))
                idx += 1
            ids = self._commit(perms, secs)
            return [r if r >= 0 else ids[-r - 1] for r in roots]


_UNIVERSES: dict[int, Universe] = {}
_REGISTRY_LOCK = threading.Lock()


def universe(d: int) -> Universe:
    """The shared state table for alphabet size d."""
    with _REGISTRY_LOCK:
        u = _UNIVERSES.get(d)
        if u is None:
            u = _UNIVERSES[d] = Universe(d)
        return u


def invert_perm(pm: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(pm)
    for x, y in enumerate(pm):
        out[y] = x
    return tuple(out)


def free_reduce(word: Iterable[tuple]) -> tuple:
    out: list = []
    for g, e in word:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def inverse_word(word: Sequence[tuple]) -> tuple:
    return tuple((g, -e) for g, e in reversed(word))


def rotation(d: int, k: int) -> tuple[int, ...]:
    return tuple((x + k) % d for x in range(d))


# ---------------------------------------------------------------------------
# elements


class Element:
    """A tree automorphism given as a product of stored states."""

    __slots__ = ("universe", "word", "name", "_cid")

    def __init__(self, uni: Universe, word: Sequence[int] = (), name: str | None = None):
        self.universe = uni
        self.word = tuple(int(s) for s in word if s != 0)
        self.name = name
        self._cid: int | None = None
        if not self.word:
            self._cid = 0
        elif len(self.word) == 1:
            self._cid = self.word[0]

    @classmethod
    def identity(cls, d: int) -> Element:
        return cls(universe(d), (), "1")

    @classmethod
    def of_state(cls, uni: Universe, sid: int) -> Element:
        return cls(uni, (sid,) if sid else ())

    @property
    def d(self) -> int:
        return self.universe.d

    def canonical(self, cap: int = DEFAULT_CAP) -> int:
        """Minimized state id; raises ClosureCapError if the product is too large."""
        if self._cid is None:
            cid = 0
            for s in self.word:
                cid = self.universe.compose(cid, s, cap)
            self._cid = cid
        return self._cid

    def key(self) -> tuple:
        try:
            return ("c", self.canonical())
        except ClosureCapError:
            return ("w", self.word)

    def _same_universe(self, other: Element):
        if not isinstance(other, Element):
            raise TypeError("expected an Element")
        if other.universe is not self.universe:
            raise ValueError("elements act on trees of different degree")

    def __mul__(self, other: Element) -> Element:
        return compose(self, other)

    def __pow__(self, k: int) -> Element:
        if k < 0:
            return inverse(self) ** (-k)
        out = Element(self.universe, ())
        base = self
        while k:
            if k & 1:
                out = compose(out, base)
            base = compose(base, base)
            k >>= 1
        return out

    def inverse(self) -> Element:
        return inverse(self)

    def __call__(self, w: Sequence[int]) -> tuple[int, ...]:
        return act(self, w)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Element):
            return NotImplemented
        return equal(self, other)

    def __hash__(self):
        return hash((id(self.universe), self.canonical()))

    def __repr__(self):
        if self.name:
            return self.name
        names = self.universe.names
        if self._cid is not None:
            return names.get(self._cid, f"q{self._cid}")
        return "*".join(names.get(s, f"q{s}") for s in self.word)


def _check_word(g: Element, w: Sequence[int]) -> tuple[int, ...]:
    w = tuple(int(x) for x in w)
    for x in w:
        if not 0 <= x < g.d:
            raise ValueError(f"letter {x} out of range for alphabet size {g.d}")
    return w


def _run_state(uni: Universe, q: int, w: Sequence[int]) -> tuple[list[int], int]:
    out = []
    perm, sec = uni.perm, uni.sec
    for x in w:
        out.append(perm[q][x])
        q = sec[q][x]
    return out, q


def act(g: Element, w: Sequence[int]) -> tuple[int, ...]:
    """Image of the finite word w."""
    w = _check_word(g, w)
    uni = g.universe
    states = (g._cid,) if g._cid is not None else g.word
    cur = list(w)
    for q in reversed(states):
        if q:
            cur, _ = _run_state(uni, q, cur)
    return tuple(cur)


def section(g: Element, v: Sequence[int]) -> Element:
    """The automorphism g|_v with g(vw) = g(v) g|_v(w)."""
    v = _check_word(g, v)
    uni = g.universe
    if g._cid is not None:
        _, q = _run_state(uni, g._cid, v)
        return Element.of_state(uni, q)
    word = list(g.word)
    for x in v:
        new = []
        y = x
        for q in reversed(word):
            new.append(uni.sec[q][y])
            y = uni.perm[q][y]
        word = [q for q in reversed(new) if q]
    return Element(uni, word)


def compose(g: Element, h: Element) -> Element:
    """The product gh, acting as ``g(h(w))``."""
    g._same_universe(h)
    name = f"{g.name}{h.name}" if g.name and h.name else None
    out = Element(g.universe, g.word + h.word, name)
    if g._cid is not None and h._cid is not None:
        try:
            out._cid = g.universe.compose(g._cid, h._cid)
            out.word = (out._cid,) if out._cid else ()
        except ClosureCapError:
            pass
    return out


def inverse(g: Element) -> Element:
    uni = g.universe
    name = None
    if g.name:
        if len(g.name) == 2 and g.name.endswith("'"):
            name = g.name[0]
        else:
            name = f"{g.name}'" if len(g.name) == 1 else f"({g.name})'"
    return Element(uni, [uni.inverse(q) for q in reversed(g.word)], name)


def equal(g: Element, h: Element, cap: int = DEFAULT_CAP) -> bool:
    """Exact equality of finite-state automorphisms.

    Raises :class:`ClosureCapError` when either element cannot be reduced to a
    stored state within ``cap`` new states.
    """
    g._same_universe(h)
    return g.canonical(cap) == h.canonical(cap)


def states_closure(g: Element, cap: int = DEFAULT_CAP) -> set[Element]:
    uni = g.universe
    return {Element.of_state(uni, q) for q in uni.closure(g.canonical(cap), cap)}


def root_perm(g: Element) -> tuple[int, ...]:
    return act_letterwise(g)


def act_letterwise(g: Element) -> tuple[int, ...]:
    return tuple(act(g, (x,))[0] for x in range(g.d))


def wreath_decompose(g: Element) -> tuple[tuple[int, ...], list[Element]]:
    return root_perm(g), [section(g, (x,)) for x in range(g.d)]


@dataclass(frozen=True)
class Portrait:
    depth: int
    labels: dict

    def __getitem__(self, v) -> tuple[int, ...]:
        return self.labels[tuple(v)]


def portrait(g: Element, n: int) -> Portrait:
    """Root permutations of all sections g|_v with |v| < n."""
    uni = g.universe
    q0 = g.canonical()
    labels = {}
    frontier = [((), q0)]
    for _ in range(n):
        nxt = []
        for v, q in frontier:
            labels[v] = uni.perm[q]
            nxt.extend((v + (x,), uni.sec[q][x]) for x in range(uni.d))
        frontier = nxt
    return Portrait(n, labels)


def is_rotation(pm: Sequence[int]) -> bool:
    d = len(pm)
    return all(pm[x] == (x + pm[0]) % d for x in range(d))


def is_in_Kp(g: Element) -> bool:
    """Every section acts on the first level by a power of the cycle (0 1 ... d-1)."""
    uni = g.universe
    return all(is_rotation(uni.perm[q]) for q in uni.closure(g.canonical()))


def level_permutation(g: Element, n: int) -> np.ndarray:
    """``out[m]`` is the index of g(v) where v is the word with index m.

    Words of length n are indexed little-endian: ``m = x1 + x2*d + ...``.
    """
    uni = g.universe
    d = uni.d
    N = d**n
    perm_a, sec_a = uni.arrays()
    idx = np.arange(N, dtype=np.int64)
    states = (g._cid,) if g._cid is not None else g.word
    for q in reversed(states):
        if not q:
            continue
        digits = [(idx // d**i) % d for i in range(n)]
        st = np.full(N, q, dtype=np.int64)
        new = np.zeros(N, dtype=np.int64)
        for i in range(n):
            new += perm_a[st, digits[i]] * d**i
            st = sec_a[st, digits[i]]
        idx = new
    return idx


# ---------------------------------------------------------------------------
# machines and group files


@dataclass(frozen=True)
class MealyMachine:
    """A finite automaton view: named states with transition and output maps."""

    d: int
    states: tuple[str, ...]
    transition: dict = field(repr=False)
    output: dict = field(repr=False)
    ids: dict = field(repr=False, compare=False)
    universe: Universe = field(repr=False, compare=False)

    def element(self, state: str) -> Element:
        return Element(self.universe, (self.ids[state],), state if state != "1" else None)

    def __len__(self):
        return len(self.states)


def machine_of(roots: dict[str, int], uni: Universe) -> MealyMachine:
    """Machine whose states are everything reachable from the named roots."""
    names: dict[int, str] = {0: "1"}
    for name, q in roots.items():
        names.setdefault(q, name)
    for name, q in list(roots.items()):
        qi = uni.inverse(q)
        names.setdefault(qi, f"{name}'")
    order: list[int] = []
    for q in [0] + list(roots.values()):
        for s in uni.closure(q):
            if s not in order:
                order.append(s)
    for s in order:
        names.setdefault(s, f"q{s}")
    transition, output = {}, {}
    for s in order:
        for x in range(uni.d):
            transition[(names[s], x)] = names[uni.sec[s][x]]
            output[(names[s], x)] = uni.perm[s][x]
    ids = {names[s]: s for s in order}
    ids.update(roots)
    return MealyMachine(uni.d, tuple(names[s] for s in order), transition, output, ids, uni)


_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_RESERVED = {"s", "p", "field"}


def _tokenize_word(text: str, names: Sequence[str]) -> list:
    """Tokens: names (longest match), '1', "'", '^', integers, parentheses."""
    tokens = []
    by_len = sorted(names, key=len, reverse=True)
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()'^*":
            tokens.append(c)
            i += 1
        elif c in "²³":
            tokens.extend(["^", 2 if c == "²" else 3])
            i += 1
        elif c == "-" or c in "0123456789":
            m = re.match(r"-?[0-9]+", text[i:])
            if not m:
                raise GroupFileError(f"bad token at {text[i:]!r}")
            tokens.append(int(m.group()))
            i += len(m.group())
        else:
            for nm in by_len:
                if text.startswith(nm, i):
                    tokens.append(("name", nm))
                    i += len(nm)
                    break
            else:
                raise GroupFileError(f"undefined name at {text[i:]!r}")
    return tokens


def parse_word(text: str, names: Sequence[str]) -> list[tuple[str, int]]:
    """Parse juxtaposed names with ``'`` (inverse), ``^k`` and parentheses.

    Returns a list of ``(name, +1 | -1)`` letters.
    """
    tokens = _tokenize_word(text, names)
    pos = 0

    def expr(closing: bool) -> list:
        nonlocal pos
        out: list = []
        while pos < len(tokens):
            t = tokens[pos]
            if t == ")":
                if not closing:
                    raise GroupFileError(f"unbalanced ')' in {text!r}")
                return out
            if t == "*":
                pos += 1
                continue
            out.extend(factor())
        if closing:
            raise GroupFileError(f"missing ')' in {text!r}")
        return out

    def factor() -> list:
        nonlocal pos
        t = tokens[pos]
        pos += 1
        if t == "(":
            base = expr(True)
            pos += 1
        elif t == 1:
            base = []
        elif isinstance(t, tuple):
            base = [(t[1], 1)]
        else:
            raise GroupFileError(f"unexpected token {t!r} in {text!r}")
        while pos < len(tokens) and tokens[pos] in ("'", "^"):
            if tokens[pos] == "'":
                base = [(g, -e) for g, e in reversed(base)]
                pos += 1
            else:
                if pos + 1 >= len(tokens) or not isinstance(tokens[pos + 1], int):
                    raise GroupFileError(f"'^' needs an integer exponent in {text!r}")
                k = tokens[pos + 1]
                pos += 2
                if k < 0:
                    base = [(g, -e) for g, e in reversed(base)]
                    k = -k
                base = base * k
        return base

    return expr(False)


def _parse_perm(text: str, d: int) -> tuple[tuple[int, ...], str]:
    text = text.strip()
    m = re.match(r"s(?:\s*\^\s*(-?\d+))?(?![A-Za-z0-9_])", text)
    if m:
        k = int(m.group(1)) if m.group(1) else 1
        return rotation(d, k), text[m.end():]
    if text.startswith("["):
        end = text.find("]")
        if end < 0:
            raise GroupFileError(f"unterminated permutation in {text!r}")
        imgs = tuple(int(t) for t in text[1:end].replace(",", " ").split())
        if sorted(imgs) != list(range(d)):
            raise GroupFileError(f"root action {list(imgs)} is not a permutation of 0..{d - 1}")
        return imgs, text[end + 1:]
    return tuple(range(d)), text


def _split_top(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for c in text:
        if c == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
            continue
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        cur.append(c)
    parts.append("".join(cur))
    return parts


@dataclass(frozen=True)
class GroupFile:
    machine: MealyMachine
    generators: dict

    def __iter__(self):
        return iter((self.machine, self.generators))

    @property
    def d(self) -> int:
        return self.machine.d

    def element(self, expr: str) -> Element:
        return parse_element(expr, self.generators)


def parse_group(text: str, cap: int = DEFAULT_CAP) -> GroupFile:
    """Parse a group file; unpacks as ``machine, generators``."""
    statements = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        statements.extend(s.strip() for s in line.split(";") if s.strip())
    d = None
    need_prime = False
    defs: list[tuple[str, str]] = []
    for st in statements:
        if st == "field":
            need_prime = True
            continue
        lhs, eq, rhs = st.partition("=")
        lhs = lhs.strip()
        if not eq:
            raise GroupFileError(f"expected '=' in {st!r}")
        if lhs == "p":
            try:
                d = int(rhs)
            except ValueError as exc:
                raise GroupFileError(f"bad alphabet size {rhs!r}") from exc
            continue
        if not _NAME.fullmatch(lhs) or lhs in _RESERVED:
            raise GroupFileError(f"bad generator name {lhs!r}")
        defs.append((lhs, rhs))
    if d is None:
        raise GroupFileError("missing 'p = <int>' line")
    if d < 2:
        raise GroupFileError("alphabet size must be at least 2")
    if need_prime:
        from .fp import is_prime
        if not is_prime(d):
            raise GroupFileError(f"field directive requires a prime, got {d}")
    names = [nm for nm, _ in defs]
    if len(set(names)) != len(names):
        raise GroupFileError("generator defined twice")
    index = {nm: i for i, nm in enumerate(names)}
    gens = []
    for nm, rhs in defs:
        pm, rest = _parse_perm(rhs, d)
        rest = rest.strip()
        if rest:
            if not (rest.startswith("(") and rest.endswith(")")):
                raise GroupFileError(f"bad section list {rest!r} for {nm}")
            items = _split_top(rest[1:-1])
            if len(items) != d:
                raise GroupFileError(f"{nm} needs {d} sections, got {len(items)}")
            secs = [tuple((index[g], e) for g, e in parse_word(w, names)) for w in items]
        else:
            secs = [()] * d
        gens.append((pm, secs))
    uni = universe(d)
    ids = uni.add_words(gens, [((i, 1),) for i in range(len(gens))], cap)
    roots = dict(zip(names, ids))
    machine = machine_of(roots, uni)
    for nm in machine.states:
        uni.names.setdefault(machine.ids[nm], nm)
    generators = {nm: Element(uni, (q,), nm) for nm, q in roots.items()}
    return GroupFile(machine, generators)


def parse_element(expr: str, generators: dict[str, Element]) -> Element:
    if not generators:
        raise GroupFileError("no generators")
    uni = next(iter(generators.values())).universe
    out = Element(uni, ())
    for nm, e in parse_word(expr, list(generators)):
        g = generators[nm]
        out = compose(out, g if e > 0 else inverse(g))
    out.name = "".join(expr.split()) or "1"
    return out


BUNDLED = {
    "grigorchuk": "grigorchuk.ssg",
    "grig": "grigorchuk.ssg",
    "adding": "adding.ssg",
    "adding3": "adding3.ssg",
    "gupta_sidki": "gupta_sidki.ssg",
    "gupta-sidki": "gupta_sidki.ssg",
}


def bundled_text(name: str) -> str:
    fname = BUNDLED.get(name, name)
    return resources.files("selfsim").joinpath("data", fname).read_text(encoding="utf-8")


def load_group(source: str | Path) -> GroupFile:
    """Load a group file from a path, or one of the bundled groups by name."""
    path = Path(source)
    if path.is_file():
        return parse_group(path.read_text(encoding="utf-8"))
    stem = path.name[:-4] if path.name.endswith(".ssg") else path.name
    if stem in BUNDLED:
        return parse_group(bundled_text(stem))
    raise FileNotFoundError(f"no group file {source!r} and no bundled group of that name")


def wreath_element(perm: Sequence[int], sections: Sequence[Element]) -> Element:
    """The automorphism ``perm (g_0, ..., g_{d-1})`` built from existing sections."""
    if not sections:
        raise ValueError("need at least one section")
    uni = sections[0].universe
    perm = tuple(int(x) for x in perm)
    if sorted(perm) != list(range(uni.d)) or len(sections) != uni.d:
        raise ValueError("need a permutation of X and one section per letter")
    ids = tuple(s.canonical() for s in sections)
    with uni._lock:
        q = uni._commit([perm], [ids])[0]
    return Element.of_state(uni, q)
