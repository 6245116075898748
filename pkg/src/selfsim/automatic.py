"""Infinite column-finite automatic matrices stored as finite decimation systems.

An :class:`AutoMatrix` has symbols ``0..S-1``.  Symbol s denotes an infinite
matrix M_s with ``M_s[0, 0] = corner[s]`` and
``M_s[d*m + i, d*n + j] = M_{dec[s, i, j]}[m, n]``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Hashable, Sequence

import numpy as np

from .fp import FpMatrix
from .mealy import Element, section
from .recursion import GroupRingElem, MarkedBasis, as_group_ring, xi_in_basis

DEFAULT_CAP = 20_000


class AutomaticCapError(RuntimeError):
    """Raised when a decimation closure exceeds its symbol cap."""


class NotColumnFiniteError(ValueError):
    """A product needed an infinite sum (some factor is not column-finite)."""


class AutoMatrix:
    __slots__ = ("p", "d", "dec", "corner", "root", "labels", "_zero_col")

    def __init__(self, p: int, d: int, dec, corner, root: int = 0, labels: Sequence | None = None):
        self.p, self.d = p, d
        self.dec = np.asarray(dec, dtype=np.int64).reshape(-1, d, d)
        self.corner = np.asarray(corner, dtype=np.int64) % p
        self.root = int(root)
        self.labels = list(labels) if labels is not None else None
        self._zero_col = None
        S = len(self.corner)
        if self.dec.shape[0] != S or not 0 <= self.root < S:
            raise ValueError("inconsistent symbol tables")
        if self.dec.size and (self.dec.min() < 0 or self.dec.max() >= S):
            raise ValueError("decimation refers to an unknown symbol")
        # entry(s, 0, 0) must agree with the corner of its (0,0) decimation
        if np.any(self.corner[self.dec[:, 0, 0]] != self.corner):
            raise ValueError("corner is not stable under (0,0) decimation")

    # construction -------------------------------------------------------
    @classmethod
    def from_closure(cls, p: int, d: int, root: Hashable,
                     step: Callable[[Hashable], Sequence[Sequence[Hashable]]],
                     corner: Callable[[Hashable], int], cap: int = DEFAULT_CAP) -> AutoMatrix:
        """Breadth-first closure of ``root`` under ``step``; keys must be hashable."""
        index = {root: 0}
        keys = [root]
        dec = []
        k = 0
        while k < len(keys):
            block = step(keys[k])
            row = []
            for i in range(d):
                r = []
                for j in range(d):
                    key = block[i][j]
                    s = index.get(key)
                    if s is None:
                        if len(keys) >= cap:
                            raise AutomaticCapError(f"more than {cap} symbols")
                        s = index[key] = len(keys)
                        keys.append(key)
                    r.append(s)
                row.append(r)
            dec.append(row)
            k += 1
        return cls(p, d, dec, [corner(key) % p for key in keys], 0, keys)

    @classmethod
    def zero(cls, p: int, d: int | None = None) -> AutoMatrix:
        d = d or p
        return cls(p, d, np.zeros((1, d, d)), [0], 0, ["0"])

    @classmethod
    def identity(cls, p: int, d: int | None = None) -> AutoMatrix:
        d = d or p
        dec = np.zeros((2, d, d), dtype=np.int64)
        for i in range(d):
            dec[1, i, i] = 1
        return cls(p, d, dec, [0, 1], 1, ["0", "I"])

    # basic structure ----------------------------------------------------
    def __len__(self) -> int:
        return len(self.corner)

    @property
    def symbols(self) -> range:
        return range(len(self.corner))

    def rooted(self, s: int) -> AutoMatrix:
        return AutoMatrix(self.p, self.d, self.dec, self.corner, s, self.labels)

    def decimations(self) -> list[list[AutoMatrix]]:
        d, r = self.d, self.root
        return [[self.rooted(int(self.dec[r, i, j])) for j in range(d)] for i in range(d)]

    def entry(self, m: int, n: int) -> int:
        if m < 0 or n < 0:
            raise ValueError("indices must be non-negative")
        s = self.root
        while m or n:
            m, i = divmod(m, self.d)
            n, j = divmod(n, self.d)
            s = self.dec[s, i, j]
        return int(self.corner[s])

    def __getitem__(self, mn) -> int:
        return self.entry(*mn)

    def _blocks(self, k: int) -> Callable[[int], np.ndarray]:
        d, dec, corner = self.d, self.dec, self.corner

        @lru_cache(maxsize=None)
        def block(s: int, level: int) -> np.ndarray:
            if level == 0:
                return np.array([[corner[s]]], dtype=np.int64)
            size = d ** level
            out = np.empty((size, size), dtype=np.int64)
            for i in range(d):
                for j in range(d):
                    out[i::d, j::d] = block(int(dec[s, i, j]), level - 1)
            return out

        return lambda s: block(s, k)

    def truncate(self, rows: int, cols: int | None = None) -> FpMatrix:
        """Top-left ``rows x cols`` corner assembled from decimation blocks."""
        cols = rows if cols is None else cols
        if rows < 0 or cols < 0:
            raise ValueError("sizes must be non-negative")
        k = 0
        while self.d ** k < max(rows, cols, 1):
            k += 1
        if self.d ** (2 * k) > 1 << 26:
            raise ValueError("truncation too large")
        full = self._blocks(k)(self.root)
        return FpMatrix(full[:rows, :cols], self.p)

    def truncate_by_entries(self, rows: int, cols: int | None = None) -> FpMatrix:
        cols = rows if cols is None else cols
        return FpMatrix([[self.entry(m, n) for n in range(cols)] for m in range(rows)], self.p)

    # equality and minimization -----------------------------------------
    def __eq__(self, other) -> bool:
        if not isinstance(other, AutoMatrix):
            return NotImplemented
        if (self.p, self.d) != (other.p, other.d):
            return False
        seen = {(self.root, other.root)}
        todo = [(self.root, other.root)]
        while todo:
            s, t = todo.pop()
            if self.corner[s] != other.corner[t]:
                return False
            for i in range(self.d):
                for j in range(self.d):
                    pair = (int(self.dec[s, i, j]), int(other.dec[t, i, j]))
                    if pair not in seen:
                        seen.add(pair)
                        todo.append(pair)
        return True

    __hash__ = None

    def minimized(self) -> AutoMatrix:
        """Reachable part with bisimilar symbols merged (Moore refinement)."""
        reach = [self.root]
        seen = {self.root}
        for s in reach:
            for t in self.dec[s].ravel():
                t = int(t)
                if t not in seen:
                    seen.add(t)
                    reach.append(t)
        pos = {s: k for k, s in enumerate(reach)}
        dec = np.array([[[pos[int(t)] for t in row] for row in self.dec[s]] for s in reach],
                       dtype=np.int64).reshape(len(reach), self.d, self.d)
        corner = self.corner[reach]
        cls_ = corner.copy()
        while True:
            sig = np.concatenate([cls_[:, None], cls_[dec].reshape(len(reach), -1)], axis=1)
            _, new = np.unique(sig, axis=0, return_inverse=True)
            new = new.ravel()
            if len(set(new.tolist())) == len(set(cls_.tolist())):
                break
            cls_ = new
        # renumber classes in first-seen order so the root is symbol 0
        order: dict[int, int] = {}
        for c in cls_.tolist():
            order.setdefault(c, len(order))
        ids = np.array([order[c] for c in cls_.tolist()], dtype=np.int64)
        n = len(order)
        mdec = np.zeros((n, self.d, self.d), dtype=np.int64)
        mcorner = np.zeros(n, dtype=np.int64)
        labels = [None] * n
        for k, s in enumerate(reach):
            c = ids[k]
            mdec[c] = ids[dec[k]]
            mcorner[c] = corner[k]
            if labels[c] is None and self.labels is not None:
                labels[c] = self.labels[s]
        return AutoMatrix(self.p, self.d, mdec, mcorner, 0, labels if self.labels is not None else None)

    # column-finiteness helpers -----------------------------------------
    def zero_column_symbols(self) -> frozenset:
        """Symbols whose column 0 vanishes (greatest fixpoint)."""
        if self._zero_col is None:
            Z = set(np.flatnonzero(self.corner == 0).tolist())
            changed = True
            while changed:
                changed = False
                for s in list(Z):
                    if any(int(self.dec[s, i, 0]) not in Z for i in range(self.d)):
                        Z.discard(s)
                        changed = True
            self._zero_col = frozenset(Z)
        return self._zero_col

    # algebra ------------------------------------------------------------
    def _check_compatible(self, other: AutoMatrix):
        if (self.p, self.d) != (other.p, other.d):
            raise ValueError("matrices over different fields or arities")

    def __add__(self, other: AutoMatrix) -> AutoMatrix:
        return add(self, other)

    def __sub__(self, other: AutoMatrix) -> AutoMatrix:
        return add(self, other.scale(-1))

    def __matmul__(self, other: AutoMatrix) -> AutoMatrix:
        return mul(self, other)

    def scale(self, c: int) -> AutoMatrix:
        c %= self.p
        if c == 0:
            return AutoMatrix.zero(self.p, self.d)
        return AutoMatrix(self.p, self.d, self.dec, self.corner * c, self.root, self.labels)

    def transpose(self) -> AutoMatrix:
        return AutoMatrix(self.p, self.d, self.dec.transpose(0, 2, 1), self.corner, self.root, self.labels)

    @property
    def T(self) -> AutoMatrix:
        return self.transpose()

    def is_identity(self) -> bool:
        return self == AutoMatrix.identity(self.p, self.d)

    def __repr__(self):
        return f"AutoMatrix(p={self.p}, d={self.d}, symbols={len(self)})"


def add(A: AutoMatrix, B: AutoMatrix, cap: int = DEFAULT_CAP) -> AutoMatrix:
    A._check_compatible(B)
    d = A.d

    def step(st):
        s, t = st
        return [[(int(A.dec[s, i, j]), int(B.dec[t, i, j])) for j in range(d)] for i in range(d)]

    return AutoMatrix.from_closure(A.p, d, (A.root, B.root), step,
                                   lambda st: int(A.corner[st[0]] + B.corner[st[1]]), cap).minimized()


def _pair_corner(A: AutoMatrix, B: AutoMatrix) -> Callable[[int, int], int]:
    """``(M_s M_t)[0, 0]`` computed from the tables, memoized per pair.

    Writing k = d^j (d k' + r) with r != 0, the sum over k splits along the
    (0,0)-decimation chain of (s, t); on the chain's cycle every term must
    vanish, which holds exactly when the relevant columns of B are zero.
    """
    d, p = A.d, A.p
    Z = B.zero_column_symbols()
    memo: dict[tuple[int, int], int] = {}
    active: set[tuple[int, int]] = set()

    def c(s: int, t: int) -> int:
        if t in Z:
            return 0
        key = (s, t)
        if key in memo:
            return memo[key]
        if key in active:
            raise NotColumnFiniteError("product corner is an infinite sum")
        active.add(key)
        total = int(A.corner[s] * B.corner[t])
        chain: dict[tuple[int, int], int] = {}
        cur = key
        while cur not in chain:
            chain[cur] = len(chain)
            cs, ct = cur
            for r in range(1, d):
                sr, tr = int(A.dec[cs, 0, r]), int(B.dec[ct, r, 0])
                if tr in Z:
                    continue
                # a term on the cycle would repeat forever
                total += c(sr, tr)
            cur = (int(A.dec[cs, 0, 0]), int(B.dec[ct, 0, 0]))
        start = chain[cur]
        for (cs, ct), pos in chain.items():
            if pos >= start and any(int(B.dec[ct, r, 0]) not in Z for r in range(1, d)):
                active.discard(key)
                raise NotColumnFiniteError("product corner is an infinite sum")
        active.discard(key)
        memo[key] = total % p
        return memo[key]

    return c


def mul(A: AutoMatrix, B: AutoMatrix, cap: int = DEFAULT_CAP) -> AutoMatrix:
    """Matrix product; symbols are F_p-combinations of pairs ``(s, t)``."""
    A._check_compatible(B)
    d, p = A.d, A.p
    pc = _pair_corner(A, B)

    def norm(terms: dict) -> tuple:
        return tuple(sorted((k, v % p) for k, v in terms.items() if v % p))

    def step(combo):
        out = []
        for i in range(d):
            row = []
            for j in range(d):
                acc: dict = {}
                for (s, t), c in combo:
                    for r in range(d):
                        key = (int(A.dec[s, i, r]), int(B.dec[t, r, j]))
                        acc[key] = acc.get(key, 0) + c
                row.append(norm(acc))
            out.append(row)
        return out

    def corner(combo) -> int:
        return sum(c * pc(s, t) for (s, t), c in combo)

    root = norm({(A.root, B.root): 1})
    return AutoMatrix.from_closure(p, d, root, step, corner, cap).minimized()


def linear_combination(terms: Sequence[tuple[int, AutoMatrix]], p: int, d: int | None = None) -> AutoMatrix:
    acc = AutoMatrix.zero(p, d)
    for c, M in terms:
        acc = add(acc, M.scale(c))
    return acc


def product(mats: Sequence[AutoMatrix], p: int, d: int | None = None) -> AutoMatrix:
    acc = AutoMatrix.identity(p, d)
    for M in mats:
        acc = mul(acc, M)
    return acc


# group rings ---------------------------------------------------------------

def _require_marked(B: MarkedBasis):
    if not B.marked:
        raise ValueError("an infinite matrix needs a basis whose first vector is constant")


def group_ring_closure(a, B: MarkedBasis, cap: int = DEFAULT_CAP) -> list[GroupRingElem]:
    """All entries reachable from ``a`` under the basis-B recursion.

    Works for any basis; a finite result means a is automatic in that basis.
    """
    a = as_group_ring(a, B.p)
    seen = {a: None}
    queue = deque([a])
    while queue:
        x = queue.popleft()
        M = xi_in_basis(x, B)
        for i in range(B.d):
            for j in range(B.d):
                y = M[i, j]
                if y not in seen:
                    if len(seen) >= cap:
                        raise AutomaticCapError(f"more than {cap} symbols")
                    seen[y] = None
                    queue.append(y)
    return list(seen)


def from_group_ring(a, B: MarkedBasis, cap: int = DEFAULT_CAP) -> AutoMatrix:
    _require_marked(B)
    a = as_group_ring(a, B.p)
    d = B.d

    def step(x):
        M = xi_in_basis(x, B)
        return [[M[i, j] for j in range(d)] for i in range(d)]

    return AutoMatrix.from_closure(B.p, d, a, step, lambda x: x.augmentation(), cap)


# shift operators -------------------------------------------------------------

def selection(k: int, p: int, d: int | None = None) -> AutoMatrix:
    """E_k: ones at (d*m + k, m)."""
    d = d or p
    if not 0 <= k < d:
        raise ValueError("selection index out of range")
    # symbols: 0 -> zero, 1 + j -> E_j
    dec = np.zeros((d + 1, d, d), dtype=np.int64)
    for j in range(d):
        dec[1 + j, j, :] = 1 + np.arange(d)
    corner = [0, 1] + [0] * (d - 1)
    return AutoMatrix(p, d, dec, corner, 1 + k, ["0"] + [f"E{j}" for j in range(d)])


def shift_operators(B: MarkedBasis) -> tuple[list[AutoMatrix], list[AutoMatrix]]:
    """``T_i = sum_m Sinv[m, i] E_m`` and ``T_i' = sum_l S[i, l] E_l^T``."""
    p, d = B.p, B.d
    S, Si = B.matrix.a, B.inverse_matrix.a
    E = [selection(k, p, d) for k in range(d)]
    Et = [e.transpose() for e in E]
    T = [linear_combination([(int(Si[m, i]), E[m]) for m in range(d)], p, d) for i in range(d)]
    Tp = [linear_combination([(int(S[i, l]), Et[l]) for l in range(d)], p, d) for i in range(d)]
    return T, Tp


def recompose(blocks: Sequence[Sequence[AutoMatrix]], p: int) -> AutoMatrix:
    """``sum_{i,j} E_i A_ij E_j'``."""
    d = len(blocks)
    E = [selection(k, p, d) for k in range(d)]
    terms = [(1, product([E[i], blocks[i][j], E[j].transpose()], p, d))
             for i in range(d) for j in range(d)]
    return linear_combination(terms, p, d)


# Thompson-type elements ---------------------------------------------------------

Word = tuple[int, ...]


def _is_complete_code(code: Sequence[Word], d: int) -> bool:
    if len(set(code)) != len(code):
        return False
    for u in code:
        if any(x < 0 or x >= d for x in u):
            return False
        for v in code:
            if u != v and v[:len(u)] == u:
                return False
    return sum(Fraction(1, d ** len(u)) for u in code) == 1


def _reduce_pairs(pairs: Sequence[tuple[Word, Word]], d: int) -> tuple[tuple[Word, Word], ...]:
    """Merge complete sibling families ``(v x, u x)`` into ``(v, u)``."""
    cur = set(pairs)
    changed = True
    while changed:
        changed = False
        by_parent: dict[tuple[Word, Word], set] = {}
        for v, u in cur:
            if v and u and v[-1] == u[-1]:
                by_parent.setdefault((v[:-1], u[:-1]), set()).add(v[-1])
        for (v, u), letters in by_parent.items():
            if len(letters) == d:
                for x in range(d):
                    cur.discard((v + (x,), u + (x,)))
                cur.add((v, u))
                changed = True
                break
    return tuple(sorted(cur))


@dataclass(frozen=True)
class ThompsonElement:
    """Homeomorphism ``v_i w -> u_i w`` given by two complete prefix codes."""

    d: int
    domain: tuple[Word, ...]
    range: tuple[Word, ...]

    def __post_init__(self):
        dom = tuple(tuple(v) for v in self.domain)
        rng = tuple(tuple(u) for u in self.range)
        if len(dom) != len(rng):
            raise ValueError("codes of different sizes")
        if not (_is_complete_code(dom, self.d) and _is_complete_code(rng, self.d)):
            raise ValueError("not a complete prefix code")
        pairs = _reduce_pairs(list(zip(dom, rng)), self.d)
        object.__setattr__(self, "domain", tuple(v for v, _ in pairs))
        object.__setattr__(self, "range", tuple(u for _, u in pairs))

    @classmethod
    def identity(cls, d: int) -> ThompsonElement:
        return cls(d, ((),), ((),))

    @property
    def pairs(self) -> tuple[tuple[Word, Word], ...]:
        return tuple(zip(self.domain, self.range))

    def __call__(self, w: Sequence[int]) -> Word:
        w = tuple(w)
        for v, u in self.pairs:
            if w[:len(v)] == v:
                return u + w[len(v):]
        raise ValueError("word too short to determine the image")


def thompson_inverse(t: ThompsonElement) -> ThompsonElement:
    return ThompsonElement(t.d, t.range, t.domain)


def thompson_compose(s: ThompsonElement, t: ThompsonElement) -> ThompsonElement:
    """``s o t``: apply t first."""
    if s.d != t.d:
        raise ValueError("different alphabets")
    out = []
    for v, u in t.pairs:
        for v2, u2 in s.pairs:
            if v2[:len(u)] == u:
                out.append((v + v2[len(u):], u2))
            elif u[:len(v2)] == v2:
                out.append((v, u2 + u[len(v2):]))
    return ThompsonElement(t.d, tuple(v for v, _ in out), tuple(u for _, u in out))


def thompson_operator(t: ThompsonElement, B: MarkedBasis) -> AutoMatrix:
    """``L = sum_i T_{u_i} T'_{v_i}`` with ``T_u = T_{u1}...T_{uk}`` and ``T'_v = T'_{vk}...T'_{v1}``."""
    if B.d != t.d:
        raise ValueError("basis and element disagree on the alphabet")
    T, Tp = shift_operators(B)
    p = B.p
    terms = []
    for v, u in t.pairs:
        terms.append((1, product([T[x] for x in u] + [Tp[x] for x in reversed(v)], p, B.d)))
    return linear_combination(terms, p, B.d)


# partial prefix maps -------------------------------------------------------------

EMPTY = ("empty",)


def _restrict(pairs: tuple, u: Word, v: Word, d: int) -> tuple:
    """Pairs of ``w -> w'`` where ``psi(v w) = u w'``."""
    local = []
    for a, b in pairs:
        if a[:len(v)] == v:
            local.append((a[len(v):], b))
        elif v[:len(a)] == a:
            local.append(((), b + v[len(a):]))
    out = []
    for a, b in local:
        if b[:len(u)] == u:
            out.append((a, b[len(u):]))
        elif u[:len(b)] == b:
            out.append((a + u[len(b):], ()))
    return _reduce_pairs(out, d)


def psi_closure(h, cap: int = 10_000) -> set:
    """All partial maps ``psi_{u,v}`` with ``|u| = |v|``, up to equality.

    Tree automorphisms yield their sections (as canonical Elements) plus
    ``EMPTY``; Thompson elements yield reduced pair tuples, with ``()`` empty.
    """
    if isinstance(h, Element):
        d, uni = h.universe.d, h.universe
        root = Element.of_state(uni, h.canonical())

        def children(g):
            if g == EMPTY:
                return [EMPTY]
            # psi_{x,y} is g|_y when g(y) = x and empty otherwise
            return [EMPTY] + [Element.of_state(uni, section(g, (y,)).canonical()) for y in range(d)]
    elif isinstance(h, ThompsonElement):
        d = h.d
        root = h.pairs

        def children(m):
            return [_restrict(m, (x,), (y,), d) for x in range(d) for y in range(d)]
    else:
        raise TypeError("expected an Element or a ThompsonElement")
    seen = {root}
    queue = deque([root])
    while queue:
        for nxt in children(queue.popleft()):
            if nxt not in seen:
                if len(seen) >= cap:
                    raise AutomaticCapError(f"more than {cap} partial maps")
                seen.add(nxt)
                queue.append(nxt)
    if isinstance(h, ThompsonElement):
        return {EMPTY if m == () else m for m in seen}
    return seen


# images ----------------------------------------------------------------------------

def _grid(M, N: int | None):
    if isinstance(M, AutoMatrix):
        if N is None:
            raise ValueError("size required for an infinite matrix")
        return M.p, M.truncate(N).a
    if isinstance(M, FpMatrix):
        a = M.a
    else:
        raise TypeError("expected an AutoMatrix or FpMatrix")
    if N is not None:
        a = a[:N, :N]
    return M.p, a


def render(M, N: int | None = None) -> str:
    """PBM (P1) for p = 2, PGM (P2, maxval p-1) otherwise."""
    if N is not None and N < 1:
        raise ValueError("N must be positive")
    p, a = _grid(M, N)
    rows, cols = a.shape
    lines = [f"{cols} {rows}"]
    if p == 2:
        lines.insert(0, "P1")
    else:
        lines[0:0] = ["P2"]
        lines.append(str(p - 1))
    lines.extend(" ".join(str(int(x)) for x in row) for row in a)
    return "\n".join(lines) + "\n"


def read_image(text: str) -> tuple[int, np.ndarray]:
    """Parse P1/P2 text; returns (maxval, array)."""
    tokens = [t for line in text.splitlines() for t in line.split("#", 1)[0].split()]
    if not tokens or tokens[0] not in ("P1", "P2"):
        raise ValueError("not a plain PBM/PGM image")
    cols, rows = int(tokens[1]), int(tokens[2])
    if tokens[0] == "P1":
        maxval, data = 1, tokens[3:]
    else:
        maxval, data = int(tokens[3]), tokens[4:]
    if len(data) != rows * cols:
        raise ValueError("pixel count does not match the header")
    return maxval, np.array([int(x) for x in data], dtype=np.int64).reshape(rows, cols)


def to_csv(M, N: int | None = None) -> str:
    _, a = _grid(M, N)
    return "\n".join(",".join(str(int(x)) for x in row) for row in a) + "\n"
