"""Matrix recursions over the group ring F_p[G] and level representations.

Indexing convention used throughout: the row/column index ``m`` of a level-n
matrix corresponds to the tensor product of basis vectors given by the
base-d digits of m, least significant digit first (inverse lexicographic
order).  With this ordering ``L_n[i::d, j::d] = L_{n-1}(Xi(a)[i][j])``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .fp import FpMatrix, binomial_transition, check_prime, kron_power
from .mealy import Element, Universe, section

MAX_LEVEL_SIZE = 2**16


class GroupRingElem:
    """Finite F_p-linear combination of tree automorphisms."""

    __slots__ = ("p", "d", "terms", "elems")

    def __init__(self, p: int, d: int, items: Iterable[tuple[Element, int]] = ()):
        self.p = check_prime(p)
        self.d = d
        self.terms: dict[tuple, int] = {}
        self.elems: dict[tuple, Element] = {}
        for g, c in items:
            if g.d != d:
                raise ValueError("element acts on a tree of a different degree")
            k = g.key()
            v = (self.terms.get(k, 0) + int(c)) % self.p
            if v:
                self.terms[k] = v
                self.elems.setdefault(k, g)
            else:
                self.terms.pop(k, None)
                self.elems.pop(k, None)

    @classmethod
    def of(cls, g: Element, p: int | None = None, c: int = 1) -> GroupRingElem:
        return cls(g.d if p is None else p, g.d, [(g, c)])

    @classmethod
    def scalar(cls, c: int, p: int, d: int | None = None) -> GroupRingElem:
        d = p if d is None else d
        return cls(p, d, [(Element.identity(d), c)])

    def items(self) -> list[tuple[Element, int]]:
        return [(self.elems[k], c) for k, c in self.terms.items()]

    def _lift(self, other) -> GroupRingElem:
        if isinstance(other, GroupRingElem):
            if other.p != self.p or other.d != self.d:
                raise ValueError("group ring mismatch")
            return other
        if isinstance(other, Element):
            return GroupRingElem(self.p, self.d, [(other, 1)])
        return GroupRingElem.scalar(int(other), self.p, self.d)

    def __add__(self, other) -> GroupRingElem:
        o = self._lift(other)
        return GroupRingElem(self.p, self.d, self.items() + o.items())

    __radd__ = __add__

    def __neg__(self) -> GroupRingElem:
        return GroupRingElem(self.p, self.d, [(g, -c) for g, c in self.items()])

    def __sub__(self, other) -> GroupRingElem:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> GroupRingElem:
        return (-self) + other

    def __mul__(self, other) -> GroupRingElem:
        if isinstance(other, (int, np.integer)):
            return GroupRingElem(self.p, self.d, [(g, c * int(other)) for g, c in self.items()])
        o = self._lift(other)
        return GroupRingElem(self.p, self.d, [(g * h, c * e) for g, c in self.items() for h, e in o.items()])

    def __rmul__(self, other) -> GroupRingElem:
        if isinstance(other, (int, np.integer)):
            return self * other
        return self._lift(other) * self

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupRingElem):
            try:
                other = self._lift(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.p == other.p and self.d == other.d and self.terms == other.terms

    def __hash__(self):
        return hash((self.p, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def augmentation(self) -> int:
        return sum(self.terms.values()) % self.p

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda k: (k != ("c", 0), repr(self.elems[k]))):
            g, c = self.elems[k], self.terms[k]
            label = repr(g)
            if c == 1:
                parts.append(label)
            elif label == "1":
                parts.append(str(c))
            else:
                parts.append(f"{c}{label}")
        return "+".join(parts)


def as_group_ring(a, p: int | None = None) -> GroupRingElem:
    if isinstance(a, GroupRingElem):
        return a
    if isinstance(a, Element):
        return GroupRingElem.of(a, p)
    raise TypeError("expected an Element or a GroupRingElem")


class RingMatrix:
    """Square matrix with group-ring entries."""

    __slots__ = ("entries",)

    def __init__(self, entries: Sequence[Sequence[GroupRingElem]]):
        self.entries = [list(row) for row in entries]
        n = len(self.entries)
        if any(len(row) != n for row in self.entries):
            raise ValueError("RingMatrix must be square")

    @property
    def size(self) -> int:
        return len(self.entries)

    def __getitem__(self, ij) -> GroupRingElem:
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: RingMatrix) -> RingMatrix:
        n = self.size
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = self.entries[i][0] * other.entries[0][j]
                for k in range(1, n):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return RingMatrix(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RingMatrix) or other.size != self.size:
            return NotImplemented
        return all(self.entries[i][j] == other.entries[i][j]
                   for i in range(self.size) for j in range(self.size))

    def map(self, f) -> RingMatrix:
        return RingMatrix([[f(e) for e in row] for row in self.entries])

    def __repr__(self):
        return "[" + ", ".join("[" + ", ".join(repr(e) for e in row) + "]" for row in self.entries) + "]"


@dataclass(frozen=True)
class MarkedBasis:
    """A basis of F_p^X; ``vectors[j]`` lists the values of basis vector j on X."""

    p: int
    vectors: tuple[tuple[int, ...], ...]
    name: str = "custom"

    def __post_init__(self):
        check_prime(self.p)
        vecs = tuple(tuple(int(v) % self.p for v in vec) for vec in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        if any(len(v) != len(vecs) for v in vecs):
            raise ValueError("need d vectors of length d")
        if self.matrix.rank() != len(vecs):
            raise ValueError("basis vectors are linearly dependent over F_p")

    @property
    def d(self) -> int:
        return len(self.vectors)

    @property
    def marked(self) -> bool:
        return all(v == 1 for v in self.vectors[0])

    @cached_property
    def matrix(self) -> FpMatrix:
        """Transition matrix S from the delta basis: column j holds vector j."""
        return FpMatrix(np.array(self.vectors, dtype=np.int64).T, self.p)

    @cached_property
    def inverse_matrix(self) -> FpMatrix:
        return self.matrix.inverse()

    @classmethod
    def delta(cls, p: int, d: int | None = None) -> MarkedBasis:
        d = p if d is None else d
        return cls(p, tuple(tuple(int(i == j) for i in range(d)) for j in range(d)), "delta")

    @classmethod
    def monomial(cls, p: int) -> MarkedBasis:
        return cls(p, tuple(tuple(pow(x, k, p) for x in range(p)) for k in range(p)), "monomial")

    @classmethod
    def binomial(cls, p: int) -> MarkedBasis:
        T, _ = binomial_transition(p)
        return cls(p, tuple(tuple(T.a[:, j].tolist()) for j in range(p)), "binomial")

    @classmethod
    def named(cls, name: str, p: int) -> MarkedBasis:
        try:
            return {"delta": cls.delta, "monomial": cls.monomial, "binomial": cls.binomial}[name](p)
        except KeyError:
            raise ValueError(f"unknown basis {name!r}; expected delta, monomial or binomial") from None


def xi(a) -> RingMatrix:
    """Matrix recursion in the delta basis: entry (g(x), x) is g|_x."""
    a = as_group_ring(a)
    return xi_in_basis(a, MarkedBasis.delta(a.p, a.d))


def xi_in_basis(a, B: MarkedBasis) -> RingMatrix:
    """``S^-1 Xi(a) S`` for the scalar transition matrix S of B."""
    a = as_group_ring(a, B.p)
    if a.p != B.p or a.d != B.d:
        raise ValueError("basis and group ring disagree on p or d")
    d, p = B.d, B.p
    S, Si = B.matrix.a, B.inverse_matrix.a
    acc: list[list[list]] = [[[] for _ in range(d)] for _ in range(d)]
    for g, c in a.items():
        for x in range(d):
            y = g((x,))[0]
            h = section(g, (x,))
            for i in range(d):
                if not Si[i, y]:
                    continue
                for j in range(d):
                    w = Si[i, y] * S[x, j] * c % p
                    if w:
                        acc[i][j].append((h, w))
    return RingMatrix([[GroupRingElem(p, d, acc[i][j]) for j in range(d)] for i in range(d)])


def binary_binomial_recursion(g0: Element, g1: Element, twisted: bool) -> RingMatrix:
    """Binary binomial-basis recursion of ``(g0, g1)`` or ``sigma (g0, g1)``."""
    if g0.d != 2 or g1.d != 2:
        raise ValueError("this formula is for the binary tree (p = 2)")
    A0, A1 = GroupRingElem.of(g0, 2), GroupRingElem.of(g1, 2)
    zero = GroupRingElem(2, 2)
    if twisted:
        return RingMatrix([[A0, A0], [A0 + A1, A0]])
    return RingMatrix([[A1, zero], [A0 + A1, A0]])


def _guard(d: int, n: int):
    if n < 0:
        raise ValueError("level must be non-negative")
    if d**n > MAX_LEVEL_SIZE:
        raise ValueError(f"level matrix of size {d}^{n} exceeds the {MAX_LEVEL_SIZE} guard")


@lru_cache(maxsize=512)
def _state_level(uni: Universe, q: int, n: int, B: MarkedBasis) -> np.ndarray:
    d, p = B.d, B.p
    N = d**n
    if q == 0 or n == 0:
        out = np.eye(N, dtype=np.int8)
        out.flags.writeable = False
        return out
    S, Si = B.matrix.a, B.inverse_matrix.a
    pm = uni.perm[q]
    subs = [_state_level(uni, uni.sec[q][x], n - 1, B).astype(np.int64) for x in range(d)]
    out = np.zeros((N, N), dtype=np.int8)
    for i in range(d):
        for j in range(d):
            acc = None
            for x in range(d):
                w = int(Si[i, pm[x]] * S[x, j] % p)
                if w:
                    term = subs[x] if w == 1 else w * subs[x]
                    acc = term if acc is None else acc + term
            if acc is not None:
                out[i::d, j::d] = acc % p
    out.flags.writeable = False
    return out


def _element_level(g: Element, n: int, B: MarkedBasis) -> FpMatrix:
    uni = g.universe
    word = (g._cid,) if g._cid is not None else g.word
    out = None
    for q in word:
        m = FpMatrix._wrap(_state_level(uni, q, n, B).astype(np.int64), B.p)
        out = m if out is None else out @ m
    if out is None:
        return FpMatrix.identity(B.d**n, B.p)
    return out


def level_matrix(a, n: int, B: MarkedBasis) -> FpMatrix:
    """Matrix of pi_n(a) on F_p^(X^n) in the basis B tensored n times."""
    a = as_group_ring(a, B.p)
    if a.p != B.p or a.d != B.d:
        raise ValueError("basis and group ring disagree on p or d")
    _guard(B.d, n)
    N = B.d**n
    out = np.zeros((N, N), dtype=np.int64)
    for g, c in a.items():
        out += c * _element_level(g, n, B).a
    return FpMatrix(out, B.p)


def permutation_matrix(g: Element, n: int, p: int | None = None) -> FpMatrix:
    """Delta-basis matrix of g on X^n computed from its action on words."""
    from .mealy import level_permutation

    p = g.d if p is None else p
    _guard(g.d, n)
    perm = level_permutation(g, n)
    N = g.d**n
    out = np.zeros((N, N), dtype=np.int64)
    out[perm, np.arange(N)] = 1
    return FpMatrix(out, p)


def transition_tensor(T, n: int):
    """``T ⊗ ... ⊗ T`` (n factors); works for FpMatrix and integer arrays."""
    if isinstance(T, FpMatrix):
        return kron_power(T, n)
    T = np.asarray(T, dtype=object)
    out = np.array([[1]], dtype=object)
    for _ in range(n):
        out = np.kron(T, out)
    return out


def change_basis(M: FpMatrix, T: FpMatrix, n: int) -> FpMatrix:
    """``T_n^-1 M T_n`` where T is the one-letter transition matrix."""
    Tn = transition_tensor(T, n)
    return transition_tensor(T.inverse(), n) @ M @ Tn
