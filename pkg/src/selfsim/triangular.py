"""Kaloujnine tableaux, the abelianization alpha, first diagonals, height and uniseriality."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, gcd
from typing import Sequence

import numpy as np

from .fp import FpMatrix, ReducedPoly, check_prime, monomial_exponents
from .mealy import Element, inverse, is_in_Kp
from .recursion import MarkedBasis, level_matrix


def _require_Kp(g: Element) -> int:
    p = g.universe.d
    check_prime(p)
    if not is_in_Kp(g):
        raise ValueError("element is not in the Kaloujnine group K_p")
    return p


def _flat(f: ReducedPoly, k: int) -> np.ndarray:
    """Values of f on X^k, little-endian index (x1 fastest)."""
    if k == 0:
        return np.array([f.coefficient(())], dtype=np.int64)
    return f.table(k).reshape(-1, order="F")


def _from_flat(values: np.ndarray, p: int, k: int) -> ReducedPoly:
    if k == 0:
        return ReducedPoly.constant(int(values[0]), p, 0)
    return ReducedPoly.from_table(np.asarray(values).reshape((p,) * k, order="F"), p)


def _digits(p: int, k: int) -> np.ndarray:
    idx = np.arange(p**k, dtype=np.int64)
    return np.array([(idx // p**i) % p for i in range(k)], dtype=np.int64).reshape(k, p**k)


# tableaux ---------------------------------------------------------------------


@dataclass(frozen=True)
class Tableau:
    """``[f0, f1(x1), ..., f_{n-1}(x1..x_{n-1})]``; level k adds ``f_k`` to letter k+1."""

    p: int
    polys: tuple

    def __post_init__(self):
        for k, f in enumerate(self.polys):
            if f.p != self.p or f.nvars > k:
                raise ValueError(f"level {k} polynomial has too many variables")
        object.__setattr__(self, "polys", tuple(f.embed(k) for k, f in enumerate(self.polys)))

    @property
    def depth(self) -> int:
        return len(self.polys)

    @classmethod
    def identity(cls, p: int, n: int) -> Tableau:
        return cls(p, tuple(ReducedPoly(p, k) for k in range(n)))

    def values(self, k: int) -> np.ndarray:
        return _flat(self.polys[k], k)

    def act(self, w: Sequence[int]) -> tuple[int, ...]:
        w = tuple(int(x) for x in w)
        if len(w) > self.depth:
            raise ValueError("word longer than the tableau")
        return tuple((w[k] + self.polys[k](*w[:k])) % self.p for k in range(len(w)))

    def __mul__(self, other: Tableau) -> Tableau:
        return tableau_mul(self, other)

    def __str__(self):
        return "\n".join(f"f{k} = {f}" for k, f in enumerate(self.polys))


def tableau_of(g: Element, n: int) -> Tableau:
    """Reduced interpolation of the rotation exponent at every vertex of levels 0..n-1."""
    if n < 1:
        raise ValueError("depth must be at least 1")
    p = _require_Kp(g)
    uni = g.universe
    perm, sec = uni.arrays()
    states = np.array([g.canonical()], dtype=np.int64)
    polys = []
    for k in range(n):
        polys.append(_from_flat(perm[states, 0] % p, p, k))
        states = np.concatenate([sec[states, x] for x in range(p)])
    return Tableau(p, tuple(polys))


def tableau_mul(s: Tableau, t: Tableau) -> Tableau:
    """Tableau of ``s o t`` (t acts first): ``t_k(x) + s_k(x shifted by t)``."""
    if s.p != t.p or s.depth != t.depth:
        raise ValueError("tableaux of different shape")
    p = s.p
    out = []
    for k in range(s.depth):
        D = _digits(p, k)
        y_idx = np.zeros(p**k, dtype=np.int64)
        for i in range(k):
            prefix = (np.arange(p**k) % p**i)
            y_idx += ((D[i] + t.values(i)[prefix]) % p) * p**i
        out.append(_from_flat((t.values(k) + s.values(k)[y_idx]) % p, p, k))
    return Tableau(p, tuple(out))


# abelianization ---------------------------------------------------------------------


@dataclass(frozen=True)
class AlphaSequence:
    """Eventually periodic F_p-sequence stored with minimal preperiod and period."""

    p: int
    preperiod: tuple
    period: tuple

    def __post_init__(self):
        p = self.p
        pre = [int(x) % p for x in self.preperiod]
        per = [int(x) % p for x in self.period]
        if not per:
            raise ValueError("period must be non-empty")
        L = len(per)
        for q in range(1, L + 1):
            if L % q == 0 and all(per[i] == per[i % q] for i in range(L)):
                per = per[:q]
                break
        while pre and pre[-1] == per[-1]:
            pre.pop()
            per = per[-1:] + per[:-1]
        object.__setattr__(self, "preperiod", tuple(pre))
        object.__setattr__(self, "period", tuple(per))

    def __getitem__(self, k: int) -> int:
        if k < 0:
            raise IndexError("negative index")
        M = len(self.preperiod)
        if k < M:
            return self.preperiod[k]
        return self.period[(k - M) % len(self.period)]

    def terms(self, n: int) -> list[int]:
        return [self[k] for k in range(n)]

    def __add__(self, other: AlphaSequence) -> AlphaSequence:
        if self.p != other.p:
            raise ValueError("different fields")
        M = max(len(self.preperiod), len(other.preperiod))
        L1, L2 = len(self.period), len(other.period)
        L = L1 * L2 // gcd(L1, L2)
        pre = [self[k] + other[k] for k in range(M)]
        per = [self[k] + other[k] for k in range(M, M + L)]
        return AlphaSequence(self.p, pre, per)

    def __neg__(self) -> AlphaSequence:
        return AlphaSequence(self.p, [-x for x in self.preperiod], [-x for x in self.period])

    def is_zero_at(self, k: int) -> bool:
        return self[k] == 0

    def __str__(self):
        return f"pre={list(self.preperiod)} period={list(self.period)}"


def alpha(g: Element, max_steps: int = 1_000_000) -> AlphaSequence:
    """Level sums of rotation exponents via the count-vector recursion on the state closure."""
    p = _require_Kp(g)
    uni = g.universe
    q0 = g.canonical()
    Q = sorted(uni.closure(q0))
    pos = {q: i for i, q in enumerate(Q)}
    A = np.zeros((len(Q), len(Q)), dtype=np.int64)
    for q in Q:
        for x in range(p):
            A[pos[q], pos[uni.sec[q][x]]] += 1
    rot = np.array([uni.perm[q][0] for q in Q], dtype=np.int64)
    c = np.zeros(len(Q), dtype=np.int64)
    c[pos[q0]] = 1
    seen: dict[bytes, int] = {}
    vals: list[int] = []
    for k in range(max_steps):
        key = c.tobytes()
        if key in seen:
            j = seen[key]
            return AlphaSequence(p, vals[:j], vals[j:])
        seen[key] = k
        vals.append(int(c @ rot % p))
        c = (c @ A) % p
    raise RuntimeError("count vectors did not cycle within the step limit")


def valuation(n: int, p: int) -> int:
    if n <= 0:
        raise ValueError("valuation needs a positive integer")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def first_diagonal(g: Element, L: int) -> list[int]:
    """``[s_1, ..., s_L]`` with ``s_n = alpha_{v_p(n)}(g)`` (1-based)."""
    a = alpha(g)
    return [a[valuation(n, a.p)] for n in range(1, L + 1)]


def first_diagonal_oracle(g: Element, L: int, B: MarkedBasis | None = None) -> list[int]:
    """Entries (n-1, n), n = 1..L, read from a level matrix (binomial basis by default)."""
    p = g.universe.d
    B = B or MarkedBasis.binomial(p)
    n = 0
    while p**n < L + 1:
        n += 1
    M = level_matrix(g, n, B).a
    return [int(M[k - 1, k]) for k in range(1, L + 1)]


def matrix_first_diagonal(M: FpMatrix) -> list[int]:
    return [int(M.a[k - 1, k]) for k in range(1, M.rows)]


# principal columns -----------------------------------------------------------------


def principal_columns(g: Element, n: int) -> list[np.ndarray]:
    """Above-diagonal parts of columns p^0..p^(n-1) of the monomial-basis matrix.

    Column p^k is ``pi(g) x_{k+1} = x_{k+1} o g^-1``, so it carries the
    coefficients of level k of the tableau of g^-1 (the same as g's own
    tableau when g is an involution).
    """
    _require_Kp(g)
    T = tableau_of(inverse(g), n)
    return [T.polys[k].coefficient_vector(k) for k in range(n)]


def principal_columns_from_matrix(g: Element, n: int) -> list[np.ndarray]:
    p = g.universe.d
    M = level_matrix(g, n, MarkedBasis.monomial(p)).a
    return [M[: p**k, p**k].copy() for k in range(n)]


def reconstruct_column(columns: Sequence[Sequence], j: int, p: int | None = None) -> list:
    """Column j from principal columns by expanding ``prod_i (x_i + u_{i-1})^{r_i}``.

    ``columns[k]`` lists the p^k above-diagonal entries of column p^k; entries
    are ints or ReducedPolys in shared parameter variables.  Returns the
    p^n entries of column j (ints, or ReducedPolys when parameters are used).
    """
    n = len(columns)
    entries = [e for col in columns for e in col]
    polys = [e for e in entries if isinstance(e, ReducedPoly)]
    if p is None:
        p = polys[0].p if polys else None
    if p is None:
        raise ValueError("cannot infer p from integer columns")
    if not 0 <= j < p**n:
        raise ValueError("column index out of range")
    m = max((e.nvars for e in polys), default=0)

    def lift_param(e) -> ReducedPoly:
        # parameters occupy variables n+1 .. n+m
        if isinstance(e, ReducedPoly):
            return ReducedPoly(p, n + m, {(0,) * n + tuple(ex) + (0,) * (m - e.nvars): c
                                           for ex, c in e.terms.items()})
        return ReducedPoly.constant(int(e), p, n + m)

    us = []
    for k, col in enumerate(columns):
        if len(col) != p**k:
            raise ValueError(f"principal column {k} must have {p**k} entries")
        u = ReducedPoly(p, n + m)
        for idx, e in enumerate(col):
            ex = monomial_exponents(idx, p, k) + (0,) * (n - k)
            mono = ReducedPoly(p, n + m, {ex + (0,) * m: 1})
            u = u + mono * lift_param(e)
        us.append(u)
    r = monomial_exponents(j, p, n)
    prod = ReducedPoly.constant(1, p, n + m)
    for i in range(n):
        if r[i]:
            prod = prod * (ReducedPoly.variable(i + 1, p, n + m) + us[i]) ** r[i]
    out: list = [ReducedPoly(p, m) for _ in range(p**n)] if polys else [0] * p**n
    for ex, c in prod.terms.items():
        idx = sum(e * p**i for i, e in enumerate(ex[:n]))
        if polys:
            out[idx] = out[idx] + ReducedPoly(p, m, {ex[n:]: c})
        else:
            out[idx] = (out[idx] + c) % p
    return out


# height ------------------------------------------------------------------------------


def _table(f) -> tuple[int, np.ndarray]:
    if isinstance(f, ReducedPoly):
        if f.nvars == 0:
            return f.p, np.array(f.coefficient(()) % f.p)
        return f.p, f.table()
    raise TypeError("expected a ReducedPoly")


def _b_dual(p: int) -> np.ndarray:
    """``W[k, x] = C(x, p-1-k)`` mod p, the functionals b_k'."""
    return np.array([[comb(x, p - 1 - k) % p for x in range(p)] for k in range(p)], dtype=np.int64)


def height_brute(f: ReducedPoly) -> int:
    if f.is_zero():
        return -1
    return max(sum(e * f.p**i for i, e in enumerate(ex)) for ex in f.terms)


def height_R(f: ReducedPoly) -> int:
    """Peel the last variable with ``R_k(f) = sum_x C(x, p-1-k) f(..., x)``."""
    p, t = _table(f)
    if not t.any():
        return -1
    W = _b_dual(p)
    total = 0
    for level in range(t.ndim - 1, -1, -1):
        for j in range(p - 1, -1, -1):
            r = np.tensordot(t, W[j], axes=([level], [0])) % p
            if r.any():
                break
        total += j * p**level
        t = r
    return total


def height_T(f: ReducedPoly) -> int:
    """Peel the first variable: ``gamma(f) = j1 + p * gamma(h_{j1})``."""
    p, t = _table(f)
    W = _b_dual(p)

    def gamma(t: np.ndarray) -> int:
        if t.ndim == 0:
            return 0 if int(t) % p else -1
        hs = [np.tensordot(W[k], t, axes=([0], [0])) % p for k in range(p)]
        gs = [gamma(h) for h in hs]
        top = max(gs)
        j1 = max(k for k in range(p) if gs[k] == top)
        return j1 + p * gs[j1]

    return gamma(t)


def height_p2(f: ReducedPoly) -> int:
    """Binary recursion on ``f0 = f(0, ...)`` and ``f1 = f(1, ...)``."""
    p, t = _table(f)
    if p != 2:
        raise ValueError("the binary recursion needs p = 2")

    def gamma(t: np.ndarray) -> int:
        if t.ndim == 0:
            return 0 if int(t) % 2 else -1
        g0, g1 = gamma(t[0]), gamma(t[1])
        if g0 == g1 == -1:
            return -1
        return 2 * max(g0, g1) + 1 if g0 != g1 else 2 * g0

    return gamma(t)


HEIGHT_METHODS = {"brute": height_brute, "R": height_R, "T": height_T, "p2": height_p2}


def height(f: ReducedPoly, method: str = "R") -> int:
    try:
        fn = HEIGHT_METHODS[method]
    except KeyError:
        raise ValueError(f"unknown height method {method!r}") from None
    return fn(f)


# uniseriality -----------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """Per level k, the index of a generator with nonzero alpha_k (None if there is none)."""

    preperiod: int
    period: int
    choice: tuple
    names: tuple = field(default=())

    def witness_for(self, k: int):
        if k < self.preperiod:
            return self.choice[k]
        return self.choice[self.preperiod + (k - self.preperiod) % self.period]

    def name_for(self, k: int):
        i = self.witness_for(k)
        if i is None:
            return None
        return self.names[i] if self.names else i

    @property
    def missing(self) -> list[int]:
        return [k for k, c in enumerate(self.choice) if c is None]


def is_uniserial(generators: Sequence[Element]) -> tuple[bool, Witness]:
    gens = list(generators)
    if not gens:
        raise ValueError("need at least one generator")
    alphas = [alpha(g) for g in gens]
    M = max(len(a.preperiod) for a in alphas)
    L = 1
    for a in alphas:
        L = L * len(a.period) // gcd(L, len(a.period))
    choice = []
    for k in range(M + L):
        choice.append(next((i for i, a in enumerate(alphas) if a[k]), None))
    names = tuple(g.name or repr(g) for g in gens)
    w = Witness(M, L, tuple(choice), names)
    return not w.missing, w


def uniserial_criterion_depth(generators: Sequence[Element], n: int) -> bool:
    """Truncated criterion: some generator has alpha_k != 0 for every k < n."""
    alphas = [alpha(g) for g in generators]
    return all(any(a[k] for a in alphas) for k in range(n))


def uniserial_direct(generators: Sequence[Element], n: int) -> bool:
    """Rank check that ``sum_g (g - 1) U_{k+1} = U_k`` in level-n monomial matrices."""
    gens = list(generators)
    if not gens:
        return False
    p = gens[0].universe.d
    B = MarkedBasis.monomial(p)
    N = p**n
    I = np.eye(N, dtype=np.int64)
    D = [(level_matrix(g, n, B).a - I) % p for g in gens]
    for k in range(N - 1):
        block = np.concatenate([d[: k + 1, : k + 2] for d in D], axis=1)
        if FpMatrix(block, p).rank() != k + 1:
            return False
    return True


# Sylow subgroup ------------------------------------------------------------------------


class SylowCapError(RuntimeError):
    pass


def sylow_generators(p: int, n: int) -> list[np.ndarray]:
    """Level-n permutations: the cycle sigma placed at vertex 0^k, k < n."""
    check_prime(p)
    N = p**n
    idx = np.arange(N, dtype=np.int64)
    gens = []
    for k in range(n):
        digit = (idx // p**k) % p
        active = idx % p**k == 0
        img = np.where(active, idx + (np.where(digit == p - 1, -(p - 1), 1)) * p**k, idx)
        gens.append(img)
    return gens


def sylow_group(p: int, n: int, cap: int = 1_000_000) -> list[np.ndarray]:
    """All elements of the level-n group generated by ``sylow_generators`` (BFS)."""
    gens = sylow_generators(p, n)
    ident = np.arange(p**n, dtype=np.int64)
    dtype = np.int16 if p**n < 2**15 else np.int64
    seen = {ident.astype(dtype).tobytes()}
    out = [ident]
    k = 0
    while k < len(out):
        g = out[k]
        for s in gens:
            h = s[g]
            key = h.astype(dtype).tobytes()
            if key not in seen:
                if len(seen) >= cap:
                    raise SylowCapError(f"group has more than {cap} elements")
                seen.add(key)
                out.append(h)
        k += 1
    return out


def sylow_order_check(p: int, n: int, cap: int = 1_000_000) -> int:
    return len(sylow_group(p, n, cap))


def sylow_order_formula(p: int, n: int) -> int:
    return p ** ((p**n - 1) // (p - 1))
