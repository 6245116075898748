"""Truncated power series over F_p and the diagonal generating series of automatic matrices."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fp import FpMatrix, check_prime
from .mealy import Element
from .recursion import MarkedBasis, level_matrix


class FpSeries:
    """``c_0 + c_1 x + ... + c_{N-1} x^{N-1} + O(x^N)`` over F_p."""

    __slots__ = ("p", "c")

    def __init__(self, p: int, coeffs, N: int | None = None):
        self.p = check_prime(p)
        c = np.asarray(coeffs, dtype=np.int64).ravel() % self.p
        if N is not None:
            if len(c) >= N:
                c = c[:N]
            else:
                c = np.concatenate([c, np.zeros(N - len(c), dtype=np.int64)])
        self.c = c

    @property
    def N(self) -> int:
        return len(self.c)

    @classmethod
    def zero(cls, p: int, N: int) -> FpSeries:
        return cls(p, [], N)

    @classmethod
    def one(cls, p: int, N: int) -> FpSeries:
        return cls(p, [1], N)

    @classmethod
    def monomial(cls, k: int, p: int, N: int, c: int = 1) -> FpSeries:
        out = np.zeros(N, dtype=np.int64)
        if k < N:
            out[k] = c
        return cls(p, out)

    def _same(self, other: FpSeries):
        if not isinstance(other, FpSeries):
            raise TypeError("expected an FpSeries")
        if other.p != self.p or other.N != self.N:
            raise ValueError(f"series mismatch: p={self.p},N={self.N} vs p={other.p},N={other.N}")

    def _lift(self, other) -> FpSeries:
        if isinstance(other, (int, np.integer)):
            return FpSeries(self.p, [int(other)], self.N)
        self._same(other)
        return other

    def __add__(self, other) -> FpSeries:
        other = self._lift(other)
        return FpSeries(self.p, self.c + other.c)

    __radd__ = __add__

    def __neg__(self) -> FpSeries:
        return FpSeries(self.p, -self.c)

    def __sub__(self, other) -> FpSeries:
        return self + (-self._lift(other))

    def __rsub__(self, other) -> FpSeries:
        return (-self) + other

    def __mul__(self, other) -> FpSeries:
        if isinstance(other, (int, np.integer)):
            return FpSeries(self.p, self.c * int(other))
        self._same(other)
        return FpSeries(self.p, np.convolve(self.c, other.c)[: self.N])

    __rmul__ = __mul__

    def __pow__(self, k: int) -> FpSeries:
        if k < 0:
            return self.inverse() ** (-k)
        out, base = FpSeries.one(self.p, self.N), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> FpSeries:
        if self.c[0] % self.p == 0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        p, N = self.p, self.N
        inv0 = pow(int(self.c[0]), p - 2, p)
        out = np.zeros(N, dtype=np.int64)
        out[0] = inv0
        for k in range(1, N):
            s = int(np.dot(self.c[1 : k + 1], out[k - 1 :: -1][:k]))
            out[k] = (-s * inv0) % p
        return FpSeries(p, out)

    def __truediv__(self, other) -> FpSeries:
        if isinstance(other, (int, np.integer)):
            return self * pow(int(other), self.p - 2, self.p)
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other) -> FpSeries:
        return self._lift(other) * self.inverse()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, np.integer)):
            other = FpSeries(self.p, [int(other)], self.N)
        if not isinstance(other, FpSeries):
            return NotImplemented
        return self.p == other.p and self.N == other.N and bool(np.array_equal(self.c, other.c))

    __hash__ = None

    def __getitem__(self, k):
        return self.c[k]

    def substitute_power(self, d: int) -> FpSeries:
        """``f(x^d)`` with the same truncation order."""
        out = np.zeros(self.N, dtype=np.int64)
        idx = np.arange(0, self.N, d)
        out[idx] = self.c[: len(idx)]
        return FpSeries(self.p, out)

    def frobenius(self) -> FpSeries:
        return self.substitute_power(self.p)

    def hadamard(self, other: FpSeries) -> FpSeries:
        self._same(other)
        return FpSeries(self.p, self.c * other.c)

    def shift(self, k: int = 1) -> FpSeries:
        """Drop the first k coefficients: ``(a_k, a_{k+1}, ...)``; order drops by k."""
        if k < 0 or k > self.N:
            raise ValueError("bad shift")
        return FpSeries(self.p, self.c[k:])

    def truncate(self, N: int) -> FpSeries:
        if N > self.N:
            raise ValueError("cannot extend a truncated series")
        return FpSeries(self.p, self.c[:N])

    def extend_zero(self, N: int) -> FpSeries:
        """Pad with zeros; only meaningful when the series is a polynomial."""
        return FpSeries(self.p, self.c, N)

    def valuation(self) -> int | None:
        nz = np.flatnonzero(self.c)
        return int(nz[0]) if nz.size else None

    def is_zero(self) -> bool:
        return not self.c.any()

    def tolist(self) -> list[int]:
        return [int(x) for x in self.c]

    def to_csv(self) -> str:
        return "\n".join(str(int(x)) for x in self.c) + "\n"

    def to_sparse(self) -> str:
        """Nonzero terms as ``c * s^k``, one per line."""
        return "".join(f"{int(c)} * s^{k}\n" for k, c in enumerate(self.c) if c)

    def __str__(self):
        terms = []
        for k, c in enumerate(self.c):
            if c:
                if k == 0:
                    terms.append(str(c))
                else:
                    head = "" if c == 1 else f"{c}*"
                    terms.append(f"{head}s^{k}" if k > 1 else f"{head}s")
        body = " + ".join(terms) if terms else "0"
        return f"{body} + O(s^{self.N})"

    def __repr__(self):
        return f"FpSeries(p={self.p}, N={self.N}, {self.tolist()})"


def series_of_sequence(prefix: Sequence[int], p: int) -> FpSeries:
    return FpSeries(p, list(prefix))


def polynomial(coeffs: Sequence[int], p: int, N: int) -> FpSeries:
    return FpSeries(p, list(coeffs), N)


def rational(numer: Sequence[int], denom: Sequence[int], N: int, p: int = 2) -> FpSeries:
    """Expansion of numer/denom (coefficient lists, constant term first) mod x^N."""
    d = polynomial(denom, p, N)
    if d.c[0] == 0:
        raise ZeroDivisionError("denominator vanishes at 0")
    return polynomial(numer, p, N) / d


def recompose(parts: Sequence[FpSeries]) -> FpSeries:
    """``sum_i x^i G_i(x^d)``; each part of order M gives order d*M."""
    d = len(parts)
    M = parts[0].N
    p = parts[0].p
    if any(q.N != M or q.p != p for q in parts):
        raise ValueError("parts must share p and truncation order")
    out = np.zeros(d * M, dtype=np.int64)
    for i, q in enumerate(parts):
        out[i::d] = q.c
    return FpSeries(p, out)


def frobenius_recompose(parts: Sequence[FpSeries]) -> FpSeries:
    """``sum_i x^i G_i(x)^p`` computed with genuine p-th powers (d = p)."""
    p = parts[0].p
    if len(parts) != p:
        raise ValueError("the Frobenius form needs exactly p parts")
    M = parts[0].N
    N = p * M
    out = FpSeries.zero(p, N)
    for i, q in enumerate(parts):
        # zero padding only affects coefficients of order >= p*M
        out = out + FpSeries.monomial(i, p, N) * (q.extend_zero(N) ** p)
    return out


def decimate_series(f: FpSeries, d: int) -> list[FpSeries]:
    M = f.N // d
    return [FpSeries(f.p, f.c[i::d][:M]) for i in range(d)]


# algebraic relations -------------------------------------------------------------

MIN_ORDER = 8


def evaluate_relation(G: FpSeries, coeffs: Sequence[FpSeries | int]) -> FpSeries:
    """``sum_i coeffs[i] * G^i``."""
    acc = FpSeries.zero(G.p, G.N)
    power = FpSeries.one(G.p, G.N)
    for c in coeffs:
        acc = acc + power * c
        power = power * G
    return acc


def verify_algebraic(G: FpSeries, coeffs: Sequence[FpSeries | int], order: int | None = None) -> bool:
    """True iff ``sum_i coeffs[i] G^i = 0`` modulo x^order (default: G's order).

    All arithmetic is truncated at G's order N and every product of series
    known mod x^N is exact mod x^N, so no extra guard band is needed.
    """
    order = G.N if order is None else order
    if G.N < MIN_ORDER or order < MIN_ORDER:
        raise ValueError(f"truncation order must be at least {MIN_ORDER}")
    if order > G.N:
        raise ValueError("cannot verify beyond the truncation order")
    for c in coeffs:
        if isinstance(c, FpSeries) and (c.N < order or c.p != G.p):
            raise ValueError("coefficient series shorter than the verification order")
    N = order
    Gt = G.truncate(N)
    cs = [c.truncate(N) if isinstance(c, FpSeries) else c for c in coeffs]
    return evaluate_relation(Gt, cs).is_zero()


def grigorchuk_relation(name: str, N: int) -> list[FpSeries]:
    """Coefficients (in powers of the unknown) of the degree-8 relations for B1, C1, D1."""
    p = 2
    s = lambda k: FpSeries.monomial(k, p, N)
    r = lambda k, e: rational([0] * k + [1], [1] + [0] * (2**e - 1) + [1], N)  # s^k / (1 + s^(2^e))
    consts = {
        "B": r(3, 3) + r(1, 2),
        "C": r(7, 4) + r(1, 2),
        "D": r(7, 4) + r(3, 3),
    }
    if name not in consts:
        raise ValueError("relation name must be B, C or D")
    coeffs = [consts[name], FpSeries.one(p, N)] + [FpSeries.zero(p, N)] * 6 + [s(7)]
    return coeffs


# diagonals -----------------------------------------------------------------------


def diagonal_series(g, i: int, L: int, B: MarkedBasis | None = None) -> FpSeries:
    """Series of ``(a_{0,i}, a_{1,i+1}, ...)`` for the level matrix of g, L terms."""
    if isinstance(g, FpMatrix):
        M, p = g.a, g.p
        if M.shape[0] < L or M.shape[1] < L + i:
            raise ValueError("matrix too small for the requested diagonal")
    else:
        p = g.universe.d if isinstance(g, Element) else g.d
        B = B or MarkedBasis.binomial(p)
        n = 0
        while p**n < L + i:
            n += 1
        M = level_matrix(g, n, B).a
    return FpSeries(p, [M[k, k + i] for k in range(L)])


def diagonal_decimation_map(n: int, k: int, d: int) -> tuple[int, int, int]:
    """``(k, r, q)`` with ``k + n = d q + r``: decimation k of diagonal n is diagonal q of block (k, r)."""
    if not 0 <= k < d or n < 0:
        raise ValueError("need 0 <= k < d and n >= 0")
    q, r = divmod(k + n, d)
    return k, r, q


# the Grigorchuk system ----------------------------------------------------------------


def grigorchuk_diagonal_system(n_max: int, N: int, iterations: int | None = None) -> dict:
    """Series ``{("A"|"B"|"C"|"D"|"I", n): FpSeries}`` for 0 <= n <= n_max, p = 2.

    Index 0 is the all-ones diagonal; index 1 is the fixed point of the
    s-contraction ``B1 = s(C1^2+A1^2), C1 = s(D1^2+A1^2), D1 = s B1^2``; larger
    indices follow from strictly smaller ones.
    """
    p = 2
    one_over = lambda e: rational([1], [1] + [0] * (2**e - 1) + [1], N, p)
    zero = FpSeries.zero(p, N)
    s = FpSeries.monomial(1, p, N)
    out: dict = {}

    def A(n):
        return one_over(0) if n == 0 else one_over(1) if n == 1 else zero

    def I(n):
        return one_over(0) if n == 0 else zero

    for n in range(n_max + 1):
        out[("A", n)] = A(n)
        out[("I", n)] = I(n)
    for name in "BCD":
        out[(name, 0)] = one_over(0)
    if n_max >= 1:
        B1 = C1 = D1 = zero
        for _ in range(iterations or N + 1):
            nB = s * (C1 * C1 + A(1) * A(1))
            nC = s * (D1 * D1 + A(1) * A(1))
            nD = s * (B1 * B1)
            if nB == B1 and nC == C1 and nD == D1:
                break
            B1, C1, D1 = nB, nC, nD
        out[("B", 1)], out[("C", 1)], out[("D", 1)] = B1, C1, D1
    for m in range(2, n_max + 1):
        n, odd = divmod(m, 2)
        if odd:
            out[("B", m)] = s * (out[("C", n + 1)] ** 2 + A(n + 1) ** 2)
            out[("C", m)] = s * (out[("D", n + 1)] ** 2 + A(n + 1) ** 2)
            out[("D", m)] = s * (I(n + 1) ** 2 + out[("B", n + 1)] ** 2)
        else:
            out[("B", m)] = out[("C", n)] ** 2 + s * A(n) ** 2
            out[("C", m)] = out[("D", n)] ** 2 + s * A(n) ** 2
            out[("D", m)] = out[("B", n)] ** 2 + s * I(n) ** 2
    return out


def tilde_first_diagonals(B1: FpSeries, C1: FpSeries, D1: FpSeries) -> bool:
    """The t = 0 specialization of the shifted-matrix equations."""
    N = B1.N
    s = FpSeries.monomial(1, 2, N)
    F0 = rational([0, 1], [1, 0, 0, 0, 1], N)
    return (B1 == s * C1 * C1 + F0 and C1 == s * D1 * D1 + F0 and D1 == s * B1 * B1)


# closed forms over F_2 -------------------------------------------------------------------
# Polynomials over F_2 are Python ints: bit k is the coefficient of s^k.


def gf2_mul(a: int, b: int) -> int:
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def gf2_pow(a: int, e: int) -> int:
    out = 1
    while e:
        if e & 1:
            out = gf2_mul(out, a)
        a = gf2_mul(a, a)
        e >>= 1
    return out


def _gf2_series(a: int, N: int) -> FpSeries:
    return FpSeries(2, [(a >> k) & 1 for k in range(min(N, a.bit_length()))], N)


@dataclass(frozen=True)
class ClosedForm:
    """``p0 / (1 + s^(2^k)) + p1 * B1^(2^l)`` with p0, p1 in F_2[s] (int bitmasks)."""

    p0: int
    k: int
    p1: int
    l: int

    @classmethod
    def rational(cls, p0: int, k: int) -> ClosedForm:
        return cls(p0, k, 0, 0)

    def _norm(self) -> ClosedForm:
        return ClosedForm(self.p0, self.k if self.p0 else 0, self.p1, self.l if self.p1 else 0)

    def square(self) -> ClosedForm:
        return ClosedForm(gf2_mul(self.p0, self.p0), self.k + 1, gf2_mul(self.p1, self.p1), self.l + 1)._norm()

    def times_s(self) -> ClosedForm:
        return ClosedForm(self.p0 << 1, self.k, self.p1 << 1, self.l)._norm()

    def __add__(self, other: ClosedForm) -> ClosedForm:
        # (1 + s^(2^k))^(2^(K-k)) = 1 + s^(2^K) over F_2
        K = max(self.k, other.k)
        a = gf2_mul(self.p0, gf2_pow(1 | (1 << 2**self.k), 2 ** (K - self.k) - 1))
        b = gf2_mul(other.p0, gf2_pow(1 | (1 << 2**other.k), 2 ** (K - other.k) - 1))
        if self.p1 and other.p1 and self.l != other.l:
            raise ValueError("sum leaves the closed-form family")
        l = self.l if self.p1 else other.l
        return ClosedForm(a ^ b, K, self.p1 ^ other.p1, l)._norm()

    def series(self, B1: FpSeries) -> FpSeries:
        N = B1.N
        den = _gf2_series(1 | (1 << 2**self.k), N)
        rat = _gf2_series(self.p0, N) / den
        return rat + _gf2_series(self.p1, N) * B1 ** (2**self.l)

    def __str__(self):
        def poly(a):
            terms = [("1" if k == 0 else "s" if k == 1 else f"s^{k}") for k in range(a.bit_length()) if a >> k & 1]
            return " + ".join(reversed(terms))

        parts = []
        if self.p0:
            parts.append(f"({poly(self.p0)})/(1 + s^{2**self.k})")
        if self.p1:
            power = "B1" if self.l == 0 else f"B1^{2**self.l}"
            parts.append(power if self.p1 == 1 else f"({poly(self.p1)})*{power}")
        return " + ".join(parts) or "0"


def grigorchuk_closed_forms(n_max: int) -> dict:
    """Closed forms of every B_n, C_n, D_n (1 <= n <= n_max) derived from the recursions."""
    Z = ClosedForm(0, 0, 0, 0)
    A = {0: ClosedForm.rational(1, 0), 1: ClosedForm.rational(1, 1)}
    I = {0: ClosedForm.rational(1, 0)}
    get = lambda tbl, n: tbl.get(n, Z)
    out: dict = {}
    B1 = ClosedForm(0, 0, 1, 0)
    D1 = B1.square().times_s()
    C1 = (D1.square() + A[1].square()).times_s()
    out[("B", 1)], out[("C", 1)], out[("D", 1)] = B1, C1, D1
    for m in range(2, n_max + 1):
        n, odd = divmod(m, 2)
        if odd:
            out[("B", m)] = (out[("C", n + 1)].square() + get(A, n + 1).square()).times_s()
            out[("C", m)] = (out[("D", n + 1)].square() + get(A, n + 1).square()).times_s()
            out[("D", m)] = (get(I, n + 1).square() + out[("B", n + 1)].square()).times_s()
        else:
            out[("B", m)] = out[("C", n)].square() + get(A, n).square().times_s()
            out[("C", m)] = out[("D", n)].square() + get(A, n).square().times_s()
            out[("D", m)] = out[("B", n)].square() + get(I, n).square().times_s()
    return out


def fit_closed_form(X: FpSeries, B1: FpSeries, max_k: int = 6, max_l: int = 5,
                    margin: int = 8) -> ClosedForm | None:
    """Search (k, l) and solve for p0, p1 by linear algebra over F_2.

    Both numerators get degree < D with ``4 D <= N - margin``, so the system is
    overdetermined and a solution is evidence rather than a tautology.  Since B1
    is algebraic the family has several members for one series; the first (k, l)
    in order of k + l is returned with its smallest degree bound and should be confirmed at a higher order.
    """
    if X.p != 2 or B1.p != 2 or X.N != B1.N:
        raise ValueError("need two F_2 series of the same order")
    N = X.N
    if X.is_zero():
        return ClosedForm(0, 0, 0, 0)
    cap = (N - margin) // 4
    pairs = sorted(((k, l) for k in range(max_k + 1) for l in range(max_l + 1)), key=lambda kl: (sum(kl), kl))
    powers = {l: B1 ** (2**l) for l in range(max_l + 1)}
    dens = {k: _gf2_series(1 | (1 << 2**k), N) for k in range(max_k + 1)}
    lhs = {k: (X * dens[k]).c for k in dens}
    shifted = {}  # column e of the B1-part: s^e * den * B1^(2^l)
    for k, l in pairs:
        base = (powers[l] * dens[k]).c
        shifted[k, l] = np.stack([np.concatenate([np.zeros(e, dtype=np.int64), base[: N - e]]) for e in range(cap)], 1)
    def attempt(k, l, D):
        # equation row n: bits 0..D-1 for p0, D..2D-1 for p1, bit 2D for the right side
        rows = []
        for n in range(N):
            r = (1 << n) if n < D else 0
            for e in range(min(D, n + 1)):
                if shifted[k, l][n, e]:
                    r |= 1 << (D + e)
            if lhs[k][n]:
                r |= 1 << (2 * D)
            rows.append(r)
        return _gf2_solve(rows, 2 * D)

    for k, l in pairs:
        if attempt(k, l, cap) is None:
            continue
        for D in range(1, cap + 1):
            sol = attempt(k, l, D)
            if sol is not None:
                p0 = sol & ((1 << D) - 1)
                p1 = sol >> D
                return ClosedForm(p0, k, p1, l)._norm()
    return None


def _gf2_solve(rows: list[int], nvars: int) -> int | None:
    """Gauss-Jordan on bit-packed rows (bit nvars is the right side); solution as a bitmask."""
    pivots: list[tuple[int, int]] = []
    for r in rows:
        for col, pr in pivots:
            if r >> col & 1:
                r ^= pr
        low = r & ((1 << nvars) - 1)
        if not low:
            if r:
                return None
            continue
        col = low.bit_length() - 1
        pivots = [(c, pr ^ r if pr >> col & 1 else pr) for c, pr in pivots]
        pivots.append((col, r))
    x = 0
    for col, pr in pivots:
        if pr >> nvars & 1:
            x |= 1 << col
    return x


# t-s form ----------------------------------------------------------------------------


@dataclass(frozen=True)
class TSPoly:
    """``sum_i M_i(s) t^i`` for the first ``len(diagonals)`` diagonals, with ``t f(s) = shift(f) t``."""

    diagonals: tuple

    def __post_init__(self):
        ds = tuple(self.diagonals)
        if not ds:
            raise ValueError("need at least one diagonal")
        if len({(d.p, d.N) for d in ds}) != 1:
            raise ValueError("diagonals must share p and truncation order")
        object.__setattr__(self, "diagonals", ds)

    @property
    def p(self) -> int:
        return self.diagonals[0].p

    @property
    def N(self) -> int:
        return self.diagonals[0].N

    @property
    def degree(self) -> int:
        return len(self.diagonals) - 1

    def __getitem__(self, i: int) -> FpSeries:
        return self.diagonals[i]

    @classmethod
    def from_matrix(cls, M, N: int, D: int) -> TSPoly:
        """First D diagonals, N terms each, of an FpMatrix or AutoMatrix."""
        if isinstance(M, FpMatrix):
            if M.rows < N or M.cols < N + D - 1:
                raise ValueError("matrix too small")
            a, p = M.a, M.p
            return cls(tuple(FpSeries(p, [a[k, k + i] for k in range(N)]) for i in range(D)))
        a = M.truncate(N, N + D - 1).a
        return cls(tuple(FpSeries(M.p, [a[k, k + i] for k in range(N)]) for i in range(D)))


def ts_mul(u: TSPoly, v: TSPoly) -> TSPoly:
    """Product with the twist; known diagonals ``min(D_u, D_v)``, order ``N - (D_u - 1)``."""
    if u.p != v.p or u.N != v.N:
        raise ValueError("TSPolys must share p and N")
    D = min(len(u.diagonals), len(v.diagonals))
    N = u.N - (len(u.diagonals) - 1)
    if N < 1:
        raise ValueError("truncation exhausted by the t-degree")
    out = []
    for m in range(D):
        acc = FpSeries.zero(u.p, N)
        for i in range(m + 1):
            a = u[i].truncate(N)
            b = v[m - i].shift(i).truncate(N)
            acc = acc + a.hadamard(b)
        out.append(acc)
    return TSPoly(tuple(out))
