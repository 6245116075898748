"""Exact arithmetic over the prime field F_p.

Dense matrices are numpy ``int64`` arrays holding residues in ``[0, p)``.
Reduced polynomials live in F_p[x_1, ..., x_n] modulo x_i^p = x_i, so they
are the same thing as functions F_p^n -> F_p.  Exponent vectors are
little-endian: index 0 is x_1, the least significant digit.
"""
from __future__ import annotations

from itertools import product
from math import comb
from typing import Iterable, Sequence

import numpy as np

MAX_PRIME = 97
_EXACT_FLOAT = 2**53


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def check_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ValueError(f"modulus {p} is not prime")
    if p > MAX_PRIME:
        raise ValueError(f"modulus {p} exceeds the supported bound {MAX_PRIME}")
    return int(p)


class Fp:
    """A residue modulo a prime."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.p = check_prime(p)
        self.value = int(value) % self.p

    def _coerce(self, other) -> int:
        if isinstance(other, Fp):
            if other.p != self.p:
                raise ValueError("modulus mismatch")
            return other.value
        return int(other)

    def __add__(self, other):
        return Fp(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return Fp(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return Fp(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return Fp(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Fp(-self.value, self.p)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return Fp(pow(self.value, k, self.p), self.p)

    def inverse(self) -> Fp:
        if self.value == 0:
            raise ZeroDivisionError("zero has no inverse in F_p")
        return Fp(pow(self.value, self.p - 2, self.p), self.p)

    def __truediv__(self, other):
        return self * Fp(self._coerce(other), self.p).inverse()

    def __eq__(self, other):
        if isinstance(other, Fp):
            return self.p == other.p and self.value == other.value
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"Fp({self.value}, {self.p})"


def _mod_matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    inner = a.shape[1]
    if inner * (p - 1) ** 2 < _EXACT_FLOAT:
        # float64 BLAS is exact below 2^53 and far faster than integer matmul
        c = a.astype(np.float64) @ b.astype(np.float64)
        return np.rint(c).astype(np.int64) % p
    return (a @ b) % p


class FpMatrix:
    """Dense matrix over F_p."""

    __slots__ = ("p", "a")

    def __init__(self, data, p: int):
        self.p = check_prime(p)
        a = np.array(data, dtype=np.int64)
        if a.ndim != 2:
            raise ValueError("FpMatrix needs a two-dimensional array")
        self.a = a % self.p

    @classmethod
    def _wrap(cls, a: np.ndarray, p: int) -> FpMatrix:
        m = cls.__new__(cls)
        m.p = p
        m.a = a
        return m

    @classmethod
    def identity(cls, n: int, p: int) -> FpMatrix:
        return cls(np.eye(n, dtype=np.int64), p)

    @classmethod
    def zeros(cls, rows: int, cols: int, p: int) -> FpMatrix:
        return cls(np.zeros((rows, cols), dtype=np.int64), p)

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def _check(self, other: FpMatrix):
        if not isinstance(other, FpMatrix):
            raise TypeError("expected an FpMatrix")
        if other.p != self.p:
            raise ValueError("modulus mismatch")

    def __matmul__(self, other: FpMatrix) -> FpMatrix:
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return FpMatrix._wrap(_mod_matmul(self.a, other.a, self.p), self.p)

    def __add__(self, other: FpMatrix) -> FpMatrix:
        self._check(other)
        return FpMatrix._wrap((self.a + other.a) % self.p, self.p)

    def __sub__(self, other: FpMatrix) -> FpMatrix:
        self._check(other)
        return FpMatrix._wrap((self.a - other.a) % self.p, self.p)

    def __neg__(self) -> FpMatrix:
        return FpMatrix._wrap((-self.a) % self.p, self.p)

    def __mul__(self, c: int) -> FpMatrix:
        return FpMatrix._wrap((self.a * (int(c) % self.p)) % self.p, self.p)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> FpMatrix:
        if k < 0:
            return self.inverse() ** (-k)
        result = FpMatrix.identity(self.rows, self.p)
        base = self
        while k:
            if k & 1:
                result = result @ base
            base = base @ base
            k >>= 1
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, FpMatrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and bool(np.array_equal(self.a, other.a))

    __hash__ = None

    def __getitem__(self, idx):
        r = self.a[idx]
        if isinstance(r, np.ndarray):
            return FpMatrix._wrap(r if r.ndim == 2 else r.reshape(1, -1), self.p)
        return int(r)

    @property
    def T(self) -> FpMatrix:
        return FpMatrix._wrap(self.a.T.copy(), self.p)

    def tolist(self) -> list[list[int]]:
        return self.a.tolist()

    def is_identity(self) -> bool:
        return self.rows == self.cols and bool(np.array_equal(self.a, np.eye(self.rows, dtype=np.int64)))

    def is_upper_unitriangular(self) -> bool:
        a = self.a
        return (self.rows == self.cols and not np.tril(a, -1).any()
                and bool(np.all(np.diagonal(a) == 1)))

    def inverse(self) -> FpMatrix:
        """Gauss-Jordan inverse; raises ZeroDivisionError when singular."""
        n = self.rows
        if n != self.cols:
            raise ValueError("only square matrices are invertible")
        p = self.p
        aug = np.concatenate([self.a.copy(), np.eye(n, dtype=np.int64)], axis=1)
        for col in range(n):
            nz = np.nonzero(aug[col:, col])[0]
            if nz.size == 0:
                raise ZeroDivisionError("matrix is singular over F_p")
            piv = col + nz[0]
            if piv != col:
                aug[[col, piv]] = aug[[piv, col]]
            aug[col] = aug[col] * pow(int(aug[col, col]), p - 2, p) % p
            factors = aug[:, col].copy()
            factors[col] = 0
            aug = (aug - np.outer(factors, aug[col])) % p
        return FpMatrix._wrap(aug[:, n:].copy(), p)

    def rank(self) -> int:
        p = self.p
        a = self.a.copy()
        r = 0
        for col in range(a.shape[1]):
            if r == a.shape[0]:
                break
            nz = np.nonzero(a[r:, col])[0]
            if nz.size == 0:
                continue
            piv = r + nz[0]
            a[[r, piv]] = a[[piv, r]]
            a[r] = a[r] * pow(int(a[r, col]), p - 2, p) % p
            f = a[:, col].copy()
            f[r] = 0
            a = (a - np.outer(f, a[r])) % p
            r += 1
        return r

    def solve(self, b) -> np.ndarray | None:
        """Some x with ``self @ x = b``, or None if the system is inconsistent."""
        p = self.p
        rows, cols = self.shape
        rhs = np.asarray(b, dtype=np.int64).reshape(rows, 1) % p
        a = np.concatenate([self.a.copy(), rhs], axis=1)
        pivots = []
        r = 0
        for col in range(cols):
            if r == rows:
                break
            nz = np.nonzero(a[r:, col])[0]
            if nz.size == 0:
                continue
            piv = r + nz[0]
            a[[r, piv]] = a[[piv, r]]
            a[r] = a[r] * pow(int(a[r, col]), p - 2, p) % p
            f = a[:, col].copy()
            f[r] = 0
            a = (a - np.outer(f, a[r])) % p
            pivots.append(col)
            r += 1
        if a[r:, cols].any():
            return None
        x = np.zeros(cols, dtype=np.int64)
        for i, col in enumerate(pivots):
            x[col] = a[i, cols]
        return x

    def __repr__(self):
        return f"FpMatrix(p={self.p}, {self.a.tolist()})"


def kron(A: FpMatrix, B: FpMatrix) -> FpMatrix:
    """Kronecker product: ``(A⊗B)[i*rB+k, j*cB+l] = A[i,j]*B[k,l]``."""
    if A.p != B.p:
        raise ValueError("modulus mismatch")
    return FpMatrix._wrap(np.kron(A.a, B.a) % A.p, A.p)


def kron_power(A: FpMatrix, n: int) -> FpMatrix:
    out = FpMatrix.identity(1, A.p)
    for _ in range(n):
        out = kron(out, A)
    return out


def binomial_transition(p: int) -> tuple[FpMatrix, FpMatrix]:
    """``T[i][j] = C(p-1-i, j)`` and its inverse, the anti-diagonal transpose of T."""
    p = check_prime(p)
    T = [[comb(p - 1 - i, j) % p for j in range(p)] for i in range(p)]
    Tinv = [[T[p - 1 - j][p - 1 - i] for j in range(p)] for i in range(p)]
    return FpMatrix(T, p), FpMatrix(Tinv, p)


def sylvester(n: int) -> np.ndarray:
    """Un-normalized Walsh matrix ``H_n = [[H, H], [H, -H]]`` as Python ints."""
    if n < 0:
        raise ValueError("n must be non-negative")
    h = np.array([[1]], dtype=object)
    base = np.array([[1, 1], [1, -1]], dtype=object)
    for _ in range(n):
        h = np.kron(base, h)
    return h


# ---------------------------------------------------------------------------
# reduced polynomials


def _reduce_exp(e: int, p: int) -> int:
    # x^p = x, so every exponent >= p folds back into [1, p-1]
    if e < p:
        return e
    return (e - 1) % (p - 1) + 1


class ReducedPoly:
    """Element of F_p[x_1..x_n]/(x_i^p - x_i)."""

    __slots__ = ("p", "nvars", "terms")

    def __init__(self, p: int, nvars: int, terms: dict | None = None):
        self.p = check_prime(p)
        self.nvars = int(nvars)
        clean: dict[tuple[int, ...], int] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) < self.nvars:
                exps = exps + (0,) * (self.nvars - len(exps))
            elif len(exps) > self.nvars:
                if any(exps[self.nvars:]):
                    raise ValueError("exponent vector longer than nvars")
                exps = exps[: self.nvars]
            exps = tuple(_reduce_exp(int(e), self.p) for e in exps)
            v = (clean.get(exps, 0) + int(c)) % self.p
            if v:
                clean[exps] = v
            else:
                clean.pop(exps, None)
        self.terms = clean

    @classmethod
    def constant(cls, c: int, p: int, nvars: int = 0) -> ReducedPoly:
        return cls(p, nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, i: int, p: int, nvars: int | None = None) -> ReducedPoly:
        """The coordinate function x_i (1-indexed)."""
        n = i if nvars is None else nvars
        e = [0] * n
        e[i - 1] = 1
        return cls(p, n, {tuple(e): 1})

    def embed(self, nvars: int) -> ReducedPoly:
        if nvars < self.nvars:
            raise ValueError("cannot embed into fewer variables")
        return ReducedPoly(self.p, nvars, self.terms)

    def _align(self, other) -> tuple[ReducedPoly, ReducedPoly]:
        if isinstance(other, (int, np.integer, Fp)):
            other = ReducedPoly.constant(int(other), self.p, self.nvars)
        if not isinstance(other, ReducedPoly):
            raise TypeError("expected a ReducedPoly")
        if other.p != self.p:
            raise ValueError("modulus mismatch")
        n = max(self.nvars, other.nvars)
        return self.embed(n), other.embed(n)

    def __add__(self, other):
        a, b = self._align(other)
        t = dict(a.terms)
        for e, c in b.terms.items():
            t[e] = t.get(e, 0) + c
        return ReducedPoly(a.p, a.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return ReducedPoly(self.p, self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._align(other)[1])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._align(other)
        p = a.p
        out: dict[tuple[int, ...], int] = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(_reduce_exp(x + y, p) for x, y in zip(e1, e2))
                out[e] = (out.get(e, 0) + c1 * c2) % p
        return ReducedPoly(p, a.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = ReducedPoly.constant(1, self.p, self.nvars)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = ReducedPoly.constant(int(other), self.p, self.nvars)
        if not isinstance(other, ReducedPoly):
            return NotImplemented
        if other.p != self.p:
            return False
        a, b = self._align(other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.p, frozenset((tuple(e[: _last_nonzero(e)]), c) for e, c in self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, *point: int) -> int:
        return poly_eval(self, point)

    def coefficient(self, exps: Sequence[int]) -> int:
        exps = tuple(exps) + (0,) * (self.nvars - len(exps))
        return self.terms.get(exps, 0)

    def coefficient_vector(self, nvars: int | None = None) -> np.ndarray:
        """Coefficients indexed by ``sum k_i p^(i-1)``, the Kaloujnine index."""
        n = self.nvars if nvars is None else nvars
        v = np.zeros(self.p**n, dtype=np.int64)
        for e, c in self.embed(n).terms.items():
            v[monomial_index(e, self.p)] = c
        return v

    @classmethod
    def from_coefficient_vector(cls, vec, p: int, nvars: int) -> ReducedPoly:
        terms = {}
        for k, c in enumerate(np.asarray(vec).tolist()):
            if c % p:
                terms[monomial_exponents(k, p, nvars)] = c
        return cls(p, nvars, terms)

    def table(self, nvars: int | None = None) -> np.ndarray:
        """Values on F_p^n as an array with axis i-1 indexing x_i."""
        n = self.nvars if nvars is None else nvars
        return coefficients_to_table(self.coefficient_vector(n).reshape((self.p,) * n, order="F"), self.p)

    @classmethod
    def from_table(cls, table, p: int) -> ReducedPoly:
        t = np.asarray(table, dtype=np.int64) % p
        coeffs = table_to_coefficients(t, p)
        return cls.from_coefficient_vector(coeffs.reshape(-1, order="F"), p, t.ndim)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: monomial_index(e, self.p), reverse=True):
            c = self.terms[e]
            factors = []
            for i, k in enumerate(e):
                if k == 1:
                    factors.append(f"x{i + 1}")
                elif k > 1:
                    factors.append(f"x{i + 1}^{k}")
            if not factors:
                parts.append(str(c))
            elif c == 1:
                parts.append("*".join(factors))
            else:
                parts.append(f"{c}*" + "*".join(factors))
        return " + ".join(parts)

    def __repr__(self):
        return f"ReducedPoly(p={self.p}, nvars={self.nvars}, {self})"


def _last_nonzero(e: tuple[int, ...]) -> int:
    n = len(e)
    while n and e[n - 1] == 0:
        n -= 1
    return n


def monomial_index(exps: Sequence[int], p: int) -> int:
    return sum(int(k) * p**i for i, k in enumerate(exps))


def monomial_exponents(index: int, p: int, nvars: int) -> tuple[int, ...]:
    out = []
    for _ in range(nvars):
        index, r = divmod(index, p)
        out.append(r)
    if index:
        raise ValueError("index too large for the number of variables")
    return tuple(out)


def poly_add(f: ReducedPoly, g: ReducedPoly) -> ReducedPoly:
    return f + g


def poly_mul(f: ReducedPoly, g: ReducedPoly) -> ReducedPoly:
    return f * g


def poly_scale(f: ReducedPoly, c: int) -> ReducedPoly:
    return f * int(c)


def poly_eval(f: ReducedPoly, point: Sequence[int]) -> int:
    point = tuple(int(x) % f.p for x in point)
    if len(point) < f.nvars:
        raise ValueError(f"need {f.nvars} coordinates, got {len(point)}")
    total = 0
    for e, c in f.terms.items():
        term = c
        for x, k in zip(point, e):
            if k:
                term = term * pow(x, k, f.p)
        total += term
    return total % f.p


def delta_poly(t: int, p: int) -> ReducedPoly:
    """Indicator of the point t, normalized so that it takes the value 1 at t."""
    x = ReducedPoly.variable(1, p)
    out = ReducedPoly.constant(-1, p, 1)  # Wilson: prod_{s != t} (t - s) = (p-1)! = -1
    for s in range(p):
        if s != t:
            out = out * (x - s)
    return out


def reduced_interpolate(values: Sequence[int]) -> ReducedPoly:
    """One-variable reduced polynomial taking ``values[t]`` at t; p = len(values)."""
    p = len(values)
    check_prime(p)
    out = ReducedPoly(p, 1)
    for t, v in enumerate(values):
        if int(v) % p:
            out = out + delta_poly(t, p) * int(v)
    return out


def interpolation_matrix(p: int) -> np.ndarray:
    """M with ``coeffs = M @ values`` for one variable."""
    cols = [delta_poly(t, p).coefficient_vector(1) for t in range(p)]
    return np.array(cols, dtype=np.int64).T


def vandermonde(p: int) -> np.ndarray:
    """``V[x, k] = x^k`` with 0^0 = 1, so ``values = V @ coeffs``."""
    return np.array([[pow(x, k, p) for k in range(p)] for x in range(p)], dtype=np.int64)


def _apply_each_axis(t: np.ndarray, M: np.ndarray, p: int) -> np.ndarray:
    out = t
    for ax in range(t.ndim):
        out = np.moveaxis(np.tensordot(M, out, axes=([1], [ax])), 0, ax) % p
    return out


def table_to_coefficients(table: np.ndarray, p: int) -> np.ndarray:
    """Tensor interpolation: axis i of the output indexes the exponent of x_{i+1}."""
    return _apply_each_axis(np.asarray(table, dtype=np.int64), interpolation_matrix(p), p)


def coefficients_to_table(coeffs: np.ndarray, p: int) -> np.ndarray:
    return _apply_each_axis(np.asarray(coeffs, dtype=np.int64), vandermonde(p), p)


def all_points(p: int, n: int) -> Iterable[tuple[int, ...]]:
    """Points of F_p^n in little-endian order (x_1 varies fastest)."""
    for rev in product(range(p), repeat=n):
        yield tuple(reversed(rev))
