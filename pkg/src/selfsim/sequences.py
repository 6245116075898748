"""Automatic sequences, decimation kernels and Moore machines.

Digits are always consumed least significant first: the n-th term of a
system is found by walking the base-d digits of n from the root symbol.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

from .mealy import MealyMachine


@dataclass(frozen=True)
class SequenceSystem:
    """Finite d-decimation system; symbol s denotes a sequence."""

    d: int
    step: tuple[tuple[int, ...], ...]
    head: tuple
    root: int = 0
    names: tuple | None = field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.step)
        if len(self.head) != n or any(len(row) != self.d for row in self.step):
            raise ValueError("step and head must be total")
        if any(not 0 <= t < n for row in self.step for t in row):
            raise ValueError("step refers to an unknown symbol")

    def __len__(self) -> int:
        return len(self.step)

    @property
    def symbols(self) -> range:
        return range(len(self.step))

    @property
    def alphabet(self) -> set:
        return {h for h in self.head if h is not None}

    def rooted(self, s: int) -> SequenceSystem:
        return SequenceSystem(self.d, self.step, self.head, s, self.names)

    def term(self, n: int):
        return term(self, n)

    def prefix(self, length: int, start: int = 0) -> list:
        return [term(self, n) for n in range(start, start + length)]


def term(sys: SequenceSystem, n: int):
    """Letter n: follow the base-d digits of n (least significant first)."""
    if n < 0:
        raise ValueError("index must be non-negative")
    s = sys.root
    while n:
        n, r = divmod(n, sys.d)
        s = sys.step[s][r]
    h = sys.head[s]
    if h is None:
        raise ValueError("term undefined at this index")
    return h


def thue_morse() -> SequenceSystem:
    return SequenceSystem(2, ((0, 1), (1, 0)), (0, 1), 0, ("t", "t'"))


def constant(value, d: int = 2) -> SequenceSystem:
    return SequenceSystem(d, ((0,) * d,), (value,))


def decimate(seq: Sequence, d: int) -> list[tuple]:
    """The d subsequences ``(a_i, a_{i+d}, ...)``, each cut to ``len(seq) // d``."""
    L = len(seq) // d
    if L == 0:
        raise ValueError("prefix shorter than d")
    return [tuple(seq[i + d * k] for k in range(L)) for i in range(d)]


def interleave(parts: Sequence[Sequence]) -> tuple:
    d = len(parts)
    L = min(len(p) for p in parts)
    return tuple(parts[k % d][k // d] for k in range(d * L))


class KernelCapError(RuntimeError):
    pass


def kernel(oracle: Callable[[int], Hashable], d: int, prefix_len: int, cap: int = 1000) -> SequenceSystem:
    """Decimation closure, identifying subsequences by a finite prefix.

    A candidate ``n -> oracle(mult*n + offset)`` is merged with an earlier
    one when their first ``prefix_len`` terms agree.  This is a heuristic:
    a short prefix can merge genuinely different sequences.
    """
    if d < 2 or prefix_len < 1:
        raise ValueError("need d >= 2 and a positive prefix length")
    cache: dict[int, Hashable] = {}

    def val(n: int):
        if n not in cache:
            cache[n] = oracle(n)
        return cache[n]

    def pref(mult: int, off: int) -> tuple:
        return tuple(val(mult * n + off) for n in range(prefix_len))

    index: dict[tuple, int] = {}
    reps: list[tuple[int, int]] = []
    heads: list = []
    steps: list[list[int]] = []

    def intern(mult: int, off: int) -> int:
        key = pref(mult, off)
        s = index.get(key)
        if s is None:
            if len(reps) >= cap:
                raise KernelCapError(f"kernel exceeded {cap} symbols")
            s = len(reps)
            index[key] = s
            reps.append((mult, off))
            heads.append(key[0])
            steps.append([])
        return s

    intern(1, 0)
    k = 0
    while k < len(reps):
        mult, off = reps[k]
        steps[k] = [intern(mult * d, off + i * mult) for i in range(d)]
        k += 1
    return SequenceSystem(d, tuple(tuple(r) for r in steps), tuple(heads), 0)


def _alpha_parts(alpha) -> tuple[list[int], list[int]]:
    if hasattr(alpha, "preperiod") and hasattr(alpha, "period"):
        return list(alpha.preperiod), list(alpha.period)
    pre, per = alpha
    return list(pre), list(per)


def toeplitz_from_alpha(alpha, p: int) -> SequenceSystem:
    """System for ``n -> alpha[v_p(n)]`` (n >= 1), v_p the p-adic valuation.

    ``alpha`` is an object with ``preperiod``/``period`` or a pair of lists.
    """
    pre, per = _alpha_parts(alpha)
    if not per:
        raise ValueError("period must be non-empty")
    M, L = len(pre), len(per)
    seq = pre + per
    values = sorted(set(int(v) % p for v in seq))
    vid = {v: M + L + i for i, v in enumerate(values)}
    step, head = [], []
    for k in range(M + L):
        nxt = k + 1 if k + 1 < M + L else M
        step.append((nxt,) + (vid[int(seq[k]) % p],) * (p - 1))
        head.append(None)
    for v in values:
        step.append((vid[v],) * p)
        head.append(v)
    names = tuple(f"z{k}" for k in range(M + L)) + tuple(f"v{v}" for v in values)
    return SequenceSystem(p, tuple(step), tuple(head), 0, names)


@dataclass(frozen=True)
class MooreMachine:
    """Output depends only on the state; ``run`` emits one letter per input letter."""

    states: tuple
    inputs: tuple[int, ...]
    output: dict = field(repr=False)
    transition: dict = field(repr=False)
    initial: Hashable = None

    def __len__(self) -> int:
        return len(self.states)

    def run(self, word: Sequence[int]) -> tuple:
        q = self.initial
        out = []
        for x in word:
            q = self.transition[(q, x)]
            out.append(self.output[q])
        return tuple(out)


def mealy_run(m: MealyMachine, initial: str, word: Sequence[int]) -> tuple[int, ...]:
    q = initial
    out = []
    for x in word:
        out.append(m.output[(q, x)])
        q = m.transition[(q, x)]
    return tuple(out)


def mealy_to_moore(m: MealyMachine, initial: str) -> MooreMachine:
    """Moore machine on ``Q x X`` plus a start state with the same word function.

    State ``(q, x)`` records the Mealy state *before* reading x together with
    x, so its output is ``tau(q, x)``.
    """
    if initial not in m.states:
        raise ValueError(f"unknown state {initial!r}")
    X = tuple(range(m.d))
    start = "p0"
    states = (start,) + tuple((q, x) for q in m.states for x in X)
    transition, output = {}, {start: None}
    for x in X:
        transition[(start, x)] = (initial, x)
    for q in m.states:
        for x1 in X:
            output[(q, x1)] = m.output[(q, x1)]
            nq = m.transition[(q, x1)]
            for x2 in X:
                transition[((q, x1), x2)] = (nq, x2)
    return MooreMachine(states, X, output, transition, start)
