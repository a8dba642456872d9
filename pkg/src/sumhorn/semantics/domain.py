"""Finite domains, indexed state spaces and outcome values."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Mapping, Optional, Sequence

import numpy as np

from ..lang.ast import ARRAY, BOOL, Type


class BudgetExceeded(Exception):
    def __init__(self, size: int, budget: int):
        self.size, self.budget = size, budget
        super().__init__(f"state space of size {size} exceeds budget {budget}")


def base_name(name: str) -> str:
    """Program variable behind a decorated logical name such as ``x!o``."""
    return name.split("!", 1)[0]


@dataclass(frozen=True)
class Domain:
    """Per-variable finite ranges; ``ranges`` overrides the default ``lo..hi``."""

    lo: int = 0
    hi: int = 2
    arr_len: int = 2
    budget: int = 10**6
    ranges: tuple[tuple[str, int, int], ...] = ()

    def int_range(self, name: Optional[str] = None) -> range:
        if name is not None:
            b = base_name(name)
            for n, lo, hi in self.ranges:
                if n == b:
                    return range(lo, hi + 1)
        return range(self.lo, self.hi + 1)

    def values(self, ty: Type, name: Optional[str] = None) -> list:
        if ty == BOOL:
            return [False, True]
        r = self.int_range(name)
        if ty == ARRAY:
            return list(itertools.product(r, repeat=self.arr_len))
        return list(r)

    def contains(self, ty: Type, name: Optional[str], v) -> bool:
        if ty == BOOL:
            return isinstance(v, bool)
        r = self.int_range(name)
        if ty == ARRAY:
            return len(v) == self.arr_len and all(x in r for x in v)
        return v in r

    def with_range(self, name: str, lo: int, hi: int) -> "Domain":
        rest = tuple(r for r in self.ranges if r[0] != name)
        return Domain(self.lo, self.hi, self.arr_len, self.budget, rest + ((name, lo, hi),))


class State(Mapping):
    """Immutable variable assignment."""

    __slots__ = ("_items", "_d")

    def __init__(self, items=(), **kw):
        d = dict(items)
        d.update(kw)
        self._d = d
        self._items = tuple(sorted(d.items()))

    def __getitem__(self, k):
        return self._d[k]

    def __iter__(self):
        return iter(self._d)

    def __len__(self):
        return len(self._d)

    def __hash__(self):
        return hash(self._items)

    def __eq__(self, other):
        if isinstance(other, State):
            return self._items == other._items
        if isinstance(other, Mapping):
            return self._d == dict(other)
        return NotImplemented

    def __repr__(self):
        return "State(" + ", ".join(f"{k}={v!r}" for k, v in self._items) + ")"


@dataclass(frozen=True)
class Regular:
    state: State


@dataclass(frozen=True)
class _ErrorOutcome:
    def __repr__(self):
        return "Error"


Error = _ErrorOutcome()


@dataclass(frozen=True)
class Broke:
    state: State


Outcome = object  # Regular | Error | Broke


class StateSpace:
    """Mixed-radix indexing of all assignments to ``vars`` within ``dom``."""

    def __init__(self, vars: Sequence[tuple[str, Type]], dom: Domain, check_budget: bool = True):
        self.vars = tuple(vars)
        self.names = tuple(n for n, _ in self.vars)
        self.dom = dom
        self._vals = [dom.values(t, n) for n, t in self.vars]
        self._pos = [{v: i for i, v in enumerate(vs)} for vs in self._vals]
        self.radix = [len(vs) for vs in self._vals]
        size = 1
        for r in self.radix:
            size *= r
        self.size = size
        if check_budget and size > dom.budget:
            raise BudgetExceeded(size, dom.budget)
        self._states: Optional[list[tuple]] = None

    def __len__(self) -> int:
        return self.size

    def __repr__(self) -> str:
        return f"StateSpace({', '.join(self.names)}; {self.size} states)"

    def __eq__(self, other) -> bool:
        return isinstance(other, StateSpace) and self.vars == other.vars and self.dom == other.dom

    def __hash__(self) -> int:
        return hash((self.vars, self.dom))

    def tuples(self) -> list[tuple]:
        if self._states is None:
            self._states = list(itertools.product(*self._vals))
        return self._states

    def encode(self, values: Sequence) -> Optional[int]:
        """Index of a value tuple, or None if some component is out of range."""
        idx = 0
        for pos, r, v in zip(self._pos, self.radix, values):
            i = pos.get(v)
            if i is None:
                return None
            idx = idx * r + i
        return idx

    def decode(self, idx: int) -> tuple:
        return self.tuples()[idx]

    def index(self, state: Mapping) -> Optional[int]:
        return self.encode([state[n] for n in self.names])

    def state(self, idx: int) -> State:
        return State(zip(self.names, self.decode(idx)))

    def env(self, idx: int) -> dict:
        return dict(zip(self.names, self.decode(idx)))

    def states(self, mask=None) -> Iterator[State]:
        for i in range(self.size):
            if mask is None or mask[i]:
                yield self.state(i)

    # -- predicate helpers -----------------------------------------------
    def pred(self, fn) -> "PredSem":
        return np.array([bool(fn(self.state(i))) for i in range(self.size)], dtype=bool)

    def pred_of(self, states) -> "PredSem":
        m = np.zeros(self.size, dtype=bool)
        for s in states:
            i = self.index(s)
            if i is not None:
                m[i] = True
        return m

    def full(self) -> "PredSem":
        return np.ones(self.size, dtype=bool)

    def empty(self) -> "PredSem":
        return np.zeros(self.size, dtype=bool)

    def rel_of(self, pairs) -> "RelSem":
        m = np.zeros((self.size, self.size), dtype=bool)
        for a, b in pairs:
            i, j = self.index(a), self.index(b)
            if i is not None and j is not None:
                m[i, j] = True
        return m

    def rel(self, fn) -> "RelSem":
        sts = [self.state(i) for i in range(self.size)]
        return np.array([[bool(fn(a, b)) for b in sts] for a in sts], dtype=bool)

    def project(self, sub: "StateSpace"):
        """Index map from this space onto a sub-space over a subset of its variables."""
        cols = [self.names.index(n) for n in sub.names]
        out = np.empty(self.size, dtype=np.int64)
        for i, t in enumerate(self.tuples()):
            j = sub.encode([t[c] for c in cols])
            out[i] = -1 if j is None else j
        return out


PredSem = object  # numpy bool vector over a StateSpace
RelSem = object  # numpy bool matrix over StateSpace x StateSpace
