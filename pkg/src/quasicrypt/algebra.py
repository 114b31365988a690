"""Finite n-ary groupoids and quasigroups stored as explicit tables.

Symbols are the integers ``0..q-1``. An n-ary operation is kept as a flat
tuple of ``q**n`` results indexed by the lexicographic rank of the argument
tuple, first argument most significant. For a ternary operation this is the
familiar layout of ``q`` Cayley tables ``A_x1(x2, x3)`` printed one after
another; for a binary one it is the Cayley table read row by row (row = first
argument).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .rng import SplitMix64


class QuasigroupError(ValueError):
    """Raised when a table is required to be a quasigroup and is not."""


@dataclass(frozen=True)
class Alphabet:
    q: int
    symbols: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.q < 2:
            raise ValueError(f"alphabet needs at least 2 symbols, got q={self.q}")
        if self.symbols is not None:
            if len(self.symbols) != self.q or len(set(self.symbols)) != self.q:
                raise ValueError("symbol map must list q distinct symbols")

    def encode(self, token: str) -> int:
        if self.symbols is None:
            value = int(token)
            if not 0 <= value < self.q:
                raise ValueError(f"symbol {value} out of range for q={self.q}")
            return value
        try:
            return self.symbols.index(token)
        except ValueError:
            raise ValueError(f"unknown symbol {token!r}") from None

    def decode(self, value: int) -> str:
        return str(value) if self.symbols is None else self.symbols[value]


@dataclass(frozen=True)
class OperationTable:
    arity: int
    q: int
    values: tuple[int, ...]
    alphabet: Alphabet | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("arity must be positive")
        if self.q < 2:
            raise ValueError("q must be at least 2")
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if len(self.values) != self.q ** self.arity:
            raise ValueError(
                f"expected {self.q ** self.arity} values for n={self.arity}, q={self.q}, "
                f"got {len(self.values)}"
            )
        bad = [v for v in self.values if not 0 <= v < self.q]
        if bad:
            raise ValueError(f"table value {bad[0]} outside 0..{self.q - 1}")
        if self.alphabet is not None and self.alphabet.q != self.q:
            raise ValueError("alphabet size does not match q")

    @classmethod
    def from_array(cls, array, alphabet: Alphabet | None = None):
        arr = np.asarray(array)
        return cls(arr.ndim, arr.shape[0], tuple(arr.ravel().tolist()), alphabet)

    @classmethod
    def from_function(cls, arity: int, q: int, fn, alphabet: Alphabet | None = None):
        values = [fn(*args) for args in itertools.product(range(q), repeat=arity)]
        return cls(arity, q, tuple(values), alphabet)

    def rank(self, args: Sequence[int]) -> int:
        if len(args) != self.arity:
            raise ValueError(f"expected {self.arity} arguments, got {len(args)}")
        r = 0
        for x in args:
            if not 0 <= x < self.q:
                raise ValueError(f"symbol {x} out of range for q={self.q}")
            r = r * self.q + x
        return r

    def unrank(self, r: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.arity):
            r, x = divmod(r, self.q)
            out.append(x)
        return tuple(reversed(out))

    def __call__(self, *args: int) -> int:
        return self.values[self.rank(args)]

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=np.int64).reshape((self.q,) * self.arity)

    def argument_tuples(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(range(self.q), repeat=self.arity)

    def with_alphabet(self, alphabet: Alphabet | None):
        return type(self)(self.arity, self.q, self.values, alphabet)


@dataclass(frozen=True)
class QuasigroupKey(OperationTable):
    """An operation table checked to be an n-ary quasigroup."""

    def __post_init__(self):
        super().__post_init__()
        violation = quasigroup_violation(self)
        if violation is not None:
            raise QuasigroupError(f"not a quasigroup: {violation}")

    @classmethod
    def from_table(cls, table: OperationTable) -> "QuasigroupKey":
        if isinstance(table, QuasigroupKey):
            return table
        return cls(table.arity, table.q, table.values, table.alphabet)


@dataclass(frozen=True)
class Violation:
    """Witness that argument ``position`` (1-based) is not uniquely solvable.

    ``fixed`` is the argument tuple with ``None`` in the free slot; ``result``
    is the target value and ``solutions`` the values of the free argument
    reaching it (none, or more than one).
    """

    position: int
    fixed: tuple
    result: int
    solutions: tuple[int, ...]

    def __str__(self):
        args = ", ".join("_" if x is None else str(x) for x in self.fixed)
        return (
            f"A({args}) = {self.result} has {len(self.solutions)} solutions "
            f"{list(self.solutions)} in argument {self.position}"
        )


def evaluate(table: OperationTable, args: Sequence[int]) -> int:
    return table.values[table.rank(args)]


def quasigroup_violation(table: OperationTable) -> Violation | None:
    """Return the first witness against the quasigroup property, or None."""
    arr = table.as_array()
    q, n = table.q, table.arity
    expected = np.arange(q)
    for axis in range(n):
        moved = np.moveaxis(arr, axis, -1).reshape(-1, q)
        good = (np.sort(moved, axis=1) == expected).all(axis=1)
        if good.all():
            continue
        line = int(np.flatnonzero(~good)[0])
        others = np.unravel_index(line, (q,) * (n - 1)) if n > 1 else ()
        fixed = [int(x) for x in others]
        fixed.insert(axis, None)
        row = moved[line].tolist()
        counts = np.bincount(moved[line], minlength=q)
        # prefer a target hit twice; that gives a two-solution witness
        target = int(np.argmax(counts)) if counts.max() > 1 else int(np.argmin(counts))
        solutions = tuple(x for x, v in enumerate(row) if v == target)
        return Violation(axis + 1, tuple(fixed), target, solutions)
    return None


def is_quasigroup(table: OperationTable) -> bool:
    return quasigroup_violation(table) is None


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_permutation(sigma, degree: int) -> tuple[int, ...]:
    """Turn cycle notation into a 0-based image tuple on ``degree`` points.

    Accepts strings such as ``"(23)"``, ``"(123)"``, ``"(1,4)"``, ``"()"``
    or ``"e"``, or an already-built 0-based image tuple.
    """
    if not isinstance(sigma, str):
        image = tuple(int(x) for x in sigma)
        if sorted(image) != list(range(degree)):
            raise ValueError(f"{sigma!r} is not a permutation of {degree} points")
        return image
    text = sigma.replace(" ", "")
    image = list(range(degree))
    if text in ("", "e", "id", "()"):
        return tuple(image)
    cycles = _CYCLE_RE.findall(text)
    if not cycles or "".join(f"({c})" for c in cycles) != text:
        raise ValueError(f"cannot parse permutation {sigma!r}")
    seen: set[int] = set()
    for cycle in cycles:
        points = [int(p) for p in (cycle.split(",") if "," in cycle else cycle)]
        if any(not 1 <= p <= degree for p in points) or seen & set(points):
            raise ValueError(f"bad cycle ({cycle}) for degree {degree}; cycles must be disjoint")
        if len(set(points)) != len(points):
            raise ValueError(f"repeated point in cycle ({cycle})")
        seen.update(points)
        for a, b in zip(points, points[1:] + points[:1]):
            image[a - 1] = b - 1
    return tuple(image)


BINARY_PARASTROPHES = ("(12)", "(13)", "(23)", "(123)", "(132)")


def parastrophe(key: OperationTable, sigma) -> QuasigroupKey:
    """Table of the sigma-parastrophe of an n-ary quasigroup.

    With ``A(x_1, ..., x_n) = x_{n+1}`` the parastrophe is defined by
    ``B(x_{s(1)}, ..., x_{s(n)}) = x_{s(n+1)}``.
    """
    if not isinstance(key, QuasigroupKey):
        violation = quasigroup_violation(key)
        if violation is not None:
            raise QuasigroupError(f"parastrophe of a non-quasigroup: {violation}")
    n, q = key.arity, key.q
    s = parse_permutation(sigma, n + 1)
    out = [0] * (q ** n)
    for args, value in zip(key.argument_tuples(), key.values):
        full = args + (value,)
        r = 0
        for i in range(n):
            r = r * q + full[s[i]]
        out[r] = full[s[n]]
    return QuasigroupKey(n, q, tuple(out), key.alphabet)


def binary_parastrophe(key: OperationTable, sigma) -> QuasigroupKey:
    if key.arity != 2:
        raise ValueError("binary_parastrophe needs a binary operation")
    return parastrophe(key, sigma)


def inverse_op(key: OperationTable, i: int | None = None) -> QuasigroupKey:
    """The i-th inverse operation, solving ``A(...) = x_{n+1}`` for argument i.

    ``i`` is 1-based and defaults to the last argument.
    """
    n = key.arity
    i = n if i is None else i
    if not 1 <= i <= n:
        raise ValueError(f"position {i} outside 1..{n}")
    return parastrophe(key, f"({i},{n + 1})")


def check_parastrophe_equality(key: OperationTable, sigma) -> bool:
    return binary_parastrophe(key, sigma).values == tuple(key.values)


def left_inverse_property(key: OperationTable) -> bool:
    """Exhaustive test of ``A(x, A(x, y)) == y``."""
    q = key.q
    return all(key(x, key(x, y)) == y for x in range(q) for y in range(q))


@dataclass(frozen=True)
class Translation:
    prefix: tuple[int, ...] | None
    mapping: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.mapping[x]

    def is_bijection(self) -> bool:
        return sorted(self.mapping) == list(range(len(self.mapping)))

    def inverse(self) -> tuple[int, ...]:
        inv = [0] * len(self.mapping)
        for x, y in enumerate(self.mapping):
            inv[y] = x
        return tuple(inv)


def translation_of(key: OperationTable, prefix: Sequence[int]) -> Translation:
    prefix = tuple(prefix)
    if len(prefix) != key.arity - 1:
        raise ValueError(f"prefix must have length {key.arity - 1}")
    base = key.rank(prefix + (0,))
    return Translation(prefix, key.values[base:base + key.q])


def random_quasigroup(q: int, n: int, seed: int) -> QuasigroupKey:
    """Seeded isotope of the n-ary group ``x_1 + ... + x_n`` over Z_q.

    One random permutation per argument and one on the result, drawn in that
    order from :class:`SplitMix64`. Always a quasigroup; not uniform over all
    quasigroups of the given size.
    """
    if q < 2 or n < 2:
        raise ValueError("need q >= 2 and n >= 2")
    rng = SplitMix64(seed)
    arg_perms = [rng.permutation(q) for _ in range(n)]
    result_perm = rng.permutation(q)
    values = [
        result_perm[sum(p[x] for p, x in zip(arg_perms, args)) % q]
        for args in itertools.product(range(q), repeat=n)
    ]
    return QuasigroupKey(n, q, tuple(values))
