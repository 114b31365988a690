"""Orthogonal systems of n-ary operations.

A system of ``n`` n-ary operations ``f_1..f_n`` on ``{0..q-1}`` is orthogonal
when the joint map ``x -> (f_1(x), ..., f_n(x))`` is a bijection of ``Q^n``.
Such systems correspond one to one with permutations of the ``q**n``
argument tuples, which is how they are built and inverted here. Tuples are
ranked lexicographically, as in :mod:`quasicrypt.algebra`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algebra import OperationTable
from .rng import SplitMix64


class NotOrthogonalError(ValueError):
    pass


def _check_shapes(tables: Sequence[OperationTable], count: int | None = None) -> tuple[int, int]:
    if not tables:
        raise ValueError("empty system")
    n, q = tables[0].arity, tables[0].q
    for t in tables:
        if t.arity != n or t.q != q:
            raise ValueError("all tables must share arity and alphabet size")
    if count is not None and len(tables) != count:
        raise ValueError(f"expected {count} tables of arity {n}, got {len(tables)}")
    return n, q


def joint_ranks(tables: Sequence[OperationTable]) -> np.ndarray:
    """Rank of ``(f_1(x), ..., f_k(x))`` in ``Q^k`` for every argument rank x."""
    q = tables[0].q
    ranks = np.zeros(len(tables[0].values), dtype=np.int64)
    for t in tables:
        ranks = ranks * q + np.asarray(t.values, dtype=np.int64)
    return ranks


def find_collision(tables: Sequence[OperationTable]):
    """Two argument tuples with the same joint image, or None if injective."""
    n, q = _check_shapes(tables)
    if len(tables) != n:
        raise ValueError(f"an orthogonal system of arity {n} needs {n} tables")
    ranks = joint_ranks(tables)
    first_seen: dict[int, int] = {}
    for x, r in enumerate(ranks.tolist()):
        if r in first_seen:
            return tables[0].unrank(first_seen[r]), tables[0].unrank(x)
        first_seen[r] = x
    return None


def is_orthogonal_system(tables: Sequence[OperationTable]) -> bool:
    return find_collision(tables) is None


def is_k_orthogonal(tables: Sequence[OperationTable]) -> bool:
    """Every target k-tuple has exactly ``q**(n-k)`` preimages."""
    n, q = _check_shapes(tables)
    k = len(tables)
    if not 2 <= k <= n:
        raise ValueError(f"k={k} must lie in 2..{n}")
    counts = np.bincount(joint_ranks(tables), minlength=q ** k)
    return bool((counts == q ** (n - k)).all())


@dataclass(frozen=True)
class TuplePermutation:
    q: int
    arity: int
    image: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "image", tuple(int(v) for v in self.image))
        if sorted(self.image) != list(range(self.q ** self.arity)):
            raise ValueError("image is not a permutation of the tuple ranks")

    def inverse(self) -> "TuplePermutation":
        inv = [0] * len(self.image)
        for x, y in enumerate(self.image):
            inv[y] = x
        return TuplePermutation(self.q, self.arity, tuple(inv))

    def order(self) -> int:
        seen = [False] * len(self.image)
        result = 1
        for start in range(len(self.image)):
            length = 0
            x = start
            while not seen[x]:
                seen[x] = True
                x = self.image[x]
                length += 1
            if length:
                result = math.lcm(result, length)
        return result

    @classmethod
    def random(cls, q: int, arity: int, seed: int) -> "TuplePermutation":
        return cls(q, arity, tuple(SplitMix64(seed).permutation(q ** arity)))


@dataclass(frozen=True)
class OrthogonalSystem:
    tables: tuple[OperationTable, ...]

    def __post_init__(self):
        object.__setattr__(self, "tables", tuple(self.tables))
        collision = find_collision(self.tables)
        if collision is not None:
            a, b = collision
            raise NotOrthogonalError(f"joint map sends {a} and {b} to the same tuple")

    @property
    def arity(self) -> int:
        return self.tables[0].arity

    @property
    def q(self) -> int:
        return self.tables[0].q

    def __call__(self, *args: int) -> tuple[int, ...]:
        return tuple(t(*args) for t in self.tables)


def system_from_permutation(perm: TuplePermutation) -> OrthogonalSystem:
    q, n = perm.q, perm.arity
    coords = [[0] * len(perm.image) for _ in range(n)]
    for x, y in enumerate(perm.image):
        for i in range(n - 1, -1, -1):
            y, coords[i][x] = divmod(y, q)
    return OrthogonalSystem(tuple(OperationTable(n, q, tuple(c)) for c in coords))


def permutation_from_system(system: OrthogonalSystem | Sequence[OperationTable]) -> TuplePermutation:
    tables = system.tables if isinstance(system, OrthogonalSystem) else tuple(system)
    if not isinstance(system, OrthogonalSystem):
        collision = find_collision(tables)
        if collision is not None:
            raise NotOrthogonalError(f"not orthogonal: {collision}")
    return TuplePermutation(tables[0].q, tables[0].arity, tuple(joint_ranks(tables).tolist()))


def inverse_system(system: OrthogonalSystem) -> OrthogonalSystem:
    """The system B with ``B(A(x)) = x`` for every x in Q^n."""
    inverse = system_from_permutation(permutation_from_system(system).inverse())
    alphabet = system.tables[0].alphabet
    return OrthogonalSystem(tuple(t.with_alphabet(alphabet) for t in inverse.tables))


def projection_system(q: int, n: int) -> OrthogonalSystem:
    """The coordinate projections ``f_i(x) = x_i``."""
    return OrthogonalSystem(
        tuple(OperationTable.from_function(n, q, lambda *x, i=i: x[i]) for i in range(n))
    )


ENUMERATION_LIMIT = 8


def count_orthogonal_systems(q: int, n: int, samples: int | None = None, seed: int = 0) -> int:
    """Number of orthogonal systems of n n-ary operations on q symbols.

    For ``q**n <= 8`` every permutation of Q^n is turned into a system and
    checked (orthogonal, and mapping back to the same permutation). Larger
    sizes need ``samples``: that many seeded random permutations are checked
    the same way and ``(q**n)!`` is returned.
    """
    size = q ** n
    if size <= ENUMERATION_LIMIT:
        count = 0
        for image in itertools.permutations(range(size)):
            perm = TuplePermutation(q, n, image)
            if permutation_from_system(system_from_permutation(perm)) == perm:
                count += 1
        return count
    if samples is None:
        raise ValueError(f"q**n = {size} exceeds the enumeration limit {ENUMERATION_LIMIT}; pass samples")
    rng = SplitMix64(seed)
    for _ in range(samples):
        perm = TuplePermutation(q, n, tuple(rng.permutation(size)))
        if permutation_from_system(system_from_permutation(perm)) != perm:
            raise AssertionError(f"sampled permutation does not round trip: {perm}")
    return math.factorial(size)
