"""Linear quasigroups ``x o y = k*x + m*y + a`` over Z_p and parastrophe orthogonality.

Two routes decide whether such a quasigroup is orthogonal to one of its five
non-trivial parastrophes:

* :func:`t1_criterion`, arithmetic on the coefficients (a nonzero scalar
  mod p is a permutation of Z_p);
* :func:`brute_force_ortho`, building the parastrophe table and testing the
  pair map for injectivity.

For arbitrary binary quasigroups :func:`th2_cancellation_check` evaluates the
matching cancellation law directly on the table.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import BINARY_PARASTROPHES, OperationTable, QuasigroupKey, binary_parastrophe


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class LinearQuasigroupSpec:
    p: int
    k: int
    m: int
    a: int = 0

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")
        for name in ("k", "m", "a"):
            object.__setattr__(self, name, getattr(self, name) % self.p)
        if self.k == 0 or self.m == 0:
            raise ValueError("k and m must be nonzero mod p")

    @classmethod
    def parse(cls, text: str) -> "LinearQuasigroupSpec":
        """Parse ``p:k:m:a`` (``a`` optional)."""
        parts = text.strip().split(":")
        if len(parts) not in (3, 4):
            raise ValueError(f"expected p:k:m:a, got {text!r}")
        return cls(*(int(x) for x in parts))

    def __str__(self):
        return f"{self.p}:{self.k}:{self.m}:{self.a}"


@dataclass(frozen=True)
class ParastropheOrthoReport:
    verdicts: dict = field(hash=False)
    method: str

    def __getitem__(self, sigma: str) -> bool:
        return self.verdicts[sigma]

    def all_orthogonal(self) -> bool:
        return all(self.verdicts.values())


def materialize(spec: LinearQuasigroupSpec) -> QuasigroupKey:
    p, k, m, a = spec.p, spec.k, spec.m, spec.a
    values = [(k * x + m * y + a) % p for x in range(p) for y in range(p)]
    return QuasigroupKey(2, p, tuple(values))


def t1_conditions(spec: LinearQuasigroupSpec) -> dict[str, tuple[int, ...]]:
    """Scalars (mod p) that must all be nonzero for each parastrophe."""
    p, k, m = spec.p, spec.k, spec.m
    return {
        "(12)": ((k - m) % p, (k + m) % p),
        "(13)": ((1 + k) % p,),
        "(23)": ((1 + m) % p,),
        "(123)": ((k + m * m) % p,),
        "(132)": ((k * k + m) % p,),
    }


def t1_criterion(spec: LinearQuasigroupSpec) -> ParastropheOrthoReport:
    verdicts = {s: all(c != 0 for c in cs) for s, cs in t1_conditions(spec).items()}
    return ParastropheOrthoReport(verdicts, "criterion")


def brute_force_ortho(key: OperationTable, sigma: str) -> bool:
    """Is (x, y) -> (A(x, y), sA(x, y)) injective on Q^2?"""
    other = binary_parastrophe(key, sigma)
    pairs = set(zip(key.values, other.values))
    return len(pairs) == len(key.values)


def brute_force_report(key: OperationTable) -> ParastropheOrthoReport:
    return ParastropheOrthoReport(
        {s: brute_force_ortho(key, s) for s in BINARY_PARASTROPHES}, "brute force"
    )


def _cancellation_terms(key: OperationTable, sigma: str):
    """Return f(x, z) whose injectivity in x (for every z) matches A _|_ sA."""
    q = key.q
    mul = key.values
    ldiv = binary_parastrophe(key, "(23)").values  # x \ z

    def op(x, y):
        return mul[x * q + y]

    if sigma == "(12)":
        return lambda x, z: op(ldiv[x * q + z], x)  # (x\z)·x
    if sigma == "(13)":
        return lambda x, z: op(op(z, x), x)  # zx·x
    if sigma == "(23)":
        return lambda x, z: op(x, op(x, z))  # x·xz
    if sigma == "(123)":
        return lambda x, z: op(x, op(z, x))  # x·zx
    if sigma == "(132)":
        return lambda x, z: op(op(x, z), x)  # xz·x
    raise ValueError(f"unknown parastrophe {sigma!r}")


def th2_cancellation_check(key: OperationTable, sigma: str) -> bool:
    """Exhaustively test ``f(x, z) = f(y, z) => x = y`` for the law of ``sigma``."""
    if key.arity != 2:
        raise ValueError("binary quasigroup required")
    f = _cancellation_terms(QuasigroupKey.from_table(key), sigma)
    q = key.q
    for z in range(q):
        if len({f(x, z) for x in range(q)}) != q:
            return False
    return True
