"""Quasigroup stream ciphers and the orthogonal-system block cipher.

Messages are plain sequences of integer symbols ``0..q-1``; every function
returns a new list. Engines:

* binary stream: ``v_1 = A(l, u_1)``, ``v_i = A(v_{i-1}, u_i)``;
* n-ary stream: the first ``n-1`` symbols are chained off consecutive
  ``(n-1)``-prefixes of the leader block, later ones off the previous
  ``n-1`` cipher symbols;
* block: ``v_i = f_i(u_1..u_n)`` for an orthogonal system, optionally
  iterated;
* leader fan: ``n-1`` arguments of the system are fixed leaders, each plain
  symbol yields ``n`` cipher symbols;
* mixed: the n-ary stream and the block engine alternate over segments whose
  lengths come from a digit schedule.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .algebra import OperationTable, QuasigroupKey, inverse_op
from .orthogonality import OrthogonalSystem, inverse_system


class TamperError(ValueError):
    """Decryption recovered leaders other than the agreed ones."""


def _check_symbols(symbols: Sequence[int], q: int) -> list[int]:
    out = list(symbols)
    for s in out:
        if not 0 <= s < q:
            raise ValueError(f"symbol {s} out of range for q={q}")
    return out


def encrypt_binary(key: OperationTable, leader: int, plain: Sequence[int]) -> list[int]:
    if key.arity != 2:
        raise ValueError("binary engine needs a binary quasigroup")
    key = QuasigroupKey.from_table(key)
    q, table = key.q, key.values
    prev = _check_symbols([leader], q)[0]
    out = []
    for u in _check_symbols(plain, q):
        prev = table[prev * q + u]
        out.append(prev)
    return out


def decrypt_binary(key: OperationTable, leader: int, cipher: Sequence[int]) -> list[int]:
    if key.arity != 2:
        raise ValueError("binary engine needs a binary quasigroup")
    ldiv = inverse_op(key, 2)
    q, table = ldiv.q, ldiv.values
    prev = _check_symbols([leader], q)[0]
    out = []
    for v in _check_symbols(cipher, q):
        out.append(table[prev * q + v])
        prev = v
    return out


@dataclass(frozen=True)
class LeaderBlock:
    """The ``(n-1)**2`` leaders; prefix j (0-based) is ``leaders[j(n-1):(j+1)(n-1)]``."""

    arity: int
    leaders: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "leaders", tuple(int(x) for x in self.leaders))
        need = (self.arity - 1) ** 2
        if len(self.leaders) != need:
            raise ValueError(f"arity {self.arity} needs {need} leaders, got {len(self.leaders)}")

    def prefix(self, j: int) -> tuple[int, ...]:
        w = self.arity - 1
        return self.leaders[j * w:(j + 1) * w]

    def prefixes(self) -> list[tuple[int, ...]]:
        return [self.prefix(j) for j in range(self.arity - 1)]


def _leader_block(key: OperationTable, leaders) -> LeaderBlock:
    if isinstance(leaders, LeaderBlock):
        block = leaders
    elif isinstance(leaders, int):
        block = LeaderBlock(key.arity, (leaders,))
    else:
        block = LeaderBlock(key.arity, tuple(leaders))
    if block.arity != key.arity:
        raise ValueError("leader block arity does not match the key")
    _check_symbols(block.leaders, key.q)
    return block


@dataclass(frozen=True)
class StreamState:
    """Chaining state of the n-ary stream between calls.

    ``position`` counts symbols already processed; ``window`` holds the last
    cipher symbols (at most ``n-1``).
    """

    position: int = 0
    window: tuple[int, ...] = ()


def _run_stream(table, q, n, block, symbols, state, decrypt):
    position, window = state.position, list(state.window)
    out = []
    for s in symbols:
        if position < n - 1:
            prefix = block.prefix(position)
        else:
            prefix = window
        r = 0
        for x in prefix:
            r = r * q + x
        r = r * q + s
        result = table[r]
        out.append(result)
        window.append(s if decrypt else result)
        if len(window) > n - 1:
            del window[0]
        position += 1
    return out, StreamState(position, tuple(window))


def encrypt_nary_stream(key, leaders, plain, state: StreamState | None = None):
    """Encrypt continuing from ``state``; returns ``(cipher, new_state)``."""
    key = QuasigroupKey.from_table(key)
    block = _leader_block(key, leaders)
    return _run_stream(key.values, key.q, key.arity, block, _check_symbols(plain, key.q),
                       state or StreamState(), decrypt=False)


def decrypt_nary_stream(key, leaders, cipher, state: StreamState | None = None, inverse=None):
    inverse = inverse if inverse is not None else inverse_op(key, key.arity)
    block = _leader_block(key, leaders)
    return _run_stream(inverse.values, key.q, key.arity, block, _check_symbols(cipher, key.q),
                       state or StreamState(), decrypt=True)


def encrypt_nary(key: OperationTable, leaders, plain: Sequence[int]) -> list[int]:
    return encrypt_nary_stream(key, leaders, plain)[0]


def decrypt_nary(key: OperationTable, leaders, cipher: Sequence[int]) -> list[int]:
    return decrypt_nary_stream(key, leaders, cipher)[0]


# -- block cipher ------------------------------------------------------------

def _apply_system(system: OrthogonalSystem, block: Sequence[int]) -> list[int]:
    n, q = system.arity, system.q
    if len(block) != n:
        raise ValueError(f"block must have {n} symbols, got {len(block)}")
    r = 0
    for x in _check_symbols(block, q):
        r = r * q + x
    return [t.values[r] for t in system.tables]


def encrypt_block(system: OrthogonalSystem, block: Sequence[int]) -> list[int]:
    return _apply_system(system, block)


def decrypt_block(system: OrthogonalSystem, block: Sequence[int], inverse=None) -> list[int]:
    return _apply_system(inverse or inverse_system(system), block)


def encrypt_block_rounds(system: OrthogonalSystem, block: Sequence[int], rounds: int) -> list[int]:
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    out = list(block)
    for _ in range(rounds):
        out = _apply_system(system, out)
    return out


def decrypt_block_rounds(system: OrthogonalSystem, block: Sequence[int], rounds: int,
                         inverse=None) -> list[int]:
    if rounds < 1:
        raise ValueError("rounds must be at least 1")
    inverse = inverse or inverse_system(system)
    out = list(block)
    for _ in range(rounds):
        out = _apply_system(inverse, out)
    return out


def pad_block(symbols: Sequence[int], n: int) -> list[int]:
    """Fill a short final block by cycling through its own symbols."""
    symbols = list(symbols)
    if not symbols:
        raise ValueError("cannot pad an empty block")
    return list(itertools.islice(itertools.cycle(symbols), n))


def encrypt_blocks(system: OrthogonalSystem, plain: Sequence[int], rounds: int = 1) -> list[int]:
    """Encrypt a whole message; output length is ``n * ceil(len/n)``."""
    n = system.arity
    plain = list(plain)
    out = []
    for start in range(0, len(plain), n):
        out.extend(encrypt_block_rounds(system, pad_block(plain[start:start + n], n), rounds))
    return out


def decrypt_blocks(system: OrthogonalSystem, cipher: Sequence[int], length: int,
                   rounds: int = 1, inverse=None) -> list[int]:
    n = system.arity
    cipher = list(cipher)
    if len(cipher) != n * math.ceil(length / n):
        raise ValueError(f"{len(cipher)} cipher symbols cannot hold {length} plain symbols")
    inverse = inverse or inverse_system(system)
    out = []
    for start in range(0, len(cipher), n):
        out.extend(decrypt_block_rounds(system, cipher[start:start + n], rounds, inverse))
    return out[:length]


# -- leader fan --------------------------------------------------------------

def _fan_leaders(system: OrthogonalSystem, fixed: Sequence[int]) -> tuple[int, ...]:
    fixed = tuple(_check_symbols(fixed, system.q))
    if len(fixed) != system.arity - 1:
        raise ValueError(f"need {system.arity - 1} fixed leaders, got {len(fixed)}")
    return fixed


def encrypt_with_leaders(system: OrthogonalSystem, fixed: Sequence[int], u: int) -> list[int]:
    return _apply_system(system, _fan_leaders(system, fixed) + (u,))


def decrypt_with_leaders(system: OrthogonalSystem, fixed: Sequence[int], block: Sequence[int],
                         inverse=None) -> int:
    fixed = _fan_leaders(system, fixed)
    solved = _apply_system(inverse or inverse_system(system), block)
    if tuple(solved[:-1]) != fixed:
        raise TamperError(f"recovered leaders {tuple(solved[:-1])} differ from {fixed}")
    return solved[-1]


def encrypt_leaderfan(system: OrthogonalSystem, fixed: Sequence[int], plain: Sequence[int]) -> list[int]:
    out = []
    for u in plain:
        out.extend(encrypt_with_leaders(system, fixed, u))
    return out


def decrypt_leaderfan(system: OrthogonalSystem, fixed: Sequence[int], cipher: Sequence[int]) -> list[int]:
    n = system.arity
    cipher = list(cipher)
    if len(cipher) % n:
        raise ValueError(f"leader-fan ciphertext length must be a multiple of {n}")
    inverse = inverse_system(system)
    return [decrypt_with_leaders(system, fixed, cipher[i:i + n], inverse)
            for i in range(0, len(cipher), n)]


# -- mixed schedule ----------------------------------------------------------

STREAM = "stream"
BLOCK = "block"


@dataclass(frozen=True)
class MixSchedule:
    """Segment lengths, used cyclically; engines alternate starting with the stream."""

    digits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(int(d) for d in self.digits))
        if not self.digits or any(d < 1 for d in self.digits):
            raise ValueError("schedule needs at least one digit, all >= 1")

    @classmethod
    def parse(cls, text: str) -> "MixSchedule":
        """``"4 5"``, ``"4,5"`` or a bare digit string like ``"31415"``."""
        text = text.strip()
        if any(sep in text for sep in " ,"):
            return cls(tuple(int(t) for t in text.replace(",", " ").split()))
        return cls(tuple(int(c) for c in text))

    def segments(self, length: int) -> list[tuple[str, int]]:
        out = []
        done = 0
        for i in itertools.count():
            if done >= length:
                break
            d = min(self.digits[i % len(self.digits)], length - done)
            out.append((STREAM if i % 2 == 0 else BLOCK, d))
            done += d
        return out


def _cipher_length(engine: str, plain_len: int, n: int) -> int:
    return plain_len if engine == STREAM else n * math.ceil(plain_len / n)


def encrypt_mixed(nkey: OperationTable, leaders, system: OrthogonalSystem,
                  schedule: MixSchedule, plain: Sequence[int], rounds: int = 1):
    """Returns ``(cipher, trace)``; trace lists ``(engine, plain_len, cipher_len)``."""
    if nkey.q != system.q:
        raise ValueError("stream key and orthogonal system use different alphabets")
    plain = _check_symbols(plain, nkey.q)
    state = StreamState()
    cipher: list[int] = []
    trace = []
    pos = 0
    for engine, d in schedule.segments(len(plain)):
        segment = plain[pos:pos + d]
        if engine == STREAM:
            out, state = encrypt_nary_stream(nkey, leaders, segment, state)
        else:
            out = encrypt_blocks(system, segment, rounds)
        cipher.extend(out)
        trace.append((engine, d, len(out)))
        pos += d
    return cipher, trace


def decrypt_mixed(nkey: OperationTable, leaders, system: OrthogonalSystem,
                  schedule: MixSchedule, cipher: Sequence[int], length: int,
                  rounds: int = 1) -> list[int]:
    if nkey.q != system.q:
        raise ValueError("stream key and orthogonal system use different alphabets")
    cipher = _check_symbols(cipher, nkey.q)
    segments = schedule.segments(length)
    expected = sum(_cipher_length(e, d, system.arity) for e, d in segments)
    if expected != len(cipher):
        raise ValueError(f"expected {expected} cipher symbols for {length} plain symbols, got {len(cipher)}")
    n_inverse = inverse_op(nkey, nkey.arity)
    sys_inverse = inverse_system(system)
    state = StreamState()
    plain: list[int] = []
    pos = 0
    for engine, d in segments:
        size = _cipher_length(engine, d, system.arity)
        segment = cipher[pos:pos + size]
        if engine == STREAM:
            out, state = decrypt_nary_stream(nkey, leaders, segment, state, n_inverse)
        else:
            out = decrypt_blocks(system, segment, d, rounds, sys_inverse)
        plain.extend(out)
        pos += size
    return plain


# -- byte vectors ------------------------------------------------------------

def digits_per_byte(q: int) -> int:
    """Smallest d with ``q**d >= 256``."""
    if q < 2:
        raise ValueError("q must be at least 2")
    d = 1
    while q ** d < 256:
        d += 1
    return d


def vectorize(data: bytes, q: int) -> list[int]:
    """Each byte becomes ``digits_per_byte(q)`` base-q digits, most significant first."""
    d = digits_per_byte(q)
    out = []
    for byte in data:
        digits = []
        for _ in range(d):
            byte, r = divmod(byte, q)
            digits.append(r)
        out.extend(reversed(digits))
    return out


def devectorize(symbols: Sequence[int], q: int) -> bytes:
    d = digits_per_byte(q)
    symbols = list(symbols)
    if len(symbols) % d:
        raise ValueError(f"digit stream length {len(symbols)} is not a multiple of {d}")
    out = bytearray()
    for i in range(0, len(symbols), d):
        value = 0
        for s in symbols[i:i + d]:
            if not 0 <= s < q:
                raise ValueError(f"digit {s} out of range for q={q}")
            value = value * q + s
        if value > 255:
            raise ValueError(f"digit group {symbols[i:i + d]} encodes {value} > 255")
        out.append(value)
    return bytes(out)
